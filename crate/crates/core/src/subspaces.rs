//! Collective bases in which the network Hamiltonian is block diagonal.
//!
//! Two families are supported. The diamond chain uses symmetric and
//! antisymmetric combinations of each control pair. Switch vertices (a
//! standalone switch or the vertices of a hexagonal lattice) use the four
//! Hadamard combinations of their inner sites.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result};
use crate::network::{
    build_diamond_chain, HamiltonianMatrix, NetworkSpec, Role, SystemParams, VertexSites,
    PORT_SIGNS,
};

/// Contiguous run of transformed basis vectors spanning one invariant
/// subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisGroup {
    pub name: String,
    pub start: usize,
    pub len: usize,
}

impl BasisGroup {
    pub fn range(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.len
    }
}

/// Orthogonal change of basis. Row `r` of `q` holds the site-basis
/// coefficients of the `r`-th collective state, so the transformed
/// Hamiltonian is `q * H * q^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalTransform {
    pub q: DMatrix<f64>,
    pub labels: Vec<String>,
    pub groups: Vec<BasisGroup>,
}

impl OrthogonalTransform {
    pub fn identity(dim: usize) -> Self {
        Self {
            q: DMatrix::identity(dim, dim),
            labels: (0..dim).map(|i| format!("e{i}")).collect(),
            groups: vec![BasisGroup { name: "all".into(), start: 0, len: dim }],
        }
    }

    pub fn dim(&self) -> usize {
        self.q.nrows()
    }

    pub fn group(&self, name: &str) -> Option<&BasisGroup> {
        self.groups.iter().find(|g| g.name == name)
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// `max |q^T q - I|`.
    pub fn orthogonality_error(&self) -> f64 {
        let g = self.q.transpose() * &self.q;
        let n = self.dim();
        (g - DMatrix::<f64>::identity(n, n)).amax()
    }

    /// Group index of every transformed basis vector.
    fn membership(&self) -> Vec<usize> {
        let mut owner = vec![usize::MAX; self.dim()];
        for (gi, g) in self.groups.iter().enumerate() {
            for r in g.range() {
                owner[r] = gi;
            }
        }
        owner
    }
}

#[derive(Default)]
struct TransformBuilder {
    rows: Vec<(String, Vec<(usize, f64)>)>,
    groups: Vec<BasisGroup>,
}

impl TransformBuilder {
    fn group(&mut self, name: impl Into<String>, rows: Vec<(String, Vec<(usize, f64)>)>) {
        let start = self.rows.len();
        let len = rows.len();
        self.rows.extend(rows);
        self.groups.push(BasisGroup { name: name.into(), start, len });
    }

    fn finish(self, dim: usize) -> Result<OrthogonalTransform> {
        if self.rows.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: self.rows.len() });
        }
        let mut q = DMatrix::zeros(dim, dim);
        let mut labels = Vec::with_capacity(dim);
        for (r, (label, coeffs)) in self.rows.into_iter().enumerate() {
            for (c, v) in coeffs {
                q[(r, c)] = v;
            }
            labels.push(label);
        }
        Ok(OrthogonalTransform { q, labels, groups: self.groups })
    }
}

fn row(label: String, coeffs: Vec<(usize, f64)>) -> (String, Vec<(usize, f64)>) {
    (label, coeffs)
}

/// Symmetric/antisymmetric basis of the `N`-diamond chain, grouped as
/// `H_1, H_2, ..., H_{N+1}`.
pub fn chain_collective_basis(n: usize) -> Result<OrthogonalTransform> {
    if n < 1 {
        return invalid("chain basis needs N >= 1");
    }
    let s = FRAC_1_SQRT_2;
    // 0-based indices of the standard basis: site k (1-based) has its
    // cavity at 2k-2 and its atom at 2k-1.
    let cav = |site: usize| 2 * site - 2;
    let atom = |site: usize| 2 * site - 1;
    let c = |k: usize| row(format!("c_{k}"), vec![(cav(3 * k - 2), 1.0)]);
    let a = |k: usize| row(format!("a_{k}"), vec![(atom(3 * k - 2), 1.0)]);
    let cp = |k: usize, sign: f64, tag: &str| {
        row(format!("c_{k}^{tag}"), vec![(cav(3 * k - 1), s), (cav(3 * k), sign * s)])
    };
    let ap = |k: usize, sign: f64, tag: &str| {
        row(format!("a_{k}^{tag}"), vec![(atom(3 * k - 1), s), (atom(3 * k), sign * s)])
    };

    let mut b = TransformBuilder::default();
    b.group("H_1", vec![c(1), a(1), cp(1, 1.0, "+"), ap(1, 1.0, "+")]);
    for k in 1..n {
        b.group(
            format!("H_{}", k + 1),
            vec![
                cp(k, -1.0, "-"),
                ap(k, -1.0, "-"),
                c(k + 1),
                a(k + 1),
                cp(k + 1, 1.0, "+"),
                ap(k + 1, 1.0, "+"),
            ],
        );
    }
    b.group(format!("H_{}", n + 1), vec![cp(n, -1.0, "-"), ap(n, -1.0, "-"), c(n + 1), a(n + 1)]);
    b.finish(2 * (3 * n + 1))
}

/// Finds switch vertices in a network: groups of four control sites that
/// share the same four neighbours, coupled with the Hadamard sign pattern.
/// Inner sites are taken in increasing id order as ports 0-3; each
/// neighbour is placed in the slot whose sign column it matches.
pub fn discover_vertices(spec: &NetworkSpec) -> Vec<VertexSites> {
    let adj = spec.adjacency();
    let mut by_neighbours: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for s in spec.sites.iter().filter(|s| s.role == Role::Control) {
        let key: Vec<usize> = adj[s.id].keys().copied().collect();
        by_neighbours.entry(key).or_default().push(s.id);
    }
    let mut found = Vec::new();
    for (neigh, mut inner) in by_neighbours {
        if inner.len() != 4 || neigh.len() != 4 {
            continue;
        }
        inner.sort_unstable();
        let mut slots = [usize::MAX; 4];
        let mut ok = true;
        for &outer in &neigh {
            let signs: Vec<i8> = inner.iter().map(|&i| adj[i][&outer]).collect();
            match (0..4).find(|&j| (0..4).all(|k| PORT_SIGNS[k][j] == signs[k])) {
                Some(j) if slots[j] == usize::MAX => slots[j] = outer,
                _ => ok = false,
            }
        }
        if ok {
            found.push(VertexSites { inner: [inner[0], inner[1], inner[2], inner[3]], slots });
        }
    }
    found.sort_by_key(|v| v.inner[0]);
    found
}

fn xi_rows(tag: &str, inner: &[usize; 4], port: usize) -> Vec<(String, Vec<(usize, f64)>)> {
    let coeffs = |offset: usize| {
        (0..4)
            .map(|k| (2 * inner[k] + offset, 0.5 * f64::from(PORT_SIGNS[port][k])))
            .collect::<Vec<_>>()
    };
    vec![
        row(format!("xi_{tag}.{port}^c"), coeffs(0)),
        row(format!("xi_{tag}.{port}^a"), coeffs(1)),
    ]
}

fn site_rows(spec: &NetworkSpec, site: usize) -> Vec<(String, Vec<(usize, f64)>)> {
    let label = &spec.sites[site].label;
    vec![
        row(format!("{label}^c"), vec![(2 * site, 1.0)]),
        row(format!("{label}^a"), vec![(2 * site + 1, 1.0)]),
    ]
}

fn vertex_basis(spec: &NetworkSpec, vertices: &[VertexSites]) -> Result<OrthogonalTransform> {
    let m = spec.site_count();
    let mut touching: Vec<Vec<(usize, usize)>> = vec![Vec::new(); m];
    let mut used = vec![false; m];
    for (vi, v) in vertices.iter().enumerate() {
        for &i in &v.inner {
            if i >= m || used[i] {
                return invalid(format!("inner site {i} is out of range or shared"));
            }
            used[i] = true;
        }
        for (slot, &s) in v.slots.iter().enumerate() {
            if s >= m {
                return invalid(format!("slot site {s} is out of range"));
            }
            touching[s].push((vi, slot));
        }
    }

    let mut b = TransformBuilder::default();
    for (vi, v) in vertices.iter().enumerate() {
        for &s in &v.slots {
            if used[s] {
                continue;
            }
            used[s] = true;
            match touching[s].as_slice() {
                [(a, i)] => {
                    let mut rows = site_rows(spec, s);
                    rows.extend(xi_rows(&format!("v{a}"), &vertices[*a].inner, *i));
                    b.group(format!("H_v{a}.{i}"), rows);
                }
                [(a, i), (c, j)] => {
                    let mut rows = xi_rows(&format!("v{a}"), &vertices[*a].inner, *i);
                    rows.extend(site_rows(spec, s));
                    rows.extend(xi_rows(&format!("v{c}"), &vertices[*c].inner, *j));
                    b.group(format!("H_v{a}.{i}~v{c}.{j}"), rows);
                }
                _ => {
                    return invalid(format!(
                        "site {s} touches {} vertices (vertex {vi}); at most two allowed",
                        touching[s].len()
                    ))
                }
            }
        }
    }
    for (s, _) in used.iter().enumerate().filter(|(_, &u)| !u) {
        b.group(format!("site {}", spec.sites[s].label), site_rows(spec, s));
    }
    b.finish(2 * m)
}

/// Hadamard basis for one switch vertex. `inner` lists the control sites
/// in port order and `outer[i]` is the site in slot `i`. Groups come out as
/// `H_v0.0 .. H_v0.3` (one per port), followed by any untouched sites.
pub fn switch_collective_basis(
    spec: &NetworkSpec,
    inner: &[usize],
    outer: &[usize],
) -> Result<OrthogonalTransform> {
    let (Ok(inner), Ok(slots)) = (<[usize; 4]>::try_from(inner), <[usize; 4]>::try_from(outer))
    else {
        return invalid(format!(
            "a switch vertex needs 4 inner and 4 outer sites, got {} and {}",
            inner.len(),
            outer.len()
        ));
    };
    vertex_basis(spec, &[VertexSites { inner, slots }])
}

/// Hadamard basis for every switch vertex found in the network (see
/// [`discover_vertices`]). Vertex `k` in the group names is the `k`-th
/// vertex in order of its lowest inner site id.
pub fn lattice_collective_basis(spec: &NetworkSpec) -> Result<OrthogonalTransform> {
    let vertices = discover_vertices(spec);
    if vertices.is_empty() && spec.site_count() > 0 {
        return invalid("no switch vertices found");
    }
    vertex_basis(spec, &vertices)
}

/// Cavity-cavity coupling that appears inside an invariant block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingScale {
    /// `sqrt(2) J`: chain blocks.
    Sqrt2J,
    /// `2 J`: switch and lattice blocks.
    TwoJ,
}

impl CouplingScale {
    pub fn value(self, j: f64) -> f64 {
        match self {
            Self::Sqrt2J => std::f64::consts::SQRT_2 * j,
            Self::TwoJ => 2.0 * j,
        }
    }
}

/// Small invariant block written in its collective basis.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockHamiltonian {
    pub matrix: DMatrix<f64>,
    pub basis_labels: Vec<String>,
    pub origin: String,
}

impl BlockHamiltonian {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `cells` atom-cavity cells on a line, neighbouring cavities coupled by
    /// `kappa`. Basis order: cavity, atom, cavity, atom, ...
    pub fn cell_line(params: &SystemParams, kappa: f64, cells: usize) -> DMatrix<f64> {
        let n = 2 * cells;
        let mut h = DMatrix::zeros(n, n);
        for c in 0..cells {
            h[(2 * c, 2 * c)] = params.omega_c;
            h[(2 * c + 1, 2 * c + 1)] = params.omega_a();
            h[(2 * c, 2 * c + 1)] = params.g;
            h[(2 * c + 1, 2 * c)] = params.g;
            if c + 1 < cells {
                h[(2 * c, 2 * c + 2)] = kappa;
                h[(2 * c + 2, 2 * c)] = kappa;
            }
        }
        h
    }

    /// Two coupled cells (4x4).
    pub fn pair(params: &SystemParams, scale: CouplingScale) -> Self {
        Self {
            matrix: Self::cell_line(params, scale.value(params.j), 2),
            basis_labels: ["c1", "a1", "c2", "a2"].map(String::from).to_vec(),
            origin: "pair".into(),
        }
    }

    /// Three cells on a line (6x6).
    pub fn triple(params: &SystemParams, scale: CouplingScale) -> Self {
        Self {
            matrix: Self::cell_line(params, scale.value(params.j), 3),
            basis_labels: ["c1", "a1", "c2", "a2", "c3", "a3"].map(String::from).to_vec(),
            origin: "triple".into(),
        }
    }
}

/// Transforms `h` with `t`, cuts out the diagonal blocks of `t.groups`,
/// and reports the largest entry left outside them.
pub fn block_decompose(
    h: &HamiltonianMatrix,
    t: &OrthogonalTransform,
) -> Result<(Vec<BlockHamiltonian>, f64)> {
    if h.dim() != t.dim() {
        return Err(Error::DimensionMismatch { expected: t.dim(), found: h.dim() });
    }
    let ht = &t.q * h.matrix() * t.q.transpose();
    let owner = t.membership();
    let mut residual = 0.0f64;
    for r in 0..ht.nrows() {
        for c in 0..ht.ncols() {
            if owner[r] != owner[c] {
                residual = residual.max(ht[(r, c)].abs());
            }
        }
    }
    let blocks = t
        .groups
        .iter()
        .map(|g| BlockHamiltonian {
            matrix: ht.view((g.start, g.start), (g.len, g.len)).into_owned(),
            basis_labels: t.labels[g.range()].to_vec(),
            origin: g.name.clone(),
        })
        .collect();
    Ok((blocks, residual))
}

/// Named invariant subspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subspace {
    /// `H_n` of a diamond chain, `n = 1..=N+1`.
    Chain(usize),
    /// Upload or port block of a switch vertex: the subspace of slot `port`
    /// of the `vertex`-th discovered vertex. `port = 0` is the upload block.
    Port { vertex: usize, port: usize },
    /// Hop block between two linked vertices.
    Hop { from: usize, to: usize },
}

/// Number of diamonds if `spec` is exactly a diamond chain.
pub fn chain_length(spec: &NetworkSpec) -> Option<usize> {
    let m = spec.site_count();
    if m < 4 || m % 3 != 1 {
        return None;
    }
    let n = (m - 1) / 3;
    let reference = build_diamond_chain(n, spec.params).ok()?;
    let canon = |s: &NetworkSpec| {
        let mut e: Vec<_> = s.edges.iter().map(|e| (e.a.min(e.b), e.a.max(e.b), e.sign)).collect();
        e.sort_unstable();
        e
    };
    (canon(spec) == canon(&reference)).then_some(n)
}

/// Explicit block matrix of a named subspace, after checking that the
/// subspace exists in `spec`. Labels and origin match the groups produced
/// by [`chain_collective_basis`] and [`lattice_collective_basis`].
pub fn extract_block(spec: &NetworkSpec, which: Subspace) -> Result<BlockHamiltonian> {
    let p = &spec.params;
    match which {
        Subspace::Chain(k) => {
            let Some(n) = chain_length(spec) else {
                return invalid("chain subspace requested on a network that is not a diamond chain");
            };
            if k < 1 || k > n + 1 {
                return invalid(format!("chain subspace H_{k} does not exist for N = {n}"));
            }
            let t = chain_collective_basis(n)?;
            let g = t.group(&format!("H_{k}")).expect("chain groups are H_1..H_{N+1}");
            let mut block = if g.len == 4 {
                BlockHamiltonian::pair(p, CouplingScale::Sqrt2J)
            } else {
                BlockHamiltonian::triple(p, CouplingScale::Sqrt2J)
            };
            block.basis_labels = t.labels[g.range()].to_vec();
            block.origin = g.name.clone();
            Ok(block)
        }
        Subspace::Port { vertex, port } => {
            let t = lattice_collective_basis(spec)?;
            let name = format!("H_v{vertex}.{port}");
            let Some(g) = t.group(&name) else {
                return invalid(format!("no single-vertex block {name} in this network"));
            };
            let mut block = BlockHamiltonian::pair(p, CouplingScale::TwoJ);
            block.basis_labels = t.labels[g.range()].to_vec();
            block.origin = name;
            Ok(block)
        }
        Subspace::Hop { from, to } => {
            let t = lattice_collective_basis(spec)?;
            let (lo, hi) = (from.min(to), from.max(to));
            let prefix = format!("H_v{lo}.");
            let needle = format!("~v{hi}.");
            let Some(g) = t.groups.iter().find(|g| g.name.starts_with(&prefix) && g.name.contains(&needle))
            else {
                return invalid(format!("vertices {from} and {to} are not linked"));
            };
            let mut labels = t.labels[g.range()].to_vec();
            if from > to {
                // reverse cell order, keep (cavity, atom) inside each cell
                labels = labels.chunks(2).rev().flatten().cloned().collect();
            }
            let mut block = BlockHamiltonian::triple(p, CouplingScale::TwoJ);
            block.basis_labels = labels;
            block.origin = g.name.clone();
            Ok(block)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{
        build_hex_lattice, build_single_excitation_hamiltonian, build_switch, HexLatticeDescriptor,
    };

    fn p() -> SystemParams {
        SystemParams::resonant()
    }

    #[test]
    fn chain_basis_rows() {
        let t = chain_collective_basis(1).unwrap();
        let r = t.label_index("c_1^+").unwrap();
        let s = FRAC_1_SQRT_2;
        let expected = [0.0, 0.0, s, 0.0, s, 0.0, 0.0, 0.0];
        assert_eq!(t.q.row(r).iter().copied().collect::<Vec<_>>(), expected);
        let names: Vec<_> = t.groups.iter().map(|g| g.name.as_str()).collect();
        assert_eq!(names, ["H_1", "H_2"]);
        assert_eq!(&t.labels[0..4], ["c_1", "a_1", "c_1^+", "a_1^+"]);
        assert_eq!(&t.labels[4..8], ["c_1^-", "a_1^-", "c_2", "a_2"]);
    }

    #[test]
    fn chain_basis_is_orthogonal() {
        for n in 1..=6 {
            let t = chain_collective_basis(n).unwrap();
            assert!(t.orthogonality_error() <= 1e-12);
            for r in 0..t.dim() {
                let nz: Vec<f64> = t.q.row(r).iter().copied().filter(|v| *v != 0.0).collect();
                assert!(nz.len() <= 4);
                assert!(nz.iter().all(|v| [1.0, FRAC_1_SQRT_2].contains(&v.abs())));
            }
        }
        assert!(chain_collective_basis(0).is_err());
    }

    #[test]
    fn chain_n2_blocks() {
        let spec = build_diamond_chain(2, p()).unwrap();
        let h = build_single_excitation_hamiltonian(&spec).unwrap();
        let (blocks, residual) = block_decompose(&h, &chain_collective_basis(2).unwrap()).unwrap();
        let sizes: Vec<_> = blocks.iter().map(|b| b.dim()).collect();
        assert_eq!(sizes, [4, 6, 4]);
        assert!(residual <= 1e-12, "{residual}");
    }

    #[test]
    fn switch_blocks_and_xi_rows() {
        let spec = build_switch(p());
        let t = switch_collective_basis(&spec, &[4, 5, 6, 7], &[0, 1, 2, 3]).unwrap();
        assert!(t.orthogonality_error() <= 1e-12);
        let r = t.label_index("xi_v0.1^a").unwrap();
        let atoms: Vec<f64> = (4..8).map(|s| t.q[(r, 2 * s + 1)]).collect();
        assert_eq!(atoms, [0.5, 0.5, -0.5, -0.5]);
        for a in 0..4 {
            for b in 0..4 {
                let ra = t.label_index(&format!("xi_v0.{a}^c")).unwrap();
                let rb = t.label_index(&format!("xi_v0.{b}^c")).unwrap();
                let dot = t.q.row(ra).dot(&t.q.row(rb));
                assert!((dot - if a == b { 1.0 } else { 0.0 }).abs() < 1e-15);
            }
        }
        let h = build_single_excitation_hamiltonian(&spec).unwrap();
        let (blocks, residual) = block_decompose(&h, &t).unwrap();
        assert_eq!(blocks.iter().map(|b| b.dim()).collect::<Vec<_>>(), [4, 4, 4, 4]);
        assert!(residual <= 1e-12);
        // xi_0 cavity couples to the nu0 cavity with 2J
        assert!((blocks[0].matrix[(0, 2)] - 2.0).abs() < 1e-14);
        assert!(switch_collective_basis(&spec, &[4, 5, 6], &[0, 1, 2, 3]).is_err());
    }

    #[test]
    fn discovery_matches_builders() {
        let sw = discover_vertices(&build_switch(p()));
        assert_eq!(sw, vec![VertexSites { inner: [4, 5, 6, 7], slots: [0, 1, 2, 3] }]);
        let desc = HexLatticeDescriptor::two_vertex();
        let spec = build_hex_lattice(&desc, p()).unwrap();
        let layout = crate::network::HexLayout::new(&desc).unwrap();
        assert_eq!(discover_vertices(&spec), layout.vertices);
        assert!(discover_vertices(&build_diamond_chain(3, p()).unwrap()).is_empty());
    }

    #[test]
    fn identity_transform_single_block() {
        let spec = build_diamond_chain(1, p()).unwrap();
        let h = build_single_excitation_hamiltonian(&spec).unwrap();
        let (blocks, residual) = block_decompose(&h, &OrthogonalTransform::identity(8)).unwrap();
        assert_eq!(blocks.len(), 1);
        assert_eq!(residual, 0.0);
        assert_eq!(&blocks[0].matrix, h.matrix());
        assert!(block_decompose(&h, &OrthogonalTransform::identity(6)).is_err());
    }

    #[test]
    fn explicit_blocks() {
        let q = SystemParams::new(1.0, -2.0, 65.0, 1.0).unwrap();
        let spec = build_diamond_chain(3, q).unwrap();
        let h1 = extract_block(&spec, Subspace::Chain(1)).unwrap();
        let r2 = std::f64::consts::SQRT_2;
        let expected = DMatrix::from_row_slice(
            4,
            4,
            &[1.0, 65.0, r2, 0.0, 65.0, 3.0, 0.0, 0.0, r2, 0.0, 1.0, 65.0, 0.0, 0.0, 65.0, 3.0],
        );
        assert_eq!(h1.matrix, expected);
        assert_eq!(extract_block(&spec, Subspace::Chain(2)).unwrap().dim(), 6);
        assert_eq!(extract_block(&spec, Subspace::Chain(4)).unwrap().dim(), 4);
        assert!(extract_block(&spec, Subspace::Chain(5)).is_err());
        assert!(extract_block(&spec, Subspace::Port { vertex: 0, port: 0 }).is_err());

        let sw = build_switch(q);
        let mu0 = extract_block(&sw, Subspace::Port { vertex: 0, port: 0 }).unwrap();
        assert_eq!(mu0.matrix[(0, 2)], 2.0);
        assert_eq!(mu0.matrix[(1, 1)], 3.0);

        let hex = build_hex_lattice(&HexLatticeDescriptor::two_vertex(), q).unwrap();
        let hop = extract_block(&hex, Subspace::Hop { from: 0, to: 1 }).unwrap();
        assert_eq!(hop.matrix[(0, 2)], 2.0);
        assert_eq!(hop.matrix[(2, 4)], 2.0);
        assert_eq!(hop.matrix[(0, 4)], 0.0);
        let back = extract_block(&hex, Subspace::Hop { from: 1, to: 0 }).unwrap();
        assert_eq!(back.basis_labels[0], "xi_v1.2^c");
        assert!(extract_block(&hex, Subspace::Hop { from: 0, to: 0 }).is_err());
    }

    #[test]
    fn extracted_blocks_match_decomposition() {
        let q = SystemParams::new(1.0, -1000.0, 65.0, 1.0).unwrap();
        let check = |spec: &NetworkSpec, t: &OrthogonalTransform, sel: Subspace| {
            let h = build_single_excitation_hamiltonian(spec).unwrap();
            let (blocks, _) = block_decompose(&h, t).unwrap();
            let e = extract_block(spec, sel).unwrap();
            let b = blocks.iter().find(|b| b.origin == e.origin).unwrap();
            assert_eq!(b.basis_labels, e.basis_labels);
            assert!((&b.matrix - &e.matrix).amax() <= 1e-12);
        };
        let chain = build_diamond_chain(3, q).unwrap();
        let tc = chain_collective_basis(3).unwrap();
        for k in 1..=4 {
            check(&chain, &tc, Subspace::Chain(k));
        }
        let sw = build_switch(q);
        let ts = lattice_collective_basis(&sw).unwrap();
        for port in 0..4 {
            check(&sw, &ts, Subspace::Port { vertex: 0, port });
        }
        let hex = build_hex_lattice(&HexLatticeDescriptor::two_vertex(), q).unwrap();
        let th = lattice_collective_basis(&hex).unwrap();
        check(&hex, &th, Subspace::Hop { from: 0, to: 1 });
        check(&hex, &th, Subspace::Port { vertex: 1, port: 0 });
        check(&hex, &th, Subspace::Port { vertex: 1, port: 3 });
    }
}
