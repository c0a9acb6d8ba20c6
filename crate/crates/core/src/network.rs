//! Physical parameters, network topologies and the single-excitation
//! Hamiltonian.
//!
//! Site `i` owns two rows of the Hamiltonian: `2i` for its cavity mode and
//! `2i + 1` for its atom. Ids are 0-based; the chain builder labels sites
//! `1..=3N+1` so printed output lines up with the usual `|j>` numbering.

use std::collections::{BTreeMap, HashSet};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Sign pattern of the switch coupling matrix: inner site `k` couples to
/// outer slot `j` with `PORT_SIGNS[k][j] * J`. The rows are mutually
/// orthogonal and the matrix is symmetric.
pub const PORT_SIGNS: [[i8; 4]; 4] = [
    [1, 1, 1, 1],
    [1, 1, -1, -1],
    [1, -1, 1, -1],
    [1, -1, -1, 1],
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Cavity mode frequency.
    pub omega_c: f64,
    /// Detuning `omega_c - omega_a`.
    pub delta: f64,
    /// Atom-cavity coupling.
    pub g: f64,
    /// Cavity-cavity hopping magnitude.
    pub j: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self::resonant()
    }
}

impl SystemParams {
    pub fn new(omega_c: f64, delta: f64, g: f64, j: f64) -> Result<Self> {
        let p = Self { omega_c, delta, g, j };
        p.validate()?;
        Ok(p)
    }

    /// `omega_c = 1, J = 1, G = 65`, on resonance.
    pub fn resonant() -> Self {
        Self { omega_c: 1.0, delta: 0.0, g: 65.0, j: 1.0 }
    }

    /// Same couplings as [`SystemParams::resonant`] with `delta = -1000`.
    pub fn dispersive() -> Self {
        Self { delta: -1000.0, ..Self::resonant() }
    }

    pub fn with_delta(self, delta: f64) -> Self {
        Self { delta, ..self }
    }

    /// Atomic transition frequency, derived from the cavity frequency and
    /// the detuning.
    pub fn omega_a(&self) -> f64 {
        self.omega_c - self.delta
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_c.is_finite() && self.delta.is_finite()) {
            return invalid("omega_c and delta must be finite");
        }
        if !(self.g.is_finite() && self.g > 0.0) {
            return invalid(format!("g must be positive, got {}", self.g));
        }
        if !(self.j.is_finite() && self.j > 0.0) {
            return invalid(format!("j must be positive, got {}", self.j));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Vertex,
    Control,
    Port,
    Upload,
    Plain,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Site {
    pub id: usize,
    pub label: String,
    pub role: Role,
}

/// Cavity-cavity coupling of strength `sign * J` between sites `a` and `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "(usize, usize, i8)", into = "(usize, usize, i8)")]
pub struct Link {
    pub a: usize,
    pub b: usize,
    pub sign: i8,
}

impl From<(usize, usize, i8)> for Link {
    fn from((a, b, sign): (usize, usize, i8)) -> Self {
        Self { a, b, sign }
    }
}

impl From<Link> for (usize, usize, i8) {
    fn from(l: Link) -> Self {
        (l.a, l.b, l.sign)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub sites: Vec<Site>,
    pub edges: Vec<Link>,
    pub params: SystemParams,
}

impl NetworkSpec {
    pub fn empty(params: SystemParams) -> Self {
        Self { sites: Vec::new(), edges: Vec::new(), params }
    }

    pub fn site_count(&self) -> usize {
        self.sites.len()
    }

    /// Dimension of the single-excitation sector.
    pub fn dim(&self) -> usize {
        2 * self.sites.len()
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        for (i, s) in self.sites.iter().enumerate() {
            if s.id != i {
                return invalid(format!("site at position {i} has id {}", s.id));
            }
        }
        let m = self.sites.len();
        let mut seen = HashSet::new();
        for e in &self.edges {
            if e.a >= m || e.b >= m {
                return invalid(format!("edge ({}, {}) references a missing site", e.a, e.b));
            }
            if e.a == e.b {
                return invalid(format!("self-loop on site {}", e.a));
            }
            if e.sign != 1 && e.sign != -1 {
                return invalid(format!("edge ({}, {}) has sign {}", e.a, e.b, e.sign));
            }
            if !seen.insert((e.a.min(e.b), e.a.max(e.b))) {
                return invalid(format!("duplicate edge ({}, {})", e.a, e.b));
            }
        }
        Ok(())
    }

    /// Signed coupling between two sites, if they are linked.
    pub fn sign_between(&self, k: usize, l: usize) -> Option<i8> {
        self.edges
            .iter()
            .find(|e| (e.a == k && e.b == l) || (e.a == l && e.b == k))
            .map(|e| e.sign)
    }

    /// Neighbours of each site with the sign of the connecting edge.
    pub fn adjacency(&self) -> Vec<BTreeMap<usize, i8>> {
        let mut adj = vec![BTreeMap::new(); self.sites.len()];
        for e in &self.edges {
            if e.a < adj.len() && e.b < adj.len() {
                adj[e.a].insert(e.b, e.sign);
                adj[e.b].insert(e.a, e.sign);
            }
        }
        adj
    }

    pub fn sites_with_role(&self, role: Role) -> Vec<usize> {
        self.sites.iter().filter(|s| s.role == role).map(|s| s.id).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }
}

/// Real symmetric Hamiltonian on the single-excitation sector.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMatrix {
    matrix: DMatrix<f64>,
}

impl HamiltonianMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn cavity_index(site: usize) -> usize {
        2 * site
    }

    pub fn atom_index(site: usize) -> usize {
        2 * site + 1
    }
}

pub fn build_single_excitation_hamiltonian(spec: &NetworkSpec) -> Result<HamiltonianMatrix> {
    spec.validate()?;
    let p = &spec.params;
    let n = spec.dim();
    let mut h = DMatrix::<f64>::zeros(n, n);
    for i in 0..spec.site_count() {
        let (c, a) = (2 * i, 2 * i + 1);
        h[(c, c)] = p.omega_c;
        h[(a, a)] = p.omega_a();
        h[(c, a)] = p.g;
        h[(a, c)] = p.g;
    }
    for e in &spec.edges {
        let v = f64::from(e.sign) * p.j;
        h[(2 * e.a, 2 * e.b)] = v;
        h[(2 * e.b, 2 * e.a)] = v;
    }
    Ok(HamiltonianMatrix { matrix: h })
}

/// Chain of `N` diamonds: vertex `3n-2` feeds the control pair `(3n-1, 3n)`,
/// which feeds vertex `3n+1`. Only the `(3n, 3n+1)` hop is negative.
pub fn build_diamond_chain(n: usize, params: SystemParams) -> Result<NetworkSpec> {
    if n < 1 {
        return invalid("diamond chain needs N >= 1");
    }
    params.validate()?;
    let m = 3 * n + 1;
    let sites = (0..m)
        .map(|id| {
            let number = id + 1;
            let role = if number % 3 == 1 { Role::Vertex } else { Role::Control };
            Site { id, label: number.to_string(), role }
        })
        .collect();
    let mut edges = Vec::with_capacity(4 * n);
    for k in 1..=n {
        // 1-based site numbers from the chain layout, shifted to ids.
        let (v, c1, c2, next) = (3 * k - 3, 3 * k - 2, 3 * k - 1, 3 * k);
        edges.push(Link { a: v, b: c1, sign: 1 });
        edges.push(Link { a: v, b: c2, sign: 1 });
        edges.push(Link { a: c1, b: next, sign: 1 });
        edges.push(Link { a: c2, b: next, sign: -1 });
    }
    Ok(NetworkSpec { sites, edges, params })
}

/// Four-port switch. Outer sites `nu0..nu3` take ids 0-3 (`nu0` is the
/// upload port), inner control sites `mu0..mu3` take ids 4-7.
pub fn build_switch(params: SystemParams) -> NetworkSpec {
    let mut sites = Vec::with_capacity(8);
    for i in 0..4 {
        let role = if i == 0 { Role::Upload } else { Role::Port };
        sites.push(Site { id: i, label: format!("nu{i}"), role });
    }
    for i in 0..4 {
        sites.push(Site { id: 4 + i, label: format!("mu{i}"), role: Role::Control });
    }
    let mut edges = Vec::with_capacity(16);
    for (i, row) in PORT_SIGNS.iter().enumerate() {
        for (j, &sign) in row.iter().enumerate() {
            edges.push(Link { a: 4 + i, b: j, sign });
        }
    }
    NetworkSpec { sites, edges, params }
}

/// Planar link between port `port_a` of vertex `a` and port `port_b` of
/// vertex `b`. Planar ports are numbered 1-3; port 0 is the upload slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "(u32, usize, u32, usize)", into = "(u32, usize, u32, usize)")]
pub struct LatticeLink {
    pub a: u32,
    pub port_a: usize,
    pub b: u32,
    pub port_b: usize,
}

impl From<(u32, usize, u32, usize)> for LatticeLink {
    fn from((a, port_a, b, port_b): (u32, usize, u32, usize)) -> Self {
        Self { a, port_a, b, port_b }
    }
}

impl From<LatticeLink> for (u32, usize, u32, usize) {
    fn from(l: LatticeLink) -> Self {
        (l.a, l.port_a, l.b, l.port_b)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct HexLatticeDescriptor {
    pub vertices: Vec<u32>,
    pub links: Vec<LatticeLink>,
    #[serde(default)]
    pub uploads: Vec<u32>,
}

impl HexLatticeDescriptor {
    /// Two vertices joined by one link (port 1 of the first, port 2 of the
    /// second), each with an upload port.
    pub fn two_vertex() -> Self {
        Self {
            vertices: vec![0, 1],
            links: vec![LatticeLink { a: 0, port_a: 1, b: 1, port_b: 2 }],
            uploads: vec![0, 1],
        }
    }

    pub fn vertex_index(&self, id: u32) -> Option<usize> {
        self.vertices.iter().position(|&v| v == id)
    }
}

/// Site ids of one switch vertex: its four inner sites in port order and
/// the site sitting in each of its four slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VertexSites {
    pub inner: [usize; 4],
    pub slots: [usize; 4],
}

/// Deterministic site numbering for a hexagonal lattice descriptor: inner
/// sites first (four per vertex), then one site per link, then upload ports,
/// then dangling port slots.
#[derive(Debug, Clone, PartialEq)]
pub struct HexLayout {
    pub vertex_ids: Vec<u32>,
    pub vertices: Vec<VertexSites>,
    pub link_sites: Vec<usize>,
    pub site_count: usize,
}

impl HexLayout {
    pub fn new(desc: &HexLatticeDescriptor) -> Result<Self> {
        let nv = desc.vertices.len();
        let mut ids = HashSet::new();
        for &v in &desc.vertices {
            if !ids.insert(v) {
                return invalid(format!("duplicate vertex id {v}"));
            }
        }
        let index = |v: u32| {
            desc.vertex_index(v)
                .ok_or_else(|| crate::Error::InvalidArgument(format!("unknown vertex {v}")))
        };

        let mut slots: Vec<[Option<usize>; 4]> = vec![[None; 4]; nv];
        let mut next = 4 * nv;
        let mut link_sites = Vec::with_capacity(desc.links.len());
        for l in &desc.links {
            let (ia, ib) = (index(l.a)?, index(l.b)?);
            if ia == ib {
                return invalid(format!("link connects vertex {} to itself", l.a));
            }
            for (iv, port) in [(ia, l.port_a), (ib, l.port_b)] {
                if !(1..=3).contains(&port) {
                    return invalid(format!("planar port must be 1..=3, got {port}"));
                }
                if slots[iv][port].is_some() {
                    return invalid(format!(
                        "port {port} of vertex {} is used twice",
                        desc.vertices[iv]
                    ));
                }
                slots[iv][port] = Some(next);
            }
            link_sites.push(next);
            next += 1;
        }

        let mut uploads = HashSet::new();
        for &u in &desc.uploads {
            index(u)?;
            if !uploads.insert(u) {
                return invalid(format!("vertex {u} listed twice as upload"));
            }
        }
        for (iv, &v) in desc.vertices.iter().enumerate() {
            if uploads.contains(&v) {
                slots[iv][0] = Some(next);
                next += 1;
            }
        }
        for slot in slots.iter_mut() {
            for s in slot.iter_mut() {
                if s.is_none() {
                    *s = Some(next);
                    next += 1;
                }
            }
        }

        let vertices = slots
            .iter()
            .enumerate()
            .map(|(iv, s)| VertexSites {
                inner: [4 * iv, 4 * iv + 1, 4 * iv + 2, 4 * iv + 3],
                slots: s.map(|x| x.expect("every slot assigned")),
            })
            .collect();
        Ok(Self { vertex_ids: desc.vertices.clone(), vertices, link_sites, site_count: next })
    }

    pub fn vertex(&self, id: u32) -> Result<&VertexSites> {
        match self.vertex_ids.iter().position(|&v| v == id) {
            Some(i) => Ok(&self.vertices[i]),
            None => invalid(format!("unknown vertex {id}")),
        }
    }
}

pub fn build_hex_lattice(desc: &HexLatticeDescriptor, params: SystemParams) -> Result<NetworkSpec> {
    params.validate()?;
    let layout = HexLayout::new(desc)?;
    let mut sites: Vec<Option<Site>> = vec![None; layout.site_count];

    for (iv, vs) in layout.vertices.iter().enumerate() {
        let vid = desc.vertices[iv];
        for (k, &s) in vs.inner.iter().enumerate() {
            sites[s] = Some(Site { id: s, label: format!("v{vid}.mu{k}"), role: Role::Control });
        }
    }
    for (l, &s) in desc.links.iter().zip(&layout.link_sites) {
        let label = format!("v{}.{}-v{}.{}", l.a, l.port_a, l.b, l.port_b);
        sites[s] = Some(Site { id: s, label, role: Role::Port });
    }
    for (iv, vs) in layout.vertices.iter().enumerate() {
        let vid = desc.vertices[iv];
        for (slot, &s) in vs.slots.iter().enumerate() {
            if sites[s].is_some() {
                continue;
            }
            let role = if slot == 0 && desc.uploads.contains(&vid) {
                Role::Upload
            } else {
                Role::Plain
            };
            sites[s] = Some(Site { id: s, label: format!("v{vid}.nu{slot}"), role });
        }
    }

    let mut edges = Vec::with_capacity(16 * layout.vertices.len());
    for vs in &layout.vertices {
        for (k, row) in PORT_SIGNS.iter().enumerate() {
            for (slot, &sign) in row.iter().enumerate() {
                edges.push(Link { a: vs.inner[k], b: vs.slots[slot], sign });
            }
        }
    }
    let spec = NetworkSpec {
        sites: sites.into_iter().map(|s| s.expect("every site labelled")).collect(),
        edges,
        params,
    };
    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
#[allow(clippy::approx_constant, clippy::needless_range_loop)]
mod tests {
    use super::*;

    fn p() -> SystemParams {
        SystemParams::resonant()
    }

    #[test]
    fn params_validation() {
        assert!(SystemParams::new(1.0, 0.0, 0.0, 1.0).is_err());
        assert!(SystemParams::new(1.0, 0.0, 65.0, -1.0).is_err());
        assert!(SystemParams::new(f64::NAN, 0.0, 65.0, 1.0).is_err());
        let q = SystemParams::new(1.0, -3.0, 2.0, 1.0).unwrap();
        assert_eq!(q.omega_a(), 4.0);
    }

    #[test]
    fn diamond_chain_single_cell() {
        let spec = build_diamond_chain(1, p()).unwrap();
        assert_eq!(spec.site_count(), 4);
        let edges: Vec<_> = spec.edges.iter().map(|e| (e.a + 1, e.b + 1, e.sign)).collect();
        assert_eq!(edges, vec![(1, 2, 1), (1, 3, 1), (2, 4, 1), (3, 4, -1)]);
        assert_eq!(spec.sites_with_role(Role::Control), vec![1, 2]);
        assert_eq!(spec.sites_with_role(Role::Vertex), vec![0, 3]);
        assert_eq!(spec.sites[3].label, "4");
    }

    #[test]
    fn diamond_chain_two_cells() {
        let spec = build_diamond_chain(2, p()).unwrap();
        assert_eq!(spec.site_count(), 7);
        assert_eq!(spec.edges.len(), 8);
        let neg: Vec<_> = spec
            .edges
            .iter()
            .filter(|e| e.sign < 0)
            .map(|e| (e.a + 1, e.b + 1))
            .collect();
        assert_eq!(neg, vec![(3, 4), (6, 7)]);
        assert!(build_diamond_chain(0, p()).is_err());
    }

    #[test]
    fn switch_couplings() {
        let spec = build_switch(p());
        assert_eq!(spec.site_count(), 8);
        assert_eq!(spec.edges.len(), 16);
        assert!(spec.edges.iter().all(|e| e.a >= 4 && e.b < 4));
        assert_eq!(spec.sign_between(6, 3), Some(-1));
        for j in 0..4 {
            assert_eq!(spec.sign_between(4, j), Some(1));
        }
        for a in 0..4 {
            for b in 0..4 {
                let dot: i32 = (0..4)
                    .map(|k| i32::from(PORT_SIGNS[a][k]) * i32::from(PORT_SIGNS[b][k]))
                    .sum();
                assert_eq!(dot, if a == b { 4 } else { 0 });
            }
        }
    }

    #[test]
    fn hex_two_vertex_counts() {
        let spec = build_hex_lattice(&HexLatticeDescriptor::two_vertex(), p()).unwrap();
        assert_eq!(spec.site_count(), 15);
        assert_eq!(spec.edges.len(), 32);
        let layout = HexLayout::new(&HexLatticeDescriptor::two_vertex()).unwrap();
        let link = layout.link_sites[0];
        let adj = spec.adjacency();
        // the shared link couples to all eight inner sites
        assert_eq!(adj[link].len(), 8);
        assert_eq!(spec.sites_with_role(Role::Upload).len(), 2);
        assert_eq!(spec.sites_with_role(Role::Plain).len(), 4);
    }

    #[test]
    fn hex_empty_and_collisions() {
        let spec = build_hex_lattice(&HexLatticeDescriptor::default(), p()).unwrap();
        assert_eq!(spec.site_count(), 0);
        assert!(spec.edges.is_empty());

        let mut desc = HexLatticeDescriptor::two_vertex();
        desc.vertices.push(2);
        desc.links.push(LatticeLink { a: 0, port_a: 1, b: 2, port_b: 1 });
        assert!(build_hex_lattice(&desc, p()).is_err());

        let mut desc = HexLatticeDescriptor::two_vertex();
        desc.links[0].port_a = 0;
        assert!(build_hex_lattice(&desc, p()).is_err());

        let mut desc = HexLatticeDescriptor::two_vertex();
        desc.uploads.push(7);
        assert!(build_hex_lattice(&desc, p()).is_err());
    }

    #[test]
    fn single_site_is_jc_cell() {
        let spec = NetworkSpec {
            sites: vec![Site { id: 0, label: "1".into(), role: Role::Plain }],
            edges: vec![],
            params: SystemParams::new(1.0, 0.5, 65.0, 1.0).unwrap(),
        };
        let h = build_single_excitation_hamiltonian(&spec).unwrap();
        assert_eq!(h.matrix().as_slice(), &[1.0, 65.0, 65.0, 0.5]);
    }

    #[test]
    fn chain_hamiltonian_entries() {
        let spec = build_diamond_chain(1, p()).unwrap();
        let h = build_single_excitation_hamiltonian(&spec).unwrap();
        assert_eq!(h.dim(), 8);
        // cavities of sites 3 and 4 (1-based)
        assert_eq!(h.matrix()[(4, 6)], -1.0);
        assert_eq!(h.matrix()[(0, 2)], 1.0);
        assert_eq!(h.matrix(), &h.matrix().transpose());
    }

    #[test]
    fn hamiltonian_invariants_hold_for_all_builders() {
        let params = SystemParams::new(0.7, -3.0, 2.5, 1.3).unwrap();
        let specs = [
            build_diamond_chain(3, params).unwrap(),
            build_switch(params),
            build_hex_lattice(&HexLatticeDescriptor::two_vertex(), params).unwrap(),
        ];
        for spec in &specs {
            let h = build_single_excitation_hamiltonian(spec).unwrap();
            let m = h.matrix();
            assert_eq!(m, &m.transpose());
            for i in 0..spec.site_count() {
                assert_eq!(m[(2 * i, 2 * i)], 0.7);
                assert_eq!(m[(2 * i + 1, 2 * i + 1)], 3.7);
                assert_eq!(m[(2 * i, 2 * i + 1)], 2.5);
            }
            for r in 0..h.dim() {
                for c in 0..h.dim() {
                    let v = m[(r, c)];
                    if r / 2 != c / 2 && v != 0.0 {
                        assert!(r % 2 == 0 && c % 2 == 0, "only cavities hop");
                        assert_eq!(v.abs(), 1.3);
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_bad_specs() {
        let mut spec = build_diamond_chain(1, p()).unwrap();
        spec.edges.push(Link { a: 1, b: 0, sign: 1 });
        assert!(build_single_excitation_hamiltonian(&spec).is_err());

        let mut spec = build_diamond_chain(1, p()).unwrap();
        spec.edges[0].sign = 2;
        assert!(spec.validate().is_err());

        let mut spec = build_diamond_chain(1, p()).unwrap();
        spec.edges.push(Link { a: 2, b: 2, sign: 1 });
        assert!(spec.validate().is_err());

        let mut spec = build_diamond_chain(1, p()).unwrap();
        spec.edges.push(Link { a: 2, b: 9, sign: 1 });
        assert!(spec.validate().is_err());
    }

    #[test]
    fn json_shape() {
        let spec = build_diamond_chain(1, p()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&spec.to_json().unwrap()).unwrap();
        assert_eq!(v["edges"][3], serde_json::json!([2, 3, -1]));
        assert_eq!(v["sites"][1]["role"], "control");
        assert_eq!(v["params"]["g"], 65.0);
        let back = NetworkSpec::from_json(&spec.to_json().unwrap()).unwrap();
        assert_eq!(back, spec);
    }
}
