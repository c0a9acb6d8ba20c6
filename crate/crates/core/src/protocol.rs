//! Routing schedules: windows of free evolution separated by local phase
//! flips on control atoms.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::network::{
    build_single_excitation_hamiltonian, HexLatticeDescriptor, HexLayout, NetworkSpec, PORT_SIGNS,
};
use crate::propagator::{
    eigendecompose, photon_population, ExcitationState, ModeKind, Spectrum,
};
use crate::subspaces::{block_decompose, OrthogonalTransform};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Probe {
    pub site: usize,
    pub kind: ModeKind,
}

impl Probe {
    pub fn atom(site: usize) -> Self {
        Self { site, kind: ModeKind::Atom }
    }

    pub fn index(&self) -> usize {
        self.kind.index(self.site)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Step {
    Evolve(f64),
    /// Local Z on each listed atom: the excited-atom amplitude changes sign.
    PhaseFlip(Vec<usize>),
    /// Multiplies the excited-atom amplitude of `site` by `exp(i angle)`.
    PhaseShift { site: usize, angle: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub steps: Vec<Step>,
    pub source: Probe,
    pub target: Probe,
    /// Extra populations recorded in traces, with their column labels.
    pub tracked: Vec<(String, Probe)>,
}

impl Schedule {
    /// Sum of all evolution windows. Durations are accumulated per distinct
    /// window length (`count * length`), in order of first appearance.
    pub fn total_time(&self) -> f64 {
        let mut groups: Vec<(f64, u32)> = Vec::new();
        for s in &self.steps {
            if let Step::Evolve(d) = s {
                match groups.iter_mut().find(|g| g.0 == *d) {
                    Some(g) => g.1 += 1,
                    None => groups.push((*d, 1)),
                }
            }
        }
        groups.iter().map(|&(d, n)| f64::from(n) * d).sum()
    }

    pub fn flip_count(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, Step::PhaseFlip(_))).count()
    }

    pub fn validate(&self, site_count: usize) -> Result<()> {
        let check = |site: usize| {
            if site >= site_count {
                invalid(format!("schedule references site {site}, network has {site_count}"))
            } else {
                Ok(())
            }
        };
        check(self.source.site)?;
        check(self.target.site)?;
        for (_, p) in &self.tracked {
            check(p.site)?;
        }
        for s in &self.steps {
            match s {
                Step::Evolve(d) if !(d.is_finite() && *d >= 0.0) => {
                    return invalid(format!("evolution window {d} must be finite and >= 0"))
                }
                Step::Evolve(_) => {}
                Step::PhaseFlip(sites) => sites.iter().try_for_each(|&x| check(x))?,
                Step::PhaseShift { site, angle } => {
                    check(*site)?;
                    if !angle.is_finite() {
                        return invalid("phase shift angle must be finite");
                    }
                }
            }
        }
        Ok(())
    }
}

pub fn local_phase_flip(psi: &ExcitationState, atom_sites: &[usize]) -> Result<ExcitationState> {
    let mut out = psi.clone();
    for &s in atom_sites {
        let i = ModeKind::Atom.index(s);
        if i >= out.dim() {
            return invalid(format!("site {s} out of range"));
        }
        out.amps[i] = -out.amps[i];
    }
    Ok(out)
}

fn phase_shift(psi: &mut ExcitationState, site: usize, angle: f64) -> Result<()> {
    let i = ModeKind::Atom.index(site);
    if i >= psi.dim() {
        return invalid(format!("site {site} out of range"));
    }
    psi.amps[i] *= Complex64::from_polar(1.0, angle);
    Ok(())
}

fn apply_local(psi: &mut ExcitationState, step: &Step) -> Result<()> {
    match step {
        Step::PhaseFlip(sites) => *psi = local_phase_flip(psi, sites)?,
        Step::PhaseShift { site, angle } => phase_shift(psi, *site, *angle)?,
        Step::Evolve(_) => unreachable!("evolution is handled by the caller"),
    }
    Ok(())
}

/// Source atom 1 to atom `3N+1` of a diamond chain: `t1` in the first
/// block, `t2` in each middle block, `t1` in the last, with the control
/// flip between windows.
pub fn chain_routing_schedule(n: usize, t1: f64, t2: f64) -> Result<Schedule> {
    if n < 1 {
        return invalid("chain needs N >= 1");
    }
    if !(t1 > 0.0 && t2 > 0.0 && t1.is_finite() && t2.is_finite()) {
        return invalid("transfer times must be positive");
    }
    // atoms of sites 3k (1-based)
    let flips: Vec<usize> = (1..=n).map(|k| 3 * k - 1).collect();
    let mut steps = vec![Step::Evolve(t1)];
    for _ in 1..n {
        steps.push(Step::PhaseFlip(flips.clone()));
        steps.push(Step::Evolve(t2));
    }
    steps.push(Step::PhaseFlip(flips));
    steps.push(Step::Evolve(t1));
    let tracked = (0..=n).map(|k| (format!("a{}", 3 * k + 1), Probe::atom(3 * k))).collect();
    Ok(Schedule { steps, source: Probe::atom(0), target: Probe::atom(3 * n), tracked })
}

/// Flip that turns the inner collective state of port `from` into that of
/// port `to`: a Z on every inner atom where the two sign rows differ.
pub fn switch_port_flip(inner: &[usize; 4], from: usize, to: usize) -> Result<Step> {
    if from > 3 || to > 3 {
        return invalid(format!("ports must be in 0..=3, got {from} -> {to}"));
    }
    if from == to {
        return invalid(format!("port flip {from} -> {to} is the identity"));
    }
    let sites = (0..4).filter(|&k| PORT_SIGNS[from][k] != PORT_SIGNS[to][k]).map(|k| inner[k]);
    Ok(Step::PhaseFlip(sites.collect()))
}

/// Upload at `nu0` of the standalone switch, redirect to port `port`,
/// download at `nu{port}`. Site ids follow [`crate::build_switch`].
pub fn switch_schedule(port: usize, t: f64) -> Result<Schedule> {
    if port == 0 || port > 3 {
        return invalid(format!("redirection port must be 1..=3, got {port}"));
    }
    if !(t > 0.0 && t.is_finite()) {
        return invalid("transfer time must be positive");
    }
    let flip = switch_port_flip(&[4, 5, 6, 7], 0, port)?;
    Ok(Schedule {
        steps: vec![Step::Evolve(t), flip, Step::Evolve(t)],
        source: Probe::atom(0),
        target: Probe::atom(port),
        tracked: (0..4).map(|i| (format!("nu{i}"), Probe::atom(i))).collect(),
    })
}

/// Upload at the first vertex of `path`, hop along consecutive links, and
/// download at the last vertex. `t_upload` is the upload/download block
/// time and `t_hop` the hop block time.
pub fn hex_routing_schedule(
    desc: &HexLatticeDescriptor,
    path: &[u32],
    t_upload: f64,
    t_hop: f64,
) -> Result<Schedule> {
    if path.len() < 2 {
        return invalid("routing path needs at least two vertices");
    }
    if !(t_upload > 0.0 && t_hop > 0.0 && t_upload.is_finite() && t_hop.is_finite()) {
        return invalid("transfer times must be positive");
    }
    let layout = HexLayout::new(desc)?;
    let (first, last) = (path[0], path[path.len() - 1]);
    for v in [first, last] {
        if !desc.uploads.contains(&v) {
            return invalid(format!("vertex {v} has no upload port"));
        }
    }

    // (outgoing port at path[k], incoming port at path[k+1], link site)
    let mut hops = Vec::with_capacity(path.len() - 1);
    for w in path.windows(2) {
        let (u, v) = (w[0], w[1]);
        let found = desc.links.iter().zip(&layout.link_sites).find_map(|(l, &site)| {
            if l.a == u && l.b == v {
                Some((l.port_a, l.port_b, site))
            } else if l.a == v && l.b == u {
                Some((l.port_b, l.port_a, site))
            } else {
                None
            }
        });
        match found {
            Some(h) => hops.push(h),
            None => return invalid(format!("vertices {u} and {v} are not linked")),
        }
    }

    let mut steps = vec![Step::Evolve(t_upload)];
    let mut incoming = 0;
    for (k, &(out_port, in_port, _)) in hops.iter().enumerate() {
        let vs = layout.vertex(path[k])?;
        steps.push(switch_port_flip(&vs.inner, incoming, out_port)?);
        steps.push(Step::Evolve(t_hop));
        incoming = in_port;
    }
    steps.push(switch_port_flip(&layout.vertex(last)?.inner, incoming, 0)?);
    steps.push(Step::Evolve(t_upload));

    let src = layout.vertex(first)?.slots[0];
    let dst = layout.vertex(last)?.slots[0];
    let mut tracked = vec![(format!("v{first}.nu0"), Probe::atom(src))];
    for (k, &(_, _, site)) in hops.iter().enumerate() {
        tracked.push((format!("link{}", k + 1), Probe::atom(site)));
    }
    tracked.push((format!("v{last}.nu0"), Probe::atom(dst)));
    Ok(Schedule { steps, source: Probe::atom(src), target: Probe::atom(dst), tracked })
}

/// Sampled populations along a schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceResult {
    pub times: Vec<f64>,
    pub photon: Vec<f64>,
    pub labels: Vec<String>,
    /// One series per label, same length as `times`.
    pub tracked: Vec<Vec<f64>>,
    pub norms: Vec<f64>,
    pub final_state: ExcitationState,
    pub final_amplitude: Complex64,
    pub final_fidelity: f64,
    pub total_time: f64,
}

impl TraceResult {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max_photon(&self) -> f64 {
        self.photon.iter().copied().fold(0.0, f64::max)
    }

    /// Time average of the photon population (trapezoid rule).
    pub fn mean_photon(&self) -> f64 {
        let mut area = 0.0;
        let mut span = 0.0;
        for i in 1..self.times.len() {
            let dt = self.times[i] - self.times[i - 1];
            area += 0.5 * dt * (self.photon[i] + self.photon[i - 1]);
            span += dt;
        }
        if span > 0.0 {
            area / span
        } else {
            self.photon.first().copied().unwrap_or(0.0)
        }
    }

    pub fn max_norm_error(&self) -> f64 {
        self.norms.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max)
    }
}

/// Runs the schedule under the full network Hamiltonian, sampling
/// `samples_per_window` evenly spaced points (ends included) in every
/// evolution window.
pub fn run_schedule(
    spec: &NetworkSpec,
    schedule: &Schedule,
    initial: &ExcitationState,
    samples_per_window: usize,
) -> Result<TraceResult> {
    if samples_per_window < 2 {
        return invalid("samples_per_window must be at least 2");
    }
    let spectrum = prepare(spec, schedule, initial)?;
    let mut trace = TraceResult {
        times: Vec::new(),
        photon: Vec::new(),
        labels: schedule.tracked.iter().map(|(l, _)| l.clone()).collect(),
        tracked: vec![Vec::new(); schedule.tracked.len()],
        norms: Vec::new(),
        final_state: initial.clone(),
        final_amplitude: Complex64::new(0.0, 0.0),
        final_fidelity: 0.0,
        total_time: schedule.total_time(),
    };
    let mut state = initial.clone();
    let mut clock = 0.0;
    for step in &schedule.steps {
        let Step::Evolve(d) = step else {
            apply_local(&mut state, step)?;
            continue;
        };
        let ev = spectrum.evolver(&state)?;
        let last = samples_per_window - 1;
        for k in 0..=last {
            let dt = if k == last { *d } else { d * k as f64 / last as f64 };
            let s = ev.at(dt);
            trace.times.push(clock + dt);
            trace.photon.push(photon_population(&s));
            trace.norms.push(s.norm_sqr());
            for ((_, p), series) in schedule.tracked.iter().zip(trace.tracked.iter_mut()) {
                series.push(s.amps[p.index()].norm_sqr());
            }
            if k == last {
                state = s;
            }
        }
        clock += d;
    }
    trace.final_amplitude = state.amps[schedule.target.index()];
    trace.final_fidelity = trace.final_amplitude.norm_sqr();
    trace.final_state = state;
    Ok(trace)
}

fn prepare(spec: &NetworkSpec, schedule: &Schedule, initial: &ExcitationState) -> Result<Spectrum> {
    schedule.validate(spec.site_count())?;
    if initial.dim() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), found: initial.dim() });
    }
    eigendecompose(&build_single_excitation_hamiltonian(spec)?)
}

/// State after every step of the schedule under the full Hamiltonian.
pub fn schedule_checkpoints(
    spec: &NetworkSpec,
    schedule: &Schedule,
    initial: &ExcitationState,
) -> Result<Vec<ExcitationState>> {
    let spectrum = prepare(spec, schedule, initial)?;
    let mut state = initial.clone();
    let mut out = Vec::with_capacity(schedule.steps.len());
    for step in &schedule.steps {
        match step {
            Step::Evolve(d) => state = spectrum.evolver(&state)?.at(*d),
            _ => apply_local(&mut state, step)?,
        }
        out.push(state.clone());
    }
    Ok(out)
}

/// Same as [`schedule_checkpoints`], but every evolution window is done
/// block by block in the collective basis `transform`, ignoring whatever
/// couples different blocks.
pub fn schedule_checkpoints_blockwise(
    spec: &NetworkSpec,
    transform: &OrthogonalTransform,
    schedule: &Schedule,
    initial: &ExcitationState,
) -> Result<Vec<ExcitationState>> {
    schedule.validate(spec.site_count())?;
    let h = build_single_excitation_hamiltonian(spec)?;
    let (blocks, _) = block_decompose(&h, transform)?;
    if initial.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), found: initial.dim() });
    }
    let spectra = blocks.iter().map(eigendecompose).collect::<Result<Vec<_>>>()?;
    let q = transform.q.map(|x| Complex64::new(x, 0.0));
    let qt = q.transpose();

    let mut state = initial.clone();
    let mut out = Vec::with_capacity(schedule.steps.len());
    for step in &schedule.steps {
        match step {
            Step::Evolve(d) => {
                let mut y = &q * &state.amps;
                for (g, sp) in transform.groups.iter().zip(&spectra) {
                    let part = ExcitationState {
                        vac: Complex64::new(0.0, 0.0),
                        amps: y.rows(g.start, g.len).into_owned(),
                    };
                    let moved = sp.evolver(&part)?.at(*d);
                    y.rows_mut(g.start, g.len).copy_from(&moved.amps);
                }
                state.amps = &qt * y;
            }
            _ => apply_local(&mut state, step)?,
        }
        out.push(state.clone());
    }
    Ok(out)
}

/// `|<Phi_ideal|Phi>|^2` for a reference qubit entangled with the network:
/// `(|0>|vac> + |1>|psi>)/sqrt(2)` against `(|0>|vac> + |1>|target>)/sqrt(2)`,
/// where `u` is the target amplitude of `psi`.
pub fn bell_fidelity(u: Complex64) -> f64 {
    ((Complex64::new(1.0, 0.0) + u) / 2.0).norm_sqr()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementReport {
    /// Target amplitude of the excitation branch before compensation.
    pub amplitude: Complex64,
    /// Angle of the receiver phase shift, `-arg(u)`.
    pub compensation_phase: f64,
    /// Bell fidelity after the compensating phase shift.
    pub bell_fidelity: f64,
    /// Bell fidelity without compensation.
    pub uncompensated_fidelity: f64,
}

/// Sends half of a Bell pair through the schedule. The vacuum branch is
/// stationary, so only the excitation branch is evolved.
pub fn entanglement_transfer(spec: &NetworkSpec, schedule: &Schedule) -> Result<EntanglementReport> {
    let start = ExcitationState::excited(spec.dim(), schedule.source.site, schedule.source.kind)?;
    let mut states = schedule_checkpoints(spec, schedule, &start)?;
    let Some(mut last) = states.pop() else {
        return invalid("schedule has no steps");
    };
    let u = last.amps[schedule.target.index()];
    let phi = -u.arg();
    let mut compensated = schedule.clone();
    compensated.steps.push(Step::PhaseShift { site: schedule.target.site, angle: phi });
    phase_shift(&mut last, schedule.target.site, phi)?;
    let u_comp = last.amps[schedule.target.index()];
    Ok(EntanglementReport {
        amplitude: u,
        compensation_phase: phi,
        bell_fidelity: bell_fidelity(u_comp),
        uncompensated_fidelity: bell_fidelity(u),
    })
}

#[cfg(test)]
#[allow(clippy::approx_constant, clippy::needless_range_loop)]
mod tests {
    use super::*;
    use crate::network::{build_diamond_chain, build_switch, SystemParams};

    #[test]
    fn flip_twice_is_identity() {
        let mut psi = ExcitationState::vacuum(8);
        psi.amps[3] = Complex64::new(0.3, 0.4);
        psi.amps[5] = Complex64::new(-0.1, 0.2);
        let once = local_phase_flip(&psi, &[1, 2]).unwrap();
        assert_eq!(once.amps[3], -psi.amps[3]);
        assert_eq!(once.amps[2], psi.amps[2]);
        assert_eq!(local_phase_flip(&once, &[1, 2]).unwrap(), psi);
        let vac = ExcitationState::vacuum(8);
        assert_eq!(local_phase_flip(&vac, &[0, 1, 2, 3]).unwrap(), vac);
        assert!(local_phase_flip(&vac, &[4]).is_err());
    }

    #[test]
    fn flip_maps_plus_to_minus() {
        let n = 3;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut psi = ExcitationState::vacuum(2 * (3 * n + 1));
        // |a_2^+> : atoms of sites 5 and 6 (1-based)
        psi.amps[9] = Complex64::new(s, 0.0);
        psi.amps[11] = Complex64::new(s, 0.0);
        let flips: Vec<usize> = (1..=n).map(|k| 3 * k - 1).collect();
        let out = local_phase_flip(&psi, &flips).unwrap();
        assert_eq!(out.amps[9], Complex64::new(s, 0.0));
        assert_eq!(out.amps[11], Complex64::new(-s, 0.0));
    }

    #[test]
    fn chain_schedule_shape() {
        let s = chain_routing_schedule(1, 2.0, 3.0).unwrap();
        assert_eq!(s.steps, vec![Step::Evolve(2.0), Step::PhaseFlip(vec![2]), Step::Evolve(2.0)]);
        assert_eq!(s.total_time(), 4.0);
        let s = chain_routing_schedule(3, 2.2231, 3.141).unwrap();
        assert_eq!(s.flip_count(), 3);
        assert_eq!(s.total_time(), 2.0 * 2.2231 + 2.0 * 3.141);
        assert_eq!(s.steps[1], Step::PhaseFlip(vec![2, 5, 8]));
        assert_eq!(s.target, Probe::atom(9));
        assert!(chain_routing_schedule(0, 1.0, 1.0).is_err());
        assert!(chain_routing_schedule(2, -1.0, 1.0).is_err());
    }

    #[test]
    fn port_flips() {
        let inner = [10, 11, 12, 13];
        assert_eq!(switch_port_flip(&inner, 0, 1).unwrap(), Step::PhaseFlip(vec![12, 13]));
        assert_eq!(switch_port_flip(&inner, 0, 3).unwrap(), Step::PhaseFlip(vec![11, 12]));
        assert_eq!(switch_port_flip(&inner, 0, 2).unwrap(), Step::PhaseFlip(vec![11, 13]));
        assert_eq!(switch_port_flip(&inner, 1, 2).unwrap(), Step::PhaseFlip(vec![11, 12]));
        assert!(switch_port_flip(&inner, 2, 2).is_err());
        assert!(switch_port_flip(&inner, 0, 4).is_err());
    }

    #[test]
    fn port_flip_maps_collective_states() {
        let half = Complex64::new(0.5, 0.0);
        for from in 0..4 {
            for to in (0..4).filter(|&t| t != from) {
                let mut psi = ExcitationState::vacuum(16);
                for k in 0..4 {
                    psi.amps[2 * (4 + k) + 1] = half * f64::from(PORT_SIGNS[from][k]);
                }
                let Step::PhaseFlip(sites) = switch_port_flip(&[4, 5, 6, 7], from, to).unwrap()
                else {
                    unreachable!()
                };
                let out = local_phase_flip(&psi, &sites).unwrap();
                for k in 0..4 {
                    assert_eq!(out.amps[2 * (4 + k) + 1], half * f64::from(PORT_SIGNS[to][k]));
                }
            }
        }
    }

    #[test]
    fn switch_schedule_shape() {
        let s = switch_schedule(1, 1.6).unwrap();
        assert_eq!(s.steps[1], Step::PhaseFlip(vec![6, 7]));
        assert_eq!(s.target, Probe::atom(1));
        assert!(switch_schedule(0, 1.6).is_err());
        assert!(switch_schedule(4, 1.6).is_err());
    }

    #[test]
    fn hex_schedule_shape() {
        let desc = HexLatticeDescriptor::two_vertex();
        let s = hex_routing_schedule(&desc, &[0, 1], 1.5, 2.2).unwrap();
        assert_eq!(s.flip_count(), 2);
        assert_eq!(s.total_time(), 2.0 * 1.5 + 2.2);
        // upload slot of vertex 0 is site 9, of vertex 1 site 10
        assert_eq!(s.source, Probe::atom(9));
        assert_eq!(s.target, Probe::atom(10));
        assert!(hex_routing_schedule(&desc, &[0], 1.5, 2.2).is_err());
        assert!(hex_routing_schedule(&desc, &[0, 0], 1.5, 2.2).is_err());

        let mut three = desc.clone();
        three.vertices.push(2);
        three.links.push(crate::network::LatticeLink { a: 1, port_a: 3, b: 2, port_b: 1 });
        three.uploads = vec![0, 2];
        let s = hex_routing_schedule(&three, &[0, 1, 2], 1.5, 2.2).unwrap();
        assert_eq!(s.flip_count(), 3);
        assert_eq!(s.total_time(), 2.0 * 1.5 + 2.0 * 2.2);
        assert!(hex_routing_schedule(&three, &[0, 2], 1.5, 2.2).is_err());
        assert!(hex_routing_schedule(&three, &[0, 1], 1.5, 2.2).is_err());
    }

    #[test]
    fn run_schedule_checks_inputs() {
        let spec = build_switch(SystemParams::resonant());
        let s = switch_schedule(2, 1.6).unwrap();
        let psi = ExcitationState::excited(16, 0, ModeKind::Atom).unwrap();
        assert!(run_schedule(&spec, &s, &psi, 1).is_err());
        let small = build_diamond_chain(1, SystemParams::resonant()).unwrap();
        assert!(run_schedule(&small, &s, &ExcitationState::vacuum(8), 10).is_err());
        let trace = run_schedule(&spec, &s, &psi, 3).unwrap();
        assert_eq!(trace.len(), 6);
        assert!(trace.max_norm_error() <= 1e-12);
        assert!(trace.times.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(trace.times[5], trace.total_time);
    }

    #[test]
    fn blockwise_matches_full_on_chain() {
        let spec = build_diamond_chain(3, SystemParams::resonant()).unwrap();
        let t = crate::subspaces::chain_collective_basis(3).unwrap();
        let s = chain_routing_schedule(3, 2.2231, 3.141).unwrap();
        let psi = ExcitationState::excited(spec.dim(), 0, ModeKind::Atom).unwrap();
        let full = schedule_checkpoints(&spec, &s, &psi).unwrap();
        let blocks = schedule_checkpoints_blockwise(&spec, &t, &s, &psi).unwrap();
        assert_eq!(full.len(), s.steps.len());
        for (a, b) in full.iter().zip(&blocks) {
            assert!((&a.amps - &b.amps).camax() <= 1e-9);
        }
    }

    #[test]
    fn compensation_removes_phase() {
        let spec = build_diamond_chain(1, SystemParams::resonant()).unwrap();
        let s = chain_routing_schedule(1, 2.2231, 2.2231).unwrap();
        let rep = entanglement_transfer(&spec, &s).unwrap();
        let m = rep.amplitude.norm();
        assert!((rep.bell_fidelity - ((1.0 + m) / 2.0).powi(2)).abs() < 1e-12);
        assert!(rep.bell_fidelity >= rep.uncompensated_fidelity);
        assert!((rep.compensation_phase + rep.amplitude.arg()).abs() < 1e-15);
    }

    #[test]
    fn bell_formula_limits() {
        assert!((bell_fidelity(Complex64::new(1.0, 0.0)) - 1.0).abs() < 1e-15);
        assert!((bell_fidelity(Complex64::new(0.0, 0.0)) - 0.25).abs() < 1e-15);
    }
}
