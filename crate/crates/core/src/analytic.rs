//! Closed-form amplitudes for the two block shapes.
//!
//! A block of `n` atom-cavity cells on a line splits into `n` normal modes
//! of the cavity chain, each dressed by its atom into a 2x2 problem. Every
//! amplitude is therefore a sum of `2n` exponentials whose frequencies are
//! the dressed-mode eigenvalues. The global factor `exp(-i omega_c t)` is
//! kept in every term.
//!
//! Both functions start from the atom of the first cell (basis index 1) and
//! return amplitudes in block order: cavity 1, atom 1, cavity 2, atom 2
//! (and cavity 3, atom 3 for the 6x6 block).
//!
//! The formulas are written with a "formula J", `jf`: `jf = J` for chain
//! blocks and `jf = sqrt(2) J` for switch and lattice blocks. The inner
//! coupling of the 4x4 block is then `sqrt(2) jf` and the normal-mode
//! splitting of the 6x6 block is `2 jf`.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::network::SystemParams;
use crate::propagator::{eigendecompose, propagate, ExcitationState};
use crate::subspaces::{BlockHamiltonian, CouplingScale};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticConstants {
    pub a: f64,
    pub b: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl AnalyticConstants {
    /// Constants for hopping `j` (the formula J), detuning `delta`,
    /// atom-cavity coupling `g`.
    pub fn new(j: f64, delta: f64, g: f64) -> Self {
        let g2 = 4.0 * g * g;
        let r2j = SQRT_2 * j;
        Self {
            a: ((r2j + delta).powi(2) + g2).sqrt(),
            b: ((r2j - delta).powi(2) + g2).sqrt(),
            c1: (delta * delta + g2).sqrt(),
            c2: (g2 + (2.0 * j + delta).powi(2)).sqrt(),
            c3: (g2 + (2.0 * j - delta).powi(2)).sqrt(),
        }
    }
}

fn formula_j(params: &SystemParams, scale: CouplingScale) -> f64 {
    scale.value(params.j) / SQRT_2
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeSet {
    pub u: Vec<Complex64>,
}

impl AmplitudeSet {
    pub fn norm_sqr(&self) -> f64 {
        self.u.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Population on the cavity entries (even indices).
    pub fn photon_population(&self) -> f64 {
        self.u.iter().step_by(2).map(|z| z.norm_sqr()).sum()
    }
}

fn phase(w: f64, t: f64) -> Complex64 {
    Complex64::from_polar(1.0, -w * t)
}

/// Two cells coupled by `scale`, started in the first atom.
pub fn analytic_u4(params: &SystemParams, scale: CouplingScale, t: f64) -> AmplitudeSet {
    let (oc, d, g) = (params.omega_c, params.delta, params.g);
    let jf = formula_j(params, scale);
    let k = SQRT_2 * jf;
    let AnalyticConstants { a, b, .. } = AnalyticConstants::new(jf, d, g);

    let e1 = phase(oc + (k + a - d) / 2.0, t);
    let e2 = phase(oc + (k - a - d) / 2.0, t);
    let e3 = phase(oc - (k - b + d) / 2.0, t);
    let e4 = phase(oc - (k + b + d) / 2.0, t);

    let pa = (a * a - (k + d).powi(2)) / (8.0 * a * g);
    let pb = (b * b - (k - d).powi(2)) / (8.0 * b * g);
    let sym = (a - k - d) / (4.0 * a) * e1 + (a + k + d) / (4.0 * a) * e2;
    let anti = (b + k - d) / (4.0 * b) * e3 + (b - k + d) / (4.0 * b) * e4;

    let cav1 = pa * (e1 - e2) + pb * (e3 - e4);
    let cav2 = pa * (e1 - e2) - pb * (e3 - e4);
    AmplitudeSet { u: vec![cav1, sym + anti, cav2, sym - anti] }
}

/// Three cells on a line coupled by `scale`, started in the first atom.
pub fn analytic_u6(params: &SystemParams, scale: CouplingScale, t: f64) -> AmplitudeSet {
    let (oc, d, g) = (params.omega_c, params.delta, params.g);
    let j = formula_j(params, scale);
    let AnalyticConstants { c1, c2, c3, .. } = AnalyticConstants::new(j, d, g);

    // dressed frequencies of the middle, upper and lower normal modes
    let e1 = phase(oc - (c1 + d) / 2.0, t);
    let e2 = phase(oc + (c1 - d) / 2.0, t);
    let e3 = phase(oc + j - (c2 + d) / 2.0, t);
    let e4 = phase(oc + j + (c2 - d) / 2.0, t);
    let e5 = phase(oc - j - (c3 + d) / 2.0, t);
    let e6 = phase(oc - j + (c3 - d) / 2.0, t);

    let k1 = (c1 * c1 - d * d) / (8.0 * g * c1);
    let k2 = (c2 * c2 - (2.0 * j + d).powi(2)) / (16.0 * g * c2);
    let k3 = (c3 * c3 - (2.0 * j - d).powi(2)) / (16.0 * g * c3);

    let mid_atom = (c1 + d) / (4.0 * c1) * e1 + (c1 - d) / (4.0 * c1) * e2;
    let up_atom = (c2 + 2.0 * j + d) / (8.0 * c2) * e3 + (c2 - 2.0 * j - d) / (8.0 * c2) * e4;
    let low_atom = (c3 - 2.0 * j + d) / (8.0 * c3) * e5 + (c3 + 2.0 * j - d) / (8.0 * c3) * e6;
    let mid_cav = k1 * (e2 - e1);
    let side_cav = k2 * (e4 - e3) + k3 * (e6 - e5);

    let cav1 = mid_cav + side_cav;
    let atom1 = mid_atom + up_atom + low_atom;
    let cav2 = SQRT_2 * (k2 * (e4 - e3) - k3 * (e6 - e5));
    let atom2 = SQRT_2 * (up_atom - low_atom);
    let cav3 = -mid_cav + side_cav;
    let atom3 = -mid_atom + up_atom + low_atom;
    AmplitudeSet { u: vec![cav1, atom1, cav2, atom2, cav3, atom3] }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalyticBlock {
    Pair(CouplingScale),
    Triple(CouplingScale),
}

impl AnalyticBlock {
    pub fn matrix(self, params: &SystemParams) -> BlockHamiltonian {
        match self {
            Self::Pair(s) => BlockHamiltonian::pair(params, s),
            Self::Triple(s) => BlockHamiltonian::triple(params, s),
        }
    }

    pub fn amplitudes(self, params: &SystemParams, t: f64) -> AmplitudeSet {
        match self {
            Self::Pair(s) => analytic_u4(params, s, t),
            Self::Triple(s) => analytic_u6(params, s, t),
        }
    }

    pub fn scale(self) -> CouplingScale {
        match self {
            Self::Pair(s) | Self::Triple(s) => s,
        }
    }
}

/// Largest `|u_formula - u_numeric|` over the grid and all block entries,
/// with the numeric side from the eigendecomposition propagator.
pub fn validate_analytic(params: &SystemParams, block: AnalyticBlock, grid: &[f64]) -> Result<f64> {
    validate_analytic_with(params, block, grid, |p, t| block.amplitudes(p, t))
}

/// [`validate_analytic`] for an arbitrary formula.
pub fn validate_analytic_with(
    params: &SystemParams,
    block: AnalyticBlock,
    grid: &[f64],
    formula: impl Fn(&SystemParams, f64) -> AmplitudeSet,
) -> Result<f64> {
    if grid.is_empty() {
        return invalid("validation grid is empty");
    }
    let h = block.matrix(params);
    let spectrum = eigendecompose(&h)?;
    let start = ExcitationState::basis(h.dim(), 1)?;
    let mut worst = 0.0f64;
    for &t in grid {
        let numeric = propagate(&spectrum, &start, t)?;
        let closed = formula(params, t);
        if closed.u.len() != h.dim() {
            return invalid("formula returned the wrong number of amplitudes");
        }
        for (x, y) in closed.u.iter().zip(numeric.amps.iter()) {
            worst = worst.max((x - y).norm());
        }
    }
    Ok(worst)
}

/// `n` evenly spaced points covering `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}
