//! Exact time evolution through the eigendecomposition of a real symmetric
//! Hamiltonian, state metrics, and the transfer-time search.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::network::HamiltonianMatrix;
use crate::subspaces::BlockHamiltonian;

/// Anything that can be handed to [`eigendecompose`].
pub trait SymmetricSource {
    fn symmetric_matrix(&self) -> &DMatrix<f64>;
}

impl SymmetricSource for DMatrix<f64> {
    fn symmetric_matrix(&self) -> &DMatrix<f64> {
        self
    }
}

impl SymmetricSource for HamiltonianMatrix {
    fn symmetric_matrix(&self) -> &DMatrix<f64> {
        self.matrix()
    }
}

impl SymmetricSource for BlockHamiltonian {
    fn symmetric_matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModeKind {
    Cavity,
    Atom,
}

impl ModeKind {
    pub fn index(self, site: usize) -> usize {
        match self {
            Self::Cavity => 2 * site,
            Self::Atom => 2 * site + 1,
        }
    }
}

/// Vacuum amplitude plus one amplitude per cavity (`2i`) and atom (`2i+1`).
#[derive(Debug, Clone, PartialEq)]
pub struct ExcitationState {
    pub vac: Complex64,
    pub amps: DVector<Complex64>,
}

impl ExcitationState {
    pub fn vacuum(dim: usize) -> Self {
        Self { vac: Complex64::new(1.0, 0.0), amps: DVector::zeros(dim) }
    }

    /// Single excitation in standard basis vector `index`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return invalid(format!("basis index {index} out of range for dimension {dim}"));
        }
        let mut amps = DVector::zeros(dim);
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { vac: Complex64::new(0.0, 0.0), amps })
    }

    pub fn excited(dim: usize, site: usize, kind: ModeKind) -> Result<Self> {
        Self::basis(dim, kind.index(site))
    }

    /// `alpha |vacuum> + beta |mode>`; the pair must be normalised.
    pub fn superposition(
        dim: usize,
        site: usize,
        kind: ModeKind,
        alpha: Complex64,
        beta: Complex64,
    ) -> Result<Self> {
        let mut s = Self::excited(dim, site, kind)?;
        s.vac = alpha;
        s.amps *= beta;
        if (s.norm_sqr() - 1.0).abs() > 1e-12 {
            return invalid("alpha and beta are not normalised");
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.vac.norm_sqr() + self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>()
    }

    pub fn amplitude(&self, site: usize, kind: ModeKind) -> Result<Complex64> {
        let i = kind.index(site);
        self.amps
            .get(i)
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("site {site} out of range")))
    }
}

/// Sum of cavity populations (the mean photon number).
pub fn photon_population(psi: &ExcitationState) -> f64 {
    psi.amps.iter().step_by(2).map(|a| a.norm_sqr()).sum()
}

pub fn site_population(psi: &ExcitationState, site: usize, kind: ModeKind) -> Result<f64> {
    Ok(psi.amplitude(site, kind)?.norm_sqr())
}

/// Eigenvalues in ascending order with the matching orthonormal
/// eigenvectors as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<f64>,
}

pub fn eigendecompose<M: SymmetricSource + ?Sized>(h: &M) -> Result<Spectrum> {
    let m = h.symmetric_matrix();
    if !m.is_square() {
        return invalid(format!("matrix is {}x{}", m.nrows(), m.ncols()));
    }
    let asym = (m - m.transpose()).amax();
    if asym > 1e-12 * m.amax().max(1.0) {
        return invalid(format!("matrix is not symmetric (max |H - H^T| = {asym:e})"));
    }
    let eig = SymmetricEigen::new(m.clone());
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(Spectrum { eigenvalues, eigenvectors })
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `max |V diag(lambda) V^T - H|`.
    pub fn reconstruction_error(&self, h: &DMatrix<f64>) -> f64 {
        let v = &self.eigenvectors;
        let rebuilt = v * DMatrix::from_diagonal(&self.eigenvalues) * v.transpose();
        (rebuilt - h).amax()
    }

    /// `max |V^T V - I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let n = self.dim();
        (self.eigenvectors.transpose() * &self.eigenvectors - DMatrix::<f64>::identity(n, n))
            .amax()
    }

    fn phases(&self, t: f64) -> impl Iterator<Item = Complex64> + '_ {
        self.eigenvalues.iter().map(move |&l| Complex64::from_polar(1.0, -l * t))
    }

    /// Full propagator `exp(-i H t)`.
    pub fn unitary(&self, t: f64) -> DMatrix<Complex64> {
        let v = self.eigenvectors.map(|x| Complex64::new(x, 0.0));
        let d = DMatrix::from_diagonal(&DVector::from_iterator(self.dim(), self.phases(t)));
        &v * d * v.transpose()
    }

    /// `<target| exp(-i H t) |source>` for standard basis vectors.
    pub fn transition_amplitude(&self, source: usize, target: usize, t: f64) -> Complex64 {
        let v = &self.eigenvectors;
        self.phases(t)
            .enumerate()
            .map(|(k, ph)| ph * (v[(target, k)] * v[(source, k)]))
            .sum()
    }

    /// Pre-projects a state onto the eigenbasis for repeated evaluation.
    pub fn evolver(&self, psi: &ExcitationState) -> Result<Evolver<'_>> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: psi.dim() });
        }
        let modal = DVector::from_iterator(
            self.dim(),
            (0..self.dim()).map(|k| {
                self.eigenvectors
                    .column(k)
                    .iter()
                    .zip(psi.amps.iter())
                    .map(|(&v, &a)| a * v)
                    .sum::<Complex64>()
            }),
        );
        Ok(Evolver { spectrum: self, modal, vac: psi.vac })
    }
}

/// A state expanded in the eigenbasis of a [`Spectrum`].
pub struct Evolver<'a> {
    spectrum: &'a Spectrum,
    modal: DVector<Complex64>,
    vac: Complex64,
}

impl Evolver<'_> {
    pub fn at(&self, t: f64) -> ExcitationState {
        let n = self.spectrum.dim();
        let rotated: Vec<Complex64> =
            self.spectrum.phases(t).zip(self.modal.iter()).map(|(p, &c)| p * c).collect();
        let v = &self.spectrum.eigenvectors;
        let amps = DVector::from_iterator(
            n,
            (0..n).map(|r| {
                rotated.iter().enumerate().map(|(k, &c)| c * v[(r, k)]).sum::<Complex64>()
            }),
        );
        ExcitationState { vac: self.vac, amps }
    }
}

/// Evolves `psi` for time `t` (negative `t` runs backwards). The vacuum
/// component does not evolve.
pub fn propagate(s: &Spectrum, psi: &ExcitationState, t: f64) -> Result<ExcitationState> {
    if !t.is_finite() {
        return invalid("evolution time must be finite");
    }
    Ok(s.evolver(psi)?.at(t))
}

/// Grid scan plus golden-section refinement settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferSearch {
    pub window: (f64, f64),
    pub grid_points: usize,
    pub refine_tol: f64,
}

impl TransferSearch {
    pub const DEFAULT_GRID: usize = 20001;
    pub const DEFAULT_TOL: f64 = 1e-6;
    /// Local maxima within this much of the best grid value are candidates.
    pub const PEAK_SLACK: f64 = 1e-4;
    /// Minimum grid points per period of the fastest beat in the signal.
    pub const POINTS_PER_BEAT: f64 = 16.0;

    pub fn new(t_lo: f64, t_hi: f64) -> Self {
        Self { window: (t_lo, t_hi), grid_points: Self::DEFAULT_GRID, refine_tol: Self::DEFAULT_TOL }
    }

    /// `(0, 10)` on resonance, `(0, 600)` otherwise.
    pub fn default_for(delta: f64) -> Self {
        if delta == 0.0 {
            Self::new(0.0, 10.0)
        } else {
            Self::new(0.0, 600.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferTime {
    pub t_star: f64,
    pub fidelity: f64,
    pub amplitude: Complex64,
    /// Grid size actually scanned (never below the requested size).
    pub grid_points: usize,
}

impl TransferTime {
    pub fn phase(&self) -> f64 {
        self.amplitude.arg()
    }
}

/// Earliest time in the window at which the population transferred from
/// `source` to `target` peaks.
///
/// The population is scanned on a uniform grid; the earliest local maximum
/// within [`TransferSearch::PEAK_SLACK`] of the best grid value is refined
/// by golden-section search. The grid is densified automatically when it
/// would undersample the fastest beat frequency of the signal.
pub fn find_transfer_time<M: SymmetricSource + ?Sized>(
    h: &M,
    source: usize,
    target: usize,
    search: &TransferSearch,
) -> Result<TransferTime> {
    let spectrum = eigendecompose(h)?;
    find_transfer_time_in(&spectrum, source, target, search)
}

pub fn find_transfer_time_in(
    spectrum: &Spectrum,
    source: usize,
    target: usize,
    search: &TransferSearch,
) -> Result<TransferTime> {
    let (lo, hi) = search.window;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return invalid(format!("empty search window ({lo}, {hi})"));
    }
    if search.grid_points < 100 {
        return invalid("grid_points must be at least 100");
    }
    if search.refine_tol.is_nan() || search.refine_tol <= 0.0 {
        return invalid("refine_tol must be positive");
    }
    let n = spectrum.dim();
    if source >= n || target >= n {
        return invalid(format!("basis index out of range for dimension {n}"));
    }

    let v = &spectrum.eigenvectors;
    let weights: Vec<(f64, f64)> = (0..n)
        .map(|k| (spectrum.eigenvalues[k], v[(target, k)] * v[(source, k)]))
        .collect();
    let wmax = weights.iter().map(|w| w.1.abs()).fold(0.0, f64::max);
    let active: Vec<(f64, f64)> =
        weights.into_iter().filter(|w| w.1.abs() > 1e-12 * wmax).collect();
    let amp = |t: f64| -> Complex64 {
        active.iter().map(|&(l, w)| Complex64::from_polar(w, -l * t)).sum()
    };
    let pop = |t: f64| amp(t).norm_sqr();

    let (lmin, lmax) = active
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), w| (a.min(w.0), b.max(w.0)));
    let bandwidth = if active.len() > 1 { lmax - lmin } else { 0.0 };
    let needed = ((hi - lo) * bandwidth / std::f64::consts::TAU * TransferSearch::POINTS_PER_BEAT)
        .ceil() as usize
        + 1;
    let points = search.grid_points.max(needed);

    let step = (hi - lo) / (points - 1) as f64;
    let grid_t = |i: usize| if i + 1 == points { hi } else { lo + step * i as f64 };
    let f: Vec<f64> = (0..points).into_par_iter().map(|i| pop(grid_t(i))).collect();

    let best = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let is_peak = |i: usize| {
        let left = i == 0 || f[i] >= f[i - 1];
        let right = i + 1 == points || f[i] >= f[i + 1];
        left && right && f[i] >= best - TransferSearch::PEAK_SLACK
    };
    let i = (0..points).find(|&i| is_peak(i)).expect("the grid maximum is a peak");

    let (mut t_star, mut fid) = (grid_t(i), f[i]);
    if i > 0 && i + 1 < points {
        let (t, v) = golden_max(&pop, grid_t(i - 1), grid_t(i + 1), search.refine_tol);
        if v >= fid {
            t_star = t;
            fid = v;
        }
    }
    Ok(TransferTime { t_star, fidelity: fid, amplitude: amp(t_star), grid_points: points })
}

fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let t = 0.5 * (a + b);
    (t, f(t))
}
