//! Truncated Fock-space linear algebra for one qubit and one oscillator mode.
//!
//! Joint amplitudes are stored qubit-slow / oscillator-fast: the amplitude of
//! `|q> (x) |n>` lives at index `q * dim + n`. All Hamiltonians are carried as
//! `H / hbar`, so evolution is `exp(-i H t)` with `t` in the reciprocal units of
//! the operator's frequencies.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Number of top oscillator levels watched by the leakage guard.
pub const LEAKAGE_LEVELS: usize = 5;
/// Maximum population tolerated in the top [`LEAKAGE_LEVELS`] levels.
pub const LEAKAGE_TOLERANCE: f64 = 1e-8;
/// Maximum Poisson tail mass discarded when truncating a coherent state.
pub const TAIL_TOLERANCE: f64 = 1e-12;
/// Relative hermiticity tolerance accepted at operator construction.
pub const HERMITICITY_TOLERANCE: f64 = 1e-12;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OscillatorSpace {
    dim: usize,
}

impl OscillatorSpace {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidSpace(dim));
        }
        Ok(Self { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn joint_dim(&self) -> usize {
        2 * self.dim
    }

    pub fn identity(&self) -> DMatrix<C64> {
        DMatrix::identity(self.dim, self.dim)
    }

    /// `a^dag a`
    pub fn number_op(&self) -> DMatrix<C64> {
        DMatrix::from_fn(
            self.dim,
            self.dim,
            |i, j| if i == j { C64::from(i as f64) } else { ZERO },
        )
    }
}

/// Lowering operator with `<n-1| a |n> = sqrt(n)`.
pub fn annihilation_op(space: OscillatorSpace) -> DMatrix<C64> {
    let d = space.dim();
    DMatrix::from_fn(
        d,
        d,
        |i, j| {
            if j == i + 1 {
                C64::from((j as f64).sqrt())
            } else {
                ZERO
            }
        },
    )
}

pub fn creation_op(space: OscillatorSpace) -> DMatrix<C64> {
    annihilation_op(space).adjoint()
}

/// Common behaviour of oscillator and joint state vectors.
pub trait QuantumState: Sized + Clone {
    fn amplitudes(&self) -> &DVector<C64>;

    /// Same layout, new amplitudes. Callers guarantee unit norm.
    fn with_amplitudes(&self, amps: DVector<C64>) -> Self;

    /// Fock truncation of the oscillator factor.
    fn osc_dim(&self) -> usize;

    /// Total population in the top `levels` oscillator levels.
    fn top_population(&self, levels: usize) -> f64;

    fn norm(&self) -> f64 {
        self.amplitudes().norm()
    }

    fn expectation(&self, op: &DMatrix<C64>) -> C64 {
        let v = self.amplitudes();
        v.dotc(&(op * v))
    }

    /// Errors when the top-level population exceeds [`LEAKAGE_TOLERANCE`].
    fn check_leakage(&self) -> Result<()> {
        let population = self.top_population(LEAKAGE_LEVELS);
        if population >= LEAKAGE_TOLERANCE {
            let dim = self.osc_dim();
            return Err(Error::Leakage {
                population,
                dim,
                suggested: 2 * dim,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OscState {
    amps: DVector<C64>,
}

impl OscState {
    /// Normalizes `amps`; a zero vector is rejected.
    pub fn from_amplitudes(amps: DVector<C64>) -> Result<Self> {
        if amps.len() < 2 {
            return Err(Error::InvalidSpace(amps.len()));
        }
        let norm = amps.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidArgument(
                "state vector has zero or non-finite norm".into(),
            ));
        }
        Ok(Self {
            amps: amps / C64::from(norm),
        })
    }

    pub fn fock(space: OscillatorSpace, n: usize) -> Result<Self> {
        if n >= space.dim() {
            return Err(Error::InvalidArgument(format!(
                "Fock level {n} outside dim={}",
                space.dim()
            )));
        }
        let mut amps = DVector::zeros(space.dim());
        amps[n] = ONE;
        Ok(Self { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// `|<n|s>|^2` for every level.
    pub fn photon_distribution(&self) -> Vec<f64> {
        self.amps.iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.photon_distribution()
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum()
    }
}

impl QuantumState for OscState {
    fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    fn with_amplitudes(&self, amps: DVector<C64>) -> Self {
        Self { amps }
    }

    fn osc_dim(&self) -> usize {
        self.amps.len()
    }

    fn top_population(&self, levels: usize) -> f64 {
        let d = self.amps.len();
        self.amps.rows(d.saturating_sub(levels), levels.min(d)).norm_squared()
    }
}

/// Poisson mass `sum_{n >= dim} e^{-|alpha|^2} |alpha|^{2n} / n!` lost by truncation.
pub fn coherent_tail_mass(alpha_abs: f64, dim: usize) -> f64 {
    let mean = alpha_abs * alpha_abs;
    if mean == 0.0 {
        return if dim == 0 { 1.0 } else { 0.0 };
    }
    // log-space terms; summation continues past the mode until terms are negligible.
    let ln_mean = mean.ln();
    let mut ln_fact = 0.0;
    for k in 1..=dim {
        ln_fact += (k as f64).ln();
    }
    let mut total = 0.0;
    let mut n = dim;
    loop {
        let ln_term = -mean + n as f64 * ln_mean - ln_fact;
        let term = ln_term.exp();
        total += term;
        if n as f64 > mean && term < total * 1e-17 + f64::MIN_POSITIVE {
            break;
        }
        n += 1;
        ln_fact += (n as f64).ln();
        if n > dim + 100_000 {
            break;
        }
    }
    total.min(1.0)
}

/// Smallest truncation for which the coherent-state tail mass is below
/// [`TAIL_TOLERANCE`] (never below 2).
pub fn min_coherent_dim(alpha_abs: f64) -> usize {
    let mut dim = 2;
    while coherent_tail_mass(alpha_abs, dim) >= TAIL_TOLERANCE {
        dim += 1;
    }
    dim
}

/// Truncated and renormalized `|alpha>` with amplitudes `alpha^n / sqrt(n!)`.
pub fn coherent_state(alpha: C64, space: OscillatorSpace) -> Result<OscState> {
    let r = alpha.norm();
    let tail = coherent_tail_mass(r, space.dim());
    if tail >= TAIL_TOLERANCE {
        return Err(Error::TruncationTooSmall {
            dim: space.dim(),
            alpha_abs: r,
            tail,
            needed: min_coherent_dim(r),
        });
    }
    let phase = alpha.arg();
    let mut amps = DVector::zeros(space.dim());
    let mut ln_mag = -0.5 * r * r;
    for n in 0..space.dim() {
        if n > 0 {
            ln_mag += r.ln() - 0.5 * (n as f64).ln();
        }
        amps[n] = if r == 0.0 {
            if n == 0 {
                ONE
            } else {
                ZERO
            }
        } else {
            C64::from_polar(ln_mag.exp(), n as f64 * phase)
        };
    }
    OscState::from_amplitudes(amps)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QubitOp {
    Identity,
    SigmaX,
    SigmaY,
    SigmaZ,
    Projector0,
    Projector1,
}

/// 2x2 matrix in the `{|0>, |1>}` basis with
/// `sigma_z = |0><0| - |1><1|`, `sigma_y = -i(|1><0| - |0><1|)`,
/// `sigma_x = |1><0| + |0><1|`.
pub fn qubit_op(which: QubitOp) -> DMatrix<C64> {
    // row-major [<0|.|0>, <0|.|1>, <1|.|0>, <1|.|1>]
    let e = match which {
        QubitOp::Identity => [ONE, ZERO, ZERO, ONE],
        QubitOp::SigmaX => [ZERO, ONE, ONE, ZERO],
        QubitOp::SigmaY => [ZERO, I, -I, ZERO],
        QubitOp::SigmaZ => [ONE, ZERO, ZERO, -ONE],
        QubitOp::Projector0 => [ONE, ZERO, ZERO, ZERO],
        QubitOp::Projector1 => [ZERO, ZERO, ZERO, ONE],
    };
    DMatrix::from_row_slice(2, 2, &e)
}

/// Kronecker product with the qubit factor as the slow index.
pub fn tensor(qubit_part: &DMatrix<C64>, osc_part: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    if qubit_part.shape() != (2, 2) {
        return Err(Error::ShapeMismatch(format!(
            "qubit factor must be 2x2, got {:?}",
            qubit_part.shape()
        )));
    }
    if !osc_part.is_square() || osc_part.nrows() < 2 {
        return Err(Error::ShapeMismatch(format!(
            "oscillator factor must be square with dim >= 2, got {:?}",
            osc_part.shape()
        )));
    }
    Ok(qubit_part.kronecker(osc_part))
}

#[derive(Clone, Debug, PartialEq)]
pub struct JointState {
    amps: DVector<C64>,
    dim: usize,
}

impl JointState {
    /// `(c0|0> + c1|1>) (x) osc`; requires `|c0|^2 + |c1|^2 = 1` within 1e-12.
    pub fn product(c0: C64, c1: C64, osc: &OscState) -> Result<Self> {
        let w = c0.norm_sqr() + c1.norm_sqr();
        if (w - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "qubit amplitudes must be normalized, |c0|^2+|c1|^2 = {w}"
            )));
        }
        Self::from_branches(c0, osc, c1, osc)
    }

    /// `c0|0> (x) s0 + c1|1> (x) s1`, renormalized.
    pub fn from_branches(c0: C64, s0: &OscState, c1: C64, s1: &OscState) -> Result<Self> {
        if s0.dim() != s1.dim() {
            return Err(Error::ShapeMismatch(format!(
                "branch dimensions differ: {} vs {}",
                s0.dim(),
                s1.dim()
            )));
        }
        let dim = s0.dim();
        let mut amps = DVector::zeros(2 * dim);
        for n in 0..dim {
            amps[n] = c0 * s0.amplitudes()[n];
            amps[dim + n] = c1 * s1.amplitudes()[n];
        }
        let norm = amps.norm();
        if norm == 0.0 {
            return Err(Error::InvalidArgument("joint state has zero norm".into()));
        }
        Ok(Self {
            amps: amps / C64::from(norm),
            dim,
        })
    }

    pub fn from_amplitudes(amps: DVector<C64>, space: OscillatorSpace) -> Result<Self> {
        if amps.len() != space.joint_dim() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} joint amplitudes, got {}",
                space.joint_dim(),
                amps.len()
            )));
        }
        let norm = amps.norm();
        if norm == 0.0 {
            return Err(Error::InvalidArgument("joint state has zero norm".into()));
        }
        Ok(Self {
            amps: amps / C64::from(norm),
            dim: space.dim(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Amplitude of `|qubit> (x) |n>`.
    pub fn amplitude(&self, qubit: usize, n: usize) -> C64 {
        self.amps[qubit * self.dim + n]
    }
}

impl QuantumState for JointState {
    fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    fn with_amplitudes(&self, amps: DVector<C64>) -> Self {
        Self { amps, dim: self.dim }
    }

    fn osc_dim(&self) -> usize {
        self.dim
    }

    fn top_population(&self, levels: usize) -> f64 {
        let levels = levels.min(self.dim);
        let start = self.dim - levels;
        (0..2)
            .map(|q| self.amps.rows(q * self.dim + start, levels).norm_squared())
            .sum()
    }
}

/// Eigenvalues in ascending order with matching eigenvector columns.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

impl Spectrum {
    /// Largest `||H v - lambda v||` over all eigenpairs.
    pub fn max_residual(&self, h: &DMatrix<C64>) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &lam)| {
                let v = self.vectors.column(i);
                (h * v - v * C64::from(lam)).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Largest entry of `|V^H V - 1|`.
    pub fn orthonormality_error(&self) -> f64 {
        let n = self.vectors.ncols();
        let gram = self.vectors.adjoint() * &self.vectors;
        (gram - DMatrix::<C64>::identity(n, n))
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }
}

/// Largest entry of `|M - M^H|`.
pub fn hermiticity_deviation(m: &DMatrix<C64>) -> f64 {
    (m - m.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn max_entry(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// A Hermitian matrix (in frequency units, `H / hbar`) with a lazily computed,
/// shareable spectral decomposition.
#[derive(Debug)]
pub struct HermitianOperator {
    matrix: DMatrix<C64>,
    deviation: f64,
    spectrum: OnceLock<Spectrum>,
}

impl Clone for HermitianOperator {
    fn clone(&self) -> Self {
        let spectrum = OnceLock::new();
        if let Some(s) = self.spectrum.get() {
            let _ = spectrum.set(s.clone());
        }
        Self {
            matrix: self.matrix.clone(),
            deviation: self.deviation,
            spectrum,
        }
    }
}

impl HermitianOperator {
    /// Rejects matrices whose hermiticity deviation exceeds
    /// [`HERMITICITY_TOLERANCE`] times `max(1, max |M_ij|)`.
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::ShapeMismatch(format!(
                "operator must be square, got {:?}",
                matrix.shape()
            )));
        }
        let deviation = hermiticity_deviation(&matrix);
        if !(deviation <= HERMITICITY_TOLERANCE * max_entry(&matrix).max(1.0)) {
            return Err(Error::NotHermitian(deviation));
        }
        let matrix = (&matrix + matrix.adjoint()) * C64::from(0.5);
        Ok(Self {
            matrix,
            deviation,
            spectrum: OnceLock::new(),
        })
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// Hermiticity certificate of the matrix as supplied to [`Self::new`].
    pub fn hermiticity_deviation(&self) -> f64 {
        self.deviation
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Cached eigendecomposition; the first caller computes it.
    pub fn spectrum(&self) -> &Spectrum {
        self.spectrum.get_or_init(|| decompose(&self.matrix))
    }

    pub fn expectation(&self, v: &DVector<C64>) -> f64 {
        v.dotc(&(&self.matrix * v)).re
    }
}

fn decompose(m: &DMatrix<C64>) -> Spectrum {
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    Spectrum { values, vectors }
}

/// Eigendecomposition of a raw matrix; non-Hermitian input is rejected.
pub fn hermitian_eig(matrix: &DMatrix<C64>) -> Result<Spectrum> {
    let op = HermitianOperator::new(matrix.clone())?;
    Ok(decompose(op.matrix()))
}

/// A state expanded in an operator's eigenbasis, ready to be evaluated at
/// many times for `O(dim^2)` each.
#[derive(Clone, Debug)]
pub struct Propagation<'a, S> {
    spectrum: &'a Spectrum,
    coeffs: DVector<C64>,
    template: S,
}

impl<'a, S: QuantumState> Propagation<'a, S> {
    pub fn new(h: &'a HermitianOperator, state: &S) -> Result<Self> {
        if h.dim() != state.amplitudes().len() {
            return Err(Error::ShapeMismatch(format!(
                "operator dim {} vs state dim {}",
                h.dim(),
                state.amplitudes().len()
            )));
        }
        let spectrum = h.spectrum();
        let coeffs = spectrum.vectors.adjoint() * state.amplitudes();
        Ok(Self {
            spectrum,
            coeffs,
            template: state.clone(),
        })
    }

    /// `exp(-i H t) |s>` without the leakage guard.
    pub fn state_at_unchecked(&self, t: f64) -> S {
        let phased = DVector::from_iterator(
            self.coeffs.len(),
            self.coeffs
                .iter()
                .zip(&self.spectrum.values)
                .map(|(c, &e)| c * C64::from_polar(1.0, -e * t)),
        );
        self.template.with_amplitudes(&self.spectrum.vectors * phased)
    }

    /// `exp(-i H t) |s>`, failing if the evolved state leaks into the top levels.
    pub fn state_at(&self, t: f64) -> Result<S> {
        let s = self.state_at_unchecked(t);
        s.check_leakage()?;
        Ok(s)
    }
}

/// `exp(-i H t) |s>` for time-independent `H` (given as `H / hbar`).
pub fn evolve<S: QuantumState>(h: &HermitianOperator, s: &S, t: f64) -> Result<S> {
    Propagation::new(h, s)?.state_at(t)
}

/// `<s1|s2>`.
pub fn overlap<S: QuantumState>(s1: &S, s2: &S) -> Result<C64> {
    let (a, b) = (s1.amplitudes(), s2.amplitudes());
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch(format!(
            "overlap of dim {} with dim {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.dotc(b))
}

/// Reduced qubit density matrix, `rho[(q, q')] = sum_n psi(q, n) conj(psi(q', n))`.
pub fn partial_trace_qubit(s: &JointState) -> Matrix2<C64> {
    let mut rho = Matrix2::zeros();
    for q in 0..2 {
        for qp in 0..2 {
            rho[(q, qp)] = (0..s.dim())
                .map(|n| s.amplitude(q, n) * s.amplitude(qp, n).conj())
                .sum();
        }
    }
    rho
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn space(d: usize) -> OscillatorSpace {
        OscillatorSpace::new(d).unwrap()
    }

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn invalid_space() {
        assert!(matches!(OscillatorSpace::new(1), Err(Error::InvalidSpace(1))));
    }

    #[test]
    fn annihilation_entries() {
        let a = annihilation_op(space(3));
        assert_eq!(a[(0, 1)], ONE);
        assert!((a[(1, 2)].re - 2f64.sqrt()).abs() < 1e-15);
        let nonzero = a.iter().filter(|c| c.norm() > 0.0).count();
        assert_eq!(nonzero, 2);
        let vac = OscState::fock(space(3), 0).unwrap();
        assert_eq!((a * vac.amplitudes()).norm(), 0.0);
    }

    #[test]
    fn coherent_mean_field() {
        let s = space(64);
        let psi = coherent_state(C64::from(0.5), s).unwrap();
        let a = annihilation_op(s);
        assert!(close(psi.expectation(&a), C64::from(0.5), 1e-10));
    }

    #[test]
    fn coherent_basics() {
        let s = space(64);
        let vac = coherent_state(ZERO, s).unwrap();
        assert_eq!(vac, OscState::fock(s, 0).unwrap());
        let psi = coherent_state(C64::from(2.0), s).unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-12);
        assert!((psi.mean_photon_number() - 4.0).abs() < 1e-9);
    }

    #[test]
    fn coherent_is_poissonian() {
        let alpha = C64::new(1.2, -0.9);
        let psi = coherent_state(alpha, space(48)).unwrap();
        let mean: f64 = alpha.norm_sqr();
        let mut p = (-mean).exp();
        for (n, got) in psi.photon_distribution().into_iter().enumerate() {
            if n > 0 {
                p *= mean / n as f64;
            }
            assert!((got - p).abs() < 1e-10, "level {n}: {got} vs {p}");
        }
    }

    #[test]
    fn truncation_too_small_reports_needed_dim() {
        let err = coherent_state(C64::from(5.0), space(40)).unwrap_err();
        match err {
            Error::TruncationTooSmall { needed, .. } => {
                assert!(needed > 40);
                assert!(coherent_state(C64::from(5.0), space(needed)).is_ok());
                assert!(coherent_state(C64::from(5.0), space(needed - 1)).is_err());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn pauli_conventions() {
        let sx = qubit_op(QubitOp::SigmaX);
        let sy = qubit_op(QubitOp::SigmaY);
        let sz = qubit_op(QubitOp::SigmaZ);
        let zero = DVector::from_vec(vec![ONE, ZERO]);
        assert_eq!(&sz * &zero, zero);
        assert_eq!(&sy * &sy, qubit_op(QubitOp::Identity));
        assert_eq!(&sx * &sy - &sy * &sx, &sz * C64::new(0.0, -2.0));
        // sigma_y |0> = -i |1>
        assert_eq!(&sy * &zero, DVector::from_vec(vec![ZERO, -I]));
    }

    #[test]
    fn tensor_layout_is_qubit_slow() {
        let s = space(6);
        let id = tensor(&qubit_op(QubitOp::Identity), &s.identity()).unwrap();
        assert_eq!(id, DMatrix::identity(12, 12));

        let op = tensor(&qubit_op(QubitOp::Projector0), &s.number_op()).unwrap();
        let psi = JointState::product(ONE, ZERO, &OscState::fock(s, 3).unwrap()).unwrap();
        assert_eq!(psi.amplitudes()[3], ONE);
        assert_eq!(&op * psi.amplitudes(), psi.amplitudes() * C64::from(3.0));

        let up = JointState::product(ZERO, ONE, &OscState::fock(s, 2).unwrap()).unwrap();
        assert_eq!(up.amplitudes()[6 + 2], ONE);

        let h = 1.0 / 2f64.sqrt();
        let coh = coherent_state(C64::new(0.7, 0.2), space(32)).unwrap();
        let sup = JointState::product(C64::from(h), C64::from(h), &coh).unwrap();
        let sz = tensor(&qubit_op(QubitOp::SigmaZ), &space(32).identity()).unwrap();
        assert!(sup.expectation(&sz).norm() < 1e-14);

        assert!(tensor(&space(3).identity(), &s.identity()).is_err());
    }

    #[test]
    fn eig_of_diagonal_and_number_operator() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(
            [3.0, -1.0, 2.0].iter().map(|&x| C64::from(x)).collect(),
        ));
        assert_eq!(hermitian_eig(&m).unwrap().values, vec![-1.0, 2.0, 3.0]);

        let n = space(8).number_op();
        let eig = hermitian_eig(&n).unwrap();
        for (i, v) in eig.values.iter().enumerate() {
            assert!((v - i as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let a = annihilation_op(space(4));
        assert!(matches!(hermitian_eig(&a), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn quadratic_spectrum_matches_symplectic_frequency() {
        let s = space(128);
        let (w, lam) = (1.1, 0.05);
        let a = annihilation_op(s);
        let ad = a.adjoint();
        let h = s.number_op() * C64::from(w) + (&a * &a + &ad * &ad) * C64::from(lam);
        let eig = hermitian_eig(&h).unwrap();
        let freq = (w * w - 4.0 * lam * lam).sqrt();
        // Levels near the cut are distorted; the bottom half is converged.
        for i in 0..64 {
            let gap = eig.values[i + 1] - eig.values[i];
            assert!((gap - freq).abs() / freq < 1e-9, "gap {i}: {gap}");
        }
        let norm = eig.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
        assert!(eig.max_residual(&h) <= 1e-10 * norm);
        assert!(eig.orthonormality_error() <= 1e-10);
    }

    #[test]
    fn evolve_identity_at_zero_and_rotating_coherent_state() {
        let s = space(64);
        let w = 1.3;
        let h = HermitianOperator::new(s.number_op() * C64::from(w)).unwrap();
        let alpha = C64::new(1.5, 0.4);
        let psi = coherent_state(alpha, s).unwrap();
        let same = evolve(&h, &psi, 0.0).unwrap();
        assert!((same.amplitudes() - psi.amplitudes()).norm() < 1e-12);

        let t = 2.1;
        let out = evolve(&h, &psi, t).unwrap();
        let expected = coherent_state(alpha * C64::from_polar(1.0, -w * t), s).unwrap();
        let fidelity = overlap(&expected, &out).unwrap().norm_sqr();
        assert!(fidelity >= 1.0 - 1e-10);
    }

    #[test]
    fn evolve_detects_leakage() {
        let s = space(8);
        let a = annihilation_op(s);
        let h = HermitianOperator::new(&a + a.adjoint()).unwrap();
        let psi = OscState::fock(s, 0).unwrap();
        match evolve(&h, &psi, 3.0) {
            Err(Error::Leakage { suggested, .. }) => assert_eq!(suggested, 16),
            other => panic!("expected leakage, got {other:?}"),
        }
    }

    #[test]
    fn overlap_cases() {
        let s = space(64);
        let psi = coherent_state(C64::from(1.0), s).unwrap();
        assert!(close(overlap(&psi, &psi).unwrap(), ONE, 1e-12));
        let vac = OscState::fock(s, 0).unwrap();
        assert!(close(overlap(&vac, &psi).unwrap(), C64::from((-0.5f64).exp()), 1e-10));
        let f3 = OscState::fock(s, 3).unwrap();
        assert_eq!(overlap(&vac, &f3).unwrap(), ZERO);
        let other = OscState::fock(space(5), 0).unwrap();
        assert!(overlap(&vac, &other).is_err());
    }

    #[test]
    fn partial_trace_cases() {
        let s = space(40);
        let coh = coherent_state(C64::new(1.0, 0.5), s).unwrap();
        let (c0, c1) = (C64::new(0.6, 0.0), C64::new(0.0, 0.8));
        let prod = JointState::product(c0, c1, &coh).unwrap();
        let rho = partial_trace_qubit(&prod);
        assert!(close(rho[(0, 1)], c0 * c1.conj(), 1e-12));
        assert!(((rho[(0, 0)] + rho[(1, 1)]).re - 1.0).abs() < 1e-12);

        let s1 = coherent_state(C64::new(-0.5, 0.3), s).unwrap();
        let branches = JointState::from_branches(c0, &coh, c1, &s1).unwrap();
        let rho = partial_trace_qubit(&branches);
        let expected = c0 * c1.conj() * overlap(&s1, &coh).unwrap();
        assert!(close(rho[(0, 1)], expected, 1e-12));

        let f0 = OscState::fock(s, 0).unwrap();
        let f1 = OscState::fock(s, 1).unwrap();
        let h = C64::from(1.0 / 2f64.sqrt());
        let bell = JointState::from_branches(h, &f0, h, &f1).unwrap();
        assert_eq!(partial_trace_qubit(&bell)[(0, 1)], ZERO);
    }

    #[test]
    fn shared_spectrum_across_threads() {
        let s = space(24);
        let h = HermitianOperator::new(s.number_op()).unwrap();
        let psi = coherent_state(C64::from(0.8), s).unwrap();
        std::thread::scope(|scope| {
            for k in 0..4 {
                let (h, psi) = (&h, &psi);
                scope.spawn(move || {
                    let out = evolve(h, psi, k as f64).unwrap();
                    assert!((out.norm() - 1.0).abs() < 1e-12);
                });
            }
        });
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn evolution_is_unitary_and_composes(
            re in -1.5f64..1.5, im in -1.5f64..1.5,
            lam in -0.2f64..0.2, t1 in 0.0f64..5.0, t2 in 0.0f64..5.0,
        ) {
            let s = space(48);
            let a = annihilation_op(s);
            let ad = a.adjoint();
            let h = HermitianOperator::new(
                s.number_op() + (&a * &a + &ad * &ad) * C64::from(lam),
            ).unwrap();
            let psi = coherent_state(C64::new(re, im), s).unwrap();
            let e0 = h.expectation(psi.amplitudes());
            let once = evolve(&h, &psi, t1 + t2).unwrap();
            let twice = evolve(&h, &evolve(&h, &psi, t1).unwrap(), t2).unwrap();
            prop_assert!((once.norm() - 1.0).abs() < 1e-12);
            prop_assert!((once.amplitudes() - twice.amplitudes()).norm() < 1e-10);
            let e1 = h.expectation(once.amplitudes());
            prop_assert!((e1 - e0).abs() <= 1e-10 * e0.abs().max(1.0));
        }
    }
}
