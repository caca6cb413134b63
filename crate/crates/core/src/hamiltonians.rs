//! Full qubit-oscillator Hamiltonian (no rotating-wave approximation), the
//! branch-conditional squeezing Hamiltonians obtained by eliminating qubit
//! flips, and their closed-form Bogoliubov solution.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{annihilation_op, hermitian_eig, qubit_op, tensor, HermitianOperator, OscillatorSpace, QubitOp};
use crate::params::{ModelParams, GAMMA_FAIL};

/// Qubit eigenstate selecting one effective oscillator Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Branch {
    Zero,
    One,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Zero, Branch::One];

    pub fn index(self) -> usize {
        match self {
            Branch::Zero => 0,
            Branch::One => 1,
        }
    }

    /// `(-1)^k`
    pub fn sign(self) -> f64 {
        match self {
            Branch::Zero => 1.0,
            Branch::One => -1.0,
        }
    }

    pub fn other(self) -> Branch {
        match self {
            Branch::Zero => Branch::One,
            Branch::One => Branch::Zero,
        }
    }
}

/// `H/hbar = omega a^dag a - (omega_a/2) sigma_z + g sigma_y (x) i(a - a^dag)`
/// on the qubit-slow joint space.
pub fn build_full_hamiltonian(m: &ModelParams, space: OscillatorSpace) -> Result<HermitianOperator> {
    let a = annihilation_op(space);
    let quadrature = (&a - a.adjoint()) * C64::i();
    let h = tensor(&qubit_op(QubitOp::Identity), &space.number_op())? * C64::from(m.omega)
        - tensor(&qubit_op(QubitOp::SigmaZ), &space.identity())? * C64::from(0.5 * m.omega_a)
        + tensor(&qubit_op(QubitOp::SigmaY), &quadrature)? * C64::from(m.g);
    HermitianOperator::new(h)
}

/// `H_k/hbar = omega_tilde a^dag a + (-1)^k lambda (a^2 + a^dag^2) + epsilon_k`.
pub fn build_effective_hamiltonian(
    branch: Branch,
    m: &ModelParams,
    space: OscillatorSpace,
) -> Result<HermitianOperator> {
    let a = annihilation_op(space);
    let ad = a.adjoint();
    let squeeze = &a * &a + &ad * &ad;
    let h = space.number_op() * C64::from(m.omega_tilde)
        + squeeze * C64::from(branch.sign() * m.lambda)
        + space.identity() * C64::from(m.epsilon[branch.index()]);
    HermitianOperator::new(h)
}

/// `mu_k(t) = (sqrt(N_k) + 1/sqrt(N_k))/2 e^{+i Omega t}`,
/// `nu_k(t) = (sqrt(N_k) - 1/sqrt(N_k))/2 e^{-i Omega t}`.
///
/// At `t = 0` these define the branch normal mode `A_k = mu a - nu a^dag`,
/// and the evolved lowering operator is `U a U^dag = mu_k(t) A_k + nu_k(t) A_k^dag`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BogoliubovCoeffs {
    pub mu: C64,
    pub nu: C64,
    pub branch: Branch,
    pub time: f64,
    /// `Omega t`
    pub phase: f64,
}

impl BogoliubovCoeffs {
    /// `|mu|^2 - |nu|^2`, which is 1 by construction.
    pub fn invariant(&self) -> f64 {
        self.mu.norm_sqr() - self.nu.norm_sqr()
    }

    /// Real normal-mode coefficients `(mu_k(0), nu_k(0))`.
    pub fn static_parts(&self) -> (f64, f64) {
        let rot = C64::from_polar(1.0, self.phase);
        ((self.mu / rot).re, (self.nu * rot).re)
    }

    /// `(P, Q)` with Heisenberg-picture `a(t) = P a + Q a^dag`.
    pub fn heisenberg(&self) -> (C64, C64) {
        let (mu0, nu0) = self.static_parts();
        let p = self.mu.conj() * mu0 - self.nu.conj() * nu0;
        let q = self.mu * nu0 - self.nu * mu0;
        (p, q)
    }
}

pub fn squeeze_coefficients(branch: Branch, m: &ModelParams, t: f64) -> Result<BogoliubovCoeffs> {
    let denom = m.omega * m.delta + 4.0 * m.g * m.g;
    let ratio = m.omega * m.delta / denom;
    if !(denom != 0.0 && ratio > 0.0 && ratio.is_finite()) {
        return Err(Error::Regime(format!(
            "squeeze ratio omega delta / (omega delta + 4 g^2) = {ratio:.4e} is not positive"
        )));
    }
    let root = m.squeeze_ratio(branch.index()).sqrt();
    let phase = m.big_omega * t;
    Ok(BogoliubovCoeffs {
        mu: C64::from_polar(0.5 * (root + 1.0 / root), phase),
        nu: C64::from_polar(0.5 * (root - 1.0 / root), -phase),
        branch,
        time: t,
        phase,
    })
}

/// First and second moments of a pure Gaussian oscillator state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianMoments {
    /// `<a>`
    pub mean: C64,
    /// `<a^2>`
    pub a2: C64,
    /// `<a^dag a>`
    pub number: f64,
}

/// Moments of `exp(-i H_k t)|alpha>` predicted from the Bogoliubov coefficients.
pub fn predicted_moments(coeffs: &BogoliubovCoeffs, alpha: C64) -> GaussianMoments {
    let (p, q) = coeffs.heisenberg();
    let mean = p * alpha + q * alpha.conj();
    GaussianMoments {
        mean,
        a2: mean * mean + p * q,
        number: mean.norm_sqr() + q.norm_sqr(),
    }
}

/// Coefficients of one branch's second-order effective Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BranchFit {
    pub branch: Branch,
    /// Fitted number-operator coefficient.
    pub omega_tilde_fit: f64,
    /// Fitted `(a^2 + a^dag^2)` coefficient, signed.
    pub lambda_fit: f64,
    /// Fitted constant offset.
    pub epsilon_fit: f64,
    /// Mean level spacing of the low-lying dressed states of this branch in
    /// the full Hamiltonian.
    pub dressed_spacing: f64,
    pub omega_tilde_deviation: f64,
    pub lambda_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    pub gamma: f64,
    pub branches: [BranchFit; 2],
    /// Largest relative deviation of the fitted `omega_tilde` from `omega + 2g^2/delta`.
    pub omega_tilde_deviation: f64,
    /// Largest relative deviation of the fitted `lambda` from `(-1)^k g^2/delta`.
    pub lambda_deviation: f64,
}

/// Second-order Schrieffer-Wolff elimination of the qubit-flip terms of the
/// full Hamiltonian, done numerically on the truncated joint space.
///
/// With `H = H_d + V` (`H_d` diagonal, `V` qubit-off-diagonal), the generator
/// `S_ij = V_ij / (E_i - E_j)` gives `H_eff = H_d + [S, V] / 2`. Each qubit
/// block of `H_eff` is fitted to `w a^dag a + l (a^2 + a^dag^2) + e` over the
/// lower half of the Fock levels, away from the truncation edge.
pub fn schrieffer_wolff_check(m: &ModelParams, space: OscillatorSpace) -> Result<DiscrepancyReport> {
    if !(m.gamma <= GAMMA_FAIL) {
        return Err(Error::Regime(format!(
            "gamma = {:.4} exceeds {GAMMA_FAIL}; adiabatic elimination does not apply",
            m.gamma
        )));
    }
    let dim = space.dim();
    if dim < 12 {
        return Err(Error::InvalidArgument(format!("need dim >= 12 for the fit, got {dim}")));
    }
    let full = build_full_hamiltonian(m, space)?;
    let h = full.matrix();
    let n = space.joint_dim();
    let energies: Vec<f64> = (0..n).map(|i| h[(i, i)].re).collect();

    let mut v = DMatrix::<C64>::zeros(n, n);
    let mut s = DMatrix::<C64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i / dim != j / dim && h[(i, j)] != C64::from(0.0) {
                let gap = energies[i] - energies[j];
                if gap.abs() <= 1e-9 * m.omega {
                    return Err(Error::Regime(
                        "branches cross: resonant qubit-flip transition, fit undefined".into(),
                    ));
                }
                v[(i, j)] = h[(i, j)];
                s[(i, j)] = h[(i, j)] / gap;
            }
        }
    }
    let correction = (&s * &v - &v * &s) * C64::from(0.5);

    let dressed = dressed_spacings(&full, dim, m);
    let fit_levels = dim / 2 - 2;
    let mut branches = [Branch::Zero, Branch::One].map(|branch| {
        let offset = branch.index() * dim;
        let diag = |k: usize| energies[offset + k] + correction[(offset + k, offset + k)].re;
        // least-squares line through the diagonal
        let xs: Vec<f64> = (0..fit_levels).map(|k| k as f64).collect();
        let ys: Vec<f64> = (0..fit_levels).map(diag).collect();
        let (slope, intercept) = linear_fit(&xs, &ys);
        let lambda_fit = (0..fit_levels)
            .map(|k| {
                let elem = correction[(offset + k, offset + k + 2)].re;
                elem / (((k + 1) * (k + 2)) as f64).sqrt()
            })
            .sum::<f64>()
            / fit_levels as f64;
        let expected_lambda = branch.sign() * m.lambda;
        BranchFit {
            branch,
            omega_tilde_fit: slope,
            lambda_fit,
            epsilon_fit: intercept,
            dressed_spacing: dressed[branch.index()],
            omega_tilde_deviation: (slope - m.omega_tilde).abs() / m.omega_tilde.abs(),
            lambda_deviation: relative_or_absolute(lambda_fit, expected_lambda),
        }
    });
    // exact zero coupling leaves no correction at all
    if m.g == 0.0 {
        for b in branches.iter_mut() {
            b.lambda_fit = 0.0;
            b.lambda_deviation = 0.0;
        }
    }
    Ok(DiscrepancyReport {
        gamma: m.gamma,
        omega_tilde_deviation: branches.iter().map(|b| b.omega_tilde_deviation).fold(0.0, f64::max),
        lambda_deviation: branches.iter().map(|b| b.lambda_deviation).fold(0.0, f64::max),
        branches,
    })
}

fn relative_or_absolute(got: f64, expected: f64) -> f64 {
    if expected == 0.0 {
        got.abs()
    } else {
        (got - expected).abs() / expected.abs()
    }
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Mean spacing of the lowest dressed levels of each branch, classified by
/// qubit population. Falls back to NaN if a branch has fewer than 2 levels.
fn dressed_spacings(full: &HermitianOperator, dim: usize, m: &ModelParams) -> [f64; 2] {
    let eig = full.spectrum();
    let take = (dim / 4).max(2);
    let mut levels: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    for (i, &e) in eig.values.iter().enumerate() {
        let col = eig.vectors.column(i);
        let p0: f64 = (0..dim).map(|k| col[k].norm_sqr()).sum();
        let b = if p0 >= 0.5 { 0 } else { 1 };
        // only levels well below the truncation edge of the branch
        let bare = (e - m.epsilon[b]) / m.omega;
        if levels[b].len() < take && bare < 0.5 * dim as f64 {
            levels[b].push(e);
        }
    }
    levels.map(|l| {
        if l.len() < 2 {
            f64::NAN
        } else {
            (l[l.len() - 1] - l[0]) / (l.len() - 1) as f64
        }
    })
}

/// Level spacings of an effective branch Hamiltonian over the lower
/// `1 - exclude_top` fraction of its spectrum.
pub fn interior_spacings(h: &HermitianOperator, exclude_top: f64) -> Result<Vec<f64>> {
    let eig = hermitian_eig(h.matrix())?;
    let keep = ((eig.values.len() as f64) * (1.0 - exclude_top)).floor() as usize;
    Ok(eig.values[..keep.max(2)].windows(2).map(|w| w[1] - w[0]).collect())
}
