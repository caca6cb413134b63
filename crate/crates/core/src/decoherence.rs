//! The decoherence factor `D(t) = |<s_1(t)|s_0(t)>|` by closed form, by its
//! weak-coupling simplification, by exact propagation of both branches in
//! Fock space, by Gaussian moments, and from the full qubit-oscillator model.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{map_indexed, try_map_indexed, Execution};
use crate::fock::{
    coherent_state, overlap, partial_trace_qubit, HermitianOperator, JointState, OscState, OscillatorSpace, Propagation,
};
use crate::hamiltonians::{build_effective_hamiltonian, build_full_hamiltonian, squeeze_coefficients, Branch};
use crate::params::ModelParams;

/// Uniform grid `t_i = i t_max / (samples - 1)`, endpoints included.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TimeGrid {
    pub t_max: f64,
    pub samples: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, samples: usize) -> Result<Self> {
        if samples < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid needs >= 2 samples, got {samples}"
            )));
        }
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "grid t_max must be positive, got {t_max}"
            )));
        }
        Ok(Self { t_max, samples })
    }

    pub fn dt(&self) -> f64 {
        self.t_max / (self.samples - 1) as f64
    }

    pub fn time(&self, i: usize) -> f64 {
        if i + 1 == self.samples {
            self.t_max
        } else {
            i as f64 * self.dt()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.samples).map(|i| self.time(i)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Approx,
    FockOracle,
    GaussianOracle,
    FullModel,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Exact => "exact",
            Method::Approx => "approx",
            Method::FockOracle => "fock_oracle",
            Method::GaussianOracle => "gaussian_oracle",
            Method::FullModel => "full_model",
        })
    }
}

/// `K sin^2(Omega t)` exponent pieces: returns `(8 g^4 sin^2, Delta^2 Omega^2)`.
fn exponent_parts(m: &ModelParams, t: f64) -> (f64, f64) {
    let s = (m.big_omega * t).sin();
    let g2 = m.g * m.g;
    (8.0 * g2 * g2 * s * s, m.delta * m.delta * m.big_omega * m.big_omega)
}

/// `G(t) = Delta Omega / sqrt(Delta^2 Omega^2 + 8 g^4 sin^2 Omega t)`.
pub fn g_factor(m: &ModelParams, t: f64) -> f64 {
    let (num, base) = exponent_parts(m, t);
    (base / (base + num)).sqrt()
}

/// Closed-form overlap modulus of the two squeezed branches.
pub fn decoherence_exact(m: &ModelParams, alpha: C64, t: f64) -> f64 {
    let (num, base) = exponent_parts(m, t);
    (base / (base + num)).sqrt() * (-num * alpha.norm_sqr() / (base + num)).exp()
}

/// Weak-coupling form `exp(-8 g^4 sin^2(Omega t) |alpha|^2 / (Delta^2 Omega^2))`.
pub fn decoherence_approx(m: &ModelParams, alpha: C64, t: f64) -> f64 {
    let (num, base) = exponent_parts(m, t);
    (-num * alpha.norm_sqr() / base).exp()
}

/// Both branch Hamiltonians with `|alpha>` expanded in their eigenbases.
#[derive(Debug)]
pub struct FockOracle {
    hamiltonians: [HermitianOperator; 2],
    initial: OscState,
}

impl FockOracle {
    pub fn new(m: &ModelParams, alpha: C64, space: OscillatorSpace) -> Result<Self> {
        let initial = coherent_state(alpha, space)?;
        let hamiltonians = [
            build_effective_hamiltonian(Branch::Zero, m, space)?,
            build_effective_hamiltonian(Branch::One, m, space)?,
        ];
        Ok(Self { hamiltonians, initial })
    }

    /// Propagators for `(bra, ket)` branches.
    pub fn propagations(&self, bra: Branch, ket: Branch) -> Result<[Propagation<'_, OscState>; 2]> {
        Ok([
            Propagation::new(&self.hamiltonians[bra.index()], &self.initial)?,
            Propagation::new(&self.hamiltonians[ket.index()], &self.initial)?,
        ])
    }

    /// Complex `<s_bra(t)|s_ket(t)>`, including the branch energy offsets.
    pub fn overlap_between(&self, bra: Branch, ket: Branch, t: f64) -> Result<C64> {
        let [pb, pk] = self.propagations(bra, ket)?;
        overlap(&pb.state_at(t)?, &pk.state_at(t)?)
    }

    /// `<s_1(t)|s_0(t)>`
    pub fn branch_overlap(&self, t: f64) -> Result<C64> {
        self.overlap_between(Branch::One, Branch::Zero, t)
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        Ok(self.branch_overlap(t)?.norm())
    }

    pub fn sample(&self, grid: &TimeGrid, exec: Execution) -> Result<Vec<f64>> {
        let [p1, p0] = self.propagations(Branch::One, Branch::Zero)?;
        try_map_indexed(grid.samples, exec, |i| {
            let t = grid.time(i);
            Ok(overlap(&p1.state_at(t)?, &p0.state_at(t)?)?.norm())
        })
    }
}

pub fn decoherence_fock_oracle(m: &ModelParams, alpha: C64, t: f64, space: OscillatorSpace) -> Result<f64> {
    FockOracle::new(m, alpha, space)?.eval(t)
}

/// Mean vector and covariance `[xx, xp, pp]` of `exp(-i H_k t)|alpha>` in
/// quadratures `x = (a + a^dag)/sqrt 2`, `p = (a - a^dag)/(i sqrt 2)`
/// (vacuum covariance is `1/2`).
pub fn branch_gaussian(branch: Branch, m: &ModelParams, alpha: C64, t: f64) -> Result<([f64; 2], [f64; 3])> {
    let c = squeeze_coefficients(branch, m, t)?;
    let (p, q) = c.heisenberg();
    let mean = p * alpha + q * alpha.conj();
    let pq = p * q;
    let qq = q.norm_sqr();
    let cov = [pq.re + qq + 0.5, pq.im, -pq.re + qq + 0.5];
    let r2 = std::f64::consts::SQRT_2;
    Ok(([r2 * mean.re, r2 * mean.im], cov))
}

/// `|<s_1|s_0>|` from the pure-state Gaussian fidelity
/// `F = exp(-d^T (V_0 + V_1)^{-1} d / 2) / sqrt(det(V_0 + V_1))`.
pub fn decoherence_gaussian_oracle(m: &ModelParams, alpha: C64, t: f64) -> Result<f64> {
    let (d0, v0) = branch_gaussian(Branch::Zero, m, alpha, t)?;
    let (d1, v1) = branch_gaussian(Branch::One, m, alpha, t)?;
    let (sxx, sxp, spp) = (v0[0] + v1[0], v0[1] + v1[1], v0[2] + v1[2]);
    let det = sxx * spp - sxp * sxp;
    let (dx, dp) = (d0[0] - d1[0], d0[1] - d1[1]);
    let quad = (spp * dx * dx - 2.0 * sxp * dx * dp + sxx * dp * dp) / det;
    let fidelity = (-0.5 * quad).exp() / det.sqrt();
    Ok(fidelity.sqrt())
}

/// Full-model evolution of `(c0|0> + c1|1>) (x) |alpha>`.
#[derive(Debug)]
pub struct FullModel {
    hamiltonian: HermitianOperator,
    initial: JointState,
    c0c1: f64,
}

impl FullModel {
    pub fn new(m: &ModelParams, c0: C64, c1: C64, alpha: C64, space: OscillatorSpace) -> Result<Self> {
        let c0c1 = (c0 * c1).norm();
        if c0c1 == 0.0 {
            return Err(Error::UndefinedCoherence);
        }
        let initial = JointState::product(c0, c1, &coherent_state(alpha, space)?)?;
        Ok(Self {
            hamiltonian: build_full_hamiltonian(m, space)?,
            initial,
            c0c1,
        })
    }

    pub fn propagation(&self) -> Result<Propagation<'_, JointState>> {
        Propagation::new(&self.hamiltonian, &self.initial)
    }

    pub fn state_at(&self, t: f64) -> Result<JointState> {
        self.propagation()?.state_at(t)
    }

    /// `|rho_01(t)| / |c0 c1|`
    pub fn coherence(&self, state: &JointState) -> f64 {
        partial_trace_qubit(state)[(0, 1)].norm() / self.c0c1
    }

    pub fn sample(&self, grid: &TimeGrid, exec: Execution) -> Result<Vec<f64>> {
        let prop = self.propagation()?;
        try_map_indexed(
            grid.samples,
            exec,
            |i| Ok(self.coherence(&prop.state_at(grid.time(i))?)),
        )
    }
}

pub fn full_model_coherence(
    m: &ModelParams,
    c0: C64,
    c1: C64,
    alpha: C64,
    t: f64,
    space: OscillatorSpace,
) -> Result<f64> {
    let model = FullModel::new(m, c0, c1, alpha, space)?;
    let s = model.state_at(t)?;
    Ok(model.coherence(&s))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JumpMetrics {
    /// Revival period `pi / Omega`.
    pub period: f64,
    /// Deepest coherence loss, `D(t_min)`.
    pub d_min: f64,
    /// `pi / (2 Omega)`
    pub t_min: f64,
}

pub fn jump_metrics(m: &ModelParams, alpha: C64) -> Result<JumpMetrics> {
    if m.g == 0.0 {
        return Err(Error::NoJump);
    }
    let t_min = PI / (2.0 * m.big_omega);
    Ok(JumpMetrics {
        period: PI / m.big_omega,
        d_min: decoherence_exact(m, alpha, t_min),
        t_min,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecoherenceCurve {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub method: Method,
    pub params: ModelParams,
    pub alpha: C64,
}

impl DecoherenceCurve {
    /// Samples `D(t)` on `grid`. `space` is required for the Fock-space methods.
    pub fn sample(
        method: Method,
        m: &ModelParams,
        alpha: C64,
        grid: &TimeGrid,
        space: Option<OscillatorSpace>,
        exec: Execution,
    ) -> Result<Self> {
        let need_space = || space.ok_or_else(|| Error::InvalidArgument(format!("method {method} needs a Fock space")));
        let values = match method {
            Method::Exact => map_indexed(grid.samples, exec, |i| decoherence_exact(m, alpha, grid.time(i))),
            Method::Approx => map_indexed(grid.samples, exec, |i| decoherence_approx(m, alpha, grid.time(i))),
            Method::GaussianOracle => try_map_indexed(grid.samples, exec, |i| {
                decoherence_gaussian_oracle(m, alpha, grid.time(i))
            })?,
            Method::FockOracle => FockOracle::new(m, alpha, need_space()?)?.sample(grid, exec)?,
            Method::FullModel => {
                let h = C64::from(std::f64::consts::FRAC_1_SQRT_2);
                FullModel::new(m, h, h, alpha, need_space()?)?.sample(grid, exec)?
            }
        };
        Ok(Self {
            times: grid.times(),
            values,
            method,
            params: *m,
            alpha,
        })
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest pointwise difference to another curve on the same grid.
    pub fn max_deviation(&self, other: &DecoherenceCurve) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}
