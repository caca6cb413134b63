//! Probe-junction current and the envelope metrics used to read decoherence
//! off the Rabi oscillation.
//!
//! Currents are returned per elementary charge, `I / e`, in the frequency
//! units of the [`ModelParams`] they were computed from.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::decoherence::{decoherence_approx, decoherence_exact, FullModel, TimeGrid};
use crate::error::{Error, Result};
use crate::exec::{try_map_indexed, Execution};
use crate::fock::{JointState, OscillatorSpace};
use crate::params::ModelParams;

/// Probability of the charge state `|1>_c = sin(theta/2)|0> + cos(theta/2)|1>`.
pub fn charge_occupation(s: &JointState, theta: f64) -> f64 {
    let (sn, cs) = ((0.5 * theta).sin(), (0.5 * theta).cos());
    (0..s.dim())
        .map(|n| (s.amplitude(0, n) * sn + s.amplitude(1, n) * cs).norm_sqr())
        .sum()
}

/// Which decoherence factor multiplies the analytic current.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoherenceForm {
    #[default]
    Approx,
    Exact,
}

/// `I/e = sin(theta) D(t) [omega_a sin(omega_a t) + K Omega sin(2 Omega t) cos(omega_a t)]`
/// with `K = 8 g^4 |alpha|^2 / (Delta^2 Omega^2)`, for `c0 = c1 = 1/sqrt 2`.
pub fn current_analytic(m: &ModelParams, alpha: C64, t: f64) -> f64 {
    current_analytic_with(m, alpha, t, DecoherenceForm::Approx)
}

pub fn current_analytic_with(m: &ModelParams, alpha: C64, t: f64, form: DecoherenceForm) -> f64 {
    let d = match form {
        DecoherenceForm::Approx => decoherence_approx(m, alpha, t),
        DecoherenceForm::Exact => decoherence_exact(m, alpha, t),
    };
    let k = 8.0 * m.g.powi(4) * alpha.norm_sqr() / (m.delta * m.delta * m.big_omega * m.big_omega);
    let wa = m.omega_a;
    m.theta.sin() * d * (wa * (wa * t).sin() + k * m.big_omega * (2.0 * m.big_omega * t).sin() * (wa * t).cos())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurrentSource {
    Analytic,
    NumericFullModel,
    Uncoupled,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurrentTrace {
    pub times: Vec<f64>,
    /// `I / e`
    pub current: Vec<f64>,
    pub source: CurrentSource,
}

impl CurrentTrace {
    pub fn dt(&self) -> f64 {
        self.times[1] - self.times[0]
    }

    pub fn span(&self) -> f64 {
        self.times[self.times.len() - 1] - self.times[0]
    }

    pub fn peak_amplitude(&self) -> f64 {
        self.current.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }
}

pub fn trace_analytic(m: &ModelParams, alpha: C64, grid: &TimeGrid) -> CurrentTrace {
    CurrentTrace {
        times: grid.times(),
        current: grid.times().iter().map(|&t| current_analytic(m, alpha, t)).collect(),
        source: CurrentSource::Analytic,
    }
}

/// Analytic current with the oscillator decoupled (`g = 0`), i.e. bare Rabi
/// oscillation at `omega_a`.
pub fn trace_uncoupled(m: &ModelParams, grid: &TimeGrid) -> Result<CurrentTrace> {
    let free = m.with_coupling(0.0)?;
    Ok(CurrentTrace {
        times: grid.times(),
        current: grid
            .times()
            .iter()
            .map(|&t| current_analytic(&free, C64::from(0.0), t))
            .collect(),
        source: CurrentSource::Uncoupled,
    })
}

/// Largest grid step allowed for current traces: `2 pi / (20 max(omega_a, Omega))`.
pub fn sampling_limit(m: &ModelParams) -> f64 {
    2.0 * PI / (20.0 * m.omega_a.max(m.big_omega))
}

/// `-2 dP_c/dt` by central differences (second-order one-sided at the ends).
pub fn current_from_occupation(p: &[f64], dt: f64) -> Vec<f64> {
    let n = p.len();
    (0..n)
        .map(|i| {
            let dp = if n < 3 {
                (p[n - 1] - p[0]) / dt
            } else if i == 0 {
                (-3.0 * p[0] + 4.0 * p[1] - p[2]) / (2.0 * dt)
            } else if i == n - 1 {
                (3.0 * p[n - 1] - 4.0 * p[n - 2] + p[n - 3]) / (2.0 * dt)
            } else {
                (p[i + 1] - p[i - 1]) / (2.0 * dt)
            };
            -2.0 * dp
        })
        .collect()
}

/// Current from exact evolution of `(|0> + |1>)/sqrt 2 (x) |alpha>` under the
/// full Hamiltonian.
pub fn current_numeric(
    m: &ModelParams,
    alpha: C64,
    grid: &TimeGrid,
    space: OscillatorSpace,
    exec: Execution,
) -> Result<CurrentTrace> {
    let limit = sampling_limit(m);
    if grid.dt() > limit {
        return Err(Error::Sampling { dt: grid.dt(), limit });
    }
    let h = C64::from(std::f64::consts::FRAC_1_SQRT_2);
    let model = FullModel::new(m, h, h, alpha, space)?;
    let prop = model.propagation()?;
    let occupation = try_map_indexed(grid.samples, exec, |i| {
        Ok::<_, Error>(charge_occupation(&prop.state_at(grid.time(i))?, m.theta))
    })?;
    Ok(CurrentTrace {
        times: grid.times(),
        current: current_from_occupation(&occupation, grid.dt()),
        source: CurrentSource::NumericFullModel,
    })
}

/// Hann-windowed amplitude spectrum, zero-padded 8x.
/// Returns `(angular frequencies, amplitudes)`.
pub fn amplitude_spectrum(signal: &[f64], dt: f64) -> (Vec<f64>, Vec<f64>) {
    let n = signal.len();
    let padded = (8 * n).next_power_of_two();
    let window: Vec<f64> = (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / (n - 1).max(1) as f64).cos())
        .collect();
    let gain: f64 = window.iter().sum();
    let mut buf: Vec<C64> = signal
        .iter()
        .zip(&window)
        .map(|(x, w)| C64::from(x * w))
        .chain(std::iter::repeat(C64::from(0.0)))
        .take(padded)
        .collect();
    let fft: Arc<dyn rustfft::Fft<f64>> = FftPlanner::new().plan_fft_forward(padded);
    fft.process(&mut buf);
    let half = padded / 2;
    let freqs = (0..=half).map(|k| 2.0 * PI * k as f64 / (padded as f64 * dt)).collect();
    let amps = buf[..=half].iter().map(|c| 2.0 * c.norm() / gain).collect();
    (freqs, amps)
}

/// Strongest local maximum with frequency in `[lo, hi]`, refined by a parabola
/// through the three bins around it. Returns `(frequency, amplitude)`.
pub fn spectral_peak(freqs: &[f64], amps: &[f64], lo: f64, hi: f64) -> Option<(f64, f64)> {
    let mut best: Option<usize> = None;
    for k in 1..amps.len().saturating_sub(1) {
        if freqs[k] < lo || freqs[k] > hi {
            continue;
        }
        if amps[k] >= amps[k - 1] && amps[k] >= amps[k + 1] && best.is_none_or(|b| amps[k] > amps[b]) {
            best = Some(k);
        }
    }
    let k = best?;
    let (a, b, c) = (amps[k - 1], amps[k], amps[k + 1]);
    let denom = a - 2.0 * b + c;
    let shift = if denom.abs() > 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
    let step = freqs[1] - freqs[0];
    Some((freqs[k] + shift * step, b - 0.25 * (a - c) * shift))
}

/// Complex amplitude `Z(t) = sum_{|k| <= harmonics} z_k e^{2ik Omega_m t}`
/// such that `signal ~ Re(Z(t) e^{i omega_c t})`, fitted by least squares.
/// Works when the modulation is faster than the carrier, as long as
/// `omega_c / Omega_m` is not an integer.
pub fn demodulate(times: &[f64], signal: &[f64], carrier: f64, modulation: f64, harmonics: usize) -> Result<Vec<f64>> {
    let h = harmonics as i64;
    let freqs: Vec<f64> = (-h..=h).map(|k| carrier + k as f64 * modulation).collect();
    let cols = 2 * freqs.len();
    if times.len() < 2 * cols {
        return Err(Error::InvalidArgument("too few samples to demodulate".into()));
    }
    let design = DMatrix::from_fn(times.len(), cols, |r, c| {
        let f = freqs[c / 2];
        if c % 2 == 0 {
            (f * times[r]).cos()
        } else {
            -(f * times[r]).sin()
        }
    });
    let rhs = DVector::from_column_slice(signal);
    let coeffs = design
        .svd(true, true)
        .solve(&rhs, 1e-12)
        .map_err(|e| Error::InvalidArgument(format!("demodulation failed: {e}")))?;
    Ok(times
        .iter()
        .map(|&t| {
            (-h..=h)
                .enumerate()
                .map(|(j, k)| {
                    C64::new(coeffs[2 * j], coeffs[2 * j + 1]) * C64::from_polar(1.0, k as f64 * modulation * t)
                })
                .sum::<C64>()
                .norm()
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnvelopeMetrics {
    /// `2 pi / omega_a`, from the carrier peak.
    pub carrier_period: f64,
    /// `pi / Omega`, from the sideband spacing.
    pub modulation_period: f64,
    /// Fraction of each modulation period the envelope spends below its
    /// half-depth level (mean dip width over the period).
    pub envelope_width_ratio: f64,
    /// `(max - min) / (max + min)` of the envelope.
    pub modulation_depth: f64,
}

/// Sidebands weaker than this fraction of the carrier count as no modulation.
const SIDEBAND_FLOOR: f64 = 1e-4;
const DEMOD_HARMONICS: usize = 4;

pub fn envelope_metrics(trace: &CurrentTrace, m: &ModelParams) -> Result<EnvelopeMetrics> {
    let needed = 2.0 * m.jump_period();
    if trace.times.len() < 16 || trace.span() < needed {
        return Err(Error::TraceTooShort {
            span: trace.span(),
            needed,
        });
    }
    let dt = trace.dt();
    let (freqs, amps) = amplitude_spectrum(&trace.current, dt);
    let nyquist = PI / dt;
    let (carrier, carrier_amp) = spectral_peak(&freqs, &amps, 0.0, nyquist)
        .ok_or_else(|| Error::InvalidArgument("no carrier peak in trace".into()))?;

    // Upper sideband: the strongest peak above the carrier main lobe.
    let lobe = 8.0 * 2.0 * PI / trace.span();
    let sideband =
        spectral_peak(&freqs, &amps, carrier + lobe, nyquist).filter(|&(_, a)| a > SIDEBAND_FLOOR * carrier_amp);
    let Some((upper, _)) = sideband else {
        return Ok(EnvelopeMetrics {
            carrier_period: 2.0 * PI / carrier,
            modulation_period: m.jump_period(),
            envelope_width_ratio: 0.0,
            modulation_depth: 0.0,
        });
    };
    let modulation = upper - carrier;
    let envelope = demodulate(&trace.times, &trace.current, carrier, modulation, DEMOD_HARMONICS)?;
    let (lo, hi) = envelope
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &e| {
            (lo.min(e), hi.max(e))
        });
    let depth = if hi + lo > 0.0 { (hi - lo) / (hi + lo) } else { 0.0 };
    let level = 0.5 * (hi + lo);
    let width_ratio = envelope.iter().filter(|&&e| e < level).count() as f64 / envelope.len() as f64;
    Ok(EnvelopeMetrics {
        carrier_period: 2.0 * PI / carrier,
        modulation_period: 2.0 * PI / modulation,
        envelope_width_ratio: width_ratio,
        modulation_depth: depth.min(1.0),
    })
}
