//! Scenario execution: turns a [`RunConfig`] into CSV/SVG files and a manifest.

use std::path::PathBuf;
use std::time::Instant;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::config::{format_complex, Mode, Params, RunConfig, Scenario, Span, SweepParameter};
use crate::decoherence::{DecoherenceCurve, Method, TimeGrid};
use crate::error::{Error, Result};
use crate::exec::{with_threads, Execution};
use crate::fock::OscillatorSpace;
use crate::hamiltonians::{schrieffer_wolff_check, squeeze_coefficients, Branch};
use crate::observables::{current_numeric, envelope_metrics, trace_analytic, trace_uncoupled};
use crate::output::{sha256_hex, CheckRecord, CsvTable, Emitter, FileRecord, PlotStyle, Series};
use crate::params::{
    constants, derive_params, truncation_estimate, validate_regime, CapacitanceConvention, CheckStatus, CircuitParams,
    ModelParams,
};

pub const MANIFEST_NAME: &str = "manifest.json";
/// Fock columns are produced only up to this coherent amplitude.
pub const FOCK_ALPHA_LIMIT: f64 = 5.0;
/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "CQD_OUT";

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub threads: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Constants {
    pub elementary_charge: f64,
    pub planck: f64,
    pub hbar: f64,
    pub boltzmann: f64,
    pub flux_quantum: f64,
}

impl Constants {
    fn codata() -> Self {
        Self {
            elementary_charge: constants::ELEMENTARY_CHARGE,
            planck: constants::PLANCK,
            hbar: constants::HBAR,
            boltzmann: constants::BOLTZMANN,
            flux_quantum: constants::FLUX_QUANTUM,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub scenario: String,
    pub config: String,
    pub config_sha256: String,
    pub circuit: Option<CircuitParams>,
    /// SI parameters, when the run started from a device description.
    pub model_si: Option<ModelParams>,
    /// Dimensionless parameters used for all numerics.
    pub model: Option<ModelParams>,
    pub constants: Constants,
    pub threads: Option<usize>,
    pub wall_time_s: f64,
    pub checks: Vec<CheckRecord>,
    pub metrics: Vec<Metric>,
    pub errors: Vec<String>,
    /// Process exit code for the first error, if any.
    pub error_code: Option<i32>,
    pub files: Vec<FileRecord>,
}

impl RunManifest {
    pub fn checks_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// 0 success, 2 config error, 3 numeric/regime error, 4 failed check.
    pub fn exit_code(&self) -> i32 {
        match self.error_code {
            Some(code) => code,
            None if !self.checks_passed() => 4,
            None => 0,
        }
    }
}

/// Parameters resolved from a config: SI device (if any) and the
/// dimensionless model used for the numerics.
#[derive(Clone, Copy, Debug)]
pub struct Resolved {
    pub circuit: Option<CircuitParams>,
    pub model_si: Option<ModelParams>,
    pub model: ModelParams,
}

pub fn resolve(cfg: &RunConfig) -> Result<Resolved> {
    resolve_with(cfg, cfg.capacitance_convention)
}

fn resolve_with(cfg: &RunConfig, convention: CapacitanceConvention) -> Result<Resolved> {
    match cfg.params {
        Params::Dimensionless(b) => Ok(Resolved {
            circuit: None,
            model_si: None,
            model: ModelParams::new(1.0, b.omega_a, b.g, b.theta)?,
        }),
        Params::Circuit(block) => {
            let c = block.to_params()?;
            let si = derive_params(&c, convention)?;
            Ok(Resolved {
                circuit: Some(c),
                model_si: Some(si),
                model: si.to_dimensionless()?,
            })
        }
    }
}

pub fn grid_for(cfg: &RunConfig, m: &ModelParams) -> Result<TimeGrid> {
    let t_max = match cfg.grid.span {
        Span::TMax(t) => t,
        Span::Periods(n) => n * m.jump_period(),
    };
    TimeGrid::new(t_max, cfg.grid.samples)
}

/// Configured truncation, raised when `|alpha|` needs more levels.
pub fn fock_space(cfg_dim: usize, m: &ModelParams, alpha: C64) -> Result<OscillatorSpace> {
    OscillatorSpace::new(cfg_dim.max(truncation_estimate(m, alpha.norm())))
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    model: ModelParams,
    exec: Execution,
    emitter: Emitter,
    comments: Vec<String>,
    checks: Vec<CheckRecord>,
    metrics: Vec<Metric>,
}

impl Ctx<'_> {
    fn check(&mut self, name: String, value: f64, tolerance: f64, detail: impl Into<String>) {
        self.checks.push(CheckRecord {
            name,
            passed: value <= tolerance,
            value,
            tolerance,
            detail: detail.into(),
        });
    }

    fn metric(&mut self, name: String, value: f64) {
        self.metrics.push(Metric { name, value });
    }

    fn csv(&mut self, name: &str, mut table: CsvTable) -> Result<()> {
        table.comments = self.comments.clone();
        self.emitter.write_csv(name, &table)?;
        Ok(())
    }
}

/// Runs the configured scenario, writes its files and `manifest.json` under
/// `opts.out_dir`. Module errors end up in the manifest rather than in the
/// returned `Result`, which only fails when the manifest itself cannot be written.
pub fn run_scenario(cfg: &RunConfig, opts: &RunOptions) -> Result<RunManifest> {
    let start = Instant::now();
    let config = cfg.to_text();
    let config_sha256 = sha256_hex(config.as_bytes());
    let mut manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        scenario: cfg.scenario.to_string(),
        config,
        config_sha256: config_sha256.clone(),
        circuit: None,
        model_si: None,
        model: None,
        constants: Constants::codata(),
        threads: opts.threads,
        wall_time_s: 0.0,
        checks: Vec::new(),
        metrics: Vec::new(),
        errors: Vec::new(),
        error_code: None,
        files: Vec::new(),
    };
    let mut emitter = Emitter::new(&opts.out_dir)?;

    let outcome = resolve(cfg).and_then(|r| {
        manifest.circuit = r.circuit;
        manifest.model_si = r.model_si;
        manifest.model = Some(r.model);
        let mut ctx = Ctx {
            cfg,
            model: r.model,
            exec: Execution::default(),
            emitter: Emitter::new(&opts.out_dir)?,
            comments: vec![
                format!("config_sha256 {config_sha256}"),
                format!("scenario {}", cfg.scenario),
            ],
            checks: Vec::new(),
            metrics: Vec::new(),
        };
        let result = with_threads(opts.threads, || match cfg.scenario {
            Scenario::DeriveParams => derive_scenario(&mut ctx),
            Scenario::Fig2 => fig2(&mut ctx),
            Scenario::Fig4 => fig4(&mut ctx),
            Scenario::OracleCheck => oracle_check(&mut ctx),
            Scenario::SwCheck => sw_check(&mut ctx),
            Scenario::Sweep => sweep(&mut ctx),
        });
        manifest.checks = std::mem::take(&mut ctx.checks);
        manifest.metrics = std::mem::take(&mut ctx.metrics);
        emitter = ctx.emitter;
        result
    });
    if let Err(e) = outcome {
        manifest.error_code = Some(e.exit_code());
        manifest.errors.push(e.to_string());
    }
    manifest.files = emitter.files().to_vec();
    manifest.wall_time_s = start.elapsed().as_secs_f64();
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::InvalidArgument(format!("manifest encoding: {e}")))?;
    let path = opts.out_dir.join(MANIFEST_NAME);
    std::fs::write(&path, json).map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

fn alpha_file(prefix: &str, alpha: C64, ext: &str) -> String {
    format!("{prefix}_alpha_{}.{ext}", format_complex(alpha))
}

fn fig2(ctx: &mut Ctx) -> Result<()> {
    let m = ctx.model;
    let grid = grid_for(ctx.cfg, &m)?;
    let times = grid.times();
    let mut overlay = Vec::new();
    let mut minima = Vec::new();
    for &alpha in &ctx.cfg.alpha.clone() {
        let exact = DecoherenceCurve::sample(Method::Exact, &m, alpha, &grid, None, ctx.exec)?;
        let approx = DecoherenceCurve::sample(Method::Approx, &m, alpha, &grid, None, ctx.exec)?;
        let gauss = DecoherenceCurve::sample(Method::GaussianOracle, &m, alpha, &grid, None, ctx.exec)?;
        let mut cols: Vec<(&str, &[f64])> = vec![
            ("t", &times),
            ("D_exact", &exact.values),
            ("D_approx", &approx.values),
            ("D_gaussian", &gauss.values),
        ];
        let fock;
        if alpha.norm() <= FOCK_ALPHA_LIMIT {
            let space = fock_space(ctx.cfg.dim, &m, alpha)?;
            fock = DecoherenceCurve::sample(Method::FockOracle, &m, alpha, &grid, Some(space), ctx.exec)?;
            cols.push(("D_fock", &fock.values));
            ctx.check(
                format!("fig2.fock_vs_exact alpha={}", format_complex(alpha)),
                fock.max_deviation(&exact),
                1e-6,
                format!("dim={}", space.dim()),
            );
        }
        let table = CsvTable::from_columns(&cols)?;
        ctx.csv(&alpha_file("fig2", alpha, "csv"), table)?;
        ctx.metric(format!("fig2.d_min alpha={}", format_complex(alpha)), exact.min());
        minima.push((alpha.norm(), exact.min()));
        overlay.push(Series {
            label: format!("alpha={}", format_complex(alpha)),
            xs: times.clone(),
            ys: exact.values,
        });
    }
    minima.sort_by(|a, b| a.0.total_cmp(&b.0));
    if minima.len() > 1 {
        let violations = minima
            .windows(2)
            .filter(|w| !(w[1].0 > w[0].0 && w[1].1 < w[0].1))
            .count();
        ctx.check(
            "fig2.d_min_strictly_decreasing".into(),
            violations as f64,
            0.0,
            "D_min must fall strictly as |alpha| grows",
        );
    }
    let style = PlotStyle {
        title: "Decoherence factor".into(),
        x_label: "t (1/omega)".into(),
        y_label: "D(t)".into(),
    };
    ctx.emitter.write_svg("fig2.svg", &overlay, &style)?;
    Ok(())
}

fn fig4(ctx: &mut Ctx) -> Result<()> {
    let m = ctx.model;
    let grid = grid_for(ctx.cfg, &m)?;
    let times = grid.times();
    let uncoupled = trace_uncoupled(&m, &grid)?;
    for &alpha in &ctx.cfg.alpha.clone() {
        let label = format_complex(alpha);
        let analytic = trace_analytic(&m, alpha, &grid);
        let mut cols: Vec<(&str, &[f64])> = vec![("t", &times), ("I_analytic", &analytic.current)];
        let numeric;
        if alpha.norm() <= FOCK_ALPHA_LIMIT {
            let space = fock_space(ctx.cfg.dim, &m, alpha)?;
            numeric = current_numeric(&m, alpha, &grid, space, ctx.exec)?;
            cols.push(("I_numeric", &numeric.current));
            if m.g == 0.0 {
                let worst = numeric
                    .current
                    .iter()
                    .zip(&analytic.current)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                ctx.check(
                    format!("fig4.numeric_vs_analytic alpha={label}"),
                    worst / analytic.peak_amplitude(),
                    5e-3,
                    "relative to peak amplitude, uncoupled",
                );
            }
        } else {
            numeric = analytic.clone();
        }
        cols.push(("I_uncoupled", &uncoupled.current));
        let table = CsvTable::from_columns(&cols)?;
        ctx.csv(&alpha_file("fig4", alpha, "csv"), table)?;
        if m.g == 0.0 {
            let worst = analytic
                .current
                .iter()
                .zip(&uncoupled.current)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            ctx.check(format!("fig4.uncoupled_identity alpha={label}"), worst, 1e-12, "g = 0");
        }
        let env = envelope_metrics(&analytic, &m)?;
        ctx.metric(format!("fig4.carrier_period alpha={label}"), env.carrier_period);
        ctx.metric(format!("fig4.modulation_period alpha={label}"), env.modulation_period);
        ctx.metric(format!("fig4.modulation_depth alpha={label}"), env.modulation_depth);
        ctx.metric(
            format!("fig4.envelope_width_ratio alpha={label}"),
            env.envelope_width_ratio,
        );

        let mut series = vec![Series {
            label: "I_analytic".into(),
            xs: times.clone(),
            ys: analytic.current.clone(),
        }];
        if alpha.norm() <= FOCK_ALPHA_LIMIT {
            series.push(Series {
                label: "I_numeric".into(),
                xs: times.clone(),
                ys: numeric.current.clone(),
            });
        }
        series.push(Series {
            label: "I_uncoupled".into(),
            xs: times.clone(),
            ys: uncoupled.current.clone(),
        });
        let style = PlotStyle {
            title: format!("Probe current, alpha={label}"),
            x_label: "t (1/omega)".into(),
            y_label: "I/e (omega)".into(),
        };
        ctx.emitter
            .write_svg(&alpha_file("fig4", alpha, "svg"), &series, &style)?;
    }
    Ok(())
}

fn oracle_check(ctx: &mut Ctx) -> Result<()> {
    let m = ctx.model;
    let grid = grid_for(ctx.cfg, &m)?;
    let mut table = CsvTable::new(["check", "alpha", "max_deviation", "tolerance", "status"]);
    let start = ctx.checks.len();
    for &alpha in &ctx.cfg.alpha.clone() {
        let label = format_complex(alpha);
        let space = fock_space(ctx.cfg.dim, &m, alpha)?;
        let exact = DecoherenceCurve::sample(Method::Exact, &m, alpha, &grid, None, ctx.exec)?;
        let gauss = DecoherenceCurve::sample(Method::GaussianOracle, &m, alpha, &grid, None, ctx.exec)?;
        let fock = DecoherenceCurve::sample(Method::FockOracle, &m, alpha, &grid, Some(space), ctx.exec)?;
        let detail = format!("dim={} samples={}", space.dim(), grid.samples);
        ctx.check(
            format!("oracle.fock_vs_exact alpha={label}"),
            fock.max_deviation(&exact),
            1e-6,
            detail.clone(),
        );
        ctx.check(
            format!("oracle.gaussian_vs_fock alpha={label}"),
            gauss.max_deviation(&fock),
            1e-8,
            detail.clone(),
        );
        ctx.check(
            format!("oracle.gaussian_vs_exact alpha={label}"),
            gauss.max_deviation(&exact),
            1e-8,
            detail,
        );
    }
    let mut invariant: f64 = 0.0;
    for t in grid.times() {
        for b in Branch::BOTH {
            invariant = invariant.max((squeeze_coefficients(b, &m, t)?.invariant() - 1.0).abs());
        }
    }
    ctx.check(
        "oracle.bogoliubov_invariant".into(),
        invariant,
        1e-12,
        "|mu|^2 - |nu|^2 = 1 on the grid",
    );
    for c in &ctx.checks[start..] {
        let (name, alpha) = c.name.split_once(" alpha=").unwrap_or((c.name.as_str(), ""));
        table.push_row(vec![
            name.to_string(),
            alpha.to_string(),
            crate::output::format_float(c.value),
            crate::output::format_float(c.tolerance),
            if c.passed { "PASS" } else { "FAIL" }.into(),
        ])?;
    }
    ctx.csv("oracle_check.csv", table)
}

/// Models visited by sweep-like scenarios: the configured model, or one per sweep value.
fn sweep_models(ctx: &Ctx) -> Result<Vec<(f64, ModelParams, Vec<C64>)>> {
    let m = ctx.model;
    let alphas = ctx.cfg.alpha.clone();
    let Some(s) = &ctx.cfg.sweep else {
        return Ok(vec![(m.gamma, m, alphas)]);
    };
    s.values
        .iter()
        .map(|&v| {
            Ok(match s.parameter {
                SweepParameter::G => (v, ModelParams::new(m.omega, m.omega_a, v, m.theta)?, alphas.clone()),
                SweepParameter::OmegaA => (v, ModelParams::new(m.omega, v, m.g, m.theta)?, alphas.clone()),
                SweepParameter::Gamma => {
                    if !(v > 0.0) {
                        return Err(Error::InvalidArgument(format!(
                            "gamma sweep values must be positive, got {v}"
                        )));
                    }
                    (
                        v,
                        ModelParams::new(m.omega, m.omega + m.g / v, m.g, m.theta)?,
                        alphas.clone(),
                    )
                }
                SweepParameter::Alpha => (v, m, vec![C64::from(v)]),
            })
        })
        .collect()
}

fn sw_check(ctx: &mut Ctx) -> Result<()> {
    let points = sweep_models(ctx)?;
    let space = OscillatorSpace::new(ctx.cfg.dim.max(12))?;
    let mut table = CsvTable::new([
        "gamma",
        "branch",
        "omega_tilde_fit",
        "omega_tilde_predicted",
        "lambda_fit",
        "lambda_predicted",
        "omega_tilde_deviation",
        "lambda_deviation",
    ]);
    let mut deviations = Vec::new();
    for (_, m, _) in &points {
        let report = schrieffer_wolff_check(m, space)?;
        for b in &report.branches {
            let f = crate::output::format_float;
            table.push_row(vec![
                f(report.gamma),
                b.branch.index().to_string(),
                f(b.omega_tilde_fit),
                f(m.omega_tilde),
                f(b.lambda_fit),
                f(b.branch.sign() * m.lambda),
                f(b.omega_tilde_deviation),
                f(b.lambda_deviation),
            ])?;
        }
        let g = format!("{}", report.gamma);
        ctx.metric(
            format!("sw.omega_tilde_deviation gamma={g}"),
            report.omega_tilde_deviation,
        );
        ctx.metric(format!("sw.lambda_deviation gamma={g}"), report.lambda_deviation);
        deviations.push((report.gamma, report.omega_tilde_deviation, report.lambda_deviation));
    }
    deviations.sort_by(|a, b| a.0.total_cmp(&b.0));
    // tolerances hold at the weakest coupling; larger gamma only has to be worse
    if let Some(&(gamma, dw, dl)) = deviations.first() {
        ctx.check(format!("sw.omega_tilde gamma={gamma}"), dw, 0.10, "relative");
        ctx.check(format!("sw.lambda gamma={gamma}"), dl, 0.15, "relative");
    }
    if deviations.len() > 1 {
        let violations = deviations
            .windows(2)
            .filter(|w| !(w[1].1 > w[0].1 && w[1].2 > w[0].2))
            .count();
        ctx.check(
            "sw.deviation_grows_with_gamma".into(),
            violations as f64,
            0.0,
            "both deviations strictly increase with gamma",
        );
    }
    ctx.csv("sw_check.csv", table)
}

fn sweep(ctx: &mut Ctx) -> Result<()> {
    let points = sweep_models(ctx)?;
    let parameter = ctx
        .cfg
        .sweep
        .as_ref()
        .map_or("gamma", |s| s.parameter.as_str())
        .to_string();
    let mut long = CsvTable::new([parameter.as_str(), "alpha_re", "alpha_im", "t", "D_exact", "D_approx"]);
    let mut summary = CsvTable::new([
        parameter.as_str(),
        "alpha_re",
        "alpha_im",
        "gamma",
        "jump_period",
        "d_min",
    ]);
    let f = crate::output::format_float;
    for (value, m, alphas) in &points {
        let grid = grid_for(ctx.cfg, m)?;
        for &alpha in alphas {
            let exact = DecoherenceCurve::sample(Method::Exact, m, alpha, &grid, None, ctx.exec)?;
            let approx = DecoherenceCurve::sample(Method::Approx, m, alpha, &grid, None, ctx.exec)?;
            for i in 0..grid.samples {
                long.push_row(vec![
                    f(*value),
                    f(alpha.re),
                    f(alpha.im),
                    f(exact.times[i]),
                    f(exact.values[i]),
                    f(approx.values[i]),
                ])?;
            }
            summary.push_row(vec![
                f(*value),
                f(alpha.re),
                f(alpha.im),
                f(m.gamma),
                f(m.jump_period()),
                f(exact.min()),
            ])?;
        }
    }
    ctx.csv("sweep.csv", long)?;
    ctx.csv("sweep_summary.csv", summary)
}

fn derive_scenario(ctx: &mut Ctx) -> Result<()> {
    let rows = derive_rows(ctx.cfg)?;
    let mut table = CsvTable::new(std::iter::once("quantity".to_string()).chain(rows.columns.iter().cloned()));
    for (name, values) in &rows.rows {
        table.push_row(
            std::iter::once(name.clone())
                .chain(
                    values
                        .iter()
                        .map(|v| v.map_or(String::new(), crate::output::format_float)),
                )
                .collect(),
        )?;
    }
    ctx.csv("derive_params.csv", table)?;
    let r = resolve(ctx.cfg)?;
    let report = validate_regime(&r.model, 0.0, r.model.phi_zpf.unwrap_or(0.0));
    let status = |s: CheckStatus| if s == CheckStatus::Fail { 1.0 } else { 0.0 };
    ctx.check(
        "regime.gamma".into(),
        status(report.gamma_status),
        0.0,
        format!("gamma = {:.4}", report.gamma),
    );
    if let Some(w) = r.model_si.and_then(|si| Some(si.eta_prime? * si.phi_zpf?)) {
        ctx.check(
            "regime.weak_coupling".into(),
            w,
            crate::params::WEAK_COUPLING_FAIL,
            "eta' phi_zpf",
        );
    }
    Ok(())
}

/// Table of derived quantities, one column per capacitance convention in SI
/// mode, a single column in dimensionless mode.
pub struct DeriveTable {
    pub columns: Vec<String>,
    pub rows: Vec<(String, Vec<Option<f64>>)>,
}

pub fn derive_rows(cfg: &RunConfig) -> Result<DeriveTable> {
    let models: Vec<(String, ModelParams)> = match cfg.mode {
        Mode::Dimensionless => vec![("dimensionless".into(), resolve(cfg)?.model)],
        Mode::Si => CapacitanceConvention::ALL
            .iter()
            .map(|&c| Ok((c.to_string(), resolve_with(cfg, c)?.model_si.expect("si mode"))))
            .collect::<Result<_>>()?,
    };
    type Getter = fn(&ModelParams) -> Option<f64>;
    let getters: &[(&str, Getter)] = &[
        ("omega", |m| Some(m.omega)),
        ("omega_a", |m| Some(m.omega_a)),
        ("g", |m| Some(m.g)),
        ("theta", |m| Some(m.theta)),
        ("delta", |m| Some(m.delta)),
        ("gamma", |m| Some(m.gamma)),
        ("Omega", |m| Some(m.big_omega)),
        ("omega_tilde", |m| Some(m.omega_tilde)),
        ("lambda", |m| Some(m.lambda)),
        ("N0", |m| Some(m.n0)),
        ("N1", |m| Some(m.n1)),
        ("jump_period", |m| Some(m.jump_period())),
        ("eta_prime", |m| m.eta_prime),
        ("phi_zpf", |m| m.phi_zpf),
        ("eta_prime_phi_zpf", |m| Some(m.eta_prime? * m.phi_zpf?)),
    ];
    Ok(DeriveTable {
        columns: models.iter().map(|(n, _)| n.clone()).collect(),
        rows: getters
            .iter()
            .map(|(name, get)| (name.to_string(), models.iter().map(|(_, m)| get(m)).collect()))
            .collect(),
    })
}

/// Human-readable form of [`derive_rows`].
pub fn derive_report(cfg: &RunConfig) -> Result<String> {
    let t = derive_rows(cfg)?;
    let mut out = format!("{:<20}", "quantity");
    for c in &t.columns {
        out.push_str(&format!("{c:>16}"));
    }
    out.push('\n');
    for (name, values) in &t.rows {
        out.push_str(&format!("{name:<20}"));
        for v in values {
            match v {
                Some(x) => out.push_str(&format!("{x:>16.6e}")),
                None => out.push_str(&format!("{:>16}", "-")),
            }
        }
        out.push('\n');
    }
    Ok(out)
}

/// Built-in configs for the `check` command: oracle equivalence at the
/// canonical point and the adiabatic-elimination check along a gamma family.
pub fn builtin_checks() -> Vec<RunConfig> {
    let oracle = "mode = dimensionless\nscenario = oracle-check\nalpha = [2]\ndim = 64\n\
                  [model]\nomega_a = 1.8\ng = 0.05\n[grid]\nperiods = 2\nsamples = 200\n";
    let sw = "mode = dimensionless\nscenario = sw-check\ndim = 48\n[model]\nomega_a = 7\ng = 0.3\n\
              [sweep]\nparameter = gamma\nvalues = [0.05, 0.1]\n";
    [oracle, sw]
        .iter()
        .map(|t| crate::config::parse_config(t).expect("built-in config parses"))
        .collect()
}
