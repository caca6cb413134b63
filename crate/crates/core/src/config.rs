//! Run configuration: a line-oriented `key = value` document.
//!
//! ```text
//! # comment
//! mode = dimensionless          # or si
//! scenario = fig2               # derive-params | fig2 | fig4 | oracle-check | sw-check | sweep
//! alpha = [5, 10, 30]           # complex entries like 2+1i are accepted
//! dim = 64
//!
//! [model]                       # dimensionless mode, units of omega
//! omega_a = 1.8
//! g = 0.05
//!
//! [grid]
//! periods = 4                   # or t_max = 12.5
//! samples = 400
//! ```
//!
//! Keys may also be written as dotted paths (`grid.samples = 400`). Every
//! problem in a document is reported, each with its line number.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{constants, kelvin_to_joules, CapacitanceConvention, CircuitParams};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConfigError {
    /// 1-based line, 0 when the problem is not tied to a line.
    pub line: usize,
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "line {}: {}: {}", self.line, self.key, self.message)
        } else {
            write!(f, "{}: {}", self.key, self.message)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} config error(s)", self.0.len())?;
        for e in &self.0 {
            write!(f, "\n  {e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

macro_rules! keyword_enum {
    ($(#[$m:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$m])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
        pub enum $name { $($variant),+ }

        impl $name {
            pub fn as_str(&self) -> &'static str {
                match self { $(Self::$variant => $text),+ }
            }
        }

        impl FromStr for $name {
            type Err = String;
            fn from_str(s: &str) -> std::result::Result<Self, String> {
                match s {
                    $($text => Ok(Self::$variant),)+
                    _ => Err(format!("expected one of: {}", [$($text),+].join(", "))),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

keyword_enum!(Mode { Si => "si", Dimensionless => "dimensionless" });

keyword_enum!(Scenario {
    DeriveParams => "derive-params",
    Fig2 => "fig2",
    Fig4 => "fig4",
    OracleCheck => "oracle-check",
    SwCheck => "sw-check",
    Sweep => "sweep",
});

keyword_enum!(
    /// Swept quantity. `gamma` moves `omega_a = omega + g / gamma` at fixed `g`.
    SweepParameter { G => "g", OmegaA => "omega_a", Gamma => "gamma", Alpha => "alpha" }
);

keyword_enum!(EnergyUnit { Kelvin => "kelvin", Joule => "joule" });

/// Dimensionless model block, frequencies in units of the oscillator frequency.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModelBlock {
    pub omega_a: f64,
    pub g: f64,
    pub theta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Gate {
    Charge(f64),
    /// Gate voltage in volts.
    Voltage(f64),
}

/// Device block, energies stored in joules and flux in units of `phi_0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CircuitBlock {
    pub c_j: f64,
    pub c_g: f64,
    pub l: f64,
    pub e_j0: f64,
    pub phi_x: f64,
    pub gate: Gate,
}

impl CircuitBlock {
    pub fn to_params(&self) -> Result<CircuitParams> {
        let n_g = match self.gate {
            Gate::Charge(n) => n,
            Gate::Voltage(v) => CircuitParams::gate_charge_from_voltage(self.c_g, v),
        };
        CircuitParams::new(
            self.c_j,
            self.c_g,
            self.l,
            self.e_j0,
            self.phi_x * constants::FLUX_QUANTUM,
            n_g,
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Params {
    Dimensionless(ModelBlock),
    Circuit(CircuitBlock),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Span {
    /// Absolute `t_max` in units of `1/omega`.
    TMax(f64),
    /// Multiples of the jump period `pi / Omega`.
    Periods(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid {
    pub span: Span,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sweep {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub mode: Mode,
    pub scenario: Scenario,
    pub params: Params,
    pub alpha: Vec<C64>,
    pub grid: Grid,
    pub dim: usize,
    pub capacitance_convention: CapacitanceConvention,
    pub output: Option<String>,
    pub sweep: Option<Sweep>,
}

pub const DEFAULT_DIM: usize = 64;
pub const DEFAULT_SAMPLES: usize = 400;
pub const DEFAULT_PERIODS: f64 = 4.0;

const KNOWN_KEYS: &[&str] = &[
    "mode",
    "scenario",
    "alpha",
    "dim",
    "capacitance_convention",
    "output",
    "model.omega_a",
    "model.g",
    "model.theta",
    "circuit.C_J",
    "circuit.C_g",
    "circuit.L",
    "circuit.E_J",
    "circuit.E_J0",
    "circuit.phi_x",
    "circuit.energy_unit",
    "circuit.n_g",
    "circuit.V_g",
    "grid.t_max",
    "grid.periods",
    "grid.samples",
    "sweep.parameter",
    "sweep.values",
];

struct Entry {
    line: usize,
    value: String,
}

struct Parser {
    entries: Vec<(String, Entry)>,
    errors: Vec<ConfigError>,
}

impl Parser {
    fn error(&mut self, line: usize, key: &str, message: impl Into<String>) {
        self.errors.push(ConfigError {
            line,
            key: key.to_string(),
            message: message.into(),
        });
    }

    fn lex(text: &str) -> Self {
        let mut p = Parser {
            entries: Vec::new(),
            errors: Vec::new(),
        };
        let mut section = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            if let Some(rest) = body.strip_prefix('[') {
                match rest.strip_suffix(']') {
                    Some(name) if is_ident_path(name.trim()) => section = name.trim().to_string(),
                    _ => p.error(line, body, "malformed section header"),
                }
                continue;
            }
            let Some((k, v)) = body.split_once('=') else {
                p.error(line, body, "expected `key = value`");
                continue;
            };
            let k = k.trim();
            if !is_ident_path(k) {
                p.error(line, k, "malformed key");
                continue;
            }
            let key = if section.is_empty() {
                k.to_string()
            } else {
                format!("{section}.{k}")
            };
            if !KNOWN_KEYS.contains(&key.as_str()) {
                p.error(line, &key, "unknown key");
                continue;
            }
            if let Some((_, prev)) = p.entries.iter().find(|(name, _)| *name == key) {
                let first = prev.line;
                p.error(line, &key, format!("duplicate key (first set on line {first})"));
                continue;
            }
            p.entries.push((
                key,
                Entry {
                    line,
                    value: v.trim().to_string(),
                },
            ));
        }
        p
    }

    fn raw(&self, key: &str) -> Option<(usize, String)> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, e)| (e.line, e.value.clone()))
    }

    fn get<T: FromStr>(&mut self, key: &str, what: &str) -> Option<T> {
        let (line, value) = self.raw(key)?;
        match value.parse() {
            Ok(v) => Some(v),
            Err(_) => {
                self.error(line, key, format!("expected {what}, got `{value}`"));
                None
            }
        }
    }

    fn keyword<T: FromStr<Err = String>>(&mut self, key: &str) -> Option<T> {
        let (line, value) = self.raw(key)?;
        match value.parse() {
            Ok(v) => Some(v),
            Err(msg) => {
                self.error(line, key, format!("`{value}`: {msg}"));
                None
            }
        }
    }

    fn list<T: FromStr>(&mut self, key: &str, what: &str) -> Option<Vec<T>> {
        let (line, value) = self.raw(key)?;
        let Some(inner) = value.strip_prefix('[').and_then(|v| v.strip_suffix(']')) else {
            self.error(line, key, format!("expected a list like [1, 2], got `{value}`"));
            return None;
        };
        let mut out = Vec::new();
        for item in inner.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item.parse() {
                Ok(v) => out.push(v),
                Err(_) => {
                    self.error(line, key, format!("expected {what} list entries, got `{item}`"));
                    return None;
                }
            }
        }
        Some(out)
    }

    fn require<T>(&mut self, key: &str, v: Option<T>) -> Option<T> {
        if v.is_none() && self.raw(key).is_none() {
            self.error(0, key, "missing required key");
        }
        v
    }

    fn line_of(&self, key: &str) -> usize {
        self.raw(key).map_or(0, |(l, _)| l)
    }
}

fn is_ident_path(s: &str) -> bool {
    !s.is_empty()
        && s.split('.')
            .all(|part| !part.is_empty() && part.chars().all(|c| c.is_ascii_alphanumeric() || c == '_'))
}

fn parse_complex(s: &str) -> std::result::Result<C64, ()> {
    s.replace(' ', "").parse::<C64>().map_err(|_| ())
}

struct ComplexItem(C64);

impl FromStr for ComplexItem {
    type Err = ();
    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        parse_complex(s).map(ComplexItem)
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut p = Parser::lex(text);

    let mode = p.keyword::<Mode>("mode");
    let mode = p.require("mode", mode);
    let scenario = p.keyword::<Scenario>("scenario");
    let scenario = p.require("scenario", scenario);
    let dim = p.get::<usize>("dim", "a nonnegative integer").unwrap_or(DEFAULT_DIM);
    if dim < 2 {
        let line = p.line_of("dim");
        p.error(line, "dim", "must be at least 2");
    }
    let capacitance_convention = p
        .get::<CapacitanceConvention>("capacitance_convention", "series_C or junction_C")
        .unwrap_or(CapacitanceConvention::JunctionC);
    let output = p.raw("output").map(|(_, v)| v);
    let alpha: Vec<C64> = p
        .list::<ComplexItem>("alpha", "complex")
        .map(|v| v.into_iter().map(|c| c.0).collect())
        .unwrap_or_default();

    let samples = p
        .get::<usize>("grid.samples", "a nonnegative integer")
        .unwrap_or(DEFAULT_SAMPLES);
    if samples < 2 {
        let line = p.line_of("grid.samples");
        p.error(line, "grid.samples", "must be at least 2");
    }
    let t_max = p.get::<f64>("grid.t_max", "a number");
    let periods = p.get::<f64>("grid.periods", "a number");
    let span = match (t_max, periods) {
        (Some(_), Some(_)) => {
            let line = p.line_of("grid.periods");
            p.error(line, "grid.periods", "conflicts with grid.t_max");
            Span::TMax(1.0)
        }
        (Some(t), None) => Span::TMax(t),
        (None, Some(n)) => Span::Periods(n),
        (None, None) => Span::Periods(DEFAULT_PERIODS),
    };
    let span_value = match span {
        Span::TMax(v) | Span::Periods(v) => v,
    };
    if !(span_value > 0.0 && span_value.is_finite()) {
        let key = if t_max.is_some() { "grid.t_max" } else { "grid.periods" };
        let line = p.line_of(key);
        p.error(line, key, "must be positive");
    }

    let params = match mode {
        Some(Mode::Dimensionless) => {
            for key in p
                .entries
                .iter()
                .map(|(k, _)| k.clone())
                .filter(|k| k.starts_with("circuit."))
                .collect::<Vec<_>>()
            {
                let line = p.line_of(&key);
                p.error(line, &key, "not allowed in dimensionless mode");
            }
            let omega_a = p.get::<f64>("model.omega_a", "a number");
            let omega_a = p.require("model.omega_a", omega_a);
            let g = p.get::<f64>("model.g", "a number");
            let g = p.require("model.g", g);
            let theta = p
                .get::<f64>("model.theta", "a number")
                .unwrap_or(std::f64::consts::FRAC_PI_2);
            match (omega_a, g) {
                (Some(omega_a), Some(g)) => Some(Params::Dimensionless(ModelBlock { omega_a, g, theta })),
                _ => None,
            }
        }
        Some(Mode::Si) => {
            for key in p
                .entries
                .iter()
                .map(|(k, _)| k.clone())
                .filter(|k| k.starts_with("model."))
                .collect::<Vec<_>>()
            {
                let line = p.line_of(&key);
                p.error(line, &key, "not allowed in si mode");
            }
            parse_circuit(&mut p).map(Params::Circuit)
        }
        None => None,
    };

    let sweep = match (
        p.keyword::<SweepParameter>("sweep.parameter"),
        p.list::<f64>("sweep.values", "numeric"),
    ) {
        (Some(parameter), Some(values)) => Some(Sweep { parameter, values }),
        (None, None) => None,
        (Some(_), None) => {
            if p.raw("sweep.values").is_none() {
                p.error(0, "sweep.values", "missing required key");
            }
            None
        }
        (None, Some(_)) => {
            if p.raw("sweep.parameter").is_none() {
                p.error(0, "sweep.parameter", "missing required key");
            }
            None
        }
    };

    if let Some(scenario) = scenario {
        let needs_alpha = matches!(
            scenario,
            Scenario::Fig2 | Scenario::Fig4 | Scenario::OracleCheck | Scenario::Sweep
        );
        let sweeps_alpha = sweep.as_ref().is_some_and(|s| s.parameter == SweepParameter::Alpha);
        if needs_alpha && alpha.is_empty() && !sweeps_alpha {
            let line = p.line_of("alpha");
            p.error(
                line,
                "alpha",
                format!("must be a nonempty list for scenario {scenario}"),
            );
        }
        if scenario == Scenario::Sweep {
            match &sweep {
                Some(s) if s.values.is_empty() => {
                    let line = p.line_of("sweep.values");
                    p.error(line, "sweep.values", "must be nonempty");
                }
                Some(_) => {}
                None if p.raw("sweep.parameter").is_none() && p.raw("sweep.values").is_none() => {
                    p.error(0, "sweep.parameter", "missing required key for scenario sweep");
                }
                None => {}
            }
        }
    }

    if !p.errors.is_empty() {
        return Err(Error::Config(ConfigErrors(p.errors)));
    }
    Ok(RunConfig {
        mode: mode.expect("checked"),
        scenario: scenario.expect("checked"),
        params: params.expect("checked"),
        alpha,
        grid: Grid { span, samples },
        dim,
        capacitance_convention,
        output,
        sweep,
    })
}

fn parse_circuit(p: &mut Parser) -> Option<CircuitBlock> {
    let c_j = p.get::<f64>("circuit.C_J", "a number");
    let c_j = p.require("circuit.C_J", c_j);
    let c_g = p.get::<f64>("circuit.C_g", "a number");
    let c_g = p.require("circuit.C_g", c_g);
    let l = p.get::<f64>("circuit.L", "a number");
    let l = p.require("circuit.L", l);
    let unit = p
        .keyword::<EnergyUnit>("circuit.energy_unit")
        .unwrap_or(EnergyUnit::Kelvin);
    let to_joules = |v: f64| match unit {
        EnergyUnit::Kelvin => kelvin_to_joules(v),
        EnergyUnit::Joule => v,
    };

    // E_J is the effective SQUID energy at zero flux; E_J0 is the per-junction value.
    let e_j = p.get::<f64>("circuit.E_J", "a number");
    let e_j0 = p.get::<f64>("circuit.E_J0", "a number");
    let phi_x = p.get::<f64>("circuit.phi_x", "a number");
    let (e_j0, phi_x) = match (p.raw("circuit.E_J").is_some(), p.raw("circuit.E_J0").is_some()) {
        (true, true) => {
            let line = p.line_of("circuit.E_J0");
            p.error(line, "circuit.E_J0", "conflicts with circuit.E_J");
            (None, None)
        }
        (true, false) => {
            if phi_x.is_some() {
                let line = p.line_of("circuit.phi_x");
                p.error(line, "circuit.phi_x", "only valid together with circuit.E_J0");
            }
            (e_j.map(|v| 0.5 * to_joules(v)), Some(0.0))
        }
        (false, true) => (e_j0.map(to_joules), Some(phi_x.unwrap_or(0.0))),
        (false, false) => {
            p.error(0, "circuit.E_J", "missing required key (or give circuit.E_J0)");
            (None, None)
        }
    };

    let n_g = p.get::<f64>("circuit.n_g", "a number");
    let v_g = p.get::<f64>("circuit.V_g", "a number");
    let gate = match (p.raw("circuit.n_g").is_some(), p.raw("circuit.V_g").is_some()) {
        (true, true) => {
            let line = p.line_of("circuit.V_g");
            p.error(line, "circuit.V_g", "conflicts with circuit.n_g");
            None
        }
        (true, false) => n_g.map(Gate::Charge),
        (false, true) => v_g.map(Gate::Voltage),
        (false, false) => {
            p.error(0, "circuit.n_g", "missing required key (or give circuit.V_g)");
            None
        }
    };

    let block = CircuitBlock {
        c_j: c_j?,
        c_g: c_g?,
        l: l?,
        e_j0: e_j0?,
        phi_x: phi_x?,
        gate: gate?,
    };
    if let Err(e) = block.to_params() {
        p.error(0, "circuit", e.to_string());
        return None;
    }
    Some(block)
}

/// `5`, `2+1i`, `1.5-2i`: the form accepted in `alpha` lists.
pub fn format_complex(c: C64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.im < 0.0 {
        format!("{}-{}i", c.re, -c.im)
    } else {
        format!("{}+{}i", c.re, c.im)
    }
}

impl RunConfig {
    /// Canonical document with every default written out.
    /// `parse_config(&cfg.to_text())` reproduces `cfg` exactly.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut line = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        line(format!("mode = {}", self.mode));
        line(format!("scenario = {}", self.scenario));
        let alphas: Vec<String> = self.alpha.iter().map(|&a| format_complex(a)).collect();
        line(format!("alpha = [{}]", alphas.join(", ")));
        line(format!("dim = {}", self.dim));
        line(format!("capacitance_convention = {}", self.capacitance_convention));
        if let Some(o) = &self.output {
            line(format!("output = {o}"));
        }
        match self.params {
            Params::Dimensionless(m) => {
                line("\n[model]".into());
                line(format!("omega_a = {}", m.omega_a));
                line(format!("g = {}", m.g));
                line(format!("theta = {}", m.theta));
            }
            Params::Circuit(c) => {
                line("\n[circuit]".into());
                line(format!("C_J = {}", c.c_j));
                line(format!("C_g = {}", c.c_g));
                line(format!("L = {}", c.l));
                line("energy_unit = joule".into());
                line(format!("E_J0 = {}", c.e_j0));
                line(format!("phi_x = {}", c.phi_x));
                match c.gate {
                    Gate::Charge(n) => line(format!("n_g = {n}")),
                    Gate::Voltage(v) => line(format!("V_g = {v}")),
                }
            }
        }
        line("\n[grid]".into());
        match self.grid.span {
            Span::TMax(t) => line(format!("t_max = {t}")),
            Span::Periods(n) => line(format!("periods = {n}")),
        }
        line(format!("samples = {}", self.grid.samples));
        if let Some(s) = &self.sweep {
            line("\n[sweep]".into());
            line(format!("parameter = {}", s.parameter));
            let v: Vec<String> = s.values.iter().map(|x| format!("{x}")).collect();
            line(format!("values = [{}]", v.join(", ")));
        }
        out
    }
}
