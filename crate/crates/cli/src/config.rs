//! Run configuration: a single JSON document.
//!
//! Validation walks the parsed document by hand so that every problem is
//! reported in one pass, each tagged with the dotted path of the offending
//! field. Frequencies are either a bare number in rad/s or an object
//! `{"value": x, "unit": "rad/s" | "gamma31"}`; magnitudes are never used to
//! guess the unit.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use eit_qhe_core::{derive_rates, SystemParams};
use serde_json::{Map, Value};

/// Run mode, shared by the command line and the config file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Spectrum,
    SweepP,
    #[value(name = "sweep-2d")]
    Sweep2d,
    Verify,
    BrightnessProfile,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Spectrum => "spectrum",
            Mode::SweepP => "sweep-p",
            Mode::Sweep2d => "sweep-2d",
            Mode::Verify => "verify",
            Mode::BrightnessProfile => "brightness-profile",
        }
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            Mode::Spectrum,
            Mode::SweepP,
            Mode::Sweep2d,
            Mode::Verify,
            Mode::BrightnessProfile,
        ]
        .into_iter()
        .find(|m| m.name() == s)
        .ok_or_else(|| format!("unknown mode `{s}`"))
    }
}

/// Evenly spaced grid, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl LinearGrid {
    pub fn points(&self) -> Vec<f64> {
        let span = self.max - self.min;
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|k| {
                if k + 1 == self.count {
                    self.max
                } else {
                    self.min + span * k as f64 / last
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grids {
    /// Probe detunings in units of γ₃₁.
    pub detuning: LinearGrid,
    pub p: Vec<f64>,
    /// Control Rabi frequencies in units of γ₃₁.
    pub omega_c: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outputs {
    pub dir: PathBuf,
    pub csv: bool,
    pub json: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BrightnessOptions {
    /// Probe detuning in units of γ₃₁.
    pub delta: f64,
    pub z_tilde_max: Option<f64>,
    pub n_steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: SystemParams,
    /// γ₃₁ of `params`, used for every relative unit.
    pub gamma31: f64,
    pub grids: Grids,
    pub outputs: Outputs,
    pub mode: Option<Mode>,
    pub brightness: BrightnessOptions,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    /// Dotted path to the field, or `line L, column C` for syntax errors.
    pub location: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl ConfigErrors {
    pub fn iter(&self) -> impl Iterator<Item = &ConfigError> {
        self.0.iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Frequency {
    RadPerSecond(f64),
    Gamma31(f64),
}

impl Frequency {
    fn resolve(self, gamma31: f64) -> f64 {
        match self {
            Frequency::RadPerSecond(v) => v,
            Frequency::Gamma31(v) => v * gamma31,
        }
    }
}

#[derive(Default)]
struct Walker {
    errors: Vec<ConfigError>,
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

impl Walker {
    fn error(&mut self, location: impl Into<String>, message: impl Into<String>) {
        self.errors.push(ConfigError {
            location: location.into(),
            message: message.into(),
        });
    }

    fn object<'a>(&mut self, v: &'a Value, path: &str) -> Option<&'a Map<String, Value>> {
        match v.as_object() {
            Some(m) => Some(m),
            None => {
                self.error(path, "expected an object");
                None
            }
        }
    }

    fn known_keys(&mut self, m: &Map<String, Value>, path: &str, allowed: &[&str]) {
        for key in m.keys() {
            if !allowed.contains(&key.as_str()) {
                self.error(
                    join(path, key),
                    format!(
                        "unknown key `{key}` (expected one of: {})",
                        allowed.join(", ")
                    ),
                );
            }
        }
    }

    fn number_value(&mut self, v: &Value, path: &str) -> Option<f64> {
        match v.as_f64() {
            Some(x) if x.is_finite() => Some(x),
            _ => {
                self.error(path, format!("expected a finite number, found {v}"));
                None
            }
        }
    }

    fn number(
        &mut self,
        m: &Map<String, Value>,
        key: &str,
        path: &str,
        required: bool,
    ) -> Option<f64> {
        match m.get(key) {
            Some(v) => self.number_value(v, &join(path, key)),
            None => {
                if required {
                    self.error(join(path, key), format!("missing required field `{key}`"));
                }
                None
            }
        }
    }

    fn count(&mut self, m: &Map<String, Value>, key: &str, path: &str) -> Option<usize> {
        let at = join(path, key);
        match m.get(key) {
            None => {
                self.error(&at, format!("missing required field `{key}`"));
                None
            }
            Some(v) => match v.as_u64() {
                Some(n) if n >= 2 => Some(n as usize),
                Some(n) => {
                    self.error(&at, format!("count must be >= 2 (got {n})"));
                    None
                }
                None => {
                    self.error(&at, format!("expected a non-negative integer, found {v}"));
                    None
                }
            },
        }
    }

    fn boolean(&mut self, m: &Map<String, Value>, key: &str, path: &str, default: bool) -> bool {
        match m.get(key) {
            None => default,
            Some(Value::Bool(b)) => *b,
            Some(v) => {
                self.error(
                    join(path, key),
                    format!("expected true or false, found {v}"),
                );
                default
            }
        }
    }

    fn frequency(
        &mut self,
        m: &Map<String, Value>,
        key: &str,
        path: &str,
        required: bool,
        allow_relative: bool,
    ) -> Option<Frequency> {
        let at = join(path, key);
        let v = match m.get(key) {
            Some(v) => v,
            None => {
                if required {
                    self.error(&at, format!("missing required field `{key}`"));
                }
                return None;
            }
        };
        if v.is_number() {
            return self.number_value(v, &at).map(Frequency::RadPerSecond);
        }
        let obj = match v.as_object() {
            Some(o) => o,
            None => {
                self.error(
                    &at,
                    format!("expected a number or {{value, unit}}, found {v}"),
                );
                return None;
            }
        };
        self.known_keys(obj, &at, &["value", "unit"]);
        let value = self.number(obj, "value", &at, true);
        let unit = match obj.get("unit") {
            None => {
                self.error(join(&at, "unit"), "missing required field `unit`");
                None
            }
            Some(Value::String(s)) => Some(s.as_str()),
            Some(other) => {
                self.error(
                    join(&at, "unit"),
                    format!("expected a string, found {other}"),
                );
                None
            }
        };
        match (value, unit) {
            (Some(x), Some("rad/s")) => Some(Frequency::RadPerSecond(x)),
            (Some(x), Some("gamma31")) if allow_relative => Some(Frequency::Gamma31(x)),
            (_, Some("gamma31")) if !allow_relative => {
                self.error(
                    join(&at, "unit"),
                    "`gamma31` units are not allowed for this field",
                );
                None
            }
            (_, Some(u)) if u != "rad/s" && u != "gamma31" => {
                self.error(
                    join(&at, "unit"),
                    format!("unknown unit `{u}` (expected `rad/s` or `gamma31`)"),
                );
                None
            }
            _ => None,
        }
    }

    fn range(
        &mut self,
        value: Option<f64>,
        path: &str,
        lo: f64,
        hi: Option<f64>,
        inclusive_lo: bool,
    ) {
        let Some(v) = value else { return };
        let ok_lo = if inclusive_lo { v >= lo } else { v > lo };
        let ok_hi = hi.is_none_or(|h| v <= h);
        if !(ok_lo && ok_hi) {
            let name = path.rsplit('.').next().unwrap_or(path);
            let msg = match hi {
                Some(h) => format!("{name} out of [{lo},{h}] (got {v})"),
                None if inclusive_lo => format!("{name} must be >= {lo} (got {v})"),
                None => format!("{name} must be > {lo} (got {v})"),
            };
            self.error(path, msg);
        }
    }

    fn linear_grid(&mut self, v: &Value, path: &str) -> Option<LinearGrid> {
        let m = self.object(v, path)?;
        self.known_keys(m, path, &["min", "max", "count"]);
        let min = self.number(m, "min", path, true);
        let max = self.number(m, "max", path, true);
        let count = self.count(m, "count", path);
        match (min, max, count) {
            (Some(min), Some(max), Some(count)) => {
                if max <= min {
                    self.error(path, format!("max ({max}) must exceed min ({min})"));
                    None
                } else {
                    Some(LinearGrid { min, max, count })
                }
            }
            _ => None,
        }
    }

    fn number_list(&mut self, v: &Value, path: &str) -> Option<Vec<f64>> {
        let items = match v.as_array() {
            Some(a) if !a.is_empty() => a,
            Some(_) => {
                self.error(path, "list must not be empty");
                return None;
            }
            None => {
                self.error(path, format!("expected a list of numbers, found {v}"));
                return None;
            }
        };
        let mut out = Vec::with_capacity(items.len());
        let mut ok = true;
        for (k, item) in items.iter().enumerate() {
            match self.number_value(item, &format!("{path}[{k}]")) {
                Some(x) => out.push(x),
                None => ok = false,
            }
        }
        ok.then_some(out)
    }
}

const TOP_KEYS: &[&str] = &["mode", "params", "grids", "outputs", "brightness"];
const PARAM_KEYS: &[&str] = &[
    "gamma31",
    "gamma32",
    "omega13",
    "omega12",
    "T13",
    "T23",
    "p",
    "OmegaC",
    "g",
    "couplingDetuning",
];

/// Default detuning grid: ±3 γ₃₁ in steps of 0.01 γ₃₁.
pub const DEFAULT_DETUNING: LinearGrid = LinearGrid {
    min: -3.0,
    max: 3.0,
    count: 601,
};

/// Ratio `Ωc / g` used when `g` is omitted.
pub const DEFAULT_CONTROL_TO_PROBE: f64 = 20.0;

/// Parses and validates a configuration document, reporting every problem.
pub fn validate_config(raw: &str) -> Result<RunConfig, ConfigErrors> {
    let doc: Value = serde_json::from_str(raw).map_err(|e| {
        ConfigErrors(vec![ConfigError {
            location: format!("line {}, column {}", e.line(), e.column()),
            message: e.to_string(),
        }])
    })?;
    let mut w = Walker::default();
    let Some(top) = w.object(&doc, "<root>") else {
        return Err(ConfigErrors(w.errors));
    };
    w.known_keys(top, "", TOP_KEYS);

    let mode = match top.get("mode") {
        None => None,
        Some(Value::String(s)) => match s.parse::<Mode>() {
            Ok(m) => Some(m),
            Err(e) => {
                w.error("mode", e);
                None
            }
        },
        Some(v) => {
            w.error("mode", format!("expected a string, found {v}"));
            None
        }
    };

    let params = match top.get("params") {
        Some(v) => parse_params(&mut w, v),
        None => {
            w.error("params", "missing required field `params`");
            None
        }
    };

    let grids_raw = top.get("grids").and_then(|v| w.object(v, "grids"));
    if let Some(g) = grids_raw {
        w.known_keys(g, "grids", &["detuning", "p", "OmegaC"]);
    }
    let detuning = grids_raw
        .and_then(|g| g.get("detuning"))
        .map(|v| w.linear_grid(v, "grids.detuning"))
        .unwrap_or(Some(DEFAULT_DETUNING));
    let p_list = grids_raw.and_then(|g| g.get("p")).map(|v| {
        let list = w.number_list(v, "grids.p");
        if let Some(list) = &list {
            for (k, &p) in list.iter().enumerate() {
                w.range(Some(p), &format!("grids.p[{k}]"), 0.0, Some(1.0), true);
            }
        }
        list
    });
    let omega_list = grids_raw.and_then(|g| g.get("OmegaC")).map(|v| {
        let path = "grids.OmegaC";
        let list = if v.is_array() {
            w.number_list(v, path)
        } else {
            w.linear_grid(v, path).map(|g| g.points())
        };
        if let Some(list) = &list {
            for (k, &o) in list.iter().enumerate() {
                w.range(Some(o), &format!("{path}[{k}]"), 0.0, None, false);
            }
        }
        list
    });

    let outputs = match top.get("outputs") {
        None => Some(Outputs {
            dir: PathBuf::from("out"),
            csv: true,
            json: false,
        }),
        Some(v) => w.object(v, "outputs").and_then(|m| {
            w.known_keys(m, "outputs", &["dir", "csv", "json"]);
            let dir = match m.get("dir") {
                None => Some(PathBuf::from("out")),
                Some(Value::String(s)) if !s.is_empty() => Some(PathBuf::from(s)),
                Some(other) => {
                    w.error(
                        "outputs.dir",
                        format!("expected a non-empty path, found {other}"),
                    );
                    None
                }
            };
            let csv = w.boolean(m, "csv", "outputs", true);
            let json = w.boolean(m, "json", "outputs", false);
            dir.map(|dir| Outputs { dir, csv, json })
        }),
    };

    let brightness = match top.get("brightness") {
        None => Some(BrightnessOptions {
            delta: 0.0,
            z_tilde_max: None,
            n_steps: eit_qhe_core::brightness::DEFAULT_STEPS,
        }),
        Some(v) => w.object(v, "brightness").and_then(|m| {
            w.known_keys(m, "brightness", &["delta", "zTildeMax", "nSteps"]);
            let delta = w.number(m, "delta", "brightness", false).unwrap_or(0.0);
            let z = w.number(m, "zTildeMax", "brightness", false);
            w.range(z, "brightness.zTildeMax", 0.0, None, false);
            let steps = match m.get("nSteps") {
                None => Some(eit_qhe_core::brightness::DEFAULT_STEPS),
                Some(v) => match v.as_u64() {
                    Some(n) if n >= 10 => Some(n as usize),
                    _ => {
                        w.error(
                            "brightness.nSteps",
                            format!("expected an integer >= 10, found {v}"),
                        );
                        None
                    }
                },
            };
            steps.map(|n_steps| BrightnessOptions {
                delta,
                z_tilde_max: z,
                n_steps,
            })
        }),
    };

    if !w.errors.is_empty() {
        return Err(ConfigErrors(w.errors));
    }
    let (params, gamma31) = params.expect("no errors implies params parsed");
    let grids = Grids {
        detuning: detuning.expect("validated"),
        p: p_list.flatten().unwrap_or_else(|| vec![params.p]),
        omega_c: omega_list
            .flatten()
            .unwrap_or_else(|| vec![params.omega_c / gamma31]),
    };
    Ok(RunConfig {
        params,
        gamma31,
        grids,
        outputs: outputs.expect("validated"),
        mode,
        brightness: brightness.expect("validated"),
    })
}

fn parse_params(w: &mut Walker, v: &Value) -> Option<(SystemParams, f64)> {
    let m = w.object(v, "params")?;
    let path = "params";
    w.known_keys(m, path, PARAM_KEYS);
    let decay31 = w.frequency(m, "gamma31", path, true, false);
    let decay32 = w.frequency(m, "gamma32", path, true, false);
    let omega13 = w.frequency(m, "omega13", path, true, false);
    let omega12 = w.frequency(m, "omega12", path, true, false);
    let t13 = w.number(m, "T13", path, true);
    let t23 = w.number(m, "T23", path, true);
    let p = w.number(m, "p", path, true);
    let omega_c = w.frequency(m, "OmegaC", path, true, true);
    let g = w.frequency(m, "g", path, false, true);
    let detuning = w.frequency(m, "couplingDetuning", path, false, true);

    let abs = |f: Option<Frequency>| f.map(|f| f.resolve(f64::NAN));
    let (decay31, decay32, omega13, omega12) =
        (abs(decay31), abs(decay32), abs(omega13), abs(omega12));
    w.range(decay31, "params.gamma31", 0.0, None, false);
    w.range(decay32, "params.gamma32", 0.0, None, false);
    w.range(omega12, "params.omega12", 0.0, None, false);
    w.range(omega13, "params.omega13", 0.0, None, false);
    if let (Some(o13), Some(o12)) = (omega13, omega12) {
        if o13 <= o12 {
            w.error(
                "params.omega13",
                format!("omega13 ({o13}) must exceed omega12 ({o12})"),
            );
        }
    }
    w.range(t13, "params.T13", 0.0, None, true);
    w.range(t23, "params.T23", 0.0, None, true);
    w.range(p, "params.p", 0.0, Some(1.0), true);

    let base = SystemParams {
        decay31: decay31?,
        decay32: decay32?,
        omega13: omega13?,
        omega12: omega12?,
        t13: t13?,
        t23: t23?,
        p: p?,
        omega_c: 1.0,
        g: 0.0,
        coupling_detuning: 0.0,
    };
    let gamma31 = derive_rates(&base).ok()?.dephasing31;
    let omega_c = omega_c?.resolve(gamma31);
    w.range(Some(omega_c), "params.OmegaC", 0.0, None, false);
    let g = g.map_or(omega_c / DEFAULT_CONTROL_TO_PROBE, |f| f.resolve(gamma31));
    w.range(Some(g), "params.g", 0.0, None, true);
    let coupling_detuning = detuning.map_or(0.0, |f| f.resolve(gamma31));
    Some((
        SystemParams {
            omega_c,
            g,
            coupling_detuning,
            ..base
        },
        gamma31,
    ))
}
