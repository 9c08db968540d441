//! Line-oriented run configuration: one `section.key = value` per line,
//! `#` comments, units carried in the key names (pump.sigma_um, pump.tau_fs).
//! Parsing collects every problem before reporting so a config file is fixed
//! in one pass, and serialize/parse round-trip field-for-field.

use crate::dispersion::{CrystalConfig, Tuning};
use crate::phasematch::{Dimension, DEFAULT_ALPHA};
use crate::pump::PumpConfig;
use crate::schmidt::{Method, MismatchForm};
use crate::sellmeier::SellmeierSet;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("configuration invalid:\n  {}", .0.join("\n  "))]
    Invalid(Vec<String>),
}

/// Which model parameter the sweep grid drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// limits.omega_max_rel per point.
    OmegaMaxRel,
    /// limits.q_max_rel per point.
    QMaxRel,
    /// Both cutoffs jointly (q_max_rel = omega_max_rel = value).
    BandwidthRel,
    /// Pump focusing parameter; the pump is rebuilt per point with the
    /// focusing split equally between space and time.
    Beta,
}

impl SweepAxis {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepAxis::OmegaMaxRel => "omega_max_rel",
            SweepAxis::QMaxRel => "q_max_rel",
            SweepAxis::BandwidthRel => "bandwidth_rel",
            SweepAxis::Beta => "beta",
        }
    }

    fn from_str(s: &str) -> Option<Self> {
        match s {
            "omega_max_rel" => Some(SweepAxis::OmegaMaxRel),
            "q_max_rel" => Some(SweepAxis::QMaxRel),
            "bandwidth_rel" => Some(SweepAxis::BandwidthRel),
            "beta" => Some(SweepAxis::Beta),
            _ => None,
        }
    }
}

/// Everything a `run` needs: the model, the sampling budget, the sweep and
/// the output location. Cutoffs are in units of q0 / omega0 so configs stay
/// meaningful across crystal tunings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dimension: Dimension,
    pub phase_match: MismatchForm,
    pub method: Method,
    pub alpha: f64,
    pub crystal: CrystalConfig,
    pub pump: PumpConfig,
    pub q_max_rel: f64,
    pub omega_max_rel: f64,
    pub samples: u64,
    pub seed: u64,
    pub shards: u32,
    pub sweep_axis: SweepAxis,
    pub sweep_grid: Vec<f64>,
    pub output: String,
}

fn dimension_str(d: Dimension) -> &'static str {
    match d {
        Dimension::One => "1d",
        Dimension::Two => "2d",
        Dimension::Three => "3d",
    }
}

fn method_str(m: Method) -> &'static str {
    match m {
        Method::McExact => "mc_exact",
        Method::NpwpaIntegral => "npwpa_integral",
        Method::AnalyticBox => "analytic_box",
    }
}

pub fn serialize(cfg: &RunConfig) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "model.dimension = {}", dimension_str(cfg.dimension));
    let _ = writeln!(
        s,
        "model.phase_match = {}",
        match cfg.phase_match {
            MismatchForm::Exact => "exact",
            MismatchForm::Quadratic => "quadratic",
        }
    );
    let _ = writeln!(s, "model.method = {}", method_str(cfg.method));
    let _ = writeln!(s, "model.alpha = {}", cfg.alpha);
    s.push('\n');
    let _ = writeln!(s, "crystal.length_mm = {}", cfg.crystal.length_mm);
    let _ = writeln!(s, "crystal.lambda_p_nm = {}", cfg.crystal.lambda_p_nm);
    let _ = writeln!(s, "crystal.sellmeier = {}", cfg.crystal.sellmeier.name);
    match cfg.crystal.tuning {
        Tuning::AngleDeg(v) => {
            let _ = writeln!(s, "crystal.theta_deg = {v}");
        }
        Tuning::CollinearMismatch(v) => {
            let _ = writeln!(s, "crystal.delta0_lc = {v}");
        }
    }
    s.push('\n');
    let _ = writeln!(s, "pump.sigma_um = {}", cfg.pump.sigma_um);
    let _ = writeln!(s, "pump.tau_fs = {}", cfg.pump.tau_fs);
    let _ = writeln!(s, "pump.gain = {}", cfg.pump.gain);
    s.push('\n');
    let _ = writeln!(s, "limits.q_max_rel = {}", cfg.q_max_rel);
    let _ = writeln!(s, "limits.omega_max_rel = {}", cfg.omega_max_rel);
    s.push('\n');
    let _ = writeln!(s, "mc.samples = {}", cfg.samples);
    let _ = writeln!(s, "mc.seed = {}", cfg.seed);
    let _ = writeln!(s, "mc.shards = {}", cfg.shards);
    s.push('\n');
    let _ = writeln!(s, "sweep.axis = {}", cfg.sweep_axis.as_str());
    let grid: Vec<String> = cfg.sweep_grid.iter().map(|v| v.to_string()).collect();
    let _ = writeln!(s, "sweep.grid = {}", grid.join(", "));
    s.push('\n');
    let _ = writeln!(s, "output.path = {}", cfg.output);
    s
}

/// Raw `key -> (value, line)` map plus the error accumulator.
struct Fields {
    map: BTreeMap<String, (String, usize)>,
    errors: Vec<String>,
}

impl Fields {
    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        self.map.remove(key)
    }

    fn required(&mut self, key: &str) -> Option<(String, usize)> {
        let got = self.take(key);
        if got.is_none() {
            self.errors.push(format!("missing required key `{key}`"));
        }
        got
    }

    fn f64_opt(&mut self, key: &str) -> Option<f64> {
        let (raw, line) = self.take(key)?;
        self.parse_f64(key, &raw, line)
    }

    fn f64_req(&mut self, key: &str) -> Option<f64> {
        let (raw, line) = self.required(key)?;
        self.parse_f64(key, &raw, line)
    }

    fn parse_f64(&mut self, key: &str, raw: &str, line: usize) -> Option<f64> {
        match raw.parse::<f64>() {
            Ok(v) if !v.is_nan() => Some(v),
            _ => {
                self.errors.push(format!(
                    "key `{key}` (line {line}): `{raw}` is not a number"
                ));
                None
            }
        }
    }

    fn int_req<T: std::str::FromStr>(&mut self, key: &str) -> Option<T> {
        let (raw, line) = self.required(key)?;
        match raw.parse::<T>() {
            Ok(v) => Some(v),
            Err(_) => {
                self.errors.push(format!(
                    "key `{key}` (line {line}): `{raw}` is not a non-negative integer"
                ));
                None
            }
        }
    }

    fn enum_req<T>(
        &mut self,
        key: &str,
        parse: impl Fn(&str) -> Option<T>,
        allowed: &str,
    ) -> Option<T> {
        let (raw, line) = self.required(key)?;
        match parse(&raw) {
            Some(v) => Some(v),
            None => {
                self.errors.push(format!(
                    "key `{key}` (line {line}): `{raw}` is not one of {allowed}"
                ));
                None
            }
        }
    }

    fn check_positive(&mut self, key: &str, v: Option<f64>) -> Option<f64> {
        match v {
            Some(x) if x > 0.0 && x.is_finite() => Some(x),
            Some(x) => {
                self.errors
                    .push(format!("key `{key}`: must be finite and positive, got {x}"));
                None
            }
            None => None,
        }
    }
}

pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
    let mut fields = Fields {
        map: BTreeMap::new(),
        errors: Vec::new(),
    };
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            fields.errors.push(format!(
                "line {line_no}: expected `section.key = value`, got `{line}`"
            ));
            continue;
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if !key.contains('.') {
            fields
                .errors
                .push(format!("line {line_no}: key `{key}` has no section prefix"));
            continue;
        }
        if let Some((_, first)) = fields.map.get(&key) {
            let first = *first;
            fields.errors.push(format!(
                "line {line_no}: duplicate key `{key}` (first set on line {first})"
            ));
            continue;
        }
        fields.map.insert(key, (value, line_no));
    }

    let dimension = fields.enum_req(
        "model.dimension",
        |s| match s {
            "1d" => Some(Dimension::One),
            "2d" => Some(Dimension::Two),
            "3d" => Some(Dimension::Three),
            _ => None,
        },
        "1d, 2d, 3d",
    );
    let phase_match = fields.enum_req(
        "model.phase_match",
        |s| match s {
            "exact" => Some(MismatchForm::Exact),
            "quadratic" => Some(MismatchForm::Quadratic),
            _ => None,
        },
        "exact, quadratic",
    );
    let method = fields.enum_req(
        "model.method",
        |s| match s {
            "mc_exact" => Some(Method::McExact),
            "npwpa_integral" => Some(Method::NpwpaIntegral),
            "analytic_box" => Some(Method::AnalyticBox),
            _ => None,
        },
        "mc_exact, npwpa_integral, analytic_box",
    );
    let alpha = fields.f64_opt("model.alpha");
    let alpha = fields
        .check_positive("model.alpha", alpha.or(Some(DEFAULT_ALPHA)));

    let length_mm = fields.f64_opt("crystal.length_mm");
    let length_mm = fields.check_positive("crystal.length_mm", length_mm.or(Some(4.0)));
    let lambda_p_nm = fields.f64_opt("crystal.lambda_p_nm");
    let lambda_p_nm =
        fields.check_positive("crystal.lambda_p_nm", lambda_p_nm.or(Some(527.0)));
    let sellmeier = match fields.take("crystal.sellmeier") {
        None => Some(crate::sellmeier::KATO),
        Some((raw, line)) => match SellmeierSet::by_name(&raw) {
            Some(s) => Some(s),
            None => {
                fields.errors.push(format!(
                    "key `crystal.sellmeier` (line {line}): `{raw}` is not one of kato, eimerl"
                ));
                None
            }
        },
    };
    let theta = fields.f64_opt("crystal.theta_deg");
    let d0lc = fields.f64_opt("crystal.delta0_lc");
    let tuning = match (theta, d0lc) {
        (Some(_), Some(_)) => {
            fields.errors.push(
                "keys `crystal.theta_deg` and `crystal.delta0_lc` are mutually exclusive"
                    .to_string(),
            );
            None
        }
        (Some(t), None) => Some(Tuning::AngleDeg(t)),
        (None, Some(d)) => Some(Tuning::CollinearMismatch(d)),
        (None, None) => Some(Tuning::CollinearMismatch(0.0)),
    };

    let sigma = fields.f64_req("pump.sigma_um");
    let sigma = fields.check_positive("pump.sigma_um", sigma);
    let tau = fields.f64_req("pump.tau_fs");
    let tau = fields.check_positive("pump.tau_fs", tau);
    let gain = fields.f64_req("pump.gain");
    let gain = fields.check_positive("pump.gain", gain);

    // The limits accept `inf`: an unbounded cutoff is replaced downstream by
    // a covering surrogate (spatial) or refused by the MC path (spectral).
    let q_max_rel = fields.f64_req("limits.q_max_rel").and_then(|v| {
        if v >= 0.0 {
            Some(v)
        } else {
            fields
                .errors
                .push(format!("key `limits.q_max_rel`: must be >= 0, got {v}"));
            None
        }
    });
    let omega_max_rel = fields.f64_req("limits.omega_max_rel").and_then(|v| {
        if v >= 0.0 {
            Some(v)
        } else {
            fields
                .errors
                .push(format!("key `limits.omega_max_rel`: must be >= 0, got {v}"));
            None
        }
    });

    let samples: Option<u64> = fields.int_req("mc.samples");
    let seed: Option<u64> = fields.int_req("mc.seed");
    let shards: Option<u32> = fields.int_req("mc.shards");
    if let Some(0) = shards {
        fields
            .errors
            .push("key `mc.shards`: must be at least 1".to_string());
    }

    let sweep_axis = fields.enum_req(
        "sweep.axis",
        SweepAxis::from_str,
        "omega_max_rel, q_max_rel, bandwidth_rel, beta",
    );
    let sweep_grid = match fields.required("sweep.grid") {
        None => None,
        Some((raw, line)) => {
            let mut grid = Vec::new();
            let mut ok = true;
            for part in raw.split(',') {
                match part.trim().parse::<f64>() {
                    Ok(v) if v.is_finite() && v > 0.0 => grid.push(v),
                    _ => {
                        fields.errors.push(format!(
                            "key `sweep.grid` (line {line}): `{}` is not a positive number",
                            part.trim()
                        ));
                        ok = false;
                    }
                }
            }
            if grid.is_empty() && ok {
                fields
                    .errors
                    .push(format!("key `sweep.grid` (line {line}): grid is empty"));
                ok = false;
            }
            ok.then_some(grid)
        }
    };

    let output = match fields.required("output.path") {
        Some((raw, line)) => {
            if raw.is_empty() {
                fields
                    .errors
                    .push(format!("key `output.path` (line {line}): path is empty"));
                None
            } else {
                Some(raw)
            }
        }
        None => None,
    };

    // Everything still in the map is unknown; report each one.
    let leftovers: Vec<(String, (String, usize))> =
        std::mem::take(&mut fields.map).into_iter().collect();
    for (key, (_, line)) in leftovers {
        fields.errors.push(format!("unknown key `{key}` (line {line})"));
    }

    if !fields.errors.is_empty() {
        return Err(ConfigError::Invalid(fields.errors));
    }

    // All Nones are gone once errors is empty.
    Ok(RunConfig {
        dimension: dimension.unwrap(),
        phase_match: phase_match.unwrap(),
        method: method.unwrap(),
        alpha: alpha.unwrap(),
        crystal: CrystalConfig {
            length_mm: length_mm.unwrap(),
            lambda_p_nm: lambda_p_nm.unwrap(),
            tuning: tuning.unwrap(),
            sellmeier: sellmeier.unwrap(),
        },
        pump: PumpConfig::new(sigma.unwrap(), tau.unwrap(), gain.unwrap()),
        q_max_rel: q_max_rel.unwrap(),
        omega_max_rel: omega_max_rel.unwrap(),
        samples: samples.unwrap(),
        seed: seed.unwrap(),
        shards: shards.unwrap(),
        sweep_axis: sweep_axis.unwrap(),
        sweep_grid: sweep_grid.unwrap(),
        output: output.unwrap(),
    })
}
