//! Sweep execution: turn a RunConfig into CSV rows plus a metadata sidecar,
//! resuming partial sweeps row-by-row. Also the built-in figure presets and
//! the regression anchors behind the `check` verb.

use crate::config::{serialize, ConfigError, RunConfig, SweepAxis};
use crate::dispersion::{derive_scales, CrystalConfig, Tuning};
use crate::mc::point_seed;
use crate::phasematch::{BandwidthLimits, Dimension, DEFAULT_ALPHA};
use crate::pump::PumpConfig;
use crate::schmidt::{
    pump_for_beta, schmidt_analytic, schmidt_mc, schmidt_npwpa_integral, Method, MismatchForm,
    ModelSpec, SchmidtError, SchmidtResult, VKernel,
};
use crate::McParams;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;
use thiserror::Error;

pub const CSV_HEADER: &str =
    "sweep_value,K,K_err,N_rel,B_rel,method,dimension,beta,npwpa_ok,seed,wall_ms";
const META_MARKER: &str = "# --- run metadata ---";

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(
        "output `{}` belongs to a different configuration; remove it or change output.path",
        path.display()
    )]
    OutputMismatch { path: PathBuf },
    #[error(transparent)]
    Schmidt(#[from] SchmidtError),
}

impl RunError {
    /// CLI exit code: 1 for validation problems, 2 for numerical failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) | RunError::Io { .. } | RunError::OutputMismatch { .. } => 1,
            RunError::Schmidt(e) => match e {
                SchmidtError::AnalyticNeedsQuadratic | SchmidtError::SpectralCutoffRequired => 1,
                _ => 2,
            },
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// The model evaluated at one sweep point.
pub fn point_spec(cfg: &RunConfig, value: f64) -> Result<ModelSpec, SchmidtError> {
    let (scales, _) = derive_scales(&cfg.crystal)?;
    let mut q_rel = cfg.q_max_rel;
    let mut o_rel = cfg.omega_max_rel;
    let mut pump = cfg.pump;
    match cfg.sweep_axis {
        SweepAxis::OmegaMaxRel => o_rel = value,
        SweepAxis::QMaxRel => q_rel = value,
        SweepAxis::BandwidthRel => {
            q_rel = value;
            o_rel = value;
        }
        SweepAxis::Beta => pump = pump_for_beta(value, &scales, cfg.pump.gain),
    }
    let limits = BandwidthLimits::new(q_rel * scales.q0, o_rel * scales.omega0);
    Ok(ModelSpec {
        dim: cfg.dimension,
        crystal: cfg.crystal,
        form: cfg.phase_match,
        pump,
        limits,
        alpha: cfg.alpha,
        kernel: VKernel::Model,
    })
}

/// Evaluate sweep point `index` with its own derived seed.
pub fn evaluate_point(cfg: &RunConfig, index: usize) -> Result<SchmidtResult, SchmidtError> {
    let spec = point_spec(cfg, cfg.sweep_grid[index])?;
    match cfg.method {
        Method::McExact => schmidt_mc(
            &spec,
            &McParams {
                n_samples: cfg.samples,
                seed: point_seed(cfg.seed, index as u64),
                shards: cfg.shards,
            },
        ),
        Method::NpwpaIntegral => schmidt_npwpa_integral(&spec),
        Method::AnalyticBox => schmidt_analytic(&spec),
    }
}

fn opt_f64(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_row(sweep_value: f64, r: &SchmidtResult, wall_ms: u128) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{}",
        sweep_value,
        r.k,
        r.k_err,
        opt_f64(r.n_rel),
        opt_f64(r.b_rel),
        r.method,
        r.dim,
        r.npwpa.beta,
        r.npwpa.satisfied,
        r.seed.map(|s| s.to_string()).unwrap_or_default(),
        wall_ms
    )
}

/// The sidecar records the full config (authoritative for resume matching)
/// followed by version and approximation flags. Nothing in it varies between
/// runs of the same config.
fn sidecar_text(cfg: &RunConfig) -> String {
    let mut s = serialize(cfg);
    s.push_str(META_MARKER);
    s.push('\n');
    s.push_str(&format!("meta.version = {}\n", env!("CARGO_PKG_VERSION")));
    s.push_str(&format!(
        "meta.mismatch_model = {}\n",
        match cfg.phase_match {
            MismatchForm::Exact => "exact",
            MismatchForm::Quadratic => "quadratic",
        }
    ));
    s.push_str(&format!("meta.box_alpha = {}\n", cfg.alpha));
    if let Ok((scales, _)) = derive_scales(&cfg.crystal) {
        let report = crate::pump::npwpa_check(&cfg.pump, &scales);
        s.push_str(&format!("meta.npwpa_satisfied = {}\n", report.satisfied));
        s.push_str(&format!("meta.npwpa_marginal = {}\n", report.marginal));
        s.push_str(&format!("meta.pump_beta = {}\n", report.beta));
        if cfg.sweep_axis == SweepAxis::Beta {
            s.push_str("meta.note = beta sweep rebuilds the pump per point; npwpa flags above describe the base pump\n");
        }
    }
    s
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub csv_path: PathBuf,
    pub rows_written: usize,
    /// Rows already present from an earlier partial run.
    pub rows_skipped: usize,
}

/// Execute the sweep. A pre-existing output produced by the same config is
/// continued after its last complete row; anything else is refused.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome, RunError> {
    let csv_path = PathBuf::from(&cfg.output);
    let meta_path = PathBuf::from(format!("{}.meta", cfg.output));
    if let Some(parent) = csv_path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(io_err(&csv_path))?;
        }
    }

    let mut rows_done = 0usize;
    if csv_path.exists() {
        let meta = fs::read_to_string(&meta_path).map_err(io_err(&meta_path))?;
        let recorded = meta.split(META_MARKER).next().unwrap_or("");
        if recorded != serialize(cfg) {
            return Err(RunError::OutputMismatch { path: csv_path });
        }
        let mut existing = fs::read_to_string(&csv_path).map_err(io_err(&csv_path))?;
        // A row only counts once its newline hit the disk; drop any torn
        // final line from an interrupted run.
        if !existing.is_empty() && !existing.ends_with('\n') {
            let keep = existing.rfind('\n').map(|i| i + 1).unwrap_or(0);
            existing.truncate(keep);
            fs::write(&csv_path, &existing).map_err(io_err(&csv_path))?;
        }
        let mut lines = existing.lines();
        if lines.next() != Some(CSV_HEADER) {
            return Err(RunError::OutputMismatch { path: csv_path });
        }
        rows_done = lines.count();
        if rows_done > cfg.sweep_grid.len() {
            return Err(RunError::OutputMismatch { path: csv_path });
        }
    } else {
        fs::write(&meta_path, sidecar_text(cfg)).map_err(io_err(&meta_path))?;
        fs::write(&csv_path, format!("{CSV_HEADER}\n")).map_err(io_err(&csv_path))?;
    }

    let mut file = fs::OpenOptions::new()
        .append(true)
        .open(&csv_path)
        .map_err(io_err(&csv_path))?;
    let mut rows_written = 0usize;
    for index in rows_done..cfg.sweep_grid.len() {
        let started = Instant::now();
        let result = evaluate_point(cfg, index)?;
        let wall_ms = started.elapsed().as_millis();
        let row = csv_row(cfg.sweep_grid[index], &result, wall_ms);
        writeln!(file, "{row}").map_err(io_err(&csv_path))?;
        file.flush().map_err(io_err(&csv_path))?;
        rows_written += 1;
    }
    Ok(RunOutcome {
        csv_path,
        rows_written,
        rows_skipped: rows_done,
    })
}

pub const PRESET_NAMES: [&str; 6] = ["fig3a", "fig4", "fig5", "fig6", "fig7", "fig8"];

/// Built-in sweep configurations reproducing the reference figures: 4 mm BBO
/// pumped at 527 nm, sigma_p = 600 um, tau_p = 1 ps, gain 0.001.
pub fn preset(name: &str) -> Option<RunConfig> {
    let base = RunConfig {
        dimension: Dimension::Three,
        phase_match: MismatchForm::Quadratic,
        method: Method::McExact,
        alpha: DEFAULT_ALPHA,
        crystal: CrystalConfig::bbo_4mm_527(Tuning::CollinearMismatch(0.0)),
        pump: PumpConfig::new(600.0, 1000.0, 1e-3),
        q_max_rel: f64::INFINITY,
        omega_max_rel: 4.0,
        samples: 10_000_000,
        seed: 2001,
        shards: 8,
        sweep_axis: SweepAxis::OmegaMaxRel,
        sweep_grid: vec![0.5, 1.0, 2.0, 4.0],
        output: String::new(),
    };
    // sqrt(23.38): the ring radius of the non-collinear tuning, in q0 units.
    let ring = 23.38f64.sqrt();
    let noncollinear_grid = vec![0.5, 1.0, 2.0, 3.0, 4.0, ring, 6.0];
    let cfg = match name {
        // Collinear 3D Schmidt number vs the spectral cutoff.
        "fig3a" => RunConfig {
            output: "fig3a.csv".into(),
            ..base
        },
        // Collinear 3D vs pump focusing.
        "fig4" => RunConfig {
            omega_max_rel: 6.0,
            sweep_axis: SweepAxis::Beta,
            sweep_grid: vec![0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0],
            seed: 2002,
            output: "fig4.csv".into(),
            ..base
        },
        // 2D saturation vs the spatial cutoff.
        "fig5" => RunConfig {
            dimension: Dimension::Two,
            omega_max_rel: f64::INFINITY,
            sweep_axis: SweepAxis::QMaxRel,
            sweep_grid: vec![0.5, 1.0, 2.0, 3.0, 4.0, 6.0],
            samples: 4_000_000,
            seed: 2003,
            output: "fig5.csv".into(),
            ..base
        },
        // Non-collinear Schmidt number vs the spatial cutoff.
        "fig6" => RunConfig {
            crystal: CrystalConfig::bbo_4mm_527(Tuning::CollinearMismatch(23.38)),
            omega_max_rel: 2.0,
            sweep_axis: SweepAxis::QMaxRel,
            sweep_grid: noncollinear_grid.clone(),
            seed: 2004,
            output: "fig6.csv".into(),
            ..base
        },
        // Factorizability: joint-cutoff 3D curve on the closed-form path.
        "fig7" => RunConfig {
            method: Method::AnalyticBox,
            sweep_axis: SweepAxis::BandwidthRel,
            sweep_grid: vec![0.3, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0],
            samples: 1,
            seed: 2005,
            output: "fig7.csv".into(),
            ..base
        },
        // Non-collinear pair yield (N_rel column) vs the spatial cutoff.
        "fig8" => RunConfig {
            crystal: CrystalConfig::bbo_4mm_527(Tuning::CollinearMismatch(23.38)),
            omega_max_rel: 2.0,
            sweep_axis: SweepAxis::QMaxRel,
            sweep_grid: noncollinear_grid,
            samples: 4_000_000,
            seed: 2006,
            output: "fig8.csv".into(),
            ..base
        },
        _ => return None,
    };
    Some(cfg)
}

/// One regression anchor: a derived quantity and its accepted window.
#[derive(Debug, Clone)]
pub struct Anchor {
    pub name: &'static str,
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Anchor {
    pub fn pass(&self) -> bool {
        self.value >= self.lo && self.value <= self.hi
    }
}

/// Dispersion and pump anchors for the reference crystal (4 mm BBO, 527 nm,
/// collinear) and reference pump (600 um, 1 ps). Windows are the quoted
/// handbook/reference values with their stated tolerances.
pub fn anchor_report() -> Result<Vec<Anchor>, RunError> {
    let crystal = CrystalConfig::bbo_4mm_527(Tuning::CollinearMismatch(0.0));
    let (s, _) = derive_scales(&crystal).map_err(SchmidtError::from)?;
    let pump = PumpConfig::new(600.0, 1000.0, 1e-3);
    let report = crate::pump::npwpa_check(&pump, &s);
    Ok(vec![
        Anchor {
            name: "collinear angle [deg]",
            value: s.theta_p.to_degrees(),
            lo: 22.9341 * 0.999,
            hi: 22.9341 * 1.001,
        },
        Anchor {
            name: "q0 [rad/um]",
            value: s.q0,
            lo: 0.045,
            hi: 0.055,
        },
        Anchor {
            name: "omega0 [rad/s]",
            value: s.omega0_rad_per_s(),
            lo: 0.9 * 0.76e14,
            hi: 1.1 * 0.76e14,
        },
        Anchor {
            name: "tau_gvm [fs]",
            value: s.tau_gvm,
            lo: 0.85 * 500.0,
            hi: 1.15 * 500.0,
        },
        Anchor {
            name: "walkoff length [um]",
            value: s.l_walkoff,
            lo: 0.85 * 250.0,
            hi: 1.15 * 250.0,
        },
        Anchor {
            name: "pump temporal margin",
            value: report.temporal_margin,
            lo: crate::pump::NPWPA_FLOOR,
            hi: f64::INFINITY,
        },
        Anchor {
            name: "pump spatial margin",
            value: report.spatial_margin,
            lo: crate::pump::NPWPA_FLOOR,
            hi: f64::INFINITY,
        },
        Anchor {
            name: "pump beta",
            value: report.beta,
            lo: 0.0,
            hi: 1e-2,
        },
    ])
}
