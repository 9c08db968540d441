//! Acceptance checklist A1-A10. Each test prints one `[PASS]`/`[FAIL]` line
//! (visible with `--nocapture`, and in the failure report otherwise) and then
//! asserts, so the suite doubles as a readable go/no-go report.
//!
//! Known honest failures, kept failing rather than widened:
//! * A1: the derived group-velocity-mismatch time is ~352 fs; the pinned
//!   reference window is 500 fs +/- 15%. Every companion scale (angle, q0,
//!   omega0, walk-off) derived from the same Sellmeier set passes.
//! * A7 first clause: at beta = 0.01 the equal-split pump (sigma_p = 127 um,
//!   tau_p = 262 fs) is outside the nearly-plane-wave regime (margins 0.57
//!   and 0.74 against a floor of 1.5), and the exact K sits well above the
//!   factorized curve there.
//! * A7 third clause: under the equal split the pump transverse width at
//!   beta = 10 is only beta^(1/4) = 1.78 q0, still short of the focused
//!   regime, and the measured curve keeps falling through beta = 20 at both
//!   collection windows tried (1e8 samples/point at omega_max = 6 omega0;
//!   the error bars are ~1.5%). The upturn exists only past the reach of a
//!   grid capped at beta = 10.
//! * A8 first clause: the non-collinear ring at q_max = sqrt(delta0_lc)
//!   always phase-matches more modes than the axial disk at q_max = 1, so
//!   K(1) > K(ring) does not hold (the pair-yield clause does, by ~30x).

use pdc_schmidt::dispersion::{derive_scales, CrystalConfig, Tuning};
use pdc_schmidt::mc::McParams;
use pdc_schmidt::oracle::{grid_schmidt, AmplitudeGrid};
use pdc_schmidt::phasematch::{
    pm_volume, pm_volume_quartic, BandwidthLimits, Dimension, SpectralPoint, Surrogate,
    DEFAULT_ALPHA,
};
use pdc_schmidt::pump::PumpConfig;
use pdc_schmidt::quad;
use pdc_schmidt::run::anchor_report;
use pdc_schmidt::schmidt::{
    analytic_box_k, beta_sweep, estimate_b, estimate_n, factorizability_gap, schmidt_analytic,
    schmidt_mc, schmidt_npwpa_integral, MismatchForm, ModelSpec, VKernel,
};
use std::f64::consts::PI;

fn verdict(num: u32, name: &str, ok: bool, detail: &str) {
    let status = if ok { "PASS" } else { "FAIL" };
    println!("[{status}] A{num} {name}: {detail}");
    assert!(ok, "A{num} {name}: {detail}");
}

fn bbo(d0lc: f64) -> CrystalConfig {
    CrystalConfig::bbo_4mm_527(Tuning::CollinearMismatch(d0lc))
}

fn reference_pump() -> PumpConfig {
    PumpConfig::new(600.0, 1000.0, 1e-3)
}

/// Collinear quadratic-model spec with cutoffs in units of (q0, omega0).
fn collinear_spec(dim: Dimension, qbar: f64, obar: f64) -> ModelSpec {
    let (s, _) = derive_scales(&bbo(0.0)).unwrap();
    ModelSpec::new(
        dim,
        bbo(0.0),
        MismatchForm::Quadratic,
        reference_pump(),
        BandwidthLimits::new(qbar * s.q0, obar * s.omega0),
    )
}

#[test]
fn a01_dispersion_anchors() {
    let anchors = anchor_report().unwrap();
    // The five crystal-derived anchors; the pump-margin anchors are covered
    // by the npwpa tests and A7.
    let names = [
        "collinear angle [deg]",
        "q0 [rad/um]",
        "omega0 [rad/s]",
        "tau_gvm [fs]",
        "walkoff length [um]",
    ];
    let mut failed = Vec::new();
    let mut report = String::new();
    for name in names {
        let a = anchors.iter().find(|a| a.name == name).unwrap();
        if !a.pass() {
            failed.push(format!("{} = {:.4e} outside [{:.3e}, {:.3e}]", a.name, a.value, a.lo, a.hi));
        }
        report.push_str(&format!("{} = {:.4e}; ", a.name, a.value));
    }
    let ok = failed.is_empty();
    let detail = if ok { report } else { failed.join("; ") };
    verdict(1, "dispersion anchors", ok, &detail);
}

#[test]
fn a02_box_function_constants() {
    let sinc2 = |x: f64| {
        let s = quad::sinc(x);
        s * s
    };
    let i2 = quad::integrate(&sinc2, -400.0, 400.0, 1e-10).unwrap();
    let i4 = quad::integrate(&|x| sinc2(x) * sinc2(x), -60.0, 60.0, 1e-10).unwrap();
    // The adaptive quadrature must agree with the closed-form antiderivatives.
    assert!((i2 - 2.0 * quad::int_sinc2(400.0)).abs() < 1e-9 * i2);
    assert!((i4 - 2.0 * quad::int_sinc4(60.0)).abs() < 1e-9 * i4);
    let ok2 = (i2 / PI - 1.0).abs() < 0.01;
    let ok4 = (i4 / (2.0 * PI / 3.0) - 1.0).abs() < 0.01;

    // Quadrature ratio of the gain volumes over a broad collinear region.
    let p = collinear_spec(Dimension::Three, 7.0, 7.0).prepare().unwrap();
    let v2 = pm_volume(&p.pm, p.dim, &p.limits, Surrogate::Sinc2).unwrap();
    let v4 = pm_volume_quartic(&p.pm, p.dim, &p.limits).unwrap();
    let ratio = v2 / v4;
    let ok_ratio = (1.35..=1.65).contains(&ratio);

    verdict(
        2,
        "box-function constants",
        ok2 && ok4 && ok_ratio,
        &format!(
            "int sinc^2 = {i2:.6} (pi {}1%), int sinc^4 = {i4:.6} (2pi/3 {}1%), volume ratio = {ratio:.4} in [1.35, 1.65]",
            if ok2 { "within " } else { "OFF by >" },
            if ok4 { "within " } else { "OFF by >" },
        ),
    );
}

#[test]
fn a03_branch_continuity() {
    let (s, _) = derive_scales(&bbo(0.0)).unwrap();
    let pump = reference_pump();
    let alpha = DEFAULT_ALPHA;
    let coeffs = collinear_spec(Dimension::Three, 1.0, 1.0)
        .prepare()
        .unwrap()
        .coeffs;
    // K as a function of the cutoff that carries the sqrt(alpha) breakpoint,
    // the other cutoff held wide as in the printed branch pair.
    let k_1d = |obar: f64| {
        analytic_box_k(
            &pump,
            &coeffs,
            Dimension::One,
            &BandwidthLimits::new(f64::INFINITY, obar * s.omega0),
            alpha,
        )
    };
    let k_2d = |qbar: f64| {
        analytic_box_k(
            &pump,
            &coeffs,
            Dimension::Two,
            &BandwidthLimits::new(qbar * s.q0, f64::INFINITY),
            alpha,
        )
    };
    let k_3d = |obar: f64| {
        analytic_box_k(
            &pump,
            &coeffs,
            Dimension::Three,
            &BandwidthLimits::new(60.0 * s.q0, obar * s.omega0),
            alpha,
        )
    };
    let br = alpha.sqrt();
    let mut worst = 0.0f64;
    for k in [&k_1d as &dyn Fn(f64) -> f64, &k_2d, &k_3d] {
        let below = k(f64::next_down(br));
        let above = k(f64::next_up(br));
        worst = worst.max((below - above).abs() / above.abs());
    }
    verdict(
        3,
        "branch continuity",
        worst < 1e-12,
        &format!("worst relative jump at the sqrt(alpha) breakpoints = {worst:.3e}"),
    );
}

#[test]
fn a04_mc_vs_analytic_collinear_curve() {
    // 3D collinear quadratic model at the reference pump, swept over the
    // spectral cutoff with no spatial cutoff. The exact Monte Carlo and the
    // box formula must agree within max(15%, 3 sigma) pointwise.
    let params_n = McParams {
        n_samples: 2_000_000,
        seed: 4004,
        shards: 8,
    };
    let params_b = McParams {
        n_samples: 10_000_000,
        ..params_n
    };
    let mut ok = true;
    let mut detail = String::new();
    for obar in [0.5, 1.0, 2.0, 4.0] {
        let spec = collinear_spec(Dimension::Three, f64::INFINITY, obar);
        let k_box = schmidt_analytic(&spec).unwrap().k;
        let n = estimate_n(&spec, &params_n).unwrap();
        let (b, _) = estimate_b(&spec, &params_b).unwrap();
        let k = n.value * n.value / b.value;
        let k_err = k * (2.0 * n.rel_err()).hypot(b.rel_err());
        let tol = (0.15 * k_box).max(3.0 * k_err);
        let point_ok = (k - k_box).abs() <= tol;
        ok &= point_ok;
        detail.push_str(&format!(
            "obar {obar}: mc {k:.1}+/-{k_err:.1} vs box {k_box:.1} ({:+.1}%){}; ",
            100.0 * (k / k_box - 1.0),
            if point_ok { "" } else { " OFF" },
        ));
    }
    verdict(4, "collinear curve mc vs analytic", ok, &detail);
}

#[test]
fn a05_saturation_plateaus() {
    let (s, _) = derive_scales(&bbo(0.0)).unwrap();
    let pump = reference_pump();
    let mut ok = true;
    let mut detail = String::new();

    // 2D plateau: (3/8) pi sigma^2 q0^2 for q_max >= 3 q0.
    let k2_sat = 3.0 / 8.0 * PI * pump.sigma_um * pump.sigma_um * s.q0 * s.q0;
    for qbar in [3.0, 4.5] {
        let spec = collinear_spec(Dimension::Two, qbar, f64::INFINITY);
        let n = estimate_n(
            &spec,
            &McParams {
                n_samples: 2_000_000,
                seed: 4005,
                shards: 8,
            },
        )
        .unwrap();
        let (b, _) = estimate_b(
            &spec,
            &McParams {
                n_samples: 8_000_000,
                seed: 4006,
                shards: 8,
            },
        )
        .unwrap();
        let k = n.value * n.value / b.value;
        let point_ok = (k / k2_sat - 1.0).abs() < 0.15;
        ok &= point_ok;
        detail.push_str(&format!(
            "2d qbar {qbar}: K = {k:.0} vs {k2_sat:.0}{}; ",
            if point_ok { "" } else { " OFF" }
        ));
    }

    // 1D plateau: sqrt(alpha/pi) tau omega0 for omega_max >= sqrt(alpha).
    let k1_sat = (DEFAULT_ALPHA / PI).sqrt() * pump.tau_fs * s.omega0;
    for obar in [3.0, 4.0] {
        let spec = collinear_spec(Dimension::One, f64::INFINITY, obar);
        let n = estimate_n(
            &spec,
            &McParams {
                n_samples: 1_000_000,
                seed: 4007,
                shards: 8,
            },
        )
        .unwrap();
        let (b, _) = estimate_b(
            &spec,
            &McParams {
                n_samples: 4_000_000,
                seed: 4008,
                shards: 8,
            },
        )
        .unwrap();
        let k = n.value * n.value / b.value;
        let point_ok = (k / k1_sat - 1.0).abs() < 0.15;
        ok &= point_ok;
        detail.push_str(&format!(
            "1d obar {obar}: K = {k:.1} vs {k1_sat:.1}{}; ",
            if point_ok { "" } else { " OFF" }
        ));
    }
    verdict(5, "saturation plateaus", ok, &detail);
}

#[test]
fn a06_factorizability() {
    let spec = collinear_spec(Dimension::Three, 1.0, 1.0);
    let grid = [0.3, 0.5, 1.0, 1.5, 2.0, 3.0, 3.5, 4.0];
    let rows = factorizability_gap(&spec, &grid).unwrap();
    let first = &rows[0];
    let last = &rows[rows.len() - 1];
    let ok_small = first.ratio > 0.7 && first.ratio < 1.4;
    let ok_large = last.ratio > 1.5;
    let tail = &rows[rows.len() - 3..];
    let ok_grow = tail[2].k_3d > tail[1].k_3d && tail[1].k_3d > tail[0].k_3d;
    let drift = (tail[2].k_product / tail[0].k_product - 1.0).abs();
    let ok_flat = drift < 0.05;
    verdict(
        6,
        "factorizability",
        ok_small && ok_large && ok_grow && ok_flat,
        &format!(
            "ratio(0.3) = {:.3}, ratio(4) = {:.3}, K_3D tail {:.0} -> {:.0} -> {:.0}, product drift {:.2e}",
            first.ratio, last.ratio, tail[0].k_3d, tail[1].k_3d, tail[2].k_3d, drift
        ),
    );
}

#[test]
fn a07_beta_sweep_shape() {
    // Grid endpoints follow the pump-focusing preset: the first three betas
    // probe the factorized regime, the last three the focused regime.
    let betas = [0.01, 0.05, 0.2, 2.0, 5.0, 10.0];
    let spec = collinear_spec(Dimension::Three, f64::INFINITY, 6.0);
    let params = McParams {
        n_samples: 20_000_000,
        seed: 4011,
        shards: 8,
    };
    let rows = beta_sweep(&spec, &betas, &params).unwrap();
    let r0 = &rows[0];
    let ok_npwpa = (r0.k / r0.k_analytic - 1.0).abs() <= 0.25;
    let ok_decreasing = rows[0].k > rows[1].k && rows[1].k > rows[2].k;
    let tail = &rows[rows.len() - 3..];
    let ok_increasing = tail[2].k > tail[1].k && tail[1].k > tail[0].k;
    verdict(
        7,
        "beta sweep shape",
        ok_npwpa && ok_decreasing && ok_increasing,
        &format!(
            "K(0.01)/analytic = {:.3} (|ratio-1| <= 0.25: {}), decreasing over [0.01, 0.05, 0.2]: {} ({:.0} > {:.0} > {:.0}), increasing over [{}, {}, {}]: {} ({:.0}, {:.0}, {:.0})",
            r0.k / r0.k_analytic,
            ok_npwpa,
            ok_decreasing,
            rows[0].k,
            rows[1].k,
            rows[2].k,
            tail[0].beta,
            tail[1].beta,
            tail[2].beta,
            ok_increasing,
            tail[0].k,
            tail[1].k,
            tail[2].k,
        ),
    );
}

#[test]
fn a08_noncollinear_ring() {
    // Non-collinear tuning delta0_lc = 23.38: the ring of phase matching
    // sits at q = sqrt(23.38) q0. Compare the axial disk (q_max = 1 q0)
    // against the ring-including disk at the documented spectral cutoff
    // omega_max = 1 omega0.
    let (s, _) = derive_scales(&bbo(23.38)).unwrap();
    let ring = 23.38f64.sqrt();
    let params = McParams {
        n_samples: 10_000_000,
        seed: 4012,
        shards: 8,
    };
    let eval = |qbar: f64| {
        let spec = ModelSpec::new(
            Dimension::Three,
            bbo(23.38),
            MismatchForm::Quadratic,
            reference_pump(),
            BandwidthLimits::new(qbar * s.q0, 1.0 * s.omega0),
        );
        schmidt_mc(&spec, &params).unwrap()
    };
    let disk = eval(1.0);
    let full = eval(ring);
    let (n_disk, n_ring) = (disk.n_rel.unwrap(), full.n_rel.unwrap());
    let ok_k = disk.k > full.k;
    let ok_n = n_disk < 0.1 * n_ring;
    verdict(
        8,
        "non-collinear ring",
        ok_k && ok_n,
        &format!(
            "K(1) = {:.0}+/-{:.0} vs K(ring) = {:.0}+/-{:.0} (K(1) > K(ring): {}), N(1)/N(ring) = {:.3} (< 0.1: {})",
            disk.k, disk.k_err, full.k, full.k_err, ok_k, n_disk / n_ring, ok_n
        ),
    );
}

#[test]
fn a09_oracle_equivalence() {
    let mut ok = true;
    let mut detail = String::new();

    // Gaussian-kernel states: psi = A_p(sum) * exp(-(diff/2)^2/c^2) has
    // K = (1 + r^2)/(2r) with r = c tau_p; the grid SVD knows nothing of
    // that and must agree with the Monte Carlo estimate.
    let pump = reference_pump();
    for (r, half_width, side) in [(0.2, 0.008, 801), (0.5, 0.008, 401), (3.0, 0.01, 401)] {
        let c = r / pump.tau_fs;
        let spec = ModelSpec::new(
            Dimension::One,
            bbo(0.0),
            MismatchForm::Quadratic,
            pump,
            BandwidthLimits::new(f64::INFINITY, half_width),
        )
        .with_kernel(VKernel::GaussianRel { c });
        let mc = schmidt_mc(
            &spec,
            &McParams {
                n_samples: 500_000,
                seed: 4013,
                shards: 8,
            },
        )
        .unwrap();
        let grid = AmplitudeGrid::sample(-half_width, half_width, side, |w1, w2| {
            let shape = pump.spectrum(&SpectralPoint::one_d(w1 + w2))
                * (-((w1 - w2) / 2.0).powi(2) / (c * c)).exp();
            num_complex::Complex64::new(shape, 0.0)
        })
        .unwrap();
        let k_grid = grid_schmidt(&grid).unwrap();
        let point_ok = (mc.k - k_grid).abs() <= 3.0 * mc.k_err;
        ok &= point_ok;
        detail.push_str(&format!(
            "r {r}: mc {:.3}+/-{:.3} vs grid {:.3}{}; ",
            mc.k,
            mc.k_err,
            k_grid,
            if point_ok { "" } else { " OFF" }
        ));
    }

    // Constant-gain box: all three routes on V = 1 over a 1D box, where
    // K = P_1 * 2 omega_max / (2 pi) exactly.
    let box_pump = PumpConfig::new(600.0, 3000.0, 1e-3);
    let w = 1.0;
    let spec = ModelSpec::new(
        Dimension::One,
        bbo(0.0),
        MismatchForm::Quadratic,
        box_pump,
        BandwidthLimits::new(f64::INFINITY, w),
    )
    .with_kernel(VKernel::One);
    let k_closed = box_pump.pump_factor(Dimension::One) * 2.0 * w / (2.0 * PI);
    let k_quad = schmidt_npwpa_integral(&spec).unwrap().k;
    let mc = schmidt_mc(
        &spec,
        &McParams {
            n_samples: 200_000,
            seed: 4014,
            shards: 8,
        },
    )
    .unwrap();
    let ok_quad = (k_quad / k_closed - 1.0).abs() < 1e-6;
    let ok_mc = (mc.k - k_closed).abs() <= 3.0 * mc.k_err;
    ok &= ok_quad && ok_mc;
    detail.push_str(&format!(
        "box: closed {k_closed:.2}, quadrature {k_quad:.2}, mc {:.2}+/-{:.2}",
        mc.k, mc.k_err
    ));
    verdict(9, "oracle equivalence", ok, &detail);
}

#[test]
fn a10_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let config_for = |out: &std::path::Path| {
        format!(
            "model.dimension = 1d\nmodel.phase_match = quadratic\nmodel.method = mc_exact\n\
             crystal.delta0_lc = 0\n\
             pump.sigma_um = 600\npump.tau_fs = 1000\npump.gain = 0.001\n\
             limits.q_max_rel = inf\nlimits.omega_max_rel = 4\n\
             mc.samples = 100000\nmc.seed = 12\nmc.shards = 8\n\
             sweep.axis = omega_max_rel\nsweep.grid = 0.5, 1.0\n\
             output.path = {}\n",
            out.display()
        )
    };
    let run_once = |tag: &str, threads: &str| -> Vec<String> {
        let sub = dir.path().join(tag);
        std::fs::create_dir_all(&sub).unwrap();
        let out = sub.join("sweep.csv");
        let conf = sub.join("run.conf");
        std::fs::write(&conf, config_for(&out)).unwrap();
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_pdc-schmidt"))
            .arg("run")
            .arg(&conf)
            .env("RAYON_NUM_THREADS", threads)
            .status()
            .unwrap();
        assert!(status.success());
        // The wall-clock column is the one legitimately nondeterministic
        // field; everything else must be byte-identical.
        std::fs::read_to_string(&out)
            .unwrap()
            .lines()
            .map(|l| {
                let mut cols: Vec<&str> = l.split(',').collect();
                if cols.len() == 11 && cols[0] != "sweep_value" {
                    cols[10] = "-";
                }
                cols.join(",")
            })
            .collect()
    };
    let a = run_once("a", "1");
    let b = run_once("b", "1");
    let c = run_once("c", "4");
    let ok = a == b && a == c;
    verdict(
        10,
        "determinism",
        ok,
        &format!(
            "rerun identical: {}, thread-count independent: {} ({} rows)",
            a == b,
            a == c,
            a.len().saturating_sub(1)
        ),
    );
}
