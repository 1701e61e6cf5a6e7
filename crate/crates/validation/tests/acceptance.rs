//! Acceptance gate: one PASS/FAIL line per primary criterion, nonzero exit
//! if any fails.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qtele_core::channels::{
    ad_kraus, damping_from_gamma_t, wm_kraus, MeasurementStrengths, NoiseParams,
};
use qtele_core::metrology::{bounds, qfim, Qfim2, TeleportedFamily};
use qtele_core::schemes::{
    closed_output, closed_zeta, delta_comparison, numeric_optimal_strength, optimal_result,
    prepare, success_probability, zeta1, zeta3, SchemeKind, Variant, PUBLISHED_RATIO_R,
};
use qtele_core::teleport::{bell_resource, coherence_factor, teleport_operator, InputState};
use qtele_core::tensor::{dagger, ComplexMatrix, C64};

const D_GRID: [f64; 5] = [0.0, 0.2, 0.45, 0.7, 0.9];
const S_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 0.9];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
}

fn cases(d: f64, p: f64, s: f64) -> [(SchemeKind, NoiseParams, MeasurementStrengths); 3] {
    let np = NoiseParams::symmetric(d).unwrap();
    [
        (SchemeKind::PlainAD, np, MeasurementStrengths::none()),
        (
            SchemeKind::WM,
            np,
            MeasurementStrengths::symmetric(p, s).unwrap(),
        ),
        (
            SchemeKind::EAM,
            np,
            MeasurementStrengths::new(p, p, s, s).unwrap(),
        ),
    ]
}

fn completeness(ops: &[ComplexMatrix]) -> f64 {
    let sum = ops
        .iter()
        .fold(ComplexMatrix::zeros(3), |acc, k| &acc + &(&dagger(k) * k));
    sum.max_abs_diff(&ComplexMatrix::identity(3))
}

fn kraus_completeness() -> Outcome {
    let g = linspace(0.0, 1.0, 10);
    let mut worst = 0.0f64;
    for &a in &g {
        for &b in &g {
            worst = worst.max(completeness(
                ad_kraus(&NoiseParams::new(a, b).unwrap()).operators(),
            ));
            worst = worst.max(completeness(
                wm_kraus(&MeasurementStrengths::new(a, b, 0.0, 0.0).unwrap()).operators(),
            ));
        }
    }
    outcome(
        worst <= 1e-12,
        format!("max deviation {worst:.2e} (tol 1e-12)"),
    )
}

fn ideal_teleportation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20_26);
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let v: Vec<C64> = (0..3)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let rho = ComplexMatrix::outer(&v.iter().map(|z| z / n).collect::<Vec<_>>());
        worst = worst.max(
            teleport_operator(&rho, &bell_resource())
                .unwrap()
                .distance(&rho),
        );
    }
    outcome(
        worst < 1e-12,
        format!("max Frobenius error {worst:.2e} over 5 random inputs (tol 1e-12)"),
    )
}

fn oracle_equivalence() -> Outcome {
    let input = InputState::default();
    let mut worst = 0.0f64;
    for &d in &D_GRID {
        for &p in &S_GRID {
            for &s in &S_GRID {
                for (kind, np, ms) in cases(d, p, s) {
                    let sim = teleport_operator(
                        &input.projector(),
                        &prepare(kind, &np, &ms).unwrap().rho,
                    )
                    .unwrap();
                    let closed = closed_output(kind, &np, &ms, &input).unwrap();
                    worst = worst.max(sim.max_abs_diff(&closed.rho_out));
                }
            }
        }
    }
    outcome(
        worst <= 1e-10,
        format!("max entry error {worst:.2e} on 5x5x5 grid, three schemes (tol 1e-10)"),
    )
}

fn baseline() -> Outcome {
    let z0 = zeta1(0.0).unwrap();
    let zh = zeta1(0.5).unwrap();
    let zs: Vec<f64> = linspace(0.001, 0.999, 200)
        .iter()
        .map(|&d| zeta1(d).unwrap())
        .collect();
    let increasing = zs.windows(2).all(|w| w[1] > w[0]);
    let identity = (1..10)
        .map(|k| {
            let d = k as f64 / 10.0;
            let g = (d * d - 4.0 * d + 3.0) / 3.0;
            rel(zeta1(d).unwrap(), (g + 2.0) / (3.0 * g * g))
        })
        .fold(0.0, f64::max);
    let pass = z0 == 1.0 && (zh - 4.64).abs() <= 1e-10 && increasing && identity <= 1e-12;
    outcome(
        pass,
        format!("zeta1(0)={z0}, zeta1(0.5)={zh:.12}, increasing={increasing}, identity error {identity:.1e}"),
    )
}

fn zeta_law() -> Outcome {
    let input = InputState::default();
    let mut worst = 0.0f64;
    for &d in &D_GRID {
        for &p in &S_GRID {
            for &s in &S_GRID {
                for (kind, np, ms) in cases(d, p, s) {
                    let rho = prepare(kind, &np, &ms).unwrap().rho;
                    let out = qtele_core::teleport::teleport(&input, &rho);
                    let g = coherence_factor(&out, &input).unwrap();
                    let z = closed_zeta(kind, &np, &ms, Variant::Corrected).unwrap();
                    worst = worst.max(rel(z, (g + 2.0) / (3.0 * g * g)));
                }
            }
        }
    }
    outcome(
        worst <= 1e-10,
        format!("max relative deviation {worst:.2e} (tol 1e-10)"),
    )
}

fn eam_full_protection() -> Outcome {
    let input = InputState::default();
    let mut dist = 0.0f64;
    let mut zeta = 0.0f64;
    for k in 1..10 {
        let d = k as f64 / 10.0;
        let np = NoiseParams::symmetric(d).unwrap();
        let ms = MeasurementStrengths::new(0.0, 0.0, d, d).unwrap();
        let rho = prepare(SchemeKind::EAM, &np, &ms).unwrap().rho;
        let out = teleport_operator(&input.projector(), &rho).unwrap();
        dist = dist.max(out.distance(&input.projector()));
        zeta = zeta.max((zeta3(d, d, Variant::Corrected).unwrap().zeta - 1.0).abs());
    }
    outcome(
        dist <= 1e-10 && zeta <= 1e-10,
        format!("state error {dist:.2e}, |zeta3 - 1| {zeta:.2e} (tol 1e-10)"),
    )
}

fn eam_success() -> Outcome {
    let mut worst = 0.0f64;
    for k in 0..10 {
        let d = k as f64 / 10.0;
        worst =
            worst.max((success_probability(SchemeKind::EAM, d, 0.0, d) - (1.0 - d).powi(4)).abs());
        if d < 1.0 {
            let np = NoiseParams::symmetric(d).unwrap();
            let ms = MeasurementStrengths::new(0.0, 0.0, d, d).unwrap();
            let p = prepare(SchemeKind::EAM, &np, &ms)
                .unwrap()
                .success_probability;
            worst = worst.max((p - (1.0 - d).powi(4)).abs());
        }
    }
    outcome(
        worst <= 1e-12,
        format!("max deviation from (1-d)^4 {worst:.2e} (tol 1e-12)"),
    )
}

fn wm_limit() -> Outcome {
    let mut limit_ok = true;
    let mut parts = Vec::new();
    for d in [0.2, 0.5, 0.8] {
        let z = numeric_optimal_strength(SchemeKind::WM, d, 1.0 - 1e-4)
            .unwrap()
            .zeta_opt;
        limit_ok &= (z - 1.0).abs() <= 1e-4;
        parts.push(format!("d={d}: zeta2_opt-1={:.3e}", z - 1.0));
    }
    let mut monotone = true;
    for d in [0.2, 0.5, 0.8] {
        let rs: Vec<_> = linspace(0.3, 0.95, 20)
            .into_iter()
            .map(|p| optimal_result(SchemeKind::WM, d, p).unwrap())
            .collect();
        monotone &= rs.windows(2).all(|w| {
            w[1].zeta_opt <= w[0].zeta_opt + 1e-12
                && w[1].success_probability <= w[0].success_probability + 1e-12
        });
    }
    parts.push(format!("monotone={monotone}"));
    outcome(
        limit_ok && monotone,
        format!("{} (tol 1e-4)", parts.join(", ")),
    )
}

fn first_principles_qfim() -> Outcome {
    let input = InputState::default();
    let np = NoiseParams::symmetric(0.0).unwrap();
    let pure = qfim(&TeleportedFamily::new(
        input,
        prepare(SchemeKind::PlainAD, &np, &MeasurementStrengths::none())
            .unwrap()
            .rho,
    ))
    .unwrap();
    let pure_err = pure.max_abs_diff(&Qfim2::new(8.0 / 9.0, -4.0 / 9.0, -4.0 / 9.0, 8.0 / 9.0));
    let (a, b) = (
        InputState::balanced(0.3, 1.1),
        InputState::balanced(1.7, 0.4),
    );
    let mut phase = 0.0f64;
    let mut ratio = 0.0f64;
    for d in [0.0, 0.2, 0.5, 0.8] {
        for &p in &S_GRID {
            for &s in &S_GRID {
                for (kind, np, ms) in cases(d, p, s) {
                    let rho = prepare(kind, &np, &ms).unwrap().rho;
                    let fa = qfim(&TeleportedFamily::new(a, rho.clone())).unwrap();
                    let fb = qfim(&TeleportedFamily::new(b, rho.clone())).unwrap();
                    phase = phase.max(fa.max_abs_diff(&fb));
                    let g =
                        coherence_factor(&qtele_core::teleport::teleport(&a, &rho), &a).unwrap();
                    if g > 0.05 {
                        ratio = ratio.max((bounds(&fa).unwrap().ratio_r - 1.5).abs());
                    }
                }
            }
        }
    }
    let pass = pure_err <= 1e-7 && phase <= 1e-8 && ratio <= 1e-6;
    outcome(
        pass,
        format!("pure-limit error {pure_err:.1e} (1e-7), phase drift {phase:.1e} (1e-8), |R - 3/2| {ratio:.1e} (1e-6)"),
    )
}

fn delta_dominance() -> Outcome {
    let mut min_all = f64::INFINITY;
    let mut min_strict = f64::INFINITY;
    for gt in linspace(0.05, 2.0, 40) {
        let d = damping_from_gamma_t(gt);
        for p in linspace(0.05, 0.95, 19) {
            let delta = delta_comparison(d, p).unwrap();
            min_all = min_all.min(delta);
            if d > 0.05 {
                min_strict = min_strict.min(delta);
            }
        }
    }
    outcome(
        min_all >= -1e-12 && min_strict > 0.0,
        format!("min delta {min_all:.3e}, min over d > 0.05 {min_strict:.3e} on 40x19 grid"),
    )
}

fn published_audit(dir: &Path) -> Outcome {
    let code = qtele(&["verify", "--out"], dir);
    let text = match fs::read_to_string(dir.join("verify.json")) {
        Ok(t) => t,
        Err(e) => return outcome(false, format!("no report ({e}); exit {code}")),
    };
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let checks = v["checks"].as_array().unwrap();
    let get = |n: &str| checks.iter().find(|c| c["check_name"] == n);
    let flags = v["published_strength_flags"]
        .as_array()
        .map_or(0, |a| a.len());
    let flagged = get("published_wm_strength_out_of_range")
        .and_then(|c| c["measured"].as_f64())
        .is_some_and(|m| m as usize == flags && flags > 0);
    let value = |n: &str| {
        get(n)
            .and_then(|c| c["measured"].as_f64())
            .unwrap_or(f64::NAN)
    };
    let printed = value("zeta3_as_printed_half");
    let corrected = value("zeta3_corrected_half");
    let pass = flagged && (printed - 2.0).abs() <= 1e-10 && (corrected - 1.0).abs() <= 1e-10;
    outcome(
        pass,
        format!("{flags} out-of-range flags, zeta3 as printed {printed:.12}, corrected {corrected:.12} (tol 1e-10)"),
    )
}

/// Runs the command-line entry point as the `qtele` binary would.
fn qtele(args: &[&str], dir: &Path) -> i32 {
    let argv = std::iter::once("qtele".as_ref())
        .chain(args.iter().map(|a| a.as_ref()))
        .chain(std::iter::once(dir.as_os_str()));
    qtele_cli::run_cli(argv)
}

fn csv_determinism(a: &Path, b: &Path) -> Outcome {
    for dir in [a, b] {
        for cmd in ["fig2", "fig3", "fig4", "fig5", "sweep"] {
            let code = qtele(&[cmd, "--out"], dir);
            if code != qtele_cli::exit::OK {
                return outcome(false, format!("{cmd} exited with {code}"));
            }
        }
    }
    let names = [
        "fig2.csv",
        "fig3a.csv",
        "fig3b.csv",
        "fig4a.csv",
        "fig4b.csv",
        "fig5.csv",
        "sweep.csv",
    ];
    let differing: Vec<&str> = names
        .iter()
        .copied()
        .filter(|n| fs::read(a.join(n)).ok() != fs::read(b.join(n)).ok())
        .collect();
    outcome(
        differing.is_empty(),
        format!("{} files compared, differing: {differing:?}", names.len()),
    )
}

fn main() {
    let tmp = tempfile::tempdir().expect("temporary directory");
    let (run_a, run_b) = (tmp.path().join("a"), tmp.path().join("b"));
    let criteria: Vec<(&str, Outcome)> = vec![
        ("Kraus completeness", kraus_completeness()),
        ("Ideal teleportation identity", ideal_teleportation()),
        ("Oracle equivalence", oracle_equivalence()),
        ("Baseline reproduction", baseline()),
        ("Universal zeta law", zeta_law()),
        ("EAM full protection", eam_full_protection()),
        ("EAM success probability", eam_success()),
        ("WM limit", wm_limit()),
        ("First-principles QFIM", first_principles_qfim()),
        ("Delta dominance", delta_dominance()),
        ("Published-formula audit", published_audit(tmp.path())),
        ("CSV determinism", csv_determinism(&run_a, &run_b)),
    ];
    let mut failed = 0;
    for (name, o) in &criteria {
        println!(
            "{} {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    let fp = bounds(&Qfim2::new(8.0 / 9.0, -4.0 / 9.0, -4.0 / 9.0, 8.0 / 9.0))
        .unwrap()
        .ratio_r;
    println!(
        "INFO ratio R: first principles {fp:.6}, published {PUBLISHED_RATIO_R:.6} (not a gate)"
    );
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
