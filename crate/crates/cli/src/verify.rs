//! The invariant suite behind `qtele verify`.
//!
//! Normative checks decide the exit status. Audit entries compare printed
//! formulas against the derived ones and informational entries record known
//! discrepancies; neither fails the run.

use std::f64::consts::SQRT_2;

use anyhow::Result;
use serde::Serialize;

use qtele_core::channels::{ad_kraus, wm_kraus, MeasurementStrengths, NoiseParams};
use qtele_core::metrology::{bounds, qfim, FnFamily, Qfim2, TeleportedFamily};
use qtele_core::schemes::{
    closed_output, closed_zeta, delta_comparison, numeric_optimal_strength, optimal_result,
    prepare, published_optimal_strength, success_probability, zeta1, zeta3, SchemeKind, Variant,
    FIRST_PRINCIPLES_RATIO_R, PUBLISHED_RATIO_R,
};
use qtele_core::teleport::{bell_resource, coherence_factor, teleport, InputState};

use crate::args::{damping_grid, linspace, Options};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Audit,
    Informational,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub check_name: String,
    pub status: Status,
    pub measured: Option<f64>,
    pub expected: Option<f64>,
    pub tolerance: Option<f64>,
    /// What the check is about, by quantity name.
    #[serde(rename = "paper_ref")]
    pub reference: String,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl Check {
    fn new(
        name: &str,
        status: Status,
        measured: f64,
        expected: f64,
        tolerance: Option<f64>,
        reference: &str,
    ) -> Self {
        Self {
            check_name: name.into(),
            status,
            measured: finite(measured),
            expected: finite(expected),
            tolerance,
            reference: reference.into(),
        }
    }

    /// Passes when `|measured - expected| <= tol`.
    fn within(name: &str, measured: f64, expected: f64, tol: f64, reference: &str) -> Self {
        let ok = (measured - expected).abs() <= tol;
        Self::new(
            name,
            if ok { Status::Pass } else { Status::Fail },
            measured,
            expected,
            Some(tol),
            reference,
        )
    }

    /// Passes when `measured >= floor`.
    fn at_least(name: &str, measured: f64, floor: f64, reference: &str) -> Self {
        let status = if measured >= floor {
            Status::Pass
        } else {
            Status::Fail
        };
        Self::new(name, status, measured, floor, Some(0.0), reference)
    }

    fn audit(name: &str, measured: f64, expected: f64, tol: Option<f64>, reference: &str) -> Self {
        Self::new(name, Status::Audit, measured, expected, tol, reference)
    }

    fn info(name: &str, measured: f64, expected: f64, tol: Option<f64>, reference: &str) -> Self {
        Self::new(
            name,
            Status::Informational,
            measured,
            expected,
            tol,
            reference,
        )
    }
}

/// A grid point where the published WM reversal strength leaves `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditFlag {
    pub gamma_t: f64,
    pub d: f64,
    pub p: f64,
    pub published: f64,
    pub numeric: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub audit: usize,
    pub informational: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    pub published_strength_flags: Vec<AuditFlag>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.summary.fail == 0
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.check_name == name)
    }
}

const D_GRID: [f64; 5] = [0.0, 0.2, 0.45, 0.7, 0.9];
const S_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 0.9];

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
}

/// Largest step up along a sequence that should not increase (0 when monotone).
fn max_rise(values: &[f64]) -> f64 {
    values.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
}

fn symmetric_cases(
    d: f64,
    p: f64,
    s: f64,
) -> Result<[(SchemeKind, NoiseParams, MeasurementStrengths); 3]> {
    let np = NoiseParams::symmetric(d)?;
    Ok([
        (SchemeKind::PlainAD, np, MeasurementStrengths::none()),
        (SchemeKind::WM, np, MeasurementStrengths::symmetric(p, s)?),
        (SchemeKind::EAM, np, MeasurementStrengths::new(p, p, s, s)?),
    ])
}

fn kraus_completeness() -> Result<Check> {
    let grid = linspace(0.0, 1.0, 10);
    let mut worst = 0.0f64;
    for &a in &grid {
        for &b in &grid {
            worst = worst.max(ad_kraus(&NoiseParams::new(a, b)?).completeness_deviation());
            worst = worst.max(
                wm_kraus(&MeasurementStrengths::new(a, b, 0.0, 0.0)?).completeness_deviation(),
            );
        }
    }
    Ok(Check::within(
        "kraus_completeness",
        worst,
        0.0,
        1e-12,
        "damping and weak-measurement Kraus sets",
    ))
}

fn ideal_teleportation() -> Result<Check> {
    let inputs = [
        InputState::new(1.0, 0.0, 0.0, 0.0, 0.0)?,
        InputState::new(0.6, 0.48, 0.64, 0.4, -1.2)?,
        InputState::new(0.8, 0.0, 0.6, 0.0, 2.0)?,
        InputState::new(0.28, 0.96, 0.0, 1.3, 0.0)?,
        InputState::new(2.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0, -0.7, 0.9)?,
    ];
    let resource = bell_resource();
    let worst = inputs
        .iter()
        .map(|s| teleport(s, &resource).rho_out.distance(&s.projector()))
        .fold(0.0, f64::max);
    Ok(Check::within(
        "ideal_teleportation",
        worst,
        0.0,
        1e-12,
        "maximally entangled qutrit resource",
    ))
}

fn oracle_and_zeta_law(input: &InputState) -> Result<Vec<Check>> {
    let mut oracle = [0.0f64; 3];
    let mut law = [0.0f64; 3];
    for &d in &D_GRID {
        for &p in &S_GRID {
            for &s in &S_GRID {
                for (k, (kind, np, ms)) in symmetric_cases(d, p, s)?.into_iter().enumerate() {
                    let prep = prepare(kind, &np, &ms)?;
                    let sim = teleport(input, &prep.rho);
                    let closed = closed_output(kind, &np, &ms, input)?;
                    oracle[k] = oracle[k].max(sim.rho_out.max_abs_diff(&closed.rho_out));
                    let g = coherence_factor(&sim, input)?;
                    let zeta = closed_zeta(kind, &np, &ms, Variant::Corrected)?;
                    law[k] = law[k].max(rel_diff(zeta, (g + 2.0) / (3.0 * g * g)));
                }
            }
        }
    }
    let mut out = Vec::new();
    for (k, kind) in SchemeKind::ALL.iter().enumerate() {
        out.push(Check::within(
            &format!("oracle_equivalence_{}", kind.name()),
            oracle[k],
            0.0,
            1e-10,
            "closed-form teleported output state",
        ));
    }
    for (k, kind) in SchemeKind::ALL.iter().enumerate() {
        out.push(Check::within(
            &format!("zeta_law_{}", kind.name()),
            law[k],
            0.0,
            1e-10,
            "closed-form zeta versus (G+2)/(3G^2), relative",
        ));
    }
    Ok(out)
}

fn baseline() -> Result<Vec<Check>> {
    let ds = linspace(0.0, 0.99, 100);
    let zs: Vec<f64> = ds.iter().map(|&d| zeta1(d)).collect::<Result<_, _>>()?;
    let non_increase = zs
        .windows(2)
        .map(|w| w[0] - w[1])
        .fold(f64::NEG_INFINITY, f64::max);
    let identity = (1..10)
        .map(|k| {
            let d = k as f64 / 10.0;
            let g = (d * d - 4.0 * d + 3.0) / 3.0;
            zeta1(d).map(|z| rel_diff(z, (g + 2.0) / (3.0 * g * g)))
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(vec![
        Check::within("zeta1_noiseless", zeta1(0.0)?, 1.0, 1e-12, "baseline zeta1"),
        Check::within(
            "zeta1_half_damping",
            zeta1(0.5)?,
            4.64,
            1e-10,
            "baseline zeta1",
        ),
        Check::new(
            "zeta1_strictly_increasing",
            if non_increase < 0.0 {
                Status::Pass
            } else {
                Status::Fail
            },
            -non_increase,
            0.0,
            Some(0.0),
            "baseline zeta1 versus damping; smallest step",
        ),
        Check::within(
            "zeta1_coherence_identity",
            identity,
            0.0,
            1e-12,
            "baseline zeta1 versus (G+2)/(3G^2)",
        ),
    ])
}

fn eam_protection() -> Result<Vec<Check>> {
    let mut dist = 0.0f64;
    let mut zeta = 0.0f64;
    let mut prob = 0.0f64;
    let inputs = [
        InputState::default(),
        InputState::new(0.6, 0.48, 0.64, 0.4, -1.2)?,
    ];
    for k in 1..10 {
        let d = k as f64 / 10.0;
        let np = NoiseParams::symmetric(d)?;
        let ms = MeasurementStrengths::new(0.0, 0.0, d, d)?;
        let prep = prepare(SchemeKind::EAM, &np, &ms)?;
        for input in &inputs {
            dist = dist.max(
                teleport(input, &prep.rho)
                    .rho_out
                    .distance(&input.projector()),
            );
        }
        zeta = zeta.max((zeta3(d, d, Variant::Corrected)?.zeta - 1.0).abs());
        prob =
            prob.max((success_probability(SchemeKind::EAM, d, 0.0, d) - (1.0 - d).powi(4)).abs());
        prob = prob.max((prep.success_probability - (1.0 - d).powi(4)).abs());
    }
    Ok(vec![
        Check::within(
            "eam_full_protection_state",
            dist,
            0.0,
            1e-10,
            "EAM output at q_r = d",
        ),
        Check::within(
            "eam_full_protection_zeta3",
            zeta,
            0.0,
            1e-10,
            "EAM zeta3 at q_r = d",
        ),
        Check::within(
            "eam_success_probability",
            prob,
            0.0,
            1e-12,
            "EAM success probability at q_r = d",
        ),
    ])
}

fn wm_behaviour() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut zeta_rise = 0.0f64;
    let mut prob_rise = 0.0f64;
    let mut prob_rise_full = 0.0f64;
    for d in [0.2, 0.5, 0.8] {
        let column = |ps: Vec<f64>| -> Result<(Vec<f64>, Vec<f64>)> {
            let rs = ps
                .into_iter()
                .map(|p| optimal_result(SchemeKind::WM, d, p))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((
                rs.iter().map(|r| r.zeta_opt).collect(),
                rs.iter().map(|r| r.success_probability).collect(),
            ))
        };
        let (z, pr) = column(linspace(0.3, 0.95, 20))?;
        zeta_rise = zeta_rise.max(max_rise(&z));
        prob_rise = prob_rise.max(max_rise(&pr));
        let (_, pr_full) = column(linspace(0.05, 0.95, 20))?;
        prob_rise_full = prob_rise_full.max(max_rise(&pr_full));

        let limit = numeric_optimal_strength(SchemeKind::WM, d, 1.0 - 1e-4)?.zeta_opt;
        out.push(Check::info(
            &format!("wm_limit_zeta2_d{d}"),
            limit,
            1.0,
            Some(1e-4),
            "WM optimum as p -> 1 - 1e-4; approaches 1 only as 20 d (1-p) / 9",
        ));
    }
    out.push(Check::within(
        "wm_zeta2_opt_nonincreasing",
        zeta_rise,
        0.0,
        1e-12,
        "WM optimum over p in [0.3, 0.95]",
    ));
    out.push(Check::within(
        "wm_probability_opt_nonincreasing",
        prob_rise,
        0.0,
        1e-12,
        "WM success probability at optimum over p in [0.3, 0.95]",
    ));
    out.push(Check::info(
        "wm_probability_opt_nonincreasing_full_range",
        prob_rise_full,
        0.0,
        Some(1e-12),
        "WM success probability at optimum over p in [0.05, 0.95]; rises at small p for strong damping",
    ));
    Ok(out)
}

fn metrology(input: &InputState) -> Result<Vec<Check>> {
    let pure = qfim(&FnFamily::new(
        |a, b| InputState::balanced(a, b).projector(),
        input.phases(),
    ))?;
    let pure_expected = Qfim2::new(8.0 / 9.0, -4.0 / 9.0, -4.0 / 9.0, 8.0 / 9.0);
    let mut phase = 0.0f64;
    let mut ratio = 0.0f64;
    let mut law = 0.0f64;
    let mut psd = 0.0f64;
    let a = InputState::balanced(0.3, 1.1);
    let b = InputState::balanced(1.7, 0.4);
    for d in [0.0, 0.2, 0.5, 0.8] {
        for &p in &S_GRID {
            for &s in &S_GRID {
                for (kind, np, ms) in symmetric_cases(d, p, s)? {
                    let rho = prepare(kind, &np, &ms)?.rho;
                    let fa = qfim(&TeleportedFamily::new(a, rho.clone()))?;
                    let fb = qfim(&TeleportedFamily::new(b, rho.clone()))?;
                    phase = phase.max(fa.max_abs_diff(&fb));
                    psd = psd.max(fa.asymmetry()).max(-fa.min_eigenvalue());
                    let g = coherence_factor(&teleport(&a, &rho), &a)?;
                    let bd = bounds(&fa)?;
                    law = law.max((bd.delta_sim * g * g / (g + 2.0) - 1.0).abs());
                    if g > 0.05 {
                        ratio = ratio.max((bd.ratio_r - FIRST_PRINCIPLES_RATIO_R).abs());
                    }
                }
            }
        }
    }
    let fp_bounds = bounds(&pure)?;
    Ok(vec![
        Check::within(
            "qfim_pure_limit",
            pure.max_abs_diff(&pure_expected),
            0.0,
            1e-7,
            "pure balanced input QFIM",
        ),
        Check::within(
            "qfim_symmetric_psd",
            psd,
            0.0,
            1e-9,
            "QFIM symmetry and positivity on pipeline grid",
        ),
        Check::within(
            "qfim_phase_independence",
            phase,
            0.0,
            1e-8,
            "QFIM at two phase points",
        ),
        Check::within(
            "ratio_r_constancy",
            ratio,
            0.0,
            1e-6,
            "first-principles R = 3/2 where G > 0.05",
        ),
        Check::within(
            "bound_proportionality_law",
            law,
            0.0,
            1e-6,
            "delta_sim G^2 / (G+2) = 1",
        ),
        Check::info(
            "ratio_r_published_vs_first_principles",
            fp_bounds.ratio_r,
            PUBLISHED_RATIO_R,
            None,
            "ratio R: first principles 3/2 versus published 17/9",
        ),
        Check::info(
            "qfim_diagonal_published_vs_first_principles",
            pure.f11,
            4.0 * SQRT_2 / 3.0,
            None,
            "QFIM diagonal at zeta = 1: first principles 8/9 versus published 4 sqrt 2 / 3",
        ),
        Check::info(
            "qfim_off_diagonal_published_vs_first_principles",
            pure.f12,
            4.0 / 9.0,
            None,
            "QFIM off-diagonal at zeta = 1: first principles -4/9 versus published +4/9",
        ),
    ])
}

fn dominance() -> Result<Vec<Check>> {
    let mut min_all = f64::INFINITY;
    let mut min_strict = f64::INFINITY;
    for (_, d) in damping_grid(&linspace(0.05, 2.0, 40)) {
        for p in linspace(0.05, 0.95, 19) {
            let delta = delta_comparison(d, p)?;
            min_all = min_all.min(delta);
            if d > 0.05 {
                min_strict = min_strict.min(delta);
            }
        }
    }
    Ok(vec![
        Check::at_least(
            "delta_nonnegative",
            min_all,
            -1e-12,
            "EAM minus WM probability-weighted precision",
        ),
        Check::new(
            "delta_strictly_positive",
            if min_strict > 0.0 {
                Status::Pass
            } else {
                Status::Fail
            },
            min_strict,
            0.0,
            Some(0.0),
            "EAM minus WM for d > 0.05",
        ),
    ])
}

fn published_audit(opts: &Options) -> Result<(Vec<Check>, Vec<AuditFlag>)> {
    let mut flags = Vec::new();
    let mut max_gap = 0.0f64;
    for (gamma_t, d) in damping_grid(&opts.gamma_grid()) {
        for &p in &opts.p {
            let published = published_optimal_strength(SchemeKind::WM, d, p)?;
            let numeric = numeric_optimal_strength(SchemeKind::WM, d, p)?.strength;
            max_gap = max_gap.max((published.value - numeric).abs());
            if !published.in_range {
                flags.push(AuditFlag {
                    gamma_t,
                    d,
                    p,
                    published: published.value,
                    numeric,
                });
            }
        }
    }
    let half = published_optimal_strength(SchemeKind::WM, 0.5, 0.5)?.value;
    let checks = vec![
        Check::audit(
            "published_wm_strength_out_of_range",
            flags.len() as f64,
            0.0,
            None,
            "published WM reversal strength outside [0, 1]; points listed in published_strength_flags",
        ),
        Check::audit(
            "published_wm_strength_max_gap",
            max_gap,
            0.0,
            None,
            "published minus numeric WM reversal strength",
        ),
        Check::audit(
            "published_wm_strength_half",
            half,
            numeric_optimal_strength(SchemeKind::WM, 0.5, 0.5)?.strength,
            None,
            "published versus numeric WM reversal strength at d = p = 0.5",
        ),
        Check::audit(
            "zeta3_as_printed_half",
            zeta3(0.5, 0.5, Variant::AsPrinted)?.zeta,
            2.0,
            Some(1e-10),
            "EAM zeta3 with u as printed at d = q_r = 0.5",
        ),
        Check::audit(
            "zeta3_corrected_half",
            zeta3(0.5, 0.5, Variant::Corrected)?.zeta,
            1.0,
            Some(1e-10),
            "EAM zeta3 with corrected u at d = q_r = 0.5",
        ),
    ];
    Ok((checks, flags))
}

pub fn run(opts: &Options) -> Result<VerificationReport> {
    let balanced = InputState::balanced(opts.phi1, opts.phi2);
    let mut checks = vec![kraus_completeness()?, ideal_teleportation()?];
    checks.extend(oracle_and_zeta_law(&balanced)?);
    checks.extend(baseline()?);
    checks.extend(eam_protection()?);
    checks.extend(wm_behaviour()?);
    checks.extend(metrology(&balanced)?);
    checks.extend(dominance()?);
    let (audit, flags) = published_audit(opts)?;
    checks.extend(audit);

    let mut summary = Summary::default();
    for c in &checks {
        match c.status {
            Status::Pass => summary.pass += 1,
            Status::Fail => summary.fail += 1,
            Status::Audit => summary.audit += 1,
            Status::Informational => summary.informational += 1,
        }
    }
    Ok(VerificationReport {
        checks,
        published_strength_flags: flags,
        summary,
    })
}
