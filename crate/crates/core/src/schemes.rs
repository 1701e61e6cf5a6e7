//! Closed-form `zeta` factors, optimal reversal strengths, success
//! probabilities and the probability-weighted scheme comparison.
//!
//! Every closed-form `zeta` here obeys `zeta = (G + 2) / (3 G^2)` with `G`
//! the coherence factor of the balanced output. The optimizer works with the
//! excess `zeta - 1 = (1 - G)(3G + 2) / (3G^2)`, where `1 - G` is written as a
//! sum of squares, so it stays accurate in the near-perfect regime.

use std::f64::consts::SQRT_2;

use crate::channels::{MeasurementStrengths, NoiseParams};
use crate::error::{Error, Result};
use crate::metrology::{bounds, qfim, BoundsReport, Qfim2, TeleportedFamily};
use crate::optimize::golden_section;
use crate::teleport::{
    closed_output_eam, closed_output_plain, closed_output_wm, coherence_factor, prepare_eam,
    prepare_plain, prepare_wm, teleport, InputState, OutputState, ResourcePrep,
};

/// `delta_ind = IND_SCALE * zeta` in the published variance scaling.
pub const PUBLISHED_IND_SCALE: f64 = 3.0 * SQRT_2 / 4.0;
/// `delta_sim = SIM_SCALE * zeta` in the published variance scaling.
pub const PUBLISHED_SIM_SCALE: f64 = 27.0 * SQRT_2 / 34.0;
/// The published ratio `R`, shared by every scheme.
pub const PUBLISHED_RATIO_R: f64 = 17.0 / 9.0;
/// The first-principles ratio `R` for the depolarized balanced family.
pub const FIRST_PRINCIPLES_RATIO_R: f64 = 1.5;

/// Reversal strengths are searched on `[0, 1 - MIN_COMPLEMENT]`.
pub const MIN_COMPLEMENT: f64 = 1e-9;
/// Bracket width at which the strength search stops.
pub const STRENGTH_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    PlainAD,
    WM,
    EAM,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 3] = [SchemeKind::PlainAD, SchemeKind::WM, SchemeKind::EAM];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::PlainAD => "plain_ad",
            SchemeKind::WM => "wm",
            SchemeKind::EAM => "eam",
        }
    }
}

/// Which `u` enters the EAM `zeta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Variant {
    /// `u = (1-d)(1-d + 2(1-q_r))`, consistent with the output state.
    #[default]
    Corrected,
    /// `u = (1-d)(1-d + 2(1-q_r)^2)`, as printed.
    AsPrinted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Intermediates {
    Baseline,
    Wm { f: f64, h: f64 },
    Eam { u: f64, v: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeClosedForms {
    pub zeta: f64,
    pub intermediates: Intermediates,
    pub variant: Variant,
}

/// Optimal operating point of one scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeResult {
    pub zeta_opt: f64,
    pub strength_opt: f64,
    pub success_probability: f64,
    /// Published scaling, see [`variance_bounds`].
    pub delta_ind: f64,
    pub delta_sim: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PublishedStrength {
    pub value: f64,
    pub in_range: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalStrength {
    pub strength: f64,
    pub zeta_opt: f64,
}

/// `zeta` from the coherence factor.
pub fn zeta_from_coherence(g: f64) -> f64 {
    (g + 2.0) / (3.0 * g * g)
}

fn check_unit(name: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::OutOfRange { name, value })
    }
}

/// Baseline `zeta1 = (d^2 - 4d + 9) / (d^2 - 4d + 3)^2`.
pub fn zeta1(d: f64) -> Result<f64> {
    check_unit("d", d)?;
    if d == 1.0 {
        return Err(Error::Divergence("zeta1 diverges at d = 1"));
    }
    let s = d * d - 4.0 * d;
    Ok((s + 9.0) / ((s + 3.0) * (s + 3.0)))
}

/// `G = (d^2 - 4d + 3) / 3` of the unprotected channel.
pub fn coherence_plain(d: f64) -> f64 {
    (d * d - 4.0 * d + 3.0) / 3.0
}

fn wm_fh(d: f64, p: f64, p_r: f64) -> (f64, f64) {
    let (db, pb, x) = (1.0 - d, 1.0 - p, 1.0 - p_r);
    let f = db * pb * x * x * (2.0 * x + db * pb) / 3.0;
    let h = x
        * x
        * (x * x * (1.0 + 2.0 * d * d * pb * pb)
            + 4.0 * d * db * pb * pb * x
            + 2.0 * db * db * pb * pb)
        / 3.0;
    (f, h)
}

/// Weak measurement with `p = q`, `p_r = q_r`: `zeta2 = (f h + 2 h^2) / (3 f^2)`.
pub fn zeta2(d: f64, p: f64, p_r: f64) -> Result<SchemeClosedForms> {
    check_unit("d", d)?;
    check_unit("p", p)?;
    check_unit("p_r", p_r)?;
    let (f, h) = wm_fh(d, p, p_r);
    if f == 0.0 {
        return Err(Error::Divergence("zeta2 diverges where f = 0"));
    }
    Ok(SchemeClosedForms {
        zeta: (f * h + 2.0 * h * h) / (3.0 * f * f),
        intermediates: Intermediates::Wm { f, h },
        variant: Variant::Corrected,
    })
}

/// Environment-assisted measurement with `p_r = q_r`: `zeta3 = (u v + 2 v^2) / (3 u^2)`.
pub fn zeta3(d: f64, q_r: f64, variant: Variant) -> Result<SchemeClosedForms> {
    check_unit("d", d)?;
    check_unit("q_r", q_r)?;
    let (db, x) = (1.0 - d, 1.0 - q_r);
    let u = match variant {
        Variant::Corrected => db * (db + 2.0 * x),
        Variant::AsPrinted => db * (db + 2.0 * x * x),
    };
    let v = x * x + 2.0 * db * db;
    if u == 0.0 {
        return Err(Error::Divergence("zeta3 diverges where u = 0"));
    }
    Ok(SchemeClosedForms {
        zeta: (u * v + 2.0 * v * v) / (3.0 * u * u),
        intermediates: Intermediates::Eam { u, v },
        variant,
    })
}

// Coherence factor and its complement as functions of the complements
// `db = 1-d`, `pb = 1-p`, `x = 1-strength`. Returned as `(G, 1 - G)`.
fn wm_coherence_bars(d: f64, db: f64, pb: f64, x: f64) -> (f64, f64) {
    let den = x * x * (1.0 + 2.0 * d * d * pb * pb)
        + 4.0 * d * db * pb * pb * x
        + 2.0 * db * db * pb * pb;
    let g = db * pb * (2.0 * x + db * pb) / den;
    let miss = (x - db * pb).powi(2) + 2.0 * d * d * pb * pb * x * x + 4.0 * d * db * pb * pb * x;
    (g, miss / den)
}

fn eam_coherence_bars(db: f64, x: f64) -> (f64, f64) {
    let den = x * x + 2.0 * db * db;
    (db * (db + 2.0 * x) / den, (x - db).powi(2) / den)
}

fn zeta_excess(g: f64, miss: f64) -> f64 {
    if g <= 0.0 {
        return f64::INFINITY;
    }
    miss * (3.0 * g + 2.0) / (3.0 * g * g)
}

/// Closed-form reversal strength. WM uses the published expression verbatim
/// and flags values outside `[0, 1]`; EAM returns `d`.
pub fn published_optimal_strength(kind: SchemeKind, d: f64, p: f64) -> Result<PublishedStrength> {
    let value = match kind {
        SchemeKind::PlainAD => {
            return Err(Error::UnsupportedScheme(
                "the baseline has no reversal strength",
            ))
        }
        SchemeKind::EAM => d,
        SchemeKind::WM => {
            let (db, pb) = (1.0 - d, 1.0 - p);
            let dp = d * pb;
            let root = (9.0 - 4.0 * dp * (1.0 - dp).powi(2) * (2.0 - dp)).sqrt();
            (2.0 + db + dp + 2.0 * dp * dp * (2.0 + pb * db) - db * pb * root)
                / (2.0 * (1.0 + 2.0 * dp * dp))
        }
    };
    Ok(PublishedStrength {
        value,
        in_range: (0.0..=1.0).contains(&value),
    })
}

/// Minimizes the Corrected `zeta` over the reversal strength by golden-section
/// search on `ln(1 - strength)`, which resolves optima close to 1.
pub fn numeric_optimal_strength(kind: SchemeKind, d: f64, p: f64) -> Result<OptimalStrength> {
    check_unit("d", d)?;
    check_unit("p", p)?;
    let db = 1.0 - d;
    let pb = 1.0 - p;
    let excess: Box<dyn Fn(f64) -> f64> = match kind {
        SchemeKind::PlainAD => {
            return Err(Error::UnsupportedScheme(
                "the baseline has no reversal strength",
            ))
        }
        SchemeKind::WM => {
            if db == 0.0 || pb == 0.0 {
                return Err(Error::Divergence(
                    "weak-measurement zeta diverges for every reversal",
                ));
            }
            Box::new(move |x| {
                let (g, miss) = wm_coherence_bars(d, db, pb, x);
                zeta_excess(g, miss)
            })
        }
        SchemeKind::EAM => {
            if db == 0.0 {
                return Err(Error::Divergence(
                    "environment-assisted zeta diverges at d = 1",
                ));
            }
            Box::new(move |x| {
                let (g, miss) = eam_coherence_bars(db, x);
                zeta_excess(g, miss)
            })
        }
    };
    let m = golden_section(|s| excess(s.exp()), MIN_COMPLEMENT.ln(), 0.0, STRENGTH_TOL);
    Ok(OptimalStrength {
        strength: -m.x.exp_m1(),
        zeta_opt: 1.0 + m.value,
    })
}

/// Success probability of the post-selected pipeline with `p = q` and both
/// reversal strengths equal to `strength`. The baseline always succeeds.
pub fn success_probability(kind: SchemeKind, d: f64, p: f64, strength: f64) -> f64 {
    let x = 1.0 - strength;
    match kind {
        SchemeKind::PlainAD => 1.0,
        SchemeKind::WM => wm_fh(d, p, strength).1,
        SchemeKind::EAM => {
            let db = 1.0 - d;
            x.powi(4) / 3.0 + 2.0 / 3.0 * db * db * x * x
        }
    }
}

/// Optimal operating point; for the baseline the strength is 0.
pub fn optimal_result(kind: SchemeKind, d: f64, p: f64) -> Result<SchemeResult> {
    let (zeta_opt, strength_opt) = match kind {
        SchemeKind::PlainAD => (zeta1(d)?, 0.0),
        _ => {
            let opt = numeric_optimal_strength(kind, d, p)?;
            (opt.zeta_opt, opt.strength)
        }
    };
    let (delta_ind, delta_sim) = variance_bounds(zeta_opt)?;
    Ok(SchemeResult {
        zeta_opt,
        strength_opt,
        success_probability: success_probability(kind, d, p, strength_opt),
        delta_ind,
        delta_sim,
    })
}

/// `P_EAM / zeta3 - P_WM / zeta2`, both at their numeric optima.
pub fn delta_comparison(d: f64, p: f64) -> Result<f64> {
    let eam = optimal_result(SchemeKind::EAM, d, p)?;
    let wm = optimal_result(SchemeKind::WM, d, p)?;
    Ok(eam.success_probability / eam.zeta_opt - wm.success_probability / wm.zeta_opt)
}

/// Published variance scaling `(delta_ind, delta_sim)`, identical for every scheme.
pub fn variance_bounds(zeta: f64) -> Result<(f64, f64)> {
    if !(zeta > 0.0) {
        return Err(Error::OutOfRange {
            name: "zeta",
            value: zeta,
        });
    }
    Ok((PUBLISHED_IND_SCALE * zeta, PUBLISHED_SIM_SCALE * zeta))
}

/// Resource for `kind`. The baseline ignores the strengths; EAM reads only
/// the reversal strengths.
pub fn prepare(
    kind: SchemeKind,
    np: &NoiseParams,
    ms: &MeasurementStrengths,
) -> Result<ResourcePrep> {
    match kind {
        SchemeKind::PlainAD => Ok(prepare_plain(np)),
        SchemeKind::WM => prepare_wm(np, ms),
        SchemeKind::EAM => prepare_eam(np, ms),
    }
}

/// Closed-form output for symmetric parameters.
pub fn closed_output(
    kind: SchemeKind,
    np: &NoiseParams,
    ms: &MeasurementStrengths,
    input: &InputState,
) -> Result<OutputState> {
    match kind {
        SchemeKind::PlainAD => closed_output_plain(np, input),
        SchemeKind::WM => closed_output_wm(np, ms, input),
        SchemeKind::EAM => closed_output_eam(np, ms, input),
    }
}

/// Closed-form `zeta` for symmetric parameters.
pub fn closed_zeta(
    kind: SchemeKind,
    np: &NoiseParams,
    ms: &MeasurementStrengths,
    variant: Variant,
) -> Result<f64> {
    if !np.is_symmetric() {
        return Err(Error::AsymmetricParameters);
    }
    let d = np.d1();
    match kind {
        SchemeKind::PlainAD => zeta1(d),
        SchemeKind::WM => {
            if !ms.is_symmetric() {
                return Err(Error::AsymmetricParameters);
            }
            Ok(zeta2(d, ms.p(), ms.p_r())?.zeta)
        }
        SchemeKind::EAM => {
            if ms.p_r() != ms.q_r() {
                return Err(Error::AsymmetricParameters);
            }
            Ok(zeta3(d, ms.q_r(), variant)?.zeta)
        }
    }
}

/// Everything measured from one simulated pipeline run.
#[derive(Debug, Clone)]
pub struct MetrologyReport {
    pub kind: SchemeKind,
    pub qfim: Qfim2,
    pub bounds: BoundsReport,
    /// Measured from the simulated output.
    pub coherence: f64,
    pub success_probability: f64,
    /// `(G + 2) / (3 G^2)` from the measured `G`.
    pub zeta: f64,
}

/// Prepares the resource, teleports the balanced `input`, and evaluates the
/// QFIM and bounds of the resulting phase family.
pub fn evaluate_pipeline(
    kind: SchemeKind,
    np: &NoiseParams,
    ms: &MeasurementStrengths,
    input: &InputState,
) -> Result<MetrologyReport> {
    let prep = prepare(kind, np, ms)?;
    let out = teleport(input, &prep.rho);
    let coherence = coherence_factor(&out, input)?;
    let qfim = qfim(&TeleportedFamily::new(*input, prep.rho))?;
    let bounds = bounds(&qfim)?;
    Ok(MetrologyReport {
        kind,
        qfim,
        bounds,
        coherence,
        success_probability: prep.success_probability,
        zeta: zeta_from_coherence(coherence),
    })
}
