//! Per-scheme rows combining closed forms and direct simulation.

use anyhow::Result;
use qtele_core::channels::{damping_from_gamma_t, MeasurementStrengths, NoiseParams};
use qtele_core::metrology::{bounds, qfim, TeleportedFamily};
use qtele_core::schemes::{
    closed_zeta, numeric_optimal_strength, prepare, variance_bounds, SchemeKind, Variant,
};
use qtele_core::teleport::{coherence_factor, teleport, InputState};

use crate::args::Options;
use crate::figures::Table;
use crate::format::fmt_g;

pub const SWEEP_HEADER: &[&str] = &[
    "gamma_t",
    "d",
    "scheme",
    "strength_p",
    "strength_reversal",
    "zeta",
    "G",
    "delta_ind_paper",
    "delta_sim_paper",
    "delta_ind_fp",
    "delta_sim_fp",
    "ratio_fp",
    "success_probability",
];

/// One simulated operating point. Published-scaling bounds come from the
/// closed-form `zeta`; first-principles bounds from the QFIM of the
/// teleported family. Diverging bounds are stored as `inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub gamma_t: f64,
    pub d: f64,
    pub scheme: SchemeKind,
    pub strength_p: f64,
    pub strength_reversal: f64,
    pub zeta: f64,
    /// Coherence factor of the channel, probed with a balanced input.
    pub g: f64,
    pub delta_ind_published: f64,
    pub delta_sim_published: f64,
    pub delta_ind_fp: f64,
    pub delta_sim_fp: f64,
    pub ratio_fp: f64,
    pub success_probability: f64,
}

impl SweepRow {
    pub fn evaluate(
        gamma_t: f64,
        scheme: SchemeKind,
        strength_p: f64,
        strength_reversal: f64,
        input: &InputState,
        variant: Variant,
    ) -> Result<Self> {
        let d = damping_from_gamma_t(gamma_t);
        let np = NoiseParams::from_gamma_t(gamma_t)?;
        let ms = match scheme {
            SchemeKind::PlainAD => MeasurementStrengths::none(),
            SchemeKind::WM => MeasurementStrengths::symmetric(strength_p, strength_reversal)?,
            SchemeKind::EAM => {
                MeasurementStrengths::new(0.0, 0.0, strength_reversal, strength_reversal)?
            }
        };
        let prep = prepare(scheme, &np, &ms)?;
        let (phi1, phi2) = input.phases();
        let probe = InputState::balanced(phi1, phi2);
        let g = coherence_factor(&teleport(&probe, &prep.rho), &probe)?;
        let zeta = closed_zeta(scheme, &np, &ms, variant)?;
        let (delta_ind_published, delta_sim_published) = variance_bounds(zeta)?;
        let fp = bounds(&qfim(&TeleportedFamily::new(*input, prep.rho.clone()))?);
        let (delta_ind_fp, delta_sim_fp, ratio_fp) = match fp {
            Ok(b) => (b.delta_ind, b.delta_sim, b.ratio_r),
            Err(_) => (f64::INFINITY, f64::INFINITY, f64::NAN),
        };
        Ok(Self {
            gamma_t,
            d,
            scheme,
            strength_p,
            strength_reversal,
            zeta,
            g,
            delta_ind_published,
            delta_sim_published,
            delta_ind_fp,
            delta_sim_fp,
            ratio_fp,
            success_probability: prep.success_probability,
        })
    }

    pub fn record(&self) -> Vec<String> {
        let mut r = vec![
            fmt_g(self.gamma_t),
            fmt_g(self.d),
            self.scheme.name().to_string(),
        ];
        r.extend(
            [
                self.strength_p,
                self.strength_reversal,
                self.zeta,
                self.g,
                self.delta_ind_published,
                self.delta_sim_published,
                self.delta_ind_fp,
                self.delta_sim_fp,
                self.ratio_fp,
                self.success_probability,
            ]
            .map(fmt_g),
        );
        r
    }
}

/// Baseline, WM at each `--p` with its optimal reversal, and EAM at each `--qr` mode.
pub fn sweep_rows(opts: &Options) -> Result<Vec<SweepRow>> {
    let input = opts.input().map_err(anyhow::Error::msg)?;
    let variant = opts.variant.into();
    let mut rows = Vec::new();
    for gt in opts.gamma_grid() {
        let d = damping_from_gamma_t(gt);
        rows.push(SweepRow::evaluate(
            gt,
            SchemeKind::PlainAD,
            0.0,
            0.0,
            &input,
            variant,
        )?);
        for &p in &opts.p {
            let opt = numeric_optimal_strength(SchemeKind::WM, d, p)?;
            rows.push(SweepRow::evaluate(
                gt,
                SchemeKind::WM,
                p,
                opt.strength,
                &input,
                variant,
            )?);
        }
        for &mode in &opts.qr {
            rows.push(SweepRow::evaluate(
                gt,
                SchemeKind::EAM,
                0.0,
                mode.strength(d),
                &input,
                variant,
            )?);
        }
    }
    Ok(rows)
}

pub fn sweep(opts: &Options) -> Result<Table> {
    let mut t = Table::new(SWEEP_HEADER);
    for row in sweep_rows(opts)? {
        t.push(row.record());
    }
    Ok(t)
}
