//! Figure data tables and CSV emission.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use qtele_core::schemes::{
    delta_comparison, numeric_optimal_strength, published_optimal_strength, success_probability,
    zeta1, zeta3, SchemeKind, Variant,
};

use crate::args::{damping_grid, Options};
use crate::format::{fmt_bool, fmt_g};

pub const FIG2_HEADER: &[&str] = &["gamma_t", "d", "zeta1"];
pub const FIG3A_HEADER: &[&str] = &[
    "gamma_t",
    "p",
    "zeta2_opt",
    "strength_opt_numeric",
    "strength_opt_published",
    "published_in_range",
];
pub const FIG3B_HEADER: &[&str] = &["gamma_t", "p", "P_wm_opt"];
pub const FIG4A_HEADER: &[&str] = &["gamma_t", "qr_mode", "zeta3_corrected", "zeta3_as_printed"];
pub const FIG4B_HEADER: &[&str] = &["gamma_t", "qr_mode", "P_eam"];
pub const FIG5_HEADER: &[&str] = &["gamma_t", "p", "delta"];

/// A header plus pre-formatted rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &'static [&'static str]) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        Ok(w.into_inner().map_err(|e| e.into_error())?)
    }

    pub fn write(&self, dir: &Path, name: &str) -> Result<PathBuf> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join(name);
        fs::write(&path, self.to_csv()?).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

pub fn fig2(opts: &Options) -> Result<Table> {
    let mut t = Table::new(FIG2_HEADER);
    for (gt, d) in damping_grid(&opts.gamma_grid()) {
        t.push(vec![fmt_g(gt), fmt_g(d), fmt_g(zeta1(d)?)]);
    }
    Ok(t)
}

pub fn fig3(opts: &Options) -> Result<(Table, Table)> {
    let mut a = Table::new(FIG3A_HEADER);
    let mut b = Table::new(FIG3B_HEADER);
    for (gt, d) in damping_grid(&opts.gamma_grid()) {
        for &p in &opts.p {
            let opt = numeric_optimal_strength(SchemeKind::WM, d, p)?;
            let published = published_optimal_strength(SchemeKind::WM, d, p)?;
            a.push(vec![
                fmt_g(gt),
                fmt_g(p),
                fmt_g(opt.zeta_opt),
                fmt_g(opt.strength),
                fmt_g(published.value),
                fmt_bool(published.in_range),
            ]);
            let prob = success_probability(SchemeKind::WM, d, p, opt.strength);
            b.push(vec![fmt_g(gt), fmt_g(p), fmt_g(prob)]);
        }
    }
    Ok((a, b))
}

pub fn fig4(opts: &Options) -> Result<(Table, Table)> {
    let mut a = Table::new(FIG4A_HEADER);
    let mut b = Table::new(FIG4B_HEADER);
    for (gt, d) in damping_grid(&opts.gamma_grid()) {
        for &mode in &opts.qr {
            let q = mode.strength(d);
            let corrected = zeta3(d, q, Variant::Corrected)?.zeta;
            let printed = zeta3(d, q, Variant::AsPrinted)?.zeta;
            a.push(vec![
                fmt_g(gt),
                mode.to_string(),
                fmt_g(corrected),
                fmt_g(printed),
            ]);
            b.push(vec![
                fmt_g(gt),
                mode.to_string(),
                fmt_g(success_probability(SchemeKind::EAM, d, 0.0, q)),
            ]);
        }
    }
    Ok((a, b))
}

pub fn fig5(opts: &Options) -> Result<Table> {
    let mut t = Table::new(FIG5_HEADER);
    let ps = opts.p_grid();
    for (gt, d) in damping_grid(&opts.gamma_grid()) {
        for &p in &ps {
            t.push(vec![fmt_g(gt), fmt_g(p), fmt_g(delta_comparison(d, p)?)]);
        }
    }
    Ok(t)
}
