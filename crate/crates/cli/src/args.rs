use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qtele_core::channels::damping_from_gamma_t;
use qtele_core::schemes::Variant;
use qtele_core::teleport::InputState;

use crate::format::fmt_g;

#[derive(Debug, Parser)]
#[command(
    name = "qtele",
    version,
    about = "Qutrit teleportation metrology: figure data, sweeps and verification"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Baseline zeta1 versus gamma*t (fig2.csv).
    Fig2,
    /// Weak-measurement optimum and its success probability (fig3a.csv, fig3b.csv).
    Fig3,
    /// Environment-assisted zeta3 and success probability (fig4a.csv, fig4b.csv).
    Fig4,
    /// Probability-weighted advantage of EAM over WM (fig5.csv).
    Fig5,
    /// Per-scheme simulation rows with published and first-principles bounds (sweep.csv).
    Sweep,
    /// Run the invariant suite and write verify.json.
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Corrected,
    AsPrinted,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Corrected => Variant::Corrected,
            VariantArg::AsPrinted => Variant::AsPrinted,
        }
    }
}

/// A reversal-strength setting for the EAM figures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QrMode {
    Fixed(f64),
    /// `q_r = d`
    Optimal,
}

impl QrMode {
    pub fn strength(self, d: f64) -> f64 {
        match self {
            QrMode::Fixed(q) => q,
            QrMode::Optimal => d,
        }
    }
}

impl fmt::Display for QrMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QrMode::Fixed(q) => f.write_str(&fmt_g(*q)),
            QrMode::Optimal => f.write_str("optimal"),
        }
    }
}

impl FromStr for QrMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("optimal") {
            return Ok(QrMode::Optimal);
        }
        let q: f64 = s
            .parse()
            .map_err(|_| format!("expected a number or 'optimal', got '{s}'"))?;
        if !(0.0..=1.0).contains(&q) {
            return Err(format!("q_r must lie in [0, 1], got {q}"));
        }
        Ok(QrMode::Fixed(q))
    }
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Smallest gamma*t of the grid.
    #[arg(long, global = true, default_value_t = 0.0)]
    pub gamma_t_min: f64,
    /// Largest gamma*t of the grid.
    #[arg(long, global = true, default_value_t = 3.0)]
    pub gamma_t_max: f64,
    /// Number of gamma*t grid points.
    #[arg(long, global = true, default_value_t = 61)]
    pub steps: usize,
    /// Weak-measurement strength; repeat for several curves.
    #[arg(long = "p", global = true, default_values_t = [0.3, 0.5, 0.7, 0.9])]
    pub p: Vec<f64>,
    /// EAM reversal strength or 'optimal' (q_r = d); repeatable.
    #[arg(long = "qr", global = true, default_values = ["0", "0.5", "0.7", "optimal"])]
    pub qr: Vec<QrMode>,
    /// Smallest p of the fig5 grid.
    #[arg(long, global = true, default_value_t = 0.05)]
    pub p_min: f64,
    /// Largest p of the fig5 grid.
    #[arg(long, global = true, default_value_t = 0.95)]
    pub p_max: f64,
    /// Number of p grid points in fig5.
    #[arg(long, global = true, default_value_t = 19)]
    pub p_steps: usize,
    /// Input amplitude on |0> (default balanced).
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Input amplitude on |1>.
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    /// Input amplitude on |2>.
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    /// Relative phase of the |1> amplitude.
    #[arg(long, global = true, default_value_t = PI / 7.0)]
    pub phi1: f64,
    /// Relative phase of the |2> amplitude.
    #[arg(long, global = true, default_value_t = PI / 3.0)]
    pub phi2: f64,
    /// Which EAM u enters zeta3 in sweep.csv.
    #[arg(long, global = true, value_enum, default_value_t = VariantArg::Corrected)]
    pub variant: VariantArg,
    /// Output directory.
    #[arg(long, global = true, default_value = "./out")]
    pub out: PathBuf,
    /// Accepted for scripting symmetry; every subcommand is deterministic.
    #[arg(long, global = true)]
    pub seedless: bool,
}

impl Options {
    /// Checks flag combinations clap cannot express.
    pub fn validate(&self) -> Result<(), String> {
        if !(self.gamma_t_min >= 0.0 && self.gamma_t_min.is_finite()) {
            return Err(format!(
                "--gamma-t-min must be finite and >= 0, got {}",
                self.gamma_t_min
            ));
        }
        if !(self.gamma_t_max > self.gamma_t_min && self.gamma_t_max.is_finite()) {
            return Err(format!(
                "--gamma-t-max must be finite and exceed --gamma-t-min, got {}",
                self.gamma_t_max
            ));
        }
        if self.steps < 2 {
            return Err(format!("--steps must be at least 2, got {}", self.steps));
        }
        if let Some(p) = self.p.iter().find(|p| !(0.0..1.0).contains(*p)) {
            return Err(format!("--p must lie in [0, 1), got {p}"));
        }
        if !(0.0 <= self.p_min && self.p_min < self.p_max && self.p_max < 1.0) {
            return Err(format!(
                "need 0 <= --p-min < --p-max < 1, got {} and {}",
                self.p_min, self.p_max
            ));
        }
        if self.p_steps < 2 {
            return Err(format!(
                "--p-steps must be at least 2, got {}",
                self.p_steps
            ));
        }
        self.input().map(|_| ())
    }

    pub fn gamma_grid(&self) -> Vec<f64> {
        linspace(self.gamma_t_min, self.gamma_t_max, self.steps)
    }

    pub fn p_grid(&self) -> Vec<f64> {
        linspace(self.p_min, self.p_max, self.p_steps)
    }

    /// Balanced unless any amplitude is given, in which case all three are required.
    pub fn input(&self) -> Result<InputState, String> {
        match (self.alpha, self.beta, self.delta) {
            (None, None, None) => Ok(InputState::balanced(self.phi1, self.phi2)),
            (Some(a), Some(b), Some(d)) => InputState::new(a, b, d, self.phi1, self.phi2)
                .map_err(|e| format!("input state: {e}")),
            _ => Err("--alpha, --beta and --delta must be given together".into()),
        }
    }
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect()
}

/// `(gamma_t, d)` pairs.
pub fn damping_grid(gamma: &[f64]) -> Vec<(f64, f64)> {
    gamma
        .iter()
        .map(|&g| (g, damping_from_gamma_t(g)))
        .collect()
}
