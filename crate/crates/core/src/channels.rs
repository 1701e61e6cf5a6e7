//! Operators of the protocol: the V-type amplitude damping channel, the weak
//! measurement and its reversal, and the qutrit gates. Also channel and
//! post-selected application with probability bookkeeping.
//!
//! Basis convention: `|0>, |1>, |2>` index rows/columns 0, 1, 2. For two
//! qutrits `|j, k>` sits at index `3 j + k` (the 1-based label `|3j+k+1>` of
//! the element tables, shifted to 0-based).

use std::f64::consts::PI;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::tensor::{dagger, hermitian_eig, kron, ComplexMatrix, C64, ONE};

/// Tolerance for completeness and contraction checks.
pub const KRAUS_TOL: f64 = 1e-12;
/// Post-selection probabilities at or below this are treated as impossible.
pub const MIN_PROBABILITY: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KrausKind {
    /// Trace preserving: `sum K^dagger K = I`.
    FullChannel,
    /// Trace non-increasing: `sum K^dagger K <= I`.
    Selective,
}

#[derive(Debug, Clone)]
pub struct KrausSet {
    operators: Vec<ComplexMatrix>,
    kind: KrausKind,
}

impl KrausSet {
    pub fn new(operators: Vec<ComplexMatrix>, kind: KrausKind) -> Result<Self> {
        let Some(first) = operators.first() else {
            return Err(Error::InvalidKeep("Kraus set is empty".into()));
        };
        let dim = first.dim();
        if let Some(bad) = operators.iter().find(|k| k.dim() != dim) {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: bad.dim(),
            });
        }
        let set = Self { operators, kind };
        match kind {
            KrausKind::FullChannel => {
                let deviation = set.completeness_deviation();
                if deviation > KRAUS_TOL {
                    return Err(Error::Incomplete { deviation });
                }
            }
            KrausKind::Selective => {
                let excess = contraction_excess(&set.completeness_sum())?;
                if excess > KRAUS_TOL {
                    return Err(Error::NotContraction { excess });
                }
            }
        }
        Ok(set)
    }

    pub fn selective(op: ComplexMatrix) -> Result<Self> {
        Self::new(vec![op], KrausKind::Selective)
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn kind(&self) -> KrausKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.operators[0].dim()
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// `sum_k K_k^dagger K_k`
    pub fn completeness_sum(&self) -> ComplexMatrix {
        self.operators
            .iter()
            .fold(ComplexMatrix::zeros(self.dim()), |acc, k| {
                &acc + &(&dagger(k) * k)
            })
    }

    /// Largest entry of `|sum K^dagger K - I|`.
    pub fn completeness_deviation(&self) -> f64 {
        self.completeness_sum()
            .max_abs_diff(&ComplexMatrix::identity(self.dim()))
    }

    /// All products `A_i (x) B_j`, `i` major. The result is a full channel
    /// only when both factors are.
    pub fn tensor(&self, other: &KrausSet) -> KrausSet {
        let operators = self
            .operators
            .iter()
            .flat_map(|a| other.operators.iter().map(move |b| kron(a, b)))
            .collect();
        let kind = if self.kind == KrausKind::FullChannel && other.kind == KrausKind::FullChannel {
            KrausKind::FullChannel
        } else {
            KrausKind::Selective
        };
        KrausSet { operators, kind }
    }
}

/// Largest eigenvalue of `m - I` (positive when `m` is not below the identity).
fn contraction_excess(m: &ComplexMatrix) -> Result<f64> {
    let shifted = m - &ComplexMatrix::identity(m.dim());
    Ok(hermitian_eig(&shifted)?.eigenvalues[0])
}

fn check_unit(name: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::OutOfRange { name, value })
    }
}

/// Damping strengths of the two excited levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    d1: f64,
    d2: f64,
    gamma_t: Option<f64>,
}

impl NoiseParams {
    pub fn new(d1: f64, d2: f64) -> Result<Self> {
        Ok(Self {
            d1: check_unit("d1", d1)?,
            d2: check_unit("d2", d2)?,
            gamma_t: None,
        })
    }

    pub fn symmetric(d: f64) -> Result<Self> {
        Self::new(d, d)
    }

    /// Equal decay rates: `d1 = d2 = 1 - exp(-gamma t)`.
    pub fn from_gamma_t(gamma_t: f64) -> Result<Self> {
        if !(gamma_t >= 0.0) {
            return Err(Error::OutOfRange {
                name: "gamma_t",
                value: gamma_t,
            });
        }
        let d = damping_from_gamma_t(gamma_t);
        Ok(Self {
            d1: d,
            d2: d,
            gamma_t: Some(gamma_t),
        })
    }

    pub fn d1(&self) -> f64 {
        self.d1
    }

    pub fn d2(&self) -> f64 {
        self.d2
    }

    pub fn gamma_t(&self) -> Option<f64> {
        self.gamma_t
    }

    pub fn is_symmetric(&self) -> bool {
        self.d1 == self.d2
    }
}

pub fn damping_from_gamma_t(gamma_t: f64) -> f64 {
    -(-gamma_t).exp_m1()
}

/// Weak-measurement strengths `p, q` and reversal strengths `p_r, q_r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementStrengths {
    p: f64,
    q: f64,
    p_r: f64,
    q_r: f64,
}

impl MeasurementStrengths {
    pub fn new(p: f64, q: f64, p_r: f64, q_r: f64) -> Result<Self> {
        Ok(Self {
            p: check_unit("p", p)?,
            q: check_unit("q", q)?,
            p_r: check_unit("p_r", p_r)?,
            q_r: check_unit("q_r", q_r)?,
        })
    }

    pub fn symmetric(p: f64, p_r: f64) -> Result<Self> {
        Self::new(p, p, p_r, p_r)
    }

    pub fn none() -> Self {
        Self {
            p: 0.0,
            q: 0.0,
            p_r: 0.0,
            q_r: 0.0,
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn p_r(&self) -> f64 {
        self.p_r
    }

    pub fn q_r(&self) -> f64 {
        self.q_r
    }

    pub fn is_symmetric(&self) -> bool {
        self.p == self.q && self.p_r == self.q_r
    }
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `E0, E1, E2` of the V-type amplitude damping channel.
pub fn ad_kraus(np: &NoiseParams) -> KrausSet {
    let e0 = ComplexMatrix::real_diag(&[1.0, (1.0 - np.d1).sqrt(), (1.0 - np.d2).sqrt()]);
    let mut e1 = ComplexMatrix::zeros(3);
    e1[(0, 1)] = re(np.d1.sqrt());
    let mut e2 = ComplexMatrix::zeros(3);
    e2[(0, 2)] = re(np.d2.sqrt());
    KrausSet {
        operators: vec![e0, e1, e2],
        kind: KrausKind::FullChannel,
    }
}

/// The no-jump operator `E0` alone, as a post-selected operation.
pub fn ad_no_jump(np: &NoiseParams) -> ComplexMatrix {
    ad_kraus(np).operators.swap_remove(0)
}

/// `M0, M1, M2`. Only `M0` is used by the protocol; see [`wm_kept`].
pub fn wm_kraus(ms: &MeasurementStrengths) -> KrausSet {
    let m0 = wm_operator(ms);
    let m1 = ComplexMatrix::real_diag(&[0.0, ms.p.sqrt(), 0.0]);
    let m2 = ComplexMatrix::real_diag(&[0.0, 0.0, ms.q.sqrt()]);
    KrausSet {
        operators: vec![m0, m1, m2],
        kind: KrausKind::FullChannel,
    }
}

/// `M0 = diag(1, sqrt(1-p), sqrt(1-q))`
pub fn wm_operator(ms: &MeasurementStrengths) -> ComplexMatrix {
    ComplexMatrix::real_diag(&[1.0, (1.0 - ms.p).sqrt(), (1.0 - ms.q).sqrt()])
}

/// The retained weak-measurement outcome `{M0}` as a selective set.
pub fn wm_kept(ms: &MeasurementStrengths) -> KrausSet {
    KrausSet {
        operators: vec![wm_operator(ms)],
        kind: KrausKind::Selective,
    }
}

/// Measurement reversal `M_r = diag(sqrt((1-p_r)(1-q_r)), sqrt(1-q_r), sqrt(1-p_r))`.
pub fn qmr_operator(ms: &MeasurementStrengths) -> ComplexMatrix {
    let (pb, qb) = (1.0 - ms.p_r, 1.0 - ms.q_r);
    ComplexMatrix::real_diag(&[(pb * qb).sqrt(), qb.sqrt(), pb.sqrt()])
}

pub fn qmr_set(ms: &MeasurementStrengths) -> KrausSet {
    KrausSet {
        operators: vec![qmr_operator(ms)],
        kind: KrausKind::Selective,
    }
}

/// `omega = exp(2 pi i / 3)`
pub fn omega() -> C64 {
    C64::from_polar(1.0, 2.0 * PI / 3.0)
}

fn omega_pow(k: i64) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * k.rem_euclid(3) as f64 / 3.0)
}

/// `X^i |m> = |m + i mod 3>`
pub fn gate_x(i: i64) -> ComplexMatrix {
    let shift = i.rem_euclid(3) as usize;
    let mut x = ComplexMatrix::zeros(3);
    for m in 0..3 {
        x[((m + shift) % 3, m)] = ONE;
    }
    x
}

/// `Z^k |m> = omega^(k m) |m>`
pub fn gate_z(k: i64) -> ComplexMatrix {
    ComplexMatrix::diag(&[omega_pow(0), omega_pow(k), omega_pow(2 * k)])
}

/// Generalized Hadamard `(1/sqrt 3) sum_{m,n} omega^(m n) |m><n|`.
pub fn gate_h() -> ComplexMatrix {
    let s = 1.0 / 3f64.sqrt();
    ComplexMatrix::from_fn(3, |m, n| omega_pow((m * n) as i64) * s)
}

/// Controlled right shift `|m>|n> -> |m>|n + m>`.
pub fn gate_rc() -> ComplexMatrix {
    controlled_shift(1)
}

/// Controlled left shift `|m>|n> -> |m>|n - m>`.
pub fn gate_lc() -> ComplexMatrix {
    controlled_shift(-1)
}

fn controlled_shift(sign: i64) -> ComplexMatrix {
    let mut g = ComplexMatrix::zeros(9);
    for m in 0..3i64 {
        for n in 0..3i64 {
            let target = (n + sign * m).rem_euclid(3);
            g[((3 * m + target) as usize, (3 * m + n) as usize)] = ONE;
        }
    }
    g
}

/// `sum_k K_k rho K_k^dagger` for a trace-preserving set.
pub fn apply_channel(rho: &DensityMatrix, ks: &KrausSet) -> Result<DensityMatrix> {
    if ks.kind != KrausKind::FullChannel {
        return Err(Error::SelectiveNotChannel);
    }
    if ks.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: ks.dim(),
        });
    }
    let out = ks
        .operators
        .iter()
        .fold(ComplexMatrix::zeros(rho.dim()), |acc, k| {
            &acc + &rho.conjugate_by(k)
        });
    Ok(DensityMatrix::new_unchecked(out))
}

/// Post-selects on `op`: returns the normalized state and its probability
/// `tr(op rho op^dagger)`.
pub fn apply_selective(rho: &DensityMatrix, op: &ComplexMatrix) -> Result<(DensityMatrix, f64)> {
    if op.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: op.dim(),
        });
    }
    let excess = contraction_excess(&(&dagger(op) * op))?;
    if excess > KRAUS_TOL {
        return Err(Error::NotContraction { excess });
    }
    let unnormalized = rho.conjugate_by(op);
    let probability = unnormalized.trace().re;
    if !(probability > MIN_PROBABILITY) {
        return Err(Error::VanishingProbability { probability });
    }
    Ok((
        DensityMatrix::new_unchecked(unnormalized.scale(1.0 / probability)),
        probability,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::ZERO;
    use approx::assert_relative_eq;

    fn ket(m: usize) -> Vec<C64> {
        let mut v = vec![ZERO; 3];
        v[m] = ONE;
        v
    }

    fn ket2(m: usize, n: usize) -> Vec<C64> {
        let mut v = vec![ZERO; 9];
        v[3 * m + n] = ONE;
        v
    }

    fn is_unitary(u: &ComplexMatrix) -> bool {
        (&(u * &dagger(u)) - &ComplexMatrix::identity(u.dim())).frobenius_norm() < 1e-12
    }

    #[test]
    fn ad_kraus_limits() {
        let ks = ad_kraus(&NoiseParams::symmetric(0.0).unwrap());
        assert_eq!(ks.operators()[0], ComplexMatrix::identity(3));
        assert_eq!(ks.operators()[1], ComplexMatrix::zeros(3));
        assert_eq!(ks.operators()[2], ComplexMatrix::zeros(3));

        let ks = ad_kraus(&NoiseParams::symmetric(1.0).unwrap());
        assert_eq!(
            ks.operators()[0],
            ComplexMatrix::real_diag(&[1.0, 0.0, 0.0])
        );
        assert_eq!(ks.operators()[1][(0, 1)], ONE);
        assert_eq!(ks.operators()[2][(0, 2)], ONE);

        let ks = ad_kraus(&NoiseParams::new(0.3, 0.7).unwrap());
        assert!(ks.completeness_deviation() < 1e-12);
        // E1 dagger puts sqrt(d1) at [1][0].
        assert_relative_eq!(dagger(&ks.operators()[1])[(1, 0)].re, 0.3f64.sqrt());
    }

    #[test]
    fn noise_params_validate() {
        assert!(NoiseParams::new(-0.1, 0.5).is_err());
        assert!(NoiseParams::new(0.5, 1.2).is_err());
        assert!(NoiseParams::from_gamma_t(-1.0).is_err());
        assert!(NoiseParams::from_gamma_t(f64::NAN).is_err());
        let np = NoiseParams::from_gamma_t(2f64.ln()).unwrap();
        assert_relative_eq!(np.d1(), 0.5, epsilon = 1e-15);
        assert_eq!(np.d1(), np.d2());
        assert_eq!(np.gamma_t(), Some(2f64.ln()));
    }

    #[test]
    fn wm_operators() {
        assert_eq!(
            wm_operator(&MeasurementStrengths::none()),
            ComplexMatrix::identity(3)
        );
        let ms = MeasurementStrengths::symmetric(0.5, 0.0).unwrap();
        assert_eq!(
            wm_operator(&ms),
            ComplexMatrix::real_diag(&[1.0, 0.5f64.sqrt(), 0.5f64.sqrt()])
        );
        let ms = MeasurementStrengths::new(0.2, 0.9, 0.0, 0.0).unwrap();
        assert!(wm_kraus(&ms).completeness_deviation() < 1e-12);
        assert_eq!(wm_kept(&ms).kind(), KrausKind::Selective);
        assert!(MeasurementStrengths::new(0.2, 1.1, 0.0, 0.0).is_err());
        assert!(MeasurementStrengths::new(0.2, 0.1, -0.5, 0.0).is_err());
    }

    #[test]
    fn qmr_operator_values() {
        assert_eq!(
            qmr_operator(&MeasurementStrengths::none()),
            ComplexMatrix::identity(3)
        );
        let ms = MeasurementStrengths::symmetric(0.0, 0.5).unwrap();
        let m = qmr_operator(&ms);
        assert!(
            m.max_abs_diff(&ComplexMatrix::real_diag(&[
                0.5,
                0.5f64.sqrt(),
                0.5f64.sqrt()
            ])) < 1e-15
        );
        let ms = MeasurementStrengths::new(0.0, 0.0, 0.37, 0.81).unwrap();
        assert!(KrausSet::selective(qmr_operator(&ms)).is_ok());
    }

    #[test]
    fn kraus_set_rejects_bad_sets() {
        let twice = ComplexMatrix::identity(3).scale(2.0);
        assert!(matches!(
            KrausSet::new(
                vec![ComplexMatrix::identity(3), twice.clone()],
                KrausKind::FullChannel
            ),
            Err(Error::Incomplete { .. })
        ));
        assert!(matches!(
            KrausSet::selective(twice),
            Err(Error::NotContraction { .. })
        ));
        assert!(KrausSet::new(vec![], KrausKind::Selective).is_err());
        assert!(matches!(
            KrausSet::new(
                vec![ComplexMatrix::identity(3), ComplexMatrix::zeros(9)],
                KrausKind::Selective
            ),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn pauli_gates() {
        assert_eq!(gate_x(0), ComplexMatrix::identity(3));
        assert_eq!(gate_x(1).apply(&ket(2)), ket(0));
        assert_eq!(gate_x(-1), gate_x(2));
        let z = gate_z(1).apply(&ket(2));
        assert!((z[2] - omega() * omega()).norm() < 1e-15);
        assert!((gate_z(3).max_abs_diff(&ComplexMatrix::identity(3))) < 1e-15);
    }

    #[test]
    fn z_x_ordering_phase() {
        // Z X |0> = Z |1> = omega |1>, X Z |0> = X |0> = |1>.
        let zx = &gate_z(1) * &gate_x(1);
        let xz = &gate_x(1) * &gate_z(1);
        let a = zx.apply(&ket(0));
        let b = xz.apply(&ket(0));
        assert!((a[1] - omega() * b[1]).norm() < 1e-15);
        // On |1> the orderings differ by omega as well: Z X |1> = omega^2 |2>, X Z |1> = omega |2>.
        let a = zx.apply(&ket(1));
        let b = xz.apply(&ket(1));
        assert!((a[2] - omega() * b[2]).norm() < 1e-15);
    }

    #[test]
    fn hadamard() {
        let h = gate_h();
        let s = 1.0 / 3f64.sqrt();
        let col = h.apply(&ket(0));
        assert!(col.iter().all(|z| (z - C64::new(s, 0.0)).norm() < 1e-15));
        assert!(is_unitary(&h));
        let expected = C64::from_polar(s, 4.0 * PI / 3.0);
        assert!((h[(1, 2)] - expected).norm() < 1e-15);
    }

    #[test]
    fn controlled_shifts() {
        let rc = gate_rc();
        let lc = gate_lc();
        assert_eq!(rc.apply(&ket2(1, 1)), ket2(1, 2));
        assert_eq!(lc.apply(&ket2(1, 1)), ket2(1, 0));
        for n in 0..3 {
            assert_eq!(rc.apply(&ket2(0, n)), ket2(0, n));
        }
        assert_eq!(&lc * &rc, ComplexMatrix::identity(9));
        for g in [&rc, &lc] {
            assert!(is_unitary(g));
            assert!(g.as_slice().iter().all(|z| *z == ZERO || *z == ONE));
        }
        for g in [gate_x(1), gate_x(2), gate_z(1), gate_z(2)] {
            assert!(is_unitary(&g));
        }
    }

    #[test]
    fn apply_channel_and_selective() {
        let rho = DensityMatrix::maximally_mixed(3);
        let id = KrausSet::new(vec![ComplexMatrix::identity(3)], KrausKind::FullChannel).unwrap();
        assert_eq!(apply_channel(&rho, &id).unwrap(), rho);
        assert!(matches!(
            apply_channel(&rho, &wm_kept(&MeasurementStrengths::none())),
            Err(Error::SelectiveNotChannel)
        ));
        assert!(matches!(
            apply_channel(&DensityMatrix::maximally_mixed(9), &id),
            Err(Error::DimensionMismatch { .. })
        ));

        let (s, p) = apply_selective(&rho, &ComplexMatrix::identity(3)).unwrap();
        assert_eq!(s, rho);
        assert_eq!(p, 1.0);

        let m0 = wm_operator(&MeasurementStrengths::none());
        let rho9 = DensityMatrix::maximally_mixed(9);
        let (s, p) = apply_selective(&rho9, &kron(&m0, &m0)).unwrap();
        assert!(s.max_abs_diff(&rho9) < 1e-15);
        assert_relative_eq!(p, 1.0, epsilon = 1e-15);

        let mr = qmr_operator(&MeasurementStrengths::symmetric(0.0, 0.5).unwrap());
        let (_, p) = apply_selective(&rho9, &kron(&mr, &mr)).unwrap();
        assert_relative_eq!(p, (0.25f64 + 0.5 + 0.5).powi(2) / 9.0, epsilon = 1e-15);
        assert_relative_eq!(p, 0.1736, epsilon = 1e-4);
    }

    #[test]
    fn vanishing_probability() {
        let excited = DensityMatrix::pure(&ket(1)).unwrap();
        let np = NoiseParams::symmetric(1.0).unwrap();
        assert!(matches!(
            apply_selective(&excited, &ad_no_jump(&np)),
            Err(Error::VanishingProbability { .. })
        ));
    }
}
