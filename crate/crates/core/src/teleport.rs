//! Shared-resource preparation and the three-qutrit teleportation circuit.
//!
//! Qutrit 1 carries the input, qutrits 2 and 3 hold the shared resource
//! (Alice and Bob). Alice applies `L_C` (control 1, target 2), then `H^dagger`
//! on qutrit 1, and measures both in the computational basis. Bob applies the
//! correction `Z^a X^b` looked up from a [`CorrectionTable`]. The table is not
//! hand-written: [`derive_correction_table`] finds it by brute force against
//! the ideal resource, so the circuit convention validates itself.
//!
//! Classical communication is free and noiseless, so the output is the
//! probability-weighted sum of the corrected branch states.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::channels::{
    ad_kraus, ad_no_jump, apply_channel, apply_selective, gate_h, gate_lc, gate_x, gate_z,
    qmr_operator, wm_operator, MeasurementStrengths, NoiseParams, MIN_PROBABILITY,
};
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::tensor::{dagger, kron, kron_all, ComplexMatrix, C64, ZERO};

pub const DEFAULT_PHI1: f64 = PI / 7.0;
pub const DEFAULT_PHI2: f64 = PI / 3.0;

const NORM_TOL: f64 = 1e-12;
/// Off-diagonal magnitude agreement required by [`coherence_factor`].
pub const SYMMETRIC_FAMILY_TOL: f64 = 1e-10;
/// Frobenius tolerance used when searching for branch corrections.
const CORRECTION_TOL: f64 = 1e-10;

/// `alpha |0> + beta e^{i phi1} |1> + delta e^{i phi2} |2>` with real amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputState {
    alpha: f64,
    beta: f64,
    delta: f64,
    phi1: f64,
    phi2: f64,
}

impl InputState {
    pub fn new(alpha: f64, beta: f64, delta: f64, phi1: f64, phi2: f64) -> Result<Self> {
        let norm = alpha * alpha + beta * beta + delta * delta;
        if !((norm - 1.0).abs() <= NORM_TOL) {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            alpha,
            beta,
            delta,
            phi1,
            phi2,
        })
    }

    /// `alpha = beta = delta = 1/sqrt 3`.
    pub fn balanced(phi1: f64, phi2: f64) -> Self {
        let s = 1.0 / 3f64.sqrt();
        Self {
            alpha: s,
            beta: s,
            delta: s,
            phi1,
            phi2,
        }
    }

    pub fn with_phases(&self, phi1: f64, phi2: f64) -> Self {
        Self {
            phi1,
            phi2,
            ..*self
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn phases(&self) -> (f64, f64) {
        (self.phi1, self.phi2)
    }

    pub fn amplitudes(&self) -> [f64; 3] {
        [self.alpha, self.beta, self.delta]
    }

    pub fn is_balanced(&self) -> bool {
        let s = 1.0 / 3f64.sqrt();
        self.amplitudes().iter().all(|a| (a - s).abs() <= NORM_TOL)
    }

    pub fn ket(&self) -> Vec<C64> {
        vec![
            C64::new(self.alpha, 0.0),
            C64::from_polar(self.beta, self.phi1),
            C64::from_polar(self.delta, self.phi2),
        ]
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.ket())
    }
}

impl Default for InputState {
    fn default() -> Self {
        Self::balanced(DEFAULT_PHI1, DEFAULT_PHI2)
    }
}

/// A prepared two-qutrit resource and the probability that its
/// post-selections succeeded.
#[derive(Debug, Clone)]
pub struct ResourcePrep {
    pub rho: DensityMatrix,
    pub success_probability: f64,
}

/// Bob's qutrit after teleportation.
#[derive(Debug, Clone)]
pub struct OutputState {
    pub rho_out: DensityMatrix,
}

/// `(|00> + |11> + |22>) / sqrt 3`
pub fn bell_ket() -> Vec<C64> {
    let s = 1.0 / 3f64.sqrt();
    let mut v = vec![ZERO; 9];
    for k in 0..3 {
        v[4 * k] = C64::new(s, 0.0);
    }
    v
}

pub fn bell_resource() -> DensityMatrix {
    DensityMatrix::new_unchecked(ComplexMatrix::outer(&bell_ket()))
}

/// Both halves of the resource pass through independent damping channels.
pub fn prepare_plain(np: &NoiseParams) -> ResourcePrep {
    let channel = ad_kraus(np).tensor(&ad_kraus(np));
    let rho = apply_channel(&bell_resource(), &channel)
        .expect("damping channel is complete and 9-dimensional");
    ResourcePrep {
        rho,
        success_probability: 1.0,
    }
}

/// Weak measurement `M0 (x) M0`, damping, then reversal `M_r (x) M_r`.
/// The success probability is the product of both post-selections.
pub fn prepare_wm(np: &NoiseParams, ms: &MeasurementStrengths) -> Result<ResourcePrep> {
    let m0 = wm_operator(ms);
    let mr = qmr_operator(ms);
    let (measured, p_keep) = apply_selective(&bell_resource(), &kron(&m0, &m0))?;
    let damped = apply_channel(&measured, &ad_kraus(np).tensor(&ad_kraus(np)))?;
    let (rho, p_reverse) = apply_selective(&damped, &kron(&mr, &mr))?;
    Ok(ResourcePrep {
        rho,
        success_probability: p_keep * p_reverse,
    })
}

/// No-click environment monitoring (`E00 = E0 (x) E0`) followed by reversal.
pub fn prepare_eam(np: &NoiseParams, ms: &MeasurementStrengths) -> Result<ResourcePrep> {
    let e0 = ad_no_jump(np);
    let mr = qmr_operator(ms);
    let (no_click, p_click) = apply_selective(&bell_resource(), &kron(&e0, &e0))?;
    let (rho, p_reverse) = apply_selective(&no_click, &kron(&mr, &mr))?;
    Ok(ResourcePrep {
        rho,
        success_probability: p_click * p_reverse,
    })
}

/// Correction `Z^a X^b` applied by Bob for each measurement outcome `(m, n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrectionTable {
    exponents: [[(u8, u8); 3]; 3],
}

impl CorrectionTable {
    /// The derived table, computed on first use.
    pub fn get() -> &'static CorrectionTable {
        static TABLE: OnceLock<CorrectionTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            derive_correction_table()
                .expect("teleportation circuit admits a unique correction per outcome")
        })
    }

    /// `(a, b)` for outcome `(m, n)`.
    pub fn exponents(&self, m: usize, n: usize) -> (u8, u8) {
        self.exponents[m][n]
    }

    pub fn unitary(&self, m: usize, n: usize) -> ComplexMatrix {
        let (a, b) = self.exponents[m][n];
        correction_unitary(a, b)
    }
}

fn correction_unitary(a: u8, b: u8) -> ComplexMatrix {
    &gate_z(a as i64) * &gate_x(b as i64)
}

/// `(H^dagger (x) I (x) I) (L_C (x) I)` on qutrits 1, 2, 3.
fn analysis_unitary() -> &'static ComplexMatrix {
    static U: OnceLock<ComplexMatrix> = OnceLock::new();
    U.get_or_init(|| {
        let id = ComplexMatrix::identity(3);
        let hadamard = kron_all(&[&dagger(&gate_h()), &id, &id]);
        let shift = kron(&gate_lc(), &id);
        &hadamard * &shift
    })
}

/// One measurement outcome of Alice, before correction.
#[derive(Debug, Clone)]
pub struct Branch {
    pub outcome: (usize, usize),
    pub probability: f64,
    /// Bob's unnormalized state; its trace is `probability`.
    pub bob_unnormalized: ComplexMatrix,
}

/// Runs the circuit up to Alice's measurement. `rho_in` may be any 3x3
/// operator; the map is linear in both arguments.
pub fn teleport_branches(rho_in: &ComplexMatrix, resource: &ComplexMatrix) -> Result<Vec<Branch>> {
    if rho_in.dim() != 3 {
        return Err(Error::DimensionMismatch {
            left: 3,
            right: rho_in.dim(),
        });
    }
    if resource.dim() != 9 {
        return Err(Error::DimensionMismatch {
            left: 9,
            right: resource.dim(),
        });
    }
    let joint = kron(rho_in, resource).conjugate_by(analysis_unitary());
    let mut branches = Vec::with_capacity(9);
    for m in 0..3 {
        for n in 0..3 {
            let base = 9 * m + 3 * n;
            let bob = ComplexMatrix::from_fn(3, |k, l| joint[(base + k, base + l)]);
            branches.push(Branch {
                outcome: (m, n),
                probability: bob.trace().re,
                bob_unnormalized: bob,
            });
        }
    }
    Ok(branches)
}

/// The teleportation map applied to an arbitrary 3x3 operator.
pub fn teleport_operator(
    rho_in: &ComplexMatrix,
    resource: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    teleport_with_table(rho_in, resource, CorrectionTable::get())
}

fn teleport_with_table(
    rho_in: &ComplexMatrix,
    resource: &ComplexMatrix,
    table: &CorrectionTable,
) -> Result<ComplexMatrix> {
    let branches = teleport_branches(rho_in, resource)?;
    Ok(branches.iter().fold(ComplexMatrix::zeros(3), |acc, b| {
        let (m, n) = b.outcome;
        &acc + &b.bob_unnormalized.conjugate_by(&table.unitary(m, n))
    }))
}

pub fn teleport(in_state: &InputState, resource: &DensityMatrix) -> OutputState {
    let out = teleport_operator(&in_state.projector(), resource)
        .expect("input and resource dimensions are fixed by their types");
    OutputState {
        rho_out: DensityMatrix::new_unchecked(out),
    }
}

/// Finds, for every outcome, the unique `Z^a X^b` that restores the input
/// when the resource is ideal. Three pairwise non-orthogonal inputs are used,
/// which pins the corrected branch map to the identity.
pub fn derive_correction_table() -> Result<CorrectionTable> {
    let s2 = 0.5f64.sqrt();
    let s3 = 1.0 / 3f64.sqrt();
    let probes: [Vec<C64>; 3] = [
        vec![C64::new(1.0, 0.0), ZERO, ZERO],
        vec![C64::new(s2, 0.0), C64::new(s2, 0.0), ZERO],
        vec![C64::new(s3, 0.0), C64::new(0.0, s3), C64::new(s3, 0.0)],
    ];
    let resource = bell_resource();
    let probe_branches: Vec<(ComplexMatrix, Vec<Branch>)> = probes
        .iter()
        .map(|ket| {
            let rho = ComplexMatrix::outer(ket);
            let branches = teleport_branches(&rho, &resource)?;
            Ok((rho, branches))
        })
        .collect::<Result<_>>()?;

    let mut exponents = [[(0u8, 0u8); 3]; 3];
    for m in 0..3 {
        for n in 0..3 {
            let mut found = Vec::new();
            for a in 0..3u8 {
                for b in 0..3u8 {
                    let u = correction_unitary(a, b);
                    let restores = probe_branches.iter().all(|(target, branches)| {
                        let branch = &branches[3 * m + n];
                        branch.probability > MIN_PROBABILITY
                            && branch
                                .bob_unnormalized
                                .conjugate_by(&u)
                                .scale(1.0 / branch.probability)
                                .distance(target)
                                < CORRECTION_TOL
                    });
                    if restores {
                        found.push((a, b));
                    }
                }
            }
            match found.as_slice() {
                [] => return Err(Error::NoCorrection { m, n }),
                [single] => exponents[m][n] = *single,
                _ => {
                    return Err(Error::AmbiguousCorrection {
                        m,
                        n,
                        count: found.len(),
                    })
                }
            }
        }
    }
    Ok(CorrectionTable { exponents })
}

/// Builds the output family shared by all three schemes:
/// diagonal `mix/3 + (1 - mix) |psi_j|^2`, off-diagonal `coherence psi_j psi_k^*`.
fn output_family(mix: f64, coherence: f64, input: &InputState) -> OutputState {
    let psi = input.ket();
    let rho = ComplexMatrix::from_fn(3, |j, k| {
        if j == k {
            C64::new(mix / 3.0 + (1.0 - mix) * psi[j].norm_sqr(), 0.0)
        } else {
            psi[j] * psi[k].conj() * coherence
        }
    });
    OutputState {
        rho_out: DensityMatrix::new_unchecked(rho),
    }
}

/// Plain damping: `A = 2d - 2d^2`, `B = 1 + d^2/3 - 4d/3`.
pub fn closed_output_plain(np: &NoiseParams, input: &InputState) -> Result<OutputState> {
    if !np.is_symmetric() {
        return Err(Error::AsymmetricParameters);
    }
    let d = np.d1();
    let a = 2.0 * d - 2.0 * d * d;
    let b = 1.0 + d * d / 3.0 - 4.0 * d / 3.0;
    Ok(output_family(a, b, input))
}

/// Normalization of the weak-measurement pipeline (its success probability).
pub fn wm_normalization(d: f64, ms: &MeasurementStrengths) -> f64 {
    let db = 1.0 - d;
    let (pb, qb, prb, qrb) = (1.0 - ms.p(), 1.0 - ms.q(), 1.0 - ms.p_r(), 1.0 - ms.q_r());
    prb * prb * qrb * qrb * (d * d * pb * pb + d * d * qb * qb + 1.0) / 3.0
        + 2.0 / 3.0 * d * db * prb * qrb * (pb * pb * qrb + prb * qb * qb)
        + db * db * (prb * prb * qb * qb + qrb * qrb * pb * pb) / 3.0
}

/// Weak measurement + reversal: coefficients `C`, `D` over the normalization `W`.
pub fn closed_output_wm(
    np: &NoiseParams,
    ms: &MeasurementStrengths,
    input: &InputState,
) -> Result<OutputState> {
    if !np.is_symmetric() || !ms.is_symmetric() {
        return Err(Error::AsymmetricParameters);
    }
    let d = np.d1();
    let db = 1.0 - d;
    let (pb, qb, prb, qrb) = (1.0 - ms.p(), 1.0 - ms.q(), 1.0 - ms.p_r(), 1.0 - ms.q_r());
    let w = wm_normalization(d, ms);
    if !(w > MIN_PROBABILITY) {
        return Err(Error::VanishingProbability { probability: w });
    }
    let c = d * db * prb * qrb * (pb * pb * qrb + qb * qb * prb) / w;
    let dd = db * prb * qrb * (prb * qb + db * pb * qb + pb * qrb) / (3.0 * w);
    Ok(output_family(c, dd, input))
}

/// Normalization of the environment-assisted pipeline.
pub fn eam_normalization(d: f64, ms: &MeasurementStrengths) -> f64 {
    let db = 1.0 - d;
    let (prb, qrb) = (1.0 - ms.p_r(), 1.0 - ms.q_r());
    (prb * prb * qrb * qrb + db * db * qrb * qrb + db * db * prb * prb) / 3.0
}

/// Environment-assisted measurement + reversal: populations are untouched and
/// coherences scale by `G`.
pub fn closed_output_eam(
    np: &NoiseParams,
    ms: &MeasurementStrengths,
    input: &InputState,
) -> Result<OutputState> {
    if !np.is_symmetric() || ms.p_r() != ms.q_r() {
        return Err(Error::AsymmetricParameters);
    }
    let d = np.d1();
    let db = 1.0 - d;
    let (prb, qrb) = (1.0 - ms.p_r(), 1.0 - ms.q_r());
    let u = eam_normalization(d, ms);
    if !(u > MIN_PROBABILITY) {
        return Err(Error::VanishingProbability { probability: u });
    }
    let g = db * prb * qrb * (db + prb + qrb) / (3.0 * u);
    Ok(output_family(0.0, g, input))
}

/// The scalar `G` with `rho_out = (1 - G) I/3 + G |psi><psi|` for a balanced input,
/// read off as `3 |rho_01|`.
pub fn coherence_factor(out: &OutputState, input: &InputState) -> Result<f64> {
    if !input.is_balanced() {
        return Err(Error::UnbalancedInput);
    }
    let rho = &out.rho_out;
    let mags = [rho[(0, 1)].norm(), rho[(0, 2)].norm(), rho[(1, 2)].norm()];
    let spread = mags.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
        - mags.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    if spread > SYMMETRIC_FAMILY_TOL {
        return Err(Error::NotSymmetricFamily { spread });
    }
    Ok(3.0 * mags[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn d(x: f64) -> NoiseParams {
        NoiseParams::symmetric(x).unwrap()
    }

    #[test]
    fn bell_resource_entries() {
        let rho = bell_resource();
        assert_relative_eq!(rho.trace().re, 1.0, epsilon = 1e-15);
        assert_relative_eq!(rho[(0, 8)].re, 1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(rho[(4, 0)].re, 1.0 / 3.0, epsilon = 1e-15);
        assert_eq!(rho[(1, 1)], ZERO);
    }

    #[test]
    fn input_state_validation() {
        assert!(InputState::new(0.6, 0.48, 0.64, 0.0, 0.0).is_ok());
        assert!(matches!(
            InputState::new(0.6, 0.6, 0.6, 0.0, 0.0),
            Err(Error::NotNormalized { .. })
        ));
        assert!(InputState::default().is_balanced());
        assert!(!InputState::new(0.6, 0.48, 0.64, 0.0, 0.0)
            .unwrap()
            .is_balanced());
    }

    #[test]
    fn correction_table_shape() {
        let table = derive_correction_table().unwrap();
        assert_eq!(table.exponents(0, 0), (0, 0));
        assert_eq!(&table, CorrectionTable::get());
        assert_eq!(table.unitary(0, 0), ComplexMatrix::identity(3));
    }

    #[test]
    fn plain_resource_at_half_damping() {
        let rho = prepare_plain(&d(0.5)).rho;
        let e = |i: usize, j: usize| rho[(i - 1, j - 1)];
        assert_relative_eq!(e(1, 1).re, 0.5, epsilon = 1e-15);
        for k in [2, 3, 4, 7] {
            assert_relative_eq!(e(k, k).re, 1.0 / 12.0, epsilon = 1e-15);
        }
        assert_relative_eq!(e(5, 5).re, 1.0 / 12.0, epsilon = 1e-15);
        assert_relative_eq!(e(9, 9).re, 1.0 / 12.0, epsilon = 1e-15);
        assert_relative_eq!(e(5, 9).re, 1.0 / 12.0, epsilon = 1e-15);
        assert_relative_eq!(e(1, 5).re, 1.0 / 6.0, epsilon = 1e-15);
        assert_relative_eq!(e(1, 9).re, 1.0 / 6.0, epsilon = 1e-15);
        assert_eq!(e(2, 3), ZERO);
    }

    #[test]
    fn closed_forms_refuse_asymmetric_parameters() {
        let input = InputState::default();
        let asym = NoiseParams::new(0.2, 0.3).unwrap();
        let ms = MeasurementStrengths::symmetric(0.3, 0.4).unwrap();
        let ms_asym = MeasurementStrengths::new(0.3, 0.5, 0.4, 0.4).unwrap();
        assert!(matches!(
            closed_output_plain(&asym, &input),
            Err(Error::AsymmetricParameters)
        ));
        assert!(matches!(
            closed_output_wm(&asym, &ms, &input),
            Err(Error::AsymmetricParameters)
        ));
        assert!(matches!(
            closed_output_wm(&d(0.2), &ms_asym, &input),
            Err(Error::AsymmetricParameters)
        ));
        assert!(matches!(
            closed_output_eam(
                &d(0.2),
                &MeasurementStrengths::new(0.0, 0.0, 0.1, 0.2).unwrap(),
                &input
            ),
            Err(Error::AsymmetricParameters)
        ));
    }

    #[test]
    fn vanishing_post_selection() {
        // Full damping kills every excited component; reversal at q_r = 1 then removes |00>.
        let ms = MeasurementStrengths::symmetric(0.0, 1.0).unwrap();
        assert!(matches!(
            prepare_eam(&d(1.0), &ms),
            Err(Error::VanishingProbability { .. })
        ));
        assert!(matches!(
            prepare_wm(&d(0.3), &ms),
            Err(Error::VanishingProbability { .. })
        ));
        assert!(matches!(
            closed_output_eam(&d(1.0), &ms, &InputState::default()),
            Err(Error::VanishingProbability { .. })
        ));
    }

    #[test]
    fn coherence_factor_values() {
        let input = InputState::default();
        let ideal = teleport(&input, &bell_resource());
        assert_relative_eq!(
            coherence_factor(&ideal, &input).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        let half = closed_output_plain(&d(0.5), &input).unwrap();
        assert_relative_eq!(
            coherence_factor(&half, &input).unwrap(),
            5.0 / 12.0,
            epsilon = 1e-15
        );
        let full = closed_output_plain(&d(1.0), &input).unwrap();
        assert!(coherence_factor(&full, &input).unwrap().abs() < 1e-15);

        let skewed = InputState::new(0.6, 0.48, 0.64, 0.1, 0.2).unwrap();
        assert!(matches!(
            coherence_factor(&teleport(&skewed, &bell_resource()), &skewed),
            Err(Error::UnbalancedInput)
        ));
        let mut broken = ideal.rho_out.clone().into_matrix();
        broken[(0, 2)] *= 0.5;
        broken[(2, 0)] *= 0.5;
        let broken = OutputState {
            rho_out: DensityMatrix::new_unchecked(broken),
        };
        assert!(matches!(
            coherence_factor(&broken, &input),
            Err(Error::NotSymmetricFamily { .. })
        ));
    }
}
