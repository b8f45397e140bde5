//! Eve's optimal collective attack on the time-coding protocols.
//!
//! Eve entangles each key slot with her probe:
//!
//! ```text
//! |1⟩|0⟩_E → √F1 |11⟩|1⟩ + √Q1 |12⟩|2⟩
//! |2⟩|0⟩_E → √F2 |22⟩|2⟩ + √Q2 |21⟩|1⟩
//! ```
//!
//! with the four cross overlaps `⟨11|12⟩, ⟨11|21⟩, ⟨22|12⟩, ⟨22|21⟩` set to
//! zero, which makes the transform unitary and leaves `⟨11|22⟩` and `⟨12|21⟩` as
//! the only free overlaps. The sifted Alice/Bob state is then block diagonal and
//! its entropy equals Eve's entropy `S(ρ_E)`; the key rate per sifted pulse is
//! `ΔI = I_AB − χ_AE = 1 − S(ρ_E)` for symmetric attacks.
//!
//! For 3TS the key slots are 1 and 3. Bob only monitors the 1-2 and 2-3
//! coherences, so the probe states `|11⟩` and `|33⟩` may each sit at angle `φ`
//! from `|22⟩` with `cos φ = (F − Q)V_A`, giving Eve `⟨11|33⟩ = cos 2φ` at best,
//! or zero once `φ ≥ π/4`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::linalg::{c, entropy_of_spectrum, h2, partial_trace, ComplexMatrix, StateVector, C64};
use crate::protocol::ProtocolKind;
use crate::roots::bisect_boundary;

/// Tolerance on the `F + Q = 1` normalisation.
pub const NORMALISATION_TOL: f64 = 1e-12;

/// Bisection tolerance on the QBER threshold.
pub const QBER_THRESHOLD_TOL: f64 = 1e-6;

/// Parameters of Eve's two-slot entangling unitary.
///
/// For 3TS the roles of slot 2 are played by slot 3: `s_1122` is `⟨11|33⟩` and
/// `s_1221` is `⟨13|31⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackParams {
    pub f1: f64,
    pub q1: f64,
    pub f2: f64,
    pub q2: f64,
    pub s_1122: f64,
    pub s_1221: f64,
}

impl AttackParams {
    pub fn new(f1: f64, q1: f64, f2: f64, q2: f64, s_1122: f64, s_1221: f64) -> Result<Self> {
        let p = Self {
            f1,
            q1,
            f2,
            q2,
            s_1122,
            s_1221,
        };
        p.validate()?;
        Ok(p)
    }

    /// Builds parameters from the mean error `q`, the asymmetry `dq` and the two
    /// free overlaps.
    pub fn from_mean(q: f64, dq: f64, s_1122: f64, s_1221: f64) -> Result<Self> {
        let q1 = q + dq;
        let q2 = q - dq;
        Self::new(1.0 - q1, q1, 1.0 - q2, q2, s_1122, s_1221)
    }

    /// Symmetric attack (`dQ = 0`) with both overlaps equal to `v`.
    pub fn symmetric(q: f64, v: f64) -> Result<Self> {
        Self::from_mean(q, 0.0, v, v)
    }

    pub fn validate(&self) -> Result<()> {
        let probs = [self.f1, self.q1, self.f2, self.q2];
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return invalid(format!("attack probabilities {probs:?} outside [0, 1]"));
        }
        if (self.f1 + self.q1 - 1.0).abs() > NORMALISATION_TOL
            || (self.f2 + self.q2 - 1.0).abs() > NORMALISATION_TOL
        {
            return invalid("attack violates F1 + Q1 = F2 + Q2 = 1");
        }
        if self.s_1122.abs() > 1.0 || self.s_1221.abs() > 1.0 {
            return invalid("probe overlaps must lie in [-1, 1]");
        }
        Ok(())
    }

    pub fn f(&self) -> f64 {
        0.5 * (self.f1 + self.f2)
    }

    pub fn q(&self) -> f64 {
        0.5 * (self.q1 + self.q2)
    }

    pub fn dq(&self) -> f64 {
        0.5 * (self.q1 - self.q2)
    }

    /// Fringe visibility Bob sees on the coherence pulse of the attacked pair.
    pub fn visibility(&self) -> f64 {
        (self.f1 * self.f2).sqrt() * self.s_1122 + (self.q1 * self.q2).sqrt() * self.s_1221
    }
}

/// Probe geometry of the three-state attack on 3TS.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreeStateAttackGeometry {
    /// Angle between `|22⟩` and each of `|11⟩`, `|33⟩`.
    pub phi: f64,
    /// Best (smallest-magnitude) attainable `⟨11|33⟩`.
    pub v13: f64,
}

impl ThreeStateAttackGeometry {
    /// Geometry forced by the observed 1-2 / 2-3 visibility `cos φ`.
    pub fn from_cos_phi(cos_phi: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&cos_phi) {
            return invalid(format!("cos φ = {cos_phi} outside [-1, 1]"));
        }
        let phi = cos_phi.acos();
        let v13 = if phi <= std::f64::consts::FRAC_PI_4 {
            // cos 2φ, written to stay exact at cos φ = 1
            2.0 * cos_phi * cos_phi - 1.0
        } else {
            0.0
        };
        Ok(Self { phi, v13 })
    }

    /// Geometry for an honest-looking channel with QBER `q` and source
    /// visibility `v_a`: `cos φ = (F − Q)V_A`.
    pub fn from_channel(q: f64, v_a: f64) -> Result<Self> {
        check_qber(q)?;
        check_visibility(v_a)?;
        Self::from_cos_phi((1.0 - 2.0 * q) * v_a)
    }
}

/// One point of the information balance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecurityPoint {
    pub protocol: ProtocolKind,
    pub qber: f64,
    pub visibility_va: f64,
    /// Coherence `V₁₂` (or `V₁₃` for 3TS) entering Eve's spectrum.
    pub coherence: f64,
    pub s_rho_e: f64,
    pub chi_ae: f64,
    pub i_ab: f64,
    /// `I_AB − χ_AE`; negative when Eve knows more than Bob.
    pub delta_i: f64,
}

impl SecurityPoint {
    /// `ΔI` clamped at zero.
    pub fn rate(&self) -> f64 {
        self.delta_i.max(0.0)
    }
}

fn check_qber(q: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&q) {
        return invalid(format!("QBER {q} outside [0, 1/2]"));
    }
    Ok(())
}

fn check_visibility(v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return invalid(format!("visibility {v} outside [0, 1]"));
    }
    Ok(())
}

/// Alice/Bob density matrix after the block projection, in the basis
/// `(|1⟩_A|1⟩_B, |2⟩_A|2⟩_B, |1⟩_A|2⟩_B, |2⟩_A|1⟩_B)`.
pub fn rho_ab_projected(p: &AttackParams) -> Result<ComplexMatrix> {
    p.validate()?;
    let cf = (p.f1 * p.f2).sqrt() * p.s_1122;
    let cq = (p.q1 * p.q2).sqrt() * p.s_1221;
    ComplexMatrix::from_real_rows(&[
        vec![0.5 * p.f1, 0.5 * cf, 0.0, 0.0],
        vec![0.5 * cf, 0.5 * p.f2, 0.0, 0.0],
        vec![0.0, 0.0, 0.5 * p.q1, 0.5 * cq],
        vec![0.0, 0.0, 0.5 * cq, 0.5 * p.q2],
    ])
}

/// Closed-form spectrum `γ₁..γ₄` of [`rho_ab_projected`].
pub fn gamma_eigenvalues(f: f64, q: f64, dq: f64, s_1122: f64, s_1221: f64) -> Result<[f64; 4]> {
    if !(0.0..=1.0).contains(&f) || !(0.0..=1.0).contains(&q) {
        return invalid("F and Q must be probabilities");
    }
    if (f + q - 1.0).abs() > NORMALISATION_TOL {
        return invalid("F + Q must equal 1");
    }
    if dq.abs() > 0.5 + NORMALISATION_TOL
        || q < dq.abs() - NORMALISATION_TOL
        || q > 1.0 - dq.abs() + NORMALISATION_TOL
    {
        return invalid(format!("dQ = {dq} incompatible with Q = {q}"));
    }
    if s_1122.abs() > 1.0 || s_1221.abs() > 1.0 {
        return invalid("probe overlaps must lie in [-1, 1]");
    }
    let d2 = dq * dq;
    let rf = ((1.0 - s_1122 * s_1122) * d2 + s_1122 * s_1122 * f * f)
        .max(0.0)
        .sqrt();
    let rq = ((1.0 - s_1221 * s_1221) * d2 + s_1221 * s_1221 * q * q)
        .max(0.0)
        .sqrt();
    Ok([
        0.5 * (f + rf),
        (0.5 * (f - rf)).max(0.0),
        0.5 * (q + rq),
        (0.5 * (q - rq)).max(0.0),
    ])
}

/// Eigenvalues of Eve's maximal-entropy state for a symmetric attack with
/// coherence `v12` (`F = 1 − Q`).
pub fn symmetric_spectrum(q: f64, v12: f64) -> [f64; 4] {
    let f = 1.0 - q;
    [
        0.5 * q * (1.0 + v12),
        0.5 * q * (1.0 - v12),
        0.5 * f * (1.0 + v12),
        0.5 * f * (1.0 - v12),
    ]
}

/// `S_max(ρ_E)` for a symmetric attack with `⟨11|22⟩ = ⟨12|21⟩ = V₁₂`.
pub fn s_rho_e_max(q: f64, v12: f64) -> Result<f64> {
    check_qber(q)?;
    if !(-1.0..=1.0).contains(&v12) {
        return invalid(format!("coherence {v12} outside [-1, 1]"));
    }
    entropy_of_spectrum(&symmetric_spectrum(q, v12))
}

/// Holevo bound on Eve's information about Alice's bit.
pub fn holevo_chi_ae(q1: f64, q2: f64, s_rho_e: f64) -> Result<f64> {
    for q in [q1, q2] {
        if !(0.0..=1.0).contains(&q) {
            return invalid(format!("error rate {q} outside [0, 1]"));
        }
    }
    Ok(s_rho_e - 0.5 * h2(q1) - 0.5 * h2(q2))
}

/// Alice/Bob Shannon information averaged over the two bit values.
pub fn mutual_info_ab(q1: f64, q2: f64) -> Result<f64> {
    for q in [q1, q2] {
        if !(0.0..=1.0).contains(&q) {
            return invalid(format!("error rate {q} outside [0, 1]"));
        }
    }
    Ok(1.0 - 0.5 * (h2(q1) + h2(q2)))
}

/// Coherence Eve must reproduce on the key pair for a given channel.
pub fn effective_coherence(protocol: ProtocolKind, q: f64, v_a: f64) -> Result<f64> {
    check_qber(q)?;
    check_visibility(v_a)?;
    Ok(match protocol {
        ProtocolKind::Ts2 | ProtocolKind::C3ts => (1.0 - 2.0 * q) * v_a,
        ProtocolKind::Ts3 => ThreeStateAttackGeometry::from_channel(q, v_a)?.v13,
    })
}

/// Information balance under the optimal symmetric attack.
pub fn secret_rate(protocol: ProtocolKind, q: f64, v_a: f64) -> Result<SecurityPoint> {
    let coherence = effective_coherence(protocol, q, v_a)?;
    let s = s_rho_e_max(q, coherence)?;
    let chi = holevo_chi_ae(q, q, s)?;
    let i_ab = mutual_info_ab(q, q)?;
    Ok(SecurityPoint {
        protocol,
        qber: q,
        visibility_va: v_a,
        coherence,
        s_rho_e: s,
        chi_ae: chi,
        i_ab,
        delta_i: i_ab - chi,
    })
}

/// Smallest QBER at which the secret-key rate vanishes.
///
/// Returns 0 when no key can be distilled even at `Q = 0`.
pub fn max_qber(protocol: ProtocolKind, v_a: f64) -> Result<f64> {
    check_visibility(v_a)?;
    let delta = |q: f64| secret_rate(protocol, q, v_a).map(|p| p.delta_i);
    if delta(0.0)? <= crate::linalg::SPECTRAL_TOL {
        return Ok(0.0);
    }
    // locate the first sign change, then bisect inside it
    const SCAN: usize = 500;
    let mut prev = 0.0;
    for k in 1..=SCAN {
        let q = 0.5 * k as f64 / SCAN as f64;
        if delta(q)? <= 0.0 {
            let (lo, hi) = bisect_boundary(
                |x| delta(x).map(|d| d > 0.0).unwrap_or(false),
                prev,
                q,
                QBER_THRESHOLD_TOL,
            );
            return Ok(0.5 * (lo + hi));
        }
        prev = q;
    }
    Ok(0.5)
}

/// QBER at which Eve's three-state attack on 3TS gains complete information,
/// i.e. `2(F − Q)²V_A² = 1`. `None` when that already holds at `Q = 0`.
pub fn three_state_saturation_qber(v_a: f64) -> Result<Option<f64>> {
    check_visibility(v_a)?;
    if v_a * std::f64::consts::SQRT_2 <= 1.0 {
        return Ok(None);
    }
    Ok(Some(0.5 * (1.0 - std::f64::consts::FRAC_1_SQRT_2 / v_a)))
}

/// Result of the brute-force attack search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AttackOptimum {
    pub protocol: ProtocolKind,
    pub params: AttackParams,
    pub s_rho_e: f64,
    /// Probe geometry (3TS only).
    pub geometry: Option<ThreeStateAttackGeometry>,
    /// Azimuth between `|11⟩` and `|33⟩` around `|22⟩` (3TS only).
    pub azimuth: Option<f64>,
    pub dq_step: f64,
    pub overlap_step: f64,
    pub evaluations: usize,
}

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> + Clone {
    let step = if n > 1 {
        (hi - lo) / (n - 1) as f64
    } else {
        0.0
    };
    (0..n).map(move |k| {
        if k + 1 == n && n > 1 {
            hi
        } else {
            lo + step * k as f64
        }
    })
}

fn step_of(lo: f64, hi: f64, n: usize) -> f64 {
    if n > 1 {
        (hi - lo) / (n - 1) as f64
    } else {
        0.0
    }
}

fn entropy_of(p: &AttackParams) -> f64 {
    gamma_eigenvalues(p.f(), p.q(), p.dq(), p.s_1122, p.s_1221)
        .and_then(|g| entropy_of_spectrum(&g))
        .unwrap_or(f64::NEG_INFINITY)
}

/// Keeps the strictly larger candidate; on ties the lower grid index wins.
fn pick<T>(
    best: Option<(f64, usize, T)>,
    cand: Option<(f64, usize, T)>,
) -> Option<(f64, usize, T)> {
    match (best, cand) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => {
            if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                Some(b)
            } else {
                Some(a)
            }
        }
    }
}

/// Grid search over Eve's free parameters that maximizes `S(ρ_E)`.
///
/// For 2TS/C3TS, `v_target` is the visibility Bob observes on the coherence
/// pulse; the search covers `dQ` and the line
/// `√(F1F2)·⟨11|22⟩ + √(Q1Q2)·⟨12|21⟩ = v_target`.
/// For 3TS, `v_target` is the observed 1-2 and 2-3 visibility `cos φ`; the search
/// covers `dQ` and the azimuth of `|33⟩` around `|22⟩`, with
/// `⟨13|31⟩ = ⟨11|33⟩`.
pub fn optimize_attack_bruteforce(
    protocol: ProtocolKind,
    q: f64,
    v_target: f64,
    grid_resolution: usize,
) -> Result<AttackOptimum> {
    check_qber(q)?;
    if grid_resolution < 50 {
        return invalid("grid resolution must be at least 50");
    }
    if !(-1.0..=1.0).contains(&v_target) {
        return invalid(format!("target visibility {v_target} is infeasible"));
    }
    let m = q.min(1.0 - q);
    let n_dq = if m == 0.0 { 1 } else { grid_resolution };
    let dqs: Vec<f64> = grid(-m, m, n_dq).collect();
    let n = grid_resolution;

    match protocol {
        ProtocolKind::Ts2 | ProtocolKind::C3ts => {
            let best = dqs
                .par_iter()
                .enumerate()
                .map(|(i, &dq)| {
                    let (q1, q2) = (q + dq, q - dq);
                    let a = ((1.0 - q1) * (1.0 - q2)).sqrt();
                    let b = (q1 * q2).max(0.0).sqrt();
                    let mut row_best = None;
                    for (j, t) in grid(-1.0, 1.0, n).enumerate() {
                        if a == 0.0 {
                            break;
                        }
                        let s = (v_target - b * t) / a;
                        if s.abs() > 1.0 {
                            continue;
                        }
                        let Ok(p) = AttackParams::from_mean(q, dq, s, t) else {
                            continue;
                        };
                        row_best = pick(row_best, Some((entropy_of(&p), i * n + j, p)));
                    }
                    row_best
                })
                .collect::<Vec<_>>()
                .into_iter()
                .fold(None, pick);
            let (s, _, params) = best
                .ok_or_else(|| crate::Error::Validation("no feasible attack on the grid".into()))?;
            Ok(AttackOptimum {
                protocol,
                params,
                s_rho_e: s,
                geometry: None,
                azimuth: None,
                dq_step: step_of(-m, m, n_dq),
                overlap_step: step_of(-1.0, 1.0, n),
                evaluations: n_dq * n,
            })
        }
        ProtocolKind::Ts3 => {
            let cos_phi = v_target;
            let phi = cos_phi.acos();
            let sin2 = 1.0 - cos_phi * cos_phi;
            let best = dqs
                .par_iter()
                .enumerate()
                .map(|(i, &dq)| {
                    let mut row_best = None;
                    for (j, theta) in grid(0.0, std::f64::consts::PI, n).enumerate() {
                        let v13 = (cos_phi * cos_phi + sin2 * theta.cos()).clamp(-1.0, 1.0);
                        let Ok(p) = AttackParams::from_mean(q, dq, v13, v13) else {
                            continue;
                        };
                        row_best = pick(row_best, Some((entropy_of(&p), i * n + j, (p, theta))));
                    }
                    row_best
                })
                .collect::<Vec<_>>()
                .into_iter()
                .fold(None, pick);
            let (s, _, (params, theta)) = best
                .ok_or_else(|| crate::Error::Validation("no feasible attack on the grid".into()))?;
            Ok(AttackOptimum {
                protocol,
                params,
                s_rho_e: s,
                geometry: Some(ThreeStateAttackGeometry {
                    phi,
                    v13: params.s_1122,
                }),
                azimuth: Some(theta),
                dq_step: step_of(-m, m, n_dq),
                overlap_step: step_of(0.0, std::f64::consts::PI, n),
                evaluations: n_dq * n,
            })
        }
    }
}

/// Sifted Alice ⊗ Bob ⊗ Eve pure state (dimensions 2 × 2 × 4) for an attack.
///
/// Eve's probe vectors are realised as `|11⟩ = e₀`,
/// `|22⟩ = s e₀ + √(1−s²) e₁`, `|12⟩ = e₂`, `|21⟩ = t e₂ + √(1−t²) e₃`.
pub fn sifted_purification(p: &AttackParams) -> Result<StateVector> {
    p.validate()?;
    let (s, t) = (p.s_1122, p.s_1221);
    let e = |v: [f64; 4]| -> [C64; 4] { v.map(|x| c(x, 0.0)) };
    let e11 = e([1.0, 0.0, 0.0, 0.0]);
    let e22 = e([s, (1.0 - s * s).sqrt(), 0.0, 0.0]);
    let e12 = e([0.0, 0.0, 1.0, 0.0]);
    let e21 = e([0.0, 0.0, t, (1.0 - t * t).sqrt()]);
    let k = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![c(0.0, 0.0); 16];
    // (a, b, weight, probe)
    let terms = [
        (0, 0, p.f1, e11),
        (1, 1, p.f2, e22),
        (0, 1, p.q1, e12),
        (1, 0, p.q2, e21),
    ];
    for (a, b, w, probe) in terms {
        for (ei, z) in probe.iter().enumerate() {
            amps[(2 * a + b) * 4 + ei] += z * (k * w.sqrt());
        }
    }
    StateVector::new(amps)
}

/// `ρ_AB` traced from [`sifted_purification`], reordered to the basis of
/// [`rho_ab_projected`].
pub fn rho_ab_from_purification(p: &AttackParams) -> Result<ComplexMatrix> {
    let psi = sifted_purification(p)?;
    let rho = partial_trace(&psi.projector(), &[4, 4], 0)?;
    // product index 2a+b → (11, 22, 12, 21) ordering
    let order = [0usize, 3, 1, 2];
    let mut out = ComplexMatrix::zeros(4)?;
    for (i, &oi) in order.iter().enumerate() {
        for (j, &oj) in order.iter().enumerate() {
            out[(i, j)] = rho[(oi, oj)];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{binary_entropy, eigvals_hermitian, von_neumann_entropy};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    fn random_params(rng: &mut impl Rng) -> AttackParams {
        let q: f64 = rng.gen_range(0.0..0.5);
        let m = q.min(1.0 - q);
        let dq = rng.gen_range(-m..=m);
        AttackParams::from_mean(q, dq, rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
            .unwrap()
    }

    #[test]
    fn no_attack_is_pure() {
        let p = AttackParams::new(1.0, 0.0, 1.0, 0.0, 1.0, 1.0).unwrap();
        let rho = rho_ab_projected(&p).unwrap();
        assert!(von_neumann_entropy(&rho).unwrap().abs() < 1e-12);
    }

    #[test]
    fn projected_matrix_matches_symmetric_closed_form() {
        let p = AttackParams::new(0.95, 0.05, 0.95, 0.05, 0.9, 0.9).unwrap();
        let ev = eigvals_hermitian(&rho_ab_projected(&p).unwrap()).unwrap();
        let lam = sorted_desc(symmetric_spectrum(0.05, 0.9).to_vec());
        for (a, b) in ev.iter().zip(&lam) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn projected_matrix_matches_gamma_asymmetric() {
        // F1 = 0.9, F2 = 1.0 → F = 0.95, Q = 0.05, dQ = 0.05
        let p = AttackParams::new(0.9, 0.1, 1.0, 0.0, 1.0, 1.0).unwrap();
        assert!((p.dq() - 0.05).abs() < 1e-15);
        let ev = eigvals_hermitian(&rho_ab_projected(&p).unwrap()).unwrap();
        let g = sorted_desc(
            gamma_eigenvalues(p.f(), p.q(), p.dq(), 1.0, 1.0)
                .unwrap()
                .to_vec(),
        );
        for (a, b) in ev.iter().zip(&g) {
            assert!((a - b).abs() < 1e-12, "{ev:?} vs {g:?}");
        }
    }

    #[test]
    fn gamma_reduces_to_lambda() {
        for &(q, v) in &[(0.05, 0.9), (0.2, 0.3), (0.11, 1.0)] {
            let g = sorted_desc(gamma_eigenvalues(1.0 - q, q, 0.0, v, v).unwrap().to_vec());
            let l = sorted_desc(symmetric_spectrum(q, v).to_vec());
            for (a, b) in g.iter().zip(&l) {
                assert!((a - b).abs() < 1e-15);
            }
        }
        assert_eq!(
            gamma_eigenvalues(1.0, 0.0, 0.0, 1.0, 0.5).unwrap(),
            [1.0, 0.0, 0.0, 0.0]
        );
    }

    #[test]
    fn gamma_matches_numeric_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let p = random_params(&mut rng);
            let g = gamma_eigenvalues(p.f(), p.q(), p.dq(), p.s_1122, p.s_1221).unwrap();
            assert!((g.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let g = sorted_desc(g.to_vec());
            let ev = eigvals_hermitian(&rho_ab_projected(&p).unwrap()).unwrap();
            for (a, b) in ev.iter().zip(&g) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn gamma_rejects_out_of_range() {
        assert!(gamma_eigenvalues(0.9, 0.1, 0.2, 0.5, 0.5).is_err());
        assert!(gamma_eigenvalues(0.9, 0.2, 0.0, 0.5, 0.5).is_err());
        assert!(gamma_eigenvalues(0.9, 0.1, 0.0, 1.5, 0.5).is_err());
        assert!(AttackParams::new(0.9, 0.2, 1.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn s_max_examples() {
        assert!(s_rho_e_max(0.0, 1.0).unwrap().abs() < 1e-15);
        // V = 1 − 2Q collapses to S = 2h(Q)
        for &q in &[0.01, 0.05, 0.11, 0.3] {
            let s = s_rho_e_max(q, 1.0 - 2.0 * q).unwrap();
            assert!((s - 2.0 * h2(q)).abs() < 1e-12);
        }
        let p = AttackParams::symmetric(0.05, 0.855).unwrap();
        let numeric = von_neumann_entropy(&rho_ab_projected(&p).unwrap()).unwrap();
        assert!((s_rho_e_max(0.05, 0.855).unwrap() - numeric).abs() < 1e-10);
    }

    #[test]
    fn chi_and_mutual_information() {
        assert_eq!(holevo_chi_ae(0.0, 0.0, 0.0).unwrap(), 0.0);
        assert_eq!(mutual_info_ab(0.0, 0.0).unwrap(), 1.0);
        assert!(mutual_info_ab(0.5, 0.5).unwrap().abs() < 1e-15);
        assert!((mutual_info_ab(0.11, 0.11).unwrap() - 0.5).abs() < 1e-3);
        let pt = secret_rate(ProtocolKind::Ts2, 0.11, 1.0).unwrap();
        assert!((pt.chi_ae - 0.5).abs() < 1e-3);
    }

    #[test]
    fn secret_rate_examples() {
        let perfect = secret_rate(ProtocolKind::Ts2, 0.0, 1.0).unwrap();
        assert!((perfect.delta_i - 1.0).abs() < 1e-15);
        assert!(
            secret_rate(ProtocolKind::Ts2, 0.11, 1.0)
                .unwrap()
                .delta_i
                .abs()
                < 1e-3
        );
        assert!(secret_rate(ProtocolKind::Ts2, 0.6, 1.0).is_err());
        assert!(secret_rate(ProtocolKind::Ts2, 0.1, 1.2).is_err());
    }

    #[test]
    fn ts3_saturation_gives_eve_the_key() {
        let qs = three_state_saturation_qber(1.0).unwrap().unwrap();
        assert!((qs - (1.0 - std::f64::consts::FRAC_1_SQRT_2) / 2.0).abs() < 1e-15);
        let pt = secret_rate(ProtocolKind::Ts3, qs, 1.0).unwrap();
        assert!((pt.chi_ae - 1.0).abs() < 1e-9);
        assert!(pt.chi_ae >= pt.i_ab);
        // beyond saturation Eve keeps full information
        let far = secret_rate(ProtocolKind::Ts3, 0.3, 1.0).unwrap();
        assert!((far.chi_ae - 1.0).abs() < 1e-12 && far.delta_i < 0.0);
        assert!(three_state_saturation_qber(0.7).unwrap().is_none());
    }

    #[test]
    fn delta_identity_both_routes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let proto = [ProtocolKind::Ts2, ProtocolKind::Ts3][rng.gen_range(0..2)];
            let pt =
                secret_rate(proto, rng.gen_range(0.0..=0.5), rng.gen_range(0.0..=1.0)).unwrap();
            assert!((pt.delta_i - (1.0 - pt.s_rho_e)).abs() < 1e-10);
            assert!((pt.delta_i - (pt.i_ab - pt.chi_ae)).abs() < 1e-10);
        }
    }

    #[test]
    fn chi_collapses_to_binary_entropy() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let q = rng.gen_range(0.0..0.5);
            let s = s_rho_e_max(q, 1.0 - 2.0 * q).unwrap();
            let chi = holevo_chi_ae(q, q, s).unwrap();
            assert!((chi - binary_entropy(q).unwrap()).abs() <= 1e-12);
        }
    }

    #[test]
    fn symmetric_attack_is_optimal() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let q = rng.gen_range(0.01..0.5);
            let s = rng.gen_range(-1.0..=1.0);
            let t = rng.gen_range(-1.0..=1.0);
            let at = |dq: f64| {
                entropy_of_spectrum(&gamma_eigenvalues(1.0 - q, q, dq, s, t).unwrap()).unwrap()
            };
            let centre = at(0.0);
            for k in 0..=1000 {
                let dq = -q + 2.0 * q * k as f64 / 1000.0;
                assert!(at(dq) <= centre + 1e-12);
                assert!((at(dq) - at(-dq)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ts3_never_beats_ts2() {
        for i in 0..100 {
            for j in 0..100 {
                let q = 0.5 * i as f64 / 99.0;
                let v = j as f64 / 99.0;
                let d3 = secret_rate(ProtocolKind::Ts3, q, v).unwrap().delta_i;
                let d2 = secret_rate(ProtocolKind::Ts2, q, v).unwrap().delta_i;
                assert!(d3 <= d2 + 1e-12, "Q={q} V={v}");
            }
        }
    }

    #[test]
    fn max_qber_values() {
        assert!((max_qber(ProtocolKind::Ts2, 1.0).unwrap() - 0.110).abs() <= 1e-3);
        let t3 = max_qber(ProtocolKind::Ts3, 1.0).unwrap();
        assert!((0.048..=0.055).contains(&t3));
        assert_eq!(max_qber(ProtocolKind::Ts2, 0.0).unwrap(), 0.0);
        assert_eq!(max_qber(ProtocolKind::Ts3, 0.5).unwrap(), 0.0);
        assert_eq!(
            max_qber(ProtocolKind::C3ts, 0.93).unwrap(),
            max_qber(ProtocolKind::Ts2, 0.93).unwrap()
        );
    }

    #[test]
    fn max_qber_monotone_in_visibility() {
        let mut prev = 0.0;
        for k in 1..=50 {
            let v = k as f64 / 50.0;
            let t = max_qber(ProtocolKind::Ts2, v).unwrap();
            assert!(t >= prev - QBER_THRESHOLD_TOL);
            prev = t;
        }
    }

    #[test]
    fn unitarity_holds_with_zero_cross_overlaps() {
        // ⟨1_E|2_E⟩ on Bob ⊗ Eve for the probe realisation used here
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let p = random_params(&mut rng);
            let psi = sifted_purification(&p).unwrap();
            let a = psi.amplitudes();
            // Alice = 0 block vs Alice = 1 block, renormalised away
            let overlap: C64 = (0..8).map(|i| a[i].conj() * a[8 + i]).sum();
            assert!(overlap.norm() < 1e-15);
        }
    }

    #[test]
    fn purification_reproduces_projected_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let p = random_params(&mut rng);
            let a = rho_ab_from_purification(&p).unwrap();
            let b = rho_ab_projected(&p).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    assert!((a[(i, j)] - b[(i, j)]).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn bruteforce_ts2_finds_symmetric_optimum() {
        let opt = optimize_attack_bruteforce(ProtocolKind::Ts2, 0.05, 0.9, 200).unwrap();
        let closed = s_rho_e_max(0.05, 0.9).unwrap();
        assert!(
            (opt.s_rho_e - closed).abs() <= 1e-4,
            "{} vs {closed}",
            opt.s_rho_e
        );
        assert!(opt.params.dq().abs() <= opt.dq_step);
        assert!((opt.params.s_1122 - 0.9).abs() <= opt.overlap_step);
        assert!((opt.params.s_1221 - 0.9).abs() <= opt.overlap_step);
        assert!(opt.s_rho_e <= closed + 1e-12);
    }

    #[test]
    fn bruteforce_without_errors_is_pure() {
        for v in [0.2, 0.7, 1.0] {
            let opt = optimize_attack_bruteforce(ProtocolKind::Ts2, 0.0, v, 60).unwrap();
            // S = h((1+V)/2) with no error budget; zero only when V = 1
            let expect = s_rho_e_max(0.0, v).unwrap();
            assert!((opt.s_rho_e - expect).abs() < 1e-12);
        }
        let opt = optimize_attack_bruteforce(ProtocolKind::Ts2, 0.0, 1.0, 60).unwrap();
        assert!(opt.s_rho_e.abs() < 1e-12);
    }

    #[test]
    fn bruteforce_ts3_is_coplanar() {
        let opt = optimize_attack_bruteforce(ProtocolKind::Ts3, 0.05, 0.9, 200).unwrap();
        let g = opt.geometry.unwrap();
        assert!((g.v13 - 0.62).abs() < 1e-3);
        let closed = secret_rate(ProtocolKind::Ts3, 0.05, 1.0).unwrap().s_rho_e;
        assert!((opt.s_rho_e - closed).abs() < 1e-4);
    }

    #[test]
    fn bruteforce_rejects_bad_input() {
        assert!(optimize_attack_bruteforce(ProtocolKind::Ts2, 0.05, 1.2, 200).is_err());
        assert!(optimize_attack_bruteforce(ProtocolKind::Ts2, 0.05, 0.9, 10).is_err());
    }

    #[test]
    fn bruteforce_is_deterministic() {
        let a = optimize_attack_bruteforce(ProtocolKind::Ts2, 0.07, 0.8, 120).unwrap();
        let b = optimize_attack_bruteforce(ProtocolKind::Ts2, 0.07, 0.8, 120).unwrap();
        assert_eq!(a.params, b.params);
        assert_eq!(a.s_rho_e.to_bits(), b.s_rho_e.to_bits());
    }
}
