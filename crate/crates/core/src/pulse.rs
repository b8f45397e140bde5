//! Faint-pulse sources: coherent-state detection, PNS-limited and decoy-state
//! key rates, and the single-photon reference rate.
//!
//! All rates are secret bits per sent pulse with the protocol factor `q = 1`
//! and perfect reconciliation. The `*_signed` variants keep negative values for
//! threshold searches; the plain variants clamp at zero.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::attack::secret_rate;
use crate::channel::{qber, transmission, ChannelParams};
use crate::error::{invalid, Result};
use crate::linalg::h2;
use crate::protocol::ProtocolKind;
use crate::roots::golden_max;

/// Signal mean photon number for the decoy-state source.
pub const DEFAULT_DECOY_MU: f64 = 0.5;

/// Light source driving the rate computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum SourceMode {
    SinglePhoton,
    /// Faint pulses without decoys; `mu: None` optimizes μ at each distance.
    FaintNoDecoy {
        #[serde(default)]
        mu: Option<f64>,
    },
    FaintDecoy {
        #[serde(default = "default_decoy_mu")]
        mu: f64,
    },
}

fn default_decoy_mu() -> f64 {
    DEFAULT_DECOY_MU
}

impl SourceMode {
    pub fn label(&self) -> &'static str {
        match self {
            SourceMode::SinglePhoton => "SinglePhoton",
            SourceMode::FaintNoDecoy { .. } => "FaintNoDecoy",
            SourceMode::FaintDecoy { .. } => "FaintDecoy",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mu = match self {
            SourceMode::SinglePhoton | SourceMode::FaintNoDecoy { mu: None } => return Ok(()),
            SourceMode::FaintNoDecoy { mu: Some(mu) } | SourceMode::FaintDecoy { mu } => *mu,
        };
        if !(mu > 0.0 && mu.is_finite()) {
            return invalid(format!("mean photon number {mu} must be positive"));
        }
        Ok(())
    }
}

impl fmt::Display for SourceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Detection statistics of the signal pulses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainErrorPoint {
    pub g_mu: f64,
    pub q_mu: f64,
    /// Multiphoton fraction bound `μ/(2η)`, capped at 1.
    pub delta: f64,
    pub g_1: f64,
    pub q_1: f64,
}

fn check_mu(mu: f64) -> Result<()> {
    if !(mu >= 0.0 && mu.is_finite()) {
        return invalid(format!("mean photon number {mu} must be non-negative"));
    }
    Ok(())
}

/// Single-click probabilities in slots 1 and 2 for a coherent pulse split with
/// intensity fractions `a1_sq`, `a2_sq`.
pub fn coherent_detection_probs(
    a1_sq: f64,
    a2_sq: f64,
    mu: f64,
    eta: f64,
    p_d: f64,
) -> Result<(f64, f64)> {
    if a1_sq < 0.0 || a2_sq < 0.0 || (a1_sq + a2_sq - 1.0).abs() > 1e-12 {
        return invalid("slot intensity fractions must be non-negative and sum to 1");
    }
    check_mu(mu)?;
    if !(0.0..=1.0).contains(&eta) || !(0.0..=1.0).contains(&p_d) {
        return invalid("transmission and dark-count probability must lie in [0, 1]");
    }
    let x1 = a1_sq * eta * mu;
    let x2 = a2_sq * eta * mu;
    Ok((
        -(-x1).exp_m1() * (-x2).exp() + p_d,
        -(-x2).exp_m1() * (-x1).exp() + p_d,
    ))
}

/// Signal gain `G_μ`, error rate `Q_μ`, and the single-photon counterparts.
pub fn gain_and_qber_mu(c: &ChannelParams, mu: f64) -> Result<GainErrorPoint> {
    c.validate()?;
    check_mu(mu)?;
    let eta = transmission(c);
    let click = -(-eta * mu).exp_m1();
    let g_mu = click + 2.0 * c.p_dark;
    let q_mu = if g_mu > 0.0 {
        (c.q_a * click + c.p_dark) / g_mu
    } else {
        0.5
    };
    Ok(GainErrorPoint {
        g_mu,
        q_mu,
        delta: (mu / (2.0 * eta)).min(1.0),
        g_1: (-mu).exp() * mu * eta,
        q_1: qber(c),
    })
}

/// First-order multiphoton fraction `Δ = μ / (2η)`.
pub fn multiphoton_fraction(mu: f64, eta: f64) -> Result<f64> {
    check_mu(mu)?;
    if !(eta > 0.0 && eta <= 1.0) {
        return invalid(format!("transmission {eta} outside (0, 1]"));
    }
    let delta = mu / (2.0 * eta);
    if delta > 1.0 {
        return invalid(format!("multiphoton fraction {delta} exceeds 1"));
    }
    Ok(delta)
}

/// GLLP rate without decoys, before clamping. Continuous in μ: the
/// single-photon term vanishes once `Δ ≥ 1` or `Q_μ/(1−Δ) ≥ 1/2`.
pub fn rate_faint_signed(c: &ChannelParams, mu: f64) -> Result<f64> {
    let g = gain_and_qber_mu(c, mu)?;
    let single = if g.delta >= 1.0 {
        0.0
    } else {
        let x = (g.q_mu / (1.0 - g.delta)).min(0.5);
        (1.0 - g.delta) * (1.0 - h2(x))
    };
    Ok(g.g_mu * (single - h2(g.q_mu)))
}

pub fn rate_faint(c: &ChannelParams, mu: f64) -> Result<f64> {
    Ok(rate_faint_signed(c, mu)?.max(0.0))
}

/// Mean photon number maximizing the no-decoy rate on `(0, 2η]`, with the
/// signed rate it achieves.
pub fn optimal_faint_mu(c: &ChannelParams) -> Result<(f64, f64)> {
    c.validate()?;
    let eta = transmission(c);
    let hi = 2.0 * eta;
    let f = |mu: f64| rate_faint_signed(c, mu).unwrap_or(f64::NEG_INFINITY);
    // coarse scan picks the basin, golden section polishes it
    const COARSE: usize = 64;
    let step = hi / COARSE as f64;
    let (k_best, _) = (1..=COARSE).map(|k| (k, f(step * k as f64))).fold(
        (1, f64::NEG_INFINITY),
        |acc, (k, v)| if v > acc.1 { (k, v) } else { acc },
    );
    let lo = step * (k_best as f64 - 1.0);
    let up = (step * (k_best as f64 + 1.0)).min(hi);
    let (mu, rate) = golden_max(f, lo.max(hi * 1e-9), up, 100);
    Ok((mu, rate))
}

pub fn rate_faint_optimized(c: &ChannelParams) -> Result<f64> {
    Ok(optimal_faint_mu(c)?.1.max(0.0))
}

/// Asymptotic decoy-state rate, before clamping.
pub fn rate_decoy_signed(c: &ChannelParams, mu: f64) -> Result<f64> {
    let g = gain_and_qber_mu(c, mu)?;
    Ok(-g.g_mu * h2(g.q_mu) + g.g_1 * (1.0 - h2(g.q_1)))
}

pub fn rate_decoy(c: &ChannelParams, mu: f64) -> Result<f64> {
    Ok(rate_decoy_signed(c, mu)?.max(0.0))
}

/// Single-photon rate `(η + 2p_d) · ΔI(Q, V_A)`, before clamping.
pub fn rate_single_photon_signed(c: &ChannelParams, protocol: ProtocolKind) -> Result<f64> {
    c.validate()?;
    let detect = transmission(c) + 2.0 * c.p_dark;
    Ok(detect * secret_rate(protocol, qber(c), c.v_a)?.delta_i)
}

pub fn rate_single_photon(c: &ChannelParams, protocol: ProtocolKind) -> Result<f64> {
    Ok(rate_single_photon_signed(c, protocol)?.max(0.0))
}

/// Signed rate of `source` at the channel's length.
pub fn rate_signed(source: SourceMode, protocol: ProtocolKind, c: &ChannelParams) -> Result<f64> {
    source.validate()?;
    match source {
        SourceMode::SinglePhoton => rate_single_photon_signed(c, protocol),
        SourceMode::FaintNoDecoy { mu: None } => Ok(optimal_faint_mu(c)?.1),
        SourceMode::FaintNoDecoy { mu: Some(mu) } => rate_faint_signed(c, mu),
        SourceMode::FaintDecoy { mu } => rate_decoy_signed(c, mu),
    }
}

/// Rate of `source` clamped at zero.
pub fn rate(source: SourceMode, protocol: ProtocolKind, c: &ChannelParams) -> Result<f64> {
    Ok(rate_signed(source, protocol, c)?.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Poisson};

    fn paper() -> ChannelParams {
        ChannelParams::default()
    }

    #[test]
    fn vacuum_pulse_only_dark_counts() {
        assert_eq!(
            coherent_detection_probs(0.5, 0.5, 0.0, 0.3, 1e-3).unwrap(),
            (1e-3, 1e-3)
        );
    }

    #[test]
    fn single_slot_pulse() {
        let (p1, p2) = coherent_detection_probs(1.0, 0.0, 0.4, 0.25, 0.0).unwrap();
        assert!((p1 - (1.0 - (-0.1f64).exp())).abs() < 1e-15);
        assert_eq!(p2, 0.0);
        assert!(coherent_detection_probs(0.7, 0.7, 0.4, 0.25, 0.0).is_err());
    }

    #[test]
    fn detection_matches_poisson_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let trials = 1_000_000;
        let mut cases = vec![(0.5, 0.1 / 0.5, 0.5)];
        for _ in 0..19 {
            cases.push((
                rng.gen_range(0.0..1.0),
                rng.gen_range(0.05..1.0),
                rng.gen_range(0.05..2.0),
            ));
        }
        for (a1, eta, mu) in cases {
            let (p1, p2) = coherent_detection_probs(a1, 1.0 - a1, mu, eta, 0.0).unwrap();
            let x1: f64 = a1 * eta * mu;
            let x2: f64 = (1.0 - a1) * eta * mu;
            let (mut n1, mut n2) = (0u64, 0u64);
            let d1 = (x1 > 0.0).then(|| Poisson::new(x1).unwrap());
            let d2 = (x2 > 0.0).then(|| Poisson::new(x2).unwrap());
            for _ in 0..trials {
                let k1 = d1.map_or(0.0, |d| d.sample(&mut rng));
                let k2 = d2.map_or(0.0, |d| d.sample(&mut rng));
                if k1 > 0.0 && k2 == 0.0 {
                    n1 += 1;
                }
                if k2 > 0.0 && k1 == 0.0 {
                    n2 += 1;
                }
            }
            for (n, p) in [(n1, p1), (n2, p2)] {
                let sigma = (p * (1.0 - p) / trials as f64).sqrt().max(1e-12);
                let z = (n as f64 / trials as f64 - p) / sigma;
                assert!(z.abs() <= 3.0, "a1={a1} eta={eta} mu={mu} z={z}");
            }
        }
    }

    #[test]
    fn symmetric_split_gives_equal_probs() {
        let (p1, p2) = coherent_detection_probs(0.5, 0.5, 1.0, 0.1, 0.0).unwrap();
        assert_eq!(p1, p2);
    }

    #[test]
    fn gain_limits() {
        let bright = ChannelParams {
            p_dark: 0.0,
            eta_detector: 1.0,
            ..paper()
        };
        let g = gain_and_qber_mu(&bright, 60.0).unwrap();
        assert!((g.g_mu - 1.0).abs() < 1e-15 && (g.q_mu - 0.02).abs() < 1e-15);
        let dim = gain_and_qber_mu(&paper().at_length(2000.0), 0.5).unwrap();
        assert!((dim.q_mu - 0.5).abs() < 1e-6);
    }

    #[test]
    fn gain_at_225_km() {
        let g = gain_and_qber_mu(&paper().at_length(225.0), 0.5).unwrap();
        assert!((g.g_mu - 1.78e-6).abs() / 1.78e-6 < 5e-3, "{}", g.g_mu);
        assert!((g.q_mu - 0.074).abs() < 1e-3, "{}", g.q_mu);
    }

    #[test]
    fn multiphoton_fraction_examples() {
        assert_eq!(multiphoton_fraction(0.02, 0.01).unwrap(), 1.0);
        assert_eq!(multiphoton_fraction(0.01, 0.01).unwrap(), 0.5);
        let eta = 3.7e-3;
        assert!((multiphoton_fraction(2.0 * eta * 0.25, eta).unwrap() - 0.25).abs() < 1e-15);
        assert!(multiphoton_fraction(0.03, 0.01).is_err());
    }

    #[test]
    fn faint_rate_vanishes_for_vacuum() {
        let c = paper().at_length(30.0);
        assert_eq!(rate_faint(&c, 1e-12).unwrap(), 0.0);
        // Δ ≥ 1 leaves nothing
        let eta = transmission(&c);
        assert_eq!(rate_faint(&c, 2.5 * eta).unwrap(), 0.0);
    }

    #[test]
    fn faint_rate_scales_as_eta_squared() {
        let r0 = rate_faint_optimized(&paper().at_length(10.0)).unwrap();
        let r1 = rate_faint_optimized(&paper().at_length(25.0)).unwrap();
        let ratio = r0 / r1;
        assert!((ratio - 4.0).abs() / 4.0 <= 0.2, "ratio {ratio}");
    }

    #[test]
    fn decoy_noiseless_is_single_photon_gain() {
        let c = ChannelParams {
            p_dark: 0.0,
            q_a: 0.0,
            ..paper()
        };
        for l in [0.0, 100.0, 400.0, 900.0] {
            let c = c.at_length(l);
            let expect = (-0.5f64).exp() * 0.5 * transmission(&c);
            let r = rate_decoy(&c, 0.5).unwrap();
            assert!(r > 0.0 && (r - expect).abs() <= 1e-12 * expect.max(1e-300));
        }
    }

    #[test]
    fn decoy_rate_linear_in_eta() {
        let r0 = rate_decoy(&paper().at_length(50.0), 0.5).unwrap();
        let r1 = rate_decoy(&paper().at_length(100.0), 0.5).unwrap();
        assert!((r0 / r1 - 10.0).abs() / 10.0 < 0.1, "{}", r0 / r1);
    }

    #[test]
    fn single_photon_reference() {
        let ideal = ChannelParams {
            p_dark: 0.0,
            q_a: 0.0,
            ..paper()
        };
        let r = rate_single_photon(&ideal, ProtocolKind::Ts2).unwrap();
        assert!((r - 0.1).abs() < 1e-15);
        // 1 dB per 5 km where ΔI is flat
        let a = rate_single_photon(&paper().at_length(20.0), ProtocolKind::Ts2).unwrap();
        let b = rate_single_photon(&paper().at_length(25.0), ProtocolKind::Ts2).unwrap();
        assert!((10.0 * (a / b).log10() - 1.0).abs() < 0.01);
    }

    #[test]
    fn source_ordering_on_grid() {
        for k in 0..=300 {
            let c = paper().at_length(k as f64);
            let faint = rate_faint_optimized(&c).unwrap();
            let decoy = rate_decoy(&c, 0.5).unwrap();
            let single = rate_single_photon(&c, ProtocolKind::Ts2).unwrap();
            assert!(decoy >= faint, "L={k}: decoy {decoy} < faint {faint}");
            assert!(single >= decoy, "L={k}: single {single} < decoy {decoy}");
        }
    }

    #[test]
    fn rates_nonincreasing_and_nonnegative() {
        let sources = [
            SourceMode::SinglePhoton,
            SourceMode::FaintNoDecoy { mu: None },
            SourceMode::FaintDecoy { mu: 0.5 },
        ];
        for s in sources {
            let mut prev = f64::INFINITY;
            for k in 0..=300 {
                let r = rate(s, ProtocolKind::Ts2, &paper().at_length(k as f64)).unwrap();
                assert!(r >= 0.0 && r <= prev * (1.0 + 1e-9), "{s} at {k}");
                prev = r;
            }
        }
    }

    #[test]
    fn source_mode_json() {
        let s: SourceMode = serde_json::from_str(r#"{"kind":"FaintDecoy"}"#).unwrap();
        assert_eq!(s, SourceMode::FaintDecoy { mu: 0.5 });
        let s: SourceMode = serde_json::from_str(r#"{"kind":"FaintNoDecoy"}"#).unwrap();
        assert_eq!(s, SourceMode::FaintNoDecoy { mu: None });
        assert!(SourceMode::FaintDecoy { mu: -1.0 }.validate().is_err());
    }
}
