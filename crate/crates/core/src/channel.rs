//! Fiber channel and detector model.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::linalg::{c, ComplexMatrix};

/// Fiber and detector description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelParams {
    /// Fiber attenuation in dB/km.
    pub alpha_db_per_km: f64,
    pub length_km: f64,
    /// Detector quantum efficiency.
    pub eta_detector: f64,
    /// Dark-count probability per time slot.
    pub p_dark: f64,
    /// Source/interferometer visibility.
    pub v_a: f64,
    /// QBER intrinsic to Alice's source.
    pub q_a: f64,
}

impl Default for ChannelParams {
    /// Fiber with SSPD detectors: 0.2 dB/km, 10 % efficiency, `p_d = 1e-7`,
    /// `Q_A = 2 %`, perfect visibility, zero length.
    fn default() -> Self {
        Self {
            alpha_db_per_km: 0.2,
            length_km: 0.0,
            eta_detector: 0.1,
            p_dark: 1e-7,
            v_a: 1.0,
            q_a: 0.02,
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.alpha_db_per_km,
            self.length_km,
            self.eta_detector,
            self.p_dark,
            self.v_a,
            self.q_a,
        ]
        .iter()
        .all(|x| x.is_finite());
        if !finite {
            return invalid("channel parameters must be finite");
        }
        if self.alpha_db_per_km < 0.0 || self.length_km < 0.0 {
            return invalid("attenuation and length must be non-negative");
        }
        if !(self.eta_detector > 0.0 && self.eta_detector <= 1.0) {
            return invalid(format!(
                "detector efficiency {} outside (0, 1]",
                self.eta_detector
            ));
        }
        if !(0.0..=1.0).contains(&self.p_dark) {
            return invalid(format!(
                "dark-count probability {} outside [0, 1]",
                self.p_dark
            ));
        }
        if !(0.0..=1.0).contains(&self.v_a) {
            return invalid(format!("visibility {} outside [0, 1]", self.v_a));
        }
        if !(0.0..=0.5).contains(&self.q_a) {
            return invalid(format!("intrinsic QBER {} outside [0, 1/2]", self.q_a));
        }
        Ok(())
    }

    /// Same channel at another fiber length.
    pub fn at_length(&self, length_km: f64) -> Self {
        Self { length_km, ..*self }
    }

    pub fn with_visibility(&self, v_a: f64) -> Self {
        Self { v_a, ..*self }
    }
}

/// Overall transmission `η = η_d · 10^(−αL/10)`.
pub fn transmission(c: &ChannelParams) -> f64 {
    c.eta_detector * 10f64.powf(-c.alpha_db_per_km * c.length_km / 10.0)
}

/// QBER from intrinsic errors and dark counts in the two key slots.
pub fn qber_for_eta(eta: f64, q_a: f64, p_dark: f64) -> f64 {
    let denom = eta + 2.0 * p_dark;
    if denom <= 0.0 {
        return 0.5;
    }
    (eta * q_a + p_dark) / denom
}

/// `Q = (ηQ_A + p_d) / (η + 2p_d)`.
pub fn qber(c: &ChannelParams) -> f64 {
    qber_for_eta(transmission(c), c.q_a, c.p_dark)
}

/// Visibility observed by Bob without eavesdropping, `V_B = ηV_A`.
pub fn bob_visibility(c: &ChannelParams) -> f64 {
    transmission(c) * c.v_a
}

/// Symmetric channel acting on a qubit: `ρ_B = ηρ_A + (1−η)/2 · I`.
pub fn depolarize(rho_a: &ComplexMatrix, eta: f64) -> Result<ComplexMatrix> {
    if rho_a.dim() != 2 {
        return invalid("depolarize expects a 2x2 density matrix");
    }
    if !(0.0..=1.0).contains(&eta) {
        return invalid(format!("transmission {eta} outside [0, 1]"));
    }
    rho_a.validate_density()?;
    let mixed = ComplexMatrix::identity(2)?.scale(c((1.0 - eta) / 2.0, 0.0));
    rho_a.scale(c(eta, 0.0)).add(&mixed)
}
