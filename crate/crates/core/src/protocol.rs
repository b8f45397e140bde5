//! Pulse encodings, joint Alice/Bob states and the imbalanced interferometer.
//!
//! Time slots are zero-based in code: the slot written `|1⟩` in the usual
//! notation is index 0 here.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{c, ComplexMatrix, StateVector, C64};

/// Fraction of C3TS pulses that carry the 1-3 coherence test.
pub const DEFAULT_C3TS_COHERENCE_FRACTION: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProtocolKind {
    /// Three time-slots: bits in overlapping pulses spanning slots 1-2 and 2-3.
    #[serde(rename = "TS3")]
    Ts3,
    /// Two time-slots: bits in single slots, coherence pulse across both.
    #[serde(rename = "TS2")]
    Ts2,
    /// 3TS completed with coherence pulses across slots 1 and 3.
    #[serde(rename = "C3TS")]
    C3ts,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 3] = [ProtocolKind::Ts3, ProtocolKind::Ts2, ProtocolKind::C3ts];

    /// Number of time slots spanned by the pulses.
    pub fn slots(self) -> usize {
        match self {
            ProtocolKind::Ts2 => 2,
            ProtocolKind::Ts3 | ProtocolKind::C3ts => 3,
        }
    }

    /// The two unambiguous slots that carry the key, as (bit 0, bit 1).
    pub fn key_slots(self) -> (usize, usize) {
        match self {
            ProtocolKind::Ts2 => (0, 1),
            ProtocolKind::Ts3 | ProtocolKind::C3ts => (0, 2),
        }
    }

    /// Alice's sending probabilities with the default C3TS coherence fraction.
    pub fn symbol_mix(self) -> SymbolMix {
        self.symbol_mix_with(DEFAULT_C3TS_COHERENCE_FRACTION)
            .expect("default coherence fraction is valid")
    }

    /// Alice's sending probabilities. `coherence_fraction` only affects C3TS.
    pub fn symbol_mix_with(self, coherence_fraction: f64) -> Result<SymbolMix> {
        if !(0.0..1.0).contains(&coherence_fraction) {
            return invalid(format!(
                "coherence fraction {coherence_fraction} outside [0, 1)"
            ));
        }
        Ok(match self {
            ProtocolKind::Ts2 => SymbolMix {
                bit0: 0.25,
                bit1: 0.25,
                coherence: 0.5,
            },
            ProtocolKind::Ts3 => SymbolMix {
                bit0: 0.5,
                bit1: 0.5,
                coherence: 0.0,
            },
            ProtocolKind::C3ts => {
                let bit = 0.5 * (1.0 - coherence_fraction);
                SymbolMix {
                    bit0: bit,
                    bit1: bit,
                    coherence: coherence_fraction,
                }
            }
        })
    }

    /// How Bob checks coherence for pulses carrying `symbol`, if at all.
    pub fn coherence_test(self, symbol: AliceSymbol) -> Option<CoherenceTest> {
        match (self, symbol) {
            (ProtocolKind::Ts2, AliceSymbol::Coherence) => Some(CoherenceTest {
                delay_slots: 1,
                monitored_slot: 1,
            }),
            (ProtocolKind::Ts3, AliceSymbol::Bit0) => Some(CoherenceTest {
                delay_slots: 1,
                monitored_slot: 1,
            }),
            (ProtocolKind::Ts3, AliceSymbol::Bit1) => Some(CoherenceTest {
                delay_slots: 1,
                monitored_slot: 2,
            }),
            (ProtocolKind::C3ts, AliceSymbol::Coherence) => Some(CoherenceTest {
                delay_slots: 2,
                monitored_slot: 2,
            }),
            _ => None,
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProtocolKind::Ts3 => "TS3",
            ProtocolKind::Ts2 => "TS2",
            ProtocolKind::C3ts => "C3TS",
        })
    }
}

impl FromStr for ProtocolKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "TS3" | "3TS" => Ok(ProtocolKind::Ts3),
            "TS2" | "2TS" => Ok(ProtocolKind::Ts2),
            "C3TS" => Ok(ProtocolKind::C3ts),
            other => invalid(format!("unknown protocol {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AliceSymbol {
    Bit0,
    Bit1,
    Coherence,
}

impl AliceSymbol {
    pub fn is_bit(self) -> bool {
        !matches!(self, AliceSymbol::Coherence)
    }
}

/// Sending probabilities of Alice's three pulse kinds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymbolMix {
    pub bit0: f64,
    pub bit1: f64,
    pub coherence: f64,
}

impl SymbolMix {
    pub fn probability(&self, symbol: AliceSymbol) -> f64 {
        match symbol {
            AliceSymbol::Bit0 => self.bit0,
            AliceSymbol::Bit1 => self.bit1,
            AliceSymbol::Coherence => self.coherence,
        }
    }

    /// Maps a uniform draw in `[0, 1)` to a symbol.
    pub fn sample(&self, u: f64) -> AliceSymbol {
        if u < self.bit0 {
            AliceSymbol::Bit0
        } else if u < self.bit0 + self.bit1 || self.coherence == 0.0 {
            AliceSymbol::Bit1
        } else {
            AliceSymbol::Coherence
        }
    }

    fn present(&self) -> impl Iterator<Item = (AliceSymbol, f64)> + '_ {
        [AliceSymbol::Bit0, AliceSymbol::Bit1, AliceSymbol::Coherence]
            .into_iter()
            .map(|s| (s, self.probability(s)))
            .filter(|(_, p)| *p > 0.0)
    }
}

/// Interferometer geometry used to check one kind of pulse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoherenceTest {
    /// Arm delay in slots (1 for T/2, 2 for T).
    pub delay_slots: usize,
    /// Output slot where the two arms overlap.
    pub monitored_slot: usize,
}

/// Single-photon pulse for `symbol` under `protocol`.
pub fn encode_pulse(protocol: ProtocolKind, symbol: AliceSymbol) -> Result<StateVector> {
    let h = FRAC_1_SQRT_2;
    let amps: &[f64] = match (protocol, symbol) {
        (ProtocolKind::Ts3 | ProtocolKind::C3ts, AliceSymbol::Bit0) => &[h, h, 0.0],
        (ProtocolKind::Ts3 | ProtocolKind::C3ts, AliceSymbol::Bit1) => &[0.0, h, h],
        (ProtocolKind::C3ts, AliceSymbol::Coherence) => &[h, 0.0, h],
        (ProtocolKind::Ts2, AliceSymbol::Bit0) => &[1.0, 0.0],
        (ProtocolKind::Ts2, AliceSymbol::Bit1) => &[0.0, 1.0],
        (ProtocolKind::Ts2, AliceSymbol::Coherence) => &[h, h],
        (ProtocolKind::Ts3, AliceSymbol::Coherence) => {
            return invalid("3TS has no coherence pulse");
        }
    };
    StateVector::from_real(amps)
}

/// Purification of Bob's ensemble on Alice ⊗ Bob.
#[derive(Debug, Clone)]
pub struct JointState {
    pub state: StateVector,
    /// Alice's register: one basis state per symbol sent with nonzero probability.
    pub dim_a: usize,
    pub dim_b: usize,
    pub symbols: Vec<AliceSymbol>,
}

impl JointState {
    pub fn dims(&self) -> [usize; 2] {
        [self.dim_a, self.dim_b]
    }

    /// Probability of Bob finding the photon in each time slot.
    pub fn bob_slot_probabilities(&self) -> Vec<f64> {
        let p = self.state.probabilities();
        (0..self.dim_b)
            .map(|b| (0..self.dim_a).map(|a| p[a * self.dim_b + b]).sum())
            .collect()
    }

    /// Projects Bob onto the given slots and renormalizes.
    pub fn project_bob(&self, slots: &[usize]) -> Result<StateVector> {
        let amps = self
            .state
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(i, &z)| {
                if slots.contains(&(i % self.dim_b)) {
                    z
                } else {
                    c(0.0, 0.0)
                }
            })
            .collect();
        StateVector::normalized(amps)
    }
}

/// `Σ √p_s |s⟩_A |pulse_s⟩_B` with the protocol's default sending probabilities.
pub fn joint_state(protocol: ProtocolKind) -> Result<JointState> {
    joint_state_with(protocol, protocol.symbol_mix())
}

pub fn joint_state_with(protocol: ProtocolKind, mix: SymbolMix) -> Result<JointState> {
    let terms: Vec<(AliceSymbol, f64)> = mix.present().collect();
    let dim_a = terms.len();
    let dim_b = protocol.slots();
    let mut amps = vec![c(0.0, 0.0); dim_a * dim_b];
    for (a, (symbol, p)) in terms.iter().enumerate() {
        let pulse = encode_pulse(protocol, *symbol)?;
        for (b, z) in pulse.amplitudes().iter().enumerate() {
            amps[a * dim_b + b] = z * p.sqrt();
        }
    }
    Ok(JointState {
        state: StateVector::new(amps)?,
        dim_a,
        dim_b,
        symbols: terms.into_iter().map(|(s, _)| s).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Port {
    Plus,
    Minus,
}

/// Amplitudes at the two output ports, per output time slot.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferometerOutput {
    pub plus: Vec<C64>,
    pub minus: Vec<C64>,
}

impl InterferometerOutput {
    pub fn slots(&self) -> usize {
        self.plus.len()
    }

    pub fn amplitude(&self, slot: usize, port: Port) -> C64 {
        match port {
            Port::Plus => self.plus[slot],
            Port::Minus => self.minus[slot],
        }
    }

    pub fn intensity(&self, slot: usize, port: Port) -> f64 {
        self.amplitude(slot, port).norm_sqr()
    }

    pub fn total_probability(&self) -> f64 {
        self.plus
            .iter()
            .chain(&self.minus)
            .map(|z| z.norm_sqr())
            .sum()
    }
}

/// Output of the T/2-imbalanced interferometer for a pure input pulse.
pub fn interferometer_output(input: &StateVector, phase: f64) -> InterferometerOutput {
    interferometer_output_delayed(input, phase, 1)
}

/// Same as [`interferometer_output`] with an arbitrary arm delay in slots.
///
/// The long arm maps `|i⟩ → |i + delay⟩` and picks up `e^{iφ}`; the output spans
/// `N + delay` slots.
pub fn interferometer_output_delayed(
    input: &StateVector,
    phase: f64,
    delay: usize,
) -> InterferometerOutput {
    let a = input.amplitudes();
    let n = a.len() + delay;
    let shift = C64::from_polar(1.0, phase);
    let at = |i: usize| a.get(i).copied().unwrap_or(c(0.0, 0.0));
    let delayed = |i: usize| {
        if i >= delay {
            at(i - delay) * shift
        } else {
            c(0.0, 0.0)
        }
    };
    let plus = (0..n).map(|i| (at(i) + delayed(i)) * 0.5).collect();
    let minus = (0..n).map(|i| (at(i) - delayed(i)) * 0.5).collect();
    InterferometerOutput { plus, minus }
}

/// Detection probability at `(slot, port)` for a mixed input `rho`.
pub fn mixed_output_intensity(
    rho: &ComplexMatrix,
    phase: f64,
    delay: usize,
    slot: usize,
    port: Port,
) -> f64 {
    // amplitude functional: out = Σ_j w_j a_j
    let n = rho.dim();
    let sign = match port {
        Port::Plus => 1.0,
        Port::Minus => -1.0,
    };
    let mut w = vec![c(0.0, 0.0); n];
    if slot < n {
        w[slot] += c(0.5, 0.0);
    }
    if slot >= delay && slot - delay < n {
        w[slot - delay] += C64::from_polar(0.5 * sign, phase);
    }
    let mut acc = c(0.0, 0.0);
    for j in 0..n {
        for k in 0..n {
            acc += w[j] * rho[(j, k)] * w[k].conj();
        }
    }
    acc.re.max(0.0)
}

/// Pure pulse with every coherence scaled by `factor` (diagonal untouched).
pub fn dephased_density(pulse: &StateVector, factor: f64) -> ComplexMatrix {
    let mut rho = pulse.projector();
    for i in 0..rho.dim() {
        for j in 0..rho.dim() {
            if i != j {
                rho[(i, j)] *= factor;
            }
        }
    }
    rho
}

/// Fringe contrast `|n₀ − n_π| / (n₀ + n_π)` from counts at the two phases.
pub fn visibility_from_counts(counts_at_phase_0: u64, counts_at_phase_pi: u64) -> Result<f64> {
    let total = counts_at_phase_0 + counts_at_phase_pi;
    if total == 0 {
        return Err(Error::Estimation("no counts at either phase".into()));
    }
    Ok((counts_at_phase_0 as f64 - counts_at_phase_pi as f64).abs() / total as f64)
}
