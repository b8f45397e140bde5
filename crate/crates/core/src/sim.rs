//! Pulse-level Monte Carlo of the time-coding protocols.
//!
//! Every pulse owns an independent ChaCha8 stream: the key is expanded from
//! the 64-bit seed with `SeedableRng::seed_from_u64`, and pulse `k` uses
//! stream number `k` from word position 0. Chunks of pulses run in parallel and
//! only integer counters are summed, so results do not depend on scheduling.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{qber_for_eta, transmission, ChannelParams};
use crate::error::{invalid, Result};
use crate::linalg::StateVector;
use crate::protocol::{
    dephased_density, encode_pulse, interferometer_output_delayed, mixed_output_intensity,
    AliceSymbol, Port, ProtocolKind, SymbolMix, DEFAULT_C3TS_COHERENCE_FRACTION,
};

/// Name of the generator recorded in every result.
pub const RNG_ALGORITHM: &str = "ChaCha8, seed_from_u64 key, one stream per pulse index";
/// Largest accepted pulse count; keeps every counter exactly representable as f64.
pub const MAX_PULSES: u64 = 1 << 53;
/// Rows of [`compare_to_analytic`] beyond this many standard errors are flagged.
pub const FLAG_Z: f64 = 4.0;

const CHUNK: u64 = 1 << 16;
const PHASE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum AttackModel {
    #[default]
    None,
    /// Eve measures every pulse in the time basis and resends the collapsed slot.
    InterceptResend,
}

fn default_measure_coherence_prob() -> f64 {
    0.5
}

fn default_phases() -> Vec<f64> {
    vec![0.0, PI]
}

fn default_coherence_fraction() -> f64 {
    DEFAULT_C3TS_COHERENCE_FRACTION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub protocol: ProtocolKind,
    #[serde(default)]
    pub channel: ChannelParams,
    pub n_pulses: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub attack: AttackModel,
    /// Probability that Bob's beamsplitter routes a pulse to the interferometer.
    #[serde(default = "default_measure_coherence_prob")]
    pub measure_coherence_prob: f64,
    /// Phases applied to the long arm, chosen uniformly per pulse.
    #[serde(default = "default_phases")]
    pub interferometer_phases: Vec<f64>,
    /// Share of C3TS pulses that are 1-3 coherence pulses.
    #[serde(default = "default_coherence_fraction")]
    pub c3ts_coherence_fraction: f64,
}

impl SimConfig {
    pub fn new(protocol: ProtocolKind, channel: ChannelParams, n_pulses: u64, seed: u64) -> Self {
        Self {
            protocol,
            channel,
            n_pulses,
            seed,
            attack: AttackModel::None,
            measure_coherence_prob: default_measure_coherence_prob(),
            interferometer_phases: default_phases(),
            c3ts_coherence_fraction: default_coherence_fraction(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.channel.validate()?;
        if self.n_pulses == 0 {
            return invalid("n_pulses must be at least 1");
        }
        if self.n_pulses > MAX_PULSES {
            return invalid(format!("n_pulses {} exceeds {MAX_PULSES}", self.n_pulses));
        }
        if !(0.0..=1.0).contains(&self.measure_coherence_prob) {
            return invalid(format!(
                "measure_coherence_prob {} outside [0, 1]",
                self.measure_coherence_prob
            ));
        }
        if self.interferometer_phases.is_empty() {
            return invalid("interferometer_phases must not be empty");
        }
        if self.interferometer_phases.iter().any(|p| !p.is_finite()) {
            return invalid("interferometer phases must be finite");
        }
        self.protocol
            .symbol_mix_with(self.c3ts_coherence_fraction)?;
        Ok(())
    }

    fn mix(&self) -> SymbolMix {
        self.protocol
            .symbol_mix_with(self.c3ts_coherence_fraction)
            .expect("validated")
    }
}

/// Estimate with its binomial (or delta-method) standard error. Both are
/// absent when no events contributed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: Option<f64>,
    pub standard_error: Option<f64>,
}

impl Estimate {
    const NONE: Estimate = Estimate {
        value: None,
        standard_error: None,
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseCounts {
    pub phase: f64,
    /// Tested pulses that reached the interferometer with this phase.
    pub trials: u64,
    pub plus_clicks: u64,
    pub minus_clicks: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub protocol: ProtocolKind,
    pub seed: u64,
    pub rng: String,
    pub sent: u64,
    /// Single-click events in the time-of-arrival measurement.
    pub detected_time_basis: u64,
    /// Time-basis windows discarded because several slots clicked.
    pub double_clicks: u64,
    pub sifted: u64,
    pub errors: u64,
    pub qber_estimate: Estimate,
    /// Single-click counts per time slot.
    pub slot_histogram: Vec<u64>,
    pub visibility_estimate: Estimate,
    pub phase_counts: Vec<PhaseCounts>,
    /// Clicks in the port that a perfectly coherent pulse never reaches.
    pub flagged_coherence_detections: u64,
}

/// Index drawn from `|amplitude|²` with the uniform `u ∈ [0, 1)`.
fn born_index(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// Time-basis measure-and-resend: returns `|i⟩` with probability `|a_i|²`,
/// selected by the uniform draw `u ∈ [0, 1)`.
pub fn intercept_resend(pulse: &StateVector, u: f64) -> StateVector {
    let i = born_index(&pulse.probabilities(), u);
    StateVector::basis(pulse.dim(), i).expect("index within pulse dimension")
}

/// Arrival slot after the intrinsic error, which swaps the two key slots.
fn flip_slot(protocol: ProtocolKind, slot: usize) -> usize {
    let (k0, k1) = protocol.key_slots();
    if slot == k0 {
        k1
    } else if slot == k1 {
        k0
    } else {
        slot
    }
}

fn symbol_index(s: AliceSymbol) -> usize {
    match s {
        AliceSymbol::Bit0 => 0,
        AliceSymbol::Bit1 => 1,
        AliceSymbol::Coherence => 2,
    }
}

const SYMBOLS: [AliceSymbol; 3] = [AliceSymbol::Bit0, AliceSymbol::Bit1, AliceSymbol::Coherence];

/// Port outcome probabilities at the monitored slot, and which port should
/// stay dark for an ideal pulse (if any).
#[derive(Debug, Clone, Copy)]
struct PortOdds {
    plus: f64,
    minus: f64,
    dark: Option<Port>,
}

/// Everything per pulse that does not depend on the random draws.
struct Tables {
    protocol: ProtocolKind,
    mix: SymbolMix,
    n_slots: usize,
    eta: f64,
    q_a: f64,
    p_dark: f64,
    route: f64,
    attack: AttackModel,
    n_phases: usize,
    /// `[symbol] -> slot probabilities`.
    probs: Vec<Vec<f64>>,
    /// `[symbol][phase]` for the undisturbed source, `None` if untested.
    clean: Vec<Option<Vec<PortOdds>>>,
    /// `[symbol][collapsed slot][phase]` after Eve's measurement.
    collapsed: Vec<Option<Vec<Vec<PortOdds>>>>,
}

fn dark_port(pulse: &StateVector, phase: f64, delay: usize, slot: usize) -> Option<Port> {
    let out = interferometer_output_delayed(pulse, phase, delay);
    let (p, m) = (
        out.intensity(slot, Port::Plus),
        out.intensity(slot, Port::Minus),
    );
    if m < PHASE_TOL && p > PHASE_TOL {
        Some(Port::Minus)
    } else if p < PHASE_TOL && m > PHASE_TOL {
        Some(Port::Plus)
    } else {
        None
    }
}

impl Tables {
    fn new(cfg: &SimConfig) -> Result<Self> {
        let protocol = cfg.protocol;
        let mix = cfg.mix();
        let eta = transmission(&cfg.channel);
        let n_slots = protocol.slots();
        let mut probs = Vec::new();
        let mut clean = Vec::new();
        let mut collapsed = Vec::new();
        for s in SYMBOLS {
            let pulse = if mix.probability(s) > 0.0 {
                Some(encode_pulse(protocol, s)?)
            } else {
                None
            };
            probs.push(
                pulse
                    .as_ref()
                    .map(|p| p.probabilities())
                    .unwrap_or_else(|| vec![0.0; n_slots]),
            );
            let test = pulse.as_ref().and(protocol.coherence_test(s));
            match (pulse, test) {
                (Some(pulse), Some(t)) => {
                    let rho = dephased_density(&pulse, cfg.channel.v_a * eta);
                    let odds = |rho: &_, phase: f64, dark| PortOdds {
                        plus: mixed_output_intensity(
                            rho,
                            phase,
                            t.delay_slots,
                            t.monitored_slot,
                            Port::Plus,
                        ),
                        minus: mixed_output_intensity(
                            rho,
                            phase,
                            t.delay_slots,
                            t.monitored_slot,
                            Port::Minus,
                        ),
                        dark,
                    };
                    clean.push(Some(
                        cfg.interferometer_phases
                            .iter()
                            .map(|&ph| {
                                odds(
                                    &rho,
                                    ph,
                                    dark_port(&pulse, ph, t.delay_slots, t.monitored_slot),
                                )
                            })
                            .collect(),
                    ));
                    collapsed.push(Some(
                        (0..n_slots)
                            .map(|i| {
                                let basis = StateVector::basis(n_slots, i).expect("slot in range");
                                let rho = basis.projector();
                                cfg.interferometer_phases
                                    .iter()
                                    .map(|&ph| {
                                        odds(
                                            &rho,
                                            ph,
                                            dark_port(&pulse, ph, t.delay_slots, t.monitored_slot),
                                        )
                                    })
                                    .collect()
                            })
                            .collect(),
                    ));
                }
                _ => {
                    clean.push(None);
                    collapsed.push(None);
                }
            }
        }
        Ok(Self {
            protocol,
            mix,
            n_slots,
            eta,
            q_a: cfg.channel.q_a,
            p_dark: cfg.channel.p_dark,
            route: cfg.measure_coherence_prob,
            attack: cfg.attack,
            n_phases: cfg.interferometer_phases.len(),
            probs,
            clean,
            collapsed,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Tally {
    sent: u64,
    detected: u64,
    double_clicks: u64,
    sifted: u64,
    errors: u64,
    histogram: Vec<u64>,
    trials: Vec<u64>,
    plus: Vec<u64>,
    minus: Vec<u64>,
    flagged: u64,
}

impl Tally {
    fn new(n_slots: usize, n_phases: usize) -> Self {
        Self {
            sent: 0,
            detected: 0,
            double_clicks: 0,
            sifted: 0,
            errors: 0,
            histogram: vec![0; n_slots],
            trials: vec![0; n_phases],
            plus: vec![0; n_phases],
            minus: vec![0; n_phases],
            flagged: 0,
        }
    }

    fn merge(mut self, o: Tally) -> Tally {
        self.sent += o.sent;
        self.detected += o.detected;
        self.double_clicks += o.double_clicks;
        self.sifted += o.sifted;
        self.errors += o.errors;
        self.flagged += o.flagged;
        for (a, b) in [
            (&mut self.histogram, &o.histogram),
            (&mut self.trials, &o.trials),
            (&mut self.plus, &o.plus),
            (&mut self.minus, &o.minus),
        ] {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        self
    }
}

fn simulate_pulse(t: &Tables, rng: &mut ChaCha8Rng, tally: &mut Tally) {
    tally.sent += 1;
    let symbol = t.mix.sample(rng.gen());
    let si = symbol_index(symbol);
    let collapsed = match t.attack {
        AttackModel::None => None,
        AttackModel::InterceptResend => Some(born_index(&t.probs[si], rng.gen())),
    };
    let survives = rng.gen::<f64>() < t.eta;
    let to_interferometer = rng.gen::<f64>() < t.route;

    if !to_interferometer {
        let mut slot = collapsed.unwrap_or_else(|| born_index(&t.probs[si], rng.gen()));
        if rng.gen::<f64>() < t.q_a {
            slot = flip_slot(t.protocol, slot);
        }
        let mut clicked = None;
        let mut clicks = 0;
        for s in 0..t.n_slots {
            let dark = rng.gen::<f64>() < t.p_dark;
            if dark || (survives && s == slot) {
                clicks += 1;
                clicked = Some(s);
            }
        }
        match (clicks, clicked) {
            (1, Some(s)) => {
                tally.detected += 1;
                tally.histogram[s] += 1;
                let (k0, k1) = t.protocol.key_slots();
                let expected = match symbol {
                    AliceSymbol::Bit0 => Some(k0),
                    AliceSymbol::Bit1 => Some(k1),
                    AliceSymbol::Coherence => None,
                };
                if let Some(e) = expected {
                    if s == k0 || s == k1 {
                        tally.sifted += 1;
                        if s != e {
                            tally.errors += 1;
                        }
                    }
                }
            }
            (0, _) => {}
            _ => tally.double_clicks += 1,
        }
        return;
    }

    let odds_by_phase = match collapsed {
        None => t.clean[si].as_ref(),
        Some(i) => t.collapsed[si].as_ref().map(|v| &v[i]),
    };
    let Some(odds_by_phase) = odds_by_phase else {
        return;
    };
    let k = ((rng.gen::<f64>() * t.n_phases as f64) as usize).min(t.n_phases - 1);
    let odds = odds_by_phase[k];
    let u: f64 = rng.gen();
    let photon_plus = survives && u < odds.plus;
    let photon_minus = survives && !photon_plus && u < odds.plus + odds.minus;
    let plus = photon_plus | (rng.gen::<f64>() < t.p_dark);
    let minus = photon_minus | (rng.gen::<f64>() < t.p_dark);
    tally.trials[k] += 1;
    tally.plus[k] += plus as u64;
    tally.minus[k] += minus as u64;
    let dark_clicked = match odds.dark {
        Some(Port::Plus) => plus,
        Some(Port::Minus) => minus,
        None => false,
    };
    tally.flagged += dark_clicked as u64;
}

fn run_range(t: &Tables, base: &ChaCha8Rng, start: u64, end: u64) -> Tally {
    let mut tally = Tally::new(t.n_slots, t.n_phases);
    for k in start..end {
        let mut rng = base.clone();
        rng.set_stream(k);
        rng.set_word_pos(0);
        simulate_pulse(t, &mut rng, &mut tally);
    }
    tally
}

fn phase_matches(phase: f64, target: f64) -> bool {
    let d = (phase - target).rem_euclid(2.0 * PI);
    d < PHASE_TOL || 2.0 * PI - d < PHASE_TOL
}

/// Sums `(trials, value)` over all configured phases equal to `target`.
fn pooled<'a>(
    phases: &'a [f64],
    per_phase: impl Iterator<Item = (u64, f64)> + 'a,
    target: f64,
) -> Option<(u64, f64)> {
    let mut found = false;
    let (mut n, mut acc) = (0u64, 0.0);
    for (ph, (trials, v)) in phases.iter().zip(per_phase) {
        if phase_matches(*ph, target) {
            found = true;
            n += trials;
            acc += v;
        }
    }
    found.then_some((n, acc))
}

/// `V = (r₀ − r_π)/(r₀ + r_π)` and its delta-method standard error, from
/// click rates and trial counts at the two phases.
fn visibility_with_se(r0: f64, n0: u64, rpi: f64, npi: u64) -> Option<(f64, f64)> {
    let sum = r0 + rpi;
    if n0 == 0 || npi == 0 || sum <= 0.0 {
        return None;
    }
    let v = (r0 - rpi) / sum;
    let var0 = r0 * (1.0 - r0) / n0 as f64;
    let varpi = rpi * (1.0 - rpi) / npi as f64;
    let se = 2.0 / (sum * sum) * (rpi * rpi * var0 + r0 * r0 * varpi).sqrt();
    Some((v, se))
}

fn finish(cfg: &SimConfig, t: Tally) -> SimResult {
    let qber_estimate = if t.sifted > 0 {
        let q = t.errors as f64 / t.sifted as f64;
        Estimate {
            value: Some(q),
            standard_error: Some((q * (1.0 - q) / t.sifted as f64).sqrt()),
        }
    } else {
        Estimate::NONE
    };
    let phases = &cfg.interferometer_phases;
    let per_phase = || t.trials.iter().zip(&t.plus).map(|(&n, &p)| (n, p as f64));
    let visibility_estimate = match (
        pooled(phases, per_phase(), 0.0),
        pooled(phases, per_phase(), PI),
    ) {
        (Some((n0, c0)), Some((npi, cpi))) if n0 > 0 && npi > 0 => {
            match visibility_with_se(c0 / n0 as f64, n0, cpi / npi as f64, npi) {
                Some((v, se)) => Estimate {
                    value: Some(v),
                    standard_error: Some(se),
                },
                None => Estimate::NONE,
            }
        }
        _ => Estimate::NONE,
    };
    SimResult {
        protocol: cfg.protocol,
        seed: cfg.seed,
        rng: RNG_ALGORITHM.to_string(),
        sent: t.sent,
        detected_time_basis: t.detected,
        double_clicks: t.double_clicks,
        sifted: t.sifted,
        errors: t.errors,
        qber_estimate,
        slot_histogram: t.histogram,
        visibility_estimate,
        phase_counts: phases
            .iter()
            .enumerate()
            .map(|(k, &phase)| PhaseCounts {
                phase,
                trials: t.trials[k],
                plus_clicks: t.plus[k],
                minus_clicks: t.minus[k],
            })
            .collect(),
        flagged_coherence_detections: t.flagged,
    }
}

pub fn run_simulation(cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    let tables = Tables::new(cfg)?;
    let base = ChaCha8Rng::seed_from_u64(cfg.seed);
    let chunks = cfg.n_pulses.div_ceil(CHUNK);
    let tally = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            run_range(&tables, &base, start, (start + CHUNK).min(cfg.n_pulses))
        })
        .reduce(|| Tally::new(tables.n_slots, tables.n_phases), Tally::merge);
    Ok(finish(cfg, tally))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    Flagged,
    InsufficientData,
}

/// One simulated quantity against its no-attack expectation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub quantity: String,
    pub simulated: Option<f64>,
    pub analytic: f64,
    /// Standard error of the simulated value evaluated at the analytic value.
    pub standard_error: Option<f64>,
    /// `(simulated − analytic) / standard_error`; absent when undefined.
    pub z: Option<f64>,
    pub status: RowStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonReport {
    pub fn flagged(&self) -> impl Iterator<Item = &ComparisonRow> {
        self.rows.iter().filter(|r| r.status == RowStatus::Flagged)
    }

    pub fn any_flagged(&self) -> bool {
        self.flagged().next().is_some()
    }

    pub fn row(&self, quantity: &str) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.quantity == quantity)
    }
}

fn row(quantity: String, simulated: Option<f64>, analytic: f64, se: Option<f64>) -> ComparisonRow {
    let (z, status) = match (simulated, se) {
        (Some(x), Some(se)) => {
            let diff = x - analytic;
            if se > 0.0 {
                let z = diff / se;
                let status = if z.abs() > FLAG_Z {
                    RowStatus::Flagged
                } else {
                    RowStatus::Ok
                };
                (Some(z), status)
            } else if diff.abs() <= 1e-12 {
                (Some(0.0), RowStatus::Ok)
            } else {
                (None, RowStatus::Flagged)
            }
        }
        _ => (None, RowStatus::InsufficientData),
    };
    ComparisonRow {
        quantity,
        simulated,
        analytic,
        standard_error: se,
        z,
        status,
    }
}

/// Probability that a bit pulse lands in one of the key slots.
fn key_slot_fraction(protocol: ProtocolKind) -> f64 {
    let (k0, k1) = protocol.key_slots();
    let p = encode_pulse(protocol, AliceSymbol::Bit0)
        .expect("bit pulses exist for every protocol")
        .probabilities();
    p[k0] + p[k1]
}

/// Expected plus-port click rate at `phase` for tested pulses, no attack.
fn expected_plus_rate(t: &Tables, cfg: &SimConfig, phase_target: f64) -> Option<f64> {
    let k = cfg
        .interferometer_phases
        .iter()
        .position(|&p| phase_matches(p, phase_target))?;
    let (mut w, mut acc) = (0.0, 0.0);
    for s in SYMBOLS {
        if let Some(odds) = &t.clean[symbol_index(s)] {
            let p = t.mix.probability(s);
            let photon = t.eta * odds[k].plus;
            w += p;
            acc += p * (photon + t.p_dark - photon * t.p_dark);
        }
    }
    (w > 0.0).then(|| acc / w)
}

/// Single-click slot probabilities in the time arm, normalised, no attack.
fn expected_slot_fractions(t: &Tables) -> Vec<f64> {
    let n = t.n_slots;
    let mut arrival = vec![0.0; n];
    for s in SYMBOLS {
        let p = t.mix.probability(s);
        for (j, &pj) in t.probs[symbol_index(s)].iter().enumerate() {
            arrival[j] += p * (1.0 - t.q_a) * pj;
            arrival[flip_slot(t.protocol, j)] += p * t.q_a * pj;
        }
    }
    let quiet = (1.0 - t.p_dark).powi(n as i32 - 1);
    let single: Vec<f64> = arrival
        .iter()
        .map(|a| t.eta * a * quiet + (1.0 - t.eta) * t.p_dark * quiet)
        .collect();
    let total: f64 = single.iter().sum();
    single
        .into_iter()
        .map(|x| if total > 0.0 { x / total } else { 0.0 })
        .collect()
}

/// Checks a run against the no-attack model: sifted QBER against
/// `(η'Q_A + p_d)/(η' + 2p_d)` with `η'` the transmission times the key-slot
/// fraction, visibility against `ηV_A` (diluted by dark counts), and the
/// time-basis slot fractions.
pub fn compare_to_analytic(result: &SimResult, cfg: &SimConfig) -> Result<ComparisonReport> {
    cfg.validate()?;
    let t = Tables::new(cfg)?;
    let mut rows = Vec::new();

    let eta_key = t.eta * key_slot_fraction(cfg.protocol);
    let q = qber_for_eta(eta_key, t.q_a, t.p_dark);
    let se = (result.sifted > 0).then(|| (q * (1.0 - q) / result.sifted as f64).sqrt());
    rows.push(row("qber".into(), result.qber_estimate.value, q, se));

    if let (Some(r0), Some(rpi)) = (
        expected_plus_rate(&t, cfg, 0.0),
        expected_plus_rate(&t, cfg, PI),
    ) {
        let trials = |target| {
            pooled(
                &cfg.interferometer_phases,
                result.phase_counts.iter().map(|c| (c.trials, 0.0)),
                target,
            )
            .map(|(n, _)| n)
            .unwrap_or(0)
        };
        let expected = if r0 + rpi > 0.0 {
            (r0 - rpi) / (r0 + rpi)
        } else {
            0.0
        };
        let se = visibility_with_se(r0, trials(0.0), rpi, trials(PI)).map(|(_, se)| se);
        let se = se.filter(|_| result.visibility_estimate.value.is_some());
        rows.push(row(
            "visibility".into(),
            result.visibility_estimate.value,
            expected,
            se,
        ));
    }

    let fractions = expected_slot_fractions(&t);
    let n = result.detected_time_basis;
    for (i, &p) in fractions.iter().enumerate() {
        let sim = (n > 0).then(|| result.slot_histogram[i] as f64 / n as f64);
        let se = (n > 0).then(|| (p * (1.0 - p) / n as f64).sqrt());
        rows.push(row(format!("slot_fraction_{}", i + 1), sim, p, se));
    }
    Ok(ComparisonReport { rows })
}
