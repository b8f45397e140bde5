//! Cut-off distances and rate/QBER sweeps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::attack::{max_qber, secret_rate};
use crate::channel::{qber, ChannelParams};
use crate::error::{invalid, Result};
use crate::protocol::ProtocolKind;
use crate::pulse::{rate_signed, SourceMode};
use crate::roots::bisect_boundary;

/// Width of the final bisection bracket on the fiber length.
pub const DISTANCE_TOL_KM: f64 = 0.1;
/// Initial upper end of the length bracket.
pub const INITIAL_BRACKET_KM: f64 = 100.0;
/// Lengths beyond this are reported as unbounded.
pub const MAX_BRACKET_KM: f64 = 10_000.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutoffLength {
    Km(f64),
    Unbounded,
}

impl CutoffLength {
    pub fn km(&self) -> Option<f64> {
        match self {
            CutoffLength::Km(x) => Some(*x),
            CutoffLength::Unbounded => None,
        }
    }
}

impl Serialize for CutoffLength {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            CutoffLength::Km(x) => s.serialize_f64(*x),
            CutoffLength::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

impl<'de> Deserialize<'de> for CutoffLength {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Km(f64),
            Tag(String),
        }
        match Raw::deserialize(d)? {
            Raw::Km(x) => Ok(CutoffLength::Km(x)),
            Raw::Tag(t) if t == "unbounded" => Ok(CutoffLength::Unbounded),
            Raw::Tag(t) => Err(serde::de::Error::custom(format!("bad cut-off {t:?}"))),
        }
    }
}

/// Secure-distance boundary with the solver bracket it was found in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffResult {
    pub length_km: CutoffLength,
    pub bracket_width_km: f64,
}

/// Largest length at which `secure(L)` still holds, assuming it holds on an
/// initial interval and fails beyond.
fn find_cutoff<F>(secure: F) -> Result<CutoffResult>
where
    F: Fn(f64) -> Result<bool>,
{
    if !secure(0.0)? {
        return Ok(CutoffResult {
            length_km: CutoffLength::Km(0.0),
            bracket_width_km: 0.0,
        });
    }
    let mut lo = 0.0;
    let mut hi = INITIAL_BRACKET_KM;
    while secure(hi)? {
        if hi >= MAX_BRACKET_KM {
            return Ok(CutoffResult {
                length_km: CutoffLength::Unbounded,
                bracket_width_km: 0.0,
            });
        }
        lo = hi;
        hi = (hi * 2.0).min(MAX_BRACKET_KM);
    }
    let mut err = None;
    let (lo, hi) = bisect_boundary(
        |l| match secure(l) {
            Ok(b) => b,
            Err(e) => {
                err.get_or_insert(e);
                false
            }
        },
        lo,
        hi,
        DISTANCE_TOL_KM,
    );
    if let Some(e) = err {
        return Err(e);
    }
    Ok(CutoffResult {
        length_km: CutoffLength::Km(0.5 * (lo + hi)),
        bracket_width_km: hi - lo,
    })
}

/// Length at which the channel QBER reaches the protocol's tolerable QBER.
/// The length in `c` is ignored.
pub fn secure_distance(protocol: ProtocolKind, c: &ChannelParams) -> Result<CutoffResult> {
    c.validate()?;
    let threshold = max_qber(protocol, c.v_a)?;
    find_cutoff(|l| Ok(qber(&c.at_length(l)) < threshold))
}

/// Largest length with a positive key rate for the given source.
pub fn rate_cutoff(
    source: SourceMode,
    protocol: ProtocolKind,
    c: &ChannelParams,
) -> Result<CutoffResult> {
    c.validate()?;
    source.validate()?;
    find_cutoff(|l| Ok(rate_signed(source, protocol, &c.at_length(l))? > 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub length_km: f64,
    pub rate: f64,
    /// `10·log₁₀(rate / reference)`, absent where the rate is zero.
    pub rate_db: Option<f64>,
}

/// Rate against distance for one source and protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCurve {
    pub protocol: ProtocolKind,
    pub source: SourceMode,
    pub points: Vec<RatePoint>,
}

impl RateCurve {
    /// Least-squares slope of `rate_db` in dB/km over `[from_km, to_km]`.
    pub fn slope_db_per_km(&self, from_km: f64, to_km: f64) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .points
            .iter()
            .filter(|p| p.length_km >= from_km && p.length_km <= to_km)
            .filter_map(|p| p.rate_db.map(|db| (p.length_km, db)))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Some(sxy / sxx)
    }
}

/// Evenly spaced non-negative grid `l_min, l_min + step, … ≤ l_max`.
pub fn uniform_grid(l_min: f64, l_max: f64, step: f64) -> Result<Vec<f64>> {
    let valid = step > 0.0 && l_min < l_max && l_min >= 0.0 && l_max.is_finite();
    if !valid {
        return invalid(format!("empty grid: [{l_min}, {l_max}] with step {step}"));
    }
    let n = ((l_max - l_min) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|k| l_min + step * k as f64).collect())
}

pub fn sweep(
    source: SourceMode,
    protocol: ProtocolKind,
    c: &ChannelParams,
    l_min: f64,
    l_max: f64,
    step: f64,
) -> Result<RateCurve> {
    c.validate()?;
    source.validate()?;
    let lengths = uniform_grid(l_min, l_max, step)?;
    let rates = lengths
        .par_iter()
        .map(|&l| rate_signed(source, protocol, &c.at_length(l)).map(|r| r.max(0.0)))
        .collect::<Result<Vec<f64>>>()?;
    let reference = rates.iter().copied().find(|&r| r > 0.0);
    let points = lengths
        .into_iter()
        .zip(rates)
        .map(|(length_km, rate)| RatePoint {
            length_km,
            rate,
            rate_db: match reference {
                Some(r0) if rate > 0.0 => Some(10.0 * (rate / r0).log10()),
                _ => None,
            },
        })
        .collect();
    Ok(RateCurve {
        protocol,
        source,
        points,
    })
}

/// One row of the information-versus-QBER table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QberRow {
    pub protocol: ProtocolKind,
    pub v_a: f64,
    pub q: f64,
    pub i_ab: f64,
    pub chi_ae: f64,
    pub delta_i: f64,
}

/// Tabulates the information balance over every `(V_A, Q)` pair, `V_A` outermost.
pub fn qber_sweep(
    protocol: ProtocolKind,
    v_a_list: &[f64],
    q_grid: &[f64],
) -> Result<Vec<QberRow>> {
    let mut rows = Vec::with_capacity(v_a_list.len() * q_grid.len());
    for &v_a in v_a_list {
        for &q in q_grid {
            let p = secret_rate(protocol, q, v_a)?;
            rows.push(QberRow {
                protocol,
                v_a,
                q,
                i_ab: p.i_ab,
                chi_ae: p.chi_ae,
                delta_i: p.delta_i,
            });
        }
    }
    Ok(rows)
}

/// First QBER at which `χ_AE` reaches `I_AB` in a table for one visibility,
/// linearly interpolated between grid rows.
pub fn chi_crossing(rows: &[QberRow]) -> Option<f64> {
    rows.windows(2).find_map(|w| {
        let (a, b) = (w[0], w[1]);
        if a.delta_i > 0.0 && b.delta_i <= 0.0 {
            Some(a.q + (b.q - a.q) * a.delta_i / (a.delta_i - b.delta_i))
        } else {
            None
        }
    })
}
