//! Secure distance over fiber for 2TS and 3TS at a few source visibilities.

use tempokey::channel::{qber, ChannelParams};
use tempokey::distance::{secure_distance, CutoffLength};
use tempokey::protocol::ProtocolKind;

fn main() -> tempokey::Result<()> {
    let fiber = ChannelParams::default();
    println!(
        "α = {} dB/km, η_d = {}, p_d = {:e}, Q_A = {}",
        fiber.alpha_db_per_km, fiber.eta_detector, fiber.p_dark, fiber.q_a
    );
    for protocol in [ProtocolKind::Ts2, ProtocolKind::Ts3] {
        for v_a in [1.0, 0.95, 0.9] {
            let r = secure_distance(protocol, &fiber.with_visibility(v_a))?;
            match r.length_km {
                CutoffLength::Km(l) => println!(
                    "{protocol} V_A = {v_a:<4}: {l:7.2} km (bracket {:.3} km, QBER there {:.4})",
                    r.bracket_width_km,
                    qber(&fiber.at_length(l))
                ),
                CutoffLength::Unbounded => println!("{protocol} V_A = {v_a:<4}: unbounded"),
            }
        }
    }

    let quiet = ChannelParams {
        p_dark: 0.0,
        ..fiber
    };
    let r = secure_distance(ProtocolKind::Ts2, &quiet)?;
    println!(
        "without dark counts: {}",
        serde_json::to_string(&r.length_km).unwrap()
    );
    Ok(())
}
