//! Key rate against distance for a single-photon source, faint pulses with
//! decoys, and faint pulses without decoys.

use tempokey::channel::ChannelParams;
use tempokey::distance::{rate_cutoff, sweep};
use tempokey::protocol::ProtocolKind;
use tempokey::pulse::{gain_and_qber_mu, optimal_faint_mu, SourceMode};

fn main() -> tempokey::Result<()> {
    let fiber = ChannelParams::default();
    let sources = [
        SourceMode::SinglePhoton,
        SourceMode::FaintDecoy { mu: 0.5 },
        SourceMode::FaintNoDecoy { mu: None },
    ];
    for source in sources {
        let curve = sweep(source, ProtocolKind::Ts2, &fiber, 0.0, 300.0, 10.0)?;
        let cut = rate_cutoff(source, ProtocolKind::Ts2, &fiber)?;
        let at_50 = curve.points.iter().find(|p| p.length_km == 50.0).unwrap();
        println!(
            "{source:<13} rate(50 km) = {:.3e}  slope {:.3} dB/km  cut-off {:?}",
            at_50.rate,
            curve.slope_db_per_km(10.0, 60.0).unwrap_or(f64::NAN),
            cut.length_km
        );
    }

    let far = fiber.at_length(225.0);
    let g = gain_and_qber_mu(&far, 0.5)?;
    println!(
        "decoy signal at 225 km: G_μ = {:.3e}, Q_μ = {:.4}",
        g.g_mu, g.q_mu
    );
    for l in [0.0, 40.0, 80.0] {
        let (mu, r) = optimal_faint_mu(&fiber.at_length(l))?;
        println!("best μ without decoys at {l:>3} km: {mu:.3e} (rate {r:.3e})");
    }
    Ok(())
}
