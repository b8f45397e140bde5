//! Pulse-level simulation checked against the analytic model, with and
//! without an intercept-resend eavesdropper.

use tempokey::channel::ChannelParams;
use tempokey::protocol::ProtocolKind;
use tempokey::sim::{compare_to_analytic, run_simulation, AttackModel, SimConfig};

fn main() -> tempokey::Result<()> {
    let fiber = ChannelParams::default().at_length(25.0);
    let honest = SimConfig::new(ProtocolKind::Ts2, fiber, 400_000, 2024);
    let lab = ChannelParams {
        eta_detector: 1.0,
        p_dark: 0.0,
        q_a: 0.0,
        ..ChannelParams::default()
    };
    let eve = SimConfig {
        attack: AttackModel::InterceptResend,
        ..SimConfig::new(ProtocolKind::Ts2, lab, 400_000, 2024)
    };

    for (name, cfg) in [("no attack, 25 km", honest), ("intercept-resend, lab", eve)] {
        let r = run_simulation(&cfg)?;
        println!(
            "{name}: sifted {} errors {} slots {:?} flagged coherence clicks {}",
            r.sifted, r.errors, r.slot_histogram, r.flagged_coherence_detections
        );
        for row in compare_to_analytic(&r, &cfg)?.rows {
            println!(
                "  {:<16} sim {:>10} analytic {:.5} z {:>8} {:?}",
                row.quantity,
                row.simulated.map_or("-".into(), |x| format!("{x:.5}")),
                row.analytic,
                row.z.map_or("-".into(), |z| format!("{z:.2}")),
                row.status
            );
        }
    }
    Ok(())
}
