//! Pulse encodings and what the imbalanced interferometer makes of them.

use std::f64::consts::PI;

use tempokey::protocol::{
    dephased_density, encode_pulse, interferometer_output, joint_state, mixed_output_intensity,
    AliceSymbol, Port, ProtocolKind,
};

fn main() -> tempokey::Result<()> {
    for protocol in ProtocolKind::ALL {
        let js = joint_state(protocol)?;
        println!(
            "{protocol}: Bob's slot probabilities {:?}",
            js.bob_slot_probabilities()
        );
    }

    // 3TS β₁ = (|1⟩ + |2⟩)/√2 through the T/2 interferometer
    let beta1 = encode_pulse(ProtocolKind::Ts3, AliceSymbol::Bit0)?;
    for phase in [0.0, PI / 2.0, PI] {
        let out = interferometer_output(&beta1, phase);
        let plus: Vec<String> = (0..out.slots())
            .map(|i| format!("{:.3}", out.intensity(i, Port::Plus)))
            .collect();
        println!(
            "β₁ at φ = {phase:.3}: port + intensities per slot [{}]",
            plus.join(", ")
        );
    }

    // partial source coherence shrinks the fringe at the monitored slot
    let pulse = encode_pulse(ProtocolKind::Ts2, AliceSymbol::Coherence)?;
    for v in [1.0, 0.9, 0.5] {
        let rho = dephased_density(&pulse, v);
        let i0 = mixed_output_intensity(&rho, 0.0, 1, 1, Port::Plus);
        let ipi = mixed_output_intensity(&rho, PI, 1, 1, Port::Plus);
        println!("V = {v}: fringe contrast {:.3}", (i0 - ipi) / (i0 + ipi));
    }
    Ok(())
}
