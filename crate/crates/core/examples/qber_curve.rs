//! Information balance against QBER, tolerable QBER per protocol, and the
//! point where 3TS leaks everything to Eve.

use tempokey::attack::{max_qber, secret_rate, three_state_saturation_qber};
use tempokey::distance::{chi_crossing, qber_sweep};
use tempokey::protocol::ProtocolKind;

fn main() -> tempokey::Result<()> {
    println!(
        "{:>6} {:>9} {:>9} {:>9} {:>9}",
        "Q", "I_AB", "χ(2TS)", "χ(3TS)", "ΔI(3TS)"
    );
    for k in 0..=10 {
        let q = 0.02 * k as f64;
        let ts2 = secret_rate(ProtocolKind::Ts2, q, 1.0)?;
        let ts3 = secret_rate(ProtocolKind::Ts3, q, 1.0)?;
        println!(
            "{q:>6.2} {:>9.5} {:>9.5} {:>9.5} {:>9.5}",
            ts2.i_ab, ts2.chi_ae, ts3.chi_ae, ts3.delta_i
        );
    }

    for protocol in [ProtocolKind::Ts2, ProtocolKind::Ts3] {
        for v_a in [1.0, 0.95, 0.9] {
            println!(
                "max QBER {protocol} at V_A = {v_a}: {:.5}",
                max_qber(protocol, v_a)?
            );
        }
    }

    let grid: Vec<f64> = (0..=500).map(|k| k as f64 * 5e-4).collect();
    let rows = qber_sweep(ProtocolKind::Ts2, &[1.0], &grid)?;
    println!(
        "2TS: χ reaches I_AB at Q = {:.4}",
        chi_crossing(&rows).unwrap_or(f64::NAN)
    );
    if let Some(q) = three_state_saturation_qber(1.0)? {
        println!("3TS: Eve learns the full bit from Q = {q:.4}");
    }
    Ok(())
}
