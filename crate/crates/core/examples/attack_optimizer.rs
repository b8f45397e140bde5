//! Brute-force search over Eve's probe states against the closed-form optimum,
//! plus the purification check S(ρ_AB) = S(ρ_E).

use tempokey::attack::{
    optimize_attack_bruteforce, rho_ab_from_purification, s_rho_e_max, secret_rate, AttackParams,
};
use tempokey::linalg::von_neumann_entropy;
use tempokey::protocol::ProtocolKind;

fn main() -> tempokey::Result<()> {
    let (q, v) = (0.05, 0.9);
    let opt = optimize_attack_bruteforce(ProtocolKind::Ts2, q, v, 300)?;
    println!(
        "2TS Q = {q}, V = {v}: grid S = {:.6}, closed form {:.6}",
        opt.s_rho_e,
        s_rho_e_max(q, v)?
    );
    println!(
        "  at dQ = {:.4}, ⟨11|22⟩ = {:.4}, ⟨12|21⟩ = {:.4} ({} evaluations)",
        opt.params.dq(),
        opt.params.s_1122,
        opt.params.s_1221,
        opt.evaluations
    );

    let cos_phi = 1.0 - 2.0 * q;
    let opt3 = optimize_attack_bruteforce(ProtocolKind::Ts3, q, cos_phi, 300)?;
    println!(
        "3TS Q = {q}: grid ⟨11|33⟩ = {:.5} vs 2cos²φ − 1 = {:.5}; S = {:.6} vs {:.6}",
        opt3.params.s_1122,
        2.0 * cos_phi * cos_phi - 1.0,
        opt3.s_rho_e,
        secret_rate(ProtocolKind::Ts3, q, 1.0)?.s_rho_e
    );

    let p = AttackParams::from_mean(0.08, 0.01, 0.7, 0.4)?;
    let s_ab = von_neumann_entropy(&rho_ab_from_purification(&p)?)?;
    println!("purification: S(ρ_AB) = {s_ab:.12}");
    Ok(())
}
