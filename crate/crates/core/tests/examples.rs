use std::path::PathBuf;
use std::process::Command;

// `cargo test` builds every example into target/<profile>/examples
fn example_path(name: &str) -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    profile_dir
        .join("examples")
        .join(format!("{name}{}", std::env::consts::EXE_SUFFIX))
}

fn run_example(name: &str) -> String {
    let out = Command::new(example_path(name))
        .output()
        .unwrap_or_else(|e| panic!("example {name} did not start: {e}"));
    assert!(
        out.status.success(),
        "{name}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn entropy_basics() {
    assert!(run_example("entropy_basics").contains("S(Tr_B |Φ+⟩⟨Φ+|) = 1.000000"));
}

#[test]
fn interferometer() {
    assert!(run_example("interferometer").contains("V = 0.9: fringe contrast 0.900"));
}

#[test]
fn qber_curve() {
    let out = run_example("qber_curve");
    assert!(out.contains("max QBER TS2 at V_A = 1: 0.110"));
    assert!(out.contains("Eve learns the full bit from Q = 0.1464"));
}

#[test]
fn secure_distance() {
    let out = run_example("secure_distance");
    assert!(out.contains("TS3 V_A = 1   :  226.9"));
    assert!(out.contains("\"unbounded\""));
}

#[test]
fn rate_curve() {
    assert!(run_example("rate_curve").contains("G_μ = 1.781e-6"));
}

#[test]
fn attack_optimizer() {
    assert!(
        run_example("attack_optimizer").contains("grid ⟨11|33⟩ = 0.62000 vs 2cos²φ − 1 = 0.62000")
    );
}

#[test]
fn monte_carlo() {
    let out = run_example("monte_carlo");
    assert!(out.contains("Flagged"));
}

#[test]
fn run_config() {
    assert!(run_example("run_config").contains("exit code 2"));
}
