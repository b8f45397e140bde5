//! Driving the subcommands in-process from a JSON run configuration.

use tempokey::cli::{render_distance, render_qber_curve, RunConfig};

fn main() -> tempokey::Result<()> {
    let cfg = RunConfig::from_json(
        r#"{
            "protocols": ["TS2"],
            "visibilities": [1.0],
            "qber_grid": {"min": 0.1, "max": 0.12, "step": 0.005}
        }"#,
    )?;
    print!("{}", render_qber_curve(&cfg)?);
    let report = render_distance(&cfg)?;
    println!(
        "{}",
        report
            .lines()
            .filter(|l| l.contains("length_km"))
            .collect::<Vec<_>>()
            .join("\n")
    );

    let rejected = RunConfig::from_json(r#"{"chanel": {}}"#).unwrap_err();
    println!(
        "typo in a section name: exit code {} ({rejected})",
        rejected.exit_code()
    );
    Ok(())
}
