use proptest::prelude::*;
use tempokey::attack::max_qber;
use tempokey::channel::{qber, ChannelParams};
use tempokey::distance::{rate_cutoff, secure_distance, sweep, CutoffLength};
use tempokey::protocol::ProtocolKind;
use tempokey::pulse::SourceMode;

fn km(c: CutoffLength) -> f64 {
    c.km().expect("bounded cut-off")
}

#[test]
fn single_photon_cutoff_is_the_secure_distance() {
    for protocol in [ProtocolKind::Ts2, ProtocolKind::Ts3] {
        for v_a in [1.0, 0.9] {
            let c = ChannelParams::default().with_visibility(v_a);
            let a = km(secure_distance(protocol, &c).unwrap().length_km);
            let b = km(rate_cutoff(SourceMode::SinglePhoton, protocol, &c)
                .unwrap()
                .length_km);
            assert!((a - b).abs() <= 0.1, "{protocol} {v_a}: {a} vs {b}");
        }
    }
}

#[test]
fn decoy_beats_no_decoy_everywhere() {
    let c = ChannelParams::default();
    let decoy = sweep(
        SourceMode::FaintDecoy { mu: 0.5 },
        ProtocolKind::Ts2,
        &c,
        0.0,
        250.0,
        5.0,
    )
    .unwrap();
    let faint = sweep(
        SourceMode::FaintNoDecoy { mu: None },
        ProtocolKind::Ts2,
        &c,
        0.0,
        250.0,
        5.0,
    )
    .unwrap();
    for (d, f) in decoy.points.iter().zip(&faint.points) {
        assert!(d.rate >= f.rate, "{} km", d.length_km);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn qber_at_cutoff_hits_threshold(
        v_a in 0.85f64..=1.0, q_a in 0.0f64..0.04, alpha in 0.15f64..0.35
    ) {
        let c = ChannelParams { alpha_db_per_km: alpha, q_a, v_a, ..ChannelParams::default() };
        let l = km(secure_distance(ProtocolKind::Ts2, &c).unwrap().length_km);
        let threshold = max_qber(ProtocolKind::Ts2, v_a).unwrap();
        prop_assert!(qber(&c.at_length((l - 0.2).max(0.0))) < threshold);
        prop_assert!(qber(&c.at_length(l + 0.2)) >= threshold);
    }

    #[test]
    fn rates_decrease_with_length(l in 0.0f64..240.0, dl in 1.0f64..30.0) {
        let c = ChannelParams::default();
        for source in [SourceMode::SinglePhoton, SourceMode::FaintDecoy { mu: 0.5 }] {
            let near = tempokey::pulse::rate(source, ProtocolKind::Ts2, &c.at_length(l)).unwrap();
            let far = tempokey::pulse::rate(source, ProtocolKind::Ts2, &c.at_length(l + dl)).unwrap();
            prop_assert!(far <= near);
        }
    }
}
