use std::path::PathBuf;

use geomean_cli::config::{format_shift, parse_shift, OutputFormat, RunConfig};
use geomean_core::{Complex64, PositiveSequence};
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e6f64..1e6, -1.0f64..1.0, Just(0.0), (-300i32..300).prop_map(|e| 10f64.powi(e))]
}

fn config() -> impl Strategy<Value = RunConfig> {
    (
        prop::collection::vec(prop_oneof![1e-8f64..1e8, 0.1f64..10.0], 1..10),
        finite(),
        prop_oneof![Just(0.0), finite()],
        1e-14f64..1e-2,
        1usize..=20,
        2usize..10_000,
        prop_oneof![Just(OutputFormat::Text), Just(OutputFormat::Json), Just(OutputFormat::Csv)],
        prop::option::of("[a-z][a-z0-9_]{0,8}(\\.csv)?"),
    )
        .prop_map(|(seq, re, im, tolerance, max_order, samples, output_format, out)| RunConfig {
            sequence: PositiveSequence::new(seq).unwrap(),
            shift: Complex64::new(re, im),
            tolerance,
            max_order,
            samples,
            output_format,
            output_path: out.map(PathBuf::from),
        })
}

proptest! {
    #[test]
    fn formatting_then_parsing_is_identity(cfg in config()) {
        let parsed = RunConfig::parse_flags(cfg.to_flags()).unwrap();
        prop_assert_eq!(&parsed, &cfg);
        prop_assert_eq!(parsed.to_string(), cfg.to_string());
    }

    #[test]
    fn shift_text_roundtrips(re in finite(), im in finite()) {
        let z = Complex64::new(re, im);
        let back = parse_shift(&format_shift(z)).unwrap();
        prop_assert_eq!(back, Complex64::new(re + 0.0, im));
    }
}

#[test]
fn displayed_config_reads_like_flags() {
    let cfg = RunConfig::parse_flags(["--seq", "1,4", "--shift", "0.5-2i"]).unwrap();
    assert_eq!(cfg.to_string(), "--seq 1,4 --shift 0.5-2i --tol 1e-10 --max-order 10 --samples 256 --format text");
}
