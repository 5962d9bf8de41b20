use eie_core::conductivity::{AnalyticConductivity, ConductivityId};
use eie_core::experiments::{parse_value_list, OutputFormat, ScenarioTag, SweepParam};
use eie_core::piecewise::{build_piecewise, PiecewiseSeparableConductivity};
use proptest::prelude::*;

fn sample_dump() -> String {
    let src = AnalyticConductivity::new(ConductivityId::Sinusoidal);
    build_piecewise(&src, 21, 60.0, 40).unwrap().to_json()
}

#[test]
fn strip_dump_round_trips() {
    let text = sample_dump();
    let loaded = PiecewiseSeparableConductivity::from_json(&text).unwrap();
    assert_eq!(loaded.to_json(), text);
    assert_eq!(loaded.decomposition().strip_count(), 21);
}

#[test]
fn strip_dump_rejects_broken_invariants() {
    let mut value: serde_json::Value = serde_json::from_str(&sample_dump()).unwrap();
    value["decomposition"]["edges"][3] = serde_json::json!(5.0);
    assert!(PiecewiseSeparableConductivity::from_json(&value.to_string()).is_err());

    let mut value: serde_json::Value = serde_json::from_str(&sample_dump()).unwrap();
    value["profiles"].as_array_mut().unwrap().pop();
    assert!(PiecewiseSeparableConductivity::from_json(&value.to_string()).is_err());

    assert!(PiecewiseSeparableConductivity::from_json("").is_err());
    assert!(PiecewiseSeparableConductivity::from_json("{}").is_err());
}

#[test]
fn strip_dump_rejects_one_sided_knots() {
    let mut value: serde_json::Value = serde_json::from_str(&sample_dump()).unwrap();
    let knots = value["profiles"][0]["knots"].as_array_mut().unwrap();
    let n = knots.len();
    for (i, k) in knots.iter_mut().enumerate() {
        *k = serde_json::json!(-0.5 + 0.3 * i as f64 / n as f64);
    }
    assert!(PiecewiseSeparableConductivity::from_json(&value.to_string()).is_err());
}

#[test]
fn strip_dump_accepts_constant_profiles() {
    let text = include_str!("../../../fuzz/corpus/strip_dump/constant_m3.json");
    let pw = PiecewiseSeparableConductivity::from_json(text).unwrap();
    assert_eq!(
        pw.evaluate(-0.9, 0.1).unwrap(),
        2.0 * (-0.9 + 60.0) / (-2.0 / 3.0 + 60.0)
    );
}

#[test]
fn keyword_parsers() {
    assert_eq!("both".parse::<OutputFormat>().unwrap(), OutputFormat::Both);
    assert!("xml".parse::<OutputFormat>().is_err());
    assert_eq!("P".parse::<SweepParam>().unwrap(), SweepParam::RayNodes);
    assert_eq!(
        "lorentzxy-pw".parse::<ScenarioTag>().unwrap(),
        ScenarioTag::LorentzXyPw
    );
    assert!(" exp-sep".parse::<ScenarioTag>().is_err());
}

proptest! {
    #[test]
    fn scenario_tag_parser_never_panics(s in ".{0,40}") {
        if let Ok(tag) = s.parse::<ScenarioTag>() {
            prop_assert_eq!(tag.as_str(), s.as_str());
        }
    }

    #[test]
    fn value_list_accepts_exactly_integer_lists(items in proptest::collection::vec("[0-9]{1,6}| ?[0-9]{1,4} ?|[a-z]{1,3}|-[0-9]", 0..8)) {
        let text = items.join(",");
        let parsed = parse_value_list(&text);
        let all_numeric = !items.is_empty() && items.iter().all(|i| i.trim().parse::<usize>().is_ok());
        prop_assert_eq!(parsed.is_ok(), all_numeric);
    }

    #[test]
    fn strip_loader_never_panics_on_mutated_dumps(pos in 0usize..4000, byte in any::<u8>()) {
        let mut bytes = sample_dump().into_bytes();
        let i = pos % bytes.len();
        bytes[i] = byte;
        if let Ok(text) = String::from_utf8(bytes) {
            let _ = PiecewiseSeparableConductivity::from_json(&text);
        }
    }
}
