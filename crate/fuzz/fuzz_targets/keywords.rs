#![no_main]

use eie_core::experiments::{OutputFormat, ScenarioTag, SweepParam};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(tag) = text.parse::<ScenarioTag>() {
            assert_eq!(tag.as_str(), text);
        }
        if let Ok(param) = text.parse::<SweepParam>() {
            assert_eq!(param.symbol().parse::<SweepParam>().unwrap(), param);
        }
        let _ = text.parse::<OutputFormat>();
    }
});
