#![no_main]

use eie_core::experiments::parse_value_list;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(values) = parse_value_list(text) {
            assert!(!values.is_empty());
            let joined = values
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(",");
            assert_eq!(parse_value_list(&joined).unwrap(), values);
        }
    }
});
