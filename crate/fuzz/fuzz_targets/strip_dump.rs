#![no_main]

use eie_core::piecewise::PiecewiseSeparableConductivity;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(pw) = PiecewiseSeparableConductivity::from_json(text) else {
        return;
    };
    // Anything that loads must evaluate without panicking and round-trip.
    for (x, y) in [(0.0, 0.0), (0.5, -0.3), (-0.99, 0.1), (1.0, 0.0)] {
        let _ = pw.evaluate(x, y);
    }
    let again = PiecewiseSeparableConductivity::from_json(&pw.to_json()).unwrap();
    assert_eq!(again, pw);
});
