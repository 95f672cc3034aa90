#![no_main]

use bifree::io::{line_measure_json, measure_json, parse_measure, ParsedMeasure};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(parsed) = parse_measure(text) else {
        return;
    };
    // anything accepted must survive a serialize/parse round trip unchanged
    let json = match &parsed {
        ParsedMeasure::Planar(m) => measure_json(m),
        ParsedMeasure::Signed(m) => measure_json(m),
        ParsedMeasure::Line(m) => line_measure_json(m),
    };
    let again = parse_measure(&json.to_string()).expect("serialized measure parses");
    assert_eq!(parsed, again);
});
