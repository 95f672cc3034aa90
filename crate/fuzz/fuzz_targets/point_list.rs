#![no_main]

use bifree::io::parse_points;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(points) = parse_points(text) {
            assert!(!points.is_empty());
        }
    }
});
