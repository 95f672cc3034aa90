#![no_main]

use bifree::io::{format_complex, parse_complex};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(z) = parse_complex(text) {
        let back = parse_complex(&format_complex(z)).expect("formatted literal parses");
        assert_eq!(back, z);
    }
});
