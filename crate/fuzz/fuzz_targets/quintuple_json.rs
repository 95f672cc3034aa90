#![no_main]

use bifree::bifree_conv::{lk_r_general, lk_validate};
use bifree::io::{parse_lk, ParsedLk};
use bifree::Complex64;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(parsed) = parse_lk(text) else {
        return;
    };
    let report = match &parsed {
        ParsedLk::General(q) => lk_validate(q),
        ParsedLk::Compact(c) => lk_validate(c),
    };
    let _ = report.is_valid();
    let q = parsed.into_general();
    let _ = lk_r_general(&q, Complex64::new(0.01, -0.05), Complex64::new(-0.02, 0.05));
});
