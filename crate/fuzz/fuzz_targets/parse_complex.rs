#![no_main]

use focklab::symbol::parse_complex;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(c) = parse_complex(text) {
            assert!(c.re.is_finite() && c.im.is_finite());
        }
    }
});
