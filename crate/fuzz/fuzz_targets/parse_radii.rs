#![no_main]

use focklab::symbol::parse_radii;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(radii) = parse_radii(text) {
            assert!(!radii.is_empty());
            assert!(radii.iter().all(|r| r.is_finite() && *r > 0.0));
        }
    }
});
