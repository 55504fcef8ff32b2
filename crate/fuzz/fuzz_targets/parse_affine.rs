#![no_main]

use focklab::symbol::parse_affine;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(phi) = parse_affine(text) {
            assert!(phi.a().norm() <= 1.0 + focklab::symbol::UNIT_TOL);
            assert!(phi.b().re.is_finite() && phi.b().im.is_finite());
        }
    }
});
