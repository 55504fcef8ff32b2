#![no_main]

use focklab::symbol::parse_symbol;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(f) = parse_symbol(text) {
        let rendered = f.render();
        let g = parse_symbol(&rendered).unwrap_or_else(|e| panic!("{text:?} rendered as {rendered:?}: {e}"));
        assert!(f.approx_eq(&g, 0.0), "round trip changed {text:?}: {rendered:?}");
    }
});
