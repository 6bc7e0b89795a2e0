#![no_main]

use libfuzzer_sys::fuzz_target;
use sphord::logic::parse;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    for n in 2..=4 {
        if let Ok(f) = parse(text, n) {
            // printing is canonical: it parses back to the same tree
            let printed = f.to_string();
            assert_eq!(parse(&printed, n).unwrap(), f);
            let _ = f.standardize_apart();
        }
    }
});
