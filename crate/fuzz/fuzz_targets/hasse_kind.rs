#![no_main]

use libfuzzer_sys::fuzz_target;
use sphord::spectra::{hasse, HasseKind};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(kind) = HasseKind::parse(text) {
        assert_eq!(HasseKind::parse(&kind.to_string()).unwrap(), kind);
        // limit(k) carries 2^k - 1; skip k with more than four digits
        let long_number = text.split(|c: char| !c.is_ascii_digit()).any(|run| run.len() > 4);
        if !long_number {
            let _ = hasse(&kind).map(|h| h.to_dot());
        }
    }
});
