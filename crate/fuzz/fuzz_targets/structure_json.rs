#![no_main]

use libfuzzer_sys::fuzz_target;
use sphord::order::io::{from_json, to_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(order) = from_json(text) {
        let again = from_json(&to_json(&order)).unwrap();
        assert_eq!(again, order);
    }
});
