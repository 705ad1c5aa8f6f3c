#![no_main]

use libfuzzer_sys::fuzz_target;
use lcu_core::moggi::{from_moggi, parse_moggi, to_moggi_c};

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    if let Ok(e) = parse_moggi(src) {
        let again = parse_moggi(&e.to_string()).expect("printed term failed to parse");
        assert_eq!(again, e);
        let _ = to_moggi_c(&from_moggi(&e));
    }
});
