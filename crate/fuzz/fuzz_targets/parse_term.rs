#![no_main]

use libfuzzer_sys::fuzz_target;
use lcu_core::parse::parse_term;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    if let Ok(t) = parse_term(src) {
        // printing must give back the same tree
        let again = parse_term(&t.to_string()).expect("printed term failed to parse");
        assert_eq!(again, t);
    }
});
