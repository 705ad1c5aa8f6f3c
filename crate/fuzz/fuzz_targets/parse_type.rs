#![no_main]

use libfuzzer_sys::fuzz_target;
use lcu_core::type_parse::parse_type;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    if let Ok(t) = parse_type(src) {
        let again = parse_type(&t.to_string()).expect("printed type failed to parse");
        assert_eq!(again, t);
    }
});
