#![no_main]

use libfuzzer_sys::fuzz_target;
use lcu_core::deriv_syntax::{parse_derivation, print_derivation};
use lcu_core::types::AtomTable;
use lcu_core::typing::check_derivation;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    if let Ok(d) = parse_derivation(src) {
        let again = parse_derivation(&print_derivation(&d)).expect("printed derivation failed to parse");
        assert_eq!(again, d);
        let _ = check_derivation(&d, &AtomTable::empty());
    }
});
