#![no_main]

use libfuzzer_sys::fuzz_target;
use lcu_core::types::AtomTable;

fuzz_target!(|data: &[u8]| {
    if let Ok(src) = std::str::from_utf8(data) {
        let _ = AtomTable::parse(src);
    }
});
