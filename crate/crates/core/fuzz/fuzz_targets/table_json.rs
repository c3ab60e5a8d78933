#![no_main]

use libfuzzer_sys::fuzz_target;
use nonsig_core::CondTable;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(t) = CondTable::from_json(s) {
        let back = CondTable::from_json(&t.to_json()).expect("emitted tables parse");
        assert_eq!(back, t);
    }
});
