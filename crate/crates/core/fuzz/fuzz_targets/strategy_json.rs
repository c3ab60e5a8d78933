#![no_main]

use libfuzzer_sys::fuzz_target;
use nonsig_core::attacks::AttackStrategy;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(q) = AttackStrategy::from_json(s) {
        let back = AttackStrategy::from_json(&q.to_json()).expect("emitted strategies parse");
        assert_eq!(back, q);
        let _ = q.check();
    }
});
