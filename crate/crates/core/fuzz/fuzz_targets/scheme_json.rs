#![no_main]

use libfuzzer_sys::fuzz_target;
use nonsig_core::schemes::CommitmentScheme;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(scheme) = CommitmentScheme::from_json(s) {
        let back = CommitmentScheme::from_json(&scheme.to_json()).expect("emitted schemes parse");
        assert_eq!(back, scheme);
        let m = scheme.metrics();
        assert!(m.hiding >= nonsig_core::rational::zero());
    }
});
