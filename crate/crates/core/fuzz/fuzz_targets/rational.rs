#![no_main]

use libfuzzer_sys::fuzz_target;
use nonsig_core::rational::{format, parse};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(r) = parse(s) {
        assert_eq!(parse(&format(&r)).expect("formatted rationals parse"), r);
    }
});
