#![no_main]

use hgs_core::mm;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(x) = mm::parse_vector(text) {
        let back = mm::parse_vector(&mm::write_vector(&x)).expect("written vector parses");
        assert_eq!(back, x);
    }
});
