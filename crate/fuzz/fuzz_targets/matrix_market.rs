#![no_main]

use hgs_core::mm;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(a) = mm::parse_matrix(text) {
        let back = mm::parse_matrix(&mm::write_matrix(&a)).expect("written matrix parses");
        assert_eq!(back, a);
    }
});
