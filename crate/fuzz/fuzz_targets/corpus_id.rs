#![no_main]

use hgs_core::corpus::{self, CorpusId};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(id) = text.parse::<CorpusId>() else { return };
    assert_eq!(id.to_string().parse::<CorpusId>().unwrap(), id);
    // Dense storage: keep the family small.
    if !matches!(id, CorpusId::Family61(n) if n > 256) {
        let _ = corpus::get(&id);
    }
});
