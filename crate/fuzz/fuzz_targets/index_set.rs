#![no_main]

use hgs_core::graph::IndexSet;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&n, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let n = n as usize;
    if let Ok(set) = IndexSet::parse_one_based(text, n) {
        let one_based = set.one_based();
        assert!(one_based.windows(2).all(|w| w[0] < w[1]));
        assert!(one_based.iter().all(|&i| 1 <= i && i <= n));
        let listed: Vec<String> = one_based.iter().map(usize::to_string).collect();
        assert_eq!(IndexSet::parse_one_based(&listed.join(","), n).unwrap(), set);
    }
});
