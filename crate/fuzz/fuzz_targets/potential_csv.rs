#![no_main]

use libfuzzer_sys::fuzz_target;
use nlse_istm::io::{parse_potential_csv, potential_csv_string};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(s) = parse_potential_csv(text) {
        assert_eq!(s.x.len(), s.q.len());
        assert!(s.x.windows(2).all(|w| w[0] < w[1]));
        let again = parse_potential_csv(&potential_csv_string(&s.x, &s.q)).expect("own output parses");
        assert_eq!(again.x.len(), s.x.len());
    }
});
