#![no_main]

use libfuzzer_sys::fuzz_target;
use nlse_istm::io::{parse_solution_csv, solution_csv_string};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(s) = parse_solution_csv(text) {
        assert_eq!(s.x.len(), s.q.len());
        let again = parse_solution_csv(&solution_csv_string(&s.x, &s.q)).expect("own output parses");
        assert_eq!(again.x.len(), s.x.len());
    }
});
