#![no_main]

use libfuzzer_sys::fuzz_target;
use nlse_istm::io::{parse_scattering_json, scattering_json_string};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok((sd, _)) = parse_scattering_json(text) {
        assert_eq!(sd.rho.len(), sd.a.len());
        assert_eq!(sd.eigenvalues.len(), sd.norming_constants.len());
        if let Ok(out) = scattering_json_string(&sd) {
            let (again, _) = parse_scattering_json(&out).expect("own output parses");
            assert_eq!(again.rho.len(), sd.rho.len());
        }
    }
});
