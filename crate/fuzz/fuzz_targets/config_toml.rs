#![no_main]

use libfuzzer_sys::fuzz_target;
use nlse_istm::io::parse_config_toml;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = parse_config_toml(text) {
        if let Some(p) = cfg.potential {
            let _ = p.to_spec();
        }
    }
});
