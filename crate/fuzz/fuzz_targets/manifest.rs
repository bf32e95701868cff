#![no_main]

use libfuzzer_sys::fuzz_target;
use linhol::manifest::Manifest;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(m) = Manifest::from_json(text) else { return };
    // Keep builds cheap: huge sample counts are valid input but slow.
    if m.config.samples > 4097 || m.dim > 6 {
        return;
    }
    let _ = m.build();
    let again = Manifest::from_json(&m.to_json()).expect("serialized manifest parses");
    assert_eq!(again.to_json(), m.to_json());
});
