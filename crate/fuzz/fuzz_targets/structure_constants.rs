#![no_main]

use libfuzzer_sys::fuzz_target;
use linhol::manifest::parse_structure_constants;

fuzz_target!(|data: &[u8]| {
    let Some((&d, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let dim = 1 + (d % 6) as usize;
    if let Ok(lie) = parse_structure_constants(dim, text) {
        assert_eq!(lie.dim(), dim);
        let pi = lie.bivector();
        let _ = pi.eval(&vec![1.0; dim]);
        let _ = lie.modular_character();
    }
});
