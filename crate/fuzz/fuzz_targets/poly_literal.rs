#![no_main]

use libfuzzer_sys::fuzz_target;
use linhol::manifest::parse_poly_literal;

// First byte picks the dimension, the rest is the JSON literal.
fuzz_target!(|data: &[u8]| {
    let Some((&d, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let dim = 1 + (d % 6) as usize;
    if let Ok(p) = parse_poly_literal(dim, text) {
        assert_eq!(p.dim(), dim);
        let x = vec![0.5; dim];
        let v = p.eval(&x);
        for i in 0..dim {
            let _ = p.derivative(i).eval(&x);
        }
        let q = linhol::Poly::from_literal(dim, &p.to_literal()).expect("round trip");
        let w = q.eval(&x);
        assert!(v == w || (v.is_nan() && w.is_nan()) || (v - w).abs() <= 1e-9 * v.abs().max(1.0));
    }
});
