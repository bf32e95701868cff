//! Shipped Poisson structures.

use crate::error::{Error, Result};
use crate::geometry::BivectorField;
use crate::lie::LieAlgebraPresentation;
use crate::poly::Poly;

/// Constant symplectic structure `Pi^{12} = 1` on `R^2`.
pub fn symplectic_r2() -> BivectorField {
    BivectorField::from_upper(2, vec![(0, 1, Poly::constant(2, 1.0))]).unwrap()
}

/// Regular rank-2 structure `Pi^{12} = 1 + x3^2` on `R^3`; leaves are the planes
/// `x3 = const`.
pub fn regular_r3() -> BivectorField {
    let x3 = Poly::var(3, 2);
    let entry = &Poly::constant(3, 1.0) + &(&x3 * &x3);
    BivectorField::from_upper(3, vec![(0, 1, entry)]).unwrap()
}

/// `aff(1)`: `[e1, e2] = e2`.
pub fn aff1() -> LieAlgebraPresentation {
    LieAlgebraPresentation::new(2, &[(0, 1, 1, 1.0)]).unwrap()
}

/// `so(3)`: `[e_i, e_j] = eps_ijk e_k`.
pub fn so3() -> LieAlgebraPresentation {
    LieAlgebraPresentation::new(3, &[(0, 1, 2, 1.0), (1, 2, 0, 1.0), (0, 2, 1, -1.0)]).unwrap()
}

/// `sl(2)` in the basis `(H, E, F)`: `[H,E] = 2E`, `[H,F] = -2F`, `[E,F] = H`.
pub fn sl2() -> LieAlgebraPresentation {
    LieAlgebraPresentation::new(3, &[(0, 1, 1, 2.0), (0, 2, 2, -2.0), (1, 2, 0, 1.0)]).unwrap()
}

/// Heisenberg algebra `h3`: `[e1, e2] = e3`.
pub fn h3() -> LieAlgebraPresentation {
    LieAlgebraPresentation::new(3, &[(0, 1, 2, 1.0)]).unwrap()
}

pub fn abelian(dim: usize) -> LieAlgebraPresentation {
    LieAlgebraPresentation::new(dim, &[]).unwrap()
}

/// A named preset: its bivector and, for linear structures, the Lie algebra.
#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    pub bivector: BivectorField,
    pub lie: Option<LieAlgebraPresentation>,
}

pub const PRESET_NAMES: &[&str] = &[
    "symplectic-r2",
    "abelian-r2",
    "aff1",
    "so3",
    "sl2",
    "h3",
    "regular-r3",
];

pub fn by_name(name: &str) -> Result<Preset> {
    let lie_preset = |name: &'static str, l: LieAlgebraPresentation| Preset {
        name,
        bivector: l.bivector(),
        lie: Some(l),
    };
    Ok(match name {
        "symplectic-r2" => Preset {
            name: "symplectic-r2",
            bivector: symplectic_r2(),
            lie: None,
        },
        "regular-r3" => Preset {
            name: "regular-r3",
            bivector: regular_r3(),
            lie: None,
        },
        "abelian-r2" => lie_preset("abelian-r2", abelian(2)),
        "aff1" => lie_preset("aff1", aff1()),
        "so3" => lie_preset("so3", so3()),
        "sl2" => lie_preset("sl2", sl2()),
        "h3" => lie_preset("h3", h3()),
        other => {
            return Err(Error::Manifest(format!(
                "unknown preset '{other}' (known: {})",
                PRESET_NAMES.join(", ")
            )))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn every_preset_satisfies_jacobi() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for name in PRESET_NAMES {
            let p = by_name(name).unwrap();
            let n = p.bivector.dim();
            for _ in 0..100 {
                let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
                let d = p.bivector.jacobi_defect(&x).unwrap();
                assert!(d <= 1e-10, "{name}: defect {d} at {x:?}");
            }
        }
    }

    #[test]
    fn unknown_preset() {
        assert!(by_name("so4").is_err());
    }
}
