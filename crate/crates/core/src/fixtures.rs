//! Bundled reference squares.

use crate::sls::SemiLatinSquare;

pub const SQUARE_3X3_JSON: &str = include_str!("../../../fixtures/eq1_3x3_4.json");
pub const SQUARE_6X6_JSON: &str = include_str!("../../../fixtures/fig1_M_6x6_10.json");

/// The uniform `(3 x 3)/4` square with `mu = 2`.
pub fn square_3x3() -> SemiLatinSquare {
    serde_json::from_str(SQUARE_3X3_JSON).expect("bundled fixture is valid")
}

/// The uniform `(6 x 6)/10` square of least PV aberration.
pub fn square_6x6() -> SemiLatinSquare {
    serde_json::from_str(SQUARE_6X6_JSON).expect("bundled fixture is valid")
}
