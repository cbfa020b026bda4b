//! Inputs shared by the benchmarks.

use p1f_core::families::{bdcls_from_str, l_p_square};
use p1f_core::LatinSquare;

/// Row-Hamiltonian squares of orders 9 to 13.
pub fn fixtures() -> Vec<(String, LatinSquare)> {
    vec![
        ("cyclic11".into(), LatinSquare::cyclic(11)),
        ("l_p5".into(), l_p_square(5).unwrap()),
        ("dcls11".into(), bdcls_from_str("0,2,8,5,7,1,10,4,6,3,9").unwrap()),
        ("cyclic13".into(), LatinSquare::cyclic(13)),
    ]
}
