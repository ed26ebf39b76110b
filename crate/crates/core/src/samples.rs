//! Fixed inputs used by regression tests, documentation and the CLI smoke tests.

use crate::exact::{Mat2, Prime, Rational};

fn m(e: [&str; 4]) -> Mat2 {
    let [a, b, c, d] = e.map(|s| s.parse::<Rational>().expect("literal"));
    Mat2::new(a, b, c, d)
}

pub const TRIPLE_PRIME: u64 = 5;
pub const QUINTUPLE_PRIME: u64 = 7;

/// Three translation-length-2 elements over ℚ₅ whose axes fail ping-pong on
/// the third axis, yet no single product replacement shortens any of them.
pub fn example_triple() -> Vec<Mat2> {
    vec![
        m(["1/5", "-1/5", "-1/5", "26/5"]),
        m(["-1", "1", "-1/5", "-4/5"]),
        m(["5", "0", "0", "1/5"]),
    ]
}

/// Five elements over ℚ₇ with `L = 146` that need a two-sided move
/// (`j = 5, S₁ = {1, 3}, S₂ = {3}`) to decrease `L`.
pub fn example_quintuple() -> Vec<Mat2> {
    vec![
        m(["129/49", "-178/49", "6/49", "31/147"]),
        m(["-688/49", "-1/7", "1031/49", "1/7"]),
        m(["-1/49", "-3/49", "2", "-43"]),
        m(["9/7", "-25/21", "-60/49", "281/147"]),
        m(["7", "7", "-3/7", "-2/7"]),
    ]
}

/// Two hyperbolic elements over ℚ₃ with disjoint axes far apart.
pub fn example_free_pair() -> (Vec<Mat2>, Prime) {
    let p = Prime::new(3).expect("prime");
    // diag(3, 1/3) and its conjugate by [[1, 1/9], [9, 2]], whose axis sits
    // away from the diagonal apartment
    let g = m(["3", "0", "0", "1/3"]);
    let h = m(["1", "1/9", "9", "2"]);
    let conj = h.mul(&g).mul(&h.adjugate());
    (vec![g, conj], p)
}
