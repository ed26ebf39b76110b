//! Exact rational arithmetic, 2×2 matrices over ℚ and p-adic valuations.
//!
//! Everything here is exact: no floating point value ever enters the data
//! path, so translation lengths and the descent objective are computed as
//! integers without rounding.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ArborError;

/// Largest prime accepted by [`Prime::new`].
pub const MAX_PRIME: u64 = 1 << 31;

/// A validated prime number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self, ArborError> {
        if !(2..=MAX_PRIME).contains(&p) || !is_prime(p) {
            return Err(ArborError::NotPrime(p));
        }
        Ok(Prime(p))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn to_bigint(self) -> BigInt {
        BigInt::from(self.0)
    }

    /// `p^k` as a rational, for any signed exponent.
    pub fn power(self, k: i64) -> Rational {
        let base = self.to_bigint().pow(k.unsigned_abs() as u32);
        if k >= 0 {
            Rational::from_bigint(base)
        } else {
            Rational::from_parts(BigInt::one(), base)
        }
    }
}

impl<'de> Deserialize<'de> for Prime {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let p = u64::deserialize(d)?;
        Prime::new(p).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 4 {
        return n >= 2;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// A p-adic valuation. `Infinity` is reserved for the valuation of zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valuation {
    Finite(i64),
    Infinity,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinity)
    }
}

impl Add for Valuation {
    type Output = Valuation;

    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinity,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinity => f.write_str("inf"),
        }
    }
}

/// Number of times `p` divides the nonzero integer `n`.
pub fn int_valuation(n: &BigInt, p: Prime) -> i64 {
    debug_assert!(!n.is_zero());
    if p.0 == 2 {
        return n.trailing_zeros().unwrap_or(0) as i64;
    }
    let pb = p.to_bigint();
    let mut count = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return count;
        }
        m = q;
        count += 1;
    }
}

/// Valuation of an integer, `Infinity` for zero.
pub fn vp_int(n: &BigInt, p: Prime) -> Valuation {
    if n.is_zero() {
        Valuation::Infinity
    } else {
        Valuation::Finite(int_valuation(n, p))
    }
}

/// An exact rational number, always stored in lowest terms with a positive
/// denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(BigRational);

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Rational(BigRational::from_integer(n))
    }

    /// Panics if `den` is zero.
    pub fn from_parts(num: BigInt, den: BigInt) -> Self {
        Rational(BigRational::new(num, den))
    }

    pub fn new(num: i64, den: i64) -> Self {
        Self::from_parts(BigInt::from(num), BigInt::from(den))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    /// The p-adic valuation `r` with `self = p^r · a/b`, `p ∤ a, b`.
    pub fn vp(&self, p: Prime) -> Valuation {
        if self.is_zero() {
            return Valuation::Infinity;
        }
        Valuation::Finite(int_valuation(self.numer(), p) - int_valuation(self.denom(), p))
    }

    /// Finite valuation of a value known to be nonzero.
    pub fn vp_nonzero(&self, p: Prime) -> i64 {
        self.vp(p).finite().expect("valuation of zero")
    }

    /// Canonical representative of `self` modulo `p^exp · ℤ_(p)`.
    ///
    /// The result is the unique finite sum `Σ c_i p^i` (`c_i ∈ [0, p)`,
    /// `i < exp`) congruent to `self`; it is zero when `v_p(self) ≥ exp`.
    pub fn reduce_mod_power(&self, p: Prime, exp: i64) -> Rational {
        let v = match self.vp(p) {
            Valuation::Infinity => return Rational::zero(),
            Valuation::Finite(v) if v >= exp => return Rational::zero(),
            Valuation::Finite(v) => v,
        };
        let shift = (-v).max(0);
        let scaled = self * &p.power(shift);
        let modulus = p.to_bigint().pow((exp + shift) as u32);
        // scaled = num/den with p ∤ den
        let inv = scaled
            .denom()
            .modinv(&modulus)
            .expect("denominator is a p-adic unit");
        let z = (scaled.numer() * inv).mod_floor(&modulus);
        Rational::from_bigint(z) * p.power(-shift)
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::zero()
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal {literal:?}: {reason}")]
pub struct ParseRationalError {
    pub literal: String,
    pub reason: &'static str,
}

fn parse_integer(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::from_str(s).ok()
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason| ParseRationalError {
            literal: s.chars().take(64).collect(),
            reason,
        };
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (s, None),
        };
        let num = parse_integer(num).ok_or_else(|| err("numerator is not an integer"))?;
        let den = match den {
            None => BigInt::one(),
            Some(d) => {
                if d.starts_with('-') {
                    return Err(err("denominator must be positive"));
                }
                parse_integer(d).ok_or_else(|| err("denominator is not an integer"))?
            }
        };
        if den.is_zero() {
            return Err(err("zero denominator"));
        }
        Ok(Rational::from_parts(num, den))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Int(i64),
        }
        match Repr::deserialize(d)? {
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Repr::Int(n) => Ok(Rational::from_integer(n)),
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl std::ops::Div<&Rational> for &Rational {
    type Output = Rational;
    fn div(self, rhs: &Rational) -> Rational {
        Rational(&self.0 / &rhs.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

/// A 2×2 matrix over ℚ, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat2 {
    pub a11: Rational,
    pub a12: Rational,
    pub a21: Rational,
    pub a22: Rational,
}

impl Mat2 {
    pub fn new(a11: Rational, a12: Rational, a21: Rational, a22: Rational) -> Self {
        Mat2 { a11, a12, a21, a22 }
    }

    /// Convenience constructor from `(numerator, denominator)` pairs.
    pub fn from_fracs(entries: [(i64, i64); 4]) -> Self {
        let [a, b, c, d] = entries.map(|(n, m)| Rational::new(n, m));
        Mat2::new(a, b, c, d)
    }

    pub fn from_ints(entries: [i64; 4]) -> Self {
        let [a, b, c, d] = entries.map(Rational::from_integer);
        Mat2::new(a, b, c, d)
    }

    pub fn identity() -> Self {
        Mat2::from_ints([1, 0, 0, 1])
    }

    pub fn diag(a: Rational, d: Rational) -> Self {
        Mat2::new(a, Rational::zero(), Rational::zero(), d)
    }

    pub fn entries(&self) -> [&Rational; 4] {
        [&self.a11, &self.a12, &self.a21, &self.a22]
    }

    pub fn is_identity(&self) -> bool {
        self.a11.is_one() && self.a12.is_zero() && self.a21.is_zero() && self.a22.is_one()
    }

    pub fn trace(&self) -> Rational {
        &self.a11 + &self.a22
    }

    pub fn det(&self) -> Rational {
        &self.a11 * &self.a22 - &self.a12 * &self.a21
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        Mat2 {
            a11: &self.a11 * &rhs.a11 + &self.a12 * &rhs.a21,
            a12: &self.a11 * &rhs.a12 + &self.a12 * &rhs.a22,
            a21: &self.a21 * &rhs.a11 + &self.a22 * &rhs.a21,
            a22: &self.a21 * &rhs.a12 + &self.a22 * &rhs.a22,
        }
    }

    pub fn adjugate(&self) -> Mat2 {
        Mat2 {
            a11: self.a22.clone(),
            a12: -&self.a12,
            a21: -&self.a21,
            a22: self.a11.clone(),
        }
    }

    /// Inverse of a determinant-1 matrix (its adjugate).
    pub fn inv(&self) -> Result<Mat2, ArborError> {
        let det = self.det();
        if !det.is_one() {
            return Err(ArborError::DeterminantNotOne(det.to_string()));
        }
        Ok(self.adjugate())
    }

    /// Inverse of any invertible matrix.
    pub fn inverse_general(&self) -> Option<Mat2> {
        let det = self.det();
        if det.is_zero() {
            return None;
        }
        let r = det.recip();
        let adj = self.adjugate();
        Some(adj.scale(&r))
    }

    pub fn scale(&self, s: &Rational) -> Mat2 {
        Mat2 {
            a11: &self.a11 * s,
            a12: &self.a12 * s,
            a21: &self.a21 * s,
            a22: &self.a22 * s,
        }
    }

    pub fn pow(&self, k: u32) -> Mat2 {
        let mut acc = Mat2::identity();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Trace of `self · rhs` without forming the product.
    pub fn trace_of_product(&self, rhs: &Mat2) -> Rational {
        &self.a11 * &rhs.a11 + &self.a12 * &rhs.a21 + &self.a21 * &rhs.a12 + &self.a22 * &rhs.a22
    }

    pub fn rows(&self) -> [[Rational; 2]; 2] {
        [
            [self.a11.clone(), self.a12.clone()],
            [self.a21.clone(), self.a22.clone()],
        ]
    }

    pub fn from_rows(rows: [[Rational; 2]; 2]) -> Mat2 {
        let [[a11, a12], [a21, a22]] = rows;
        Mat2 { a11, a12, a21, a22 }
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a11, self.a12, self.a21, self.a22)
    }
}

impl Serialize for Mat2 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mat2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        <[[Rational; 2]; 2]>::deserialize(d).map(Mat2::from_rows)
    }
}

/// A matrix as integer numerators over one positive denominator, multiplied
/// without any reduction. Long products are far cheaper this way; reduce
/// once at the end with [`FractionMat2::to_mat2`].
#[derive(Clone, Debug)]
pub struct FractionMat2 {
    num: [BigInt; 4],
    den: BigInt,
}

impl FractionMat2 {
    pub fn new(m: &Mat2) -> Self {
        let den = m
            .entries()
            .iter()
            .fold(BigInt::one(), |acc, e| acc.lcm(e.denom()));
        let num = m.entries().map(|e| e.numer() * (&den / e.denom()));
        FractionMat2 { num, den }
    }

    pub fn identity() -> Self {
        FractionMat2 {
            num: [BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one()],
            den: BigInt::one(),
        }
    }

    pub fn mul(&self, rhs: &FractionMat2) -> FractionMat2 {
        let [a, b, c, d] = &self.num;
        let [e, f, g, h] = &rhs.num;
        FractionMat2 {
            num: [a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h],
            den: &self.den * &rhs.den,
        }
    }

    pub fn adjugate(&self) -> FractionMat2 {
        let [a, b, c, d] = &self.num;
        FractionMat2 {
            num: [d.clone(), -b, -c, a.clone()],
            den: self.den.clone(),
        }
    }

    pub fn to_mat2(&self) -> Mat2 {
        let [a, b, c, d] = self
            .num
            .clone()
            .map(|n| Rational::from_parts(n, self.den.clone()));
        Mat2::new(a, b, c, d)
    }
}

/// A matrix written as an integer matrix over a common positive denominator.
///
/// The descent only needs valuations of traces of products, and those can be
/// read off integer arithmetic without any gcd reduction. Only the `p`-part
/// of the denominator is kept; the rest is a `p`-adic unit.
#[derive(Clone, Debug)]
pub struct ScaledMat2 {
    num: [BigInt; 4],
    den_valuation: i64,
}

impl ScaledMat2 {
    pub fn new(m: &Mat2, p: Prime) -> Self {
        let den = m
            .entries()
            .iter()
            .fold(BigInt::one(), |acc, e| acc.lcm(e.denom()));
        let num = m.entries().map(|e| e.numer() * (&den / e.denom()));
        ScaledMat2 {
            num,
            den_valuation: int_valuation(&den, p),
        }
    }

    pub fn mul(&self, rhs: &ScaledMat2) -> ScaledMat2 {
        let [a, b, c, d] = &self.num;
        let [e, f, g, h] = &rhs.num;
        ScaledMat2 {
            num: [a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h],
            den_valuation: self.den_valuation + rhs.den_valuation,
        }
    }

    pub fn adjugate(&self) -> ScaledMat2 {
        let [a, b, c, d] = &self.num;
        ScaledMat2 {
            num: [d.clone(), -b, -c, a.clone()],
            den_valuation: self.den_valuation,
        }
    }

    /// `v_p(tr(self · rhs))`.
    pub fn trace_product_valuation(&self, rhs: &ScaledMat2, p: Prime) -> Valuation {
        let [a, b, c, d] = &self.num;
        let [e, f, g, h] = &rhs.num;
        let t = a * e + b * g + c * f + d * h;
        self.offset(vp_int(&t, p), rhs)
    }

    /// `v_p(tr(self · rhs⁻¹))` for determinant-1 `rhs`.
    pub fn trace_product_inverse_valuation(&self, rhs: &ScaledMat2, p: Prime) -> Valuation {
        let [a, b, c, d] = &self.num;
        let [e, f, g, h] = &rhs.num;
        let t = a * h - b * g - c * f + d * e;
        self.offset(vp_int(&t, p), rhs)
    }

    fn offset(&self, v: Valuation, rhs: &ScaledMat2) -> Valuation {
        match v {
            Valuation::Finite(v) => Valuation::Finite(v - self.den_valuation - rhs.den_valuation),
            Valuation::Infinity => Valuation::Infinity,
        }
    }
}

/// Compares valuations with `Infinity` above every finite value.
pub fn min_valuation(a: Valuation, b: Valuation) -> Valuation {
    match a.cmp(&b) {
        Ordering::Greater => b,
        _ => a,
    }
}
