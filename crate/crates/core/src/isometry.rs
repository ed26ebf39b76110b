//! Determinant-1 rational matrices acting on the Bruhat–Tits tree, and
//! elements that remember how they were built from the input generators.

use serde::{Deserialize, Serialize};

use crate::error::{ArborError, Result};
use crate::exact::{FractionMat2, Mat2, Prime, Rational, Valuation};

/// `-2 · min{0, v_p(t)}` for the trace `t` of an SL₂ element.
pub fn length_from_trace_valuation(v: Valuation) -> u64 {
    match v {
        Valuation::Finite(v) if v < 0 => (-2 * v) as u64,
        _ => 0,
    }
}

pub fn length_from_trace(trace: &Rational, p: Prime) -> u64 {
    length_from_trace_valuation(trace.vp(p))
}

/// An element of SL₂(ℚ) viewed as an isometry of the tree for `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isometry {
    matrix: Mat2,
    p: Prime,
    length: u64,
}

impl Isometry {
    pub fn new(matrix: Mat2, p: Prime) -> Result<Self> {
        let det = matrix.det();
        if !det.is_one() {
            return Err(ArborError::DeterminantNotOne(det.to_string()));
        }
        Ok(Self::new_unchecked(matrix, p))
    }

    /// Caller guarantees determinant 1.
    pub(crate) fn new_unchecked(matrix: Mat2, p: Prime) -> Self {
        debug_assert!(matrix.det().is_one());
        let length = length_from_trace(&matrix.trace(), p);
        Isometry { matrix, p, length }
    }

    pub fn identity(p: Prime) -> Self {
        Self::new_unchecked(Mat2::identity(), p)
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.matrix
    }

    pub fn into_matrix(self) -> Mat2 {
        self.matrix
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn translation_length(&self) -> u64 {
        self.length
    }

    pub fn is_elliptic(&self) -> bool {
        self.length == 0
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.length > 0
    }

    pub fn mul(&self, rhs: &Isometry) -> Result<Isometry> {
        self.same_prime(rhs)?;
        Ok(Self::new_unchecked(self.matrix.mul(&rhs.matrix), self.p))
    }

    pub fn inverse(&self) -> Isometry {
        Isometry {
            matrix: self.matrix.adjugate(),
            p: self.p,
            length: self.length,
        }
    }

    /// `l(self · rhs)` computed from the trace alone.
    pub fn product_length(&self, rhs: &Isometry) -> u64 {
        length_from_trace(&self.matrix.trace_of_product(&rhs.matrix), self.p)
    }

    /// `l(self · rhs⁻¹)` computed from the trace alone.
    pub fn product_inverse_length(&self, rhs: &Isometry) -> u64 {
        length_from_trace(&self.matrix.trace_of_product(&rhs.matrix.adjugate()), self.p)
    }

    pub(crate) fn same_prime(&self, rhs: &Isometry) -> Result<()> {
        if self.p != rhs.p {
            return Err(ArborError::MixedPrimes(self.p.get(), rhs.p.get()));
        }
        Ok(())
    }
}

/// JSON form `{"p": 5, "matrix": [["1/5","-1/5"],["-1/5","26/5"]]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsometryJson {
    pub p: Prime,
    pub matrix: Mat2,
}

impl From<&Isometry> for IsometryJson {
    fn from(g: &Isometry) -> Self {
        IsometryJson {
            p: g.p,
            matrix: g.matrix.clone(),
        }
    }
}

impl TryFrom<IsometryJson> for Isometry {
    type Error = ArborError;

    fn try_from(j: IsometryJson) -> Result<Self> {
        Isometry::new(j.matrix, j.p)
    }
}

/// A freely reduced word in the input generators: `+i` is `h_i`, `-i` its
/// inverse (1-based).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(Vec<i64>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// The one-letter word for the 0-based generator `index`.
    pub fn generator(index: usize) -> Self {
        Word(vec![index as i64 + 1])
    }

    /// Freely reduces `letters`. Zero letters are rejected.
    pub fn from_letters(letters: Vec<i64>) -> Result<Self> {
        if let Some(&bad) = letters.iter().find(|&&l| l == 0) {
            return Err(ArborError::BadLetter(bad));
        }
        let mut w = Word::empty();
        w.extend(&letters);
        Ok(w)
    }

    pub fn letters(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn extend(&mut self, letters: &[i64]) {
        for &x in letters {
            if self.0.last() == Some(&-x) {
                self.0.pop();
            } else {
                self.0.push(x);
            }
        }
    }

    pub fn concat(&self, rhs: &Word) -> Word {
        let mut w = self.clone();
        w.extend(&rhs.0);
        w
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|x| -x).collect())
    }

    /// Evaluates the word over determinant-1 generators.
    pub fn evaluate(&self, generators: &[Mat2]) -> Result<Mat2> {
        let mut forms: Vec<Option<(FractionMat2, FractionMat2)>> = vec![None; generators.len()];
        let mut acc = FractionMat2::identity();
        for &letter in &self.0 {
            let idx = letter.unsigned_abs() as usize;
            let g = generators
                .get(idx.wrapping_sub(1))
                .filter(|_| idx >= 1)
                .ok_or(ArborError::BadLetter(letter))?;
            let (pos, neg) = forms[idx - 1].get_or_insert_with(|| {
                let f = FractionMat2::new(g);
                let inv = f.adjugate();
                (f, inv)
            });
            acc = acc.mul(if letter > 0 { pos } else { neg });
        }
        Ok(acc.to_mat2())
    }
}

/// An isometry together with a word in the input generators that evaluates to it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrackedElement {
    pub isometry: Isometry,
    pub word: Word,
}

impl TrackedElement {
    pub fn generator(isometry: Isometry, index: usize) -> Self {
        TrackedElement {
            isometry,
            word: Word::generator(index),
        }
    }

    pub fn mul(&self, rhs: &TrackedElement) -> Result<TrackedElement> {
        Ok(TrackedElement {
            isometry: self.isometry.mul(&rhs.isometry)?,
            word: self.word.concat(&rhs.word),
        })
    }

    pub fn inverse(&self) -> TrackedElement {
        TrackedElement {
            isometry: self.isometry.inverse(),
            word: self.word.inverse(),
        }
    }

    pub fn translation_length(&self) -> u64 {
        self.isometry.translation_length()
    }
}
