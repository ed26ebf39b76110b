//! The product-replacement descent.
//!
//! A tuple `X = (g₁, …, gₙ)` is scored by
//!
//! ```text
//! L(X) = Σ l(gᵢ) + Σ_{i<k} [ l(gᵢgₖ) + l(gᵢgₖ⁻¹) ]
//! ```
//!
//! and a move picks a pivot `j` and two subsets `S₁, S₂` of the other
//! indices, replacing `gᵢ` by `gⱼgᵢ` (i ∈ S₁), `gᵢgⱼ⁻¹` (i ∈ S₂) or
//! `gⱼgᵢgⱼ⁻¹` (both). [`decide`] repeatedly applies the first strictly
//! improving move until either some element is elliptic or no move improves
//! `L`, at which point the tuple is minimal.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{ArborError, Result};
use crate::exact::{Mat2, Prime, ScaledMat2};
use crate::isometry::{length_from_trace_valuation, Isometry, TrackedElement};

/// Largest tuple size accepted. Candidate sets are `n · 4ⁿ⁻¹`, so this is
/// far beyond anything that finishes, but keeps subset masks in a `u32`.
pub const MAX_TUPLE: usize = 16;

/// An n-tuple of isometries, each remembering its word in the original generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrackedTuple {
    elements: Vec<TrackedElement>,
    p: Prime,
    generators: Vec<Mat2>,
}

impl TrackedTuple {
    /// Starts a descent at `gᵢ = hᵢ`.
    pub fn from_generators(generators: Vec<Mat2>, p: Prime) -> Result<Self> {
        check_size(generators.len())?;
        let elements = generators
            .iter()
            .enumerate()
            .map(|(i, m)| Ok(TrackedElement::generator(Isometry::new(m.clone(), p)?, i)))
            .collect::<Result<Vec<_>>>()?;
        Ok(TrackedTuple {
            elements,
            p,
            generators,
        })
    }

    pub fn from_isometries(isometries: Vec<Isometry>) -> Result<Self> {
        check_size(isometries.len())?;
        let p = isometries[0].prime();
        for g in &isometries {
            isometries[0].same_prime(g)?;
        }
        let generators = isometries.iter().map(|g| g.matrix().clone()).collect();
        let elements = isometries
            .into_iter()
            .enumerate()
            .map(|(i, g)| TrackedElement::generator(g, i))
            .collect();
        Ok(TrackedTuple {
            elements,
            p,
            generators,
        })
    }

    /// Assembles a tuple from already tracked elements without re-checking words.
    pub fn from_parts(elements: Vec<TrackedElement>, generators: Vec<Mat2>, p: Prime) -> Result<Self> {
        check_size(elements.len())?;
        for e in &elements {
            if e.isometry.prime() != p {
                return Err(ArborError::MixedPrimes(p.get(), e.isometry.prime().get()));
            }
        }
        Ok(TrackedTuple {
            elements,
            p,
            generators,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[TrackedElement] {
        &self.elements
    }

    pub fn isometries(&self) -> impl Iterator<Item = &Isometry> {
        self.elements.iter().map(|e| &e.isometry)
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn generators(&self) -> &[Mat2] {
        &self.generators
    }

    pub fn lengths(&self) -> Vec<u64> {
        self.isometries().map(Isometry::translation_length).collect()
    }

    /// Index of the first elliptic element, if any.
    pub fn first_elliptic(&self) -> Option<usize> {
        self.isometries().position(Isometry::is_elliptic)
    }

    /// Whether every word still evaluates to its element's matrix.
    pub fn words_consistent(&self) -> bool {
        self.elements.iter().all(|e| {
            e.word
                .evaluate(&self.generators)
                .is_ok_and(|m| &m == e.isometry.matrix())
        })
    }
}

fn check_size(n: usize) -> Result<()> {
    match n {
        0 => Err(ArborError::EmptyTuple),
        n if n > MAX_TUPLE => Err(ArborError::TupleTooLarge(n)),
        _ => Ok(()),
    }
}

/// `L(X)`, computed directly from the definition.
pub fn big_l(x: &TrackedTuple) -> u64 {
    let g: Vec<&Isometry> = x.isometries().collect();
    let mut total: u64 = g.iter().map(|e| e.translation_length()).sum();
    for i in 0..g.len() {
        for k in i + 1..g.len() {
            total += g[i].product_length(g[k]) + g[i].product_inverse_length(g[k]);
        }
    }
    total
}

/// The multiset of the `n(n−1)` pair-product lengths `l(gᵢgₖ)`, `l(gᵢgₖ⁻¹)`.
pub fn pair_product_lengths(x: &TrackedTuple) -> Vec<u64> {
    let g: Vec<&Isometry> = x.isometries().collect();
    let mut out = Vec::new();
    for i in 0..g.len() {
        for k in i + 1..g.len() {
            out.push(g[i].product_length(g[k]));
            out.push(g[i].product_inverse_length(g[k]));
        }
    }
    out
}

/// A move `X ↦ X^j_{S₁,S₂}`. Indices are 0-based; subsets are bitmasks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ReplacementSpec {
    pub pivot: usize,
    pub left: u32,
    pub right: u32,
}

impl ReplacementSpec {
    pub fn new(pivot: usize, left: &[usize], right: &[usize]) -> Result<Self> {
        let mask = |set: &[usize]| -> Result<u32> {
            set.iter().try_fold(0u32, |m, &i| {
                if i >= MAX_TUPLE {
                    Err(ArborError::InvalidReplacement(format!("index {} out of range", i + 1)))
                } else {
                    Ok(m | 1 << i)
                }
            })
        };
        let spec = ReplacementSpec {
            pivot,
            left: mask(left)?,
            right: mask(right)?,
        };
        if pivot >= MAX_TUPLE || (spec.left | spec.right) & (1 << pivot) != 0 {
            return Err(ArborError::InvalidReplacement(format!(
                "pivot {} may not appear in S1 or S2",
                pivot + 1
            )));
        }
        Ok(spec)
    }

    pub fn identity(pivot: usize) -> Self {
        ReplacementSpec {
            pivot,
            left: 0,
            right: 0,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.pivot >= n {
            return Err(ArborError::InvalidReplacement(format!(
                "pivot {} outside 1..={n}",
                self.pivot + 1
            )));
        }
        let all = (self.left | self.right) as u64;
        if all >> n != 0 {
            return Err(ArborError::InvalidReplacement(format!("subset index outside 1..={n}")));
        }
        if all & (1 << self.pivot) != 0 {
            return Err(ArborError::InvalidReplacement(format!(
                "pivot {} may not appear in S1 or S2",
                self.pivot + 1
            )));
        }
        Ok(())
    }

    pub fn left_indices(&self) -> Vec<usize> {
        mask_indices(self.left)
    }

    pub fn right_indices(&self) -> Vec<usize> {
        mask_indices(self.right)
    }

    /// Indices whose element changes (up to conjugation) under this move.
    pub fn touched(&self) -> u32 {
        self.left | self.right
    }
}

fn mask_indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).collect()
}

#[derive(Serialize, Deserialize)]
struct SpecJson {
    j: usize,
    #[serde(rename = "S1")]
    s1: Vec<usize>,
    #[serde(rename = "S2")]
    s2: Vec<usize>,
}

impl SpecJson {
    fn from_spec(s: &ReplacementSpec) -> Self {
        let one_based = |v: Vec<usize>| v.into_iter().map(|i| i + 1).collect();
        SpecJson {
            j: s.pivot + 1,
            s1: one_based(s.left_indices()),
            s2: one_based(s.right_indices()),
        }
    }

    fn into_spec(self) -> Result<ReplacementSpec> {
        let zero_based = |v: Vec<usize>| -> Result<Vec<usize>> {
            v.into_iter()
                .map(|i| {
                    i.checked_sub(1)
                        .ok_or_else(|| ArborError::InvalidReplacement("indices are 1-based".into()))
                })
                .collect()
        };
        let j = self
            .j
            .checked_sub(1)
            .ok_or_else(|| ArborError::InvalidReplacement("indices are 1-based".into()))?;
        ReplacementSpec::new(j, &zero_based(self.s1)?, &zero_based(self.s2)?)
    }
}

impl Serialize for ReplacementSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SpecJson::from_spec(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ReplacementSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        SpecJson::deserialize(d)?
            .into_spec()
            .map_err(serde::de::Error::custom)
    }
}

pub fn apply_replacement(x: &TrackedTuple, spec: &ReplacementSpec) -> Result<TrackedTuple> {
    spec.validate(x.len())?;
    let gj = &x.elements[spec.pivot];
    let gj_inv = gj.inverse();
    let elements = x
        .elements
        .iter()
        .enumerate()
        .map(|(i, gi)| {
            let bit = 1 << i;
            let mut e = gi.clone();
            if spec.left & bit != 0 {
                e = gj.mul(&e)?;
            }
            if spec.right & bit != 0 {
                e = e.mul(&gj_inv)?;
            }
            Ok(e)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TrackedTuple {
        elements,
        p: x.p,
        generators: x.generators.clone(),
    })
}

/// Cached lengths for every move with a fixed pivot.
///
/// Each non-pivot element takes one of four forms under a move (`gᵢ`, `gⱼgᵢ`,
/// `gᵢgⱼ⁻¹`, `gⱼgᵢgⱼ⁻¹`), so every term of `L` depends on at most two of
/// these choices and can be tabulated once per pivot.
struct PivotTable {
    pivot: usize,
    others: Vec<usize>,
    pivot_length: u64,
    /// `single[t][o]`: length of the t-th non-pivot element in form `o`.
    single: Vec<[u64; 4]>,
    /// Pair terms with the pivot.
    with_pivot: Vec<[u64; 4]>,
    /// `pairs[t][u][o_t * 4 + o_u]` for `t < u`, flattened.
    pairs: Vec<Vec<[u64; 16]>>,
}

const FORM_LEFT: usize = 1;
const FORM_RIGHT: usize = 2;

impl PivotTable {
    fn build(x: &TrackedTuple, scaled: &[ScaledMat2], pivot: usize) -> Self {
        let p = x.p;
        let len = |v| length_from_trace_valuation(v);
        let sj = &scaled[pivot];
        let sj_inv = sj.adjugate();
        let others: Vec<usize> = (0..x.len()).filter(|&i| i != pivot).collect();

        let forms: Vec<[ScaledMat2; 4]> = others
            .iter()
            .map(|&i| {
                let si = &scaled[i];
                let left = sj.mul(si);
                let right = si.mul(&sj_inv);
                let conj = left.mul(&sj_inv);
                [si.clone(), left, right, conj]
            })
            .collect();

        let single = others
            .iter()
            .zip(&forms)
            .map(|(&i, f)| {
                let li = x.elements[i].isometry.translation_length();
                [
                    li,
                    len(sj.trace_product_valuation(&f[0], p)),
                    len(f[0].trace_product_inverse_valuation(sj, p)),
                    li,
                ]
            })
            .collect();

        let pair_term = |a: &ScaledMat2, b: &ScaledMat2| {
            len(a.trace_product_valuation(b, p)) + len(a.trace_product_inverse_valuation(b, p))
        };
        let with_pivot = forms
            .iter()
            .map(|f| std::array::from_fn(|o| pair_term(&f[o], sj)))
            .collect();
        let pairs = (0..others.len())
            .map(|t| {
                (t + 1..others.len())
                    .map(|u| std::array::from_fn(|k| pair_term(&forms[t][k / 4], &forms[u][k % 4])))
                    .collect()
            })
            .collect();

        PivotTable {
            pivot,
            others,
            pivot_length: x.elements[pivot].isometry.translation_length(),
            single,
            with_pivot,
            pairs,
        }
    }

    fn value(&self, forms: &[usize]) -> u64 {
        let mut total = self.pivot_length;
        for (t, &o) in forms.iter().enumerate() {
            total += self.single[t][o] + self.with_pivot[t][o];
            for (du, &ou) in forms[t + 1..].iter().enumerate() {
                total += self.pairs[t][du][o * 4 + ou];
            }
        }
        total
    }

    /// Compressed (non-pivot) masks to a full spec.
    fn spec(&self, left: u32, right: u32) -> ReplacementSpec {
        let expand = |m: u32| {
            self.others
                .iter()
                .enumerate()
                .filter(|(t, _)| m >> t & 1 == 1)
                .fold(0u32, |acc, (_, &i)| acc | 1 << i)
        };
        ReplacementSpec {
            pivot: self.pivot,
            left: expand(left),
            right: expand(right),
        }
    }

    /// First move in canonical order with value below `bound`.
    fn first_below(&self, bound: u64) -> Option<(ReplacementSpec, u64)> {
        let m = self.others.len();
        let mut forms = vec![0usize; m];
        for left in 0u32..1 << m {
            for right in 0u32..1 << m {
                for (t, f) in forms.iter_mut().enumerate() {
                    *f = (left >> t & 1) as usize * FORM_LEFT + (right >> t & 1) as usize * FORM_RIGHT;
                }
                let v = self.value(&forms);
                if v < bound {
                    return Some((self.spec(left, right), v));
                }
            }
        }
        None
    }
}

/// All moves in canonical order: pivot ascending, then `(S₁, S₂)` as
/// bitmasks over the non-pivot indices (lowest index = lowest bit), ordered
/// lexicographically with `S₁` major.
pub fn canonical_moves(n: usize) -> impl Iterator<Item = ReplacementSpec> {
    (0..n).flat_map(move |pivot| {
        let others: Vec<usize> = (0..n).filter(|&i| i != pivot).collect();
        let m = others.len() as u32;
        let expand = move |c: u32| {
            others
                .iter()
                .enumerate()
                .filter(|(t, _)| c >> t & 1 == 1)
                .fold(0u32, |acc, (_, &i)| acc | 1 << i)
        };
        (0u32..1 << m).flat_map(move |l| {
            let expand = expand.clone();
            (0u32..1 << m).map(move |r| ReplacementSpec {
                pivot,
                left: expand(l),
                right: expand(r),
            })
        })
    })
}

/// The first strictly improving move in canonical order, with its new `L`.
pub fn find_improving_move(x: &TrackedTuple) -> Option<(ReplacementSpec, u64)> {
    let current = big_l(x);
    find_improving_move_below(x, current)
}

fn find_improving_move_below(x: &TrackedTuple, current: u64) -> Option<(ReplacementSpec, u64)> {
    let scaled: Vec<ScaledMat2> = x.isometries().map(|g| ScaledMat2::new(g.matrix(), x.p)).collect();
    (0..x.len()).find_map(|j| PivotTable::build(x, &scaled, j).first_below(current))
}

pub fn is_minimal(x: &TrackedTuple) -> bool {
    find_improving_move(x).is_none()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    #[serde(flatten)]
    pub spec: ReplacementSpec,
    #[serde(rename = "L")]
    pub l: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// Minimal, all-hyperbolic tuple generating the input group.
    FreeDiscrete { final_tuple: TrackedTuple },
    /// An elliptic element of the input group; `index` is its 0-based slot.
    NotFreeDiscrete { witness: TrackedElement, index: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub p: Prime,
    pub generators: Vec<Mat2>,
    pub initial_l: u64,
    pub outcome: Outcome,
    pub trace: Vec<TraceStep>,
}

impl Certificate {
    pub fn is_free_discrete(&self) -> bool {
        matches!(self.outcome, Outcome::FreeDiscrete { .. })
    }

    /// Freeness for more than three generators rests on the unproven claim
    /// that minimal tuples without elliptic elements play ping-pong.
    pub fn is_conditional(&self) -> bool {
        self.is_free_discrete() && self.generators.len() > 3
    }

    pub fn iterations(&self) -> usize {
        self.trace.len()
    }
}

/// Result of a pure descent that ignores ellipticity.
#[derive(Clone, Debug)]
pub struct Descent {
    pub tuple: TrackedTuple,
    pub initial_l: u64,
    pub trace: Vec<TraceStep>,
}

/// Descends until no move improves `L`, regardless of elliptic elements.
pub fn descend_to_minimal(mut x: TrackedTuple) -> Result<Descent> {
    let initial_l = big_l(&x);
    let mut current = initial_l;
    let mut trace = Vec::new();
    while let Some((spec, l)) = find_improving_move_below(&x, current) {
        x = apply_replacement(&x, &spec)?;
        current = l;
        trace.push(TraceStep { spec, l });
    }
    Ok(Descent {
        tuple: x,
        initial_l,
        trace,
    })
}

/// Decides whether `⟨h₁, …, hₙ⟩ ≤ SL₂(ℚ_p)` is discrete and free.
pub fn decide(generators: &[Mat2], p: Prime) -> Result<Certificate> {
    let mut x = TrackedTuple::from_generators(generators.to_vec(), p)?;
    let initial_l = big_l(&x);
    let mut trace = Vec::new();
    let finish = |outcome, trace| Certificate {
        p,
        generators: generators.to_vec(),
        initial_l,
        outcome,
        trace,
    };

    if let Some(i) = x.first_elliptic() {
        let witness = x.elements[i].clone();
        return Ok(finish(Outcome::NotFreeDiscrete { witness, index: i }, trace));
    }
    let mut current = initial_l;
    loop {
        let Some((spec, l)) = find_improving_move_below(&x, current) else {
            return Ok(finish(Outcome::FreeDiscrete { final_tuple: x }, trace));
        };
        x = apply_replacement(&x, &spec)?;
        current = l;
        trace.push(TraceStep { spec, l });
        // only modified elements can have become elliptic
        let touched = spec.touched();
        let hit = (0..x.len()).find(|&i| touched >> i & 1 == 1 && x.elements[i].isometry.is_elliptic());
        if let Some(i) = hit {
            let witness = x.elements[i].clone();
            return Ok(finish(Outcome::NotFreeDiscrete { witness, index: i }, trace));
        }
    }
}
