//! Explicit geometry of the Bruhat–Tits tree of SL₂(ℚ_p).
//!
//! Vertices are homothety classes of ℤ_p-lattices in ℚ_p². Every class has a
//! unique basis of the form
//!
//! ```text
//! [ p^e  x ]
//! [ 0    1 ]
//! ```
//!
//! with `x` a canonical residue modulo `p^e ℤ_p` (a finite sum `Σ cᵢ pⁱ`,
//! `0 ≤ cᵢ < p`, `i < e`). Since all inputs are rational, every vertex reached
//! from the base lattice by rational matrices has an exact rational `x`.
//!
//! This module measures everything geometrically: translation lengths come
//! from minimizing `d(x, Ax)`, axes from midpoints, projections from walking
//! geodesics. It never looks at traces, so it can serve as an independent
//! check of the trace formula and of the descent's certificates.

use serde::{Deserialize, Serialize};

use crate::error::{ArborError, Result};
use crate::exact::{Mat2, Prime, Rational, Valuation};

/// A vertex: the lattice class with basis `(p^exp, 0), (offset, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vertex {
    exp: i64,
    offset: Rational,
}

impl Vertex {
    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn offset(&self) -> &Rational {
        &self.offset
    }
}

/// Serializes a vertex as its canonical basis matrix.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexJson(pub Mat2);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathSegment {
    pub vertices: Vec<Vertex>,
}

impl PathSegment {
    /// Number of edges.
    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() <= 1
    }

    pub fn start(&self) -> &Vertex {
        &self.vertices[0]
    }

    pub fn end(&self) -> &Vertex {
        self.vertices.last().expect("nonempty path")
    }
}

/// The Bruhat–Tits tree for one prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Tree {
    p: Prime,
}

impl Tree {
    pub fn new(p: Prime) -> Self {
        Tree { p }
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    /// The class of the standard lattice ℤ_p².
    pub fn base(&self) -> Vertex {
        Vertex {
            exp: 0,
            offset: Rational::zero(),
        }
    }

    pub fn basis(&self, v: &Vertex) -> Mat2 {
        Mat2::new(
            self.p.power(v.exp),
            v.offset.clone(),
            Rational::zero(),
            Rational::one(),
        )
    }

    pub fn to_json(&self, v: &Vertex) -> VertexJson {
        VertexJson(self.basis(v))
    }

    /// The class of the lattice spanned by the columns of an invertible matrix.
    pub fn canonicalize(&self, basis: &Mat2) -> Vertex {
        let p = self.p;
        let (mut c1, mut c2) = (
            (basis.a11.clone(), basis.a21.clone()),
            (basis.a12.clone(), basis.a22.clone()),
        );
        // the column with the smaller bottom valuation becomes the pivot
        if c1.1.vp(p) < c2.1.vp(p) {
            std::mem::swap(&mut c1, &mut c2);
        }
        assert!(!c2.1.is_zero(), "lattice basis must be invertible");
        if !c1.1.is_zero() {
            let t = &c1.1 / &c2.1;
            c1 = (&c1.0 - &(&t * &c2.0), Rational::zero());
        }
        let exp = c1.0.vp_nonzero(p) - c2.1.vp_nonzero(p);
        let x = &c2.0 / &c2.1;
        Vertex {
            exp,
            offset: x.reduce_mod_power(p, exp),
        }
    }

    /// Path distance: the spread of the elementary-divisor valuations of the
    /// change of basis between the two lattices.
    pub fn distance(&self, u: &Vertex, v: &Vertex) -> u64 {
        // basis(u)⁻¹ · basis(v) = [[p^(b−a), (y−x)·p^(−a)], [0, 1]]
        let shift = v.exp - u.exp;
        let off = match (&v.offset - &u.offset).vp(self.p) {
            Valuation::Finite(w) => w - u.exp,
            Valuation::Infinity => i64::MAX,
        };
        let lowest = shift.min(off).min(0);
        (shift - 2 * lowest) as u64
    }

    /// The `p + 1` vertices adjacent to `v` (index-`p` sublattices).
    pub fn neighbors(&self, v: &Vertex) -> Vec<Vertex> {
        let step = self.p.power(v.exp);
        let mut out = Vec::with_capacity(self.p.get() as usize + 1);
        let mut offset = v.offset.clone();
        for _ in 0..self.p.get() {
            out.push(Vertex {
                exp: v.exp + 1,
                offset: offset.clone(),
            });
            offset = &offset + &step;
        }
        out.push(Vertex {
            exp: v.exp - 1,
            offset: v.offset.reduce_mod_power(self.p, v.exp - 1),
        });
        out
    }

    pub fn apply(&self, a: &Mat2, v: &Vertex) -> Vertex {
        self.canonicalize(&a.mul(&self.basis(v)))
    }

    /// Exponent of the smallest ball `x + p^e ℤ_p` containing both vertices;
    /// geodesics climb to it and descend from it.
    fn meet_exponent(&self, u: &Vertex, v: &Vertex) -> i64 {
        let split = match (&v.offset - &u.offset).vp(self.p) {
            Valuation::Finite(w) => w,
            Valuation::Infinity => i64::MAX,
        };
        u.exp.min(v.exp).min(split)
    }

    /// The unique neighbor of `from` one step closer to `to`.
    pub fn step_toward(&self, from: &Vertex, to: &Vertex) -> Vertex {
        assert!(from != to, "already at target");
        self.walk_toward(from, to, 1)
    }

    /// The vertex `steps` edges from `from` on the geodesic to `to`.
    pub fn walk_toward(&self, from: &Vertex, to: &Vertex, steps: u64) -> Vertex {
        if steps == 0 {
            return from.clone();
        }
        let meet = self.meet_exponent(from, to);
        let up = (from.exp - meet) as u64;
        assert!(steps <= up + (to.exp - meet) as u64, "walk overshoots target");
        let (exp, anchor) = if steps <= up {
            (from.exp - steps as i64, &from.offset)
        } else {
            (meet + (steps - up) as i64, &to.offset)
        };
        Vertex {
            exp,
            offset: anchor.reduce_mod_power(self.p, exp),
        }
    }

    pub fn geodesic(&self, u: &Vertex, v: &Vertex) -> PathSegment {
        let mut vertices = vec![u.clone()];
        let mut cur = u.clone();
        while &cur != v {
            cur = self.step_toward(&cur, v);
            vertices.push(cur.clone());
        }
        PathSegment { vertices }
    }

    /// Descends `x ← midpoint(x, Ax)` while `d(x, Ax)` decreases. Returns the
    /// final vertex and its displacement, which is `l(A)`.
    pub fn minimize_displacement(&self, a: &Mat2, start: &Vertex) -> (Vertex, u64) {
        let mut x = start.clone();
        let mut d = self.distance(&x, &self.apply(a, &x));
        while d > 0 {
            // SL₂ elements act without inversions, so displacements are even
            assert!(d.is_multiple_of(2), "odd displacement {d}: an inversion");
            let m = self.walk_toward(&x, &self.apply(a, &x), d / 2);
            let dm = self.distance(&m, &self.apply(a, &m));
            if dm >= d {
                break;
            }
            x = m;
            d = dm;
        }
        (x, d)
    }

    /// `min_x d(x, Ax)`, found by midpoint descent from the base vertex.
    pub fn oracle_translation_length(&self, a: &Mat2) -> u64 {
        self.minimize_displacement(a, &self.base()).1
    }

    /// A vertex fixed by an elliptic `a`.
    pub fn fixed_vertex(&self, a: &Mat2) -> Result<Vertex> {
        self.fixed_vertex_near(a, &self.base())
    }

    /// The fixed vertex of `a` closest to `start`.
    pub fn fixed_vertex_near(&self, a: &Mat2, start: &Vertex) -> Result<Vertex> {
        match self.minimize_displacement(a, start) {
            (v, 0) => Ok(v),
            (_, l) => Err(ArborError::NotElliptic(l)),
        }
    }

    /// The axis of a hyperbolic `a`, with coordinates centred at the
    /// projection of the base vertex.
    pub fn axis_frame(&self, a: &Mat2) -> Result<AxisFrame> {
        let base = self.base();
        let image = self.apply(a, &base);
        let d = self.distance(&base, &image);
        let l = self.oracle_translation_length(a);
        if l == 0 {
            return Err(ArborError::NotHyperbolic);
        }
        let origin = self.walk_toward(&base, &image, (d - l) / 2);
        let shifted = self.apply(a, &origin);
        assert_eq!(self.distance(&origin, &shifted), l, "origin must lie on the axis");
        let period = self.geodesic(&origin, &shifted).vertices;
        Ok(AxisFrame {
            tree: *self,
            matrix: a.clone(),
            inverse: a.inverse_general().expect("invertible"),
            length: l,
            origin,
            period,
        })
    }

    /// `Proj_target(other)` as a closed coordinate interval on `target`.
    ///
    /// Samples `other` at `gᵏ·y₀` on both sides of the point `y₀` of `other`
    /// nearest `target`, until the projected interval survives two further
    /// extensions unchanged. Fails once the sampling radius passes `cutoff`.
    pub fn projection_interval(
        &self,
        target: &AxisFrame,
        other: &AxisFrame,
        cutoff: i64,
    ) -> Result<Interval> {
        let y0 = other.project(&target.origin);
        let coord = |y: &Vertex| {
            target
                .coordinate(&target.project(y))
                .expect("projection lies on the axis")
        };
        let c0 = coord(&y0);
        let mut interval = Interval { lo: c0, hi: c0 };
        let (mut fwd, mut back) = (y0.clone(), y0);
        let mut unchanged = 0;
        let mut radius = 0i64;
        while unchanged < 2 {
            radius += other.length as i64;
            if radius > cutoff {
                return Err(ArborError::OverlapBeyondCutoff(cutoff));
            }
            fwd = other.translate(&fwd, 1);
            back = other.translate(&back, -1);
            let grown = interval.include(coord(&fwd)).include(coord(&back));
            if grown == interval {
                unchanged += 1;
            } else {
                unchanged = 0;
                interval = grown;
            }
        }
        Ok(interval)
    }

    /// Measures how the axes of two hyperbolic elements meet.
    pub fn measure_axes(&self, first: &AxisFrame, second: &AxisFrame, cutoff: i64) -> Result<MeasuredAxes> {
        let interval = self.projection_interval(first, second, cutoff)?;
        let near = first.vertex_at(interval.lo);
        let gap = second.distance_to_axis(&near);
        if gap > 0 {
            return Ok(MeasuredAxes::Disjoint { distance: gap });
        }
        let same_orientation = if interval.diameter() == 0 {
            None
        } else {
            let a = second.coordinate(&near).expect("on both axes");
            let b = second
                .coordinate(&first.vertex_at(interval.hi))
                .expect("on both axes");
            Some(b > a)
        };
        Ok(MeasuredAxes::Meet {
            overlap: interval,
            same_orientation,
        })
    }

    pub fn check_pingpong(&self, elements: &[Mat2], config: &PingPongConfig) -> Result<PingPongReport> {
        let frames = elements
            .iter()
            .enumerate()
            .map(|(i, a)| {
                self.axis_frame(a)
                    .map_err(|_| ArborError::ElementNotHyperbolic(i))
            })
            .collect::<Result<Vec<_>>>()?;
        let max_len = frames.iter().map(|f| f.length).max().unwrap_or(0) as i64;
        let cutoff = config.cutoff.unwrap_or(4 * max_len + 8);
        let slack = if config.strict { 2 } else { 1 };

        let mut diagnostics = Vec::with_capacity(frames.len());
        for (i, target) in frames.iter().enumerate() {
            let mut union: Option<Interval> = None;
            let mut indeterminate = false;
            for (j, other) in frames.iter().enumerate() {
                if i == j {
                    continue;
                }
                match self.projection_interval(target, other, cutoff) {
                    Ok(iv) => union = Some(union.map_or(iv, |u| u.hull(&iv))),
                    Err(ArborError::OverlapBeyondCutoff(_)) => indeterminate = true,
                    Err(e) => return Err(e),
                }
            }
            let l = target.length;
            let diameter = union.map_or(0, |u| u.diameter());
            let fits = diameter + slack <= l as i64;
            let pass = if !fits {
                Some(false)
            } else if indeterminate {
                None
            } else {
                Some(true)
            };
            diagnostics.push(IndexDiagnostic {
                i: i + 1,
                l,
                union_diameter: (!indeterminate || !fits).then_some(diameter),
                pass,
            });
        }
        let verdict = if diagnostics.iter().any(|d| d.pass == Some(false)) {
            Verdict::Fail
        } else if diagnostics.iter().any(|d| d.pass.is_none()) {
            Verdict::Indeterminate
        } else {
            Verdict::Pass
        };
        Ok(PingPongReport {
            verdict,
            cutoff,
            diagnostics,
        })
    }
}

/// A closed interval of axis coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: i64,
    pub hi: i64,
}

impl Interval {
    pub fn diameter(&self) -> i64 {
        self.hi - self.lo
    }

    fn include(self, c: i64) -> Interval {
        Interval {
            lo: self.lo.min(c),
            hi: self.hi.max(c),
        }
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }
}

/// The axis of a hyperbolic element with integer coordinates: `origin` is 0
/// and the element moves coordinate `t` to `t + l`.
#[derive(Clone, Debug)]
pub struct AxisFrame {
    tree: Tree,
    matrix: Mat2,
    inverse: Mat2,
    length: u64,
    origin: Vertex,
    /// Axis vertices at coordinates `0..=l`.
    period: Vec<Vertex>,
}

impl AxisFrame {
    pub fn length(&self) -> u64 {
        self.length
    }

    pub fn origin(&self) -> &Vertex {
        &self.origin
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.matrix
    }

    /// Applies the element `k` times (negative `k` applies the inverse).
    pub fn translate(&self, v: &Vertex, k: i64) -> Vertex {
        let m = if k >= 0 { &self.matrix } else { &self.inverse };
        (0..k.unsigned_abs()).fold(v.clone(), |acc, _| self.tree.apply(m, &acc))
    }

    pub fn displacement(&self, v: &Vertex) -> u64 {
        self.tree.distance(v, &self.tree.apply(&self.matrix, v))
    }

    pub fn contains(&self, v: &Vertex) -> bool {
        self.displacement(v) == self.length
    }

    /// `d(v, axis)`, from `d(v, gv) = l + 2·d(v, axis)`.
    pub fn distance_to_axis(&self, v: &Vertex) -> u64 {
        (self.displacement(v) - self.length) / 2
    }

    /// The vertex of the axis nearest `v`.
    pub fn project(&self, v: &Vertex) -> Vertex {
        let image = self.tree.apply(&self.matrix, v);
        let d = self.tree.distance(v, &image);
        self.tree.walk_toward(v, &image, (d - self.length) / 2)
    }

    /// Signed coordinate of an axis vertex, `None` off the axis.
    pub fn coordinate(&self, v: &Vertex) -> Option<i64> {
        if !self.contains(v) {
            return None;
        }
        let from_origin = self.tree.distance(&self.origin, v) as i64;
        let from_next = self.tree.distance(&self.period[self.period.len() - 1], v) as i64;
        // behind the origin, the translated origin is a further l away
        if from_origin > 0 && from_next == from_origin + self.length as i64 {
            Some(-from_origin)
        } else {
            Some(from_origin)
        }
    }

    pub fn vertex_at(&self, t: i64) -> Vertex {
        let l = self.length as i64;
        let (q, r) = (t.div_euclid(l), t.rem_euclid(l));
        self.translate(&self.period[r as usize], q)
    }
}

/// How two axes meet, measured on the tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MeasuredAxes {
    Disjoint { distance: u64 },
    /// Shared path, as coordinates on the first axis. The orientation is
    /// `None` when the axes share a single vertex.
    Meet {
        overlap: Interval,
        same_orientation: Option<bool>,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PingPongConfig {
    /// Sampling radius limit; defaults to `4·max l + 8`.
    pub cutoff: Option<i64>,
    /// Require `diameter ≤ l − 2` instead of `diameter ≤ l − 1`.
    pub strict: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexDiagnostic {
    pub i: usize,
    pub l: u64,
    pub union_diameter: Option<i64>,
    pub pass: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PingPongReport {
    pub verdict: Verdict,
    pub cutoff: i64,
    pub diagnostics: Vec<IndexDiagnostic>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples::{example_quintuple, example_triple};

    fn tree(p: u64) -> Tree {
        Tree::new(Prime::new(p).unwrap())
    }

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_form_is_idempotent_and_basis_invariant() {
        let t = tree(5);
        let m = Mat2::new(q("3/25"), q("7"), q("10"), q("2/3"));
        let v = t.canonicalize(&m);
        assert_eq!(t.canonicalize(&t.basis(&v)), v);
        // column operations over ℤ_(5) and scaling do not change the class
        let u = Mat2::new(q("2"), q("1/3"), q("5"), q("1"));
        assert_eq!(t.canonicalize(&m.mul(&u)), v);
        assert_eq!(t.canonicalize(&m.scale(&q("125/7"))), v);
    }

    #[test]
    fn distances() {
        let t = tree(5);
        let b = t.base();
        assert_eq!(t.distance(&b, &b), 0);
        let g3 = Mat2::new(q("5"), q("0"), q("0"), q("1/5"));
        assert_eq!(t.distance(&b, &t.apply(&g3, &b)), 2);
        for w in t.neighbors(&b) {
            assert_eq!(t.distance(&b, &w), 1);
        }
    }

    #[test]
    fn neighbors_are_regular_and_symmetric() {
        for p in [2, 3, 5] {
            let t = tree(p);
            let v = t.apply(&Mat2::new(q("1/3"), q("4"), q("2"), q("27")), &t.base());
            let ns = t.neighbors(&v);
            assert_eq!(ns.len(), p as usize + 1);
            let distinct: std::collections::HashSet<_> = ns.iter().collect();
            assert_eq!(distinct.len(), ns.len());
            for w in &ns {
                assert!(t.neighbors(w).contains(&v));
                assert_eq!(t.distance(&v, w), 1);
            }
        }
    }

    #[test]
    fn neighbors_match_canonicalized_sublattices() {
        let t = tree(3);
        let v = t.apply(&Mat2::new(q("1/9"), q("5"), q("2"), q("99")), &t.base());
        let basis = t.basis(&v);
        let mut expected: Vec<Vertex> = (0..3)
            .map(|c| t.canonicalize(&basis.mul(&Mat2::from_ints([3, c, 0, 1]))))
            .collect();
        expected.push(t.canonicalize(&basis.mul(&Mat2::from_ints([1, 0, 0, 3]))));
        assert_eq!(t.neighbors(&v), expected);
    }

    #[test]
    fn geodesic_basics() {
        let t = tree(2);
        let b = t.base();
        assert_eq!(t.geodesic(&b, &b).vertices, vec![b.clone()]);
        let far = t.apply(&Mat2::new(q("8"), q("3"), q("5"), q("1/4")), &b);
        let path = t.geodesic(&b, &far);
        assert_eq!(path.len() as u64, t.distance(&b, &far));
        for (k, v) in path.vertices.iter().enumerate() {
            assert_eq!(t.distance(&b, v), k as u64);
        }
    }

    #[test]
    fn steps_agree_with_neighbor_search() {
        for p in [2, 3, 7] {
            let t = tree(p);
            let vs: Vec<Vertex> = [
                ["1", "0", "0", "1"],
                ["8", "3", "5", "1/4"],
                ["1/9", "5", "2", "99"],
                ["7/2", "1/49", "3", "2"],
                ["1/8", "0", "0", "8"],
            ]
            .iter()
            .map(|e| t.apply(&Mat2::new(q(e[0]), q(e[1]), q(e[2]), q(e[3])), &t.base()))
            .collect();
            for u in &vs {
                for v in &vs {
                    let d = t.distance(u, v);
                    if d == 0 {
                        continue;
                    }
                    let by_search = t
                        .neighbors(u)
                        .into_iter()
                        .filter(|w| t.distance(w, v) < d)
                        .collect::<Vec<_>>();
                    assert_eq!(by_search, vec![t.step_toward(u, v)]);
                }
            }
        }
    }

    #[test]
    fn elliptic_fixed_vertices() {
        let t = tree(3);
        assert_eq!(t.fixed_vertex(&Mat2::identity()).unwrap(), t.base());
        let rot = Mat2::from_ints([0, 1, -1, 0]);
        let v = t.fixed_vertex(&rot).unwrap();
        assert_eq!(t.apply(&rot, &v), v);
        // conjugate the rotation far from the base
        let h = Mat2::new(q("27"), q("1/9"), q("0"), q("1/27"));
        let e = h.mul(&rot).mul(&h.adjugate());
        let v = t.fixed_vertex(&e).unwrap();
        assert_eq!(t.apply(&e, &v), v);
        assert!(t.fixed_vertex(&Mat2::new(q("3"), q("0"), q("0"), q("1/3"))).is_err());
    }

    #[test]
    fn diagonal_axis_frame() {
        for p in [2, 5, 7] {
            let t = tree(p);
            let pp = t.prime().power(1);
            let a = Mat2::diag(pp.clone(), pp.recip());
            let f = t.axis_frame(&a).unwrap();
            assert_eq!(f.origin(), &t.base());
            assert_eq!(f.length(), 2);
            for c in -5..5 {
                let v = f.vertex_at(c);
                assert_eq!(f.coordinate(&v), Some(c));
                assert_eq!(f.coordinate(&t.apply(&a, &v)), Some(c + 2));
            }
        }
    }

    #[test]
    fn triple_projections() {
        let t = tree(5);
        let gens = example_triple();
        for g in &gens {
            assert_eq!(t.oracle_translation_length(g), 2);
        }
        let frames: Vec<_> = gens.iter().map(|g| t.axis_frame(g).unwrap()).collect();
        let union_on = |i: usize| {
            (0..3)
                .filter(|&j| j != i)
                .map(|j| t.projection_interval(&frames[i], &frames[j], 100).unwrap())
                .reduce(|a, b| a.hull(&b))
                .unwrap()
                .diameter()
        };
        // all three axes pass through the base vertex; the second axis
        // carries the length-2 union
        assert_eq!(union_on(0), 1);
        assert_eq!(union_on(1), 2);
        assert_eq!(union_on(2), 1);
        let report = t.check_pingpong(&gens, &PingPongConfig::default()).unwrap();
        assert_eq!(report.verdict, Verdict::Fail);
        let passes: Vec<_> = report.diagnostics.iter().map(|d| d.pass).collect();
        assert_eq!(passes, vec![Some(true), Some(false), Some(true)]);
        let strict = PingPongConfig {
            strict: true,
            ..Default::default()
        };
        let report = t.check_pingpong(&gens, &strict).unwrap();
        assert!(report.diagnostics.iter().all(|d| d.pass == Some(false)));
    }

    #[test]
    fn quintuple_projections_on_fifth_axis() {
        let t = tree(7);
        let gens = example_quintuple();
        let frames: Vec<_> = gens.iter().map(|g| t.axis_frame(g).unwrap()).collect();
        let a = t.projection_interval(&frames[4], &frames[0], 100).unwrap();
        let b = t.projection_interval(&frames[4], &frames[1], 100).unwrap();
        assert_eq!(a.hull(&b).diameter(), 2);
        let report = t.check_pingpong(&gens, &PingPongConfig::default()).unwrap();
        assert_eq!(report.verdict, Verdict::Fail);
        assert_eq!(report.diagnostics[4].pass, Some(false));
    }

    #[test]
    fn shared_end_is_indeterminate() {
        // both upper triangular: the axes share an infinite ray
        let t = tree(2);
        let a = Mat2::new(q("2"), q("0"), q("0"), q("1/2"));
        let b = Mat2::new(q("4"), q("1"), q("0"), q("1/4"));
        let fa = t.axis_frame(&a).unwrap();
        let fb = t.axis_frame(&b).unwrap();
        assert_eq!(
            t.projection_interval(&fa, &fb, 40),
            Err(ArborError::OverlapBeyondCutoff(40))
        );
    }

    #[test]
    fn diagnostics_json_shape() {
        let d = IndexDiagnostic {
            i: 5,
            l: 2,
            union_diameter: Some(2),
            pass: Some(false),
        };
        assert_eq!(
            serde_json::to_string(&d).unwrap(),
            r#"{"i":5,"l":2,"union_diameter":2,"pass":false}"#
        );
    }
}
