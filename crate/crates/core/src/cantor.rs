//! The two-sided coordinate space `X(r_k, s_k)` and its order structure.
//!
//! Coordinates are indexed by the nonzero integers `..., -2, -1, 1, 2, ...`.
//! The coordinate at index `-k` ranges over `1..=s_k` and the coordinate at
//! index `k` over `1..=r_k`. A [`Point`] stores finitely many coordinates on
//! each side: beyond the stored left digits every coordinate is 1, beyond the
//! stored right digits every coordinate is 1 ([`Tail::Ones`]) or maximal
//! ([`Tail::Max`]). These are the points of `X_0` together with their gap
//! partners.
//!
//! The lexicographic order compares the leftmost differing coordinate. The
//! relation `R` is the restriction of that order to tail-equivalent pairs.

use std::cmp::Ordering;
use std::fmt;

use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::linsys::ReducedSystem;
use crate::rational::{self, from_biguint};
use crate::supernat::SequenceProfile;
use crate::{Error, Result, Q};

/// A coordinate position; never zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Index(i64);

impl Index {
    pub fn new(value: i64) -> Option<Self> {
        (value != 0).then_some(Self(value))
    }

    pub fn get(self) -> i64 {
        self.0
    }

    /// Next index in the order `..., -1, 1, 2, ...`.
    pub fn succ(self) -> Self {
        if self.0 == -1 {
            Self(1)
        } else {
            Self(self.0 + 1)
        }
    }

    /// Previous index; the predecessor of 1 is -1.
    pub fn pred(self) -> Self {
        if self.0 == 1 {
            Self(-1)
        } else {
            Self(self.0 - 1)
        }
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Behaviour of the right coordinates past the stored digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tail {
    Ones,
    Max,
}

/// A canonical point. Construct through [`Space::point`].
///
/// `left[i]` is the coordinate at index `-(i + 1)` and `right[i]` the
/// coordinate at index `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Point {
    left: Vec<u64>,
    right: Vec<u64>,
    right_tail: Tail,
}

/// Unvalidated point literal, e.g. `{"left":[],"right":[2],"right_tail":"ones"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointLiteral {
    #[serde(default)]
    pub left: Vec<u64>,
    #[serde(default)]
    pub right: Vec<u64>,
    #[serde(default = "ones")]
    pub right_tail: Tail,
}

fn ones() -> Tail {
    Tail::Ones
}

impl Point {
    /// The point with every coordinate equal to 1.
    pub fn all_ones() -> Self {
        Self {
            left: Vec::new(),
            right: Vec::new(),
            right_tail: Tail::Ones,
        }
    }

    pub fn left(&self) -> &[u64] {
        &self.left
    }

    pub fn right(&self) -> &[u64] {
        &self.right
    }

    pub fn tail(&self) -> Tail {
        self.right_tail
    }

    /// Largest `k` such that index `-k` or `k` carries a stored digit.
    pub fn support(&self) -> usize {
        self.left.len().max(self.right.len())
    }

    pub fn to_literal(&self) -> PointLiteral {
        PointLiteral {
            left: self.left.clone(),
            right: self.right.clone(),
            right_tail: self.right_tail,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tail = match self.right_tail {
            Tail::Ones => "ones",
            Tail::Max => "max",
        };
        write!(f, "left {:?} right {:?} {tail}", self.left, self.right)
    }
}

/// A basic clopen set: all points with a prescribed word on `[-level, level]`.
///
/// The word lists the coordinates at `-level, ..., -1, 1, ..., level`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Cylinder {
    level: usize,
    word: Vec<u64>,
}

impl Cylinder {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn word(&self) -> &[u64] {
        &self.word
    }
}

/// The G-set of pairs `(u z, u' z)` sharing the coordinates `z` outside the
/// window. Its left projection is the cylinder of `lower`, its right
/// projection the cylinder of `upper`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasicGSet {
    lower: Cylinder,
    upper: Cylinder,
}

impl BasicGSet {
    pub fn new(lower: Cylinder, upper: Cylinder) -> Result<Self> {
        if lower.level != upper.level {
            return Err(Error::SizeMismatch {
                expected: lower.level,
                actual: upper.level,
            });
        }
        if lower.word > upper.word {
            return Err(Error::InvalidPoint("lower word exceeds upper word".into()));
        }
        Ok(Self { lower, upper })
    }

    pub fn left_projection(&self) -> &Cylinder {
        &self.lower
    }

    pub fn right_projection(&self) -> &Cylinder {
        &self.upper
    }
}

/// The solved invariance system at one level.
#[derive(Debug, Clone)]
pub struct InvariantMeasure {
    pub level: usize,
    /// Dimension of the homogeneous solution space before normalization.
    pub solution_dimension: usize,
    pub equations: usize,
    pub weights: Vec<(Cylinder, Q)>,
}

/// The space `X(r_k, s_k)` for a fixed pair of profiles.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Space {
    r: SequenceProfile,
    s: SequenceProfile,
}

impl Space {
    pub fn new(r: SequenceProfile, s: SequenceProfile) -> Self {
        Self { r, s }
    }

    pub fn r(&self) -> &SequenceProfile {
        &self.r
    }

    pub fn s(&self) -> &SequenceProfile {
        &self.s
    }

    /// Number of values of the coordinate at `idx`.
    pub fn bound(&self, idx: Index) -> u64 {
        let i = idx.get();
        if i < 0 {
            self.s.term(i.unsigned_abs() as usize)
        } else {
            self.r.term(i as usize)
        }
    }

    /// Coordinate of `x` at `idx`, including the implicit tails.
    pub fn digit(&self, x: &Point, idx: Index) -> u64 {
        let i = idx.get();
        if i < 0 {
            x.left
                .get(i.unsigned_abs() as usize - 1)
                .copied()
                .unwrap_or(1)
        } else {
            let k = i as usize;
            match (x.right.get(k - 1), x.right_tail) {
                (Some(&d), _) => d,
                (None, Tail::Ones) => 1,
                (None, Tail::Max) => self.r.term(k),
            }
        }
    }

    /// Validates digit bounds and returns the canonical point.
    pub fn point(&self, left: Vec<u64>, right: Vec<u64>, tail: Tail) -> Result<Point> {
        for (i, &d) in left.iter().enumerate() {
            let bound = self.s.term(i + 1);
            if d == 0 || d > bound {
                return Err(Error::InvalidPoint(format!(
                    "digit {d} at index -{} outside 1..={bound}",
                    i + 1
                )));
            }
        }
        for (i, &d) in right.iter().enumerate() {
            let bound = self.r.term(i + 1);
            if d == 0 || d > bound {
                return Err(Error::InvalidPoint(format!(
                    "digit {d} at index {} outside 1..={bound}",
                    i + 1
                )));
            }
        }
        Ok(self.canonicalize(left, right, tail))
    }

    /// Builds a point from a literal; the flag reports whether trimming was
    /// needed to reach canonical form.
    pub fn point_from_literal(&self, lit: &PointLiteral) -> Result<(Point, bool)> {
        let x = self.point(lit.left.clone(), lit.right.clone(), lit.right_tail)?;
        let changed = x.left != lit.left || x.right != lit.right;
        Ok((x, changed))
    }

    fn canonicalize(&self, mut left: Vec<u64>, mut right: Vec<u64>, tail: Tail) -> Point {
        while left.last() == Some(&1) {
            left.pop();
        }
        while let Some(&d) = right.last() {
            let fill = match tail {
                Tail::Ones => 1,
                Tail::Max => self.r.term(right.len()),
            };
            if d != fill {
                break;
            }
            right.pop();
        }
        Point {
            left,
            right,
            right_tail: tail,
        }
    }

    /// `W_k = s_0 s_1 ... s_{k-1}`, the weight of the coordinate at `-k`.
    pub fn left_weight(&self, k: usize) -> BigUint {
        self.s.partial_product(k - 1)
    }

    /// `m_k = r_1 ... r_k`.
    pub fn m(&self, k: usize) -> BigUint {
        self.r.partial_product(k)
    }

    /// Whether `x` and `y` agree outside a bounded window.
    pub fn tail_equivalent(&self, x: &Point, y: &Point) -> bool {
        x.right_tail == y.right_tail
    }

    /// Lexicographic comparison: the leftmost differing coordinate decides.
    pub fn lex_cmp(&self, x: &Point, y: &Point) -> Ordering {
        let left = x.left.len().max(y.left.len());
        let right = x.right.len().max(y.right.len());
        let indices = (1..=left as i64).rev().map(|k| -k).chain(1..=right as i64);
        for i in indices {
            let idx = Index(i);
            match self.digit(x, idx).cmp(&self.digit(y, idx)) {
                Ordering::Equal => continue,
                other => return other,
            }
        }
        // Past both supports one tail is constant 1 and the other constant
        // r_k, and r_k >= 2 infinitely often.
        x.right_tail.cmp(&y.right_tail)
    }

    /// `(x, y)` lies in `R`: tail-equivalent and `x <= y` lexicographically.
    pub fn in_r(&self, x: &Point, y: &Point) -> bool {
        self.tail_equivalent(x, y) && self.lex_cmp(x, y) != Ordering::Greater
    }

    /// The valuation
    /// `nu(y) = sum_k (y_{-k} - 1) s_0...s_{k-1} + sum_k (y_k - 1) / m_k`.
    ///
    /// A maximal tail past the stored digits contributes `1 / m_M`.
    pub fn nu(&self, x: &Point) -> Q {
        let mut int_part = BigUint::zero();
        let mut weight = BigUint::one();
        for (i, &d) in x.left.iter().enumerate() {
            int_part += &weight * (d - 1);
            weight *= self.s.term(i + 1);
        }
        let mut total = from_biguint(&int_part);
        let mut m = BigUint::one();
        for (i, &d) in x.right.iter().enumerate() {
            m *= self.r.term(i + 1);
            if d > 1 {
                total += Q::new(BigInt::from(d - 1), BigInt::from(m.clone()));
            }
        }
        if x.right_tail == Tail::Max {
            total += from_biguint(&m).recip();
        }
        total
    }

    /// Every canonical point with valuation `v`: the expansion with a tail of
    /// ones, followed by its maximal-tail twin when `v > 0`.
    pub fn value_to_points(&self, v: &Q) -> Result<Vec<Point>> {
        if v.is_negative() {
            return Err(Error::NotRepresentable(format!(
                "{} is negative",
                rational::to_string(v)
            )));
        }
        let int_part = v.floor();
        let frac = v - &int_part;
        self.check_fraction(&frac)?;
        let int_part = int_part.to_integer().to_biguint().expect("nonnegative");

        let left = self.expand_integer(int_part.clone());
        let right = self.expand_fraction(frac.clone());
        let mut out = vec![self.canonicalize(left, right.clone(), Tail::Ones)];
        if v.is_positive() {
            let twin = if frac.is_zero() {
                let left = self.expand_integer(int_part - 1u32);
                self.canonicalize(left, Vec::new(), Tail::Max)
            } else {
                let mut right = right;
                let last = right.last_mut().expect("nonzero fraction has digits");
                *last -= 1;
                self.canonicalize(self.expand_integer(int_part), right, Tail::Max)
            };
            out.push(twin);
        }
        Ok(out)
    }

    /// Ensures `frac` has the form `l / m_k`.
    fn check_fraction(&self, frac: &Q) -> Result<()> {
        let mut den = frac.denom().magnitude().clone();
        let absorb = |den: &mut BigUint, t: u64| {
            let g = den.gcd(&BigUint::from(t));
            *den /= g;
        };
        for &t in self.r.preamble() {
            absorb(&mut den, t);
        }
        loop {
            if den.is_one() {
                return Ok(());
            }
            let before = den.clone();
            for &t in self.r.cycle() {
                absorb(&mut den, t);
            }
            if den == before {
                return Err(Error::NotRepresentable(format!(
                    "denominator of {} never divides r_1...r_k",
                    rational::to_string(frac)
                )));
            }
        }
    }

    fn expand_integer(&self, mut n: BigUint) -> Vec<u64> {
        let mut digits = Vec::new();
        let mut k = 1;
        while !n.is_zero() {
            let (q, rem) = n.div_rem(&BigUint::from(self.s.term(k)));
            digits.push(rem.to_u64().expect("digit fits") + 1);
            n = q;
            k += 1;
        }
        digits
    }

    fn expand_fraction(&self, mut f: Q) -> Vec<u64> {
        let mut digits = Vec::new();
        let mut k = 1;
        while !f.is_zero() {
            f *= rational::int(self.r.term(k) as i64);
            let d = f.floor();
            f -= &d;
            digits.push(d.to_integer().to_u64().expect("digit fits") + 1);
            k += 1;
        }
        digits
    }

    /// Gap points are exactly the points with a maximal right tail; the left
    /// condition holds for every representable point.
    pub fn is_gap_point(&self, x: &Point) -> bool {
        x.right_tail == Tail::Max
    }

    /// The partner `x+` of a gap point: with `p` the least index from which
    /// every coordinate is maximal, increment the coordinate at `pred(p)` and
    /// reset everything from `p` on to 1.
    pub fn gap_successor(&self, x: &Point) -> Result<Point> {
        if !self.is_gap_point(x) {
            return Err(Error::NotGapPoint);
        }
        if let Some(last) = x.right.last() {
            // canonical: the last stored digit is below its bound, so p = len + 1
            let mut right = x.right.clone();
            *right.last_mut().unwrap() = last + 1;
            return Ok(self.canonicalize(x.left.clone(), right, Tail::Ones));
        }
        let mut left = x.left.clone();
        let mut k = 1;
        loop {
            if left.len() < k {
                left.push(1);
            }
            if left[k - 1] < self.s.term(k) {
                left[k - 1] += 1;
                break;
            }
            left[k - 1] = 1;
            k += 1;
        }
        Ok(self.canonicalize(left, Vec::new(), Tail::Ones))
    }

    /// The cocycle `d(x, y)`, a finite signed mixed-radix difference.
    pub fn cocycle(&self, x: &Point, y: &Point) -> Result<Q> {
        if !self.tail_equivalent(x, y) {
            return Err(Error::NotTailEquivalent);
        }
        let left = x.left.len().max(y.left.len());
        let right = x.right.len().max(y.right.len());
        let mut int_part = BigInt::zero();
        let mut weight = BigInt::one();
        for k in 1..=left {
            let idx = Index(-(k as i64));
            let diff = self.digit(y, idx) as i64 - self.digit(x, idx) as i64;
            int_part += &weight * diff;
            weight *= self.s.term(k);
        }
        let mut total = Q::from_integer(int_part);
        let mut m = BigInt::one();
        for k in 1..=right {
            m *= self.r.term(k);
            let idx = Index(k as i64);
            let diff = self.digit(y, idx) as i64 - self.digit(x, idx) as i64;
            if diff != 0 {
                total += Q::new(BigInt::from(diff), m.clone());
            }
        }
        Ok(total)
    }

    /// Whether `y` lies in the closure of `O(x) = {z : (z, x) in R}`.
    ///
    /// The defining condition (for every `N`, the window of `y` on `[-N, N]`
    /// is at most that of `x`) stabilizes once the window covers both
    /// supports; it is evaluated there, with ties broken by the tails.
    pub fn closure_member(&self, y: &Point, x: &Point) -> bool {
        let level = y.support().max(x.support()) + 1;
        match self.window_word(y, level).cmp(&self.window_word(x, level)) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => !(y.right_tail == Tail::Max && x.right_tail == Tail::Ones),
        }
    }

    /// Digit bounds `(s_N, ..., s_1, r_1, ..., r_N)` of the window `[-N, N]`.
    pub fn window_radices(&self, level: usize) -> Vec<u64> {
        (1..=level)
            .rev()
            .map(|k| self.s.term(k))
            .chain((1..=level).map(|k| self.r.term(k)))
            .collect()
    }

    /// Coordinates of `x` at `-N, ..., -1, 1, ..., N`.
    pub fn window_word(&self, x: &Point, level: usize) -> Vec<u64> {
        let level = level as i64;
        (1..=level)
            .rev()
            .map(|k| -k)
            .chain(1..=level)
            .map(|i| self.digit(x, Index(i)))
            .collect()
    }

    /// The point with the given window word, completed by 1s on the left and
    /// by `tail` on the right.
    pub fn point_from_window(&self, level: usize, word: &[u64], tail: Tail) -> Result<Point> {
        if word.len() != 2 * level {
            return Err(Error::SizeMismatch {
                expected: 2 * level,
                actual: word.len(),
            });
        }
        let left = word[..level].iter().rev().copied().collect();
        let right = word[level..].to_vec();
        self.point(left, right, tail)
    }

    pub fn cylinder(&self, level: usize, word: Vec<u64>) -> Result<Cylinder> {
        let radices = self.window_radices(level);
        if word.len() != radices.len() {
            return Err(Error::SizeMismatch {
                expected: radices.len(),
                actual: word.len(),
            });
        }
        if word.iter().zip(&radices).any(|(&d, &b)| d == 0 || d > b) {
            return Err(Error::InvalidPoint(format!(
                "word {word:?} outside bounds {radices:?}"
            )));
        }
        Ok(Cylinder { level, word })
    }

    /// The cylinder of `x` on `[-level, level]`.
    pub fn cylinder_of(&self, x: &Point, level: usize) -> Cylinder {
        Cylinder {
            level,
            word: self.window_word(x, level),
        }
    }

    /// All window words of the given level in lexicographic order.
    pub fn window_words(&self, level: usize) -> Vec<Vec<u64>> {
        if level == 0 {
            return vec![Vec::new()];
        }
        self.window_radices(level)
            .into_iter()
            .map(|b| 1..=b)
            .multi_cartesian_product()
            .collect()
    }

    /// Product measure of a cylinder: uniform on each coordinate.
    pub fn cylinder_measure(&self, c: &Cylinder) -> Q {
        let size: BigUint = self
            .window_radices(c.level)
            .into_iter()
            .map(BigUint::from)
            .product();
        from_biguint(&size).recip()
    }

    /// Solves `weight(lower) = weight(upper)` for every basic G-set of the
    /// level together with `sum weight = 1`.
    pub fn unique_invariant_measure(&self, level: usize) -> Result<InvariantMeasure> {
        let words = self.window_words(level);
        let cylinders: Vec<Cylinder> = words
            .into_iter()
            .map(|word| Cylinder { level, word })
            .collect();
        let n = cylinders.len();
        let mut system = ReducedSystem::new(n);
        let mut equations = 0;
        for (i, lo) in cylinders.iter().enumerate() {
            for (j, hi) in cylinders.iter().enumerate().skip(i + 1) {
                let g = BasicGSet::new(lo.clone(), hi.clone())?;
                debug_assert!(g.left_projection() == &cylinders[i]);
                system.push([(i, Q::one()), (j, -Q::one())], Q::zero());
                equations += 1;
            }
        }
        let dimension = system.nullity();
        if dimension != 1 {
            return Err(Error::DegenerateSystem(dimension));
        }
        let basis = system.nullspace().pop().expect("one basis vector");
        let total: Q = basis.iter().sum();
        let weights = cylinders
            .into_iter()
            .zip(basis)
            .map(|(c, w)| (c, w / &total))
            .collect();
        Ok(InvariantMeasure {
            level,
            solution_dimension: dimension,
            equations,
            weights,
        })
    }
}
