//! Formal upper-triangular matrix-unit algebras `T_n` and the embeddings of
//! refinement type `a -> (a_ij 1_t)` and standard type `a -> a ⊕ ... ⊕ a`.
//!
//! Elements are finite linear combinations of matrix units `e_ij` (`i <= j`)
//! multiplied by the rule `e_ij e_kl = δ_jk e_il`; no numerical matrix is ever
//! materialized. Coefficients live in `Q(ω)`, `ω` a primitive cube root of
//! unity.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::cantor::{Point, Space};
use crate::rational::serde_q;
use crate::supernat::SequenceProfile;
use crate::{Error, Result, Q};

/// `a + b ω` with `ω² = -1 - ω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Coefficient {
    #[serde(with = "serde_q")]
    pub a: Q,
    #[serde(with = "serde_q")]
    pub b: Q,
}

impl Coefficient {
    pub fn new(a: Q, b: Q) -> Self {
        Self { a, b }
    }

    pub fn from_q(a: Q) -> Self {
        Self { a, b: Q::zero() }
    }

    pub fn zero() -> Self {
        Self::from_q(Q::zero())
    }

    pub fn one() -> Self {
        Self::from_q(Q::one())
    }

    /// The primitive cube root of unity `ω`.
    pub fn omega() -> Self {
        Self {
            a: Q::zero(),
            b: Q::one(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// `|a + b ω|² = a² - a b + b²`.
    pub fn norm_sq(&self) -> Q {
        &self.a * &self.a - &self.a * &self.b + &self.b * &self.b
    }

    /// Complex conjugate `a + b ω² = (a - b) - b ω`.
    pub fn conj(&self) -> Self {
        Self {
            a: &self.a - &self.b,
            b: -self.b.clone(),
        }
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sq();
        let c = self.conj();
        Some(Self {
            a: c.a / &n,
            b: c.b / &n,
        })
    }

    pub fn pow(&self, e: i64) -> Option<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        Some((0..e.unsigned_abs()).fold(Self::one(), |acc, _| &acc * &base))
    }
}

impl Add for &Coefficient {
    type Output = Coefficient;
    fn add(self, o: &Coefficient) -> Coefficient {
        Coefficient {
            a: &self.a + &o.a,
            b: &self.b + &o.b,
        }
    }
}

impl Sub for &Coefficient {
    type Output = Coefficient;
    fn sub(self, o: &Coefficient) -> Coefficient {
        Coefficient {
            a: &self.a - &o.a,
            b: &self.b - &o.b,
        }
    }
}

impl Mul for &Coefficient {
    type Output = Coefficient;
    fn mul(self, o: &Coefficient) -> Coefficient {
        let bd = &self.b * &o.b;
        Coefficient {
            a: &self.a * &o.a - &bd,
            b: &self.a * &o.b + &self.b * &o.a - bd,
        }
    }
}

impl Neg for &Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        Coefficient {
            a: -self.a.clone(),
            b: -self.b.clone(),
        }
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use crate::rational::to_string;
        write!(f, "({} + {}ω)", to_string(&self.a), to_string(&self.b))
    }
}

/// The matrix unit `e_{row,col}` of `T_size`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatrixUnit {
    row: usize,
    col: usize,
    size: usize,
}

impl MatrixUnit {
    pub fn new(row: usize, col: usize, size: usize) -> Result<Self> {
        if row == 0 || row > col || col > size {
            return Err(Error::InvalidMatrixUnit { row, col, size });
        }
        Ok(Self { row, col, size })
    }

    pub fn row(&self) -> usize {
        self.row
    }

    pub fn col(&self) -> usize {
        self.col
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Every matrix unit of `T_size`.
    pub fn all(size: usize) -> impl Iterator<Item = MatrixUnit> {
        (1..=size).flat_map(move |i| {
            (i..=size).map(move |j| MatrixUnit {
                row: i,
                col: j,
                size,
            })
        })
    }
}

/// A formal combination of matrix units of `T_size`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriElement {
    size: usize,
    terms: BTreeMap<(usize, usize), Coefficient>,
}

impl TriElement {
    pub fn zero(size: usize) -> Self {
        Self {
            size,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(size: usize) -> Self {
        Self::diagonal((0..size).map(|_| Coefficient::one()))
    }

    pub fn unit(e: MatrixUnit) -> Self {
        Self::scaled_unit(e, Coefficient::one())
    }

    pub fn scaled_unit(e: MatrixUnit, c: Coefficient) -> Self {
        let mut out = Self::zero(e.size);
        out.add_term(e.row, e.col, c);
        out
    }

    /// `sum_i d_i e_ii`.
    pub fn diagonal<I: IntoIterator<Item = Coefficient>>(entries: I) -> Self {
        let entries: Vec<Coefficient> = entries.into_iter().collect();
        let mut out = Self::zero(entries.len());
        for (i, c) in entries.into_iter().enumerate() {
            out.add_term(i + 1, i + 1, c);
        }
        out
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.keys().all(|(i, j)| i == j)
    }

    pub fn coefficient(&self, row: usize, col: usize) -> Coefficient {
        self.terms
            .get(&(row, col))
            .cloned()
            .unwrap_or_else(Coefficient::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (MatrixUnit, &Coefficient)> + '_ {
        let size = self.size;
        self.terms
            .iter()
            .map(move |(&(row, col), c)| (MatrixUnit { row, col, size }, c))
    }

    fn add_term(&mut self, row: usize, col: usize, c: Coefficient) {
        debug_assert!(row <= col && col <= self.size);
        let entry = self
            .terms
            .entry((row, col))
            .or_insert_with(Coefficient::zero);
        *entry = &*entry + &c;
        if entry.is_zero() {
            self.terms.remove(&(row, col));
        }
    }

    fn check_size(&self, other: &TriElement) -> Result<()> {
        if self.size != other.size {
            return Err(Error::SizeMismatch {
                expected: self.size,
                actual: other.size,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &TriElement) -> Result<TriElement> {
        self.check_size(other)?;
        let mut out = self.clone();
        for ((i, j), c) in &other.terms {
            out.add_term(*i, *j, c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Coefficient) -> TriElement {
        let mut out = Self::zero(self.size);
        for ((i, j), d) in &self.terms {
            out.add_term(*i, *j, c * d);
        }
        out
    }

    /// Formal product under `e_ij e_kl = δ_jk e_il`.
    pub fn mul(&self, other: &TriElement) -> Result<TriElement> {
        self.check_size(other)?;
        let mut out = Self::zero(self.size);
        for (&(i, j), c) in &self.terms {
            for (&(_, l), d) in other.terms.range((j, 0)..(j + 1, 0)) {
                out.add_term(i, l, c * d);
            }
        }
        Ok(out)
    }

    /// Inverse of an invertible diagonal element.
    pub fn diagonal_inverse(&self) -> Result<TriElement> {
        if !self.is_diagonal() {
            return Err(Error::NotInvertible("element is not diagonal".into()));
        }
        let entries = (1..=self.size)
            .map(|i| {
                self.coefficient(i, i)
                    .inv()
                    .ok_or_else(|| Error::NotInvertible(format!("zero diagonal entry {i}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::diagonal(entries))
    }

    /// `g a g^{-1}` for an invertible diagonal `g`.
    pub fn conjugate_by_diagonal(&self, g: &TriElement) -> Result<TriElement> {
        g.mul(self)?.mul(&g.diagonal_inverse()?)
    }
}

impl fmt::Display for TriElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0 in T_{}", self.size);
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((i, j), c)| format!("{c} e({i},{j})"))
            .collect();
        write!(f, "{} in T_{}", parts.join(" + "), self.size)
    }
}

#[derive(Serialize)]
struct TermRecord<'a> {
    row: usize,
    col: usize,
    coeff: &'a Coefficient,
}

impl Serialize for TriElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for (&(row, col), coeff) in &self.terms {
            seq.serialize_element(&TermRecord { row, col, coeff })?;
        }
        seq.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbeddingKind {
    Refinement,
    Standard,
}

/// One unital embedding `T_n -> T_{n t}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EmbeddingStep {
    pub kind: EmbeddingKind,
    pub multiplicity: usize,
    pub source_size: usize,
}

impl EmbeddingStep {
    pub fn refinement(multiplicity: usize, source_size: usize) -> Self {
        Self {
            kind: EmbeddingKind::Refinement,
            multiplicity,
            source_size,
        }
    }

    pub fn standard(multiplicity: usize, source_size: usize) -> Self {
        Self {
            kind: EmbeddingKind::Standard,
            multiplicity,
            source_size,
        }
    }

    pub fn target_size(&self) -> usize {
        self.source_size * self.multiplicity
    }

    /// Image of a single matrix unit.
    pub fn apply_unit(&self, e: MatrixUnit) -> Result<TriElement> {
        self.apply(&TriElement::unit(e))
    }

    /// Image of an element, extended linearly from the matrix units:
    /// refinement sends `e_ij` to `sum_k e_{(i-1)t+k, (j-1)t+k}`, standard
    /// sends it to `sum_k e_{i+kn, j+kn}`.
    pub fn apply(&self, a: &TriElement) -> Result<TriElement> {
        if a.size != self.source_size {
            return Err(Error::SizeMismatch {
                expected: self.source_size,
                actual: a.size,
            });
        }
        let t = self.multiplicity;
        let n = self.source_size;
        let mut out = TriElement::zero(self.target_size());
        for (&(i, j), c) in &a.terms {
            for k in 0..t {
                let (row, col) = match self.kind {
                    EmbeddingKind::Refinement => ((i - 1) * t + k + 1, (j - 1) * t + k + 1),
                    EmbeddingKind::Standard => (i + k * n, j + k * n),
                };
                out.add_term(row, col, c.clone());
            }
        }
        Ok(out)
    }
}

impl fmt::Display for EmbeddingStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            EmbeddingKind::Refinement => "rho",
            EmbeddingKind::Standard => "sigma",
        };
        write!(
            f,
            "{name}_{}: T_{} -> T_{}",
            self.multiplicity,
            self.source_size,
            self.target_size()
        )
    }
}

/// Applies `steps` left to right.
pub fn compose_chain(steps: &[EmbeddingStep], e: MatrixUnit) -> Result<TriElement> {
    compose_chain_element(steps, &TriElement::unit(e))
}

pub fn compose_chain_element(steps: &[EmbeddingStep], a: &TriElement) -> Result<TriElement> {
    steps
        .iter()
        .try_fold(a.clone(), |acc, step| step.apply(&acc))
}

/// The system `C -> T_{r_1} -> T_{s_1 r_1} -> T_{s_1 r_1 r_2} -> ...`.
///
/// The stage after `N` refinement/standard pairs is identified with the
/// window words on `[-N, N]`: a new standard factor becomes the most
/// significant digit and a new refinement factor the least significant one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DirectSystem {
    space: Space,
}

impl DirectSystem {
    pub fn new(r: SequenceProfile, s: SequenceProfile) -> Self {
        Self {
            space: Space::new(r, s),
        }
    }

    pub fn from_space(space: Space) -> Self {
        Self { space }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    /// `ρ_{r_1}, σ_{s_1}, ..., ρ_{r_N}, σ_{s_N}` starting from `T_1`.
    pub fn steps(&self, pairs: usize) -> Result<Vec<EmbeddingStep>> {
        let mut size = 1usize;
        let mut out = Vec::with_capacity(2 * pairs);
        for k in 1..=pairs {
            for step in [
                EmbeddingStep::refinement(self.space.r().term(k) as usize, 0),
                EmbeddingStep::standard(self.space.s().term(k) as usize, 0),
            ] {
                let step = EmbeddingStep {
                    source_size: size,
                    ..step
                };
                size = size
                    .checked_mul(step.multiplicity)
                    .ok_or_else(|| Error::Overflow(format!("stage size at level {k}")))?;
                out.push(step);
            }
        }
        Ok(out)
    }

    /// `d(N) = s_N ... s_1 r_1 ... r_N`.
    pub fn stage_size(&self, level: usize) -> Result<usize> {
        self.space
            .window_radices(level)
            .into_iter()
            .try_fold(1usize, |acc, b| {
                acc.checked_mul(b as usize)
                    .ok_or_else(|| Error::Overflow(format!("stage size at level {level}")))
            })
    }

    /// Position `a(N)` of `e(x, N)` among the diagonal units of `T_{d(N)}`,
    /// together with `d(N)`.
    pub fn lex_position(&self, x: &Point, level: usize) -> Result<(usize, usize)> {
        let size = self.stage_size(level)?;
        let word = self.space.window_word(x, level);
        let radices = self.space.window_radices(level);
        let value = word
            .iter()
            .zip(&radices)
            .fold(0usize, |acc, (&d, &b)| acc * b as usize + (d as usize - 1));
        Ok((value + 1, size))
    }

    /// Decodes a 1-based position of the level-`N` stage into its window word.
    pub fn word_at(&self, position: usize, level: usize) -> Result<Vec<u64>> {
        let size = self.stage_size(level)?;
        if position == 0 || position > size {
            return Err(Error::SizeMismatch {
                expected: size,
                actual: position,
            });
        }
        let mut value = position - 1;
        let mut word: Vec<u64> = self
            .space
            .window_radices(level)
            .into_iter()
            .rev()
            .map(|b| {
                let d = value % b as usize;
                value /= b as usize;
                d as u64 + 1
            })
            .collect();
        word.reverse();
        Ok(word)
    }

    /// The diagonal projection `e(x, N)`.
    pub fn diagonal_projection(&self, x: &Point, level: usize) -> Result<TriElement> {
        let (a, d) = self.lex_position(x, level)?;
        Ok(TriElement::unit(MatrixUnit::new(a, a, d)?))
    }

    /// Whether `T_{d(N)}` holds a matrix unit with initial projection
    /// `e(y, N)` and final projection `e(x, N)`, i.e. `a_x(N) <= a_y(N)`.
    pub fn mu_in_r(&self, x: &Point, y: &Point, level: usize) -> Result<bool> {
        let (ax, _) = self.lex_position(x, level)?;
        let (ay, _) = self.lex_position(y, level)?;
        Ok(ax <= ay)
    }
}
