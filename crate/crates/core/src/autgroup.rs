//! Automorphisms of the fundamental relation and their algebraic witnesses.
//!
//! Every automorphism of `R(r_k, s_k)` rescales the valuation, `nu(α x) =
//! c nu(x)`, with `c = prod p^{a_p}` over the primes dividing infinitely many
//! terms of both sequences. The exponent vector `(a_p)` identifies the
//! automorphism, and the map is an isomorphism onto `Z^d`.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::cantor::{Index, Point, Space, Tail};
use crate::matrixalg::{Coefficient, DirectSystem, EmbeddingStep, MatrixUnit, TriElement};
use crate::rational::{self, from_biguint, serde_q, serde_uint};
use crate::supernat::{
    common_infinite_primes, factorize, SequenceProfile, Supernatural, MAX_ENTRY,
};
use crate::{Error, Result, Q};

/// `d` and the primes counted by it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OutRank {
    pub d: usize,
    pub primes: Vec<u64>,
}

/// Rank of the outer automorphism group: the number of primes dividing
/// infinitely many terms of both profiles.
pub fn out_rank(r: &SequenceProfile, s: &SequenceProfile) -> OutRank {
    let primes = common_infinite_primes(
        &Supernatural::from_profile(r),
        &Supernatural::from_profile(s),
    );
    OutRank {
        d: primes.len(),
        primes,
    }
}

/// Common infinite primes of the two profiles of `space`.
pub fn generator_primes(space: &Space) -> Vec<u64> {
    out_rank(space.r(), space.s()).primes
}

/// Rewrites `profile` so that every odd-indexed term equals `p` without
/// changing the supernatural number it generates.
///
/// Odd slots get one factor `p`; even slots absorb the preamble entries and
/// then the residual cycle product.
pub fn refactor_products(profile: &SequenceProfile, p: u64) -> Result<SequenceProfile> {
    if !Supernatural::from_profile(profile)
        .infinite_primes()
        .contains(&p)
    {
        return Err(Error::PrimeNotInfinite(p));
    }
    let horizon = profile.preamble().len() + 2 * profile.cycle().len();
    if (1..=horizon).step_by(2).all(|k| profile.term(k) == p) {
        return Ok(profile.canonical());
    }
    let preamble: Vec<u64> = profile.preamble().iter().flat_map(|&a| [p, a]).collect();
    let cycle = match profile.cycle_product().map(|c| c / p) {
        Some(rest) if rest <= MAX_ENTRY => vec![p, rest],
        // residual too large for one slot: keep the entries apart, the extra
        // factors of p are absorbed by p^∞
        _ => {
            let mut rest: Vec<u64> = profile.cycle().to_vec();
            let hit = rest
                .iter()
                .position(|&t| t % p == 0)
                .expect("p divides the cycle");
            rest[hit] /= p;
            rest.into_iter().flat_map(|t| [p, t]).collect()
        }
    };
    Ok(SequenceProfile::new(preamble, cycle)?.canonical())
}

/// Exponents `(a_p)` of a scaling factor `c = prod p^{a_p}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(transparent)]
pub struct ExponentVector {
    exponents: BTreeMap<u64, i64>,
}

impl ExponentVector {
    pub fn new<I: IntoIterator<Item = (u64, i64)>>(entries: I) -> Self {
        let mut exponents = BTreeMap::new();
        for (p, a) in entries {
            *exponents.entry(p).or_insert(0) += a;
        }
        exponents.retain(|_, a| *a != 0);
        Self { exponents }
    }

    pub fn identity() -> Self {
        Self::default()
    }

    /// Factors a positive rational into prime powers.
    pub fn from_scaling(c: &Q) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::WrongShape(format!(
                "scaling {} is not positive",
                rational::to_string(c)
            )));
        }
        let to_u64 = |n: &BigInt| {
            n.to_u64()
                .ok_or_else(|| Error::Overflow(format!("{n} is too large to factor")))
        };
        let num = factorize(to_u64(c.numer())?);
        let den = factorize(to_u64(c.denom())?);
        Ok(Self::new(
            num.into_iter()
                .map(|(p, e)| (p, e as i64))
                .chain(den.into_iter().map(|(p, e)| (p, -(e as i64)))),
        ))
    }

    pub fn exponents(&self) -> &BTreeMap<u64, i64> {
        &self.exponents
    }

    pub fn exponent(&self, p: u64) -> i64 {
        self.exponents.get(&p).copied().unwrap_or(0)
    }

    pub fn is_identity(&self) -> bool {
        self.exponents.is_empty()
    }

    /// `c = prod p^{a_p}`.
    pub fn scaling(&self) -> Q {
        self.exponents
            .iter()
            .map(|(&p, &a)| rational::pow(&rational::int(p as i64), a))
            .product()
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.exponents.iter().map(|(&p, &a)| (p, -a)))
    }
}

/// Group law on exponent vectors: pointwise sum, so scalings multiply.
pub fn exponent_compose(a: &ExponentVector, b: &ExponentVector) -> ExponentVector {
    ExponentVector::new(
        a.exponents
            .iter()
            .chain(&b.exponents)
            .map(|(&p, &e)| (p, e)),
    )
}

/// The image `y` of `x` under the automorphism with exponents `c`:
/// `nu(y) = c nu(x)`, and `y` keeps the tail type of `x`, which pins down the
/// member of a gap pair.
pub fn alpha_on_point(space: &Space, c: &ExponentVector, x: &Point) -> Result<Point> {
    let primes = generator_primes(space);
    if let Some(&p) = c.exponents.keys().find(|p| !primes.contains(p)) {
        return Err(Error::InvalidScaling(p));
    }
    if c.is_identity() {
        return Ok(x.clone());
    }
    let value = c.scaling() * space.nu(x);
    let candidates = space.value_to_points(&value)?;
    Ok(candidates
        .into_iter()
        .find(|y| y.tail() == x.tail())
        .expect("positive values have a twin of each tail type"))
}

/// Boundary data of a left gap point `g = (..., 1, w, r_t, r_{t+1}, ...)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapChart {
    pub t: usize,
    /// The coordinates at `-t+1, ..., -1, 1, ..., t-1`.
    pub word: Vec<u64>,
    /// Size of the order interval from `(1, ..., 1)` to `word`.
    #[serde(with = "serde_uint")]
    pub n: BigUint,
    /// `n / m_{t-1}`.
    #[serde(with = "serde_q")]
    pub c: Q,
}

/// The chart of `g` at the least admissible `t`.
pub fn gap_chart(space: &Space, g: &Point) -> Result<GapChart> {
    let t = g.left().len().max(g.right().len()) + 1;
    gap_chart_at(space, g, t)
}

/// The chart of `g` at a given `t`; `c` does not depend on the choice.
pub fn gap_chart_at(space: &Space, g: &Point, t: usize) -> Result<GapChart> {
    if g.tail() != Tail::Max {
        return Err(Error::WrongShape(
            "gap chart needs a maximal right tail".into(),
        ));
    }
    if t == 0 || g.left().len() >= t || g.right().len() >= t {
        return Err(Error::WrongShape(format!(
            "point is not maximal from index {t} and trivial below -{t}"
        )));
    }
    let word = space.window_word(g, t - 1);
    let radices = space.window_radices(t - 1);
    let offset = word
        .iter()
        .zip(&radices)
        .fold(BigUint::zero(), |acc, (&d, &b)| acc * b + (d - 1));
    let n = offset + 1u32;
    let c = from_biguint(&n) / from_biguint(&space.m(t - 1));
    Ok(GapChart { t, word, n, c })
}

fn decode(mut value: usize, radices: &[u64]) -> Vec<u64> {
    let mut word: Vec<u64> = radices
        .iter()
        .rev()
        .map(|&b| {
            let d = value % b as usize;
            value /= b as usize;
            d as u64 + 1
        })
        .collect();
    word.reverse();
    word
}

/// The zig-zag generator for the prime `p` evaluated on `x`.
///
/// `e(x, N)` sits at position `a(N)` of `T_{d(N)}`. Pushing it down the
/// standard embedding `σ_p` (in place of the refinement `ρ_p = ρ_{r_{N+1}}`)
/// lands on the positions `a(N) + k d(N)`; their coordinate words are read in
/// the radices `(s_N, ..., s_1, r_1, ..., r_{N+1})` and the image of `x` is the
/// lexicographically least completion by 1s.
pub fn zigzag_image(p: u64, sys: &DirectSystem, x: &Point, level: usize) -> Result<Point> {
    let space = sys.space();
    if x.tail() != Tail::Ones {
        return Err(Error::WrongShape(
            "zig-zag image needs a tail of ones".into(),
        ));
    }
    if x.support() > level {
        return Err(Error::LevelTooSmall {
            support: x.support(),
            level,
        });
    }
    let next = space.r().term(level + 1);
    if next != p {
        return Err(Error::LevelNotAligned {
            index: level + 1,
            term: next,
            prime: p,
        });
    }
    let (a, d) = sys.lex_position(x, level)?;
    let image = EmbeddingStep::standard(p as usize, d).apply_unit(MatrixUnit::new(a, a, d)?)?;
    let mut radices = space.window_radices(level);
    radices.push(p);
    let candidates = image
        .terms()
        .map(|(unit, _)| {
            let word = decode(unit.row() - 1, &radices);
            let left = word[..level].iter().rev().copied().collect();
            let right = word[level..].to_vec();
            space.point(left, right, Tail::Ones)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(candidates
        .into_iter()
        .min_by(|u, v| space.lex_cmp(u, v))
        .expect("σ_p image is nonempty"))
}

/// Limits for [`density_witness`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchBounds {
    pub max_depth: usize,
    pub max_k: u64,
    pub max_m: i64,
}

impl Default for SearchBounds {
    fn default() -> Self {
        Self {
            max_depth: 6,
            max_k: 10_000,
            max_m: 10_000,
        }
    }
}

/// A value lying in `nu(F_j(x))` and in one of the intervals
/// `[c k s_1, c k s_1 + c]` covering `nu(α(E))`, `E = {y : y_{-1} = 1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DensityWitness {
    pub base_point: Point,
    pub j: usize,
    pub k: u64,
    pub m: i64,
    /// `s_1 ... s_j`.
    #[serde(with = "serde_uint")]
    pub period: BigUint,
    #[serde(with = "serde_q")]
    pub value: Q,
    /// The point of `F_j(base_point)` carrying `value`.
    pub witness_point: Point,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "lowercase")]
pub enum DensityOutcome {
    Found(DensityWitness),
    Exhausted { bounds: SearchBounds },
}

impl DensityWitness {
    /// Rechecks every membership from scratch.
    pub fn verify(&self, space: &Space, c: &Q) -> bool {
        let s1 = rational::int(space.s().term(1) as i64);
        let lo = c * rational::int(self.k as i64) * &s1;
        let hi = &lo + c;
        let back = &self.value / c;
        let base_lo = rational::int(self.k as i64) * &s1;
        let agrees = (-(self.j as i64)..=self.base_point.support() as i64 + 1)
            .filter_map(Index::new)
            .all(|i| space.digit(&self.witness_point, i) == space.digit(&self.base_point, i));
        let step = Q::from_integer(BigInt::from(self.m)) * from_biguint(&self.period);
        self.period == space.s().partial_product(self.j)
            && agrees
            && self.witness_point.tail() == self.base_point.tail()
            && space.nu(&self.witness_point) == self.value
            && self.value == space.nu(&self.base_point) + step
            && lo <= self.value
            && self.value <= hi
            && base_lo <= back
            && back <= base_lo + Q::one()
    }
}

/// Searches depths `1..=max_depth` and returns the least witness in
/// `(j, k, m)` order.
pub fn density_witness(
    space: &Space,
    c: &Q,
    base: &Point,
    bounds: SearchBounds,
) -> Result<DensityOutcome> {
    for j in 1..=bounds.max_depth {
        if let Some(w) = density_witness_at_depth(space, c, base, j, bounds)? {
            return Ok(DensityOutcome::Found(w));
        }
    }
    Ok(DensityOutcome::Exhausted { bounds })
}

/// The least witness at depth `j` in `(k, m)` order, if any within bounds.
pub fn density_witness_at_depth(
    space: &Space,
    c: &Q,
    base: &Point,
    j: usize,
    bounds: SearchBounds,
) -> Result<Option<DensityWitness>> {
    if !c.is_positive() {
        return Err(Error::WrongShape(format!(
            "scaling {} is not positive",
            rational::to_string(c)
        )));
    }
    let period = space.s().partial_product(j);
    let period_q = from_biguint(&period);
    let s1 = rational::int(space.s().term(1) as i64);
    let nu = space.nu(base);

    // coordinates at -k for k > j may be lowered to 1, shifting nu by a
    // multiple of the period
    let deep: BigUint = base
        .left()
        .iter()
        .enumerate()
        .skip(j)
        .map(|(i, &d)| space.left_weight(i + 1) * (d - 1))
        .sum();
    let deep_units = (&deep / &period)
        .to_i64()
        .ok_or_else(|| Error::Overflow("deep digits".into()))?;
    let m_lo = -deep_units;

    for k in 0..=bounds.max_k {
        let lo = c * rational::int(k as i64) * &s1;
        let hi = &lo + c;
        let m_min = ((&lo - &nu) / &period_q).ceil().to_integer();
        let m = m_min.max(BigInt::from(m_lo));
        let Some(m) = m.to_i64() else { continue };
        if m > bounds.max_m {
            continue;
        }
        let value = &nu + Q::from_integer(BigInt::from(m)) * &period_q;
        if value > hi {
            continue;
        }
        let witness_point = shift_deep_digits(space, base, j, deep_units + m)?;
        return Ok(Some(DensityWitness {
            base_point: base.clone(),
            j,
            k,
            m,
            period,
            value,
            witness_point,
        }));
    }
    Ok(None)
}

/// `base` with the coordinates at `-j-1, -j-2, ...` replaced by the mixed
/// radix expansion of `units` (digit weights relative to `s_1 ... s_j`).
fn shift_deep_digits(space: &Space, base: &Point, j: usize, units: i64) -> Result<Point> {
    let mut left: Vec<u64> = (1..=j)
        .map(|k| base.left().get(k - 1).copied().unwrap_or(1))
        .collect();
    let mut rest = BigUint::from(units as u64);
    let mut k = j + 1;
    while !rest.is_zero() {
        let (q, d) = rest.div_rem(&BigUint::from(space.s().term(k)));
        left.push(d.to_u64().expect("digit") + 1);
        rest = q;
        k += 1;
    }
    space.point(left, base.right().to_vec(), base.tail())
}

/// Gap values `ℓ / m_k` with `ℓ m_k <= bound`, in increasing order.
pub fn gap_values(space: &Space, bound: u64) -> Vec<Q> {
    let bound = BigUint::from(bound);
    let mut values = std::collections::BTreeSet::new();
    for k in 1.. {
        let m = space.m(k);
        if m > bound {
            break;
        }
        let den = from_biguint(&m);
        let mut l = BigUint::one();
        while &l * &m <= bound {
            values.insert(from_biguint(&l) / &den);
            l += 1u32;
        }
    }
    values.into_iter().collect()
}

/// A gap value whose image under multiplication by `c` or by `1/c` is not a
/// valuation, if one exists within `bound`.
pub fn cone_violation(space: &Space, c: &Q, bound: u64) -> Option<(Q, Q)> {
    let inv = c.recip();
    gap_values(space, bound).into_iter().find_map(|v| {
        [c, &inv].into_iter().find_map(|f| {
            let image = f * &v;
            match space.value_to_points(&image) {
                Err(Error::NotRepresentable(_)) => Some((v.clone(), f.clone())),
                _ => None,
            }
        })
    })
}

/// The diagonal element implementing a diagonal-fixing automorphism
/// `γ(e_{i,i+1}) = e_{i,i+1} ⊗ u_i` of `T_r ⊗ C^m` as `γ(a) = u^{-1} a u`.
///
/// The fiber `C^m` is abelian, so an element of `T_r ⊗ C^m` is stored as `m`
/// elements of `T_r`, one per fiber coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InnerWitness {
    pub size: usize,
    pub fiber_dim: usize,
    /// `u_1, ..., u_{r-1}`, each a fiber tuple.
    pub offdiag: Vec<Vec<Coefficient>>,
    /// `u = sum_i e_ii ⊗ u_0 u_1 ... u_{i-1}`, per fiber coordinate.
    pub u: Vec<TriElement>,
    /// Largest squared modulus among the diagonal entries of `u`.
    #[serde(with = "serde_q")]
    pub max_modulus_sq: Q,
}

pub fn inner_witness(
    size: usize,
    fiber_dim: usize,
    offdiag: Vec<Vec<Coefficient>>,
) -> Result<InnerWitness> {
    if size == 0 || offdiag.len() + 1 != size {
        return Err(Error::SizeMismatch {
            expected: size.saturating_sub(1),
            actual: offdiag.len(),
        });
    }
    if let Some(bad) = offdiag.iter().position(|u| u.len() != fiber_dim) {
        return Err(Error::SizeMismatch {
            expected: fiber_dim,
            actual: offdiag[bad].len(),
        });
    }
    if let Some(i) = offdiag
        .iter()
        .position(|u| u.iter().any(Coefficient::is_zero))
    {
        return Err(Error::NotInvertible(format!(
            "u_{} has a zero fiber entry",
            i + 1
        )));
    }
    let mut u = Vec::with_capacity(fiber_dim);
    let mut max_modulus_sq = Q::zero();
    for f in 0..fiber_dim {
        let mut running = Coefficient::one();
        let mut diag = Vec::with_capacity(size);
        for i in 0..size {
            if i > 0 {
                running = &running * &offdiag[i - 1][f];
            }
            max_modulus_sq = max_modulus_sq.max(running.norm_sq());
            diag.push(running.clone());
        }
        u.push(TriElement::diagonal(diag));
    }
    Ok(InnerWitness {
        size,
        fiber_dim,
        offdiag,
        u,
        max_modulus_sq,
    })
}

impl InnerWitness {
    /// `γ(e_ij)` from multiplicativity: the product of `γ(e_{k,k+1})`.
    pub fn gamma(&self, e: MatrixUnit) -> Result<Vec<TriElement>> {
        (0..self.fiber_dim)
            .map(|f| {
                let start = TriElement::unit(MatrixUnit::new(e.row(), e.row(), self.size)?);
                (e.row()..e.col()).try_fold(start, |acc, k| {
                    let step = TriElement::scaled_unit(
                        MatrixUnit::new(k, k + 1, self.size)?,
                        self.offdiag[k - 1][f].clone(),
                    );
                    acc.mul(&step)
                })
            })
            .collect()
    }

    /// `u^{-1} e u`, per fiber coordinate.
    pub fn conjugate(&self, e: MatrixUnit) -> Result<Vec<TriElement>> {
        self.u
            .iter()
            .map(|uf| uf.diagonal_inverse()?.mul(&TriElement::unit(e))?.mul(uf))
            .collect()
    }

    /// Whether `u^{-1} e u = γ(e)` for every matrix unit of `T_r`.
    pub fn verify(&self) -> Result<bool> {
        for e in MatrixUnit::all(self.size) {
            if self.conjugate(e)? != self.gamma(e)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Outcome of the approximately-inner-but-not-inner computation on the
/// standard limit `lim (T_{2^n}, σ_2)` with `λ = ω`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparationReport {
    pub n: u32,
    pub m: u32,
    /// `d_m σ^{m-n}(a) d_m^{-1}`.
    pub stabilized: TriElement,
    /// Whether it equals `σ^{m-n}(d_n a d_n^{-1})`.
    pub stabilizes: bool,
    /// `min_i |ω - h_i h_{i+2^n}^{-1}|²` for the periodic diagonal `h`.
    #[serde(with = "serde_q")]
    pub separation_sq: Q,
    /// `min_i |α(e) - h e h^{-1}|²` over `e = e_{i, i+2^n}`, read off the
    /// actual conjugations.
    #[serde(with = "serde_q")]
    pub image_separation_sq: Q,
}

/// `d_n = λ e_11 + λ² e_22 + ... + λ^{2^n} e_{2^n, 2^n}` with `λ = ω`.
pub fn omega_diagonal(n: u32) -> TriElement {
    let w = Coefficient::omega();
    TriElement::diagonal((1..=1i64 << n).map(|i| w.pow(i).expect("ω is invertible")))
}

fn iterate_standard(a: &TriElement, times: u32) -> Result<TriElement> {
    (0..times).try_fold(a.clone(), |acc, _| {
        EmbeddingStep::standard(2, acc.size()).apply(&acc)
    })
}

/// Runs the check with `h = diag(1, 2, ..., 2^n)` carried to `T_{2^m}`.
pub fn remark2_check(n: u32, m: u32, a: MatrixUnit) -> Result<SeparationReport> {
    let h = TriElement::diagonal((1..=1i64 << n).map(|i| Coefficient::from_q(rational::int(i))));
    remark2_check_with(n, m, a, &h)
}

/// As [`remark2_check`] with an arbitrary invertible diagonal `h_n` of
/// `T_{2^n}`.
pub fn remark2_check_with(
    n: u32,
    m: u32,
    a: MatrixUnit,
    h_n: &TriElement,
) -> Result<SeparationReport> {
    if n < 1 || m <= n {
        return Err(Error::LevelOrder { n, m });
    }
    let small = 1usize << n;
    let big = 1usize << m;
    if a.size() != small {
        return Err(Error::SizeMismatch {
            expected: small,
            actual: a.size(),
        });
    }
    if h_n.size() != small || !h_n.is_diagonal() {
        return Err(Error::WrongShape("h must be diagonal in T_{2^n}".into()));
    }
    let a = TriElement::unit(a);
    let d_n = omega_diagonal(n);
    let d_m = omega_diagonal(m);
    let stabilized = iterate_standard(&a, m - n)?.conjugate_by_diagonal(&d_m)?;
    let stabilizes = stabilized == iterate_standard(&a.conjugate_by_diagonal(&d_n)?, m - n)?;

    let h = iterate_standard(h_n, m - n)?;
    let h_inv = h.diagonal_inverse()?;
    let lambda = Coefficient::omega();
    let mut separation_sq: Option<Q> = None;
    let mut image_separation_sq: Option<Q> = None;
    for i in 1..=big - small {
        let j = i + small;
        let ratio = &h.coefficient(i, i) * &h_inv.coefficient(j, j);
        let lit = (&lambda - &ratio).norm_sq();
        let e = TriElement::unit(MatrixUnit::new(i, j, big)?);
        let alpha_e = e.conjugate_by_diagonal(&d_m)?.coefficient(i, j);
        let inner_e = e.conjugate_by_diagonal(&h)?.coefficient(i, j);
        let img = (&alpha_e - &inner_e).norm_sq();
        separation_sq = Some(separation_sq.map_or(lit.clone(), |s| s.min(lit)));
        image_separation_sq = Some(image_separation_sq.map_or(img.clone(), |s| s.min(img)));
    }
    Ok(SeparationReport {
        n,
        m,
        stabilized,
        stabilizes,
        separation_sq: separation_sq.expect("m > n leaves room for a shift"),
        image_separation_sq: image_separation_sq.expect("m > n leaves room for a shift"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn cyc(c: &[u64]) -> SequenceProfile {
        SequenceProfile::new(vec![], c.to_vec()).unwrap()
    }

    fn space(r: &[u64], s: &[u64]) -> Space {
        Space::new(cyc(r), cyc(s))
    }

    #[test]
    fn out_rank_examples() {
        assert_eq!(
            out_rank(&cyc(&[2]), &cyc(&[3])),
            OutRank {
                d: 0,
                primes: vec![]
            }
        );
        assert_eq!(
            out_rank(&cyc(&[2]), &cyc(&[2])),
            OutRank {
                d: 1,
                primes: vec![2]
            }
        );
        assert_eq!(
            out_rank(&cyc(&[2, 3]), &cyc(&[6])),
            OutRank {
                d: 2,
                primes: vec![2, 3]
            }
        );
    }

    #[test]
    fn refactor_examples() {
        assert_eq!(refactor_products(&cyc(&[2]), 2).unwrap(), cyc(&[2]));
        assert_eq!(refactor_products(&cyc(&[6]), 2).unwrap(), cyc(&[2, 3]));
        assert_eq!(refactor_products(&cyc(&[4, 3]), 2).unwrap(), cyc(&[2, 6]));
        assert_eq!(
            refactor_products(&cyc(&[3]), 2),
            Err(Error::PrimeNotInfinite(2))
        );
    }

    #[test]
    fn refactor_keeps_supernatural_with_preamble() {
        let p = SequenceProfile::new(vec![4, 3], vec![5, 10]).unwrap();
        let q = refactor_products(&p, 5).unwrap();
        assert_eq!(
            Supernatural::from_profile(&q),
            Supernatural::from_profile(&p)
        );
        assert!((1..=40).step_by(2).all(|k| q.term(k) == 5));
    }

    #[test]
    fn refactor_large_residual_falls_back() {
        let p = cyc(&[999_983, 1_000_000]);
        let q = refactor_products(&p, 2).unwrap();
        assert_eq!(
            Supernatural::from_profile(&q),
            Supernatural::from_profile(&p)
        );
        assert!((1..=20).step_by(2).all(|k| q.term(k) == 2));
    }

    #[test]
    fn exponent_compose_examples() {
        let e = |v: &[(u64, i64)]| ExponentVector::new(v.iter().copied());
        assert!(exponent_compose(&e(&[(2, 1)]), &e(&[(2, -1)])).is_identity());
        assert_eq!(
            exponent_compose(&e(&[(2, 1)]), &e(&[(3, 2)])),
            e(&[(2, 1), (3, 2)])
        );
        let c = exponent_compose(&e(&[(2, 1), (3, 1)]), &e(&[(2, 2), (3, -1)]));
        assert_eq!(c, e(&[(2, 3)]));
        assert_eq!(c.scaling(), int(8));
    }

    #[test]
    fn exponent_vector_from_scaling() {
        let v = ExponentVector::from_scaling(&frac(12, 5)).unwrap();
        assert_eq!(v, ExponentVector::new([(2, 2), (3, 1), (5, -1)]));
        assert_eq!(v.scaling(), frac(12, 5));
        assert!(ExponentVector::from_scaling(&int(0)).is_err());
        assert!(ExponentVector::from_scaling(&int(1)).unwrap().is_identity());
    }

    #[test]
    fn alpha_examples() {
        let sp = space(&[2], &[2]);
        let half = ExponentVector::new([(2, -1)]);
        let x = sp.point(vec![], vec![2], Tail::Ones).unwrap();
        assert_eq!(
            alpha_on_point(&sp, &ExponentVector::identity(), &x).unwrap(),
            x
        );
        let y = alpha_on_point(&sp, &half, &x).unwrap();
        assert_eq!(y, sp.point(vec![], vec![1, 2], Tail::Ones).unwrap());
        assert_eq!(sp.nu(&y), frac(1, 4));
        let g = sp.point(vec![], vec![], Tail::Max).unwrap();
        let gy = alpha_on_point(&sp, &half, &g).unwrap();
        assert_eq!(gy, sp.point(vec![], vec![1], Tail::Max).unwrap());
        assert_eq!(sp.nu(&gy), frac(1, 2));
    }

    #[test]
    fn alpha_rejects_non_common_primes() {
        let sp = space(&[2], &[3]);
        let c = ExponentVector::new([(2, -1)]);
        assert_eq!(
            alpha_on_point(&sp, &c, &Point::all_ones()),
            Err(Error::InvalidScaling(2))
        );
    }

    #[test]
    fn gap_chart_examples() {
        let sp = space(&[2], &[2]);
        let g = sp.point(vec![], vec![], Tail::Max).unwrap();
        let chart = gap_chart(&sp, &g).unwrap();
        assert_eq!(
            (chart.t, chart.n.clone(), chart.c.clone()),
            (1, BigUint::one(), int(1))
        );
        let wide = gap_chart_at(&sp, &g, 2).unwrap();
        assert_eq!(wide.word, vec![1, 2]);
        assert_eq!((wide.n, wide.c), (BigUint::from(2u32), int(1)));
        let g2 = sp.point(vec![2], vec![2], Tail::Max).unwrap();
        let chart = gap_chart(&sp, &g2).unwrap();
        assert_eq!(chart.t, 2);
        assert_eq!(chart.word, vec![2, 2]);
        assert_eq!((chart.n, chart.c), (BigUint::from(4u32), int(2)));
        assert!(gap_chart(&sp, &Point::all_ones()).is_err());
        assert!(gap_chart_at(&sp, &g2, 1).is_err());
    }

    #[test]
    fn zigzag_examples() {
        let sys = DirectSystem::new(cyc(&[2]), cyc(&[2]));
        let sp = sys.space().clone();
        let one = Point::all_ones();
        assert_eq!(zigzag_image(2, &sys, &one, 2).unwrap(), one);
        let x = sp.point(vec![], vec![2], Tail::Ones).unwrap();
        let u = zigzag_image(2, &sys, &x, 2).unwrap();
        assert_eq!(u, sp.point(vec![], vec![1, 2], Tail::Ones).unwrap());
        let x = sp.point(vec![], vec![2, 2], Tail::Ones).unwrap();
        let u = zigzag_image(2, &sys, &x, 4).unwrap();
        assert_eq!(u, sp.point(vec![], vec![1, 2, 2], Tail::Ones).unwrap());
        assert_eq!(sp.nu(&u), frac(3, 8));
    }

    #[test]
    fn zigzag_errors() {
        let sys = DirectSystem::new(cyc(&[2]), cyc(&[2]));
        let sp = sys.space().clone();
        let x = sp.point(vec![2, 2, 2], vec![], Tail::Ones).unwrap();
        assert_eq!(
            zigzag_image(2, &sys, &x, 2),
            Err(Error::LevelTooSmall {
                support: 3,
                level: 2
            })
        );
        let sys3 = DirectSystem::new(cyc(&[2, 3]), cyc(&[2, 3]));
        assert!(matches!(
            zigzag_image(2, &sys3, &Point::all_ones(), 1),
            Err(Error::LevelNotAligned { .. })
        ));
    }

    #[test]
    fn density_example_invalid_scaling() {
        let sp = space(&[2], &[3]);
        let c = int(2);
        let base = Point::all_ones();
        let bounds = SearchBounds {
            max_depth: 2,
            max_k: 100,
            max_m: 100,
        };
        let w = density_witness_at_depth(&sp, &c, &base, 2, bounds)
            .unwrap()
            .unwrap();
        assert_eq!(w.period, BigUint::from(9u32));
        assert!(w.verify(&sp, &c));
        // the hand example m = 2, k = 3: 18 in [18, 20]
        let hand = DensityWitness {
            base_point: base.clone(),
            j: 2,
            k: 3,
            m: 2,
            period: BigUint::from(9u32),
            value: int(18),
            witness_point: sp.point(vec![1, 1, 3], vec![], Tail::Ones).unwrap(),
        };
        assert!(hand.verify(&sp, &c));
    }

    #[test]
    fn density_misses_some_base_points() {
        // nu(x) = 5/2: 5/2 + 3^j m is 5/2 or 11/2 mod 6, never in [6k, 6k + 2]
        let sp = space(&[2], &[3]);
        let base = sp.point(vec![3], vec![2], Tail::Ones).unwrap();
        assert_eq!(sp.nu(&base), frac(5, 2));
        let bounds = SearchBounds {
            max_depth: 6,
            max_k: 500,
            max_m: 500,
        };
        let out = density_witness(&sp, &int(2), &base, bounds).unwrap();
        assert_eq!(out, DensityOutcome::Exhausted { bounds });
    }

    #[test]
    fn density_identity_scaling_is_trivial() {
        let sp = space(&[2], &[3]);
        let base = sp.point(vec![1, 3], vec![2], Tail::Ones).unwrap();
        let out = density_witness(&sp, &int(1), &base, SearchBounds::default()).unwrap();
        let DensityOutcome::Found(w) = out else {
            panic!("expected a witness")
        };
        assert_eq!((w.j, w.k, w.m), (1, 0, -2));
        assert_eq!(w.value, frac(1, 2));
        assert_eq!(
            w.witness_point,
            sp.point(vec![], vec![2], Tail::Ones).unwrap()
        );
        assert!(w.verify(&sp, &int(1)));
    }

    #[test]
    fn density_valid_scaling_can_miss() {
        // nu(x) = 3: the progression 3 + 4m avoids [4k, 4k + 2]
        let sp = space(&[2], &[2]);
        let base = sp.point(vec![2, 2], vec![], Tail::Ones).unwrap();
        assert_eq!(sp.nu(&base), int(3));
        let bounds = SearchBounds {
            max_depth: 6,
            max_k: 200,
            max_m: 200,
        };
        for j in 2..=6 {
            assert!(density_witness_at_depth(&sp, &int(2), &base, j, bounds)
                .unwrap()
                .is_none());
        }
    }

    #[test]
    fn cone_checks() {
        let sp = space(&[2], &[3]);
        assert_eq!(
            cone_violation(&sp, &frac(1, 3), 100),
            Some((frac(1, 64), frac(1, 3)))
        );
        assert_eq!(
            cone_violation(&sp, &int(3), 100),
            Some((frac(1, 64), frac(1, 3)))
        );
        assert_eq!(cone_violation(&sp, &int(2), 1000), None);
        let sp = space(&[2], &[2]);
        assert_eq!(gap_values(&sp, 4), vec![frac(1, 4), frac(1, 2), int(1)]);
        assert_eq!(cone_violation(&sp, &int(2), 1000), None);
    }

    #[test]
    fn inner_witness_examples() {
        let q = |n: i64| Coefficient::from_q(int(n));
        let w = inner_witness(2, 1, vec![vec![q(2)]]).unwrap();
        assert_eq!(w.u[0], TriElement::diagonal([q(1), q(2)]));
        let e12 = MatrixUnit::new(1, 2, 2).unwrap();
        assert_eq!(
            w.conjugate(e12).unwrap()[0],
            TriElement::scaled_unit(e12, q(2))
        );
        assert!(w.verify().unwrap());

        let w = inner_witness(3, 1, vec![vec![q(2)], vec![q(3)]]).unwrap();
        assert_eq!(w.u[0], TriElement::diagonal([q(1), q(2), q(6)]));
        let e13 = MatrixUnit::new(1, 3, 3).unwrap();
        assert_eq!(w.gamma(e13).unwrap()[0], TriElement::scaled_unit(e13, q(6)));
        assert!(w.verify().unwrap());
        assert_eq!(w.max_modulus_sq, int(36));

        let w = inner_witness(2, 1, vec![vec![q(1)]]).unwrap();
        assert_eq!(w.u[0], TriElement::identity(2));
        assert!(matches!(
            inner_witness(2, 1, vec![vec![q(0)]]),
            Err(Error::NotInvertible(_))
        ));
    }

    #[test]
    fn stabilization_and_separation() {
        let e12 = MatrixUnit::new(1, 2, 2).unwrap();
        let rep = remark2_check(1, 2, e12).unwrap();
        assert!(rep.stabilizes);
        let w_inv = Coefficient::omega().inv().unwrap();
        let d1 = omega_diagonal(1);
        assert_eq!(
            TriElement::unit(e12).conjugate_by_diagonal(&d1).unwrap(),
            TriElement::scaled_unit(e12, w_inv.clone())
        );
        let expected = TriElement::scaled_unit(MatrixUnit::new(1, 2, 4).unwrap(), w_inv.clone())
            .add(&TriElement::scaled_unit(
                MatrixUnit::new(3, 4, 4).unwrap(),
                w_inv,
            ))
            .unwrap();
        assert_eq!(rep.stabilized, expected);
        assert_eq!(rep.separation_sq, int(3));
        assert_eq!(rep.image_separation_sq, int(3));

        let e11 = MatrixUnit::new(1, 1, 2).unwrap();
        let rep = remark2_check(1, 2, e11).unwrap();
        let diag = TriElement::unit(MatrixUnit::new(1, 1, 4).unwrap())
            .add(&TriElement::unit(MatrixUnit::new(3, 3, 4).unwrap()))
            .unwrap();
        assert_eq!(rep.stabilized, diag);
        assert_eq!(
            remark2_check(2, 2, MatrixUnit::new(1, 1, 4).unwrap())
                .unwrap_err()
                .name(),
            "LevelOrder"
        );
    }

    #[test]
    fn omega_has_no_power_of_two_order() {
        let w = Coefficient::omega();
        for k in 0..10 {
            assert_ne!(w.pow(1 << k).unwrap(), Coefficient::one());
        }
    }
}
