//! Eventually periodic multiplicity sequences and supernatural numbers.
//!
//! A [`SequenceProfile`] describes a sequence `(t_k)_{k >= 1}` of positive
//! integers as a finite preamble followed by a repeating cycle. The formal
//! product `t_1 t_2 ...` is a [`Supernatural`]: a prime occurs with infinite
//! multiplicity exactly when it divides some cycle entry.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest admissible profile entry; keeps trial division trivial.
pub const MAX_ENTRY: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawProfile", into = "RawProfile")]
pub struct SequenceProfile {
    preamble: Vec<u64>,
    cycle: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct RawProfile {
    #[serde(default)]
    preamble: Vec<u64>,
    cycle: Vec<u64>,
}

impl TryFrom<RawProfile> for SequenceProfile {
    type Error = Error;

    fn try_from(raw: RawProfile) -> Result<Self> {
        SequenceProfile::new(raw.preamble, raw.cycle)
    }
}

impl From<SequenceProfile> for RawProfile {
    fn from(p: SequenceProfile) -> Self {
        RawProfile {
            preamble: p.preamble,
            cycle: p.cycle,
        }
    }
}

impl SequenceProfile {
    pub fn new(preamble: Vec<u64>, cycle: Vec<u64>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::InvalidProfile("cycle is empty".into()));
        }
        for (name, list) in [("preamble", &preamble), ("cycle", &cycle)] {
            if let Some(bad) = list.iter().find(|&&t| t == 0 || t > MAX_ENTRY) {
                return Err(Error::InvalidProfile(format!(
                    "{name} entry {bad} outside 1..={MAX_ENTRY}"
                )));
            }
        }
        if cycle.iter().all(|&t| t == 1) {
            return Err(Error::InvalidProfile("cycle product is 1".into()));
        }
        Ok(Self { preamble, cycle })
    }

    /// The constant sequence `t, t, t, ...`.
    pub fn constant(t: u64) -> Result<Self> {
        Self::new(Vec::new(), vec![t])
    }

    pub fn preamble(&self) -> &[u64] {
        &self.preamble
    }

    pub fn cycle(&self) -> &[u64] {
        &self.cycle
    }

    /// `t_k` for `k >= 1`.
    ///
    /// # Panics
    ///
    /// Panics if `k == 0`.
    pub fn term(&self, k: usize) -> u64 {
        assert!(k >= 1, "sequence terms are indexed from 1");
        let i = k - 1;
        if i < self.preamble.len() {
            self.preamble[i]
        } else {
            self.cycle[(i - self.preamble.len()) % self.cycle.len()]
        }
    }

    /// `m_k = t_1 ... t_k`, with `m_0 = 1`.
    pub fn partial_product(&self, k: usize) -> BigUint {
        (1..=k).fold(BigUint::one(), |acc, i| acc * self.term(i))
    }

    /// Product of one full cycle, if it fits in a `u64`.
    pub fn cycle_product(&self) -> Option<u64> {
        self.cycle
            .iter()
            .try_fold(1u64, |acc, &t| acc.checked_mul(t))
    }

    /// Same sequence with the shortest cycle and the shortest preamble.
    pub fn canonical(&self) -> Self {
        let n = self.cycle.len();
        let period = (1..=n)
            .find(|&p| n.is_multiple_of(p) && (p..n).all(|i| self.cycle[i] == self.cycle[i - p]))
            .unwrap_or(n);
        let mut cycle = self.cycle[..period].to_vec();
        let mut preamble = self.preamble.clone();
        while let Some(&last) = preamble.last() {
            if last != *cycle.last().unwrap() {
                break;
            }
            preamble.pop();
            cycle.rotate_right(1);
        }
        Self { preamble, cycle }
    }
}

impl fmt::Display for SequenceProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}({:?})*", self.preamble, self.cycle)
    }
}

/// Prime factorization by trial division.
pub fn factorize(mut n: u64) -> BTreeMap<u64, u32> {
    let mut out = BTreeMap::new();
    let mut p = 2u64;
    while p * p <= n {
        while n.is_multiple_of(p) {
            *out.entry(p).or_insert(0) += 1;
            n /= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        *out.entry(n).or_insert(0) += 1;
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n).get(&n) == Some(&1)
}

/// Multiplicity of a prime in a supernatural number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Multiplicity {
    Finite(u32),
    Infinite,
}

/// A generalized integer `prod p^{n_p}` with `n_p` in `N ∪ {∞}`, supported on
/// finitely many primes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Supernatural {
    finite: BTreeMap<u64, u32>,
    infinite: BTreeSet<u64>,
}

impl Supernatural {
    pub fn new(finite: BTreeMap<u64, u32>, infinite: BTreeSet<u64>) -> Result<Self> {
        if let Some(p) = finite
            .keys()
            .chain(infinite.iter())
            .find(|&&p| !is_prime(p))
        {
            return Err(Error::InvalidSupernatural(format!("{p} is not prime")));
        }
        if let Some(p) = finite.keys().find(|p| infinite.contains(p)) {
            return Err(Error::InvalidSupernatural(format!(
                "{p} is both finite and infinite"
            )));
        }
        let finite = finite.into_iter().filter(|&(_, e)| e > 0).collect();
        Ok(Self { finite, infinite })
    }

    /// The formal product of all terms of `profile`.
    pub fn from_profile(profile: &SequenceProfile) -> Self {
        let infinite: BTreeSet<u64> = profile
            .cycle()
            .iter()
            .flat_map(|&t| factorize(t).into_keys())
            .collect();
        let mut finite = BTreeMap::new();
        for &t in profile.preamble() {
            for (p, e) in factorize(t) {
                if !infinite.contains(&p) {
                    *finite.entry(p).or_insert(0) += e;
                }
            }
        }
        Self { finite, infinite }
    }

    pub fn finite_part(&self) -> &BTreeMap<u64, u32> {
        &self.finite
    }

    pub fn infinite_primes(&self) -> &BTreeSet<u64> {
        &self.infinite
    }

    pub fn multiplicity(&self, p: u64) -> Multiplicity {
        if self.infinite.contains(&p) {
            Multiplicity::Infinite
        } else {
            Multiplicity::Finite(self.finite.get(&p).copied().unwrap_or(0))
        }
    }

    fn support(&self) -> impl Iterator<Item = u64> + '_ {
        self.finite.keys().chain(self.infinite.iter()).copied()
    }

    /// `self | other`: every multiplicity of `self` is at most that of `other`.
    pub fn divides(&self, other: &Supernatural) -> bool {
        self.support()
            .all(|p| self.multiplicity(p) <= other.multiplicity(p))
    }

    /// Whether `m * self = n * other` for some positive integers `m`, `n`.
    /// For finitely supported values this is equality of the infinite parts.
    pub fn finitely_equivalent(&self, other: &Supernatural) -> bool {
        self.infinite == other.infinite
    }
}

impl fmt::Display for Supernatural {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut primes: Vec<u64> = self.support().collect();
        primes.sort_unstable();
        if primes.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = primes
            .into_iter()
            .map(|p| match self.multiplicity(p) {
                Multiplicity::Infinite => format!("{p}^inf"),
                Multiplicity::Finite(e) => format!("{p}^{e}"),
            })
            .collect();
        f.write_str(&parts.join(" * "))
    }
}

/// Primes of infinite multiplicity in both `r` and `s`, ascending.
pub fn common_infinite_primes(r: &Supernatural, s: &Supernatural) -> Vec<u64> {
    r.infinite.intersection(&s.infinite).copied().collect()
}
