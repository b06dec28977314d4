//! Exact sparse Gauss-Jordan elimination over the rationals.
//!
//! Rows are inserted one at a time and the basis is kept in reduced row
//! echelon form, so a redundant row is detected after touching only the
//! pivot columns it contains.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::Q;

#[derive(Debug, Clone)]
struct Row {
    coeffs: BTreeMap<usize, Q>,
    rhs: Q,
}

impl Row {
    fn axpy(&mut self, factor: &Q, other: &Row) {
        for (&c, v) in &other.coeffs {
            let entry = self.coeffs.entry(c).or_insert_with(Q::zero);
            *entry -= factor * v;
            if entry.is_zero() {
                self.coeffs.remove(&c);
            }
        }
        self.rhs -= factor * &other.rhs;
    }
}

/// Incrementally built linear system `A x = b` in `ncols` unknowns.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    ncols: usize,
    pivots: BTreeMap<usize, Row>,
    consistent: bool,
}

impl ReducedSystem {
    pub fn new(ncols: usize) -> Self {
        Self {
            ncols,
            pivots: BTreeMap::new(),
            consistent: true,
        }
    }

    /// Adds the equation `sum coeffs = rhs`. Returns `true` if the rank grew.
    ///
    /// # Panics
    ///
    /// Panics if a column index is out of range.
    pub fn push<I>(&mut self, coeffs: I, rhs: Q) -> bool
    where
        I: IntoIterator<Item = (usize, Q)>,
    {
        let mut row = Row {
            coeffs: BTreeMap::new(),
            rhs,
        };
        for (c, v) in coeffs {
            assert!(c < self.ncols, "column {c} out of range");
            let entry = row.coeffs.entry(c).or_insert_with(Q::zero);
            *entry += v;
            if entry.is_zero() {
                row.coeffs.remove(&c);
            }
        }
        let hits: Vec<usize> = row
            .coeffs
            .keys()
            .filter(|c| self.pivots.contains_key(c))
            .copied()
            .collect();
        for c in hits {
            let factor = row.coeffs[&c].clone();
            row.axpy(&factor, &self.pivots[&c]);
        }
        let Some((&pivot, lead)) = row.coeffs.iter().next() else {
            if !row.rhs.is_zero() {
                self.consistent = false;
            }
            return false;
        };
        let inv = lead.recip();
        for v in row.coeffs.values_mut() {
            *v *= &inv;
        }
        row.rhs *= &inv;
        for other in self.pivots.values_mut() {
            if let Some(factor) = other.coeffs.get(&pivot).cloned() {
                other.axpy(&factor, &row);
            }
        }
        self.pivots.insert(pivot, row);
        true
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn nullity(&self) -> usize {
        self.ncols - self.rank()
    }

    pub fn is_consistent(&self) -> bool {
        self.consistent
    }

    /// Basis of the homogeneous solution space, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<Q>> {
        (0..self.ncols)
            .filter(|c| !self.pivots.contains_key(c))
            .map(|free| {
                let mut v = vec![Q::zero(); self.ncols];
                v[free] = Q::one();
                for (&p, row) in &self.pivots {
                    if let Some(a) = row.coeffs.get(&free) {
                        v[p] = -a.clone();
                    }
                }
                v
            })
            .collect()
    }

    /// The solution when the system is consistent and of full column rank.
    pub fn unique_solution(&self) -> Option<Vec<Q>> {
        if !self.consistent || self.nullity() != 0 {
            return None;
        }
        Some(self.pivots.values().map(|row| row.rhs.clone()).collect())
    }
}
