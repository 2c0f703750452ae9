use std::fmt;

use num_traits::{Signed, Zero};

use super::CornersError;
use crate::Rational;

/// One term `ρ^z log^k ρ` of a polyhomogeneous expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexTerm {
    pub z: Rational,
    pub k: u32,
}

impl IndexTerm {
    pub fn new(z: impl Into<Rational>, k: u32) -> Self {
        IndexTerm { z: z.into(), k }
    }

    /// `other` generates `self`: same residue class mod 1, `self` lies an
    /// integer step above it, and carries no more logs.
    fn is_dominated_by(&self, other: &IndexTerm) -> bool {
        is_natural(self.z - other.z) && self.k <= other.k
    }
}

impl fmt::Display for IndexTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.z, self.k)
    }
}

/// Leading order of an index set; the empty set has order `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Order {
    Finite(Rational),
    Infinite,
}

impl Order {
    pub fn finite(self) -> Option<Rational> {
        match self {
            Order::Finite(z) => Some(z),
            Order::Infinite => None,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(z) => write!(f, "{z}"),
            Order::Infinite => f.write_str("+inf"),
        }
    }
}

/// A smooth index set, stored by its minimal generators.
///
/// `(z, k)` is a member iff some generator `(z0, k0)` has `z - z0 ∈ ℕ` and
/// `k <= k0`. Generators are kept sorted by `(z, k)` with dominated ones
/// removed, so structural equality is semantic equality. No generators means
/// the empty index set `∞`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IndexSet {
    generators: Vec<IndexTerm>,
}

pub(crate) fn is_natural(r: Rational) -> bool {
    r.is_integer() && !r.is_negative()
}

impl IndexSet {
    /// The empty index set `∞`.
    pub fn empty() -> Self {
        IndexSet { generators: Vec::new() }
    }

    /// `ℕ = {(n, 0)}`, the index set of smooth functions.
    pub fn naturals() -> Self {
        Self::shifted_naturals(Rational::zero())
    }

    /// `z + ℕ`.
    pub fn shifted_naturals(z: impl Into<Rational>) -> Self {
        IndexSet { generators: vec![IndexTerm::new(z, 0)] }
    }

    pub fn from_generators(terms: impl IntoIterator<Item = IndexTerm>) -> Self {
        let mut terms: Vec<IndexTerm> = terms.into_iter().collect();
        terms.sort();
        terms.dedup();
        let canonical = terms
            .iter()
            .enumerate()
            .filter(|(i, t)| {
                !terms
                    .iter()
                    .enumerate()
                    .any(|(j, other)| j != *i && t.is_dominated_by(other))
            })
            .map(|(_, t)| *t)
            .collect();
        IndexSet { generators: canonical }
    }

    pub fn generators(&self) -> &[IndexTerm] {
        &self.generators
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Multiply by `ρ^q`: every exponent moves by `q`.
    pub fn shift(&self, q: Rational) -> Self {
        IndexSet {
            generators: self
                .generators
                .iter()
                .map(|t| IndexTerm { z: t.z + q, k: t.k })
                .collect(),
        }
    }

    /// Largest log power attached to exponent `z`, if `z` occurs at all.
    pub fn max_log_power(&self, z: Rational) -> Option<u32> {
        self.generators
            .iter()
            .filter(|g| is_natural(z - g.z))
            .map(|g| g.k)
            .max()
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("∞");
        }
        f.write_str("<")?;
        for (i, g) in self.generators.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{g}")?;
        }
        f.write_str(">")
    }
}

pub fn member(set: &IndexSet, z: Rational, k: u32) -> bool {
    set.max_log_power(z).is_some_and(|kmax| k <= kmax)
}

pub fn inf_order(set: &IndexSet) -> Order {
    // Canonical generators are sorted, so the first one carries the infimum.
    set.generators
        .first()
        .map_or(Order::Infinite, |g| Order::Finite(g.z))
}

/// Minkowski sum with additive log powers. `∞` absorbs.
pub fn sum_sets(a: &IndexSet, b: &IndexSet) -> IndexSet {
    IndexSet::from_generators(a.generators.iter().flat_map(|x| {
        b.generators.iter().map(move |y| IndexTerm {
            z: x.z + y.z,
            k: x.k + y.k,
        })
    }))
}

/// `{(q z, k) : (z, k) ∈ E} + ℕ` for `q > 0`.
///
/// With `q = p/r` in lowest terms, the translates `q(z + i)` for `i < r`
/// cover every residue the image reaches, so they generate the closure.
pub fn scale_set(q: Rational, set: &IndexSet) -> Result<IndexSet, CornersError> {
    if !q.is_positive() {
        return Err(CornersError::NonPositiveScale(q));
    }
    let r = *q.denom();
    Ok(IndexSet::from_generators(set.generators.iter().flat_map(|g| {
        (0..r).map(move |i| IndexTerm { z: (g.z + i) * q, k: g.k })
    })))
}

/// `E ∪̄ F = E ∪ F ∪ {(z, k+l+1) : (z,k) ∈ E, (z,l) ∈ F}`.
///
/// On generators: a pair whose exponents differ by an integer first meets at
/// the larger exponent, where it contributes `k + l + 1` logs.
pub fn extended_union(a: &IndexSet, b: &IndexSet) -> IndexSet {
    let overlaps = a.generators.iter().flat_map(|x| {
        b.generators
            .iter()
            .filter(move |y| (x.z - y.z).is_integer())
            .map(move |y| IndexTerm {
                z: x.z.max(y.z),
                k: x.k + y.k + 1,
            })
    });
    IndexSet::from_generators(
        a.generators
            .iter()
            .chain(b.generators.iter())
            .copied()
            .chain(overlaps),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn int(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn member_examples() {
        let n = IndexSet::naturals();
        assert!(member(&n, int(3), 0));
        assert!(!member(&n, int(-1), 0));
        let e = IndexSet::from_generators([IndexTerm::new(2, 1)]);
        assert!(member(&e, int(5), 0));
        assert!(!member(&e, int(2), 2));
        assert!(member(&e, int(2), 1));
        assert!(!member(&e, q(5, 2), 0));
    }

    #[test]
    fn inf_order_examples() {
        assert_eq!(inf_order(&IndexSet::naturals()), Order::Finite(int(0)));
        assert_eq!(inf_order(&IndexSet::empty()), Order::Infinite);
        let e = IndexSet::from_generators([IndexTerm::new(2, 1), IndexTerm::new(q(3, 2), 0)]);
        assert_eq!(inf_order(&e), Order::Finite(q(3, 2)));
        assert!(Order::Finite(int(1000)) < Order::Infinite);
    }

    #[test]
    fn canonical_form_prunes_dominated() {
        let e = IndexSet::from_generators([
            IndexTerm::new(2, 0),
            IndexTerm::new(0, 0),
            IndexTerm::new(2, 1),
            IndexTerm::new(0, 0),
        ]);
        assert_eq!(e.generators(), &[IndexTerm::new(0, 0), IndexTerm::new(2, 1)]);
        // same residue but higher exponent and more logs is not dominated
        let f = IndexSet::from_generators([IndexTerm::new(1, 0), IndexTerm::new(0, 1)]);
        assert_eq!(f.generators(), &[IndexTerm::new(0, 1)]);
    }

    #[test]
    fn sum_examples() {
        let n = IndexSet::naturals();
        assert_eq!(sum_sets(&n, &n), n);
        let a = IndexSet::shifted_naturals(1);
        let b = IndexSet::shifted_naturals(q(1, 2));
        assert_eq!(sum_sets(&a, &b), IndexSet::shifted_naturals(q(3, 2)));
        assert!(sum_sets(&a, &IndexSet::empty()).is_empty());
    }

    #[test]
    fn scale_examples() {
        let s = scale_set(int(2), &IndexSet::shifted_naturals(1)).unwrap();
        assert_eq!(s.generators(), &[IndexTerm::new(2, 0)]);
        assert!(member(&s, int(3), 0));
        let half = scale_set(q(1, 2), &IndexSet::from_generators([IndexTerm::new(1, 2)])).unwrap();
        assert_eq!(half.generators(), &[IndexTerm::new(q(1, 2), 2), IndexTerm::new(1, 2)]);
        let three_halves = scale_set(q(3, 2), &IndexSet::naturals()).unwrap();
        assert!(member(&three_halves, q(3, 2), 0));
        assert!(!member(&three_halves, q(1, 2), 0));
        assert_eq!(
            scale_set(int(0), &IndexSet::naturals()),
            Err(CornersError::NonPositiveScale(int(0)))
        );
        assert!(scale_set(int(-1), &IndexSet::naturals()).is_err());
    }

    #[test]
    fn extended_union_examples() {
        let zero = IndexSet::naturals();
        let inf = IndexSet::empty();
        assert_eq!(extended_union(&extended_union(&zero, &inf), &inf), zero);
        assert_eq!(
            extended_union(&zero, &zero).generators(),
            &[IndexTerm::new(0, 1)]
        );
        // (0,0) is absorbed by (0,1): the pair rule dominates the plain union
        assert!(member(&extended_union(&zero, &zero), int(0), 0));
        let u = extended_union(&IndexSet::shifted_naturals(1), &IndexSet::shifted_naturals(q(3, 2)));
        assert_eq!(u.generators(), &[IndexTerm::new(1, 0), IndexTerm::new(q(3, 2), 0)]);
    }

    #[test]
    fn extended_union_trace_case() {
        // (2 + ℕ) ∪̄ ℕ: logs start where both sets overlap
        let u = extended_union(&IndexSet::shifted_naturals(2), &IndexSet::naturals());
        assert_eq!(u.generators(), &[IndexTerm::new(0, 0), IndexTerm::new(2, 1)]);
        assert!(!member(&u, int(1), 1));
        assert!(member(&u, int(3), 1));
    }

    #[test]
    fn shift_and_display() {
        let e = IndexSet::naturals().shift(q(-1, 2));
        assert_eq!(inf_order(&e), Order::Finite(q(-1, 2)));
        assert_eq!(e.to_string(), "<(-1/2,0)>");
        assert_eq!(IndexSet::empty().to_string(), "∞");
    }
}
