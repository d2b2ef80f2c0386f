//! Input generators for the property suites.

use bestmat::seqcore::{PmSequence, Symmetry};
use proptest::prelude::*;

use super::{row_from_bits, MaskClause};

pub const ORDERS: [usize; 6] = [3, 7, 13, 21, 31, 57];

pub fn order() -> impl Strategy<Value = usize> {
    prop::sample::select(ORDERS.to_vec())
}

pub fn symmetry() -> impl Strategy<Value = Symmetry> {
    prop::sample::select(vec![Symmetry::Skew, Symmetry::Symmetric])
}

pub fn row() -> impl Strategy<Value = PmSequence> {
    (order(), symmetry(), any::<u64>()).prop_map(|(n, s, bits)| row_from_bits(bits, s, n))
}

/// A row together with one of the divisors of its length.
pub fn row_and_divisor() -> impl Strategy<Value = (PmSequence, usize)> {
    (row(), any::<prop::sample::Index>()).prop_map(|(x, pick)| {
        let n = x.len();
        let divisors: Vec<usize> = (1..=n).filter(|d| n % d == 0).collect();
        let d = divisors[pick.index(divisors.len())];
        (x, d)
    })
}

pub fn clause(num_vars: usize) -> impl Strategy<Value = MaskClause> {
    prop::collection::vec((0..num_vars, any::<bool>()), 1..=3).prop_map(|lits| {
        lits.into_iter().fold((0u32, 0u32), |(p, n), (v, pos)| {
            // A variable appearing with both signs would make a tautology;
            // the first sign wins.
            if (p | n) >> v & 1 == 1 {
                (p, n)
            } else if pos {
                (p | 1 << v, n)
            } else {
                (p, n | 1 << v)
            }
        })
    })
}

/// Random CNFs over 1 to 22 variables around the 3-SAT threshold.
pub fn cnf() -> impl Strategy<Value = (usize, Vec<MaskClause>)> {
    (1usize..=22).prop_flat_map(|v| {
        let most = (3 * v + 4).min(90);
        (Just(v), prop::collection::vec(clause(v), 1..=most))
    })
}
