//! The equivalence group on quadruples and canonical-form isomorph rejection.
//!
//! The group is generated by reordering A, B, C; negating the indices of
//! one of A, B, C (`i -> -i mod n`); and applying a unit `t` of Z_n to the
//! indices of all four rows at once. Every element can be written as
//! "multiply the indices of member `p` by `±t`, then permute A, B, C", so an
//! orbit has at most `6 * 8 * phi(n)` members and is enumerated directly.
//! Cyclic shifts are not part of the group: they break skewness.

use std::cmp::Ordering;

use crate::designs::Quadruple;
use crate::divide::CompressedQuadruple;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::seqcore::{CompressedSequence, PmSequence, Role};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EquivalenceOp {
    /// Position `p` of the result takes member `perm[p]` of the input.
    ReorderAbc([usize; 3]),
    /// `X -> X o f` with `f(i) = -i mod n`; a no-op on the symmetric D.
    NegateIndices(Role),
    /// Simultaneous `i -> t i mod n` on all members; `t` must be a unit.
    Automorphism(usize),
}

pub fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Units of Z_n (for `n = 1` the single residue 0).
pub fn units(n: usize) -> Vec<usize> {
    if n <= 1 {
        return vec![0];
    }
    (1..n).filter(|&t| gcd(t, n) == 1).collect()
}

/// Residues mod `len` of the units of Z_`parent`, deduplicated. These are
/// the distinct automorphism actions on a `parent / len` compression.
pub fn induced_units(parent: usize, len: usize) -> Vec<usize> {
    let mut out: Vec<usize> = units(parent).into_iter().map(|t| t % len).collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn index_map(mult: usize, len: usize) -> Vec<usize> {
    (0..len).map(|i| mult * i % len).collect()
}

/// Common view of full and compressed quadruples.
pub trait Orbit: Sized + Clone + Ord {
    fn apply(&self, op: &EquivalenceOp) -> Result<Self>;
    fn canonical_form(&self) -> Self;
}

fn check_perm(perm: &[usize; 3]) -> Result<()> {
    let mut seen = [false; 3];
    for &p in perm {
        if p > 2 || seen[p] {
            return Err(Error::InvalidOp(format!("{perm:?} is not a permutation of A, B, C")));
        }
        seen[p] = true;
    }
    Ok(())
}

fn negate_target(role: Role) -> Result<usize> {
    match role {
        Role::D => Err(Error::InvalidOp("index negation applies to A, B or C".into())),
        r => Ok(r.index()),
    }
}

/// Applies `op` to four rows of length `len` that live in Z_`parent`.
fn apply_generic<S: Clone>(
    seqs: &[S; 4],
    op: &EquivalenceOp,
    len: usize,
    parent: usize,
    permute: impl Fn(&S, &[usize]) -> S,
) -> Result<[S; 4]> {
    let mut out = seqs.clone();
    match *op {
        EquivalenceOp::ReorderAbc(perm) => {
            check_perm(&perm)?;
            for p in 0..3 {
                out[p] = seqs[perm[p]].clone();
            }
        }
        EquivalenceOp::NegateIndices(role) => {
            let idx = negate_target(role)?;
            out[idx] = permute(&seqs[idx], &index_map(len - 1, len));
        }
        EquivalenceOp::Automorphism(t) => {
            if parent > 1 && gcd(t % parent, parent) != 1 {
                return Err(Error::InvalidOp(format!("{t} is not a unit mod {parent}")));
            }
            let map = index_map(t % len.max(1), len);
            for (slot, s) in out.iter_mut().zip(seqs) {
                *slot = permute(s, &map);
            }
        }
    }
    Ok(out)
}

/// One group element in normal form: member `perm[p]` with indices
/// multiplied by `mult[p]` lands in position `p` (D keeps position 3).
#[derive(Debug, Clone, Copy)]
struct Transform {
    perm: [usize; 3],
    mult: [usize; 4],
}

const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

struct OrbitScan<'a> {
    seqs: [&'a [i8]; 4],
    len: usize,
}

impl<'a> OrbitScan<'a> {
    fn new(seqs: [&'a [i8]; 4], len: usize) -> Self {
        OrbitScan { seqs, len }
    }

    #[inline]
    fn entry(&self, t: &Transform, pos: usize, i: usize) -> i8 {
        let src = if pos == 3 { 3 } else { t.perm[pos] };
        self.seqs[src][t.mult[pos] * i % self.len]
    }

    /// Lexicographic comparison of two transformed quadruples with `+ < -`
    /// (larger entries first), evaluated lazily.
    fn compare(&self, x: &Transform, y: &Transform) -> Ordering {
        for pos in 0..4 {
            for i in 0..self.len {
                let (a, b) = (self.entry(x, pos, i), self.entry(y, pos, i));
                if a != b {
                    return b.cmp(&a);
                }
            }
        }
        Ordering::Equal
    }

    fn minimum(&self, units: &[usize]) -> Transform {
        let neg = |u: usize| (self.len - u) % self.len;
        let mut best = Transform {
            perm: PERMS[0],
            mult: [1 % self.len; 4],
        };
        for &t in units {
            for perm in PERMS {
                for mask in 0..8u8 {
                    let mut mult = [t; 4];
                    for (p, slot) in mult.iter_mut().take(3).enumerate() {
                        if mask >> perm[p] & 1 == 1 {
                            *slot = neg(t);
                        }
                    }
                    let cand = Transform { perm, mult };
                    if self.compare(&cand, &best) == Ordering::Less {
                        best = cand;
                    }
                }
            }
        }
        best
    }

    fn materialize<S>(&self, t: &Transform, src: &[S; 4], permute: impl Fn(&S, &[usize]) -> S) -> [S; 4] {
        std::array::from_fn(|pos| {
            let from = if pos == 3 { 3 } else { t.perm[pos] };
            permute(&src[from], &index_map(t.mult[pos], self.len))
        })
    }
}

impl Orbit for Quadruple {
    fn apply(&self, op: &EquivalenceOp) -> Result<Self> {
        let n = self.order();
        let seqs = apply_generic(self.seqs(), op, n, n, PmSequence::permuted)?;
        Quadruple::from_array(seqs)
    }

    fn canonical_form(&self) -> Self {
        let n = self.order();
        let s = self.seqs();
        let scan = OrbitScan::new(std::array::from_fn(|i| s[i].entries()), n);
        let best = scan.minimum(&units(n));
        let seqs = scan.materialize(&best, s, PmSequence::permuted);
        Quadruple::from_array(seqs).expect("group action keeps symmetry classes")
    }
}

impl Orbit for CompressedQuadruple {
    fn apply(&self, op: &EquivalenceOp) -> Result<Self> {
        let p = *self.params();
        let seqs = apply_generic(self.seqs(), op, p.m(), p.n(), CompressedSequence::permuted)?;
        Ok(CompressedQuadruple::from_parts(seqs, p))
    }

    fn canonical_form(&self) -> Self {
        let p = *self.params();
        let s = self.seqs();
        let scan = OrbitScan::new(std::array::from_fn(|i| s[i].entries()), p.m());
        let best = scan.minimum(&induced_units(p.n(), p.m()));
        let seqs = scan.materialize(&best, s, CompressedSequence::permuted);
        CompressedQuadruple::from_parts(seqs, p)
    }
}

/// One representative (the canonical form) per orbit, sorted.
pub fn dedupe<T: Orbit + Send + Sync>(items: &[T], exec: Execution) -> Vec<T> {
    let mut out = exec.map(items, |q| q.canonical_form());
    out.sort_unstable();
    out.dedup();
    out
}
