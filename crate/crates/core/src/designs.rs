//! Exact verification of best quadruples and the Goethals–Seidel
//! construction of skew Hadamard matrices from them.

use std::cmp::Ordering;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::seqcore::{PmSequence, Role, Symmetry};

pub use crate::search::count_inequivalent;

/// Four first rows `(A, B, C, D)` of common odd order; A, B, C skew and D
/// symmetric.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Quadruple {
    seqs: [PmSequence; 4],
}

impl Quadruple {
    pub fn new(a: PmSequence, b: PmSequence, c: PmSequence, d: PmSequence) -> Result<Self> {
        Self::from_array([a, b, c, d])
    }

    pub fn from_array(seqs: [PmSequence; 4]) -> Result<Self> {
        let n = seqs[0].len();
        for (role, s) in Role::ALL.into_iter().zip(&seqs) {
            if s.len() != n {
                return Err(Error::InvalidSequence(format!(
                    "{role} has length {}, expected {n}",
                    s.len()
                )));
            }
            if s.symmetry() != role.symmetry() {
                return Err(Error::InvalidSequence(format!("{role} must be {:?}", role.symmetry())));
            }
        }
        Ok(Quadruple { seqs })
    }

    /// Builds the quadruple from the free half rows of each member.
    pub fn from_halves(n: usize, halves: [&[i8]; 4]) -> Result<Self> {
        let mut out = Vec::with_capacity(4);
        for (role, half) in Role::ALL.into_iter().zip(halves) {
            out.push(PmSequence::complete_half(half, role.symmetry(), n)?);
        }
        let seqs: [PmSequence; 4] = out.try_into().expect("four roles");
        Ok(Quadruple { seqs })
    }

    pub fn order(&self) -> usize {
        self.seqs[0].len()
    }

    pub fn get(&self, role: Role) -> &PmSequence {
        &self.seqs[role.index()]
    }

    pub fn seqs(&self) -> &[PmSequence; 4] {
        &self.seqs
    }

    /// `sum_X paf(X, s)` for every shift `s`.
    pub fn paf_sums(&self) -> Vec<i64> {
        (0..self.order())
            .map(|s| self.seqs.iter().map(|x| x.paf(s)).sum())
            .collect()
    }
}

impl Ord for Quadruple {
    fn cmp(&self, other: &Self) -> Ordering {
        self.seqs
            .iter()
            .zip(&other.seqs)
            .map(|(x, y)| x.cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    }
}

impl PartialOrd for Quadruple {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BestReport {
    pub ok: bool,
    /// `(s, sum_X paf(X, s))` for every shift where the sum is wrong.
    pub failures: Vec<(usize, i64)>,
}

/// Checks `AA^T + BB^T + CC^T + DD^T = 4nI` in its circulant form, plus the
/// structural conditions (positive diagonal, symmetry classes).
pub fn verify_best(q: &Quadruple) -> BestReport {
    let n = q.order();
    let target = 4 * n as i64;
    let failures: Vec<(usize, i64)> = q
        .paf_sums()
        .into_iter()
        .enumerate()
        .filter(|&(s, v)| v != if s == 0 { target } else { 0 })
        .collect();
    let structure_ok = Role::ALL.into_iter().all(|role| {
        let x = q.get(role).entries();
        x[0] == 1
            && (1..n).all(|k| x[n - k] == role.symmetry().mirror(x[k]))
            && (role.symmetry() == q.get(role).symmetry())
    });
    BestReport {
        ok: structure_ok && failures.is_empty(),
        failures,
    }
}

/// Square ±1 matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HadamardMatrix {
    dim: usize,
    entries: Vec<i8>,
}

impl HadamardMatrix {
    pub fn new(dim: usize, entries: Vec<i8>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::InvalidParams(format!(
                "{} entries do not form a {dim}x{dim} matrix",
                entries.len()
            )));
        }
        if let Some(pos) = entries.iter().position(|&x| x != 1 && x != -1) {
            return Err(Error::InvalidSequence(format!(
                "entry ({}, {}) is not ±1",
                pos / dim,
                pos % dim
            )));
        }
        Ok(HadamardMatrix { dim, entries })
    }

    pub fn from_rows(rows: &[Vec<i8>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidParams("matrix is not square".into()));
        }
        Self::new(dim, rows.concat())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.entries[i * self.dim + j]
    }

    pub fn row(&self, i: usize) -> &[i8] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    /// One row per line, entries written as `+`/`-`.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.dim * (self.dim + 1));
        for i in 0..self.dim {
            out.extend(self.row(i).iter().map(|&x| if x > 0 { '+' } else { '-' }));
            out.push('\n');
        }
        out
    }

    /// Plain (P1) portable bitmap with `+1` drawn black.
    pub fn to_pbm(&self) -> String {
        let mut out = format!("P1\n{} {}\n", self.dim, self.dim);
        for i in 0..self.dim {
            let line: Vec<&str> = self.row(i).iter().map(|&x| if x > 0 { "1" } else { "0" }).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HadamardReport {
    pub orthogonal: bool,
    pub skew: bool,
}

impl HadamardReport {
    pub fn is_skew_hadamard(&self) -> bool {
        self.orthogonal && self.skew
    }
}

/// Exact integer check of `H H^T = dim I` and of skewness
/// (`h_ii = 1`, `h_ij = -h_ji` for `i != j`).
pub fn verify_hadamard(h: &HadamardMatrix) -> HadamardReport {
    let dim = h.dim();
    let orthogonal = (0..dim).all(|i| {
        (i..dim).all(|j| {
            let dot: i64 = h
                .row(i)
                .iter()
                .zip(h.row(j))
                .map(|(&x, &y)| i64::from(x) * i64::from(y))
                .sum();
            dot == if i == j { dim as i64 } else { 0 }
        })
    });
    let skew = (0..dim).all(|i| h.get(i, i) == 1 && (i + 1..dim).all(|j| h.get(i, j) == -h.get(j, i)));
    HadamardReport { orthogonal, skew }
}

#[derive(Clone, Copy)]
enum Block {
    /// Circulant `X`: `X[i][j] = x[j - i]`.
    Plain(Role),
    /// `X R` with `R` the back-diagonal matrix.
    Reflected(Role),
    /// `X^T R`.
    TransposeReflected(Role),
}

/// Builds the Goethals–Seidel array
///
/// ```text
/// [  A    BR    CR    DR  ]
/// [ -BR   A    D'R  -C'R  ]
/// [ -CR  -D'R   A    B'R  ]
/// [ -DR   C'R  -B'R   A   ]
/// ```
///
/// (`X'` the transpose, `R` the back-diagonal permutation) and certifies the
/// result before returning it.
pub fn goethals_seidel(q: &Quadruple) -> Result<HadamardMatrix> {
    let report = verify_best(q);
    if !report.ok {
        let (shift, value) = report.failures.first().copied().unwrap_or((0, 0));
        return Err(Error::Unverified { shift, value });
    }
    use Block::*;
    use Role::*;
    let layout: [[(i8, Block); 4]; 4] = [
        [(1, Plain(A)), (1, Reflected(B)), (1, Reflected(C)), (1, Reflected(D))],
        [
            (-1, Reflected(B)),
            (1, Plain(A)),
            (1, TransposeReflected(D)),
            (-1, TransposeReflected(C)),
        ],
        [
            (-1, Reflected(C)),
            (-1, TransposeReflected(D)),
            (1, Plain(A)),
            (1, TransposeReflected(B)),
        ],
        [
            (-1, Reflected(D)),
            (1, TransposeReflected(C)),
            (-1, TransposeReflected(B)),
            (1, Plain(A)),
        ],
    ];
    let n = q.order();
    let dim = 4 * n;
    let mut entries = vec![0i8; dim * dim];
    for (bi, block_row) in layout.iter().enumerate() {
        for (bj, &(sign, block)) in block_row.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    let v = match block {
                        Plain(r) => q.get(r).entries()[(j + n - i) % n],
                        Reflected(r) => q.get(r).entries()[(2 * n - 1 - i - j) % n],
                        TransposeReflected(r) => q.get(r).entries()[(i + j + 1) % n],
                    };
                    entries[(bi * n + i) * dim + bj * n + j] = sign * v;
                }
            }
        }
    }
    let h = HadamardMatrix::new(dim, entries)?;
    if !verify_hadamard(&h).is_skew_hadamard() {
        return Err(Error::ContractViolation(
            "Goethals-Seidel array failed certification".into(),
        ));
    }
    Ok(h)
}

/// The order-3 best quadruple `A = B = C = [+,-,+]`, `D = [+,+,+]`.
pub fn order_three_example() -> Quadruple {
    let a = PmSequence::parse_pm("+-+", Symmetry::Skew).expect("valid row");
    let d = PmSequence::parse_pm("+++", Symmetry::Symmetric).expect("valid row");
    Quadruple::new(a.clone(), a.clone(), a, d).expect("valid quadruple")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_three_is_best() {
        let q = order_three_example();
        assert!(verify_best(&q).ok);
    }

    #[test]
    fn wrong_d_fails_at_shift_one() {
        let q = order_three_example();
        let bad_d = PmSequence::parse_pm("+--", Symmetry::Symmetric).unwrap();
        let a = q.get(Role::A).clone();
        let q = Quadruple::new(a.clone(), a.clone(), a, bad_d).unwrap();
        let report = verify_best(&q);
        assert!(!report.ok);
        // Three skew rows contribute -1 each and D contributes -1 at s = 1.
        assert_eq!(report.failures, vec![(1, -4), (2, -4)]);
    }

    #[test]
    fn mismatched_lengths_rejected() {
        let a = PmSequence::parse_pm("+-+", Symmetry::Skew).unwrap();
        let d = PmSequence::parse_pm("+++++", Symmetry::Symmetric).unwrap();
        assert!(Quadruple::new(a.clone(), a.clone(), a.clone(), d).is_err());
        assert!(Quadruple::new(a.clone(), a.clone(), a.clone(), a).is_err());
    }

    #[test]
    fn small_hadamard_checks() {
        let one = HadamardMatrix::new(1, vec![1]).unwrap();
        assert!(verify_hadamard(&one).is_skew_hadamard());
        let two = HadamardMatrix::from_rows(&[vec![1, 1], vec![-1, 1]]).unwrap();
        assert!(verify_hadamard(&two).is_skew_hadamard());
        let sym = HadamardMatrix::from_rows(&[vec![1, 1], vec![1, -1]]).unwrap();
        let r = verify_hadamard(&sym);
        assert!(r.orthogonal && !r.skew);
        assert!(HadamardMatrix::new(1, vec![0]).is_err());
    }

    #[test]
    fn goethals_seidel_order_twelve() {
        let h = goethals_seidel(&order_three_example()).unwrap();
        assert_eq!(h.dim(), 12);
        assert!(verify_hadamard(&h).is_skew_hadamard());
        assert!(h.to_pbm().starts_with("P1\n12 12\n"));
        assert_eq!(h.to_text().lines().count(), 12);
    }

    #[test]
    fn goethals_seidel_rejects_unverified() {
        let q = order_three_example();
        let bad_d = PmSequence::parse_pm("+--", Symmetry::Symmetric).unwrap();
        let a = q.get(Role::A).clone();
        let q = Quadruple::new(a.clone(), a.clone(), a, bad_d).unwrap();
        assert!(matches!(goethals_seidel(&q), Err(Error::Unverified { .. })));
    }
}
