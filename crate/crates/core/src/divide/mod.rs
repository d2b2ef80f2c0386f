//! Divide phase: enumerate candidate first rows per role, compress them,
//! join compressions into quadruples satisfying the PSD equality and reduce
//! the result to one subproblem per equivalence class.

mod enumerate;
mod join;

use std::cmp::Ordering;
use std::fmt;

pub use enumerate::enumerate_candidates;
pub use join::{join_quadruples, JoinOutput};

use crate::designs::Quadruple;
use crate::equivalence::dedupe;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::seqcore::{CompressedSequence, OrderParams, PmSequence, Role};

/// Tolerance applied to every floating-point `PSD <= 4n` test.
pub const DEFAULT_EPSILON: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivideConfig {
    pub eps: f64,
    pub exec: Execution,
}

impl Default for DivideConfig {
    fn default() -> Self {
        DivideConfig {
            eps: DEFAULT_EPSILON,
            exec: Execution::default(),
        }
    }
}

/// A subproblem: compressions `(A, B, C, D)` whose autocorrelations sum to
/// `4n` at shift 0 and to 0 elsewhere.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CompressedQuadruple {
    seqs: [CompressedSequence; 4],
    params: OrderParams,
}

impl CompressedQuadruple {
    /// Validates lengths, compression factor and the exact PSD equality.
    pub fn new(seqs: [CompressedSequence; 4], params: OrderParams) -> Result<Self> {
        for (role, s) in Role::ALL.into_iter().zip(&seqs) {
            if s.len() != params.m() || s.factor() != params.d() {
                return Err(Error::InvalidSubproblem(format!(
                    "{role} is a length-{} compression by {}, expected length {} by {}",
                    s.len(),
                    s.factor(),
                    params.m(),
                    params.d()
                )));
            }
        }
        let q = CompressedQuadruple { seqs, params };
        if let Some((s, v)) = q.equality_defect() {
            return Err(Error::InvalidSubproblem(format!(
                "autocorrelation sum at shift {s} is {v}"
            )));
        }
        Ok(q)
    }

    pub(crate) fn from_parts(seqs: [CompressedSequence; 4], params: OrderParams) -> Self {
        CompressedQuadruple { seqs, params }
    }

    pub fn seqs(&self) -> &[CompressedSequence; 4] {
        &self.seqs
    }

    pub fn get(&self, role: Role) -> &CompressedSequence {
        &self.seqs[role.index()]
    }

    pub fn params(&self) -> &OrderParams {
        &self.params
    }

    pub fn paf_sums(&self) -> Vec<i64> {
        (0..self.params.m())
            .map(|s| self.seqs.iter().map(|x| x.paf(s)).sum())
            .collect()
    }

    /// First shift where the exact equality fails, if any.
    pub fn equality_defect(&self) -> Option<(usize, i64)> {
        let target = self.params.target();
        self.paf_sums()
            .into_iter()
            .enumerate()
            .find(|&(s, v)| v != if s == 0 { target } else { 0 })
    }

    /// With `d = 1` the subproblem already is a full candidate quadruple.
    pub fn is_complete(&self) -> bool {
        self.params.d() == 1
    }

    pub fn to_quadruple(&self) -> Result<Quadruple> {
        if !self.is_complete() {
            return Err(Error::InvalidSubproblem(
                "only d = 1 subproblems determine a quadruple".into(),
            ));
        }
        let mut rows = Vec::with_capacity(4);
        for (role, s) in Role::ALL.into_iter().zip(&self.seqs) {
            rows.push(PmSequence::new(s.entries().to_vec(), role.symmetry())?);
        }
        Quadruple::from_array(rows.try_into().expect("four rows"))
    }
}

impl Ord for CompressedQuadruple {
    fn cmp(&self, other: &Self) -> Ordering {
        self.seqs
            .iter()
            .zip(&other.seqs)
            .map(|(x, y)| x.cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    }
}

impl PartialOrd for CompressedQuadruple {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for CompressedQuadruple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.seqs;
        write!(f, "{a};{b};{c};{d}")
    }
}

/// Distinct compressions of the first rows that survive filtering and
/// reduction for one role.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSet {
    pub role: Role,
    /// Number of full first rows that passed the filters and reduction.
    pub survivors: u64,
    /// Their distinct compressions, sorted.
    pub compressions: Vec<CompressedSequence>,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.compressions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.compressions.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DivideStats {
    pub survivors: [u64; 4],
    pub pool_sizes: [usize; 4],
    pub ab_pairs: u64,
    pub cd_pairs: u64,
    pub joined: usize,
    pub classes: usize,
}

#[derive(Debug, Clone)]
pub struct DivideOutput {
    pub params: OrderParams,
    pub subproblems: Vec<CompressedQuadruple>,
    pub stats: DivideStats,
}

/// Full divide pipeline: candidates for every role, join, and reduction to
/// one canonical subproblem per class.
pub fn generate_subproblems(params: &OrderParams, cfg: &DivideConfig) -> Result<DivideOutput> {
    let a = enumerate_candidates(params, Role::A, cfg)?;
    let b = enumerate_candidates(params, Role::B, cfg)?;
    let c = CandidateSet {
        role: Role::C,
        ..b.clone()
    };
    let d = enumerate_candidates(params, Role::D, cfg)?;
    let joined = join_quadruples([&a, &b, &c, &d], params, cfg)?;
    let subproblems = dedupe(&joined.quads, cfg.exec);
    let stats = DivideStats {
        survivors: [a.survivors, b.survivors, c.survivors, d.survivors],
        pool_sizes: [a.len(), b.len(), c.len(), d.len()],
        ab_pairs: joined.ab_pairs,
        cd_pairs: joined.cd_pairs,
        joined: joined.quads.len(),
        classes: subproblems.len(),
    };
    Ok(DivideOutput {
        params: *params,
        subproblems,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cs(v: &[i8], d: usize) -> CompressedSequence {
        CompressedSequence::new(v.to_vec(), d).unwrap()
    }

    #[test]
    fn order_three_single_subproblem() {
        let p = OrderParams::from_n(3, Some(3)).unwrap();
        let out = generate_subproblems(&p, &DivideConfig::default()).unwrap();
        assert_eq!(out.subproblems.len(), 1);
        assert_eq!(out.subproblems[0].to_string(), "1;1;1;3");
    }

    #[test]
    fn quadruple_validation() {
        let p = OrderParams::from_n(3, Some(3)).unwrap();
        let ok = CompressedQuadruple::new([cs(&[1], 3), cs(&[1], 3), cs(&[1], 3), cs(&[3], 3)], p);
        assert!(ok.is_ok());
        let bad = CompressedQuadruple::new([cs(&[1], 3), cs(&[1], 3), cs(&[3], 3), cs(&[3], 3)], p);
        assert!(matches!(bad, Err(Error::InvalidSubproblem(_))));
        let wrong_len = CompressedQuadruple::new([cs(&[1, 1, 1], 1), cs(&[1], 3), cs(&[1], 3), cs(&[3], 3)], p);
        assert!(wrong_len.is_err());
    }

    #[test]
    fn complete_subproblems_convert() {
        let p = OrderParams::from_r(1, Some(1)).unwrap();
        let out = generate_subproblems(&p, &DivideConfig::default()).unwrap();
        assert!(!out.subproblems.is_empty());
        for s in &out.subproblems {
            assert!(s.is_complete());
            let q = s.to_quadruple().unwrap();
            assert!(crate::designs::verify_best(&q).ok);
        }
    }
}
