//! The full pipeline: divide, encode every subproblem, enumerate its models
//! under the PSD callback, verify and reduce to equivalence classes.
//!
//! With a status directory each finished subproblem is recorded in its own
//! file (written to a temporary name and renamed), so an interrupted search
//! can resume without redoing completed work.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use crate::cdcl::{enumerate_all, PsdCriterion, SolverConfig, SolverStats};
use crate::designs::{verify_best, Quadruple};
use crate::divide::{generate_subproblems, CompressedQuadruple, DivideConfig, DivideStats, DEFAULT_EPSILON};
use crate::encode::{build_instance, decode_model};
use crate::equivalence::dedupe;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::formats::{read_solutions, write_solutions};
use crate::seqcore::OrderParams;

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub eps: f64,
    pub exec: Execution,
    pub limit_per_subproblem: Option<Duration>,
    pub solver: SolverConfig,
    /// Directory for per-subproblem status files.
    pub status_dir: Option<PathBuf>,
    /// Reuse completed status files found in `status_dir`.
    pub resume: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            eps: DEFAULT_EPSILON,
            exec: Execution::default(),
            limit_per_subproblem: None,
            solver: SolverConfig::default(),
            status_dir: None,
            resume: false,
        }
    }
}

impl SearchConfig {
    fn divide_config(&self) -> DivideConfig {
        DivideConfig {
            eps: self.eps,
            exec: self.exec,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubproblemReport {
    pub index: usize,
    /// Models found (distinct on the problem variables).
    pub models: usize,
    /// Models that passed exact verification.
    pub solutions: Vec<Quadruple>,
    /// Models that failed exact verification.
    pub rejected: usize,
    /// False when the time limit cut the enumeration short.
    pub complete: bool,
    pub elapsed: Duration,
    pub stats: SolverStats,
    /// Loaded from a status file instead of being solved.
    pub resumed: bool,
}

/// Enumerates and verifies every solution of one subproblem.
pub fn conquer(cq: &CompressedQuadruple, cfg: &SearchConfig) -> Result<SubproblemReport> {
    let start = Instant::now();
    if cq.is_complete() {
        let q = cq.to_quadruple()?;
        let ok = verify_best(&q).ok;
        return Ok(SubproblemReport {
            index: 0,
            models: 1,
            rejected: usize::from(!ok),
            solutions: if ok { vec![q] } else { Vec::new() },
            complete: true,
            elapsed: start.elapsed(),
            stats: SolverStats::default(),
            resumed: false,
        });
    }
    let inst = build_instance(cq)?;
    let meta = inst.meta.as_ref().expect("built instances carry metadata");
    let mut theory = PsdCriterion::new(&meta.params, meta.var_map, cfg.eps)?;
    let solver = SolverConfig {
        deadline: cfg.limit_per_subproblem.map(|d| start + d),
        ..cfg.solver.clone()
    };
    let e = enumerate_all(&inst, &mut theory, solver)?;
    let mut solutions = Vec::new();
    let mut rejected = 0;
    for model in &e.models {
        let q = decode_model(&meta.params, &meta.var_map, model)?;
        let compresses = crate::seqcore::Role::ALL
            .into_iter()
            .all(|role| q.get(role).compress(meta.params.d()).ok().as_ref() == Some(cq.get(role)));
        if compresses && verify_best(&q).ok {
            solutions.push(q);
        } else {
            rejected += 1;
        }
    }
    solutions.sort();
    Ok(SubproblemReport {
        index: 0,
        models: e.models.len(),
        solutions,
        rejected,
        complete: e.complete,
        elapsed: start.elapsed(),
        stats: e.stats,
        resumed: false,
    })
}

fn status_path(dir: &Path, index: usize) -> PathBuf {
    dir.join(format!("sub-{index:06}.txt"))
}

fn write_status(dir: &Path, cq: &CompressedQuadruple, report: &SubproblemReport) -> Result<()> {
    let path = status_path(dir, report.index);
    let tmp = path.with_extension("tmp");
    let mut f = fs::File::create(&tmp)?;
    writeln!(f, "# subproblem {cq}")?;
    writeln!(
        f,
        "# status {}",
        if report.complete { "complete" } else { "incomplete" }
    )?;
    writeln!(f, "# models {} rejected {}", report.models, report.rejected)?;
    writeln!(f, "# seconds {:.3}", report.elapsed.as_secs_f64())?;
    write_solutions(&mut f, &report.solutions)?;
    f.sync_all()?;
    drop(f);
    fs::rename(&tmp, &path)?;
    Ok(())
}

/// A completed report for `cq` from a status file, if one exists.
fn read_status(dir: &Path, index: usize, cq: &CompressedQuadruple) -> Result<Option<SubproblemReport>> {
    let path = status_path(dir, index);
    let Ok(f) = fs::File::open(&path) else {
        return Ok(None);
    };
    let lines: Vec<String> = BufReader::new(f).lines().collect::<std::io::Result<_>>()?;
    let field = |key: &str| -> Option<&str> {
        lines
            .iter()
            .find_map(|l| l.strip_prefix("# ")?.strip_prefix(key)?.strip_prefix(' '))
    };
    if field("subproblem") != Some(cq.to_string().as_str()) || field("status") != Some("complete") {
        return Ok(None);
    }
    let counts: Vec<usize> = field("models")
        .unwrap_or("")
        .split_whitespace()
        .filter_map(|t| t.parse().ok())
        .collect();
    let (models, rejected) = match counts.as_slice() {
        [m, r] => (*m, *r),
        _ => {
            return Err(Error::parse(3, format!("{}: bad '# models' line", path.display())));
        }
    };
    let solutions = read_solutions(lines.join("\n").as_bytes())?;
    Ok(Some(SubproblemReport {
        index,
        models,
        solutions,
        rejected,
        complete: true,
        elapsed: Duration::ZERO,
        stats: SolverStats::default(),
        resumed: true,
    }))
}

/// Solves the given subproblems (in parallel under `cfg.exec`), using and
/// writing status files when configured. Reports come back in input order.
pub fn conquer_all(subproblems: &[CompressedQuadruple], cfg: &SearchConfig) -> Result<Vec<SubproblemReport>> {
    if let Some(dir) = &cfg.status_dir {
        fs::create_dir_all(dir)?;
    }
    let indexed: Vec<(usize, &CompressedQuadruple)> = subproblems.iter().enumerate().collect();
    let reports = cfg.exec.map(&indexed, |&(index, cq)| -> Result<SubproblemReport> {
        if let (Some(dir), true) = (&cfg.status_dir, cfg.resume) {
            if let Some(r) = read_status(dir, index, cq)? {
                return Ok(r);
            }
        }
        let mut report = conquer(cq, cfg)?;
        report.index = index;
        if let Some(dir) = &cfg.status_dir {
            write_status(dir, cq, &report)?;
        }
        Ok(report)
    });
    reports.into_iter().collect()
}

#[derive(Debug, Clone)]
pub struct SearchOutput {
    pub params: OrderParams,
    pub divide: DivideStats,
    pub subproblems: Vec<CompressedQuadruple>,
    pub reports: Vec<SubproblemReport>,
    /// One canonical representative per equivalence class, sorted.
    pub solutions: Vec<Quadruple>,
}

impl SearchOutput {
    /// Number of inequivalent solutions.
    pub fn count(&self) -> usize {
        self.solutions.len()
    }

    /// Whether every subproblem was searched exhaustively.
    pub fn is_complete(&self) -> bool {
        self.reports.iter().all(|r| r.complete)
    }
}

/// Canonical representatives of the classes met by `quads`.
pub fn classes(quads: &[Quadruple], exec: Execution) -> Vec<Quadruple> {
    dedupe(quads, exec)
}

pub fn run_search(params: &OrderParams, cfg: &SearchConfig) -> Result<SearchOutput> {
    let divided = generate_subproblems(params, &cfg.divide_config())?;
    let reports = conquer_all(&divided.subproblems, cfg)?;
    let all: Vec<Quadruple> = reports.iter().flat_map(|r| r.solutions.iter().cloned()).collect();
    let solutions = classes(&all, cfg.exec);
    Ok(SearchOutput {
        params: *params,
        divide: divided.stats,
        subproblems: divided.subproblems,
        reports,
        solutions,
    })
}

/// `B_r`: the number of inequivalent best matrices of order `r^2 + r + 1`
/// (with the default compression), together with one representative per
/// class.
pub fn count_inequivalent(r: u32, cfg: &SearchConfig) -> Result<(usize, Vec<Quadruple>)> {
    let params = OrderParams::from_r(r, None)?;
    let out = run_search(&params, cfg)?;
    if !out.is_complete() {
        return Err(Error::InvalidParams(
            "search stopped at the time limit; the count would be a lower bound".into(),
        ));
    }
    Ok((out.count(), out.solutions))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        let cfg = SearchConfig::default();
        let got: Vec<usize> = (0..=3).map(|r| count_inequivalent(r, &cfg).unwrap().0).collect();
        assert_eq!(got, vec![1, 1, 2, 2]);
    }

    #[test]
    fn branch_orders_agree() {
        let params = OrderParams::from_r(4, None).unwrap();
        let mut cfg = SearchConfig::default();
        let activity = run_search(&params, &cfg).unwrap();
        cfg.solver.branch = crate::cdcl::BranchOrder::Blocks;
        let blocks = run_search(&params, &cfg).unwrap();
        assert_eq!(activity.solutions, blocks.solutions);
        assert_eq!(blocks.solutions.len(), 7);
    }

    #[test]
    fn order_three_via_sat() {
        let params = OrderParams::from_n(3, Some(3)).unwrap();
        let out = run_search(&params, &SearchConfig::default()).unwrap();
        assert_eq!(out.subproblems.len(), 1);
        // A, B, C are unconstrained by the encoding; the callback and
        // verification leave 8 models, all in one class.
        assert_eq!(out.reports[0].models, 8);
        assert_eq!(out.reports[0].rejected, 0);
        assert_eq!(out.count(), 1);
    }

    #[test]
    fn status_files_resume() {
        let dir = tempdir();
        let params = OrderParams::from_r(4, None).unwrap();
        let cfg = SearchConfig {
            status_dir: Some(dir.clone()),
            resume: true,
            ..Default::default()
        };
        let first = run_search(&params, &cfg).unwrap();
        assert!(first.reports.iter().all(|r| !r.resumed));
        let second = run_search(&params, &cfg).unwrap();
        assert!(second.reports.iter().all(|r| r.resumed));
        assert_eq!(first.solutions, second.solutions);
        assert_eq!(second.count(), 7);
        fs::remove_dir_all(dir).unwrap();
    }

    fn tempdir() -> PathBuf {
        let dir = std::env::temp_dir().join(format!("bestmat-status-{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        dir
    }
}
