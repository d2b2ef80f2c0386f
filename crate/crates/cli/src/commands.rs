use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use bestmat::cdcl::{
    enumerate_all, NoTheory, PsdCriterion, SolveResult, Solver, SolverConfig, SolverStats, TheoryCallback,
};
use bestmat::cnf::{read_dimacs, write_dimacs, CnfInstance};
use bestmat::designs::{goethals_seidel, verify_best, verify_hadamard, Quadruple};
use bestmat::divide::{generate_subproblems, DivideConfig};
use bestmat::encode::{build_instance, decode_model};
use bestmat::formats::{read_solutions, read_subproblems, write_solutions, write_subproblems};
use bestmat::search::{classes, conquer_all, SearchConfig};
use bestmat::seqcore::{OrderParams, Role};
use bestmat::Execution;

use crate::{OrderArgs, RunArgs};

/// Usage problems and invalid parameters exit with 2, everything else with 1.
pub fn exit_code(e: &anyhow::Error) -> ExitCode {
    let usage = e.chain().any(|c| {
        matches!(
            c.downcast_ref::<bestmat::Error>(),
            Some(bestmat::Error::InvalidParams(_))
        ) || c.downcast_ref::<UsageError>().is_some()
    });
    ExitCode::from(if usage { 2 } else { 1 })
}

#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Sizes the global pool; one thread means plain sequential execution.
fn execution(threads: Option<usize>) -> Result<Execution> {
    match threads {
        Some(0) => Err(usage("--threads must be at least 1")),
        Some(1) => Ok(Execution::Sequential),
        #[cfg(feature = "parallel")]
        Some(t) => {
            // Fails only if a pool already exists, which is harmless.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
            Ok(Execution::Parallel)
        }
        #[cfg(not(feature = "parallel"))]
        Some(_) => Ok(Execution::Sequential),
        None => Ok(Execution::Parallel),
    }
}

fn params(order: &OrderArgs, d: Option<usize>) -> Result<OrderParams> {
    let p = match (order.r, order.n) {
        (Some(r), None) => OrderParams::from_r(r, d)?,
        (None, Some(n)) => OrderParams::from_n(n, d)?,
        _ => return Err(usage("exactly one of --r and --n is required")),
    };
    Ok(p)
}

fn limit(secs: Option<f64>) -> Result<Option<Duration>> {
    secs.map(|s| Duration::try_from_secs_f64(s).map_err(|_| usage(format!("invalid time limit {s}"))))
        .transpose()
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(usage(format!("invalid tolerance {eps}")));
    }
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    let f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn open(path: &Path) -> Result<BufReader<fs::File>> {
    let f = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(BufReader::new(f))
}

/// Writes `contents` to a temporary sibling and renames it into place.
fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming to {}", path.display()))?;
    Ok(())
}

pub fn search(order: &OrderArgs, run: &RunArgs, out: &Path, resume: bool, secs: Option<f64>) -> Result<ExitCode> {
    check_eps(run.eps)?;
    let params = params(order, run.d)?;
    let exec = execution(run.threads)?;
    let cfg = SearchConfig {
        eps: run.eps,
        exec,
        limit_per_subproblem: limit(secs)?,
        solver: SolverConfig::default(),
        status_dir: Some(out.join("status")),
        resume,
    };
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;

    let start = Instant::now();
    let divided = generate_subproblems(&params, &DivideConfig { eps: cfg.eps, exec })?;
    let mut buf = Vec::new();
    write_subproblems(&mut buf, &params, &divided.subproblems)?;
    write_atomic(&out.join("subproblems.txt"), &buf)?;
    eprintln!(
        "{params}: {} subproblems ({:.1}s)",
        divided.subproblems.len(),
        start.elapsed().as_secs_f64()
    );

    let reports = conquer_all(&divided.subproblems, &cfg)?;
    let all: Vec<Quadruple> = reports.iter().flat_map(|r| r.solutions.iter().cloned()).collect();
    let reps = classes(&all, exec);
    let complete = reports.iter().all(|r| r.complete);
    let models: usize = reports.iter().map(|r| r.models).sum();
    let rejected: usize = reports.iter().map(|r| r.rejected).sum();
    let resumed = reports.iter().filter(|r| r.resumed).count();
    let unfinished = reports.iter().filter(|r| !r.complete).count();

    let mut buf = Vec::new();
    write_solutions(&mut buf, &reps)?;
    write_atomic(&out.join("solutions.txt"), &buf)?;

    let s = &divided.stats;
    let mut counts = String::new();
    counts.push_str(&format!("r {}\nn {}\nd {}\n", params.r(), params.n(), params.d()));
    counts.push_str(&format!(
        "pool_sizes {} {} {} {}\n",
        s.pool_sizes[0], s.pool_sizes[1], s.pool_sizes[2], s.pool_sizes[3]
    ));
    counts.push_str(&format!("joined {}\nsubproblems {}\n", s.joined, s.classes));
    counts.push_str(&format!(
        "models {models}\nrejected {rejected}\nsolutions {}\n",
        all.len()
    ));
    counts.push_str(&format!("resumed {resumed}\nunfinished {unfinished}\n"));
    counts.push_str(&format!("classes {}\ncomplete {complete}\n", reps.len()));
    write_atomic(&out.join("counts.txt"), counts.as_bytes())?;

    eprintln!(
        "{models} models, {rejected} rejected, {} solutions ({:.1}s)",
        all.len(),
        start.elapsed().as_secs_f64()
    );
    if complete {
        println!("B_{} = {}", params.r(), reps.len());
        Ok(ExitCode::SUCCESS)
    } else {
        println!("B_{} >= {}", params.r(), reps.len());
        eprintln!("{unfinished} subproblems hit the time limit; rerun with --resume and a larger limit");
        Ok(ExitCode::from(1))
    }
}

pub fn divide(order: &OrderArgs, run: &RunArgs, out: &Path) -> Result<ExitCode> {
    check_eps(run.eps)?;
    let params = params(order, run.d)?;
    let exec = execution(run.threads)?;
    let start = Instant::now();
    let divided = generate_subproblems(&params, &DivideConfig { eps: run.eps, exec })?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut buf = Vec::new();
    write_subproblems(&mut buf, &params, &divided.subproblems)?;
    write_atomic(&out.join("subproblems.txt"), &buf)?;
    let s = &divided.stats;
    eprintln!(
        "pools {:?}, {} joined, {:.1}s",
        s.pool_sizes,
        s.joined,
        start.elapsed().as_secs_f64()
    );
    println!("{params}: {} subproblems", divided.subproblems.len());
    Ok(ExitCode::SUCCESS)
}

pub fn encode(subproblems: &Path, out: &Path, index: Option<usize>) -> Result<ExitCode> {
    let (_, subs) = read_subproblems(open(subproblems)?).with_context(|| subproblems.display().to_string())?;
    let indices: Vec<usize> = match index {
        Some(i) if i >= subs.len() => {
            return Err(usage(format!("index {i} out of range ({} subproblems)", subs.len())))
        }
        Some(i) => vec![i],
        None => (0..subs.len()).collect(),
    };
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    for i in indices {
        let inst = build_instance(&subs[i])?;
        let path = out.join(format!("sub-{i:06}.cnf"));
        let mut w = create(&path)?;
        write_dimacs(&mut w, &inst)?;
        w.flush()?;
        println!(
            "{} vars={} clauses={}",
            path.display(),
            inst.num_vars,
            inst.clauses.len()
        );
    }
    Ok(ExitCode::SUCCESS)
}

pub struct SolveArgs {
    pub files: Vec<PathBuf>,
    pub eps: f64,
    pub threads: Option<usize>,
    pub limit: Option<f64>,
    pub first: bool,
    pub out: Option<PathBuf>,
    pub quiet: bool,
}

struct FileResult {
    models: Vec<Vec<bool>>,
    complete: bool,
    solutions: Vec<Quadruple>,
    rejected: usize,
    elapsed: Duration,
    stats: SolverStats,
}

fn solve_file(inst: &CnfInstance, args: &SolveArgs, limit: Option<Duration>) -> Result<FileResult> {
    let start = Instant::now();
    let config = SolverConfig {
        deadline: limit.map(|l| start + l),
        ..SolverConfig::default()
    };
    let mut psd = PsdCriterion::for_instance(inst, args.eps)?;
    let theory: &mut dyn TheoryCallback = match psd.as_mut() {
        Some(c) => c,
        None => &mut NoTheory,
    };
    let (models, complete, stats) = if args.first {
        let mut solver = Solver::from_instance(inst, config)?;
        let (models, complete) = match solver.solve(theory)? {
            SolveResult::Sat(m) => (vec![m], true),
            SolveResult::Unsat => (Vec::new(), true),
            SolveResult::Unknown => (Vec::new(), false),
        };
        (models, complete, solver.stats())
    } else {
        let e = enumerate_all(inst, theory, config)?;
        (e.models, e.complete, e.stats)
    };

    let mut solutions = Vec::new();
    let mut rejected = 0;
    if let Some(meta) = &inst.meta {
        for m in &models {
            let q = decode_model(&meta.params, &meta.var_map, m)?;
            let compresses = meta.subproblem.as_ref().is_none_or(|cq| {
                Role::ALL
                    .into_iter()
                    .all(|role| q.get(role).compress(meta.params.d()).ok().as_ref() == Some(cq.get(role)))
            });
            if compresses && verify_best(&q).ok {
                solutions.push(q);
            } else {
                rejected += 1;
            }
        }
    }
    solutions.sort();
    Ok(FileResult {
        models,
        complete,
        solutions,
        rejected,
        elapsed: start.elapsed(),
        stats,
    })
}

pub fn solve(args: &SolveArgs) -> Result<ExitCode> {
    check_eps(args.eps)?;
    let exec = execution(args.threads)?;
    let limit = limit(args.limit)?;
    let instances = args
        .files
        .iter()
        .map(|p| read_dimacs(open(p)?).with_context(|| p.display().to_string()))
        .collect::<Result<Vec<_>>>()?;
    let results = exec.map(&instances, |inst| solve_file(inst, args, limit));

    let stdout = std::io::stdout();
    let mut w = BufWriter::new(stdout.lock());
    let mut all = Vec::new();
    let mut complete = true;
    for ((path, inst), result) in args.files.iter().zip(&instances).zip(results) {
        let r = result.with_context(|| path.display().to_string())?;
        writeln!(w, "c file {}", path.display())?;
        let status = match (r.models.is_empty(), r.complete) {
            (false, _) => "SATISFIABLE",
            (true, true) => "UNSATISFIABLE",
            (true, false) => "UNKNOWN",
        };
        writeln!(w, "s {status}")?;
        if !args.quiet {
            for m in &r.models {
                let lits: Vec<String> = m
                    .iter()
                    .enumerate()
                    .map(|(v, &b)| if b { (v + 1).to_string() } else { format!("-{}", v + 1) })
                    .collect();
                writeln!(w, "v {} 0", lits.join(" "))?;
            }
        }
        writeln!(
            w,
            "c models {} {} ({:.2}s)",
            r.models.len(),
            if r.complete { "complete" } else { "incomplete" },
            r.elapsed.as_secs_f64()
        )?;
        let st = &r.stats;
        writeln!(
            w,
            "c decisions {} propagations {} conflicts {} theory_conflicts {} restarts {} learnts {} deleted {}",
            st.decisions, st.propagations, st.conflicts, st.theory_conflicts, st.restarts, st.learnts, st.deleted
        )?;
        if inst.meta.is_some() {
            writeln!(w, "c verified {} rejected {}", r.solutions.len(), r.rejected)?;
            for q in &r.solutions {
                for (role, s) in Role::ALL.into_iter().zip(q.seqs()) {
                    writeln!(w, "c {role} {}", s.to_pm_string())?;
                }
            }
        }
        complete &= r.complete;
        all.extend(r.solutions);
    }
    w.flush()?;

    if let Some(out) = &args.out {
        all.sort();
        let mut f = create(out)?;
        write_solutions(&mut f, &all)?;
        f.flush()?;
    }
    Ok(if complete { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

pub fn verify(path: &Path, show_classes: bool) -> Result<ExitCode> {
    let quads = read_solutions(open(path)?).with_context(|| path.display().to_string())?;
    if quads.is_empty() {
        bail!("{}: no quadruples", path.display());
    }
    let mut failed = 0;
    for (i, q) in quads.iter().enumerate() {
        let report = verify_best(q);
        if report.ok {
            println!("{i}: ok (n={})", q.order());
        } else {
            failed += 1;
            let shifts: Vec<String> = report.failures.iter().map(|(s, v)| format!("{s}:{v}")).collect();
            println!("{i}: FAIL (n={}) shifts {}", q.order(), shifts.join(" "));
        }
    }
    println!("verified {}/{}", quads.len() - failed, quads.len());
    if show_classes {
        let ok: Vec<Quadruple> = quads.into_iter().filter(|q| verify_best(q).ok).collect();
        println!("classes {}", classes(&ok, Execution::default()).len());
    }
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

pub fn hadamard(path: &Path, out: &Path) -> Result<ExitCode> {
    let quads = read_solutions(open(path)?).with_context(|| path.display().to_string())?;
    if quads.is_empty() {
        bail!("{}: no quadruples", path.display());
    }
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut failed = 0;
    for (i, q) in quads.iter().enumerate() {
        let h = goethals_seidel(q)?;
        let report = verify_hadamard(&h);
        let base = out.join(format!("hadamard-{i}"));
        write_atomic(&base.with_extension("txt"), h.to_text().as_bytes())?;
        write_atomic(&base.with_extension("pbm"), h.to_pbm().as_bytes())?;
        let verdict = if report.is_skew_hadamard() {
            "certified skew Hadamard"
        } else {
            failed += 1;
            "FAIL"
        };
        println!(
            "{}: order {} orthogonal={} skew={} {verdict}",
            base.display(),
            h.dim(),
            report.orthogonal,
            report.skew
        );
    }
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
