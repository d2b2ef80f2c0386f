//! Oracles and property checks shared by the integration tests and the
//! acceptance harness. Each check returns `Err` with a description of the
//! first discrepancy.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::f64::consts::TAU;

use bestmat::cdcl::{
    enumerate_all, Assignment, NoTheory, PartialAssignment, PsdCriterion, SolveResult, Solver, SolverConfig,
};
use bestmat::cnf::{CnfInstance, Lit, Var, VarMap};
use bestmat::designs::{verify_best, Quadruple};
use bestmat::encode::{build_instance, decode_model, encode_model};
use bestmat::equivalence::{dedupe, units, EquivalenceOp, Orbit};
use bestmat::seqcore::{OrderParams, PmSequence, Role, Symmetry};
use bestmat::Execution;

pub mod strategies;

pub type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Every quadruple of order `n` with the required symmetry, checked one by
/// one: `2^(4h)` candidates for `h = (n - 1) / 2`.
pub fn brute_force_solutions(n: usize) -> Vec<Quadruple> {
    let h = (n - 1) / 2;
    let mut out = Vec::new();
    for code in 0u64..1 << (4 * h) {
        let rows = std::array::from_fn(|i| {
            let mask = code >> (i * h) & ((1 << h) - 1);
            PmSequence::from_half_mask(mask, Role::ALL[i].symmetry(), n)
        });
        let q = Quadruple::from_array(rows).expect("symmetry classes match roles");
        if verify_best(&q).ok {
            out.push(q);
        }
    }
    out
}

pub fn class_set(quads: &[Quadruple]) -> BTreeSet<Quadruple> {
    dedupe(quads, Execution::Sequential).into_iter().collect()
}

/// Row `x` of length `n` with `x[0] = +1` and the given symmetry, from
/// arbitrary bits.
pub fn row_from_bits(bits: u64, symmetry: Symmetry, n: usize) -> PmSequence {
    let h = (n - 1) / 2;
    PmSequence::from_half_mask(bits & ((1u64 << h) - 1), symmetry, n)
}

/// PSD computed from the PAF by its cosine series, independently of the
/// DFT of the sequence.
pub fn psd_from_paf(x: &PmSequence, k: usize) -> f64 {
    let n = x.len();
    (0..n)
        .map(|s| x.paf(s) as f64 * (TAU * (k * s) as f64 / n as f64).cos())
        .sum()
}

pub fn check_paf_psd_duality(x: &PmSequence) -> Check {
    for k in 0..x.len() {
        let (a, b) = (x.psd(k), psd_from_paf(x, k));
        ensure((a - b).abs() <= 1e-9, || {
            format!("n={} k={k}: psd {a} vs paf series {b}", x.len())
        })?;
    }
    Ok(())
}

pub fn check_parseval(x: &PmSequence) -> Check {
    let n = x.len();
    let total: f64 = (0..n).map(|k| x.psd(k)).sum();
    let want = (n * n) as f64;
    ensure(((total - want) / want).abs() <= 1e-6, || {
        format!("n={n}: sum of psd {total}, expected {want}")
    })
}

/// Compressing by `d` folds the PAF exactly: the compressed PAF at `s` is the
/// sum of the full PAF over `s + j m`.
pub fn check_compression_identity(x: &PmSequence, d: usize) -> Check {
    let n = x.len();
    let m = n / d;
    let c = x.compress(d).map_err(|e| e.to_string())?;
    ensure(c.len() == m, || format!("compressed length {} != {m}", c.len()))?;
    for s in 0..m {
        let folded: i64 = (0..d).map(|j| x.paf(s + j * m)).sum();
        ensure(c.paf(s) == folded, || {
            format!("n={n} d={d} s={s}: {} != {folded}", c.paf(s))
        })?;
    }
    let sum: i64 = c.entries().iter().map(|&v| i64::from(v)).sum();
    ensure(sum == x.rowsum(), || "compression changes the row sum".into())
}

/// Decodes a generator index into an equivalence operation valid for order `n`.
pub fn op_from_index(n: usize, i: usize) -> EquivalenceOp {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let u = units(n);
    match i % 3 {
        0 => EquivalenceOp::ReorderAbc(PERMS[i / 3 % 6]),
        1 => EquivalenceOp::NegateIndices(Role::ALL[i / 3 % 3]),
        _ => EquivalenceOp::Automorphism(u[i / 3 % u.len()]),
    }
}

/// `verify_best` gives the same verdict on every orbit element, and the
/// canonical form is a class invariant.
pub fn check_orbit_invariance(q: &Quadruple, ops: &[usize]) -> Check {
    let n = q.order();
    let before = verify_best(q).ok;
    let mut cur = q.clone();
    for &i in ops {
        let op = op_from_index(n, i);
        cur = cur.apply(&op).map_err(|e| format!("{op:?}: {e}"))?;
        ensure(verify_best(&cur).ok == before, || format!("{op:?} changed the verdict"))?;
    }
    ensure(cur.canonical_form() == q.canonical_form(), || {
        "canonical form differs within an orbit".into()
    })
}

/// A clause `(pos, neg)` over at most 32 variables as bit masks.
pub type MaskClause = (u32, u32);

pub fn to_lits(clause: MaskClause, num_vars: usize) -> Vec<Lit> {
    (0..num_vars)
        .filter_map(|v| {
            let var = Var(v as u32);
            if clause.0 >> v & 1 == 1 {
                Some(Lit::pos(var))
            } else if clause.1 >> v & 1 == 1 {
                Some(Lit::neg(var))
            } else {
                None
            }
        })
        .collect()
}

fn holds(clauses: &[MaskClause], a: u32) -> bool {
    clauses.iter().all(|&(p, n)| (a & p) | (!a & n) != 0)
}

fn model_bits(model: &[bool]) -> u32 {
    model
        .iter()
        .enumerate()
        .fold(0, |acc, (v, &b)| acc | (u32::from(b) << v))
}

/// Solver verdicts agree with exhaustive evaluation; for small instances the
/// enumerated model set must equal the brute-force set.
pub fn check_cdcl_against_brute_force(num_vars: usize, clauses: &[MaskClause]) -> Check {
    let lits: Vec<Vec<Lit>> = clauses.iter().map(|&c| to_lits(c, num_vars)).collect();
    let inst = CnfInstance::new(num_vars, lits.clone()).map_err(|e| e.to_string())?;
    let sat = (0u32..1 << num_vars).any(|a| holds(clauses, a));
    let mut solver = Solver::new(num_vars, SolverConfig::default());
    for c in &lits {
        solver.add_clause(c).map_err(|e| e.to_string())?;
    }
    match solver.solve(&mut NoTheory).map_err(|e| e.to_string())? {
        SolveResult::Sat(m) => {
            ensure(sat, || "solver found a model of an unsatisfiable formula".into())?;
            ensure(holds(clauses, model_bits(&m)), || {
                "returned model violates a clause".into()
            })?;
        }
        SolveResult::Unsat => ensure(!sat, || "solver missed a model".into())?,
        SolveResult::Unknown => return Err("no deadline, yet the result is unknown".into()),
    }
    if num_vars <= 12 {
        let want: BTreeSet<u32> = (0u32..1 << num_vars).filter(|&a| holds(clauses, a)).collect();
        let e = enumerate_all(&inst, &mut NoTheory, SolverConfig::default()).map_err(|e| e.to_string())?;
        let got: Vec<u32> = e.models.iter().map(|m| model_bits(m)).collect();
        let got_set: BTreeSet<u32> = got.iter().copied().collect();
        ensure(got.len() == got_set.len(), || "enumeration repeated a model".into())?;
        ensure(got_set == want, || {
            format!("enumerated {} models, expected {}", got_set.len(), want.len())
        })?;
    }
    Ok(())
}

fn criterion(n: usize) -> (PsdCriterion, VarMap) {
    let p = OrderParams::from_n(n, Some(1)).expect("valid order");
    let vm = VarMap::new(n, 0);
    (PsdCriterion::new(&p, vm, 1e-4).expect("small order"), vm)
}

fn clause_falsified(a: &Assignment<'_>, clause: &[Lit]) -> bool {
    clause.iter().all(|&l| a.lit_value(l) == Some(false))
}

/// Partial assignments taken from a known solution (variables kept where
/// `keep` has a bit set) are never blocked; arbitrary assignments only ever
/// get clauses they falsify.
pub fn check_callback_soundness(solution: &Quadruple, keep: u64, noise: u64) -> Check {
    let n = solution.order();
    let (mut psd, vm) = criterion(n);
    let model = encode_model(solution, &vm);
    let partial: Vec<Option<bool>> = model
        .iter()
        .enumerate()
        .map(|(v, &b)| (keep >> (v % 64) & 1 == 1).then_some(b))
        .collect();
    let pa = PartialAssignment::new(&partial);
    if let Some(c) = bestmat::cdcl::TheoryCallback::check(&mut psd, &pa.view()) {
        return Err(format!("solution blocked by clause of length {}", c.len()));
    }
    let noisy: Vec<Option<bool>> = partial
        .iter()
        .enumerate()
        .map(|(v, x)| x.map(|b| b ^ (noise >> (v % 64) & 1 == 1)))
        .collect();
    let pa = PartialAssignment::new(&noisy);
    if let Some(c) = bestmat::cdcl::TheoryCallback::check(&mut psd, &pa.view()) {
        ensure(clause_falsified(&pa.view(), &c), || {
            "returned clause is not falsified".into()
        })?;
        ensure(!c.is_empty(), || "empty clause".into())?;
    }
    Ok(())
}

/// If a set of completed rows violates the bound, so does every superset.
pub fn check_subset_monotonicity(n: usize, bits: [u64; 4]) -> Check {
    let (mut psd, vm) = criterion(n);
    let rows: Vec<PmSequence> = Role::ALL
        .iter()
        .zip(bits)
        .map(|(r, b)| row_from_bits(b, r.symmetry(), n))
        .collect();
    let q = Quadruple::from_array(rows.try_into().expect("four rows")).map_err(|e| e.to_string())?;
    let full = encode_model(&q, &vm);
    let violated = |psd: &mut PsdCriterion, subset: u32| {
        let values: Vec<Option<bool>> = (0..vm.num_vars())
            .map(|v| {
                let role = v / vm.half_len();
                (subset >> role & 1 == 1).then_some(full[v])
            })
            .collect();
        psd.violation(&PartialAssignment::new(&values).view()).is_some()
    };
    let verdicts: Vec<bool> = (0u32..16).map(|s| violated(&mut psd, s)).collect();
    for s in 0..16usize {
        for t in 0..16usize {
            if s & t == s && verdicts[s] && !verdicts[t] {
                return Err(format!("subset {s:04b} violates but superset {t:04b} does not"));
            }
        }
    }
    Ok(())
}

/// Known solutions for orders 1, 3, 7 and 13 (every member of every class).
pub fn known_solutions(n: usize) -> Vec<Quadruple> {
    let reps = match n {
        1 | 3 | 7 => return brute_force_solutions(n),
        _ => {
            let p = OrderParams::from_n(n, None).expect("valid order");
            bestmat::search::run_search(&p, &Default::default())
                .expect("search")
                .solutions
        }
    };
    orbit_closure(&reps)
}

/// All images of `quads` under the equivalence group.
pub fn orbit_closure(quads: &[Quadruple]) -> Vec<Quadruple> {
    let mut seen: BTreeSet<Quadruple> = quads.iter().cloned().collect();
    let mut frontier: Vec<Quadruple> = quads.to_vec();
    while let Some(q) = frontier.pop() {
        let n = q.order();
        for i in 0..3 * 6 * units(n).len().max(6) {
            let img = q.apply(&op_from_index(n, i)).expect("valid op");
            if seen.insert(img.clone()) {
                frontier.push(img);
            }
        }
    }
    seen.into_iter().collect()
}

/// The hand-written order-3 instance over `a_i, b_i, c_i, d_i` for
/// `0 <= i < 3` (variable `3 * role + i`), with `x_i` true meaning `+1`: for each of A, B, C "at least two of three are +1 and
/// not all three are", and `d_0, d_1, d_2` as units.
pub fn fifteen_clause_instance() -> CnfInstance {
    let v = |role: usize, i: usize| Var((role * 3 + i) as u32);
    let mut clauses = Vec::new();
    for role in 0..3 {
        clauses.push(vec![Lit::pos(v(role, 0)), Lit::pos(v(role, 1))]);
        clauses.push(vec![Lit::pos(v(role, 0)), Lit::pos(v(role, 2))]);
        clauses.push(vec![Lit::pos(v(role, 1)), Lit::pos(v(role, 2))]);
        clauses.push((0..3).map(|i| Lit::neg(v(role, i))).collect());
    }
    for i in 0..3 {
        clauses.push(vec![Lit::pos(v(3, i))]);
    }
    CnfInstance::new(12, clauses).expect("valid instance")
}

/// Models of the fifteen clauses that respect the symmetry classes, as
/// quadruples.
pub fn fifteen_clause_quadruples() -> BTreeSet<Quadruple> {
    let hand = fifteen_clause_instance();
    enumerate_all(&hand, &mut NoTheory, SolverConfig::default())
        .expect("solvable")
        .models
        .into_iter()
        .filter_map(|m| {
            let seqs: Option<Vec<PmSequence>> = (0..4)
                .map(|r| {
                    let row = (0..3).map(|i| if m[r * 3 + i] { 1 } else { -1 }).collect();
                    PmSequence::new(row, Role::ALL[r].symmetry()).ok()
                })
                .collect();
            Quadruple::from_array(seqs?.try_into().ok()?).ok()
        })
        .collect()
}

/// The generated order-3 instance has the same decoded model set as the
/// fifteen hand-written clauses, with and without the spectrum callback,
/// and all its models form the class of the known example.
pub fn check_fifteen_clauses() -> Check {
    use bestmat::designs::order_three_example;
    let hand = fifteen_clause_instance();
    ensure(hand.clauses.len() == 15, || {
        "hand instance must have fifteen clauses".into()
    })?;
    let want = fifteen_clause_quadruples();
    ensure(want.len() == 8, || {
        format!("{} structured models of the fifteen clauses", want.len())
    })?;

    let p = OrderParams::from_n(3, Some(3)).map_err(|e| e.to_string())?;
    let subs = bestmat::divide::generate_subproblems(&p, &Default::default())
        .map_err(|e| e.to_string())?
        .subproblems;
    ensure(subs.len() == 1 && subs[0].to_string() == "1;1;1;3", || {
        format!(
            "order-3 subproblems {:?}",
            subs.iter().map(|s| s.to_string()).collect::<Vec<_>>()
        )
    })?;
    let inst = build_instance(&subs[0]).map_err(|e| e.to_string())?;
    let meta = inst.meta.clone().ok_or("generated instance lacks metadata")?;
    let decode = |models: &[Vec<bool>]| -> Result<BTreeSet<Quadruple>, String> {
        models
            .iter()
            .map(|m| decode_model(&meta.params, &meta.var_map, m).map_err(|e| e.to_string()))
            .collect()
    };
    let plain = enumerate_all(&inst, &mut NoTheory, SolverConfig::default()).map_err(|e| e.to_string())?;
    ensure(decode(&plain.models)? == want, || {
        "plain model set differs from the fifteen clauses".into()
    })?;

    let mut psd = PsdCriterion::for_instance(&inst, 1e-4)
        .map_err(|e| e.to_string())?
        .ok_or("no callback for a generated instance")?;
    let filtered = decode(
        &enumerate_all(&inst, &mut psd, SolverConfig::default())
            .map_err(|e| e.to_string())?
            .models,
    )?;
    ensure(filtered == want, || "callback changed the model set".into())?;
    ensure(filtered.iter().all(|q| verify_best(q).ok), || "unverified model".into())?;
    let classes: Vec<Quadruple> = class_set(&filtered.into_iter().collect::<Vec<_>>())
        .into_iter()
        .collect();
    ensure(classes == vec![order_three_example().canonical_form()], || {
        "models are not the known example's class".into()
    })
}
