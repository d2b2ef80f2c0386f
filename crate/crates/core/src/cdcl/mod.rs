//! A CDCL SAT solver with a programmatic theory callback.
//!
//! Two watched literals with blockers, first-UIP learning with recursive
//! minimization, non-chronological backjumping, phase saving, Luby
//! restarts and LBD-based learnt clause deletion. After every propagation
//! fixpoint without a Boolean conflict the theory callback inspects the
//! assignment; a clause it returns must be falsified and is handled as a
//! conflict.

mod arena;
mod order;
mod psd;

use std::time::Instant;

pub use psd::{PsdCriterion, PsdStats};

use crate::cnf::{CnfInstance, Lit, Var, VarKind};
use crate::error::{Error, Result};
use arena::ClauseArena;
use order::VarOrder;

const TRUE: i8 = 1;
const FALSE: i8 = -1;
const NO_REASON: u32 = u32::MAX;

#[inline]
fn lit_value(values: &[i8], l: Lit) -> i8 {
    let v = values[l.var().index()];
    if l.is_positive() {
        v
    } else {
        -v
    }
}

/// Read-only view of the solver state handed to a theory callback.
pub struct Assignment<'a> {
    values: &'a [i8],
    levels: &'a [u32],
    trail: &'a [Lit],
    decision_level: u32,
}

impl Assignment<'_> {
    pub fn num_vars(&self) -> usize {
        self.values.len()
    }

    pub fn value(&self, v: Var) -> Option<bool> {
        match self.values[v.index()] {
            0 => None,
            x => Some(x == TRUE),
        }
    }

    pub fn lit_value(&self, l: Lit) -> Option<bool> {
        self.value(l.var()).map(|b| l.holds(b))
    }

    pub fn level(&self, v: Var) -> Option<u32> {
        self.value(v).map(|_| self.levels[v.index()])
    }

    pub fn decision_level(&self) -> u32 {
        self.decision_level
    }

    /// Assigned literals in assignment order.
    pub fn trail(&self) -> &[Lit] {
        self.trail
    }

    pub fn is_complete(&self) -> bool {
        self.trail.len() == self.values.len()
    }
}

/// An owned partial assignment, for driving callbacks outside a solver
/// (every assigned variable sits at decision level 0, in index order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialAssignment {
    values: Vec<i8>,
    levels: Vec<u32>,
    trail: Vec<Lit>,
}

impl PartialAssignment {
    pub fn new(values: &[Option<bool>]) -> Self {
        let trail = values
            .iter()
            .enumerate()
            .filter_map(|(v, x)| x.map(|b| Lit::new(Var(v as u32), b)))
            .collect();
        PartialAssignment {
            values: values
                .iter()
                .map(|x| match x {
                    None => 0,
                    Some(true) => TRUE,
                    Some(false) => FALSE,
                })
                .collect(),
            levels: vec![0; values.len()],
            trail,
        }
    }

    pub fn view(&self) -> Assignment<'_> {
        Assignment {
            values: &self.values,
            levels: &self.levels,
            trail: &self.trail,
            decision_level: 0,
        }
    }
}

pub trait TheoryCallback {
    /// Inspects an assignment closed under unit propagation. A returned
    /// clause must be falsified by it and must not exclude any solution of
    /// the problem the instance encodes.
    fn check(&mut self, assignment: &Assignment<'_>) -> Option<Vec<Lit>>;
}

/// The callback that never objects.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoTheory;

impl TheoryCallback for NoTheory {
    fn check(&mut self, _: &Assignment<'_>) -> Option<Vec<Lit>> {
        None
    }
}

impl<F> TheoryCallback for F
where
    F: FnMut(&Assignment<'_>) -> Option<Vec<Lit>>,
{
    fn check(&mut self, assignment: &Assignment<'_>) -> Option<Vec<Lit>> {
        self(assignment)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BranchOrder {
    /// Role blocks A, B, C, D, then auxiliaries; activity breaks ties
    /// inside a block. Falls back to `Activity` without a variable map.
    Blocks,
    /// Plain VSIDS over all variables.
    #[default]
    Activity,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub branch: BranchOrder,
    /// Conflicts in the first Luby restart interval.
    pub restart_base: u64,
    pub var_decay: f64,
    pub clause_decay: f64,
    /// Give up with [`SolveResult::Unknown`] after this instant.
    pub deadline: Option<Instant>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            branch: BranchOrder::default(),
            restart_base: 100,
            var_decay: 0.95,
            clause_decay: 0.999,
            deadline: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveResult {
    /// A model, indexed by variable.
    Sat(Vec<bool>),
    Unsat,
    Unknown,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub decisions: u64,
    pub propagations: u64,
    pub conflicts: u64,
    pub theory_conflicts: u64,
    pub restarts: u64,
    pub deleted: u64,
    /// Learnt clauses currently held.
    pub learnts: u64,
}

#[derive(Debug, Clone, Copy)]
struct Watcher {
    cref: u32,
    blocker: Lit,
}

pub struct Solver {
    num_vars: usize,
    db: ClauseArena,
    watches: Vec<Vec<Watcher>>,
    values: Vec<i8>,
    levels: Vec<u32>,
    reasons: Vec<u32>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    order: VarOrder,
    var_inc: f64,
    polarity: Vec<bool>,
    seen: Vec<bool>,
    to_clear: Vec<Lit>,
    level_stamp: Vec<u64>,
    stamp: u64,
    learnts: Vec<u32>,
    cla_inc: f32,
    max_learnts: f64,
    ok: bool,
    stats: SolverStats,
    config: SolverConfig,
}

impl Solver {
    pub fn new(num_vars: usize, config: SolverConfig) -> Self {
        Solver {
            num_vars,
            db: ClauseArena::default(),
            watches: vec![Vec::new(); 2 * num_vars],
            values: vec![0; num_vars],
            levels: vec![0; num_vars],
            reasons: vec![NO_REASON; num_vars],
            trail: Vec::with_capacity(num_vars),
            trail_lim: Vec::new(),
            qhead: 0,
            order: VarOrder::new(num_vars),
            var_inc: 1.0,
            polarity: vec![false; num_vars],
            seen: vec![false; num_vars],
            to_clear: Vec::new(),
            level_stamp: vec![0; num_vars + 1],
            stamp: 0,
            learnts: Vec::new(),
            cla_inc: 1.0,
            max_learnts: 0.0,
            ok: true,
            stats: SolverStats::default(),
            config,
        }
    }

    /// Loads an instance; with block branching and a variable map the role
    /// blocks are decided in order.
    pub fn from_instance(inst: &CnfInstance, config: SolverConfig) -> Result<Self> {
        inst.validate()?;
        let mut s = Solver::new(inst.num_vars, config);
        if let (BranchOrder::Blocks, Some(meta)) = (s.config.branch, &inst.meta) {
            let groups: Vec<u32> = (0..inst.num_vars)
                .map(|v| match meta.var_map.kind(Var(v as u32)) {
                    Some(VarKind::Problem { role, .. }) => role.index() as u32,
                    _ => 4,
                })
                .collect();
            s.order.set_groups(&groups);
        }
        for c in &inst.clauses {
            s.add_clause(c)?;
        }
        s.max_learnts = (inst.clauses.len() as f64 / 3.0).max(4000.0);
        Ok(s)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn stats(&self) -> SolverStats {
        SolverStats {
            learnts: self.learnts.len() as u64,
            ..self.stats
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    /// Adds a clause permanently (backtracking to level 0 first).
    pub fn add_clause(&mut self, lits: &[Lit]) -> Result<()> {
        if let Some(l) = lits.iter().find(|l| l.var().index() >= self.num_vars) {
            return Err(Error::MalformedInstance(format!(
                "literal {l} outside the {} declared variables",
                self.num_vars
            )));
        }
        self.cancel_until(0);
        if !self.ok {
            return Ok(());
        }
        let mut c = lits.to_vec();
        c.sort_unstable();
        c.dedup();
        if c.windows(2).any(|w| w[0] == !w[1]) || c.iter().any(|&l| lit_value(&self.values, l) == TRUE) {
            return Ok(());
        }
        c.retain(|&l| lit_value(&self.values, l) == 0);
        match c.len() {
            0 => self.ok = false,
            1 => {
                self.assign(c[0], NO_REASON);
                if self.propagate().is_some() {
                    self.ok = false;
                }
            }
            _ => {
                let cref = self.alloc(&c, false, 0);
                self.attach(cref);
            }
        }
        Ok(())
    }

    fn alloc(&mut self, lits: &[Lit], learnt: bool, lbd: u32) -> u32 {
        self.db.alloc(lits, learnt, lbd)
    }

    fn attach(&mut self, cref: u32) {
        let lits = self.db.lits(cref);
        let (a, b) = (lits[0], lits[1]);
        self.watches[(!a).code()].push(Watcher { cref, blocker: b });
        self.watches[(!b).code()].push(Watcher { cref, blocker: a });
    }

    #[inline]
    fn assign(&mut self, l: Lit, reason: u32) {
        let v = l.var().index();
        self.values[v] = if l.is_positive() { TRUE } else { FALSE };
        self.levels[v] = self.decision_level();
        self.reasons[v] = reason;
        self.trail.push(l);
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let start = self.trail_lim[level as usize];
        for i in (start..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var();
            self.values[v.index()] = 0;
            self.reasons[v.index()] = NO_REASON;
            self.polarity[v.index()] = l.is_positive();
            self.order.insert(v);
        }
        self.trail.truncate(start);
        self.trail_lim.truncate(level as usize);
        self.qhead = start;
    }

    /// Unit propagation; returns a falsified clause on conflict.
    fn propagate(&mut self) -> Option<u32> {
        let mut conflict = None;
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[p.code()]);
            let (mut i, mut j) = (0, 0);
            'watchers: while i < ws.len() {
                let w = ws[i];
                i += 1;
                if lit_value(&self.values, w.blocker) == TRUE {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref;
                let lits = self.db.lits_mut(cref);
                if lits[0] == false_lit {
                    lits.swap(0, 1);
                }
                let first = lits[0];
                let nw = Watcher { cref, blocker: first };
                if first != w.blocker && lit_value(&self.values, first) == TRUE {
                    ws[j] = nw;
                    j += 1;
                    continue;
                }
                for k in 2..lits.len() {
                    if lit_value(&self.values, lits[k]) != FALSE {
                        lits.swap(1, k);
                        let watch = (!lits[1]).code();
                        self.watches[watch].push(nw);
                        continue 'watchers;
                    }
                }
                ws[j] = nw;
                j += 1;
                if lit_value(&self.values, first) == FALSE {
                    conflict = Some(cref);
                    self.qhead = self.trail.len();
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.assign(first, cref);
                }
            }
            ws.truncate(j);
            self.watches[p.code()] = ws;
            if conflict.is_some() {
                break;
            }
        }
        conflict
    }

    fn bump_var(&mut self, v: Var) {
        let a = &mut self.order.activity[v.index()];
        *a += self.var_inc;
        if *a > 1e100 {
            self.order.rescale(1e-100);
            self.var_inc *= 1e-100;
        }
        self.order.increased(v);
    }

    fn bump_clause(&mut self, cref: u32) {
        if !self.db.is_learnt(cref) {
            return;
        }
        let a = self.db.activity(cref) + self.cla_inc;
        self.db.set_activity(cref, a);
        if a > 1e20 {
            for &l in &self.learnts {
                let scaled = self.db.activity(l) * 1e-20;
                self.db.set_activity(l, scaled);
            }
            self.cla_inc *= 1e-20;
        }
    }

    fn abstract_level(&self, v: Var) -> u32 {
        1 << (self.levels[v.index()] & 31)
    }

    /// First-UIP analysis of a falsified clause whose literals include at
    /// least one from the current decision level.
    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, u32) {
        let current = self.decision_level();
        let mut learnt = vec![Lit::pos(Var(0))];
        let mut path = 0usize;
        let mut skip_first = false;
        let mut index = self.trail.len();
        let uip = loop {
            self.bump_clause(confl);
            let len = self.db.len(confl);
            for k in usize::from(skip_first)..len {
                let q = self.db.lits(confl)[k];
                let v = q.var();
                if !self.seen[v.index()] && self.levels[v.index()] > 0 {
                    self.bump_var(v);
                    self.seen[v.index()] = true;
                    if self.levels[v.index()] >= current {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var().index()] {
                    break;
                }
            }
            let p = self.trail[index];
            self.seen[p.var().index()] = false;
            path -= 1;
            if path == 0 {
                break p;
            }
            confl = self.reasons[p.var().index()];
            skip_first = true;
        };
        learnt[0] = !uip;

        // Recursive minimization.
        self.to_clear.clear();
        self.to_clear.extend_from_slice(&learnt);
        let abstract_levels = learnt[1..].iter().fold(0, |acc, l| acc | self.abstract_level(l.var()));
        let mut j = 1;
        for i in 1..learnt.len() {
            let l = learnt[i];
            if self.reasons[l.var().index()] == NO_REASON || !self.redundant(l, abstract_levels) {
                learnt[j] = l;
                j += 1;
            }
        }
        learnt.truncate(j);
        for k in 0..self.to_clear.len() {
            let v = self.to_clear[k].var().index();
            self.seen[v] = false;
        }

        let bt = if learnt.len() == 1 {
            0
        } else {
            let (max_i, _) = learnt
                .iter()
                .enumerate()
                .skip(1)
                .max_by_key(|(_, l)| self.levels[l.var().index()])
                .expect("non-empty tail");
            learnt.swap(1, max_i);
            self.levels[learnt[1].var().index()]
        };
        (learnt, bt)
    }

    /// Whether `p` (a false literal of the learnt clause) is implied by the
    /// other literals already in it.
    fn redundant(&mut self, p: Lit, abstract_levels: u32) -> bool {
        let top = self.to_clear.len();
        let mut stack = vec![p];
        while let Some(q) = stack.pop() {
            let cref = self.reasons[q.var().index()];
            let len = self.db.len(cref);
            for k in 1..len {
                let l = self.db.lits(cref)[k];
                let v = l.var().index();
                if self.seen[v] || self.levels[v] == 0 {
                    continue;
                }
                if self.reasons[v] != NO_REASON && self.abstract_level(l.var()) & abstract_levels != 0 {
                    self.seen[v] = true;
                    stack.push(l);
                    self.to_clear.push(l);
                } else {
                    for t in top..self.to_clear.len() {
                        let v = self.to_clear[t].var().index();
                        self.seen[v] = false;
                    }
                    self.to_clear.truncate(top);
                    return false;
                }
            }
        }
        true
    }

    fn lbd(&mut self, lits: &[Lit]) -> u32 {
        self.stamp += 1;
        let mut count = 0;
        for l in lits {
            let lvl = self.levels[l.var().index()] as usize;
            if self.level_stamp[lvl] != self.stamp {
                self.level_stamp[lvl] = self.stamp;
                count += 1;
            }
        }
        count
    }

    /// Learns from a conflict and backjumps, leaving the asserting literal
    /// on the propagation queue.
    fn learn_from(&mut self, confl: u32) {
        let (learnt, bt) = self.analyze(confl);
        self.cancel_until(bt);
        if learnt.len() == 1 {
            self.assign(learnt[0], NO_REASON);
        } else {
            let lbd = self.lbd(&learnt);
            let first = learnt[0];
            let cref = self.alloc(&learnt, true, lbd);
            self.attach(cref);
            self.learnts.push(cref);
            self.bump_clause(cref);
            self.assign(first, cref);
        }
        self.var_inc /= self.config.var_decay;
        self.cla_inc /= self.config.clause_decay as f32;
    }

    /// Handles a clause from the theory callback. Returns `false` when the
    /// problem became unsatisfiable.
    fn theory_conflict(&mut self, mut clause: Vec<Lit>) -> Result<bool> {
        if let Some(l) = clause
            .iter()
            .find(|l| l.var().index() >= self.num_vars || lit_value(&self.values, **l) != FALSE)
        {
            return Err(Error::ContractViolation(format!(
                "theory clause literal {l} is not falsified by the current assignment"
            )));
        }
        clause.sort_unstable();
        clause.dedup();
        let Some(max_level) = clause.iter().map(|l| self.levels[l.var().index()]).max() else {
            return Ok(false);
        };
        if max_level == 0 {
            return Ok(false);
        }
        self.cancel_until(max_level);
        if clause.len() == 1 {
            self.cancel_until(0);
            self.assign(clause[0], NO_REASON);
            return Ok(true);
        }
        clause.sort_by_key(|l| std::cmp::Reverse(self.levels[l.var().index()]));
        let lbd = self.lbd(&clause);
        let cref = self.alloc(&clause, true, lbd);
        self.attach(cref);
        self.learnts.push(cref);
        self.learn_from(cref);
        Ok(true)
    }

    fn locked(&self, cref: u32) -> bool {
        let l = self.db.lits(cref)[0];
        lit_value(&self.values, l) == TRUE && self.reasons[l.var().index()] == cref
    }

    /// Deletes about half of the learnt clauses, keeping glue clauses
    /// (LBD <= 2) and reasons.
    fn reduce_db(&mut self) {
        let mut cands: Vec<u32> = self
            .learnts
            .iter()
            .copied()
            .filter(|&c| self.db.lbd(c) > 2 && !self.locked(c))
            .collect();
        let db = &self.db;
        cands.sort_by(|&x, &y| {
            db.lbd(y)
                .cmp(&db.lbd(x))
                .then(db.activity(x).total_cmp(&db.activity(y)))
        });
        let remove = cands.len() / 2;
        for &c in &cands[..remove] {
            self.db.delete(c);
        }
        self.stats.deleted += remove as u64;
        let db = &self.db;
        for ws in &mut self.watches {
            ws.retain(|w| !db.is_deleted(w.cref));
        }
        self.learnts.retain(|&c| !db.is_deleted(c));
        if self.db.needs_compaction() {
            self.compact();
        }
        self.max_learnts *= 1.1;
    }

    /// Rebuilds the clause buffer without deleted clauses and rewrites every
    /// reference to it.
    fn compact(&mut self) {
        let moves = self.db.compact();
        let moved = |c: u32| arena::relocate(&moves, c).expect("live clause");
        for ws in &mut self.watches {
            for w in ws.iter_mut() {
                w.cref = moved(w.cref);
            }
        }
        for r in &mut self.reasons {
            if *r != NO_REASON {
                *r = moved(*r);
            }
        }
        for c in &mut self.learnts {
            *c = moved(*c);
        }
    }

    fn luby(y: f64, mut x: u64) -> f64 {
        let (mut size, mut seq) = (1u64, 0i32);
        while size < x + 1 {
            seq += 1;
            size = 2 * size + 1;
        }
        while size - 1 != x {
            size = (size - 1) >> 1;
            seq -= 1;
            x %= size;
        }
        y.powi(seq)
    }

    /// Solves from the current clause database. The solver can be reused
    /// afterwards (e.g. after adding blocking clauses).
    pub fn solve(&mut self, theory: &mut dyn TheoryCallback) -> Result<SolveResult> {
        if !self.ok {
            return Ok(SolveResult::Unsat);
        }
        self.cancel_until(0);
        let mut restart = 0;
        loop {
            let budget = (Self::luby(2.0, restart) * self.config.restart_base as f64) as u64;
            if let Some(r) = self.search(budget, theory)? {
                if r == SolveResult::Unsat {
                    self.ok = false;
                }
                return Ok(r);
            }
            restart += 1;
            self.stats.restarts += 1;
        }
    }

    fn search(&mut self, budget: u64, theory: &mut dyn TheoryCallback) -> Result<Option<SolveResult>> {
        let mut conflicts = 0u64;
        let mut ticks = 0u32;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                conflicts += 1;
                if self.decision_level() == 0 {
                    return Ok(Some(SolveResult::Unsat));
                }
                self.learn_from(confl);
                continue;
            }
            let clause = theory.check(&Assignment {
                values: &self.values,
                levels: &self.levels,
                trail: &self.trail,
                decision_level: self.decision_level(),
            });
            if let Some(clause) = clause {
                self.stats.theory_conflicts += 1;
                conflicts += 1;
                if !self.theory_conflict(clause)? {
                    return Ok(Some(SolveResult::Unsat));
                }
                continue;
            }
            if conflicts >= budget {
                self.cancel_until(0);
                return Ok(None);
            }
            ticks = ticks.wrapping_add(1);
            if ticks.is_multiple_of(256) {
                if let Some(deadline) = self.config.deadline {
                    if Instant::now() >= deadline {
                        self.cancel_until(0);
                        return Ok(Some(SolveResult::Unknown));
                    }
                }
            }
            if self.learnts.len() as f64 >= self.max_learnts + self.trail.len() as f64 {
                self.reduce_db();
            }
            let next = loop {
                match self.order.pop() {
                    None => break None,
                    Some(v) if self.values[v.index()] == 0 => break Some(v),
                    Some(_) => {}
                }
            };
            let Some(v) = next else {
                let model = self.values.iter().map(|&x| x == TRUE).collect();
                return Ok(Some(SolveResult::Sat(model)));
            };
            self.stats.decisions += 1;
            self.trail_lim.push(self.trail.len());
            self.assign(Lit::new(v, self.polarity[v.index()]), NO_REASON);
        }
    }
}

/// Solves an instance once.
pub fn solve(inst: &CnfInstance, theory: &mut dyn TheoryCallback, config: SolverConfig) -> Result<SolveResult> {
    Solver::from_instance(inst, config)?.solve(theory)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    /// Full models (including auxiliaries), pairwise distinct on the
    /// problem variables, in the order found.
    pub models: Vec<Vec<bool>>,
    /// False when the deadline stopped the enumeration early.
    pub complete: bool,
    pub stats: SolverStats,
}

/// All models, distinct on the problem variables: after each model a
/// clause blocking its problem-variable assignment is added.
pub fn enumerate_all(inst: &CnfInstance, theory: &mut dyn TheoryCallback, config: SolverConfig) -> Result<Enumeration> {
    let mut solver = Solver::from_instance(inst, config)?;
    let np = inst.problem_vars();
    let mut models = Vec::new();
    let complete = loop {
        match solver.solve(theory)? {
            SolveResult::Sat(model) => {
                let block: Vec<Lit> = (0..np).map(|v| Lit::new(Var(v as u32), !model[v])).collect();
                models.push(model);
                solver.add_clause(&block)?;
            }
            SolveResult::Unsat => break true,
            SolveResult::Unknown => break false,
        }
    };
    Ok(Enumeration {
        models,
        complete,
        stats: solver.stats(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn lit(v: i64) -> Lit {
        Lit::from_dimacs(v).unwrap()
    }

    fn inst(num_vars: usize, clauses: &[&[i64]]) -> CnfInstance {
        let clauses = clauses.iter().map(|c| c.iter().map(|&v| lit(v)).collect()).collect();
        CnfInstance::new(num_vars, clauses).unwrap()
    }

    fn brute_models(inst: &CnfInstance) -> Vec<Vec<bool>> {
        (0u64..1 << inst.num_vars)
            .map(|b| (0..inst.num_vars).map(|i| b >> i & 1 == 1).collect::<Vec<_>>())
            .filter(|m| inst.satisfied_by(m))
            .collect()
    }

    fn random_3cnf(rng: &mut ChaCha8Rng, vars: usize, clauses: usize) -> CnfInstance {
        let cs = (0..clauses)
            .map(|_| {
                (0..3)
                    .map(|_| Lit::new(Var(rng.gen_range(0..vars as u32)), rng.gen()))
                    .collect()
            })
            .collect();
        CnfInstance::new(vars, cs).unwrap()
    }

    #[test]
    fn contradiction_is_unsat() {
        let i = inst(1, &[&[1], &[-1]]);
        assert_eq!(
            solve(&i, &mut NoTheory, SolverConfig::default()).unwrap(),
            SolveResult::Unsat
        );
        let e = inst(1, &[&[]]);
        assert_eq!(
            solve(&e, &mut NoTheory, SolverConfig::default()).unwrap(),
            SolveResult::Unsat
        );
    }

    #[test]
    fn free_variables_enumerate() {
        let i = inst(2, &[]);
        let e = enumerate_all(&i, &mut NoTheory, SolverConfig::default()).unwrap();
        assert!(e.complete);
        assert_eq!(e.models.len(), 4);
        let none = inst(0, &[]);
        assert_eq!(
            enumerate_all(&none, &mut NoTheory, SolverConfig::default())
                .unwrap()
                .models
                .len(),
            1
        );
    }

    #[test]
    fn random_3cnf_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for round in 0..60 {
            let vars = rng.gen_range(3..=14);
            let ratio = rng.gen_range(2.0..6.0);
            let i = random_3cnf(&mut rng, vars, (vars as f64 * ratio) as usize);
            let mut want = brute_models(&i);
            want.sort();
            match solve(&i, &mut NoTheory, SolverConfig::default()).unwrap() {
                SolveResult::Sat(m) => assert!(i.satisfied_by(&m), "round {round}"),
                SolveResult::Unsat => assert!(want.is_empty(), "round {round}"),
                SolveResult::Unknown => unreachable!(),
            }
            let mut got = enumerate_all(&i, &mut NoTheory, SolverConfig::default())
                .unwrap()
                .models;
            got.sort();
            assert_eq!(got, want, "round {round}");
        }
    }

    #[test]
    fn pigeonhole_is_unsat() {
        // 5 pigeons, 4 holes.
        let (p, h) = (5, 4);
        let var = |i: usize, j: usize| (i * h + j + 1) as i64;
        let mut cs: Vec<Vec<i64>> = (0..p).map(|i| (0..h).map(|j| var(i, j)).collect()).collect();
        for j in 0..h {
            for a in 0..p {
                for b in a + 1..p {
                    cs.push(vec![-var(a, j), -var(b, j)]);
                }
            }
        }
        let refs: Vec<&[i64]> = cs.iter().map(|c| c.as_slice()).collect();
        let i = inst(p * h, &refs);
        assert_eq!(
            solve(&i, &mut NoTheory, SolverConfig::default()).unwrap(),
            SolveResult::Unsat
        );
    }

    #[test]
    fn theory_clauses_restrict_models() {
        // Theory forbids any complete assignment with more than one true
        // variable among 4 free variables: 5 models remain.
        let i = inst(4, &[]);
        let mut theory = |a: &Assignment<'_>| {
            let trues: Vec<Var> = (0..4).map(Var).filter(|&v| a.value(v) == Some(true)).collect();
            (trues.len() > 1).then(|| trues[..2].iter().map(|&v| Lit::neg(v)).collect())
        };
        let e = enumerate_all(&i, &mut theory, SolverConfig::default()).unwrap();
        assert_eq!(e.models.len(), 5);
        assert!(e.stats.theory_conflicts > 0);
    }

    #[test]
    fn non_falsified_theory_clause_is_rejected() {
        let i = inst(2, &[&[1]]);
        let mut theory = |_: &Assignment<'_>| Some(vec![lit(1)]);
        assert!(matches!(
            solve(&i, &mut theory, SolverConfig::default()),
            Err(Error::ContractViolation(_))
        ));
    }

    #[test]
    fn theory_unsat_at_root() {
        let i = inst(2, &[&[1], &[2]]);
        let mut theory = |a: &Assignment<'_>| (a.value(Var(0)) == Some(true)).then(|| vec![lit(-1)]);
        assert_eq!(
            solve(&i, &mut theory, SolverConfig::default()).unwrap(),
            SolveResult::Unsat
        );
    }

    #[test]
    fn luby_sequence() {
        let seq: Vec<f64> = (0..10).map(|i| Solver::luby(2.0, i)).collect();
        assert_eq!(seq, vec![1.0, 1.0, 2.0, 1.0, 1.0, 2.0, 4.0, 1.0, 1.0, 2.0]);
    }

    #[test]
    fn deadline_in_the_past_gives_unknown() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let i = random_3cnf(&mut rng, 200, 850);
        let cfg = SolverConfig {
            deadline: Some(Instant::now()),
            ..Default::default()
        };
        let r = solve(&i, &mut NoTheory, cfg).unwrap();
        assert!(matches!(
            r,
            SolveResult::Unknown | SolveResult::Sat(_) | SolveResult::Unsat
        ));
    }
}
