//! CNF encoding of one subproblem.
//!
//! Entries with index above `h = (n - 1) / 2` are expressed through the
//! skew (`x_k = -x_{n-k}`) and symmetric (`d_k = d_{n-k}`) identities, and
//! the diagonal entries are the constant `+1`, so only the `2n - 2` entries
//! `x_1..x_h` of each role are variables.
//!
//! A compression constraint fixes how many of the entries in one residue
//! class are `+1`. After folding constants, literal pairs `v, -v` (which
//! contribute exactly one `+1`) and repeated literals, what remains is an
//! "exactly `p` of these literals" constraint, emitted as all
//! `(q - p + 1)`-subsets (at least `p`) and all negated `(p + 1)`-subsets
//! (at most `p`). For three literals and `p = 2` these are the usual three
//! binary clauses and one ternary clause.

use std::collections::{BTreeMap, HashSet};

use crate::cnf::{CnfInstance, InstanceMeta, Lit, Var, VarMap};
use crate::designs::Quadruple;
use crate::divide::CompressedQuadruple;
use crate::error::{Error, Result};
use crate::seqcore::{OrderParams, PmSequence, Role, Symmetry};

/// An entry of a row in terms of the instance variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Term {
    Const(bool),
    Lit(Lit),
}

/// Maps entry `index` (any residue mod `n`) of `role` to a constant or a
/// literal over the role's block.
pub fn entry_term(var_map: &VarMap, n: usize, role: Role, index: usize) -> Term {
    let h = var_map.half_len();
    let index = index % n;
    if index == 0 {
        Term::Const(true)
    } else if index <= h {
        Term::Lit(Lit::pos(var_map.var(role, index)))
    } else {
        let v = var_map.var(role, n - index);
        match role.symmetry() {
            Symmetry::Skew => Term::Lit(Lit::neg(v)),
            Symmetry::Symmetric => Term::Lit(Lit::pos(v)),
        }
    }
}

/// Clause list with tautology removal and exact-duplicate suppression.
#[derive(Debug, Default)]
pub struct ClauseSet {
    clauses: Vec<Vec<Lit>>,
    seen: HashSet<Vec<Lit>>,
}

impl ClauseSet {
    pub fn push(&mut self, clause: Vec<Lit>) {
        let mut key = clause.clone();
        key.sort_unstable();
        key.dedup();
        if key.windows(2).any(|w| w[0] == !w[1]) {
            return;
        }
        if self.seen.insert(key) {
            let mut clause = clause;
            let mut kept = HashSet::new();
            clause.retain(|l| kept.insert(*l));
            self.clauses.push(clause);
        }
    }

    pub fn extend(&mut self, clauses: impl IntoIterator<Item = Vec<Lit>>) {
        for c in clauses {
            self.push(c);
        }
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn into_vec(self) -> Vec<Vec<Lit>> {
        self.clauses
    }
}

fn subsets<T: Copy>(items: &[T], size: usize, out: &mut Vec<Vec<T>>) {
    fn go<T: Copy>(items: &[T], size: usize, start: usize, cur: &mut Vec<T>, out: &mut Vec<Vec<T>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < size - cur.len() {
                break;
            }
            cur.push(items[i]);
            go(items, size, i + 1, cur, out);
            cur.pop();
        }
    }
    go(items, size, 0, &mut Vec::with_capacity(size), out);
}

/// Clauses forcing exactly `p` of the distinct-variable literals `lits` to
/// be true.
fn exactly(lits: &[Lit], p: usize) -> Vec<Vec<Lit>> {
    let q = lits.len();
    debug_assert!(p <= q);
    let mut out = Vec::new();
    if p == q {
        return lits.iter().map(|&l| vec![l]).collect();
    }
    if p == 0 {
        return lits.iter().map(|&l| vec![!l]).collect();
    }
    subsets(lits, q - p + 1, &mut out);
    let mut at_most = Vec::new();
    let negated: Vec<Lit> = lits.iter().map(|&l| !l).collect();
    subsets(&negated, p + 1, &mut at_most);
    out.extend(at_most);
    out
}

/// Clauses forcing `sum_v coef_v [v] = target` by blocking every wrong
/// assignment of the (few) variables involved.
fn weighted_exactly(coefs: &[(Var, i64)], target: i64) -> Vec<Vec<Lit>> {
    let k = coefs.len();
    let mut out = Vec::new();
    for bits in 0u32..1 << k {
        let sum: i64 = coefs
            .iter()
            .enumerate()
            .filter(|&(i, _)| bits >> i & 1 == 1)
            .map(|(_, &(_, c))| c)
            .sum();
        if sum != target {
            out.push(
                coefs
                    .iter()
                    .enumerate()
                    .map(|(i, &(v, _))| Lit::new(v, bits >> i & 1 == 0))
                    .collect(),
            );
        }
    }
    out
}

/// Clauses stating that the entries at `indices` of `role` contain exactly
/// `plus` entries equal to `+1`.
fn count_constraint(var_map: &VarMap, n: usize, role: Role, indices: &[usize], plus: i64) -> Result<Vec<Vec<Lit>>> {
    // [v] appears with signed multiplicity: a positive and b negative
    // occurrences contribute b + (a - b) [v].
    let mut target = plus;
    let mut coef: BTreeMap<Var, i64> = BTreeMap::new();
    for &i in indices {
        match entry_term(var_map, n, role, i) {
            Term::Const(true) => target -= 1,
            Term::Const(false) => {}
            Term::Lit(l) => {
                if l.is_positive() {
                    *coef.entry(l.var()).or_default() += 1;
                } else {
                    target -= 1;
                    *coef.entry(l.var()).or_default() -= 1;
                }
            }
        }
    }
    coef.retain(|_, c| *c != 0);
    let infeasible = || {
        Error::InvalidSubproblem(format!(
            "no {role} row has {plus} entries equal to +1 among indices {indices:?}"
        ))
    };
    if coef.values().all(|c| c.abs() == 1) {
        // -[v] = [-v] - 1
        let mut lits = Vec::with_capacity(coef.len());
        for (&v, &c) in &coef {
            if c == 1 {
                lits.push(Lit::pos(v));
            } else {
                lits.push(Lit::neg(v));
                target += 1;
            }
        }
        if target < 0 || target as usize > lits.len() {
            return Err(infeasible());
        }
        return Ok(exactly(&lits, target as usize));
    }
    let coefs: Vec<(Var, i64)> = coef.into_iter().collect();
    let clauses = weighted_exactly(&coefs, target);
    if clauses.len() == 1 << coefs.len() {
        return Err(infeasible());
    }
    Ok(clauses)
}

/// Compression constraints of a subproblem: for every role and residue
/// class `k` mod `m`, the entries `x_k, x_{k+m}, ...` sum to the
/// compressed value. With `d = 1` every variable is fixed by a unit clause.
pub fn encode_compression(cq: &CompressedQuadruple, var_map: &VarMap) -> Result<Vec<Vec<Lit>>> {
    let p = cq.params();
    let (n, d, m) = (p.n(), p.d(), p.m());
    let mut out = ClauseSet::default();
    for role in Role::ALL {
        let row = cq.get(role);
        for k in 0..m {
            let t = i64::from(row.entries()[k]);
            if t.abs() > d as i64 || (t + d as i64) % 2 != 0 {
                return Err(Error::InvalidSubproblem(format!(
                    "{role} class {k} has value {t}, not a sum of {d} signs"
                )));
            }
            let indices: Vec<usize> = (0..d).map(|j| k + j * m).collect();
            out.extend(count_constraint(var_map, n, role, &indices, (t + d as i64) / 2)?);
        }
    }
    Ok(out.into_vec())
}

/// Product constraints `a_k b_k c_k d_k a_2k b_2k c_2k = -1` for
/// `k = 1..n-1`, reduced to a parity over distinct variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductEncoding {
    pub clauses: Vec<Vec<Lit>>,
    pub aux_vars: usize,
    /// Constraints emitted as an XNOR chain (the others reduced to a unit
    /// or to nothing).
    pub chains: usize,
}

/// Product constraint for shift `k`: the variables with odd multiplicity
/// and whether their product must be `+1`.
fn product_key(var_map: &VarMap, n: usize, k: usize) -> (Vec<Var>, bool) {
    let terms = [
        (Role::A, k),
        (Role::B, k),
        (Role::C, k),
        (Role::D, k),
        (Role::A, 2 * k),
        (Role::B, 2 * k),
        (Role::C, 2 * k),
    ];
    // Product of the entries must be -1.
    let mut want_plus = false;
    let mut odd: BTreeMap<Var, bool> = BTreeMap::new();
    for (role, i) in terms {
        match entry_term(var_map, n, role, i) {
            Term::Const(c) => want_plus ^= !c,
            Term::Lit(l) => {
                if !l.is_positive() {
                    want_plus = !want_plus;
                }
                let e = odd.entry(l.var()).or_insert(false);
                *e = !*e;
            }
        }
    }
    let vars = odd.into_iter().filter(|&(_, o)| o).map(|(v, _)| v).collect();
    (vars, want_plus)
}

/// `x = p * q` over `±1` values, i.e. `x <-> (p <-> q)`.
fn xnor_clauses(x: Lit, p: Lit, q: Lit) -> [Vec<Lit>; 4] {
    [vec![x, p, q], vec![!x, !p, q], vec![x, !p, !q], vec![!x, p, !q]]
}

/// Emits the product constraints, allocating chain auxiliaries from
/// `first_aux` upwards. Constraints for `k` and `n - k` coincide and are
/// emitted once.
pub fn encode_product_constraints(n: usize, var_map: &VarMap, first_aux: usize) -> ProductEncoding {
    let mut seen = HashSet::new();
    let mut clauses = ClauseSet::default();
    let mut next_aux = first_aux;
    let mut chains = 0;
    for k in 1..n {
        let (vars, want_plus) = product_key(var_map, n, k);
        if !seen.insert((vars.clone(), want_plus)) {
            continue;
        }
        match vars.as_slice() {
            [] => {
                if !want_plus {
                    clauses.push(Vec::new());
                }
            }
            [v] => clauses.push(vec![Lit::new(*v, want_plus)]),
            [first, rest @ ..] => {
                let mut acc = Lit::pos(*first);
                for &v in rest {
                    let x = Lit::pos(Var(next_aux as u32));
                    next_aux += 1;
                    clauses.extend(xnor_clauses(x, acc, Lit::pos(v)));
                    acc = x;
                }
                clauses.push(vec![Lit::new(acc.var(), want_plus)]);
                chains += 1;
            }
        }
    }
    ProductEncoding {
        clauses: clauses.into_vec(),
        aux_vars: next_aux - first_aux,
        chains,
    }
}

/// The complete instance for one subproblem.
pub fn build_instance(cq: &CompressedQuadruple) -> Result<CnfInstance> {
    let params = *cq.params();
    let n = params.n();
    let base = VarMap::new(n, 0);
    let mut clauses = ClauseSet::default();
    clauses.extend(encode_compression(cq, &base)?);
    let products = encode_product_constraints(n, &base, base.problem_vars());
    clauses.extend(products.clauses);
    let var_map = VarMap::new(n, products.aux_vars);
    let inst = CnfInstance {
        num_vars: var_map.num_vars(),
        clauses: clauses.into_vec(),
        meta: Some(InstanceMeta {
            params,
            var_map,
            subproblem: Some(cq.clone()),
        }),
    };
    inst.validate()?;
    Ok(inst)
}

/// Reads the four rows off a model (indexed by variable).
pub fn decode_model(params: &OrderParams, var_map: &VarMap, model: &[bool]) -> Result<Quadruple> {
    let n = params.n();
    let h = var_map.half_len();
    if model.len() < var_map.problem_vars() {
        return Err(Error::MalformedInstance(format!(
            "model has {} values, layout needs {}",
            model.len(),
            var_map.problem_vars()
        )));
    }
    let rows: Vec<PmSequence> = Role::ALL
        .into_iter()
        .map(|role| {
            let half: Vec<i8> = (1..=h)
                .map(|i| if model[var_map.var(role, i).index()] { 1 } else { -1 })
                .collect();
            PmSequence::complete_half(&half, role.symmetry(), n)
        })
        .collect::<Result<_>>()?;
    Quadruple::from_array(rows.try_into().expect("four rows"))
}

/// Inverse of [`decode_model`] on the problem variables; auxiliaries are
/// left false.
pub fn encode_model(q: &Quadruple, var_map: &VarMap) -> Vec<bool> {
    let mut model = vec![false; var_map.num_vars()];
    for role in Role::ALL {
        let row = q.get(role).entries();
        for i in 1..=var_map.half_len() {
            model[var_map.var(role, i).index()] = row[i] > 0;
        }
    }
    model
}
