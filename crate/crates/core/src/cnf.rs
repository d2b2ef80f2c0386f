//! Variables, literals, CNF instances and DIMACS input/output.
//!
//! Problem variables are laid out in role blocks: `a_1..a_h`, then the `b`,
//! `c` and `d` blocks (`h = (n - 1) / 2`), followed by auxiliary variables.
//! A variable is true when its entry is `+1`.

use std::fmt;
use std::io::{BufRead, Write};
use std::ops::{Not, Range};

use crate::divide::CompressedQuadruple;
use crate::error::{Error, Result};
use crate::formats::parse_subproblem;
use crate::seqcore::{OrderParams, Role};

/// Zero-based variable index; DIMACS ids are `index + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub u32);

impl Var {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A literal packed as `2 * var + negated`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    #[inline]
    pub fn new(var: Var, positive: bool) -> Self {
        Lit(var.0 << 1 | u32::from(!positive))
    }

    #[inline]
    pub fn pos(var: Var) -> Self {
        Lit::new(var, true)
    }

    #[inline]
    pub fn neg(var: Var) -> Self {
        Lit::new(var, false)
    }

    #[inline]
    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    /// Inverse of [`Lit::code`].
    #[inline]
    pub(crate) fn from_code(code: u32) -> Self {
        Lit(code)
    }

    /// Dense index usable for per-literal tables.
    #[inline]
    pub fn code(self) -> usize {
        self.0 as usize
    }

    pub fn from_dimacs(v: i64) -> Option<Self> {
        if v == 0 || v.unsigned_abs() > u64::from(u32::MAX >> 1) {
            return None;
        }
        Some(Lit::new(Var(v.unsigned_abs() as u32 - 1), v > 0))
    }

    pub fn to_dimacs(self) -> i64 {
        let id = i64::from(self.var().0) + 1;
        if self.is_positive() {
            id
        } else {
            -id
        }
    }

    /// Whether the literal is true under the given variable value.
    #[inline]
    pub fn holds(self, value: bool) -> bool {
        value == self.is_positive()
    }
}

impl Not for Lit {
    type Output = Lit;

    #[inline]
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Problem { role: Role, index: usize },
    Aux(usize),
}

/// Bijection between variable indices and `(role, index)` pairs plus
/// auxiliaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VarMap {
    half: usize,
    aux: usize,
}

impl VarMap {
    pub fn new(n: usize, aux: usize) -> Self {
        VarMap {
            half: n.saturating_sub(1) / 2,
            aux,
        }
    }

    pub fn half_len(&self) -> usize {
        self.half
    }

    /// `2n - 2` for odd `n`.
    pub fn problem_vars(&self) -> usize {
        4 * self.half
    }

    pub fn aux_vars(&self) -> usize {
        self.aux
    }

    pub fn num_vars(&self) -> usize {
        self.problem_vars() + self.aux
    }

    /// Variable of entry `index` (`1..=h`) of `role`.
    pub fn var(&self, role: Role, index: usize) -> Var {
        debug_assert!((1..=self.half).contains(&index));
        Var((role.index() * self.half + index - 1) as u32)
    }

    pub fn aux(&self, j: usize) -> Var {
        debug_assert!(j < self.aux);
        Var((self.problem_vars() + j) as u32)
    }

    pub fn block(&self, role: Role) -> Range<usize> {
        let start = role.index() * self.half;
        start..start + self.half
    }

    pub fn kind(&self, v: Var) -> Option<VarKind> {
        let i = v.index();
        if i < self.problem_vars() {
            let role = Role::from_index(i / self.half)?;
            Some(VarKind::Problem {
                role,
                index: i % self.half + 1,
            })
        } else if i < self.num_vars() {
            Some(VarKind::Aux(i - self.problem_vars()))
        } else {
            None
        }
    }
}

/// Order, compression and variable layout attached to a generated instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceMeta {
    pub params: OrderParams,
    pub var_map: VarMap,
    pub subproblem: Option<CompressedQuadruple>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfInstance {
    pub num_vars: usize,
    pub clauses: Vec<Vec<Lit>>,
    /// Present for instances built from a subproblem; external DIMACS files
    /// without `c meta` comments have none.
    pub meta: Option<InstanceMeta>,
}

impl CnfInstance {
    pub fn new(num_vars: usize, clauses: Vec<Vec<Lit>>) -> Result<Self> {
        let inst = CnfInstance {
            num_vars,
            clauses,
            meta: None,
        };
        inst.validate()?;
        Ok(inst)
    }

    /// Checks that every literal names a declared variable and that the
    /// metadata (if any) matches the variable count.
    pub fn validate(&self) -> Result<()> {
        for (i, clause) in self.clauses.iter().enumerate() {
            if let Some(l) = clause.iter().find(|l| l.var().index() >= self.num_vars) {
                return Err(Error::MalformedInstance(format!(
                    "clause {} uses variable {} but only {} are declared",
                    i + 1,
                    l.var().0 + 1,
                    self.num_vars
                )));
            }
        }
        if let Some(meta) = &self.meta {
            if meta.var_map.num_vars() != self.num_vars {
                return Err(Error::MalformedInstance(format!(
                    "variable map covers {} variables, header declares {}",
                    meta.var_map.num_vars(),
                    self.num_vars
                )));
            }
        }
        Ok(())
    }

    /// Variables that blocking clauses range over during enumeration: the
    /// role blocks when the layout is known, otherwise every variable.
    pub fn problem_vars(&self) -> usize {
        self.meta.as_ref().map_or(self.num_vars, |m| m.var_map.problem_vars())
    }

    /// Whether every clause has a true literal under `model`.
    pub fn satisfied_by(&self, model: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|l| l.holds(model[l.var().index()])))
    }
}

pub fn write_dimacs<W: Write>(mut w: W, inst: &CnfInstance) -> Result<()> {
    if let Some(meta) = &inst.meta {
        let p = &meta.params;
        writeln!(w, "c meta n={} d={}", p.n(), p.d())?;
        if let Some(q) = &meta.subproblem {
            writeln!(w, "c meta subproblem {q}")?;
        }
        let vm = &meta.var_map;
        for role in Role::ALL {
            let b = vm.block(role);
            writeln!(w, "c meta block {} {} {}", role, b.start + 1, b.end)?;
        }
        writeln!(w, "c meta aux {}", vm.aux_vars())?;
    }
    writeln!(w, "p cnf {} {}", inst.num_vars, inst.clauses.len())?;
    let mut line = String::new();
    for clause in &inst.clauses {
        line.clear();
        for l in clause {
            line.push_str(&l.to_dimacs().to_string());
            line.push(' ');
        }
        line.push('0');
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Default)]
struct MetaLines {
    nd: Option<(usize, usize)>,
    subproblem: Option<(usize, String)>,
    aux: Option<usize>,
    blocks: Vec<(usize, String)>,
    first_line: usize,
}

impl MetaLines {
    fn record(&mut self, lineno: usize, rest: &str) -> Result<()> {
        if self.first_line == 0 {
            self.first_line = lineno;
        }
        let bad = |msg: &str| Error::parse(lineno, msg.to_string());
        if let Some(q) = rest.strip_prefix("subproblem ") {
            self.subproblem = Some((lineno, q.trim().to_string()));
        } else if let Some(b) = rest.strip_prefix("block ") {
            self.blocks.push((lineno, b.trim().to_string()));
        } else if let Some(a) = rest.strip_prefix("aux ") {
            self.aux = Some(a.trim().parse().map_err(|_| bad("bad auxiliary count"))?);
        } else {
            let mut n = None;
            let mut d = None;
            for field in rest.split_whitespace() {
                match field.split_once('=') {
                    Some(("n", v)) => n = Some(v.parse().map_err(|_| bad("bad n"))?),
                    Some(("d", v)) => d = Some(v.parse().map_err(|_| bad("bad d"))?),
                    _ => return Err(bad(&format!("unknown metadata {field:?}"))),
                }
            }
            match (n, d) {
                (Some(n), Some(d)) => self.nd = Some((n, d)),
                _ => return Err(bad("metadata needs n= and d=")),
            }
        }
        Ok(())
    }

    fn build(self) -> Result<Option<InstanceMeta>> {
        if self.first_line == 0 {
            return Ok(None);
        }
        let (n, d) = self
            .nd
            .ok_or_else(|| Error::parse(self.first_line, "metadata without 'n=<n> d=<d>'"))?;
        let params = OrderParams::from_n(n, Some(d)).map_err(|e| Error::parse(self.first_line, e.to_string()))?;
        let var_map = VarMap::new(n, self.aux.unwrap_or(0));
        for (lineno, text) in &self.blocks {
            let fields: Vec<&str> = text.split_whitespace().collect();
            let ok = match fields.as_slice() {
                [role, first, last] => Role::ALL.into_iter().any(|r| {
                    let b = var_map.block(r);
                    r.to_string() == *role
                        && first.parse::<usize>().ok() == Some(b.start + 1)
                        && last.parse::<usize>().ok() == Some(b.end)
                }),
                _ => false,
            };
            if !ok {
                return Err(Error::parse(
                    *lineno,
                    format!("block {text:?} does not match the layout for n={n}"),
                ));
            }
        }
        let subproblem = match self.subproblem {
            Some((lineno, text)) => Some(parse_subproblem(&text, &params).map_err(|msg| Error::parse(lineno, msg))?),
            None => None,
        };
        Ok(Some(InstanceMeta {
            params,
            var_map,
            subproblem,
        }))
    }
}

/// Reads a DIMACS CNF file. Clauses may span lines; `c meta` comments
/// restore the instance metadata.
pub fn read_dimacs<R: BufRead>(r: R) -> Result<CnfInstance> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut meta = MetaLines::default();
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    let mut last_line = 0;
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        last_line = lineno;
        let text = line.trim();
        if text.is_empty() || text == "%" {
            continue;
        }
        if let Some(rest) = text.strip_prefix('c') {
            if let Some(m) = rest.trim_start().strip_prefix("meta ") {
                meta.record(lineno, m.trim())?;
            }
            continue;
        }
        if let Some(rest) = text.strip_prefix("p ") {
            if header.is_some() {
                return Err(Error::parse(lineno, "duplicate problem line"));
            }
            let fields: Vec<&str> = rest.split_whitespace().collect();
            let parsed = match fields.as_slice() {
                ["cnf", v, c] => v.parse().ok().zip(c.parse().ok()),
                _ => None,
            };
            let (v, c) = parsed.ok_or_else(|| Error::parse(lineno, "expected 'p cnf <vars> <clauses>'"))?;
            header = Some((v, c, lineno));
            continue;
        }
        let Some((num_vars, _, _)) = header else {
            return Err(Error::parse(lineno, "clause before the problem line"));
        };
        for tok in text.split_whitespace() {
            let v: i64 = tok
                .parse()
                .map_err(|_| Error::parse(lineno, format!("{tok:?} is not a literal")))?;
            if v == 0 {
                clauses.push(std::mem::take(&mut current));
                continue;
            }
            let lit = Lit::from_dimacs(v)
                .filter(|l| l.var().index() < num_vars)
                .ok_or_else(|| Error::parse(lineno, format!("literal {v} outside 1..={num_vars}")))?;
            current.push(lit);
        }
    }
    let (num_vars, num_clauses, header_line) =
        header.ok_or_else(|| Error::parse(last_line, "missing 'p cnf' problem line"))?;
    if !current.is_empty() {
        return Err(Error::parse(last_line, "last clause is not terminated by 0"));
    }
    if clauses.len() != num_clauses {
        return Err(Error::parse(
            header_line,
            format!("header declares {num_clauses} clauses, found {}", clauses.len()),
        ));
    }
    let inst = CnfInstance {
        num_vars,
        clauses,
        meta: meta.build()?,
    };
    inst.validate().map_err(|e| Error::parse(header_line, e.to_string()))?;
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_packing() {
        let l = Lit::from_dimacs(-7).unwrap();
        assert_eq!(l.var(), Var(6));
        assert!(!l.is_positive());
        assert_eq!((!l).to_dimacs(), 7);
        assert!(l.holds(false));
        assert!(Lit::from_dimacs(0).is_none());
    }

    #[test]
    fn var_map_layout() {
        let vm = VarMap::new(7, 6);
        assert_eq!(vm.problem_vars(), 12);
        assert_eq!(vm.var(Role::C, 2), Var(7));
        assert_eq!(
            vm.kind(Var(7)),
            Some(VarKind::Problem {
                role: Role::C,
                index: 2
            })
        );
        assert_eq!(vm.kind(Var(12)), Some(VarKind::Aux(0)));
        assert_eq!(vm.kind(Var(18)), None);
    }

    #[test]
    fn empty_instance_header() {
        let inst = CnfInstance::new(5, Vec::new()).unwrap();
        let mut buf = Vec::new();
        write_dimacs(&mut buf, &inst).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "p cnf 5 0\n");
    }

    #[test]
    fn plain_round_trip() {
        let clauses = vec![
            vec![Lit::from_dimacs(1).unwrap(), Lit::from_dimacs(-3).unwrap()],
            vec![],
            vec![Lit::from_dimacs(2).unwrap()],
        ];
        let inst = CnfInstance::new(3, clauses).unwrap();
        let mut buf = Vec::new();
        write_dimacs(&mut buf, &inst).unwrap();
        assert_eq!(read_dimacs(&buf[..]).unwrap(), inst);
    }

    #[test]
    fn multi_line_clauses() {
        let inst = read_dimacs("c hello\np cnf 3 2\n1 -2\n 3 0 -1\n0\n".as_bytes()).unwrap();
        assert_eq!(inst.clauses.len(), 2);
        assert_eq!(inst.clauses[0].len(), 3);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let cases = [
            ("p cnf 2 1\n1 3 0\n", 2),
            ("1 2 0\n", 1),
            ("p cnf 2 2\n1 2 0\n", 1),
            ("p cnf 2 1\n1 x 0\n", 2),
            ("c meta n=4 d=1\np cnf 0 0\n", 1),
        ];
        for (text, want) in cases {
            match read_dimacs(text.as_bytes()) {
                Err(Error::Parse { line, .. }) => assert_eq!(line, want, "{text:?}"),
                other => panic!("{text:?}: unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn undeclared_variable_rejected() {
        let l = Lit::from_dimacs(4).unwrap();
        assert!(matches!(
            CnfInstance::new(3, vec![vec![l]]),
            Err(Error::MalformedInstance(_))
        ));
    }
}
