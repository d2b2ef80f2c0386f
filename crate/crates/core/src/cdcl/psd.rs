//! The PSD criterion as a theory callback.
//!
//! Once every variable of a role is assigned, its row and spectrum are
//! known. Since spectra are non-negative, `sum_{X in S} PSD_X(k) > 4n` for
//! any set `S` of completed roles rules out every extension, and the
//! clause "some variable of `S` differs" is learnt. Smaller sets give
//! shorter clauses, so sets are tried in order of size.

use super::{Assignment, TheoryCallback};
use crate::cnf::{CnfInstance, Lit, VarMap};
use crate::error::{Error, Result};
use crate::seqcore::{MaskSpectrum, OrderParams, Role, Symmetry};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PsdStats {
    pub checks: u64,
    /// Learnt clauses by number of roles involved (index 1..=4).
    pub conflicts_by_size: [u64; 5],
}

pub struct PsdCriterion {
    var_map: VarMap,
    bins: usize,
    bound: f64,
    tables: [MaskSpectrum; 2],
    /// Mask and spectrum (bins `0..=h`) of the last completed row per role.
    masks: [Option<u64>; 4],
    spectra: [Vec<f64>; 4],
    stats: PsdStats,
}

impl PsdCriterion {
    pub fn new(params: &OrderParams, var_map: VarMap, eps: f64) -> Result<Self> {
        if var_map.half_len() > 64 {
            return Err(Error::InvalidParams(format!(
                "order {} is too large for the spectrum callback",
                params.n()
            )));
        }
        if var_map.half_len() != params.half_len() {
            return Err(Error::MalformedInstance("variable map does not match the order".into()));
        }
        let n = params.n();
        let bins = var_map.half_len() + 1;
        Ok(PsdCriterion {
            var_map,
            bins,
            bound: params.target() as f64 + eps,
            tables: [
                MaskSpectrum::new(n, Symmetry::Skew, bins),
                MaskSpectrum::new(n, Symmetry::Symmetric, bins),
            ],
            masks: [None; 4],
            spectra: std::array::from_fn(|_| vec![0.0; bins]),
            stats: PsdStats::default(),
        })
    }

    /// The callback for an instance carrying metadata, if any.
    pub fn for_instance(inst: &CnfInstance, eps: f64) -> Result<Option<Self>> {
        match &inst.meta {
            Some(meta) => Ok(Some(Self::new(&meta.params, meta.var_map, eps)?)),
            None => Ok(None),
        }
    }

    pub fn stats(&self) -> PsdStats {
        self.stats
    }

    fn role_mask(&self, a: &Assignment<'_>, role: Role) -> Option<u64> {
        let mut mask = 0u64;
        for (bit, i) in (1..=self.var_map.half_len()).enumerate() {
            if a.value(self.var_map.var(role, i))? {
                mask |= 1 << bit;
            }
        }
        Some(mask)
    }

    /// Refreshes the cached spectrum of `role` for `mask`.
    fn load(&mut self, role: Role, mask: u64) {
        let r = role.index();
        if self.masks[r] != Some(mask) {
            let table = &self.tables[usize::from(role.symmetry() == Symmetry::Symmetric)];
            table.psd_into(mask, &mut self.spectra[r]);
            self.masks[r] = Some(mask);
        }
    }

    /// A violating set of completed roles of least size, if any.
    pub fn violation(&mut self, a: &Assignment<'_>) -> Option<Vec<Role>> {
        self.stats.checks += 1;
        let mut done = [0usize; 4];
        let mut count = 0;
        for role in Role::ALL {
            if let Some(mask) = self.role_mask(a, role) {
                self.load(role, mask);
                done[count] = role.index();
                count += 1;
            }
        }
        for size in 1..=count {
            for subset in 0u32..1 << count {
                if subset.count_ones() as usize != size {
                    continue;
                }
                let members = || (0..count).filter(move |&i| subset >> i & 1 == 1).map(|i| done[i]);
                let violated = (0..self.bins).any(|k| members().map(|r| self.spectra[r][k]).sum::<f64>() > self.bound);
                if violated {
                    self.stats.conflicts_by_size[size] += 1;
                    return Some(members().map(|r| Role::ALL[r]).collect());
                }
            }
        }
        None
    }

    /// Clause requiring some variable of `roles` to change its value.
    pub fn blocking_clause(&self, a: &Assignment<'_>, roles: &[Role]) -> Vec<Lit> {
        roles
            .iter()
            .flat_map(|&role| (1..=self.var_map.half_len()).map(move |i| (role, i)))
            .map(|(role, i)| {
                let v = self.var_map.var(role, i);
                Lit::new(v, !a.value(v).expect("role is fully assigned"))
            })
            .collect()
    }
}

impl TheoryCallback for PsdCriterion {
    fn check(&mut self, a: &Assignment<'_>) -> Option<Vec<Lit>> {
        let roles = self.violation(a)?;
        Some(self.blocking_clause(a, &roles))
    }
}
