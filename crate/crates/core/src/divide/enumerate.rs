//! Brute-force enumeration of half rows with the PSD bound filter.
//!
//! A half row is a bit mask: bit `i - 1` set means entry `i` is `+1`. The
//! spectrum of a skew or symmetric row only depends on one real sum per
//! bin,
//!
//! ```text
//! skew:      PSD(k) = 1 + (sum_i 2 x_i sin(2 pi i k / n))^2
//! symmetric: PSD(k) = (1 + sum_i 2 x_i cos(2 pi i k / n))^2
//! ```
//!
//! so the sums are split into a low and a high half of the mask and
//! tabulated once; each candidate then costs one add and one compare per bin
//! until the first violated bin. Compressions are packed into a `u128` the
//! same way (count of `+1` entries per residue class), so a candidate's
//! compression is also two table lookups.

use std::collections::HashSet;
use std::f64::consts::TAU;

use super::{CandidateSet, DivideConfig};
use crate::equivalence::induced_units;
use crate::error::{Error, Result};
use crate::seqcore::{d_rowsum, CompressedSequence, OrderParams, Role, Symmetry};

/// Largest half-row length enumerated (2^36 candidates is far beyond desk
/// scale already).
const MAX_HALF_BITS: usize = 36;

struct Tables {
    bins: usize,
    lo_bits: usize,
    lo_vals: Vec<f64>,
    hi_vals: Vec<f64>,
    base: f64,
    bound: f64,
    lo_pack: Vec<u128>,
    hi_pack: Vec<u128>,
    base_pack: u128,
}

struct Packing {
    bits: u32,
    m: usize,
}

impl Packing {
    fn new(params: &OrderParams) -> Result<Self> {
        let d = params.d();
        let bits = usize::BITS - d.leading_zeros();
        if params.m() * bits as usize > 128 {
            return Err(Error::InvalidParams(format!(
                "compressions of order {} by {} do not fit the packed key",
                params.n(),
                d
            )));
        }
        Ok(Packing { bits, m: params.m() })
    }

    #[inline]
    fn unit(&self, index: usize) -> u128 {
        1u128 << ((index % self.m) as u32 * self.bits)
    }

    fn decode(&self, key: u128, d: usize) -> CompressedSequence {
        let mask = (1u128 << self.bits) - 1;
        let entries = (0..self.m)
            .map(|c| {
                let count = ((key >> (c as u32 * self.bits)) & mask) as i8;
                2 * count - d as i8
            })
            .collect();
        CompressedSequence::new(entries, d).expect("packed counts are valid compressions")
    }
}

impl Tables {
    fn new(params: &OrderParams, symmetry: Symmetry, eps: f64, packing: &Packing) -> Self {
        let n = params.n();
        let h = params.half_len();
        // Entry 1 must sit in the low half so the sign reduction can skip it.
        let lo_bits = h.div_ceil(2);
        let hi_bits = h - lo_bits;
        let target = 4.0 * n as f64 + eps;
        let (base, bound) = match symmetry {
            Symmetry::Skew => (0.0, target - 1.0),
            Symmetry::Symmetric => (1.0, target),
        };
        // coef[i - 1][k - 1]: contribution of entry i to bin k when x_i = +1.
        let coef: Vec<Vec<f64>> = (1..=h)
            .map(|i| {
                (1..=h)
                    .map(|k| {
                        let theta = TAU * ((i * k) % n) as f64 / n as f64;
                        match symmetry {
                            Symmetry::Skew => 2.0 * theta.sin(),
                            Symmetry::Symmetric => 2.0 * theta.cos(),
                        }
                    })
                    .collect()
            })
            .collect();
        let sums = |first: usize, bits: usize| -> Vec<f64> {
            let mut out = vec![0.0; (1usize << bits) * h];
            for mask in 0..1usize << bits {
                let row = &mut out[mask * h..(mask + 1) * h];
                for b in 0..bits {
                    let sign = if mask >> b & 1 == 1 { 1.0 } else { -1.0 };
                    for (slot, c) in row.iter_mut().zip(&coef[first + b]) {
                        *slot += sign * c;
                    }
                }
            }
            out
        };
        let packs = |first: usize, bits: usize| -> Vec<u128> {
            (0..1usize << bits)
                .map(|mask| {
                    let mut key = 0u128;
                    for b in 0..bits {
                        let i = first + b + 1;
                        let plus = mask >> b & 1 == 1;
                        if plus {
                            key += packing.unit(i);
                        }
                        let mirror_plus = match symmetry {
                            Symmetry::Skew => !plus,
                            Symmetry::Symmetric => plus,
                        };
                        if mirror_plus {
                            key += packing.unit(n - i);
                        }
                    }
                    key
                })
                .collect()
        };
        Tables {
            bins: h,
            lo_bits,
            lo_vals: sums(0, lo_bits),
            hi_vals: sums(lo_bits, hi_bits),
            base,
            bound,
            lo_pack: packs(0, lo_bits),
            hi_pack: packs(lo_bits, hi_bits),
            base_pack: packing.unit(0),
        }
    }

    #[inline]
    fn passes(&self, lo: usize, hi: usize) -> bool {
        let h = self.bins;
        let l = &self.lo_vals[lo * h..(lo + 1) * h];
        let u = &self.hi_vals[hi * h..(hi + 1) * h];
        l.iter().zip(u).all(|(a, b)| {
            let v = self.base + a + b;
            v * v <= self.bound
        })
    }
}

/// Index maps of the compressed actions used to reduce a role's pool:
/// induced automorphisms for A, index negation for B and C, none for D.
fn reduction_maps(params: &OrderParams, role: Role) -> Vec<Vec<usize>> {
    let m = params.m();
    let mults = match role {
        Role::A => induced_units(params.n(), m),
        Role::B | Role::C => vec![m - 1],
        Role::D => Vec::new(),
    };
    mults
        .into_iter()
        .filter(|&t| t != 1 % m)
        .map(|t| (0..m).map(|i| t * i % m).collect())
        .collect()
}

/// Enumerates every half row of the given role, keeps those passing the
/// rowsum and `PSD(k) <= 4n + eps` filters, and returns their distinct
/// compressions reduced to one per orbit of the role's compressed action
/// (automorphisms for A, index negation for B and C, none for D).
///
/// Reducing the compressions rather than the rows is sound: the compressed
/// orbit of `compress(x)` consists of compressions of members of the orbit
/// of `x`, so every row orbit still meets the pool.
pub fn enumerate_candidates(params: &OrderParams, role: Role, cfg: &DivideConfig) -> Result<CandidateSet> {
    let n = params.n();
    let h = params.half_len();
    if h > MAX_HALF_BITS {
        return Err(Error::InvalidParams(format!(
            "order {n} has 2^{h} half rows per role; enumeration is capped at 2^{MAX_HALF_BITS}"
        )));
    }
    let symmetry = role.symmetry();
    let packing = Packing::new(params)?;
    let tables = Tables::new(params, symmetry, cfg.eps, &packing);
    let lo_bits = tables.lo_bits;
    let hi_bits = h - lo_bits;

    let popcount = match role {
        Role::D => {
            let numer = d_rowsum(params.r()) - 1 + 2 * h as i64;
            if numer < 0 || numer % 4 != 0 || numer / 4 > h as i64 {
                return Ok(CandidateSet {
                    role,
                    survivors: 0,
                    compressions: Vec::new(),
                });
            }
            Some((numer / 4) as u32)
        }
        _ => None,
    };
    let mut lo_by_count: Vec<Vec<usize>> = vec![Vec::new(); lo_bits + 1];
    for lo in 0..1usize << lo_bits {
        lo_by_count[lo.count_ones() as usize].push(lo);
    }
    let all_lo: Vec<usize> = lo_by_count.iter().flatten().copied().collect();

    let scan_hi = |(mut keys, mut count): (HashSet<u128>, u64), hi: usize| {
        let los: &[usize] = match popcount {
            Some(p) => {
                let want = p as i64 - hi.count_ones() as i64;
                if want < 0 || want as usize > lo_bits {
                    return (keys, count);
                }
                &lo_by_count[want as usize]
            }
            None => &all_lo,
        };
        for &lo in los {
            if !tables.passes(lo, hi) {
                continue;
            }
            count += 1;
            keys.insert(tables.base_pack + tables.lo_pack[lo] + tables.hi_pack[hi]);
        }
        (keys, count)
    };
    let (keys, survivors) = cfg.exec.fold_range(
        0..1usize << hi_bits,
        || (HashSet::new(), 0u64),
        scan_hi,
        |(mut a, ca), (mut b, cb)| {
            if a.len() < b.len() {
                std::mem::swap(&mut a, &mut b);
            }
            a.extend(b);
            (a, ca + cb)
        },
    );
    let maps = reduction_maps(params, role);
    let mut compressions: Vec<CompressedSequence> = keys
        .into_iter()
        .map(|k| packing.decode(k, params.d()))
        .filter(|c| maps.iter().all(|map| c.permuted(map) >= *c))
        .collect();
    compressions.sort_unstable();
    Ok(CandidateSet {
        role,
        survivors,
        compressions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivalence::units;
    use crate::seqcore::{max_psd, PmSequence, SpectrumPlan};

    /// Direct version of the enumeration: complete every half row, compute
    /// its full spectrum, compress, and reduce by explicit orbit minima.
    fn brute_pool(params: &OrderParams, role: Role) -> (u64, Vec<CompressedSequence>) {
        let n = params.n();
        let m = params.m();
        let h = params.half_len();
        let plan = SpectrumPlan::new(n);
        let mut count = 0;
        let mut all = Vec::new();
        for mask in 0..1u64 << h {
            let x = PmSequence::from_half_mask(mask, role.symmetry(), n);
            if role == Role::D && x.rowsum() != d_rowsum(params.r()) {
                continue;
            }
            if max_psd(&plan, x.entries()) > 4.0 * n as f64 + 1e-4 {
                continue;
            }
            count += 1;
            all.push(x.compress(params.d()).unwrap());
        }
        let mults: Vec<usize> = match role {
            Role::A => units(n),
            Role::B | Role::C => vec![1, n - 1],
            Role::D => vec![1],
        };
        let mut out: Vec<CompressedSequence> = all
            .iter()
            .filter(|c| {
                mults.iter().all(|&t| {
                    let map: Vec<usize> = (0..m).map(|i| t * i % m).collect();
                    c.permuted(&map) >= **c
                })
            })
            .cloned()
            .collect();
        out.sort();
        out.dedup();
        (count, out)
    }

    #[test]
    fn matches_direct_enumeration() {
        for (r, d) in [(1, 1), (1, 3), (2, 1), (3, 1), (4, 3), (4, 7), (4, 1)] {
            let p = OrderParams::from_r(r, Some(d)).unwrap();
            for role in Role::ALL {
                let got = enumerate_candidates(&p, role, &DivideConfig::default()).unwrap();
                let (count, want) = brute_pool(&p, role);
                assert_eq!(got.survivors, count, "r={r} d={d} {role}");
                assert_eq!(got.compressions, want, "r={r} d={d} {role}");
            }
        }
    }

    #[test]
    fn order_three_pools() {
        let p = OrderParams::from_n(3, Some(1)).unwrap();
        let a = enumerate_candidates(&p, Role::A, &DivideConfig::default()).unwrap();
        // [+,-,+] and [+,+,-] are one automorphism orbit.
        assert_eq!(a.survivors, 2);
        assert_eq!(a.len(), 1);
        assert_eq!(a.compressions[0].entries(), &[1, 1, -1]);
        let d = enumerate_candidates(&p, Role::D, &DivideConfig::default()).unwrap();
        assert_eq!(d.compressions.len(), 1);
        assert_eq!(d.compressions[0].entries(), &[1, 1, 1]);
    }

    #[test]
    fn order_one() {
        let p = OrderParams::from_r(0, None).unwrap();
        for role in Role::ALL {
            let set = enumerate_candidates(&p, role, &DivideConfig::default()).unwrap();
            assert_eq!(set.survivors, 1);
            assert_eq!(set.compressions[0].entries(), &[1]);
        }
    }

    #[test]
    fn sequential_matches_parallel() {
        let p = OrderParams::from_r(4, None).unwrap();
        for role in Role::ALL {
            let cfg = |exec| DivideConfig {
                exec,
                ..Default::default()
            };
            let a = enumerate_candidates(&p, role, &cfg(crate::exec::Execution::Parallel)).unwrap();
            let b = enumerate_candidates(&p, role, &cfg(crate::exec::Execution::Sequential)).unwrap();
            assert_eq!(a, b);
        }
    }
}
