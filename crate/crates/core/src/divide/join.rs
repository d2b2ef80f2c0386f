//! Pair joining of compressed candidates.
//!
//! Pairs `(A, B)` and `(C, D)` that pass the pairwise PSD bound are matched
//! on their summed autocorrelation vectors: a quadruple satisfies the PSD
//! equality exactly when `K(A, B) + K(C, D) = (4n, 0, ..., 0)` where `K`
//! collects `paf(s)` for `s = 0..=(m-1)/2`. The smaller `(A, B)` side is
//! tabulated under a 64-bit linear fingerprint and the `(C, D)` pairs are
//! streamed against it; every fingerprint hit is re-checked on the exact
//! integer vectors.

use std::collections::HashMap;
use std::hash::{BuildHasherDefault, Hasher};

use super::{CandidateSet, CompressedQuadruple, DivideConfig};
use crate::error::{Error, Result};
use crate::seqcore::{CompressedSequence, OrderParams, Role, SpectrumPlan};

#[derive(Debug, Clone)]
pub struct JoinOutput {
    /// Matched quadruples in pool-index order.
    pub quads: Vec<CompressedQuadruple>,
    pub ab_pairs: u64,
    pub cd_pairs: u64,
}

/// Per-pool-member data used by the join.
struct Prepared {
    psd: Vec<f64>,
    paf: Vec<i32>,
    fp: Vec<u64>,
    bins: usize,
}

impl Prepared {
    fn new(pool: &[CompressedSequence], bins: usize, mults: &[u64]) -> Self {
        let m = pool.first().map_or(1, |s| s.len());
        let plan = SpectrumPlan::new(m);
        let mut psd = Vec::with_capacity(pool.len() * bins);
        let mut paf = Vec::with_capacity(pool.len() * bins);
        let mut fp = Vec::with_capacity(pool.len());
        for s in pool {
            let row: Vec<i32> = (0..bins).map(|k| s.paf(k) as i32).collect();
            fp.push(fingerprint(&row, mults));
            paf.extend(row);
            psd.extend((0..bins).map(|k| plan.psd(s.entries(), k)));
        }
        Prepared { psd, paf, fp, bins }
    }

    #[inline]
    fn psd(&self, i: usize) -> &[f64] {
        &self.psd[i * self.bins..(i + 1) * self.bins]
    }

    #[inline]
    fn paf(&self, i: usize) -> &[i32] {
        &self.paf[i * self.bins..(i + 1) * self.bins]
    }
}

/// `sum_i key[i] * mults[i]` in wrapping arithmetic, so the fingerprint of a
/// sum of keys is the sum of fingerprints.
fn fingerprint(key: &[i32], mults: &[u64]) -> u64 {
    key.iter().zip(mults).fold(0u64, |acc, (&v, &m)| {
        acc.wrapping_add((v as i64 as u64).wrapping_mul(m))
    })
}

fn multipliers(bins: usize) -> Vec<u64> {
    // splitmix64 stream; any odd constants with good bit spread work.
    let mut state = 0x9E37_79B9_7F4A_7C15u64;
    (0..bins)
        .map(|_| {
            state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            (z ^ (z >> 31)) | 1
        })
        .collect()
}

/// Hasher for keys that already are fingerprints; only remixes the bits.
#[derive(Default)]
struct FingerprintHasher(u64);

impl Hasher for FingerprintHasher {
    fn finish(&self) -> u64 {
        let z = self.0;
        let z = (z ^ (z >> 33)).wrapping_mul(0xFF51_AFD7_ED55_8CCD);
        z ^ (z >> 33)
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = self.0.rotate_left(8) ^ u64::from(b);
        }
    }

    fn write_u64(&mut self, v: u64) {
        self.0 = v;
    }
}

type FingerprintMap = HashMap<u64, (u32, u32), BuildHasherDefault<FingerprintHasher>>;

#[inline]
fn pair_within_bound(x: &[f64], y: &[f64], bound: f64) -> bool {
    x.iter().zip(y).all(|(a, b)| a + b <= bound)
}

/// Matches `(A, B)` pairs against `(C, D)` pairs on exact autocorrelation
/// keys; the result lists every quadruple of pool members satisfying the
/// PSD equality.
pub fn join_quadruples(pools: [&CandidateSet; 4], params: &OrderParams, cfg: &DivideConfig) -> Result<JoinOutput> {
    for (role, pool) in Role::ALL.into_iter().zip(pools) {
        if pool
            .compressions
            .iter()
            .any(|s| s.len() != params.m() || s.factor() != params.d())
        {
            return Err(Error::InvalidParams(format!(
                "pool for {role} was built for different parameters"
            )));
        }
    }
    if pools.iter().any(|p| p.is_empty()) {
        return Ok(JoinOutput {
            quads: Vec::new(),
            ab_pairs: 0,
            cd_pairs: 0,
        });
    }
    let bins = params.m() / 2 + 1;
    let mults = multipliers(bins);
    let prep: Vec<Prepared> = pools
        .iter()
        .map(|p| Prepared::new(&p.compressions, bins, &mults))
        .collect();
    let (pa, pb, pc, pd) = (&prep[0], &prep[1], &prep[2], &prep[3]);
    let bound = params.target() as f64 + cfg.eps;
    let (na, nb, nc, nd) = (pools[0].len(), pools[1].len(), pools[2].len(), pools[3].len());

    let mut ab: Vec<(u64, u32, u32)> = cfg.exec.flat_map_range(0..na, |a| {
        (0..nb)
            .filter(|&b| pair_within_bound(pa.psd(a), pb.psd(b), bound))
            .map(|b| (pa.fp[a].wrapping_add(pb.fp[b]), a as u32, b as u32))
            .collect()
    });
    ab.sort_unstable();
    let ab_pairs = ab.len() as u64;

    let mut index = FingerprintMap::default();
    let mut start = 0;
    while start < ab.len() {
        let fp = ab[start].0;
        let end = start + ab[start..].iter().take_while(|e| e.0 == fp).count();
        index.insert(fp, (start as u32, (end - start) as u32));
        start = end;
    }

    let mut target = vec![0i32; bins];
    target[0] = params.target() as i32;
    let target_fp = fingerprint(&target, &mults);

    let per_c: Vec<(u64, Vec<[u32; 4]>)> = cfg.exec.map_range(0..nc, |c| {
        let mut pairs = 0u64;
        let mut found = Vec::new();
        let mut need = vec![0i32; bins];
        for d in 0..nd {
            if !pair_within_bound(pc.psd(c), pd.psd(d), bound) {
                continue;
            }
            pairs += 1;
            let fp = target_fp.wrapping_sub(pc.fp[c]).wrapping_sub(pd.fp[d]);
            let Some(&(s, len)) = index.get(&fp) else {
                continue;
            };
            for (((slot, t), x), y) in need.iter_mut().zip(&target).zip(pc.paf(c)).zip(pd.paf(d)) {
                *slot = t - x - y;
            }
            for &(_, a, b) in &ab[s as usize..(s + len) as usize] {
                let exact = pa
                    .paf(a as usize)
                    .iter()
                    .zip(pb.paf(b as usize))
                    .zip(&need)
                    .all(|((x, y), z)| x + y == *z);
                if exact {
                    found.push([a, b, c as u32, d as u32]);
                }
            }
        }
        (pairs, found)
    });
    let cd_pairs = per_c.iter().map(|(p, _)| p).sum();
    let mut hits: Vec<[u32; 4]> = per_c.into_iter().flat_map(|(_, f)| f).collect();
    hits.sort_unstable();
    let quads = hits
        .into_iter()
        .map(|[a, b, c, d]| {
            let seqs = [
                pools[0].compressions[a as usize].clone(),
                pools[1].compressions[b as usize].clone(),
                pools[2].compressions[c as usize].clone(),
                pools[3].compressions[d as usize].clone(),
            ];
            CompressedQuadruple::from_parts(seqs, *params)
        })
        .collect();
    Ok(JoinOutput {
        quads,
        ab_pairs,
        cd_pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divide::enumerate_candidates;

    fn pools(params: &OrderParams) -> Vec<CandidateSet> {
        Role::ALL
            .into_iter()
            .map(|r| enumerate_candidates(params, r, &DivideConfig::default()).unwrap())
            .collect()
    }

    #[test]
    fn join_matches_nested_loops() {
        for (r, d) in [(2, 1), (3, 1), (4, 3), (4, 7)] {
            let p = OrderParams::from_r(r, Some(d)).unwrap();
            let ps = pools(&p);
            let out = join_quadruples([&ps[0], &ps[1], &ps[2], &ps[3]], &p, &DivideConfig::default()).unwrap();
            let mut want = Vec::new();
            for a in &ps[0].compressions {
                for b in &ps[1].compressions {
                    for c in &ps[2].compressions {
                        for dd in &ps[3].compressions {
                            let seqs = [a.clone(), b.clone(), c.clone(), dd.clone()];
                            if let Ok(q) = CompressedQuadruple::new(seqs, p) {
                                want.push(q);
                            }
                        }
                    }
                }
            }
            let mut got = out.quads.clone();
            got.sort();
            want.sort();
            assert_eq!(got, want, "r={r} d={d}");
            for q in &out.quads {
                assert_eq!(q.equality_defect(), None);
            }
        }
    }

    #[test]
    fn empty_pool_gives_nothing() {
        let p = OrderParams::from_r(2, None).unwrap();
        let mut ps = pools(&p);
        ps[3].compressions.clear();
        let out = join_quadruples([&ps[0], &ps[1], &ps[2], &ps[3]], &p, &DivideConfig::default()).unwrap();
        assert!(out.quads.is_empty());
    }

    #[test]
    fn order_three_compressed_key() {
        let p = OrderParams::from_n(3, Some(3)).unwrap();
        let ps = pools(&p);
        let out = join_quadruples([&ps[0], &ps[1], &ps[2], &ps[3]], &p, &DivideConfig::default()).unwrap();
        assert_eq!(out.quads.len(), 1);
        let q = &out.quads[0];
        // 1 + 1 from (A, B) and 1 + 9 from (C, D) sum to 12.
        assert_eq!(q.get(Role::A).paf(0) + q.get(Role::B).paf(0), 2);
        assert_eq!(q.get(Role::C).paf(0) + q.get(Role::D).paf(0), 10);
    }
}
