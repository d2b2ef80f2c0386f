//! Clause storage in one flat buffer. A clause reference is the offset of a
//! three-slot header (length, flags and LBD, activity bits) followed by the
//! literals, so visiting a clause touches a single cache region.

use crate::cnf::Lit;

const HEADER: usize = 3;
const LEARNT: u32 = 1;
const DELETED: u32 = 2;

#[derive(Debug, Default)]
pub(super) struct ClauseArena {
    data: Vec<Lit>,
    wasted: usize,
}

impl ClauseArena {
    fn raw(&self, at: usize) -> u32 {
        self.data[at].code() as u32
    }

    fn set_raw(&mut self, at: usize, v: u32) {
        self.data[at] = Lit::from_code(v);
    }

    pub(super) fn alloc(&mut self, lits: &[Lit], learnt: bool, lbd: u32) -> u32 {
        let cref = self.data.len();
        assert!(cref + HEADER + lits.len() < u32::MAX as usize, "clause arena overflow");
        self.data.push(Lit::from_code(lits.len() as u32));
        self.data
            .push(Lit::from_code(lbd << 2 | if learnt { LEARNT } else { 0 }));
        self.data.push(Lit::from_code(0f32.to_bits()));
        self.data.extend_from_slice(lits);
        cref as u32
    }

    #[inline]
    pub(super) fn len(&self, cref: u32) -> usize {
        self.raw(cref as usize) as usize
    }

    #[inline]
    pub(super) fn lits(&self, cref: u32) -> &[Lit] {
        let start = cref as usize + HEADER;
        &self.data[start..start + self.len(cref)]
    }

    #[inline]
    pub(super) fn lits_mut(&mut self, cref: u32) -> &mut [Lit] {
        let start = cref as usize + HEADER;
        let len = self.len(cref);
        &mut self.data[start..start + len]
    }

    pub(super) fn is_learnt(&self, cref: u32) -> bool {
        self.raw(cref as usize + 1) & LEARNT != 0
    }

    pub(super) fn is_deleted(&self, cref: u32) -> bool {
        self.raw(cref as usize + 1) & DELETED != 0
    }

    pub(super) fn lbd(&self, cref: u32) -> u32 {
        self.raw(cref as usize + 1) >> 2
    }

    pub(super) fn activity(&self, cref: u32) -> f32 {
        f32::from_bits(self.raw(cref as usize + 2))
    }

    pub(super) fn set_activity(&mut self, cref: u32, a: f32) {
        self.set_raw(cref as usize + 2, a.to_bits());
    }

    pub(super) fn delete(&mut self, cref: u32) {
        let flags = self.raw(cref as usize + 1);
        if flags & DELETED == 0 {
            self.set_raw(cref as usize + 1, flags | DELETED);
            self.wasted += HEADER + self.len(cref);
        }
    }

    /// Whether at least half the buffer belongs to deleted clauses.
    pub(super) fn needs_compaction(&self) -> bool {
        self.wasted * 2 > self.data.len()
    }

    /// Drops deleted clauses. Returns the new reference of every live clause
    /// as `(old, new)` pairs in increasing order.
    pub(super) fn compact(&mut self) -> Vec<(u32, u32)> {
        let mut moves = Vec::new();
        let mut out = Vec::with_capacity(self.data.len() - self.wasted);
        let mut at = 0;
        while at < self.data.len() {
            let cref = at as u32;
            let size = HEADER + self.len(cref);
            if !self.is_deleted(cref) {
                moves.push((cref, out.len() as u32));
                out.extend_from_slice(&self.data[at..at + size]);
            }
            at += size;
        }
        self.data = out;
        self.wasted = 0;
        moves
    }
}

/// Looks up a relocated reference from the sorted output of `compact`.
pub(super) fn relocate(moves: &[(u32, u32)], cref: u32) -> Option<u32> {
    moves
        .binary_search_by_key(&cref, |&(old, _)| old)
        .ok()
        .map(|i| moves[i].1)
}
