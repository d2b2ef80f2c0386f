//! Decision order: a binary heap of variables keyed by (group, activity).
//! Lower groups are always decided first; within a group the most active
//! variable wins.

use crate::cnf::Var;

pub(super) struct VarOrder {
    heap: Vec<u32>,
    /// Position of each variable in `heap`, `u32::MAX` when absent.
    pos: Vec<u32>,
    group: Vec<u32>,
    pub(super) activity: Vec<f64>,
}

const ABSENT: u32 = u32::MAX;

impl VarOrder {
    pub(super) fn new(num_vars: usize) -> Self {
        let mut order = VarOrder {
            heap: Vec::with_capacity(num_vars),
            pos: vec![ABSENT; num_vars],
            group: vec![0; num_vars],
            activity: vec![0.0; num_vars],
        };
        for v in 0..num_vars {
            order.insert(Var(v as u32));
        }
        order
    }

    pub(super) fn set_groups(&mut self, groups: &[u32]) {
        self.group.copy_from_slice(groups);
        for i in (0..self.heap.len() / 2).rev() {
            self.sift_down(i);
        }
    }

    #[inline]
    fn before(&self, a: u32, b: u32) -> bool {
        let (a, b) = (a as usize, b as usize);
        match self.group[a].cmp(&self.group[b]) {
            std::cmp::Ordering::Equal => self.activity[a] > self.activity[b],
            o => o.is_lt(),
        }
    }

    pub(super) fn contains(&self, v: Var) -> bool {
        self.pos[v.index()] != ABSENT
    }

    pub(super) fn insert(&mut self, v: Var) {
        if self.contains(v) {
            return;
        }
        self.pos[v.index()] = self.heap.len() as u32;
        self.heap.push(v.0);
        self.sift_up(self.heap.len() - 1);
    }

    pub(super) fn pop(&mut self) -> Option<Var> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().expect("non-empty");
        self.pos[top as usize] = ABSENT;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = 0;
            self.sift_down(0);
        }
        Some(Var(top))
    }

    /// Call after increasing the activity of `v`.
    pub(super) fn increased(&mut self, v: Var) {
        let p = self.pos[v.index()];
        if p != ABSENT {
            self.sift_up(p as usize);
        }
    }

    pub(super) fn rescale(&mut self, factor: f64) {
        for a in &mut self.activity {
            *a *= factor;
        }
    }

    fn sift_up(&mut self, mut i: usize) {
        let x = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if !self.before(x, self.heap[parent]) {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.pos[self.heap[i] as usize] = i as u32;
            i = parent;
        }
        self.heap[i] = x;
        self.pos[x as usize] = i as u32;
    }

    fn sift_down(&mut self, mut i: usize) {
        let x = self.heap[i];
        let len = self.heap.len();
        loop {
            let left = 2 * i + 1;
            if left >= len {
                break;
            }
            let right = left + 1;
            let child = if right < len && self.before(self.heap[right], self.heap[left]) {
                right
            } else {
                left
            };
            if !self.before(self.heap[child], x) {
                break;
            }
            self.heap[i] = self.heap[child];
            self.pos[self.heap[i] as usize] = i as u32;
            i = child;
        }
        self.heap[i] = x;
        self.pos[x as usize] = i as u32;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups_then_activity() {
        let mut o = VarOrder::new(5);
        o.set_groups(&[1, 0, 1, 0, 2]);
        o.activity[2] = 5.0;
        o.increased(Var(2));
        o.activity[3] = 1.0;
        o.increased(Var(3));
        let order: Vec<u32> = std::iter::from_fn(|| o.pop()).map(|v| v.0).collect();
        assert_eq!(order, vec![3, 1, 2, 0, 4]);
        o.insert(Var(4));
        o.insert(Var(4));
        assert_eq!(o.pop(), Some(Var(4)));
        assert_eq!(o.pop(), None);
    }
}
