//! Building blocks of the implicit matrix reduction.

use std::collections::BinaryHeap;

use crate::cube::Cube;

/// Max-priority queue of cubes whose content is the mod-2 multiset of pushed cubes.
///
/// Duplicates are only cancelled when they surface at the top.
#[derive(Clone, Debug, Default)]
pub struct CubeXorQueue {
    heap: BinaryHeap<Cube>,
}

impl CubeXorQueue {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn push(&mut self, cube: Cube) {
        self.heap.push(cube);
    }

    pub fn clear(&mut self) {
        self.heap.clear();
    }

    /// Removes and returns the youngest cube of the mod-2 content.
    pub fn pop_pivot(&mut self) -> Option<Cube> {
        loop {
            let top = self.heap.pop()?;
            match self.heap.peek() {
                Some(next) if *next == top => {
                    self.heap.pop();
                }
                _ => return Some(top),
            }
        }
    }

    /// The youngest cube of the mod-2 content, or `None` when it is empty.
    pub fn get_pivot(&mut self) -> Option<Cube> {
        let pivot = self.pop_pivot()?;
        self.heap.push(pivot);
        Some(pivot)
    }

    /// Drains the queue, returning its mod-2 content in descending order.
    pub fn to_list(&mut self) -> Vec<Cube> {
        let mut out = Vec::with_capacity(self.heap.len());
        while let Some(c) = self.pop_pivot() {
            out.push(c);
        }
        out
    }

    /// Drains the queue into a duplicate-free heap, returned in its array layout.
    pub fn to_heap(&mut self) -> Vec<Cube> {
        let list = self.to_list();
        BinaryHeap::from(list).into_vec()
    }

    /// Pushes every cube of a layout produced by [`CubeXorQueue::to_heap`], in heap order.
    pub fn push_heap(&mut self, layout: &[Cube], scratch: &mut BinaryHeap<Cube>) {
        scratch.clear();
        scratch.extend(layout.iter().copied());
        while let Some(c) = scratch.pop() {
            self.heap.push(c);
        }
    }

    pub fn raw_len(&self) -> usize {
        self.heap.len()
    }
}

/// Flat-array map from cubes of one dimension to `u32` values.
///
/// Slots are addressed by `flat_offset * types + type`; `u32::MAX` marks an empty slot.
#[derive(Clone, Debug)]
pub struct CubeMap {
    slots: Vec<u32>,
    shape: [usize; 3],
    types: usize,
}

impl CubeMap {
    pub const EMPTY: u32 = u32::MAX;

    pub fn new(shape: [usize; 3], types: usize) -> Self {
        CubeMap {
            slots: vec![Self::EMPTY; shape.iter().product::<usize>() * types],
            shape,
            types,
        }
    }

    #[inline]
    fn slot(&self, cube: &Cube) -> usize {
        let [x, y, z] = cube.coords();
        ((x * self.shape[1] + y) * self.shape[2] + z) * self.types + cube.kind() as usize
    }

    #[inline]
    pub fn get(&self, cube: &Cube) -> Option<u32> {
        match self.slots[self.slot(cube)] {
            Self::EMPTY => None,
            v => Some(v),
        }
    }

    #[inline]
    pub fn insert(&mut self, cube: &Cube, value: u32) {
        debug_assert_ne!(value, Self::EMPTY);
        let s = self.slot(cube);
        self.slots[s] = value;
    }

    #[inline]
    pub fn contains(&self, cube: &Cube) -> bool {
        self.get(cube).is_some()
    }
}

/// Reduced columns kept for reuse, stored contiguously in one arena.
#[derive(Clone, Debug)]
pub struct ColumnCache {
    index: CubeMap,
    spans: Vec<(usize, usize)>,
    arena: Vec<Cube>,
}

impl ColumnCache {
    pub fn new(shape: [usize; 3], types: usize) -> Self {
        ColumnCache {
            index: CubeMap::new(shape, types),
            spans: Vec::new(),
            arena: Vec::new(),
        }
    }

    pub fn insert(&mut self, column: &Cube, entries: &[Cube]) {
        let start = self.arena.len();
        self.arena.extend_from_slice(entries);
        self.index.insert(column, self.spans.len() as u32);
        self.spans.push((start, entries.len()));
    }

    #[inline]
    pub fn get(&self, column: &Cube) -> Option<&[Cube]> {
        let (start, len) = self.spans[self.index.get(column)? as usize];
        Some(&self.arena[start..start + len])
    }

    pub fn len(&self) -> usize {
        self.spans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }
}

/// Fixed-size bitset over cubes of one dimension, addressed like [`CubeMap`].
#[derive(Clone, Debug)]
pub struct CubeSet {
    words: Vec<u64>,
    shape: [usize; 3],
    types: usize,
}

impl CubeSet {
    pub fn new(shape: [usize; 3], types: usize) -> Self {
        let n = shape.iter().product::<usize>() * types;
        CubeSet {
            words: vec![0; n.div_ceil(64)],
            shape,
            types,
        }
    }

    #[inline]
    fn slot(&self, cube: &Cube) -> usize {
        let [x, y, z] = cube.coords();
        ((x * self.shape[1] + y) * self.shape[2] + z) * self.types + cube.kind() as usize
    }

    #[inline]
    pub fn insert(&mut self, cube: &Cube) {
        let s = self.slot(cube);
        self.words[s / 64] |= 1 << (s % 64);
    }

    #[inline]
    pub fn contains(&self, cube: &Cube) -> bool {
        let s = self.slot(cube);
        self.words[s / 64] >> (s % 64) & 1 == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::pack;
    use proptest::prelude::*;
    use std::collections::{BTreeSet, HashMap};

    fn c(birth: i32, i: u64) -> Cube {
        Cube {
            birth: birth as f64,
            index: i,
        }
    }

    #[test]
    fn cancellation() {
        let (a, b) = (c(1, 0), c(0, 5));
        let mut q = CubeXorQueue::new();
        q.push(a);
        q.push(a);
        assert_eq!(q.get_pivot(), None);

        q.push(a);
        q.push(b);
        q.push(a);
        assert_eq!(q.get_pivot(), Some(b));
        assert_eq!(q.get_pivot(), Some(b));

        let mut q = CubeXorQueue::new();
        assert_eq!(q.get_pivot(), None);
        assert!(q.to_list().is_empty());
        q.push(a);
        q.push(a);
        q.push(b);
        assert_eq!(q.to_list(), vec![b]);
        assert_eq!(q.raw_len(), 0);
    }

    #[test]
    fn heap_layout_round_trip() {
        let mut q = CubeXorQueue::new();
        for k in [3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5] {
            q.push(c(k, k as u64));
        }
        let layout = q.to_heap();
        assert_eq!(layout.len(), 5);
        let mut r = CubeXorQueue::new();
        r.push_heap(&layout, &mut BinaryHeap::new());
        assert_eq!(r.to_list(), vec![c(9, 9), c(6, 6), c(5, 5), c(4, 4), c(2, 2)]);
    }

    #[test]
    fn list_pushed_twice_cancels() {
        let list: Vec<Cube> = (0..50).map(|i| c(i % 7, i as u64)).collect();
        let mut q = CubeXorQueue::new();
        for x in list.iter().chain(&list) {
            q.push(*x);
        }
        assert!(q.to_list().is_empty());
    }

    #[test]
    fn cube_map_round_trip() {
        let mut m = CubeMap::new([3, 4, 5], 3);
        let a = Cube::new(0.0, 2, 3, 4, 2);
        let b = Cube::new(0.0, 0, 0, 0, 0);
        assert_eq!(m.get(&a), None);
        m.insert(&a, 7);
        m.insert(&b, 0);
        assert_eq!(m.get(&a), Some(7));
        assert_eq!(m.get(&b), Some(0));
        assert!(!m.contains(&Cube::new(0.0, 2, 3, 4, 1)));
    }

    #[derive(Debug, Clone)]
    enum Op {
        Push(i32, u64),
        Pivot,
    }

    fn op() -> impl Strategy<Value = Op> {
        prop_oneof![
            3 => (0i32..4, 0u64..12).prop_map(|(b, i)| Op::Push(b, i)),
            1 => Just(Op::Pivot),
        ]
    }

    proptest! {
        #[test]
        fn queue_matches_reference_set(ops in proptest::collection::vec(op(), 0..400)) {
            let mut q = CubeXorQueue::new();
            let mut reference: BTreeSet<Cube> = BTreeSet::new();
            for o in ops {
                match o {
                    Op::Push(b, i) => {
                        let x = c(b, i);
                        q.push(x);
                        if !reference.remove(&x) {
                            reference.insert(x);
                        }
                    }
                    Op::Pivot => prop_assert_eq!(q.get_pivot(), reference.iter().next_back().copied()),
                }
            }
            let expected: Vec<Cube> = reference.iter().rev().copied().collect();
            prop_assert_eq!(q.to_list(), expected);
        }

        #[test]
        fn cube_map_matches_hash_map(entries in proptest::collection::vec((0usize..4, 0usize..3, 0usize..5, 0u8..3, 0u32..1000), 0..60)) {
            let mut m = CubeMap::new([4, 3, 5], 3);
            let mut set = CubeSet::new([4, 3, 5], 3);
            let mut reference = HashMap::new();
            for &(x, y, z, t, v) in &entries {
                let cube = Cube::new(0.0, x, y, z, t);
                m.insert(&cube, v);
                set.insert(&cube);
                reference.insert(pack(x, y, z, t), v);
            }
            for x in 0..4 {
                for y in 0..3 {
                    for z in 0..5 {
                        for t in 0..3 {
                            let cube = Cube::new(0.0, x, y, z, t);
                            let want = reference.get(&pack(x, y, z, t)).copied();
                            prop_assert_eq!(m.get(&cube), want);
                            prop_assert_eq!(set.contains(&cube), want.is_some());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn long_interleaving_matches_reference() {
        let mut q = CubeXorQueue::new();
        let mut reference: BTreeSet<Cube> = BTreeSet::new();
        let mut s: u64 = 12345;
        for _ in 0..10_000 {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let r = s >> 33;
            if r.is_multiple_of(4) {
                assert_eq!(q.get_pivot(), reference.iter().next_back().copied());
            } else {
                let x = c((r % 5) as i32, (r / 5) % 40);
                q.push(x);
                if !reference.remove(&x) {
                    reference.insert(x);
                }
            }
        }
    }

    #[test]
    fn cache_stores_slices() {
        let mut cache = ColumnCache::new([2, 2, 2], 3);
        let col = Cube::new(1.0, 0, 0, 0, 2);
        let other = Cube::new(1.0, 1, 0, 0, 2);
        cache.insert(&col, &[c(0, 1), c(0, 2)]);
        cache.insert(&other, &[]);
        assert_eq!(cache.get(&col).unwrap(), &[c(0, 1), c(0, 2)]);
        assert_eq!(cache.get(&other).unwrap().len(), 0);
        assert!(cache.get(&Cube::new(1.0, 0, 1, 0, 2)).is_none());
        assert_eq!(cache.len(), 2);
    }
}
