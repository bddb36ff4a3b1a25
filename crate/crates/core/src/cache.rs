//! Fixed-capacity compute tables. A slot holds at most one entry; a new
//! insertion with the same hash index overwrites whatever lived there.

use std::hash::{Hash, Hasher};

use rustc_hash::FxHasher;

#[derive(Debug, Clone)]
pub(crate) struct ComputeTable<K, V> {
    capacity: usize,
    slots: Vec<Option<(K, V)>>,
    pub(crate) hits: u64,
    pub(crate) lookups: u64,
}

impl<K: Hash + Eq + Copy, V: Copy> ComputeTable<K, V> {
    /// `capacity == 0` disables the table entirely.
    pub(crate) fn new(capacity: usize) -> Self {
        let capacity = if capacity == 0 { 0 } else { capacity.next_power_of_two() };
        ComputeTable {
            capacity,
            slots: Vec::new(),
            hits: 0,
            lookups: 0,
        }
    }

    #[inline]
    fn index(&self, key: &K) -> usize {
        let mut h = FxHasher::default();
        key.hash(&mut h);
        (h.finish() as usize) & (self.capacity - 1)
    }

    #[inline]
    pub(crate) fn get(&mut self, key: &K) -> Option<V> {
        if self.capacity == 0 || self.slots.is_empty() {
            return None;
        }
        self.lookups += 1;
        match &self.slots[self.index(key)] {
            Some((k, v)) if k == key => {
                self.hits += 1;
                Some(*v)
            }
            _ => None,
        }
    }

    #[inline]
    pub(crate) fn insert(&mut self, key: K, value: V) {
        if self.capacity == 0 {
            return;
        }
        if self.slots.is_empty() {
            self.slots = vec![None; self.capacity];
        }
        let i = self.index(&key);
        self.slots[i] = Some((key, value));
    }

    pub(crate) fn clear(&mut self) {
        if !self.slots.is_empty() {
            self.slots.iter_mut().for_each(|s| *s = None);
        }
    }
}
