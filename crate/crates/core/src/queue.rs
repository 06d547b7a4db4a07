//! Frontier queues for the wavefront fills.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

/// Dial's bucket queue for integer keys with bounded increments.
///
/// Every key pushed must lie in `[current, current + max_step]`, where
/// `current` is the key of the last pop. Buckets are reused cyclically.
pub(crate) struct BucketQueue {
    buckets: Vec<Vec<u32>>,
    current: u64,
    len: usize,
}

impl BucketQueue {
    pub fn new(max_step: u32) -> Self {
        BucketQueue {
            buckets: vec![Vec::new(); max_step as usize + 1],
            current: 0,
            len: 0,
        }
    }

    pub fn push(&mut self, key: u64, item: u32) {
        debug_assert!(key >= self.current);
        debug_assert!(key - self.current < self.buckets.len() as u64);
        let slot = (key % self.buckets.len() as u64) as usize;
        self.buckets[slot].push(item);
        self.len += 1;
    }

    pub fn pop(&mut self) -> Option<(u64, u32)> {
        if self.len == 0 {
            return None;
        }
        loop {
            let slot = (self.current % self.buckets.len() as u64) as usize;
            if let Some(item) = self.buckets[slot].pop() {
                self.len -= 1;
                return Some((self.current, item));
            }
            self.current += 1;
        }
    }
}

/// Min-heap entry for real-valued keys.
#[derive(Clone, Copy)]
pub(crate) struct MinEntry {
    pub key: f64,
    pub item: u32,
}

impl PartialEq for MinEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for MinEntry {}

impl Ord for MinEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed: BinaryHeap is a max-heap
        other
            .key
            .total_cmp(&self.key)
            .then_with(|| other.item.cmp(&self.item))
    }
}

impl PartialOrd for MinEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
