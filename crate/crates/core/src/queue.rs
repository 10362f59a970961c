//! Priority queues keyed by `(passage time, hop count)`.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::weight::Weight;

pub(crate) trait Frontier<W> {
    fn push(&mut self, time: W, hops: u32, v: u32);
    fn pop(&mut self) -> Option<u32>;
}

struct HeapEntry<W> {
    time: W,
    hops: u32,
    v: u32,
}

impl<W: Weight> PartialEq for HeapEntry<W> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<W: Weight> Eq for HeapEntry<W> {}

impl<W: Weight> PartialOrd for HeapEntry<W> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<W: Weight> Ord for HeapEntry<W> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time.order(&other.time).then(self.hops.cmp(&other.hops)).then(self.v.cmp(&other.v))
    }
}

pub(crate) struct HeapFrontier<W> {
    heap: BinaryHeap<Reverse<HeapEntry<W>>>,
}

impl<W: Weight> HeapFrontier<W> {
    pub fn new() -> Self {
        HeapFrontier { heap: BinaryHeap::new() }
    }
}

impl<W: Weight> Frontier<W> for HeapFrontier<W> {
    fn push(&mut self, time: W, hops: u32, v: u32) {
        self.heap.push(Reverse(HeapEntry { time, hops, v }));
    }

    fn pop(&mut self) -> Option<u32> {
        self.heap.pop().map(|Reverse(e)| e.v)
    }
}

/// Dial-style circular bucket queue for integer times with edge weights at
/// most `max_edge`. Each bucket orders its entries by hop count, so zero
/// weight edges are handled without breaking the lexicographic order.
pub(crate) struct BucketFrontier {
    buckets: Vec<BinaryHeap<Reverse<(u32, u32)>>>,
    cursor: u64,
    len: usize,
}

impl BucketFrontier {
    pub fn new(max_edge: u64) -> Self {
        BucketFrontier { buckets: (0..=max_edge).map(|_| BinaryHeap::new()).collect(), cursor: 0, len: 0 }
    }
}

impl<W: Weight> Frontier<W> for BucketFrontier {
    fn push(&mut self, time: W, hops: u32, v: u32) {
        let t = time.as_small_int().expect("bucket queue needs integer times");
        debug_assert!(t >= self.cursor && t - self.cursor < self.buckets.len() as u64);
        let n = self.buckets.len() as u64;
        self.buckets[(t % n) as usize].push(Reverse((hops, v)));
        self.len += 1;
    }

    fn pop(&mut self) -> Option<u32> {
        if self.len == 0 {
            return None;
        }
        let n = self.buckets.len() as u64;
        loop {
            if let Some(Reverse((_, v))) = self.buckets[(self.cursor % n) as usize].pop() {
                self.len -= 1;
                return Some(v);
            }
            self.cursor += 1;
        }
    }
}
