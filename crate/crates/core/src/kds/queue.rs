use alloc::collections::{BTreeMap, BinaryHeap};
use core::cmp::{Ordering, Reverse};

use super::CertKey;
use crate::kernel::{compare_times, EventTime};

struct Entry {
    time: EventTime,
    key: CertKey,
    version: u64,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        compare_times(&self.time, &other.time)
            .then_with(|| self.key.cmp(&other.key))
            .then_with(|| self.version.cmp(&other.version))
    }
}

/// Failure times of live certificates, earliest first. Rescheduling bumps a
/// certificate's version; superseded entries are dropped when they surface.
#[derive(Default)]
pub struct EventQueue {
    heap: BinaryHeap<Reverse<Entry>>,
    live: BTreeMap<CertKey, u64>,
    version: u64,
}

impl EventQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn schedule(&mut self, key: CertKey, time: Option<EventTime>) {
        self.version += 1;
        match time {
            Some(time) => {
                self.live.insert(key, self.version);
                self.heap.push(Reverse(Entry { time, key, version: self.version }));
            }
            None => {
                self.live.remove(&key);
            }
        }
    }

    pub fn cancel(&mut self, key: &CertKey) {
        self.live.remove(key);
    }

    /// Number of certificates with a finite failure time.
    pub fn len(&self) -> usize {
        self.live.len()
    }

    pub fn is_empty(&self) -> bool {
        self.live.is_empty()
    }

    fn discard_stale(&mut self) {
        while let Some(Reverse(top)) = self.heap.peek() {
            if self.live.get(&top.key) == Some(&top.version) {
                return;
            }
            self.heap.pop();
        }
    }

    pub fn peek(&mut self) -> Option<(&EventTime, CertKey)> {
        self.discard_stale();
        self.heap.peek().map(|Reverse(e)| (&e.time, e.key))
    }

    pub fn pop(&mut self) -> Option<(EventTime, CertKey)> {
        self.discard_stale();
        let Reverse(e) = self.heap.pop()?;
        self.live.remove(&e.key);
        Some((e.time, e.key))
    }
}
