//! Connected heaps: several binary min-heaps over one shared record set.
//!
//! Each record lives once and is referenced from every component heap; a
//! record stores one back-pointer per heap giving its current node position
//! there. Popping the minimum of any component removes the record from *all*
//! components in `O(H·log n)`: each removal replaces the vacated node with
//! the last node of that heap and repairs the heap property with a single
//! sift up or down, updating back-pointers on every swap.

use std::cmp::Ordering;

/// A comparator for one component heap.
pub type HeapCmp<T> = Box<dyn Fn(&T, &T) -> Ordering>;

struct Record<T> {
    payload: T,
    /// `backptr[i]` is this record's node index inside heap `i`.
    backptr: Vec<usize>,
}

/// `H` min-heaps over a shared record store.
pub struct ConnectedHeap<T> {
    cmps: Vec<HeapCmp<T>>,
    records: Vec<Option<Record<T>>>,
    free: Vec<usize>,
    heaps: Vec<Vec<usize>>,
}

impl<T> ConnectedHeap<T> {
    /// A connected heap with one component per comparator.
    pub fn new(cmps: Vec<HeapCmp<T>>) -> Self {
        assert!(!cmps.is_empty(), "need at least one component heap");
        let heaps = cmps.iter().map(|_| Vec::new()).collect();
        ConnectedHeap { cmps, records: Vec::new(), free: Vec::new(), heaps }
    }

    /// Number of component heaps.
    pub fn components(&self) -> usize {
        self.cmps.len()
    }

    /// Number of shared records.
    pub fn len(&self) -> usize {
        self.heaps[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Insert a record into every component heap; returns its record id,
    /// stable until the record is removed.
    pub fn insert(&mut self, payload: T) -> usize {
        let id = match self.free.pop() {
            Some(id) => id,
            None => {
                self.records.push(None);
                self.records.len() - 1
            }
        };
        let backptr = self.heaps.iter().map(Vec::len).collect();
        self.records[id] = Some(Record { payload, backptr });
        for h in 0..self.heaps.len() {
            self.heaps[h].push(id);
            self.sift_up(h, self.heaps[h].len() - 1);
        }
        id
    }

    /// The minimum payload of component `heap`, if any.
    pub fn peek(&self, heap: usize) -> Option<&T> {
        self.heaps[heap].first().map(|&id| self.payload(id))
    }

    /// Remove and return the minimum of component `heap`, deleting the
    /// record from every component.
    pub fn pop(&mut self, heap: usize) -> Option<T> {
        let id = *self.heaps[heap].first()?;
        Some(self.remove(id))
    }

    /// Remove a record by id from all components.
    pub fn remove(&mut self, id: usize) -> T {
        let record = self.records[id].take().expect("live record id");
        self.free.push(id);
        for (h, &pos) in record.backptr.iter().enumerate() {
            let last = self.heaps[h].len() - 1;
            self.heaps[h].swap_remove(pos);
            if pos < last {
                let moved = self.heaps[h][pos];
                self.record_mut(moved).backptr[h] = pos;
                self.repair(h, pos);
            }
        }
        record.payload
    }

    /// The payload behind a live record id.
    pub fn get(&self, id: usize) -> &T {
        self.payload(id)
    }

    /// Visit the payloads of component `heap` in comparator order without
    /// mutating the shared structure (works on a cloned index array).
    pub fn sorted(&self, heap: usize) -> impl Iterator<Item = &T> {
        // Lazy frontier traversal: yielding the k smallest elements costs
        // O(k log k) comparisons and never copies the heap, so short prefix
        // scans over a large component stay cheap. The frontier of
        // not-yet-visited node positions is itself kept as a binary min-heap
        // under the component's payload order.
        let ids = &self.heaps[heap];
        let cmp = &self.cmps[heap];
        let mut frontier: Vec<usize> = if ids.is_empty() { Vec::new() } else { vec![0] };
        std::iter::from_fn(move || {
            if frontier.is_empty() {
                return None;
            }
            let less = |a: usize, b: usize| {
                cmp(self.payload(ids[a]), self.payload(ids[b])) == Ordering::Less
            };
            let node = frontier.swap_remove(0);
            // Restore the frontier heap after promoting its last element.
            let mut i = 0;
            loop {
                let mut m = i;
                for c in [2 * i + 1, 2 * i + 2] {
                    if c < frontier.len() && less(frontier[c], frontier[m]) {
                        m = c;
                    }
                }
                if m == i {
                    break;
                }
                frontier.swap(i, m);
                i = m;
            }
            // Push the visited node's children, sifting each up.
            for child in [2 * node + 1, 2 * node + 2] {
                if child < ids.len() {
                    frontier.push(child);
                    let mut i = frontier.len() - 1;
                    while i > 0 && less(frontier[i], frontier[(i - 1) / 2]) {
                        frontier.swap(i, (i - 1) / 2);
                        i = (i - 1) / 2;
                    }
                }
            }
            Some(self.payload(ids[node]))
        })
    }

    fn payload(&self, id: usize) -> &T {
        &self.records[id].as_ref().expect("live record id").payload
    }

    fn record_mut(&mut self, id: usize) -> &mut Record<T> {
        self.records[id].as_mut().expect("live record id")
    }

    fn less(&self, heap: usize, a: usize, b: usize) -> bool {
        (self.cmps[heap])(self.payload(a), self.payload(b)) == Ordering::Less
    }

    fn swap_nodes(&mut self, heap: usize, i: usize, j: usize) {
        self.heaps[heap].swap(i, j);
        let (a, b) = (self.heaps[heap][i], self.heaps[heap][j]);
        self.record_mut(a).backptr[heap] = i;
        self.record_mut(b).backptr[heap] = j;
    }

    fn sift_up(&mut self, heap: usize, mut pos: usize) {
        while pos > 0 {
            let parent = (pos - 1) / 2;
            if !self.less(heap, self.heaps[heap][pos], self.heaps[heap][parent]) {
                break;
            }
            self.swap_nodes(heap, pos, parent);
            pos = parent;
        }
    }

    fn sift_down(&mut self, heap: usize, mut pos: usize) {
        loop {
            let (l, r) = (2 * pos + 1, 2 * pos + 2);
            let mut m = pos;
            for c in [l, r] {
                if c < self.heaps[heap].len() && self.less(heap, self.heaps[heap][c], self.heaps[heap][m])
                {
                    m = c;
                }
            }
            if m == pos {
                return;
            }
            self.swap_nodes(heap, pos, m);
            pos = m;
        }
    }

    /// After a replacement at `pos`, restore the heap property with a single
    /// sift in the one direction that can be violated.
    fn repair(&mut self, heap: usize, pos: usize) {
        if pos > 0 && self.less(heap, self.heaps[heap][pos], self.heaps[heap][(pos - 1) / 2]) {
            self.sift_up(heap, pos);
        } else {
            self.sift_down(heap, pos);
        }
    }

    /// Exhaustive structural audit: identical record sets across components,
    /// exact back-pointers, and the min-heap property everywhere.
    pub fn audit(&self) {
        for (h, heap) in self.heaps.iter().enumerate() {
            assert_eq!(heap.len(), self.len(), "component {h} size differs");
            for (pos, &id) in heap.iter().enumerate() {
                let record = self.records[id].as_ref().expect("live record id");
                assert_eq!(record.backptr[h], pos, "stale back-pointer in heap {h}");
                if pos > 0 {
                    let parent = heap[(pos - 1) / 2];
                    assert!(
                        !self.less(h, id, parent),
                        "heap {h} violates the min property at node {pos}"
                    );
                }
            }
        }
    }
}
