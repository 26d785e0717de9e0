//! Dense binary relations over small index sets, stored as row bitmasks.
//!
//! Everything in this crate works with at most 64 events per object, which
//! keeps relations in one `u64` per row and makes closure and query
//! operations trivial.

pub const MAX_EVENTS: usize = 64;

/// A binary relation on `{0, .., n-1}`; `rows[i]` holds the successors of `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rel {
    n: usize,
    rows: Vec<u64>,
}

impl Rel {
    pub fn new(n: usize) -> Self {
        assert!(n <= MAX_EVENTS, "at most {MAX_EVENTS} events are supported");
        Rel { n, rows: vec![0; n] }
    }

    pub fn add(&mut self, i: usize, j: usize) {
        self.rows[i] |= 1 << j;
    }

    pub fn remove(&mut self, i: usize, j: usize) {
        self.rows[i] &= !(1 << j);
    }

    pub fn has(&self, i: usize, j: usize) -> bool {
        self.rows[i] & (1 << j) != 0
    }

    /// Successors of `i`, as a bitmask.
    pub fn row(&self, i: usize) -> u64 {
        self.rows[i]
    }

    /// Predecessors of `j`, as a bitmask.
    pub fn column(&self, j: usize) -> u64 {
        let mut col = 0;
        for i in 0..self.n {
            if self.has(i, j) {
                col |= 1 << i;
            }
        }
        col
    }

    /// Warshall transitive closure, in place.
    pub fn close_transitively(&mut self) {
        for k in 0..self.n {
            let via_k = 1u64 << k;
            for i in 0..self.n {
                if self.rows[i] & via_k != 0 {
                    self.rows[i] |= self.rows[k];
                }
            }
        }
    }

    pub fn is_irreflexive(&self) -> bool {
        (0..self.n).all(|i| !self.has(i, i))
    }

    /// Some cycle through a reflexive point of the closed relation, for error
    /// reporting.  Returns indices `i -> .. -> i`.
    pub fn witness_cycle(&self) -> Option<Vec<usize>> {
        let start = (0..self.n).find(|&i| self.has(i, i))?;
        // BFS over the relation from `start` back to itself.
        let mut parent = vec![usize::MAX; self.n];
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            for j in 0..self.n {
                if self.has(i, j) {
                    if j == start {
                        let mut path = vec![start, i];
                        let mut cur = i;
                        while cur != start {
                            cur = parent[cur];
                            path.push(cur);
                        }
                        path.reverse();
                        return Some(path);
                    }
                    if parent[j] == usize::MAX && j != start {
                        parent[j] = i;
                        queue.push_back(j);
                    }
                }
            }
        }
        Some(vec![start, start])
    }

    /// All related pairs, in lexicographic order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                if self.has(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    /// Sorts the indices of `mask` by this relation, which must be total on
    /// them (as the event order is on any antichain).
    pub fn sort_total(&self, mask: u64) -> Vec<usize> {
        let mut events: Vec<usize> = (0..self.n).filter(|i| mask & (1 << i) != 0).collect();
        events.sort_by(|&a, &b| {
            if self.has(a, b) {
                std::cmp::Ordering::Less
            } else if self.has(b, a) {
                std::cmp::Ordering::Greater
            } else {
                panic!("relation must be total on the sorted set");
            }
        });
        events
    }
}
