//! Partition of all `h`-subsets of `n` points into perfect matchings, built
//! point by point with integral flows (the classical Baranyai induction).
//!
//! After placing points `0..x`, each of the `C(n,h) h / n` classes holds
//! `n / h` disjoint partial blocks, and every subset `S` of `0..x` occurs as
//! a partial block exactly `C(n - x, h - |S|)` times. A flow picks, in every
//! class, the block that receives point `x` so the counts stay right.

use std::collections::{BTreeMap, VecDeque};

use super::ArrayError;

pub fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1u128, |acc, j| acc * (n - j) as u128 / (j + 1) as u128)
}

struct Flow {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<u64>,
}

impl Flow {
    fn new(nodes: usize) -> Self {
        Self { head: vec![Vec::new(); nodes], to: Vec::new(), cap: Vec::new() }
    }

    fn edge(&mut self, a: usize, b: usize, c: u64) -> usize {
        let id = self.to.len();
        self.head[a].push(id);
        self.to.push(b);
        self.cap.push(c);
        self.head[b].push(id + 1);
        self.to.push(a);
        self.cap.push(0);
        id
    }

    /// Edmonds-Karp; returns the total flow.
    fn max_flow(&mut self, s: usize, t: usize) -> u64 {
        let mut total = 0;
        loop {
            let mut prev = vec![usize::MAX; self.head.len()];
            let mut queue = VecDeque::from([s]);
            prev[s] = usize::MAX - 1;
            while let Some(u) = queue.pop_front() {
                if u == t {
                    break;
                }
                for &e in &self.head[u] {
                    let v = self.to[e];
                    if self.cap[e] > 0 && prev[v] == usize::MAX {
                        prev[v] = e;
                        queue.push_back(v);
                    }
                }
            }
            if prev[t] == usize::MAX {
                return total;
            }
            let mut push = u64::MAX;
            let mut v = t;
            while v != s {
                let e = prev[v];
                push = push.min(self.cap[e]);
                v = self.to[e ^ 1];
            }
            let mut v = t;
            while v != s {
                let e = prev[v];
                self.cap[e] -= push;
                self.cap[e ^ 1] += push;
                v = self.to[e ^ 1];
            }
            total += push;
        }
    }
}

/// Classes of `n / h` pairwise disjoint `h`-subsets (as bit masks) covering
/// every `h`-subset of `0..n` exactly once. Deterministic.
pub fn resolve(n: usize, h: usize) -> Result<Vec<Vec<u64>>, ArrayError> {
    if h == 0 || n == 0 || n % h != 0 || n > 64 {
        return Err(ArrayError::Unsupported(format!("no resolution of {h}-subsets of {n} points")));
    }
    let a = n / h;
    let classes = binomial(n, h) / a as u128;
    if classes > 1 << 20 {
        return Err(ArrayError::Guard { what: "resolution classes", got: classes as usize, limit: 1 << 20 });
    }
    let classes = classes as usize;
    let mut cells: Vec<Vec<u64>> = vec![vec![0; a]; classes];
    for x in 0..n {
        // distinct partial blocks, in a fixed order
        let mut index: BTreeMap<u64, usize> = BTreeMap::new();
        for class in &cells {
            for &c in class {
                let len = index.len();
                index.entry(c).or_insert(len);
            }
        }
        let (src, sink) = (classes + index.len(), classes + index.len() + 1);
        let mut g = Flow::new(classes + index.len() + 2);
        let mut choice_edges: Vec<Vec<(usize, u64)>> = vec![Vec::new(); classes];
        for (ci, class) in cells.iter().enumerate() {
            g.edge(src, ci, 1);
            let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
            for &c in class {
                *counts.entry(c).or_default() += 1;
            }
            for (c, mult) in counts {
                let e = g.edge(ci, classes + index[&c], mult);
                choice_edges[ci].push((e, c));
            }
        }
        for (&c, &node) in &index {
            let size = c.count_ones() as usize;
            let cap = if size < h { binomial(n - x - 1, h - size - 1) } else { 0 };
            g.edge(classes + node, sink, cap as u64);
        }
        let f = g.max_flow(src, sink);
        if f != classes as u64 {
            return Err(ArrayError::Unsupported(format!("flow {f} short of {classes} at point {x}")));
        }
        for (ci, class) in cells.iter_mut().enumerate() {
            let (_, chosen) = choice_edges[ci]
                .iter()
                .find(|&&(e, _)| g.cap[e ^ 1] > 0)
                .copied()
                .expect("every class carries one unit");
            let slot = class.iter().position(|&c| c == chosen).expect("chosen block is present");
            class[slot] |= 1 << x;
        }
    }
    for class in &mut cells {
        class.sort_unstable_by_key(|&c| c.trailing_zeros());
    }
    Ok(cells)
}
