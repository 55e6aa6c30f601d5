//! Exact maximum set packing over a universe of at most 32 elements.
//!
//! Sets are `u32` masks. Singletons are always taken (exchanging any set
//! that uses the element for the singleton keeps a packing valid). The rest
//! is a memoised search over the mask of still-available elements that
//! branches on its lowest element: either that element stays unused, or one
//! of the sets whose smallest element it is gets chosen. A greedy packing
//! seeds the search and an external upper bound can stop it early.

use std::collections::HashMap;

/// Indices into `sets` of a maximum family of pairwise-disjoint sets.
/// `upper` is a bound the caller knows cannot be exceeded; the search stops
/// as soon as a packing of that size is found.
pub fn max_packing(sets: &[u32], upper: Option<usize>) -> Vec<usize> {
    let mut chosen = Vec::new();
    let mut used = 0u32;
    for (idx, &s) in sets.iter().enumerate() {
        if s.count_ones() == 1 && s & used == 0 {
            chosen.push(idx);
            used |= s;
        }
    }
    let rest: Vec<usize> = (0..sets.len())
        .filter(|&i| sets[i] != 0 && sets[i].count_ones() > 1 && sets[i] & used == 0)
        .collect();
    let upper = upper.map(|u| u.saturating_sub(chosen.len()));
    let avail = rest.iter().fold(0u32, |a, &i| a | sets[i]);

    let greedy = greedy(sets, &rest);
    if upper.is_some_and(|u| greedy.len() >= u) || rest.is_empty() {
        chosen.extend(greedy);
        return chosen;
    }

    let mut by_low: Vec<Vec<usize>> = vec![Vec::new(); 32];
    for &i in &rest {
        by_low[sets[i].trailing_zeros() as usize].push(i);
    }
    let mut solver = Solver { sets, by_low, memo: HashMap::new() };
    let best = solver.solve(avail);
    let picked = if best as usize > greedy.len() { solver.extract(avail) } else { greedy };
    chosen.extend(picked);
    chosen
}

fn greedy(sets: &[u32], rest: &[usize]) -> Vec<usize> {
    let mut order = rest.to_vec();
    order.sort_by_key(|&i| (sets[i].count_ones(), sets[i]));
    let mut used = 0u32;
    let mut out = Vec::new();
    for i in order {
        if sets[i] & used == 0 {
            used |= sets[i];
            out.push(i);
        }
    }
    out
}

struct Solver<'a> {
    sets: &'a [u32],
    by_low: Vec<Vec<usize>>,
    memo: HashMap<u32, u8>,
}

impl Solver<'_> {
    fn solve(&mut self, avail: u32) -> u8 {
        if avail.count_ones() < 2 {
            return 0;
        }
        if let Some(&v) = self.memo.get(&avail) {
            return v;
        }
        let e = avail.trailing_zeros() as usize;
        let without = avail & !(1 << e);
        let mut best = self.solve(without);
        // at most one set per two available elements remains possible
        let cap = (avail.count_ones() / 2) as u8;
        for idx in 0..self.by_low[e].len() {
            if best >= cap {
                break;
            }
            let s = self.sets[self.by_low[e][idx]];
            if s & !avail == 0 {
                best = best.max(1 + self.solve(avail & !s));
            }
        }
        self.memo.insert(avail, best);
        best
    }

    fn extract(&mut self, mut avail: u32) -> Vec<usize> {
        let mut out = Vec::new();
        loop {
            let target = self.solve(avail);
            if target == 0 {
                return out;
            }
            let e = avail.trailing_zeros() as usize;
            let without = avail & !(1 << e);
            if self.solve(without) == target {
                avail = without;
                continue;
            }
            let options = self.by_low[e].clone();
            let idx = options
                .into_iter()
                .find(|&i| {
                    let s = self.sets[i];
                    s & !avail == 0 && 1 + self.solve(avail & !s) == target
                })
                .expect("memoised optimum is realised by some branch");
            out.push(idx);
            avail &= !self.sets[idx];
        }
    }
}
