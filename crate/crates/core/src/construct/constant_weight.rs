//! Constant-weight binary codes with pairwise intersection at most one, used
//! as the parity part `M` of a systematic PIR code.

use super::systematic::{systematic_code, BipartiteIncidence};
use crate::code::{CodeError, PirCode};

/// Largest length for the exhaustive optimum.
pub const OPTIMAL_MAX_R: usize = 12;

fn weight_w_subsets(r: usize, w: usize) -> Vec<Vec<usize>> {
    fn rec(r: usize, w: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == w {
            out.push(cur.clone());
            return;
        }
        for x in start..r {
            if r - x < w - cur.len() {
                break;
            }
            cur.push(x);
            rec(r, w, x + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(r, w, 0, &mut Vec::with_capacity(w), &mut out);
    out
}

fn distance(a: &[usize], b: &[usize]) -> usize {
    let common = a.iter().filter(|x| b.binary_search(x).is_ok()).count();
    a.len() + b.len() - 2 * common
}

/// Greedy code: scan weight-`w` supports of length `r` in lexicographic
/// order and keep each one at distance at least `d` from all kept so far.
pub fn lexicode(r: usize, w: usize, d: usize) -> Vec<Vec<usize>> {
    let mut kept: Vec<Vec<usize>> = Vec::new();
    for cand in weight_w_subsets(r, w) {
        if kept.iter().all(|k| distance(k, &cand) >= d) {
            kept.push(cand);
        }
    }
    kept
}

/// A largest constant-weight code by exhaustive clique search, `r <= 12`.
pub fn optimal_constant_weight(r: usize, w: usize, d: usize) -> Result<Vec<Vec<usize>>, CodeError> {
    if r > OPTIMAL_MAX_R {
        return Err(CodeError::Guard { what: "constant-weight length", got: r, limit: OPTIMAL_MAX_R });
    }
    let verts = weight_w_subsets(r, w);
    let n = verts.len();
    let adj: Vec<Vec<bool>> = (0..n).map(|a| (0..n).map(|b| a != b && distance(&verts[a], &verts[b]) >= d).collect()).collect();
    // fixing the first codeword is free by symmetry of the coordinates
    let mut best_set: Vec<usize> = lexicode(r, w, d)
        .iter()
        .map(|c| verts.iter().position(|v| v == c).expect("subset listed"))
        .collect();
    let mut best = best_set.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut cur = vec![0usize];
    let cand: Vec<usize> = (1..n).filter(|&b| adj[0][b]).collect();
    clique(&adj, &mut cur, cand, &mut best, &mut best_set);
    Ok(best_set.into_iter().map(|i| verts[i].clone()).collect())
}

fn clique(adj: &[Vec<bool>], cur: &mut Vec<usize>, cand: Vec<usize>, best: &mut usize, best_set: &mut Vec<usize>) {
    if cand.is_empty() {
        if cur.len() > *best {
            *best = cur.len();
            *best_set = cur.clone();
        }
        return;
    }
    // greedy colouring: a clique uses at most one vertex per colour class
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &v in &cand {
        match classes.iter_mut().find(|cl| cl.iter().all(|&u| !adj[u][v])) {
            Some(cl) => cl.push(v),
            None => classes.push(vec![v]),
        }
    }
    let ordered: Vec<(usize, usize)> =
        classes.iter().enumerate().flat_map(|(c, cl)| cl.iter().map(move |&v| (v, c + 1))).collect();
    for idx in (0..ordered.len()).rev() {
        let (v, colours) = ordered[idx];
        if cur.len() + colours <= *best {
            return;
        }
        cur.push(v);
        let next: Vec<usize> = ordered[..idx].iter().map(|&(u, _)| u).filter(|&u| adj[v][u]).collect();
        clique(adj, cur, next, best, best_set);
        cur.pop();
    }
}

/// Systematic code whose parity part is the lexicode of weight `k - 1` and
/// distance `2k - 4` on `r` parity columns.
pub fn constant_weight_code(r: usize, k: usize) -> Result<PirCode, CodeError> {
    if k < 3 || r + 1 < k {
        return Err(CodeError::Unsupported(format!("constant-weight code needs r >= k - 1 >= 2, got r={r}, k={k}")));
    }
    let rows = lexicode(r, k - 1, 2 * k - 4);
    systematic_code(&BipartiteIncidence::new(r, rows)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example5_matrix() {
        let c = constant_weight_code(5, 3).unwrap();
        assert_eq!((c.s(), c.m(), c.k()), (10, 15, 3));
        let g = c.generator();
        let m: Vec<String> = (0..10).map(|r| (10..15).map(|j| char::from(b'0' + g.get(r, j))).collect()).collect();
        assert_eq!(m, ["11000", "10100", "10010", "10001", "01100", "01010", "01001", "00110", "00101", "00011"]);
    }

    #[test]
    fn pairs_and_fano() {
        for n in 3..=10 {
            assert_eq!(constant_weight_code(n, 3).unwrap().s(), n * (n - 1) / 2);
        }
        let l = lexicode(7, 3, 4);
        assert_eq!(l.len(), 7);
        assert_eq!(optimal_constant_weight(7, 3, 4).unwrap().len(), 7);
        assert_eq!(optimal_constant_weight(6, 3, 4).unwrap().len(), 4);
        assert_eq!(optimal_constant_weight(9, 3, 4).unwrap().len(), 12);
    }

    #[test]
    fn lexicode_invariants() {
        for r in 3..=10 {
            for w in 2..=4.min(r) {
                let d = 2 * w - 2;
                let l = lexicode(r, w, d);
                for (a, x) in l.iter().enumerate() {
                    assert_eq!(x.len(), w);
                    for y in &l[a + 1..] {
                        assert!(distance(x, y) >= d);
                    }
                }
            }
        }
    }
}
