//! Systematic codes `[I | M]` where `M` is the incidence matrix of a
//! bipartite graph without 4-cycles, and the Steiner-system codes built on
//! them.

use super::design::SteinerSystem;
use crate::code::{CodeError, PirCode, RecoverySet};
use crate::gf::{FieldMatrix, FieldSpec};

/// Left vertices are message bits, right vertices are parity columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteIncidence {
    s: usize,
    r: usize,
    adj: Vec<Vec<usize>>,
}

impl BipartiteIncidence {
    pub fn new(r: usize, mut adj: Vec<Vec<usize>>) -> Result<Self, CodeError> {
        for row in &mut adj {
            row.sort_unstable();
            row.dedup();
            if row.last().is_some_and(|&p| p >= r) {
                return Err(CodeError::Shape(format!("right vertex out of range 0..{r}")));
            }
        }
        Ok(Self { s: adj.len(), r, adj })
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self, CodeError> {
        let r = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != r) {
            return Err(CodeError::Shape("ragged incidence rows".into()));
        }
        Self::new(r, rows.iter().map(|row| (0..r).filter(|&j| row[j] != 0).collect()).collect())
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn neighbors(&self, left: usize) -> &[usize] {
        &self.adj[left]
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// True when no two left vertices share two right neighbours.
    pub fn four_cycle_free(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        for p in 0..self.r {
            let left: Vec<usize> = (0..self.s).filter(|&l| self.adj[l].binary_search(&p).is_ok()).collect();
            for a in 0..left.len() {
                for b in a + 1..left.len() {
                    if !seen.insert((left[a], left[b])) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn right_neighbors(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.r];
        for (l, row) in self.adj.iter().enumerate() {
            for &p in row {
                out[p].push(l);
            }
        }
        out
    }
}

/// `[I | M]` certified for `min_degree + 1` servers: the singleton, and for
/// each of the first `k - 1` parities on bit `i`, that parity together with
/// the other bits it covers.
pub fn systematic_code(inc: &BipartiteIncidence) -> Result<PirCode, CodeError> {
    if !inc.four_cycle_free() {
        return Err(CodeError::Unsupported("incidence matrix contains a 4-cycle".into()));
    }
    let (s, r) = (inc.s, inc.r);
    let k = inc.min_degree() + 1;
    let f = FieldSpec::binary();
    let mut g = FieldMatrix::zeros(&f, s, s + r);
    for (l, row) in inc.adj.iter().enumerate() {
        g.set(l, l, 1);
        for &p in row {
            g.set(l, s + p, 1);
        }
    }
    let cover = inc.right_neighbors();
    let witnesses = (0..s)
        .map(|i| {
            let mut sets = vec![RecoverySet::ones([i])];
            for &p in &inc.adj[i][..k - 1] {
                let cols = cover[p].iter().copied().filter(|&l| l != i).chain([s + p]);
                sets.push(RecoverySet::ones(cols));
            }
            sets
        })
        .collect();
    PirCode::new(g, k, witnesses)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    /// Points are message bits, blocks are parities.
    Column,
    /// Blocks are message bits, points are parities.
    Row,
}

pub fn steiner_code(sys: &SteinerSystem, orientation: Orientation) -> Result<PirCode, CodeError> {
    if sys.t != 2 {
        return Err(CodeError::Unsupported(format!("{sys} is not a pairwise design")));
    }
    let inc = match orientation {
        Orientation::Column => BipartiteIncidence::new(sys.blocks.len(), sys.point_blocks())?,
        Orientation::Row => BipartiteIncidence::new(sys.n, sys.blocks.clone())?,
    };
    systematic_code(&inc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::design::{projective_plane, steiner_triple};

    #[test]
    fn fano_both_ways() {
        let fano = projective_plane(2).unwrap();
        for o in [Orientation::Column, Orientation::Row] {
            let c = steiner_code(&fano, o).unwrap();
            assert_eq!((c.m(), c.s(), c.k()), (14, 7, 4));
            assert_eq!(c.overhead(), num_rational::Ratio::from_integer(2));
        }
    }

    #[test]
    fn triple_systems() {
        let c = steiner_code(&steiner_triple(9).unwrap(), Orientation::Column).unwrap();
        assert_eq!((c.m(), c.s(), c.k()), (21, 9, 5));
        let c = steiner_code(&steiner_triple(9).unwrap(), Orientation::Row).unwrap();
        assert_eq!((c.m(), c.s(), c.k()), (21, 12, 4));
        let c = steiner_code(&steiner_triple(13).unwrap(), Orientation::Column).unwrap();
        assert_eq!((c.s(), c.k()), (13, 7));
    }

    #[test]
    fn four_cycle_rejected() {
        let inc = BipartiteIncidence::from_rows(&[vec![1, 1, 0], vec![1, 1, 1]]).unwrap();
        assert!(!inc.four_cycle_free());
        assert!(systematic_code(&inc).is_err());
    }
}
