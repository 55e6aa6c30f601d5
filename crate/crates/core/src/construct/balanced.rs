//! Codes made of nonzero binary columns: every nonzero column of length
//! `s` repeated `k / 2^(s-1)` times, and the single-copy variant with the
//! nonzero vectors of a 2-dimensional subspace removed. Both meet the lower
//! bound with equality.

use crate::code::{CodeError, PirCode, RecoverySet};
use crate::gf::{FieldMatrix, FieldSpec};

/// Largest `s` accepted; the code has `2^s - 1` columns per copy.
pub const BALANCED_MAX_S: usize = 16;

fn column_matrix(s: usize, vectors: &[usize]) -> FieldMatrix {
    let f = FieldSpec::binary();
    let mut g = FieldMatrix::zeros(&f, s, vectors.len());
    for (c, &v) in vectors.iter().enumerate() {
        for r in 0..s {
            if v >> r & 1 == 1 {
                g.set(r, c, 1);
            }
        }
    }
    g
}

pub fn balanced_multiplicity_code(s: usize, k: usize) -> Result<PirCode, CodeError> {
    if s == 0 || s > BALANCED_MAX_S {
        return Err(CodeError::Guard { what: "balanced s", got: s, limit: BALANCED_MAX_S });
    }
    let half = 1usize << (s - 1);
    if k == 0 || k % half != 0 {
        return Err(CodeError::Unsupported(format!("balanced code needs 2^(s-1) = {half} to divide k = {k}")));
    }
    let mu = k / half;
    let per_copy = (1usize << s) - 1;
    // vector v (bit r = row r) of copy t sits at column t * per_copy + v - 1
    let vectors: Vec<usize> = (0..mu).flat_map(|_| 1..=per_copy).collect();
    let col = |t: usize, v: usize| t * per_copy + v - 1;
    let witnesses = (0..s)
        .map(|i| {
            let e = 1usize << i;
            let mut sets = Vec::with_capacity(k);
            for t in 0..mu {
                sets.push(RecoverySet::ones([col(t, e)]));
                for v in (1..=per_copy).filter(|v| v & e == 0) {
                    sets.push(RecoverySet::ones([col(t, v), col(t, v | e)]));
                }
            }
            sets
        })
        .collect();
    PirCode::new(column_matrix(s, &vectors), k, witnesses)
}

/// All nonzero columns of length `s >= 3` except `e_0`, `e_1`, `e_0 + e_1`:
/// an `[2^s - 4, s]` code with `k = 2^(s-1) - 2`.
pub fn simplex_minus_line(s: usize) -> Result<PirCode, CodeError> {
    if !(3..=BALANCED_MAX_S).contains(&s) {
        return Err(CodeError::Guard { what: "simplex-minus-line s", got: s, limit: BALANCED_MAX_S });
    }
    let vectors: Vec<usize> = (4..1usize << s).collect();
    let col = |v: usize| v - 4;
    let k = (1 << (s - 1)) - 2;
    let witnesses = (0..s)
        .map(|i| {
            let e = 1usize << i;
            let mut sets = Vec::with_capacity(k);
            if i >= 2 {
                // e_i survives; the coset e_i + {1,2,3} forms one extra triple
                sets.push(RecoverySet::ones([col(e)]));
                sets.push(RecoverySet::ones([col(e | 1), col(e | 2), col(e | 3)]));
            }
            for v in vectors.iter().copied().filter(|&v| v & e == 0 && v >> 2 != e >> 2) {
                if v ^ e >= 4 {
                    sets.push(RecoverySet::ones([col(v), col(v ^ e)]));
                }
            }
            sets
        })
        .collect();
    PirCode::new(column_matrix(s, &vectors), k, witnesses)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_instances() {
        let c = balanced_multiplicity_code(2, 2).unwrap();
        assert_eq!((c.m(), c.k()), (3, 2));
        let c = balanced_multiplicity_code(3, 4).unwrap();
        assert_eq!((c.m(), c.k()), (7, 4));
        let c = balanced_multiplicity_code(3, 8).unwrap();
        assert_eq!(c.m(), 14);
        for s in 1..=5 {
            let half = 1 << (s - 1);
            for mu in 1..=3 {
                let c = balanced_multiplicity_code(s, half * mu).unwrap();
                assert_eq!(c.m(), ((1 << s) - 1) * mu);
            }
        }
        assert!(balanced_multiplicity_code(3, 6).is_err());
    }

    #[test]
    fn simplex_minus_line_meets_bound() {
        for s in 3..=7 {
            let c = simplex_minus_line(s).unwrap();
            assert_eq!(c.m(), (1 << s) - 4);
            assert_eq!(c.k(), (1 << (s - 1)) - 2);
            assert_eq!(c.m(), crate::code::bounds::lower_bound(s, c.k()));
        }
    }
}
