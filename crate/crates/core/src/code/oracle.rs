//! Brute-force oracle for the largest `k` a generator matrix supports at one
//! message coordinate.
//!
//! A minimal recovery set is a set of linearly independent columns whose
//! span contains `e_i` with every coefficient nonzero. These are enumerated
//! depth-first in increasing column order: a branch stops as soon as `e_i`
//! enters the span (any extension would be non-minimal), dependent columns
//! are skipped, and a branch is cut when `e_i` is not in the span of the
//! current columns together with every later column. The maximum number of
//! disjoint minimal sets is then found by exact set packing.

use super::packing::max_packing;
use super::{CodeError, RecoverySet};
use crate::gf::{Elem, FieldMatrix, FieldSpec};

pub const BINARY_COLUMN_GUARD: usize = 24;
pub const FIELD_COLUMN_GUARD: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub k_max: usize,
    pub witnesses: Vec<RecoverySet>,
}

fn check_guard(g: &FieldMatrix, i: usize) -> Result<(), CodeError> {
    let limit = if g.field().is_binary() { BINARY_COLUMN_GUARD } else { FIELD_COLUMN_GUARD };
    if g.cols() > limit {
        return Err(CodeError::Guard { what: "code length", got: g.cols(), limit });
    }
    if g.field().is_binary() && g.rows() > 64 {
        return Err(CodeError::Guard { what: "message length", got: g.rows(), limit: 64 });
    }
    if i >= g.rows() {
        return Err(CodeError::Shape(format!("message index {i} out of range 0..{}", g.rows())));
    }
    Ok(())
}

/// All minimal recovery sets for message coordinate `i`.
pub fn minimal_recovery_sets(g: &FieldMatrix, i: usize) -> Result<Vec<RecoverySet>, CodeError> {
    check_guard(g, i)?;
    if g.field().is_binary() {
        Ok(binary_sets(g, i))
    } else {
        Ok(field_sets(g, i))
    }
}

/// Maximum number of disjoint recovery sets for coordinate `i`, with sets
/// attaining it.
pub fn max_pir_k(g: &FieldMatrix, i: usize) -> Result<OracleResult, CodeError> {
    let sets = minimal_recovery_sets(g, i)?;
    let masks: Vec<u32> = sets.iter().map(|r| r.columns().fold(0u32, |m, c| m | 1 << c)).collect();
    let upper = hyperplane_bound(g, i);
    let picked = max_packing(&masks, upper);
    let mut witnesses: Vec<RecoverySet> = picked.into_iter().map(|p| sets[p].clone()).collect();
    witnesses.sort_by_key(|r| (r.len(), r.members().first().map(|&(c, _)| c)));
    Ok(OracleResult { k_max: witnesses.len(), witnesses })
}

/// Minimum of [`max_pir_k`] over all message coordinates.
pub fn code_max_k(g: &FieldMatrix) -> Result<usize, CodeError> {
    let mut best = usize::MAX;
    for i in 0..g.rows() {
        best = best.min(max_pir_k(g, i)?.k_max);
    }
    Ok(if g.rows() == 0 { 0 } else { best })
}

/// Every recovery set for `e_i` must use a column outside each hyperplane
/// that misses `e_i`, so `k` is at most the weight of any codeword `uG`
/// with `u_i != 0`. Returns the minimum such weight when enumeration is
/// cheap.
fn hyperplane_bound(g: &FieldMatrix, i: usize) -> Option<usize> {
    let q = g.field().order() as u128;
    let s = g.rows() as u32;
    if q.checked_pow(s).is_none_or(|n| n > 1 << 20) {
        return None;
    }
    let f = g.field();
    let rows = g.to_rows();
    let mut best = usize::MAX;
    let mut digits = vec![0 as Elem; g.rows()];
    digits[i] = 1;
    let others: Vec<usize> = (0..g.rows()).filter(|&r| r != i).collect();
    loop {
        let mut cw = vec![0 as Elem; g.cols()];
        for (r, &d) in digits.iter().enumerate() {
            f.axpy(&mut cw, d, &rows[r]);
        }
        best = best.min(cw.iter().filter(|&&x| x != 0).count());
        // odometer over the coordinates other than i
        let mut pos = 0;
        loop {
            if pos == others.len() {
                return Some(best);
            }
            let r = others[pos];
            digits[r] = ((digits[r] as u32 + 1) % f.order()) as Elem;
            if digits[r] != 0 {
                break;
            }
            pos += 1;
        }
    }
}

struct BinaryBasis {
    vecs: [u64; 64],
    combo: [u32; 64],
}

impl BinaryBasis {
    fn new() -> Self {
        Self { vecs: [0; 64], combo: [0; 64] }
    }

    /// Reduces `v`, returning the residue and the columns used.
    fn reduce(&self, mut v: u64, mut combo: u32) -> (u64, u32) {
        while v != 0 {
            let top = 63 - v.leading_zeros() as usize;
            if self.vecs[top] == 0 {
                break;
            }
            v ^= self.vecs[top];
            combo ^= self.combo[top];
        }
        (v, combo)
    }

    fn contains(&self, v: u64) -> bool {
        let mut v = v;
        loop {
            if v == 0 {
                return true;
            }
            let top = 63 - v.leading_zeros() as usize;
            if self.vecs[top] == 0 {
                return false;
            }
            v ^= self.vecs[top];
        }
    }

    /// Inserts an already-reduced nonzero vector, returning its pivot.
    fn insert(&mut self, v: u64, combo: u32) -> usize {
        let top = 63 - v.leading_zeros() as usize;
        self.vecs[top] = v;
        self.combo[top] = combo;
        top
    }

    fn remove(&mut self, pivot: usize) {
        self.vecs[pivot] = 0;
        self.combo[pivot] = 0;
    }
}

fn binary_sets(g: &FieldMatrix, i: usize) -> Vec<RecoverySet> {
    let cols = g.columns_as_masks().expect("binary and at most 64 rows");
    let target = 1u64 << i;
    let m = cols.len();
    // suffix[j] spans columns j..m
    let mut suffix: Vec<Vec<u64>> = vec![Vec::new(); m + 1];
    {
        let mut b = BinaryBasis::new();
        for j in (0..m).rev() {
            let (v, _) = b.reduce(cols[j], 0);
            if v != 0 {
                b.insert(v, 0);
            }
            suffix[j] = b.vecs.iter().copied().filter(|&x| x != 0).collect();
        }
    }
    let mut out = Vec::new();
    let mut basis = BinaryBasis::new();
    dfs_binary(&cols, target, 0, 0, &mut basis, &suffix, &mut out);
    out.into_iter().map(|mask| RecoverySet::ones((0..m).filter(|c| mask >> c & 1 == 1))).collect()
}

fn dfs_binary(
    cols: &[u64],
    target: u64,
    start: usize,
    chosen: u32,
    basis: &mut BinaryBasis,
    suffix: &[Vec<u64>],
    out: &mut Vec<u32>,
) {
    for c in start..cols.len() {
        let (v, combo) = basis.reduce(cols[c], 1 << c);
        if v == 0 {
            continue;
        }
        let pivot = basis.insert(v, combo);
        let now = chosen | 1 << c;
        let (rest, used) = basis.reduce(target, 0);
        if rest == 0 {
            if used == now {
                out.push(now);
            }
        } else if reachable(basis, &suffix[c + 1], target) {
            dfs_binary(cols, target, c + 1, now, basis, suffix, out);
        }
        basis.remove(pivot);
    }
}

fn reachable(basis: &BinaryBasis, suffix: &[u64], target: u64) -> bool {
    let mut joint = BinaryBasis { vecs: basis.vecs, combo: [0; 64] };
    for &v in suffix {
        let (r, _) = joint.reduce(v, 0);
        if r != 0 {
            joint.insert(r, 0);
        }
    }
    joint.contains(target)
}

/// Coefficients expressing `target` in terms of `cols` if it lies in their
/// span. Columns are assumed independent, so the answer is unique.
fn express(f: &FieldSpec, rows: usize, cols: &[Vec<Elem>], target: &[Elem]) -> Option<Vec<Elem>> {
    let mut all = cols.to_vec();
    all.push(target.to_vec());
    let m = FieldMatrix::from_columns(f, rows, &all).ok()?;
    let rr = m.rref();
    if rr.pivots.last() == Some(&cols.len()) {
        return None;
    }
    let mut coef = vec![0; cols.len()];
    for (r, &p) in rr.pivots.iter().enumerate() {
        coef[p] = rr.matrix.get(r, cols.len());
    }
    Some(coef)
}

fn field_sets(g: &FieldMatrix, i: usize) -> Vec<RecoverySet> {
    let f = g.field().clone();
    let s = g.rows();
    let cols: Vec<Vec<Elem>> = (0..g.cols()).map(|c| g.column(c)).collect();
    let mut target = vec![0; s];
    target[i] = 1;
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    field_dfs(&f, s, &cols, &target, 0, &mut chosen, &mut out);
    out
}

fn field_dfs(
    f: &FieldSpec,
    s: usize,
    cols: &[Vec<Elem>],
    target: &[Elem],
    start: usize,
    chosen: &mut Vec<usize>,
    out: &mut Vec<RecoverySet>,
) {
    for c in start..cols.len() {
        chosen.push(c);
        let current: Vec<Vec<Elem>> = chosen.iter().map(|&j| cols[j].clone()).collect();
        let independent = FieldMatrix::from_columns(f, s, &current).expect("shape").rank() == chosen.len();
        if independent {
            match express(f, s, &current, target) {
                Some(coef) => {
                    if coef.iter().all(|&a| a != 0) {
                        out.push(RecoverySet::new(chosen.iter().copied().zip(coef).collect()));
                    }
                }
                None => {
                    let mut wide = current.clone();
                    wide.extend(cols[c + 1..].iter().cloned());
                    if express_any(f, s, &wide, target) {
                        field_dfs(f, s, cols, target, c + 1, chosen, out);
                    }
                }
            }
        }
        chosen.pop();
    }
}

fn express_any(f: &FieldSpec, rows: usize, cols: &[Vec<Elem>], target: &[Elem]) -> bool {
    let mut all = cols.to_vec();
    all.push(target.to_vec());
    let m = FieldMatrix::from_columns(f, rows, &all).expect("shape");
    m.rref().pivots.last() != Some(&cols.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::PirCode;
    use crate::construct::example2_code;

    #[test]
    fn parity_codes_give_two() {
        let f = FieldSpec::binary();
        for s in 1..=10 {
            let p = PirCode::parity(&f, s);
            for i in 0..s {
                assert_eq!(max_pir_k(p.generator(), i).unwrap().k_max, 2, "s={s} i={i}");
            }
        }
    }

    #[test]
    fn example2_gives_three() {
        let c = example2_code();
        for i in 0..4 {
            let r = max_pir_k(c.generator(), i).unwrap();
            assert_eq!(r.k_max, 3);
        }
    }

    #[test]
    fn minimal_sets_of_example2_first_bit() {
        let c = example2_code();
        let sets = minimal_recovery_sets(c.generator(), 0).unwrap();
        let shown: Vec<String> = sets.iter().map(ToString::to_string).collect();
        assert!(shown.contains(&"{0}".to_string()));
        assert!(shown.contains(&"{1,4}".to_string()));
        assert!(shown.contains(&"{3,7}".to_string()));
        for r in &sets {
            let sum = r.columns().fold(vec![0u8; 4], |mut acc, col| {
                for (row, a) in acc.iter_mut().enumerate() {
                    *a ^= c.generator().get(row, col);
                }
                acc
            });
            assert_eq!(sum, vec![1, 0, 0, 0]);
        }
    }

    #[test]
    fn guard_is_enforced() {
        let f = FieldSpec::binary();
        let g = FieldMatrix::identity(&f, 25);
        assert!(matches!(max_pir_k(&g, 0), Err(CodeError::Guard { .. })));
    }

    #[test]
    fn gf4_code_oracle() {
        let f = FieldSpec::of_order(4).unwrap();
        let a = f.primitive();
        let a2 = f.mul(a, a);
        let g = FieldMatrix::from_rows(&f, &[vec![1, 0, 1, 1, 1], vec![0, 1, 1, a, a2]]).unwrap();
        for i in 0..2 {
            assert_eq!(max_pir_k(&g, i).unwrap().k_max, 3);
        }
    }
}
