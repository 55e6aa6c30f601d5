//! The dual view of PIR codes: a base code `C` given by an `s x m`
//! parity-check matrix `H`, and `s` cosets of `C` with linearly independent
//! syndromes, each holding `k` vectors of pairwise disjoint support.
//!
//! A coset vector is stored as a [`RecoverySet`] (its support with the
//! nonzero entries), so `H v` is the coefficient-weighted column sum.

use super::{CodeError, PirCode, RecoverySet};
use crate::gf::{Elem, FieldMatrix};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetFamily {
    pub h: FieldMatrix,
    pub syndromes: Vec<Vec<Elem>>,
    pub witnesses: Vec<Vec<RecoverySet>>,
}

fn syndrome(h: &FieldMatrix, v: &RecoverySet) -> Vec<Elem> {
    let f = h.field();
    let mut acc = vec![0; h.rows()];
    for &(c, a) in v.members() {
        f.axpy(&mut acc, a, &h.column(c));
    }
    acc
}

impl CosetFamily {
    /// `H = G`, unit syndromes, and the code's recovery sets as coset
    /// vectors.
    pub fn from_code(c: &PirCode) -> Self {
        let s = c.s();
        Self {
            h: c.generator().clone(),
            syndromes: (0..s).map(|i| (0..s).map(|r| (r == i) as Elem).collect()).collect(),
            witnesses: c.all_witnesses().to_vec(),
        }
    }

    pub fn k(&self) -> usize {
        self.witnesses.first().map_or(0, Vec::len)
    }

    fn syndrome_matrix(&self) -> Result<FieldMatrix, CodeError> {
        Ok(FieldMatrix::from_columns(self.h.field(), self.h.rows(), &self.syndromes)?)
    }
}

/// Checks independence of the syndromes, and that every coset's vectors
/// have that syndrome and pairwise disjoint supports.
pub fn bk_check(fam: &CosetFamily) -> Result<(), CodeError> {
    let s = fam.h.rows();
    if fam.syndromes.len() != s || fam.witnesses.len() != s {
        return Err(CodeError::Shape(format!(
            "{} syndromes and {} witness lists for {s} parity rows",
            fam.syndromes.len(),
            fam.witnesses.len()
        )));
    }
    if fam.syndromes.iter().any(|v| v.len() != s) {
        return Err(CodeError::Shape("syndrome length differs from the number of parity rows".into()));
    }
    let rank = fam.syndrome_matrix()?.rank();
    if rank < s {
        return Err(CodeError::Unsupported(format!("syndromes are dependent (rank {rank} < {s})")));
    }
    let k = fam.k();
    for (i, vecs) in fam.witnesses.iter().enumerate() {
        if vecs.len() != k || k == 0 {
            return Err(CodeError::Shape(format!("coset {i} has {} vectors, expected {k}", vecs.len())));
        }
        let mut used = vec![false; fam.h.cols()];
        for (j, v) in vecs.iter().enumerate() {
            if v.is_empty() || v.members().iter().any(|&(c, a)| a == 0 || c >= fam.h.cols()) {
                return Err(CodeError::Shape(format!("coset {i} vector {j} is malformed")));
            }
            for c in v.columns() {
                if std::mem::replace(&mut used[c], true) {
                    return Err(CodeError::Unsupported(format!("coset {i} vectors overlap at column {c}")));
                }
            }
            if syndrome(&fam.h, v) != fam.syndromes[i] {
                return Err(CodeError::Unsupported(format!("coset {i} vector {j} has the wrong syndrome")));
            }
        }
    }
    Ok(())
}

/// Row-reduces `[H | S]` until the right block is the identity and returns
/// the left block as a generator, certified by the coset vectors.
pub fn bk_to_generator(fam: &CosetFamily) -> Result<PirCode, CodeError> {
    bk_check(fam)?;
    let m = fam.h.cols();
    let aug = fam.h.hstack(&fam.syndrome_matrix()?)?;
    // reduce on the syndrome block first by moving it to the front
    let order: Vec<usize> = (m..aug.cols()).chain(0..m).collect();
    let red = aug.select_columns(&order).rref().matrix;
    let h2 = red.select_columns(&(fam.h.rows()..red.cols()).collect::<Vec<_>>());
    PirCode::new(h2, fam.k(), fam.witnesses.clone())
}

/// Punctures the base code at `pos`: the parity-check matrix loses one row
/// and the column, every coset vector loses `pos`, and `s - 1` cosets with
/// independent syndromes are kept greedily.
pub fn bk_puncture(fam: &CosetFamily, pos: usize) -> Result<CosetFamily, CodeError> {
    bk_check(fam)?;
    let f = fam.h.field().clone();
    let s = fam.h.rows();
    if pos >= fam.h.cols() || s < 2 {
        return Err(CodeError::Shape(format!("cannot puncture at {pos} with {s} parity rows")));
    }
    let col = fam.h.column(pos);
    let r0 = (0..s).rev().find(|&r| col[r] != 0).ok_or_else(|| CodeError::Unsupported("zero parity-check column".into()))?;
    // the linear map clearing row r0 through column pos
    let map = |v: &[Elem]| -> Result<Vec<Elem>, CodeError> {
        let mut out = Vec::with_capacity(s - 1);
        for r in (0..s).filter(|&r| r != r0) {
            let factor = f.div(col[r], col[r0])?;
            out.push(f.sub(v[r], f.mul(factor, v[r0])));
        }
        Ok(out)
    };
    let cols: Vec<Vec<Elem>> = (0..fam.h.cols()).filter(|&c| c != pos).map(|c| map(&fam.h.column(c))).collect::<Result<_, _>>()?;
    let h = FieldMatrix::from_columns(&f, s - 1, &cols)?;
    let reindex = |c: usize| (c != pos).then_some(if c > pos { c - 1 } else { c });
    let mut syndromes: Vec<Vec<Elem>> = Vec::new();
    let mut witnesses = Vec::new();
    for (i, sigma) in fam.syndromes.iter().enumerate() {
        let image = map(sigma)?;
        let mut trial = syndromes.clone();
        trial.push(image.clone());
        if FieldMatrix::from_columns(&f, s - 1, &trial)?.rank() == trial.len() {
            syndromes.push(image);
            witnesses.push(fam.witnesses[i].iter().map(|v| v.remap(reindex)).collect());
            if syndromes.len() == s - 1 {
                break;
            }
        }
    }
    let out = CosetFamily { h, syndromes, witnesses };
    bk_check(&out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::example2_code;
    use crate::gf::FieldSpec;

    #[test]
    fn parity_from_cosets() {
        let f = FieldSpec::binary();
        // H = [[1,0,1],[0,1,1]] with syndromes in a scrambled basis
        let h = FieldMatrix::from_rows(&f, &[vec![1, 0, 1], vec![0, 1, 1]]).unwrap();
        let syndromes = vec![vec![1, 1], vec![0, 1]];
        let witnesses = vec![
            vec![RecoverySet::ones([2]), RecoverySet::ones([0, 1])],
            vec![RecoverySet::ones([1]), RecoverySet::ones([0, 2])],
        ];
        let fam = CosetFamily { h, syndromes, witnesses };
        let c = bk_to_generator(&fam).unwrap();
        assert_eq!((c.s(), c.m(), c.k()), (2, 3, 2));
    }

    #[test]
    fn example2_round_trip() {
        let c = example2_code();
        let back = bk_to_generator(&CosetFamily::from_code(&c)).unwrap();
        assert_eq!(back.generator(), c.generator());
        assert_eq!(back.all_witnesses(), c.all_witnesses());
    }

    #[test]
    fn puncture_keeps_property() {
        let fam = CosetFamily::from_code(&example2_code());
        for pos in 0..8 {
            let p = bk_puncture(&fam, pos).unwrap();
            assert_eq!(p.syndromes.len(), 3);
            assert_eq!(p.k(), 3);
            let code = bk_to_generator(&p).unwrap();
            assert_eq!((code.s(), code.m()), (3, 7));
        }
    }

    #[test]
    fn dependent_syndromes_rejected() {
        let mut fam = CosetFamily::from_code(&example2_code());
        fam.syndromes[1] = fam.syndromes[0].clone();
        assert!(bk_check(&fam).is_err());
    }
}
