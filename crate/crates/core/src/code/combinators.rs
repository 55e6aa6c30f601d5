//! Building PIR codes from smaller ones. Every output goes through
//! [`PirCode::new`], so the composed certificate is re-verified.

use super::{CodeError, PirCode, RecoverySet};
use crate::gf::Elem;

fn same_field(a: &PirCode, b: &PirCode) -> Result<(), CodeError> {
    if a.field() != b.field() {
        return Err(CodeError::Shape(format!("fields GF({}) and GF({}) differ", a.field().order(), b.field().order())));
    }
    Ok(())
}

/// `[G1 | G2]`: the recovery sets of both codes side by side, `k1 + k2`.
pub fn concat(a: &PirCode, b: &PirCode) -> Result<PirCode, CodeError> {
    same_field(a, b)?;
    if a.s() != b.s() {
        return Err(CodeError::Shape(format!("concat needs equal s, got {} and {}", a.s(), b.s())));
    }
    let g = a.generator().hstack(b.generator())?;
    let shift = a.m();
    let w = (0..a.s())
        .map(|i| {
            let mut sets = a.witnesses(i).to_vec();
            sets.extend(b.witnesses(i).iter().map(|r| r.shifted(shift)));
            sets
        })
        .collect();
    PirCode::new(g, a.k() + b.k(), w)
}

/// Block-diagonal sum, `s1 + s2` messages at `min(k1, k2)` servers.
pub fn direct_sum(a: &PirCode, b: &PirCode) -> Result<PirCode, CodeError> {
    same_field(a, b)?;
    let k = a.k().min(b.k());
    let g = a.generator().block_diag(b.generator());
    let shift = a.m();
    let mut w: Vec<Vec<RecoverySet>> = a.all_witnesses().iter().map(|sets| sets[..k].to_vec()).collect();
    w.extend(b.all_witnesses().iter().map(|sets| sets[..k].iter().map(|r| r.shifted(shift)).collect()));
    PirCode::new(g, k, w)
}

/// Keeps the first `k` recovery sets of every message.
pub fn restrict_k(c: &PirCode, k: usize) -> Result<PirCode, CodeError> {
    if k == 0 || k > c.k() {
        return Err(CodeError::Shape(format!("cannot restrict a {}-server code to {k}", c.k())));
    }
    let w = c.all_witnesses().iter().map(|sets| sets[..k].to_vec()).collect();
    PirCode::new(c.generator().clone(), k, w)
}

/// Deletes column `pos`. Each message loses the set that used it, or its
/// last set if none did, unless no message used the column at all.
pub fn puncture(c: &PirCode, pos: usize) -> Result<PirCode, CodeError> {
    if pos >= c.m() {
        return Err(CodeError::Shape(format!("position {pos} out of range 0..{}", c.m())));
    }
    let touched = c.all_witnesses().iter().any(|sets| sets.iter().any(|r| r.contains(pos)));
    let k = if touched { c.k() - 1 } else { c.k() };
    if k == 0 {
        return Err(CodeError::Unsupported("puncturing a 1-server code at a used position".into()));
    }
    let g = c.generator().without_column(pos);
    let reindex = |col: usize| match col.cmp(&pos) {
        std::cmp::Ordering::Less => Some(col),
        std::cmp::Ordering::Equal => None,
        std::cmp::Ordering::Greater => Some(col - 1),
    };
    let w = c
        .all_witnesses()
        .iter()
        .map(|sets| {
            let kept: Vec<&RecoverySet> = sets.iter().filter(|r| !r.contains(pos)).collect();
            kept[..k].iter().map(|r| r.remap(reindex)).collect()
        })
        .collect();
    PirCode::new(g, k, w)
}

/// Removes the last message: the pivot column `p` of the last row is used
/// to clear that row's contribution from every other row, then row and
/// column are deleted. Every recovery set survives with `p` removed.
pub fn shorten(c: &PirCode) -> Result<PirCode, CodeError> {
    if c.s() < 2 {
        return Err(CodeError::Unsupported("cannot shorten a code with s < 2".into()));
    }
    let f = c.field().clone();
    let r0 = c.s() - 1;
    let mut g = c.generator().clone();
    let p = (0..g.cols())
        .find(|&j| g.get(r0, j) != 0)
        .ok_or_else(|| CodeError::Shape("last generator row is zero".into()))?;
    let pivot = g.get(r0, p);
    for r in 0..r0 {
        let factor: Elem = f.div(g.get(r, p), pivot)?;
        if factor != 0 {
            g.add_scaled_row(r, r0, f.neg(factor));
        }
    }
    let g = g.without_row(r0).without_column(p);
    let reindex = |col: usize| match col.cmp(&p) {
        std::cmp::Ordering::Less => Some(col),
        std::cmp::Ordering::Equal => None,
        std::cmp::Ordering::Greater => Some(col - 1),
    };
    let w = c.all_witnesses()[..r0]
        .iter()
        .map(|sets| sets.iter().map(|r| r.remap(reindex)).collect())
        .collect();
    PirCode::new(g, c.k(), w)
}

/// Binary codes with odd `k`: append the sum of all columns. The columns
/// outside every recovery set of message `i`, together with the new one,
/// then sum to `e_i`. When all columns already sum to zero no column is
/// added.
pub fn even_extend(c: &PirCode) -> Result<PirCode, CodeError> {
    if !c.field().is_binary() {
        return Err(CodeError::Unsupported("even extension is defined over GF(2) only".into()));
    }
    if c.k() % 2 == 0 {
        return Err(CodeError::Unsupported(format!("even extension needs odd k, got {}", c.k())));
    }
    let g0 = c.generator();
    let total: Vec<Elem> = (0..c.s())
        .map(|r| (0..c.m()).fold(0, |acc, j| acc ^ g0.get(r, j)))
        .collect();
    let add = total.iter().any(|&v| v != 0);
    let g = if add { g0.with_column(&total)? } else { g0.clone() };
    let w = c
        .all_witnesses()
        .iter()
        .map(|sets| {
            let mut used = vec![false; c.m()];
            for r in sets {
                for col in r.columns() {
                    used[col] = true;
                }
            }
            let mut rest: Vec<usize> = (0..c.m()).filter(|&j| !used[j]).collect();
            if add {
                rest.push(c.m());
            }
            let mut out = sets.to_vec();
            out.push(RecoverySet::ones(rest));
            out
        })
        .collect();
    PirCode::new(g, c.k() + 1, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{balanced_multiplicity_code, example2_code};
    use crate::gf::FieldSpec;
    use proptest::prelude::*;

    fn f2() -> FieldSpec {
        FieldSpec::binary()
    }

    #[test]
    fn small_table_cells() {
        let p = PirCode::parity(&f2(), 2);
        let id = PirCode::identity(&f2(), 2);
        let c = concat(&p, &id).unwrap();
        assert_eq!((c.m(), c.k()), (5, 3));
        let e = even_extend(&c).unwrap();
        assert_eq!((e.m(), e.k()), (6, 4));
        let back = puncture(&e, 5).unwrap();
        assert_eq!((back.m(), back.k()), (5, 3));
    }

    #[test]
    fn direct_sum_and_shorten() {
        let a = example2_code();
        let d = direct_sum(&a, &PirCode::parity(&f2(), 3)).unwrap();
        assert_eq!((d.s(), d.m(), d.k()), (7, 12, 2));
        let s = shorten(&a).unwrap();
        assert_eq!((s.s(), s.m(), s.k()), (3, 7, 3));
        let b = balanced_multiplicity_code(3, 16).unwrap();
        let p = puncture(&b, b.m() - 1).unwrap();
        assert_eq!((p.m(), p.k()), (27, 15));
    }

    #[test]
    fn errors() {
        let a = example2_code();
        assert!(even_extend(&concat(&a, &a).unwrap()).is_err());
        assert!(concat(&a, &PirCode::parity(&f2(), 3)).is_err());
        assert!(puncture(&PirCode::identity(&f2(), 2), 0).is_err());
        assert!(shorten(&PirCode::identity(&f2(), 1)).is_err());
    }

    #[test]
    fn non_binary_shorten_and_concat() {
        let c = crate::construct::gf4_example_code();
        let s = shorten(&c).unwrap();
        assert_eq!((s.s(), s.m(), s.k()), (1, 4, 3));
        assert_eq!(concat(&c, &c).unwrap().k(), 6);
    }

    proptest! {
        #[test]
        fn puncture_any_position(pos in 0usize..14) {
            let b = balanced_multiplicity_code(3, 8).unwrap();
            let p = puncture(&b, pos).unwrap();
            prop_assert_eq!(p.k(), 7);
            prop_assert_eq!(p.m(), 13);
        }

        #[test]
        fn shorten_chain(s in 2usize..6) {
            let mut c = balanced_multiplicity_code(s, 1 << (s - 1)).unwrap();
            let k = c.k();
            while c.s() > 1 {
                let m = c.m();
                c = shorten(&c).unwrap();
                prop_assert_eq!(c.m(), m - 1);
                prop_assert_eq!(c.k(), k);
            }
        }
    }
}
