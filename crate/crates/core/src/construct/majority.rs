//! Binary cyclic codes and their orthogonal parity checks; the `(15,7)`
//! one-step majority-logic decodable code as a five-server PIR code.

use crate::code::packing::max_packing;
use crate::code::{CodeError, PirCode, RecoverySet};
use crate::gf::{FieldMatrix, FieldSpec};

/// `g(x) = 1 + x^4 + x^6 + x^7 + x^8`.
pub const ML15_7_POLY: u64 = 0x1D1;

/// Orthogonal check sets on coordinate 14 of the `(15,7)` code, coordinate
/// 14 itself omitted.
pub const ML15_7_CHECKS: [[usize; 3]; 4] = [[3, 11, 12], [1, 5, 13], [0, 2, 6], [7, 8, 10]];

/// Largest dual dimension enumerated exactly.
pub const ORTHOGONAL_EXACT_DUAL_DIM: usize = 20;

fn degree(p: u64) -> Option<u32> {
    (p != 0).then(|| 63 - p.leading_zeros())
}

fn poly_mod(mut a: u64, g: u64) -> u64 {
    let dg = degree(g).expect("nonzero modulus");
    while let Some(da) = degree(a).filter(|&d| d >= dg) {
        a ^= g << (da - dg);
    }
    a
}

/// Systematic generator of the cyclic code generated by `g`: row `t` is the
/// codeword with a single information one at position `n - k + t`.
pub fn cyclic_generator(g: u64, n: usize) -> Result<FieldMatrix, CodeError> {
    if n == 0 || n > 63 {
        return Err(CodeError::Guard { what: "cyclic length", got: n, limit: 63 });
    }
    let dg = match degree(g) {
        Some(d) if (d as usize) < n && g & 1 == 1 => d as usize,
        _ => return Err(CodeError::Unsupported(format!("generator polynomial {g:#x} is not valid for length {n}"))),
    };
    if poly_mod((1u64 << n) | 1, g) != 0 {
        return Err(CodeError::Unsupported(format!("g = {g:#x} does not divide x^{n} - 1")));
    }
    let k = n - dg;
    let f = FieldSpec::binary();
    let mut m = FieldMatrix::zeros(&f, k, n);
    for t in 0..k {
        let pos = dg + t;
        let rem = poly_mod(1u64 << pos, g);
        m.set(t, pos, 1);
        for j in 0..dg {
            m.set(t, j, (rem >> j & 1) as u8);
        }
    }
    Ok(m)
}

/// Dual codewords orthogonal on one coordinate: each contains it, and any
/// two share nothing else.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthogonalSet {
    pub coordinate: usize,
    pub words: Vec<u64>,
}

impl OrthogonalSet {
    pub fn j(&self) -> usize {
        self.words.len()
    }

    /// Supports with the common coordinate removed.
    pub fn sets(&self) -> Vec<Vec<usize>> {
        self.words
            .iter()
            .map(|&w| (0..64).filter(|&b| b != self.coordinate && w >> b & 1 == 1).collect())
            .collect()
    }
}

fn mask_row(m: &FieldMatrix, r: usize) -> u64 {
    (0..m.cols()).fold(0u64, |acc, c| acc | (m.get(r, c) as u64) << c)
}

/// A largest orthogonal set on coordinate `i`. Exact (all dual codewords
/// plus maximum packing) when `n <= 32` and the dual dimension is at most
/// 20; otherwise greedy over cyclic shifts of the dual basis.
pub fn cyclic_orthogonal_search(g: u64, n: usize, i: usize) -> Result<OrthogonalSet, CodeError> {
    let gen = cyclic_generator(g, n)?;
    if i >= n {
        return Err(CodeError::Shape(format!("coordinate {i} out of range 0..{n}")));
    }
    let h = gen.dual()?;
    let basis: Vec<u64> = (0..h.rows()).map(|r| mask_row(&h, r)).collect();
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let rotate = |w: u64, by: usize| ((w << by) | (w >> ((n - by) % n))) & full;
    let candidates: Vec<u64> = if basis.len() <= ORTHOGONAL_EXACT_DUAL_DIM && n <= 32 {
        (1u64..1 << basis.len())
            .map(|sel| basis.iter().enumerate().filter(|&(b, _)| sel >> b & 1 == 1).fold(0, |a, (_, &w)| a ^ w))
            .filter(|w| w >> i & 1 == 1)
            .collect()
    } else {
        let mut c: Vec<u64> = basis
            .iter()
            .flat_map(|&w| (0..n).map(move |by| (w, by)))
            .map(|(w, by)| rotate(w, by))
            .filter(|w| w >> i & 1 == 1)
            .collect();
        c.sort_by_key(|w| (w.count_ones(), *w));
        c.dedup();
        let mut used = 0u64;
        let words = c
            .into_iter()
            .filter(|&w| {
                let rest = w & !(1 << i);
                let ok = rest & used == 0;
                if ok {
                    used |= rest;
                }
                ok
            })
            .collect();
        return Ok(OrthogonalSet { coordinate: i, words });
    };
    let masks: Vec<u32> = candidates.iter().map(|&w| (w & !(1u64 << i)) as u32).collect();
    let mut words: Vec<u64> = max_packing(&masks, None).into_iter().map(|p| candidates[p]).collect();
    words.sort_by_key(|w| (w.count_ones(), *w));
    Ok(OrthogonalSet { coordinate: i, words })
}

/// The `[15,7]` code with systematic generator. Message bit `t` sits at
/// coordinate `8 + t`; its recovery sets are the singleton and the four
/// orthogonal checks cyclically shifted from coordinate 14.
pub fn majority_logic_15_7() -> PirCode {
    let n = 15;
    let g = cyclic_generator(ML15_7_POLY, n).expect("g divides x^15 - 1");
    let witnesses = (0..7)
        .map(|t| {
            let pos = 8 + t;
            let shift = (pos + n - 14) % n;
            let mut sets = vec![RecoverySet::ones([pos])];
            sets.extend(ML15_7_CHECKS.iter().map(|c| RecoverySet::ones(c.iter().map(|&x| (x + shift) % n))));
            sets
        })
        .collect();
    PirCode::new(g, 5, witnesses).expect("shifted checks verify")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ml15_7_certificate() {
        let c = majority_logic_15_7();
        assert_eq!((c.s(), c.m(), c.k()), (7, 15, 5));
        assert_eq!(c.generator().min_distance().unwrap(), 5);
    }

    #[test]
    fn orthogonal_search_on_last_coordinate() {
        let o = cyclic_orthogonal_search(ML15_7_POLY, 15, 14).unwrap();
        assert_eq!(o.j(), 4);
        let g = cyclic_generator(ML15_7_POLY, 15).unwrap();
        let rows: Vec<u64> = (0..7).map(|r| mask_row(&g, r)).collect();
        for check in ML15_7_CHECKS {
            let w = check.iter().fold(1u64 << 14, |a, &x| a | 1 << x);
            assert!(rows.iter().all(|&r| (r & w).count_ones() % 2 == 0), "{check:?} is a dual codeword");
        }
    }

    #[test]
    fn trivial_length_three() {
        let o = cyclic_orthogonal_search(0b11, 3, 1).unwrap();
        assert_eq!(o.j(), 1);
        assert_eq!(o.sets(), vec![vec![0, 2]]);
        assert!(cyclic_generator(0b111, 4).is_err());
    }
}
