//! Hypercube codes: information bits on the grid `[sigma]^(k-1)`, one parity
//! per axis-parallel line.

use crate::code::{CodeError, PirCode, RecoverySet};
use crate::gf::{FieldMatrix, FieldSpec};

/// Cap on the number of grid points `sigma^(k-1)`.
pub const CUBIC_MAX_POINTS: usize = 1 << 16;

pub fn cubic_code(sigma: usize, k: usize) -> Result<PirCode, CodeError> {
    if sigma < 2 || k < 2 {
        return Err(CodeError::Unsupported(format!("cubic code needs sigma >= 2 and k >= 2, got ({sigma}, {k})")));
    }
    let points = grid_points(sigma, k)?;
    build(points, sigma, k)
}

/// The cubic code on the smallest grid holding `s` bits, keeping only the
/// first `s` grid points. Length `s + (k-1) sigma^(k-2)`.
pub fn cubic_shortened(s: usize, k: usize) -> Result<PirCode, CodeError> {
    if s == 0 || k < 2 {
        return Err(CodeError::Unsupported(format!("cubic code needs s >= 1 and k >= 2, got ({s}, {k})")));
    }
    let sigma = crate::code::bounds::cubic_side(s, k);
    grid_points(sigma, k)?;
    build(s, sigma, k)
}

fn grid_points(sigma: usize, k: usize) -> Result<usize, CodeError> {
    let pts = u32::try_from(k - 1)
        .ok()
        .and_then(|e| sigma.checked_pow(e))
        .filter(|&p| p <= CUBIC_MAX_POINTS);
    pts.ok_or(CodeError::Guard { what: "cubic grid size", got: sigma.saturating_pow((k - 1) as u32), limit: CUBIC_MAX_POINTS })
}

fn build(s: usize, sigma: usize, k: usize) -> Result<PirCode, CodeError> {
    let dims = k - 1;
    let line_count = sigma.pow(dims as u32 - 1);
    let m = s + dims * line_count;
    let digits = |mut x: usize| {
        let mut d = vec![0usize; dims];
        for slot in d.iter_mut().rev() {
            *slot = x % sigma;
            x /= sigma;
        }
        d
    };
    let index = |d: &[usize]| d.iter().fold(0usize, |acc, &x| acc * sigma + x);
    // parity column of the line through `d` along axis `xi`
    let parity = |d: &[usize], xi: usize| {
        let reduced: Vec<usize> = d.iter().enumerate().filter(|&(a, _)| a != xi).map(|(_, &x)| x).collect();
        s + xi * line_count + index(&reduced)
    };
    let f = FieldSpec::binary();
    let mut g = FieldMatrix::zeros(&f, s, m);
    for x in 0..s {
        g.set(x, x, 1);
        let d = digits(x);
        for xi in 0..dims {
            g.set(x, parity(&d, xi), 1);
        }
    }
    let witnesses = (0..s)
        .map(|x| {
            let d = digits(x);
            let mut sets = vec![RecoverySet::ones([x])];
            for xi in 0..dims {
                let mut cols: Vec<usize> = (0..sigma)
                    .filter(|&v| v != d[xi])
                    .map(|v| {
                        let mut e = d.clone();
                        e[xi] = v;
                        index(&e)
                    })
                    .filter(|&y| y < s)
                    .collect();
                cols.push(parity(&d, xi));
                sets.push(RecoverySet::ones(cols));
            }
            sets
        })
        .collect();
    PirCode::new(g, k, witnesses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    #[test]
    fn parameters() {
        let c = cubic_code(3, 3).unwrap();
        assert_eq!((c.s(), c.m(), c.k()), (9, 15, 3));
        assert_eq!(c.overhead(), Ratio::new(5, 3));
        let c = cubic_code(2, 3).unwrap();
        assert_eq!((c.s(), c.m()), (4, 8));
        let c = cubic_code(2, 4).unwrap();
        assert_eq!((c.s(), c.m()), (8, 20));
        for sigma in 2..=4 {
            for k in 2..=4 {
                let c = cubic_code(sigma, k).unwrap();
                assert_eq!(c.overhead(), Ratio::new(sigma + k - 1, sigma));
            }
        }
    }

    #[test]
    fn shortened_lengths() {
        for s in 1..=20 {
            for k in 2..=5 {
                let c = cubic_shortened(s, k).unwrap();
                assert_eq!(c.m(), crate::code::bounds::cubic_bound(s, k));
            }
        }
    }

    #[test]
    fn rejects_degenerate() {
        assert!(cubic_code(1, 3).is_err());
        assert!(cubic_code(2, 1).is_err());
        assert!(matches!(cubic_code(100, 5), Err(CodeError::Guard { .. })));
    }
}
