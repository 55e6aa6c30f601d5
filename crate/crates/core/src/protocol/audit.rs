//! Self-tests for the protocol contract: linearity of answers, correctness
//! of reconstruction, and privacy of the per-server query distribution.

use std::collections::HashMap;

use super::coins::{Coins, EnumCoins, RandomTape};
use super::{LinearPirProtocol, ProtocolError};
use crate::gf::Elem;

/// Exact-mode audits refuse randomness spaces larger than this.
pub const EXACT_SPACE_LIMIT: u128 = 1 << 20;

/// Sampled-mode verdicts accept total-variation distances up to this.
pub const TV_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearityFailure {
    pub server: usize,
    pub query: Vec<Elem>,
    pub x1: Vec<Elem>,
    pub x2: Vec<Elem>,
}

fn random_vector(p: &dyn LinearPirProtocol, n: usize, coins: &mut dyn Coins) -> Vec<Elem> {
    (0..n).map(|_| coins.draw(p.field().order()) as Elem).collect()
}

/// Draws `x1`, `x2`, an index and a tape per trial and checks
/// `A(j, x1 + x2, q) = A(j, x1, q) + A(j, x2, q)` on every server.
pub fn linearity_selftest(p: &dyn LinearPirProtocol, n: usize, trials: usize, seed: u64) -> Result<(), LinearityFailure> {
    let f = p.field().clone();
    let mut rng = RandomTape::new(seed);
    for _ in 0..trials {
        let x1 = random_vector(p, n, &mut rng);
        let x2 = random_vector(p, n, &mut rng);
        let sum: Vec<Elem> = x1.iter().zip(&x2).map(|(&a, &b)| f.add(a, b)).collect();
        let i = rng.draw(n as u32) as usize;
        let queries = p.query(n, i, &mut rng).expect("index drawn in range");
        for (j, q) in queries.iter().enumerate() {
            let lhs = p.answer(j, &sum, q);
            let a1 = p.answer(j, &x1, q);
            let a2 = p.answer(j, &x2, q);
            let ok = match (lhs, a1, a2) {
                (Ok(l), Ok(a), Ok(b)) => l.len() == a.len() && l.iter().zip(a.iter().zip(&b)).all(|(&l, (&a, &b))| l == f.add(a, b)),
                _ => false,
            };
            if !ok {
                return Err(LinearityFailure { server: j, query: q.clone(), x1, x2 });
            }
        }
    }
    Ok(())
}

/// Random databases and tapes; returns the number of failed reconstructions.
pub fn correctness_check(p: &dyn LinearPirProtocol, n: usize, trials: usize, seed: u64) -> usize {
    let mut rng = RandomTape::new(seed);
    let mut failures = 0;
    for _ in 0..trials {
        let x = random_vector(p, n, &mut rng);
        let i = rng.draw(n as u32) as usize;
        let queries = p.query(n, i, &mut rng).expect("index drawn in range");
        let answers: Result<Vec<_>, _> = queries.iter().enumerate().map(|(j, q)| p.answer(j, &x, q)).collect();
        if answers.and_then(|a| p.reconstruct(i, &a)).ok() != Some(x[i]) {
            failures += 1;
        }
    }
    failures
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PrivacyMode {
    Exact,
    Sampled { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrivacyVerdict {
    pub identical: bool,
    /// Tapes enumerated per index (exact) or samples per index (sampled).
    pub tapes: u128,
    /// Total-variation distance between the two (projected) distributions.
    pub distance: f64,
}

type Multiset = HashMap<Vec<Vec<Elem>>, u64>;

fn enumerate_views(p: &dyn LinearPirProtocol, servers: &[usize], n: usize, i: usize) -> Result<(Multiset, u128), ProtocolError> {
    let mut out = Multiset::new();
    let mut err = None;
    let count = EnumCoins::run(EXACT_SPACE_LIMIT, |c| match p.query(n, i, c) {
        Ok(q) => *out.entry(servers.iter().map(|&j| q[j].clone()).collect()).or_default() += 1,
        Err(e) => err = Some(e),
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok((out, count)),
    }
}

fn tv_distance<K: std::hash::Hash + Eq>(a: &HashMap<K, u64>, b: &HashMap<K, u64>, na: u64, nb: u64) -> f64 {
    let mut d = 0.0;
    for (key, &ca) in a {
        let cb = b.get(key).copied().unwrap_or(0);
        d += (ca as f64 / na as f64 - cb as f64 / nb as f64).abs();
    }
    for (key, &cb) in b {
        if !a.contains_key(key) {
            d += cb as f64 / nb as f64;
        }
    }
    d / 2.0
}

fn check_servers(p: &dyn LinearPirProtocol, servers: &[usize], n: usize, i1: usize, i2: usize) -> Result<(), ProtocolError> {
    if let Some(&j) = servers.iter().find(|&&j| j >= p.k()) {
        return Err(ProtocolError::IndexOutOfRange { i: j, n: p.k() });
    }
    for i in [i1, i2] {
        if i >= n {
            return Err(ProtocolError::IndexOutOfRange { i, n });
        }
    }
    Ok(())
}

/// Compares the joint distribution of the queries sent to `servers` when
/// retrieving `i1` and `i2`, by exhaustive enumeration of the tape space.
pub fn coalition_privacy_audit(
    p: &dyn LinearPirProtocol,
    servers: &[usize],
    n: usize,
    i1: usize,
    i2: usize,
) -> Result<PrivacyVerdict, ProtocolError> {
    check_servers(p, servers, n, i1, i2)?;
    let (a, ta) = enumerate_views(p, servers, n, i1)?;
    let (b, tb) = enumerate_views(p, servers, n, i2)?;
    let distance = tv_distance(&a, &b, ta as u64, tb as u64);
    Ok(PrivacyVerdict { identical: ta == tb && a == b, tapes: ta, distance })
}

/// Query distribution of server `j` for indices `i1` and `i2`. Exact mode
/// compares full multisets; sampled mode compares the empirical
/// distributions of the query restricted to coordinates `i1` and `i2`.
pub fn privacy_audit(
    p: &dyn LinearPirProtocol,
    j: usize,
    n: usize,
    i1: usize,
    i2: usize,
    mode: PrivacyMode,
) -> Result<PrivacyVerdict, ProtocolError> {
    match mode {
        PrivacyMode::Exact => coalition_privacy_audit(p, &[j], n, i1, i2),
        PrivacyMode::Sampled { samples, seed } => {
            check_servers(p, &[j], n, i1, i2)?;
            let hist = |i: usize, stream: u64| -> Result<HashMap<(Elem, Elem), u64>, ProtocolError> {
                let mut rng = RandomTape::split(seed, stream);
                let mut h = HashMap::new();
                for _ in 0..samples {
                    let q = &p.query(n, i, &mut rng)?[j];
                    *h.entry((q[i1], q[i2])).or_default() += 1;
                }
                Ok(h)
            };
            let a = hist(i1, 0)?;
            let b = hist(i2, 1)?;
            let distance = tv_distance(&a, &b, samples as u64, samples as u64);
            Ok(PrivacyVerdict { identical: distance <= TV_THRESHOLD, tapes: samples as u128, distance })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldSpec;
    use crate::protocol::{ShiftedXor, XorK};
    use proptest::prelude::*;

    fn xork(k: usize) -> XorK {
        XorK::new(FieldSpec::binary(), k).unwrap()
    }

    #[test]
    fn linearity() {
        assert!(linearity_selftest(&XorK::xor2(), 8, 500, 1).is_ok());
        assert!(linearity_selftest(&xork(4), 6, 10_000, 2).is_ok());
        let bad = ShiftedXor::new(XorK::xor2(), 1);
        let fail = linearity_selftest(&bad, 8, 10, 3).unwrap_err();
        assert_eq!(fail.server, 0);
        assert_eq!(correctness_check(&bad, 8, 200, 4), 0);
    }

    #[test]
    fn exhaustive_xor3_correctness() {
        let p = xork(3);
        for x in 0..16u32 {
            let db: Vec<Elem> = (0..4).map(|b| (x >> b & 1) as Elem).collect();
            for i in 0..4 {
                let n = EnumCoins::run(1 << 8, |c| {
                    let q = p.query(4, i, c).unwrap();
                    let a: Vec<Vec<Elem>> = (0..3).map(|j| p.answer(j, &db, &q[j]).unwrap()).collect();
                    assert_eq!(p.reconstruct(i, &a).unwrap(), db[i]);
                })
                .unwrap();
                assert_eq!(n, 256);
            }
        }
    }

    #[test]
    fn exact_privacy() {
        let p = XorK::xor2();
        for j in 0..2 {
            let v = privacy_audit(&p, j, 8, 0, 5, PrivacyMode::Exact).unwrap();
            assert!(v.identical);
            assert_eq!(v.tapes, 256);
        }
        let v = privacy_audit(&xork(3), 2, 6, 1, 4, PrivacyMode::Exact).unwrap();
        assert!(v.identical);
        assert_eq!(v.tapes, 1 << 12);
        assert!(privacy_audit(&p, 0, 3, 2, 2, PrivacyMode::Exact).unwrap().identical);
        assert!(matches!(
            privacy_audit(&xork(3), 0, 12, 0, 1, PrivacyMode::Exact),
            Err(ProtocolError::SpaceTooLarge { .. })
        ));
    }

    #[test]
    fn coalitions() {
        let p = xork(3);
        assert!(coalition_privacy_audit(&p, &[0, 2], 4, 0, 3).unwrap().identical);
        let all = coalition_privacy_audit(&p, &[0, 1, 2], 4, 0, 3).unwrap();
        assert!(!all.identical);
        assert!((all.distance - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sampled_privacy() {
        let mode = PrivacyMode::Sampled { samples: 20_000, seed: 9 };
        let v = privacy_audit(&xork(3), 1, 64, 3, 40, mode).unwrap();
        assert!(v.identical, "{v:?}");
    }

    proptest! {
        #[test]
        fn marginals_uniform(n in 1usize..6, i1 in 0usize..6, i2 in 0usize..6, j in 0usize..2) {
            prop_assume!(i1 < n && i2 < n);
            let v = privacy_audit(&XorK::xor2(), j, n, i1, i2, PrivacyMode::Exact).unwrap();
            prop_assert!(v.identical);
        }

        #[test]
        fn correct_every_small_n(n in 1usize..=10, seed in any::<u64>(), k in 2usize..5) {
            prop_assert_eq!(correctness_check(&xork(k), n, 30, seed), 0);
        }
    }
}
