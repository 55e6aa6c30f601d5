//! Linear k-server PIR protocols over GF(q): query generation from injected
//! coins, per-server answers that are linear in the stored data, and
//! reconstruction from the k answers.

pub mod audit;
pub mod coins;

pub use audit::{
    coalition_privacy_audit, correctness_check, linearity_selftest, privacy_audit, LinearityFailure, PrivacyMode,
    PrivacyVerdict, EXACT_SPACE_LIMIT, TV_THRESHOLD,
};
pub use coins::{Coins, EnumCoins, FixedTape, RandomTape, SpaceTooLarge, ZeroCoins};

use thiserror::Error;

use crate::gf::{Elem, FieldSpec, GfError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProtocolError {
    #[error("index {i} out of range for length {n}")]
    IndexOutOfRange { i: usize, n: usize },
    #[error("randomness space of {space} tapes exceeds the exact-mode limit {limit}")]
    SpaceTooLarge { space: u128, limit: u128 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("unknown protocol {0:?}")]
    Unknown(String),
    #[error(transparent)]
    Field(#[from] GfError),
}

impl From<SpaceTooLarge> for ProtocolError {
    fn from(e: SpaceTooLarge) -> Self {
        ProtocolError::SpaceTooLarge { space: e.space, limit: e.limit }
    }
}

/// The `(Q, A, C)` triple. Server indices `j` are 0-based. Answers are
/// vectors of `answer_len()` field elements.
pub trait LinearPirProtocol: Send + Sync {
    fn name(&self) -> String;
    fn k(&self) -> usize;
    fn field(&self) -> &FieldSpec;

    fn answer_len(&self) -> usize {
        1
    }

    fn query(&self, n: usize, i: usize, coins: &mut dyn Coins) -> Result<Vec<Vec<Elem>>, ProtocolError>;

    fn answer(&self, j: usize, chunk: &[Elem], query: &[Elem]) -> Result<Vec<Elem>, ProtocolError>;

    fn reconstruct(&self, i: usize, answers: &[Vec<Elem>]) -> Result<Elem, ProtocolError>;

    /// A query distributed like server `j`'s query, independent of any
    /// index. Used for servers that take no part in a retrieval.
    fn marginal(&self, n: usize, j: usize, coins: &mut dyn Coins) -> Vec<Elem>;

    /// Bits sent to one server for a database of `n` symbols.
    fn upload_bits(&self, n: usize) -> u64 {
        n as u64 * self.field().bits_per_element() as u64
    }

    /// Bits returned by one server.
    fn download_bits(&self, _n: usize) -> u64 {
        self.answer_len() as u64 * self.field().bits_per_element() as u64
    }
}

fn uniform_vector(f: &FieldSpec, n: usize, coins: &mut dyn Coins) -> Vec<Elem> {
    (0..n).map(|_| coins.draw(f.order()) as Elem).collect()
}

fn inner(f: &FieldSpec, chunk: &[Elem], query: &[Elem]) -> Result<Elem, ProtocolError> {
    if chunk.len() != query.len() {
        return Err(ProtocolError::Shape(format!("chunk of {} symbols, query of {}", chunk.len(), query.len())));
    }
    Ok(f.dot(chunk, query))
}

/// Additive sharing of `e_i`: `q_1..q_{k-1}` uniform, `q_k = e_i - sum`.
/// Each server returns `<q_j, x>`; the answers sum to `x_i`. With `k = 2`
/// over GF(2) this is the two-server XOR scheme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XorK {
    field: FieldSpec,
    k: usize,
}

impl XorK {
    pub fn new(field: FieldSpec, k: usize) -> Result<Self, ProtocolError> {
        if k < 2 {
            return Err(ProtocolError::Shape(format!("additive sharing needs k >= 2, got {k}")));
        }
        Ok(Self { field, k })
    }

    pub fn xor2() -> Self {
        Self { field: FieldSpec::binary(), k: 2 }
    }
}

impl LinearPirProtocol for XorK {
    fn name(&self) -> String {
        format!("xor{}", self.k)
    }

    fn k(&self) -> usize {
        self.k
    }

    fn field(&self) -> &FieldSpec {
        &self.field
    }

    fn query(&self, n: usize, i: usize, coins: &mut dyn Coins) -> Result<Vec<Vec<Elem>>, ProtocolError> {
        if i >= n {
            return Err(ProtocolError::IndexOutOfRange { i, n });
        }
        let f = &self.field;
        let mut qs: Vec<Vec<Elem>> = (0..self.k - 1).map(|_| uniform_vector(f, n, coins)).collect();
        let mut last = vec![0; n];
        last[i] = 1;
        for q in &qs {
            f.axpy(&mut last, f.neg(1), q);
        }
        qs.push(last);
        Ok(qs)
    }

    fn answer(&self, _j: usize, chunk: &[Elem], query: &[Elem]) -> Result<Vec<Elem>, ProtocolError> {
        Ok(vec![inner(&self.field, chunk, query)?])
    }

    fn reconstruct(&self, _i: usize, answers: &[Vec<Elem>]) -> Result<Elem, ProtocolError> {
        if answers.len() != self.k || answers.iter().any(|a| a.len() != 1) {
            return Err(ProtocolError::Shape(format!("expected {} single-element answers", self.k)));
        }
        Ok(answers.iter().fold(0, |acc, a| self.field.add(acc, a[0])))
    }

    fn marginal(&self, n: usize, _j: usize, coins: &mut dyn Coins) -> Vec<Elem> {
        uniform_vector(&self.field, n, coins)
    }
}

/// [`XorK`] with a constant added to every answer. Correct (the constants
/// cancel when `k` is a multiple of the characteristic) but not linear; kept
/// as a counterexample for the self-tests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftedXor {
    inner: XorK,
    shift: Elem,
}

impl ShiftedXor {
    pub fn new(inner: XorK, shift: Elem) -> Self {
        Self { inner, shift }
    }
}

impl LinearPirProtocol for ShiftedXor {
    fn name(&self) -> String {
        format!("{}+{}", self.inner.name(), self.shift)
    }

    fn k(&self) -> usize {
        self.inner.k
    }

    fn field(&self) -> &FieldSpec {
        &self.inner.field
    }

    fn query(&self, n: usize, i: usize, coins: &mut dyn Coins) -> Result<Vec<Vec<Elem>>, ProtocolError> {
        self.inner.query(n, i, coins)
    }

    fn answer(&self, _j: usize, chunk: &[Elem], query: &[Elem]) -> Result<Vec<Elem>, ProtocolError> {
        Ok(vec![self.inner.field.add(inner(&self.inner.field, chunk, query)?, self.shift)])
    }

    fn reconstruct(&self, i: usize, answers: &[Vec<Elem>]) -> Result<Elem, ProtocolError> {
        self.inner.reconstruct(i, answers)
    }

    fn marginal(&self, n: usize, j: usize, coins: &mut dyn Coins) -> Vec<Elem> {
        self.inner.marginal(n, j, coins)
    }
}

/// [`XorK`] where servers 0 and 1 add `+h(x)` and `-h(x)` for the quadratic
/// `h(x) = x_0 x_{n-1}`. The base protocol stays correct, but answers are
/// not linear in `x`, so emulation over coded chunks breaks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkewedXor {
    inner: XorK,
}

impl SkewedXor {
    pub fn new(inner: XorK) -> Self {
        Self { inner }
    }
}

impl LinearPirProtocol for SkewedXor {
    fn name(&self) -> String {
        format!("{}-skewed", self.inner.name())
    }

    fn k(&self) -> usize {
        self.inner.k
    }

    fn field(&self) -> &FieldSpec {
        &self.inner.field
    }

    fn query(&self, n: usize, i: usize, coins: &mut dyn Coins) -> Result<Vec<Vec<Elem>>, ProtocolError> {
        self.inner.query(n, i, coins)
    }

    fn answer(&self, j: usize, chunk: &[Elem], query: &[Elem]) -> Result<Vec<Elem>, ProtocolError> {
        let f = &self.inner.field;
        let base = inner(f, chunk, query)?;
        let h = match (chunk.first(), chunk.last()) {
            (Some(&a), Some(&b)) if chunk.len() > 1 => f.mul(a, b),
            _ => 0,
        };
        Ok(vec![match j {
            0 => f.add(base, h),
            1 => f.sub(base, h),
            _ => base,
        }])
    }

    fn reconstruct(&self, i: usize, answers: &[Vec<Elem>]) -> Result<Elem, ProtocolError> {
        self.inner.reconstruct(i, answers)
    }

    fn marginal(&self, n: usize, j: usize, coins: &mut dyn Coins) -> Vec<Elem> {
        self.inner.marginal(n, j, coins)
    }
}

/// Builds a protocol from its wire name: `xor` (with `k`) or `xor2`.
pub fn protocol_by_name(name: &str, k: usize, field: &FieldSpec) -> Result<Box<dyn LinearPirProtocol>, ProtocolError> {
    match name {
        "xor2" if k == 2 => Ok(Box::new(XorK::new(field.clone(), 2)?)),
        "xor" | "xork" => Ok(Box::new(XorK::new(field.clone(), k)?)),
        _ if name.strip_prefix("xor").and_then(|d| d.parse::<usize>().ok()) == Some(k) => {
            Ok(Box::new(XorK::new(field.clone(), k)?))
        }
        _ => Err(ProtocolError::Unknown(format!("{name} with k={k}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_tape() {
        let p = XorK::xor2();
        let q = p.query(4, 2, &mut ZeroCoins).unwrap();
        assert_eq!(q, vec![vec![0, 0, 0, 0], vec![0, 0, 1, 0]]);
        let x = [1, 0, 1, 1];
        let a: Vec<Vec<Elem>> = (0..2).map(|j| p.answer(j, &x, &q[j]).unwrap()).collect();
        assert_eq!(a, vec![vec![0], vec![1]]);
        assert_eq!(p.reconstruct(2, &a).unwrap(), 1);
        let p3 = XorK::new(FieldSpec::binary(), 3).unwrap();
        let q = p3.query(4, 1, &mut ZeroCoins).unwrap();
        let a: Vec<Elem> = (0..3).map(|j| p3.answer(j, &x, &q[j]).unwrap()[0]).collect();
        assert_eq!(a, vec![0, 0, 0]);
    }

    #[test]
    fn hand_example() {
        // x = (1,0,1,1), third bit, a = (1,1,0,0)
        let p = XorK::xor2();
        let x = [1, 0, 1, 1];
        let q = p.query(4, 2, &mut FixedTape::new(vec![1, 1, 0, 0])).unwrap();
        assert_eq!(q[1], vec![1, 1, 1, 0]);
        let a: Vec<Vec<Elem>> = (0..2).map(|j| p.answer(j, &x, &q[j]).unwrap()).collect();
        assert_eq!(a, vec![vec![1], vec![0]]);
        assert_eq!(p.reconstruct(2, &a).unwrap(), 1);
        let total = 2 * (p.upload_bits(4) + p.download_bits(4));
        assert_eq!(total, 2 * 4 + 2);
    }

    #[test]
    fn xork_two_is_xor2() {
        let a = XorK::new(FieldSpec::binary(), 2).unwrap();
        let b = XorK::xor2();
        let qa = a.query(9, 4, &mut RandomTape::new(3)).unwrap();
        let qb = b.query(9, 4, &mut RandomTape::new(3)).unwrap();
        assert_eq!(qa, qb);
    }

    #[test]
    fn range_checks() {
        assert_eq!(XorK::xor2().query(4, 4, &mut ZeroCoins), Err(ProtocolError::IndexOutOfRange { i: 4, n: 4 }));
        assert!(XorK::new(FieldSpec::binary(), 1).is_err());
        assert!(XorK::xor2().answer(0, &[1, 0], &[1]).is_err());
        assert!(protocol_by_name("xor", 4, &FieldSpec::binary()).is_ok());
        assert!(protocol_by_name("xor3", 3, &FieldSpec::binary()).is_ok());
        assert!(protocol_by_name("cube", 2, &FieldSpec::binary()).is_err());
    }

    #[test]
    fn gf4_sharing() {
        let f = FieldSpec::of_order(4).unwrap();
        let p = XorK::new(f.clone(), 3).unwrap();
        let x = [3, 1, 2, 0, 2];
        for seed in 0..50 {
            for i in 0..5 {
                let q = p.query(5, i, &mut RandomTape::new(seed)).unwrap();
                let a: Vec<Vec<Elem>> = (0..3).map(|j| p.answer(j, &x, &q[j]).unwrap()).collect();
                assert_eq!(p.reconstruct(i, &a).unwrap(), x[i]);
            }
        }
        assert_eq!(p.upload_bits(5), 10);
    }

    #[test]
    fn skewed_is_correct_but_not_linear() {
        let p = SkewedXor::new(XorK::new(FieldSpec::binary(), 3).unwrap());
        assert_eq!(audit::correctness_check(&p, 6, 300, 5), 0);
        assert!(audit::linearity_selftest(&p, 6, 300, 6).is_err());
    }
}
