//! Running a linear k-server PIR protocol over a coded store: each base
//! query is routed to one disjoint recovery set, and the answers of a set
//! combine into the answer the base protocol expects.
//!
//! Indices are 0-based. With parts of length `L = ceil(n / s)`, global index
//! `i` is bit `i % L` of part `i / L`.

pub mod audit;
pub mod retrieve;
pub mod trace;

pub use audit::{accounting_check, coded_privacy_audit, CodedPrivacyMode};
pub use retrieve::{
    answer_envelope, complete, measure, plan, retrieve, retrieve_robust, retrieve_with, Accounting, Envelope, Plan, ResponseMode,
    RetrieveOptions, Session, ALL_INDICES,
};

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::code::PirCode;
use crate::gf::{Elem, FieldSpec};
use crate::protocol::ProtocolError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmulationError {
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error("mismatch: {0}")]
    Mismatch(String),
    #[error("index {i} out of range for {n} stored positions")]
    IndexOutOfRange { i: usize, n: usize },
    #[error("only {available} intact recovery sets remain, {needed} needed")]
    TooManyFailures { needed: usize, available: usize },
    #[error("server {0} did not answer")]
    MissingAnswer(usize),
    #[error("malformed answer from server {server}: {reason}")]
    BadAnswer { server: usize, reason: String },
}

/// One stored cell `(server, row)` taken with coefficient `coef`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Term {
    pub server: usize,
    pub row: usize,
    pub coef: Elem,
}

/// A storage layout with recovery recipes: `servers()` servers holding
/// `rows()` cells each, every cell a linear combination of `parts()`
/// message parts, and for every part `k()` recipes touching pairwise
/// disjoint server sets.
pub trait RecoveryScheme: Send + Sync {
    fn field(&self) -> &FieldSpec;
    fn servers(&self) -> usize;
    fn rows(&self) -> usize;
    fn parts(&self) -> usize;
    fn k(&self) -> usize;
    /// Nonzero `(part, coefficient)` pairs of a cell.
    fn cell(&self, server: usize, row: usize) -> Vec<(usize, Elem)>;
    fn recipes(&self, part: usize) -> Vec<Vec<Term>>;
}

impl RecoveryScheme for PirCode {
    fn field(&self) -> &FieldSpec {
        PirCode::field(self)
    }

    fn servers(&self) -> usize {
        self.m()
    }

    fn rows(&self) -> usize {
        1
    }

    fn parts(&self) -> usize {
        self.s()
    }

    fn k(&self) -> usize {
        PirCode::k(self)
    }

    fn cell(&self, server: usize, _row: usize) -> Vec<(usize, Elem)> {
        let g = self.generator();
        (0..g.rows()).map(|r| (r, g.get(r, server))).filter(|&(_, a)| a != 0).collect()
    }

    fn recipes(&self, part: usize) -> Vec<Vec<Term>> {
        self.witnesses(part)
            .iter()
            .map(|set| set.members().iter().map(|&(server, coef)| Term { server, row: 0, coef }).collect())
            .collect()
    }
}

/// Distinct servers of a recipe, ascending.
pub fn recipe_servers(recipe: &[Term]) -> Vec<usize> {
    let mut s: Vec<usize> = recipe.iter().map(|t| t.server).collect();
    s.sort_unstable();
    s.dedup();
    s
}

/// A database of `n` field symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Database {
    field: FieldSpec,
    symbols: Vec<Elem>,
}

impl Database {
    pub fn new(field: FieldSpec, symbols: Vec<Elem>) -> Result<Self, EmulationError> {
        if let Some(&bad) = symbols.iter().find(|&&a| !field.contains(a)) {
            return Err(EmulationError::Mismatch(format!("symbol {bad} outside GF({})", field.order())));
        }
        Ok(Self { field, symbols })
    }

    pub fn zeros(field: FieldSpec, n: usize) -> Self {
        Self { field, symbols: vec![0; n] }
    }

    pub fn random(field: FieldSpec, n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = field.order();
        let symbols = (0..n).map(|_| rng.gen_range(0..q) as Elem).collect();
        Self { field, symbols }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbols(&self) -> &[Elem] {
        &self.symbols
    }

    /// Symbol at a global index; pad positions read as zero.
    pub fn get(&self, i: usize) -> Elem {
        self.symbols.get(i).copied().unwrap_or(0)
    }

    pub fn part_len(&self, s: usize) -> usize {
        self.n().div_ceil(s.max(1)).max(1)
    }

    /// The `s` zero-padded parts.
    pub fn parts(&self, s: usize) -> Vec<Vec<Elem>> {
        let len = self.part_len(s);
        (0..s).map(|p| (p * len..(p + 1) * len).map(|i| self.get(i)).collect()).collect()
    }
}

/// Coded chunks `chunks[server][row]`, each `part_len` symbols long.
#[derive(Clone)]
pub struct CodedStore {
    scheme: Arc<dyn RecoveryScheme>,
    n: usize,
    part_len: usize,
    chunks: Vec<Vec<Vec<Elem>>>,
}

impl std::fmt::Debug for CodedStore {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CodedStore")
            .field("servers", &self.scheme.servers())
            .field("parts", &self.scheme.parts())
            .field("n", &self.n)
            .field("part_len", &self.part_len)
            .finish()
    }
}

/// Encodes every symbol position across the parts with the scheme's cell
/// combinations.
pub fn distribute(db: &Database, scheme: Arc<dyn RecoveryScheme>) -> Result<CodedStore, EmulationError> {
    if db.field() != scheme.field() {
        return Err(EmulationError::Mismatch(format!(
            "database over GF({}), code over GF({})",
            db.field().order(),
            scheme.field().order()
        )));
    }
    let f = scheme.field().clone();
    let parts = db.parts(scheme.parts());
    let len = db.part_len(scheme.parts());
    let chunks = (0..scheme.servers())
        .map(|h| {
            (0..scheme.rows())
                .map(|r| {
                    let mut acc = vec![0; len];
                    for (p, a) in scheme.cell(h, r) {
                        f.axpy(&mut acc, a, &parts[p]);
                    }
                    acc
                })
                .collect()
        })
        .collect();
    Ok(CodedStore { scheme, n: db.n(), part_len: len, chunks })
}

impl CodedStore {
    pub fn scheme(&self) -> &Arc<dyn RecoveryScheme> {
        &self.scheme
    }

    /// Database length before padding.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn part_len(&self) -> usize {
        self.part_len
    }

    /// Addressable positions, padding included.
    pub fn capacity(&self) -> usize {
        self.part_len * self.scheme.parts()
    }

    pub fn servers(&self) -> usize {
        self.chunks.len()
    }

    pub fn chunk(&self, server: usize) -> &[Vec<Elem>] {
        &self.chunks[server]
    }

    /// `(part, local)` for a global index.
    pub fn locate(&self, i: usize) -> Result<(usize, usize), EmulationError> {
        if i >= self.capacity() {
            return Err(EmulationError::IndexOutOfRange { i, n: self.capacity() });
        }
        Ok((i / self.part_len, i % self.part_len))
    }

    /// Stored cells in bits, `servers * rows * part_len * bits`.
    pub fn stored_bits(&self) -> u64 {
        let b = self.scheme.field().bits_per_element() as u64;
        (self.servers() * self.scheme.rows() * self.part_len) as u64 * b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::example2_code;

    #[test]
    fn example2_layout() {
        let f = FieldSpec::binary();
        let db = Database::random(f.clone(), 16, 1);
        let store = distribute(&db, Arc::new(example2_code())).unwrap();
        let parts = db.parts(4);
        let add = |a: &[Elem], b: &[Elem]| a.iter().zip(b).map(|(x, y)| x ^ y).collect::<Vec<_>>();
        assert_eq!(store.chunk(0)[0], parts[0]);
        assert_eq!(store.chunk(4)[0], add(&parts[0], &parts[1]));
        assert_eq!(store.chunk(7)[0], add(&parts[3], &parts[0]));
        assert_eq!(store.locate(5).unwrap(), (1, 1));
        assert!(store.locate(16).is_err());
    }

    #[test]
    fn identity_and_zero() {
        let f = FieldSpec::binary();
        let db = Database::random(f.clone(), 10, 2);
        let store = distribute(&db, Arc::new(PirCode::identity(&f, 3))).unwrap();
        assert_eq!(store.part_len(), 4);
        for p in 0..3 {
            assert_eq!(store.chunk(p)[0], db.parts(3)[p]);
        }
        let z = distribute(&Database::zeros(f.clone(), 16), Arc::new(example2_code())).unwrap();
        assert!((0..8).all(|h| z.chunk(h)[0].iter().all(|&v| v == 0)));
    }

    #[test]
    fn field_mismatch() {
        let db = Database::zeros(FieldSpec::of_order(4).unwrap(), 8);
        assert!(matches!(distribute(&db, Arc::new(example2_code())), Err(EmulationError::Mismatch(_))));
        assert!(Database::new(FieldSpec::binary(), vec![0, 2]).is_err());
    }
}
