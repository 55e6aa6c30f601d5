//! PIR codes: a generator matrix together with a certificate of `k`
//! pairwise-disjoint recovery sets for every message coordinate.

pub mod bounds;
pub mod combinators;
pub mod coset;
pub mod oracle;
pub mod packing;
pub mod reference;
pub mod table;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{Elem, FieldMatrix, FieldSpec, GfError};

/// Largest `q^s` for which [`verify`] also enumerates codewords to confirm
/// `min_distance >= k`.
pub const VERIFY_DISTANCE_SPACE: u128 = 1 << 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error(transparent)]
    Field(#[from] GfError),
    #[error("certificate rejected: {0}")]
    Invalid(Violation),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("{what} exceeds the search guard ({got} > {limit})")]
    Guard { what: &'static str, got: usize, limit: usize },
    #[error("{0}")]
    Unsupported(String),
    #[error("code json: {0}")]
    Json(String),
}

/// A set of code coordinates with the coefficients that combine them into a
/// unit vector. Columns are strictly increasing and coefficients nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RecoverySet {
    members: Vec<(usize, Elem)>,
}

impl RecoverySet {
    /// Members are sorted by column; duplicate columns or zero coefficients
    /// are rejected by [`verify`], not here.
    pub fn new(mut members: Vec<(usize, Elem)>) -> Self {
        members.sort_by_key(|&(c, _)| c);
        Self { members }
    }

    /// A GF(2)-style set where every coefficient is one.
    pub fn ones(cols: impl IntoIterator<Item = usize>) -> Self {
        Self::new(cols.into_iter().map(|c| (c, 1)).collect())
    }

    pub fn members(&self) -> &[(usize, Elem)] {
        &self.members
    }

    pub fn columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().map(|&(c, _)| c)
    }

    pub fn contains(&self, col: usize) -> bool {
        self.members.binary_search_by_key(&col, |&(c, _)| c).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Applies `f` to every column index, dropping members mapped to `None`.
    pub fn remap(&self, f: impl Fn(usize) -> Option<usize>) -> Self {
        Self::new(self.members.iter().filter_map(|&(c, a)| f(c).map(|c2| (c2, a))).collect())
    }

    pub fn shifted(&self, by: usize) -> Self {
        self.remap(|c| Some(c + by))
    }
}

impl fmt::Display for RecoverySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, &(c, a)) in self.members.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            if a == 1 {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*{a}")?;
            }
        }
        write!(f, "}}")
    }
}

/// Why a certificate failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    ZeroServers,
    MessageCount { expected: usize, got: usize },
    WitnessCount { expected: usize, got: usize },
    EmptySet,
    ColumnOutOfRange(usize),
    ColumnsNotIncreasing,
    ZeroCoefficient(usize),
    InvalidCoefficient(usize),
    Overlap { other: usize, column: usize },
    WrongSum,
    Distance { d: usize },
    RankDeficient { rank: usize },
}

/// First violated invariant, located by message index and set index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub message: Option<usize>,
    pub set: Option<usize>,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.message, self.set) {
            (Some(i), Some(j)) => write!(f, "message {i}, set {j}: ")?,
            (Some(i), None) => write!(f, "message {i}: ")?,
            _ => {}
        }
        match &self.kind {
            ViolationKind::ZeroServers => write!(f, "k must be at least 1"),
            ViolationKind::MessageCount { expected, got } => {
                write!(f, "{got} witness lists for {expected} messages")
            }
            ViolationKind::WitnessCount { expected, got } => write!(f, "{got} sets, expected {expected}"),
            ViolationKind::EmptySet => write!(f, "empty recovery set"),
            ViolationKind::ColumnOutOfRange(c) => write!(f, "column {c} out of range"),
            ViolationKind::ColumnsNotIncreasing => write!(f, "columns not strictly increasing"),
            ViolationKind::ZeroCoefficient(c) => write!(f, "zero coefficient on column {c}"),
            ViolationKind::InvalidCoefficient(c) => write!(f, "coefficient on column {c} is not a field element"),
            ViolationKind::Overlap { other, column } => write!(f, "shares column {column} with set {other}"),
            ViolationKind::WrongSum => write!(f, "combination is not the unit vector"),
            ViolationKind::Distance { d } => write!(f, "minimum distance {d} below k"),
            ViolationKind::RankDeficient { rank } => write!(f, "generator rank {rank} below s"),
        }
    }
}

impl std::error::Error for Violation {}

fn violation(message: Option<usize>, set: Option<usize>, kind: ViolationKind) -> Violation {
    Violation { message, set, kind }
}

/// Checks that `witnesses` certifies property A_k for `g`.
pub fn verify(g: &FieldMatrix, k: usize, witnesses: &[Vec<RecoverySet>]) -> Result<(), Violation> {
    let f = g.field();
    let (s, m) = (g.rows(), g.cols());
    if k == 0 {
        return Err(violation(None, None, ViolationKind::ZeroServers));
    }
    if witnesses.len() != s {
        return Err(violation(None, None, ViolationKind::MessageCount { expected: s, got: witnesses.len() }));
    }
    let columns: Vec<Vec<Elem>> = (0..m).map(|c| g.column(c)).collect();
    for (i, sets) in witnesses.iter().enumerate() {
        if sets.len() != k {
            return Err(violation(Some(i), None, ViolationKind::WitnessCount { expected: k, got: sets.len() }));
        }
        let mut owner = vec![usize::MAX; m];
        for (j, set) in sets.iter().enumerate() {
            let at = |kind| violation(Some(i), Some(j), kind);
            if set.is_empty() {
                return Err(at(ViolationKind::EmptySet));
            }
            let mut acc = vec![0 as Elem; s];
            let mut prev: Option<usize> = None;
            for &(c, a) in set.members() {
                if c >= m {
                    return Err(at(ViolationKind::ColumnOutOfRange(c)));
                }
                if prev.is_some_and(|p| p >= c) {
                    return Err(at(ViolationKind::ColumnsNotIncreasing));
                }
                prev = Some(c);
                if a == 0 {
                    return Err(at(ViolationKind::ZeroCoefficient(c)));
                }
                if !f.contains(a) {
                    return Err(at(ViolationKind::InvalidCoefficient(c)));
                }
                if owner[c] != usize::MAX {
                    return Err(at(ViolationKind::Overlap { other: owner[c], column: c }));
                }
                owner[c] = j;
                f.axpy(&mut acc, a, &columns[c]);
            }
            if acc.iter().enumerate().any(|(r, &v)| v != (r == i) as Elem) {
                return Err(at(ViolationKind::WrongSum));
            }
        }
    }
    let space = (f.order() as u128).checked_pow(s as u32).unwrap_or(u128::MAX);
    if space <= VERIFY_DISTANCE_SPACE && s > 0 {
        let d = g.min_distance().expect("space checked");
        if d < k {
            return Err(violation(None, None, ViolationKind::Distance { d }));
        }
    }
    Ok(())
}

/// A generator matrix with a verified A_k certificate. The only way to
/// obtain one is through [`PirCode::new`], which runs [`verify`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PirCode {
    g: FieldMatrix,
    k: usize,
    witnesses: Vec<Vec<RecoverySet>>,
}

impl PirCode {
    pub fn new(g: FieldMatrix, k: usize, witnesses: Vec<Vec<RecoverySet>>) -> Result<Self, CodeError> {
        verify(&g, k, &witnesses).map_err(CodeError::Invalid)?;
        Ok(Self { g, k, witnesses })
    }

    /// The `[s, s]` identity code, one singleton per message.
    pub fn identity(field: &FieldSpec, s: usize) -> Self {
        let g = FieldMatrix::identity(field, s);
        let w = (0..s).map(|i| vec![RecoverySet::ones([i])]).collect();
        Self::new(g, 1, w).expect("identity certificate")
    }

    /// The `[s + 1, s]` single-parity code with `k = 2`.
    pub fn parity(field: &FieldSpec, s: usize) -> Self {
        let f = field;
        let mut g = FieldMatrix::zeros(f, s, s + 1);
        for i in 0..s {
            g.set(i, i, 1);
            g.set(i, s, 1);
        }
        let minus_one = f.neg(1);
        let w = (0..s)
            .map(|i| {
                // x_i = p - sum_{j != i} x_j
                let mut other: Vec<(usize, Elem)> = (0..s).filter(|&j| j != i).map(|j| (j, minus_one)).collect();
                other.push((s, 1));
                vec![RecoverySet::ones([i]), RecoverySet::new(other)]
            })
            .collect();
        Self::new(g, 2, w).expect("parity certificate")
    }

    pub fn field(&self) -> &FieldSpec {
        self.g.field()
    }

    pub fn generator(&self) -> &FieldMatrix {
        &self.g
    }

    pub fn s(&self) -> usize {
        self.g.rows()
    }

    pub fn m(&self) -> usize {
        self.g.cols()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn witnesses(&self, i: usize) -> &[RecoverySet] {
        &self.witnesses[i]
    }

    pub fn all_witnesses(&self) -> &[Vec<RecoverySet>] {
        &self.witnesses
    }

    /// Storage overhead `m / s` as an exact fraction.
    pub fn overhead(&self) -> num_rational::Ratio<usize> {
        num_rational::Ratio::new(self.m(), self.s())
    }

    pub fn into_parts(self) -> (FieldMatrix, usize, Vec<Vec<RecoverySet>>) {
        (self.g, self.k, self.witnesses)
    }

    pub fn to_json(&self) -> CodeJson {
        CodeJson::from_parts(&self.g, self.k, &self.witnesses)
    }
}

/// Serialized form of a PIR code certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeJson {
    pub q: u32,
    pub s: usize,
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(rename = "G")]
    pub g: Vec<Vec<Elem>>,
    pub witnesses: Vec<Vec<Vec<(usize, Elem)>>>,
}

impl CodeJson {
    pub fn from_parts(g: &FieldMatrix, k: usize, witnesses: &[Vec<RecoverySet>]) -> Self {
        Self {
            q: g.field().order(),
            s: g.rows(),
            m: g.cols(),
            k: Some(k),
            g: g.to_rows(),
            witnesses: witnesses
                .iter()
                .map(|sets| sets.iter().map(|r| r.members().to_vec()).collect())
                .collect(),
        }
    }

    /// The matrix, `k`, and witnesses, without verification.
    pub fn to_parts(&self) -> Result<(FieldMatrix, usize, Vec<Vec<RecoverySet>>), CodeError> {
        let field = FieldSpec::of_order(self.q)?;
        if self.g.len() != self.s {
            return Err(CodeError::Json(format!("G has {} rows, s = {}", self.g.len(), self.s)));
        }
        let g = if self.s == 0 {
            FieldMatrix::zeros(&field, 0, self.m)
        } else {
            FieldMatrix::from_rows(&field, &self.g)?
        };
        if g.cols() != self.m {
            return Err(CodeError::Json(format!("G has {} columns, m = {}", g.cols(), self.m)));
        }
        let witnesses: Vec<Vec<RecoverySet>> = self
            .witnesses
            .iter()
            .map(|sets| sets.iter().map(|r| RecoverySet { members: r.clone() }).collect())
            .collect();
        let k = self.k.unwrap_or_else(|| witnesses.first().map_or(0, Vec::len));
        Ok((g, k, witnesses))
    }

    pub fn into_code(self) -> Result<PirCode, CodeError> {
        let (g, k, w) = self.to_parts()?;
        PirCode::new(g, k, w)
    }

    pub fn to_string_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn parse(text: &str) -> Result<Self, CodeError> {
        serde_json::from_str(text).map_err(|e| CodeError::Json(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::example2_code;

    #[test]
    fn example2_certificate_passes() {
        let c = example2_code();
        assert_eq!((c.s(), c.m(), c.k()), (4, 8, 3));
        let first: Vec<String> = c.witnesses(0).iter().map(|r| r.to_string()).collect();
        assert_eq!(first, ["{0}", "{1,4}", "{3,7}"]);
    }

    #[test]
    fn identity_and_parity() {
        let f = FieldSpec::binary();
        assert_eq!(PirCode::identity(&f, 5).k(), 1);
        let p = PirCode::parity(&f, 6);
        assert_eq!((p.m(), p.k()), (7, 2));
        let g4 = FieldSpec::of_order(5).unwrap();
        assert_eq!(PirCode::parity(&g4, 3).k(), 2);
    }

    #[test]
    fn zeroed_column_is_pinpointed() {
        let (mut g, k, w) = example2_code().into_parts();
        for r in 0..g.rows() {
            g.set(r, 4, 0);
        }
        let v = verify(&g, k, &w).unwrap_err();
        assert_eq!((v.message, v.set, v.kind), (Some(0), Some(1), ViolationKind::WrongSum));
    }

    #[test]
    fn overlapping_sets_rejected() {
        let (g, k, mut w) = example2_code().into_parts();
        w[2][1] = RecoverySet::ones([2, 3, 7]);
        let v = verify(&g, k, &w).unwrap_err();
        assert_eq!(v.message, Some(2));
        assert!(matches!(v.kind, ViolationKind::Overlap { .. } | ViolationKind::WrongSum));
    }

    #[test]
    fn json_round_trip() {
        let c = example2_code();
        let text = c.to_json().to_string_pretty();
        let back = CodeJson::parse(&text).unwrap().into_code().unwrap();
        assert_eq!(back, c);
    }
}
