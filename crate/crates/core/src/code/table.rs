//! Upper bounds on `A(s, k)` by closing a grid of seed constructions under
//! concatenation, direct sum, puncturing, shortening and even extension.
//! Every cell keeps the expression that produced it, and [`Replayer`]
//! rebuilds that expression into a verified [`PirCode`].

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use super::bounds::{cubic_bound, lower_bound};
use super::combinators::{concat, direct_sum, even_extend, puncture, restrict_k, shorten};
use super::reference::{reference_value, REFERENCE_MAX_K, REFERENCE_MAX_S};
use super::{CodeError, PirCode};
use crate::construct::balanced::simplex_minus_line;
use crate::construct::{
    affine_plane, balanced_multiplicity_code, constant_weight_code, cubic_shortened, lexicode, majority_logic_15_7,
    projective_plane, steiner_code, steiner_triple, Orientation,
};
use crate::gf::FieldSpec;

pub const TABLE_MAX_S: usize = REFERENCE_MAX_S;
pub const TABLE_MAX_K: usize = REFERENCE_MAX_K;
/// Rows above the printed table, so larger constructions can be shortened
/// into it.
pub const GRID_MAX_S: usize = 64;
/// Skip constant-weight seeds whose candidate list is larger than this.
const LEXICODE_CANDIDATE_LIMIT: u128 = 20_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Provenance {
    Identity(usize),
    Parity(usize),
    Balanced(usize, usize),
    SimplexMinusLine(usize),
    Cubic(usize, usize),
    SteinerTriple(usize, Orientation),
    ProjectivePlane(usize, Orientation),
    AffinePlane(usize, Orientation),
    ConstantWeight(usize, usize),
    MajorityLogic15_7,
    Concat(Arc<Provenance>, Arc<Provenance>),
    DirectSum(Arc<Provenance>, Arc<Provenance>),
    Puncture(Arc<Provenance>),
    Shorten(Arc<Provenance>),
    EvenExtend(Arc<Provenance>),
}

fn side(o: Orientation) -> &'static str {
    match o {
        Orientation::Column => "column",
        Orientation::Row => "row",
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Provenance::*;
        match self {
            Identity(s) => write!(f, "identity({s})"),
            Parity(s) => write!(f, "parity({s})"),
            Balanced(s, k) => write!(f, "balanced({s},{k})"),
            SimplexMinusLine(s) => write!(f, "simplex-minus-line({s})"),
            Cubic(s, k) => write!(f, "cubic({s},{k})"),
            SteinerTriple(n, o) => write!(f, "sts-{}({n})", side(*o)),
            ProjectivePlane(q, o) => write!(f, "pg-{}({q})", side(*o)),
            AffinePlane(q, o) => write!(f, "ag-{}({q})", side(*o)),
            ConstantWeight(r, k) => write!(f, "constant-weight({r},{k})"),
            MajorityLogic15_7 => write!(f, "ml15-7"),
            Concat(a, b) => write!(f, "concat({a},{b})"),
            DirectSum(a, b) => write!(f, "direct-sum({a},{b})"),
            Puncture(a) => write!(f, "puncture({a})"),
            Shorten(a) => write!(f, "shorten({a})"),
            EvenExtend(a) => write!(f, "even-extend({a})"),
        }
    }
}

#[derive(Debug, Clone)]
struct Entry {
    m: usize,
    nodes: usize,
    expr: Arc<Provenance>,
}

impl Entry {
    fn seed(m: usize, p: Provenance) -> Self {
        Self { m, nodes: 1, expr: Arc::new(p) }
    }

    /// Shorter codes first, then fewer steps, then the smaller expression.
    fn better_than(&self, other: &Entry) -> bool {
        (self.m, self.nodes)
            .cmp(&(other.m, other.nodes))
            .then_with(|| self.expr.to_string().cmp(&other.expr.to_string()))
            .is_lt()
    }
}

struct Grid {
    max_s: usize,
    max_k: usize,
    cells: Vec<Option<Entry>>,
}

impl Grid {
    fn idx(&self, s: usize, k: usize) -> usize {
        (s - 1) * self.max_k + (k - 1)
    }

    fn get(&self, s: usize, k: usize) -> Option<&Entry> {
        if s == 0 || k == 0 || s > self.max_s || k > self.max_k {
            return None;
        }
        self.cells[self.idx(s, k)].as_ref()
    }

    fn offer(&mut self, s: usize, k: usize, cand: Entry) -> bool {
        if s == 0 || k == 0 || s > self.max_s || k > self.max_k {
            return false;
        }
        let i = self.idx(s, k);
        match &self.cells[i] {
            Some(cur) if !cand.better_than(cur) => false,
            _ => {
                self.cells[i] = Some(cand);
                true
            }
        }
    }
}

fn binom(n: usize, k: usize) -> u128 {
    (0..k as u128).fold(1u128, |acc, i| acc * (n as u128 - i) / (i + 1))
}

fn seed(grid: &mut Grid) {
    use Provenance::*;
    let (max_s, max_k) = (grid.max_s, grid.max_k);
    for s in 1..=max_s {
        grid.offer(s, 1, Entry::seed(s, Identity(s)));
        grid.offer(s, 2, Entry::seed(s + 1, Parity(s)));
        for k in 3..=max_k {
            grid.offer(s, k, Entry::seed(cubic_bound(s, k), Cubic(s, k)));
        }
    }
    for s in 1..=max_s.min(16) {
        let half = 1usize << (s - 1);
        for k in (half..=max_k).step_by(half) {
            grid.offer(s, k, Entry::seed(((1 << s) - 1) * k / half, Balanced(s, k)));
        }
        if s >= 3 && (1 << (s - 1)) - 2 <= max_k {
            grid.offer(s, (1 << (s - 1)) - 2, Entry::seed((1 << s) - 4, SimplexMinusLine(s)));
        }
    }
    for n in (7..=max_s).filter(|n| n % 6 == 1 || n % 6 == 3) {
        let blocks = n * (n - 1) / 6;
        grid.offer(n, (n - 1) / 2 + 1, Entry::seed(n + blocks, SteinerTriple(n, Orientation::Column)));
        grid.offer(blocks, 4, Entry::seed(blocks + n, SteinerTriple(n, Orientation::Row)));
    }
    for q in [2usize, 3, 4, 5, 7, 8] {
        let pts = q * q + q + 1;
        for o in [Orientation::Column, Orientation::Row] {
            grid.offer(pts, q + 2, Entry::seed(2 * pts, ProjectivePlane(q, o)));
        }
        let (pts, lines) = (q * q, q * q + q);
        grid.offer(pts, q + 2, Entry::seed(pts + lines, AffinePlane(q, Orientation::Column)));
        grid.offer(lines, q + 1, Entry::seed(pts + lines, AffinePlane(q, Orientation::Row)));
    }
    for k in 3..=max_k {
        for r in k - 1.. {
            if binom(r, k - 1) > LEXICODE_CANDIDATE_LIMIT {
                break;
            }
            let s = lexicode(r, k - 1, 2 * k - 4).len();
            if s > max_s {
                break;
            }
            grid.offer(s, k, Entry::seed(s + r, ConstantWeight(r, k)));
        }
    }
    grid.offer(7, 5, Entry::seed(15, MajorityLogic15_7));
}

fn relax(grid: &mut Grid) {
    use Provenance::*;
    let (max_s, max_k) = (grid.max_s, grid.max_k);
    loop {
        let mut changed = false;
        for s in 1..=max_s {
            for k in 1..=max_k {
                let mut cands: Vec<Entry> = Vec::new();
                let combine = |a: &Entry, b: &Entry, f: fn(Arc<Provenance>, Arc<Provenance>) -> Provenance| Entry {
                    m: a.m + b.m,
                    nodes: 1 + a.nodes + b.nodes,
                    expr: Arc::new(f(a.expr.clone(), b.expr.clone())),
                };
                for a in 1..k {
                    if let (Some(x), Some(y)) = (grid.get(s, a), grid.get(s, k - a)) {
                        cands.push(combine(x, y, Concat));
                    }
                }
                for a in 1..s {
                    if let (Some(x), Some(y)) = (grid.get(a, k), grid.get(s - a, k)) {
                        cands.push(combine(x, y, DirectSum));
                    }
                }
                let unary = |e: &Entry, dm: isize, f: fn(Arc<Provenance>) -> Provenance| Entry {
                    m: (e.m as isize + dm) as usize,
                    nodes: 1 + e.nodes,
                    expr: Arc::new(f(e.expr.clone())),
                };
                if let Some(e) = grid.get(s, k + 1) {
                    cands.push(unary(e, -1, Puncture));
                }
                if let Some(e) = grid.get(s + 1, k) {
                    cands.push(unary(e, -1, Shorten));
                }
                if k % 2 == 0 {
                    if let Some(e) = grid.get(s, k - 1) {
                        cands.push(unary(e, 1, EvenExtend));
                    }
                }
                for c in cands {
                    changed |= grid.offer(s, k, c);
                }
            }
        }
        if !changed {
            return;
        }
    }
}

fn full_grid() -> &'static Grid {
    static GRID: OnceLock<Grid> = OnceLock::new();
    GRID.get_or_init(|| {
        let mut g = Grid { max_s: GRID_MAX_S, max_k: TABLE_MAX_K, cells: vec![None; GRID_MAX_S * TABLE_MAX_K] };
        seed(&mut g);
        relax(&mut g);
        g
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellStatus {
    Match,
    Better,
    Worse,
    ReferenceOnly,
}

impl fmt::Display for CellStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CellStatus::Match => "match",
            CellStatus::Better => "better",
            CellStatus::Worse => "worse",
            CellStatus::ReferenceOnly => "reference-only",
        })
    }
}

#[derive(Debug, Clone)]
pub struct BoundsCell {
    pub s: usize,
    pub k: usize,
    pub lower: usize,
    pub upper: usize,
    pub provenance: Arc<Provenance>,
    pub reference: Option<usize>,
    pub status: CellStatus,
}

impl BoundsCell {
    pub fn is_tight(&self) -> bool {
        self.lower == self.upper
    }
}

fn make_cell(s: usize, k: usize, e: &Entry) -> BoundsCell {
    let reference = reference_value(s, k);
    let status = match reference {
        None => CellStatus::ReferenceOnly,
        Some(r) if r == e.m => CellStatus::Match,
        Some(r) if e.m < r => CellStatus::Better,
        Some(_) => CellStatus::Worse,
    };
    BoundsCell { s, k, lower: lower_bound(s, k), upper: e.m, provenance: e.expr.clone(), reference, status }
}

/// One cell, `1 <= s <= 64`, `1 <= k <= 16`.
pub fn bounds_cell(s: usize, k: usize) -> Result<BoundsCell, CodeError> {
    let g = full_grid();
    let e = g.get(s, k).ok_or_else(|| {
        CodeError::Guard { what: "table cell", got: s.max(k), limit: if s > GRID_MAX_S { GRID_MAX_S } else { TABLE_MAX_K } }
    })?;
    Ok(make_cell(s, k, e))
}

/// The grid for `s <= s_max`, `k <= k_max`, row-major.
pub fn table_closure(s_max: usize, k_max: usize) -> Result<Vec<BoundsCell>, CodeError> {
    if s_max > TABLE_MAX_S {
        return Err(CodeError::Guard { what: "table rows", got: s_max, limit: TABLE_MAX_S });
    }
    if k_max > TABLE_MAX_K {
        return Err(CodeError::Guard { what: "table columns", got: k_max, limit: TABLE_MAX_K });
    }
    let mut out = Vec::with_capacity(s_max * k_max);
    for s in 1..=s_max {
        for k in 1..=k_max {
            out.push(bounds_cell(s, k)?);
        }
    }
    Ok(out)
}

/// CSV with columns `s,k,lower,upper,provenance,reference_value,status`.
pub fn table_csv(cells: &[BoundsCell]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["s", "k", "lower", "upper", "provenance", "reference_value", "status"]).expect("in-memory");
    for c in cells {
        w.write_record([
            c.s.to_string(),
            c.k.to_string(),
            c.lower.to_string(),
            c.upper.to_string(),
            c.provenance.to_string(),
            c.reference.map_or(String::new(), |r| r.to_string()),
            c.status.to_string(),
        ])
        .expect("in-memory");
    }
    String::from_utf8(w.into_inner().expect("in-memory")).expect("utf-8")
}

/// Rebuilds provenance expressions into verified codes, sharing common
/// subexpressions.
#[derive(Default)]
pub struct Replayer {
    memo: HashMap<Provenance, PirCode>,
}

impl Replayer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn build(&mut self, p: &Provenance) -> Result<PirCode, CodeError> {
        if let Some(c) = self.memo.get(p) {
            return Ok(c.clone());
        }
        use Provenance::*;
        let f = FieldSpec::binary();
        let code = match p {
            Identity(s) => PirCode::identity(&f, *s),
            Parity(s) => PirCode::parity(&f, *s),
            Balanced(s, k) => balanced_multiplicity_code(*s, *k)?,
            SimplexMinusLine(s) => simplex_minus_line(*s)?,
            Cubic(s, k) => cubic_shortened(*s, *k)?,
            SteinerTriple(n, o) => steiner_code(&steiner_triple(*n)?, *o)?,
            ProjectivePlane(q, o) => steiner_code(&projective_plane(*q as u32)?, *o)?,
            AffinePlane(q, o) => steiner_code(&affine_plane(*q as u32)?, *o)?,
            ConstantWeight(r, k) => constant_weight_code(*r, *k)?,
            MajorityLogic15_7 => majority_logic_15_7(),
            Concat(a, b) => concat(&self.build(a)?, &self.build(b)?)?,
            DirectSum(a, b) => direct_sum(&self.build(a)?, &self.build(b)?)?,
            Puncture(a) => {
                let c = self.build(a)?;
                let p = puncture(&c, c.m() - 1)?;
                if p.k() >= c.k() {
                    restrict_k(&p, c.k() - 1)?
                } else {
                    p
                }
            }
            Shorten(a) => shorten(&self.build(a)?)?,
            EvenExtend(a) => even_extend(&self.build(a)?)?,
        };
        self.memo.insert(p.clone(), code.clone());
        Ok(code)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_cells() {
        let c = bounds_cell(3, 8).unwrap();
        assert_eq!((c.lower, c.upper, c.provenance.to_string()), (14, 14, "balanced(3,8)".to_string()));
        assert_eq!(bounds_cell(4, 3).unwrap().upper, 8);
        assert_eq!(bounds_cell(4, 6).unwrap().upper, 12);
        assert_eq!(bounds_cell(3, 15).unwrap().upper, 27);
        assert_eq!(bounds_cell(3, 15).unwrap().provenance.to_string(), "puncture(balanced(3,16))");
    }

    #[test]
    fn rows_two_and_three() {
        for k in 1..=16 {
            assert_eq!(bounds_cell(2, k).unwrap().upper, (3 * k).div_ceil(2));
            assert_eq!(bounds_cell(1, k).unwrap().upper, k);
            let c = bounds_cell(3, k).unwrap();
            assert!(c.is_tight(), "(3,{k})");
        }
        for s in 1..=32 {
            assert_eq!(bounds_cell(s, 2).unwrap().upper, s + 1);
        }
    }

    #[test]
    fn grid_invariants() {
        let cells = table_closure(32, 16).unwrap();
        for c in &cells {
            assert!(c.lower <= c.upper, "({},{})", c.s, c.k);
            if c.k < 16 {
                assert!(c.upper < bounds_cell(c.s, c.k + 1).unwrap().upper);
            }
            assert!(c.upper < bounds_cell(c.s + 1, c.k).unwrap().upper);
        }
        let csv = table_csv(&cells);
        assert!(csv.starts_with("s,k,lower,upper,provenance,reference_value,status\n"));
        assert_eq!(csv.lines().count(), 1 + 32 * 16);
    }

    #[test]
    fn replay_small_cells() {
        let mut r = Replayer::new();
        for s in 1..=6 {
            for k in 1..=8 {
                let cell = bounds_cell(s, k).unwrap();
                let code = r.build(&cell.provenance).unwrap();
                assert_eq!((code.s(), code.k()), (s, k), "{}", cell.provenance);
                assert_eq!(code.m(), cell.upper, "{}", cell.provenance);
            }
        }
    }
}
