//! Binary PIR array codes: `m2` servers each storing `m1` cells, every cell
//! an XOR of message bits, with `k` recipes per bit whose server sets are
//! pairwise disjoint.

pub mod resolution;

use std::collections::HashMap;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::packing::max_packing;
use crate::emulation::{RecoveryScheme, Term};
use crate::gf::{Elem, FieldSpec};
use resolution::{binomial, resolve};

/// `array_max_k` refuses arrays with more columns than this.
pub const MAX_K_COLUMNS: usize = 30;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArrayError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("bit {bit}, recipe {recipe}: {reason}")]
    Invalid { bit: usize, recipe: usize, reason: String },
    #[error("{what} exceeds the search guard ({got} > {limit})")]
    Guard { what: &'static str, got: usize, limit: usize },
    #[error("{0}")]
    Unsupported(String),
    #[error("array json: {0}")]
    Json(String),
}

/// Cells `(column, row)` whose XOR is one message bit.
pub type Recipe = Vec<(usize, usize)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrayCode {
    m1: usize,
    m2: usize,
    s_total: usize,
    k: usize,
    /// `cells[row][column]`: sorted bit indices.
    cells: Vec<Vec<Vec<usize>>>,
    witnesses: Vec<Vec<Recipe>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrayJson {
    pub m1: usize,
    pub m2: usize,
    pub s_total: usize,
    pub k: usize,
    pub cells: Vec<Vec<Vec<usize>>>,
    pub witnesses: Vec<Vec<Recipe>>,
}

fn mask(bits: &[usize]) -> u64 {
    bits.iter().fold(0, |acc, &b| acc ^ (1 << b))
}

/// Checks shape and every recipe: cells exist, XOR to the unit vector, and
/// recipes of one bit use disjoint columns.
pub fn array_verify_parts(
    m1: usize,
    m2: usize,
    s_total: usize,
    k: usize,
    cells: &[Vec<Vec<usize>>],
    witnesses: &[Vec<Recipe>],
) -> Result<(), ArrayError> {
    if s_total == 0 || s_total > 64 {
        return Err(ArrayError::Shape(format!("{s_total} message bits (1..=64 supported)")));
    }
    if cells.len() != m1 || cells.iter().any(|r| r.len() != m2) {
        return Err(ArrayError::Shape(format!("cells are not {m1} x {m2}")));
    }
    if cells.iter().flatten().flatten().any(|&b| b >= s_total) {
        return Err(ArrayError::Shape(format!("cell refers to a bit outside 0..{s_total}")));
    }
    if witnesses.len() != s_total {
        return Err(ArrayError::Shape(format!("{} witness lists for {s_total} bits", witnesses.len())));
    }
    if k == 0 {
        return Err(ArrayError::Shape("k must be positive".into()));
    }
    for (bit, recipes) in witnesses.iter().enumerate() {
        if recipes.len() != k {
            return Err(ArrayError::Invalid { bit, recipe: recipes.len(), reason: format!("expected {k} recipes") });
        }
        let mut owner = vec![usize::MAX; m2];
        for (j, recipe) in recipes.iter().enumerate() {
            let bad = |reason: String| ArrayError::Invalid { bit, recipe: j, reason };
            if recipe.is_empty() {
                return Err(bad("empty".into()));
            }
            let mut acc = 0u64;
            let mut seen = Vec::new();
            for &(c, r) in recipe {
                if c >= m2 || r >= m1 {
                    return Err(bad(format!("cell ({c},{r}) outside the array")));
                }
                if seen.contains(&(c, r)) {
                    return Err(bad(format!("cell ({c},{r}) repeated")));
                }
                seen.push((c, r));
                if owner[c] != usize::MAX && owner[c] != j {
                    return Err(bad(format!("column {c} also used by recipe {}", owner[c])));
                }
                owner[c] = j;
                acc ^= mask(&cells[r][c]);
            }
            if acc != 1 << bit {
                return Err(bad("cells do not sum to the bit".into()));
            }
        }
    }
    Ok(())
}

impl ArrayCode {
    pub fn new(
        m1: usize,
        m2: usize,
        s_total: usize,
        k: usize,
        mut cells: Vec<Vec<Vec<usize>>>,
        witnesses: Vec<Vec<Recipe>>,
    ) -> Result<Self, ArrayError> {
        for c in cells.iter_mut().flatten() {
            c.sort_unstable();
        }
        array_verify_parts(m1, m2, s_total, k, &cells, &witnesses)?;
        Ok(Self { m1, m2, s_total, k, cells, witnesses })
    }

    /// Finds recipes by exhaustive search and certifies the largest `k`
    /// common to all bits.
    pub fn certify(m1: usize, m2: usize, s_total: usize, cells: Vec<Vec<Vec<usize>>>) -> Result<Self, ArrayError> {
        let layout = Layout::new(m1, m2, s_total, &cells)?;
        let witnesses: Vec<Vec<Recipe>> = (0..s_total).map(|i| layout.best_recipes(i)).collect::<Result<_, _>>()?;
        let k = witnesses.iter().map(Vec::len).min().unwrap_or(0);
        let witnesses = witnesses.into_iter().map(|mut w| {
            w.truncate(k);
            w
        });
        Self::new(m1, m2, s_total, k, cells, witnesses.collect())
    }

    pub fn m1(&self) -> usize {
        self.m1
    }

    pub fn m2(&self) -> usize {
        self.m2
    }

    pub fn s_total(&self) -> usize {
        self.s_total
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn cell(&self, row: usize, col: usize) -> &[usize] {
        &self.cells[row][col]
    }

    pub fn witnesses(&self, bit: usize) -> &[Recipe] {
        &self.witnesses[bit]
    }

    /// Distinct columns of each recipe of `bit`, ascending.
    pub fn witness_columns(&self, bit: usize) -> Vec<Vec<usize>> {
        self.witnesses[bit]
            .iter()
            .map(|r| {
                let mut c: Vec<usize> = r.iter().map(|&(c, _)| c).collect();
                c.sort_unstable();
                c.dedup();
                c
            })
            .collect()
    }

    /// Stored cells per message part, `m1 m2 / s_total`.
    pub fn overhead(&self) -> Ratio<usize> {
        Ratio::new(self.m1 * self.m2, self.s_total)
    }

    /// Drops a column and every recipe that used it; `k` becomes the
    /// smallest surviving count.
    pub fn without_column(&self, col: usize) -> Result<Self, ArrayError> {
        if col >= self.m2 {
            return Err(ArrayError::Shape(format!("column {col} outside 0..{}", self.m2)));
        }
        let cells = self.cells.iter().map(|row| row.iter().enumerate().filter(|&(c, _)| c != col).map(|(_, v)| v.clone()).collect()).collect();
        let re = |c: usize| if c > col { c - 1 } else { c };
        let witnesses: Vec<Vec<Recipe>> = self
            .witnesses
            .iter()
            .map(|rs| rs.iter().filter(|r| r.iter().all(|&(c, _)| c != col)).map(|r| r.iter().map(|&(c, row)| (re(c), row)).collect()).collect())
            .collect();
        let k = witnesses.iter().map(Vec::len).min().unwrap_or(0);
        let witnesses = witnesses.into_iter().map(|mut w: Vec<Recipe>| {
            w.truncate(k);
            w
        });
        Self::new(self.m1, self.m2 - 1, self.s_total, k, cells, witnesses.collect())
    }

    pub fn to_json(&self) -> ArrayJson {
        ArrayJson {
            m1: self.m1,
            m2: self.m2,
            s_total: self.s_total,
            k: self.k,
            cells: self.cells.clone(),
            witnesses: self.witnesses.clone(),
        }
    }

    pub fn from_json(j: ArrayJson) -> Result<Self, ArrayError> {
        Self::new(j.m1, j.m2, j.s_total, j.k, j.cells, j.witnesses)
    }

    pub fn parse(text: &str) -> Result<Self, ArrayError> {
        Self::from_json(serde_json::from_str(text).map_err(|e| ArrayError::Json(e.to_string()))?)
    }

    pub fn to_string_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("plain data serializes")
    }
}

/// Re-runs the certificate check.
pub fn array_verify(code: &ArrayCode) -> Result<(), ArrayError> {
    array_verify_parts(code.m1, code.m2, code.s_total, code.k, &code.cells, &code.witnesses)
}

/// Largest number of disjoint column sets each of whose cells span the
/// unit vector of `bit`, ignoring the stored certificate.
pub fn array_max_k(code: &ArrayCode, bit: usize) -> Result<usize, ArrayError> {
    Ok(Layout::new(code.m1, code.m2, code.s_total, &code.cells)?.best_recipes(bit)?.len())
}

struct Layout<'a> {
    m1: usize,
    m2: usize,
    s_total: usize,
    cells: &'a [Vec<Vec<usize>>],
}

/// Row-reduces `(vector, cell list)` pairs and reports whether `target` is
/// in the span, with the cells that produce it.
fn solve(vectors: &[(u64, (usize, usize))], target: u64) -> Option<Recipe> {
    let mut basis: Vec<(u64, Vec<(usize, usize)>)> = Vec::new();
    for &(v, cell) in vectors {
        let mut v = v;
        let mut combo = vec![cell];
        for (b, bc) in &basis {
            if v & (1 << b.trailing_zeros()) != 0 {
                v ^= b;
                for &x in bc {
                    if let Some(p) = combo.iter().position(|&y| y == x) {
                        combo.swap_remove(p);
                    } else {
                        combo.push(x);
                    }
                }
            }
        }
        if v != 0 {
            // keep the basis reduced on its pivots
            let pivot = 1 << v.trailing_zeros();
            for (b, bc) in basis.iter_mut() {
                if *b & pivot != 0 {
                    *b ^= v;
                    for &x in &combo {
                        if let Some(p) = bc.iter().position(|&y| y == x) {
                            bc.swap_remove(p);
                        } else {
                            bc.push(x);
                        }
                    }
                }
            }
            basis.push((v, combo));
        }
    }
    let mut t = target;
    let mut combo: Vec<(usize, usize)> = Vec::new();
    for (b, bc) in &basis {
        if t & (1 << b.trailing_zeros()) != 0 {
            t ^= b;
            for &x in bc {
                if let Some(p) = combo.iter().position(|&y| y == x) {
                    combo.swap_remove(p);
                } else {
                    combo.push(x);
                }
            }
        }
    }
    (t == 0).then(|| {
        combo.sort_unstable();
        combo
    })
}

impl<'a> Layout<'a> {
    fn new(m1: usize, m2: usize, s_total: usize, cells: &'a [Vec<Vec<usize>>]) -> Result<Self, ArrayError> {
        if m2 > MAX_K_COLUMNS {
            return Err(ArrayError::Guard { what: "columns", got: m2, limit: MAX_K_COLUMNS });
        }
        if s_total == 0 || s_total > 64 || cells.len() != m1 || cells.iter().any(|r| r.len() != m2) {
            return Err(ArrayError::Shape(format!("cells are not {m1} x {m2} over {s_total} bits")));
        }
        Ok(Self { m1, m2, s_total, cells })
    }

    fn vectors(&self, cols: u32) -> Vec<(u64, (usize, usize))> {
        (0..self.m2)
            .filter(|&c| cols >> c & 1 == 1)
            .flat_map(|c| (0..self.m1).map(move |r| (c, r)))
            .map(|(c, r)| (mask(&self.cells[r][c]), (c, r)))
            .collect()
    }

    fn spans(&self, cols: u32, bit: usize) -> bool {
        solve(&self.vectors(cols), 1 << bit).is_some()
    }

    /// Minimal column sets reaching `bit`, then a maximum disjoint family.
    fn best_recipes(&self, bit: usize) -> Result<Vec<Recipe>, ArrayError> {
        if bit >= self.s_total {
            return Err(ArrayError::Shape(format!("bit {bit} outside 0..{}", self.s_total)));
        }
        let max_size = self.s_total.min(self.m2);
        let budget: u128 = (0..=max_size).map(|r| binomial(self.m2, r)).sum();
        if budget > 1 << 24 {
            return Err(ArrayError::Guard { what: "column subsets", got: budget.min(usize::MAX as u128) as usize, limit: 1 << 24 });
        }
        let mut minimal: Vec<u32> = Vec::new();
        for size in 1..=max_size {
            for_each_subset(self.m2, size, &mut |cols| {
                if minimal.iter().any(|&m| m & cols == m) || !self.spans(cols, bit) {
                    return;
                }
                let is_min = (0..self.m2).filter(|&c| cols >> c & 1 == 1).all(|c| !self.spans(cols & !(1 << c), bit));
                if is_min {
                    minimal.push(cols);
                }
            });
        }
        let chosen = max_packing(&minimal, None);
        let mut out: Vec<(u32, Recipe)> = chosen
            .into_iter()
            .map(|ix| (minimal[ix], solve(&self.vectors(minimal[ix]), 1 << bit).expect("spans")))
            .collect();
        out.sort_by_key(|&(cols, _)| (cols.count_ones(), cols.trailing_zeros()));
        Ok(out.into_iter().map(|(_, r)| r).collect())
    }
}

fn for_each_subset(n: usize, size: usize, f: &mut impl FnMut(u32)) {
    fn rec(start: usize, n: usize, left: usize, acc: u32, f: &mut impl FnMut(u32)) {
        if left == 0 {
            f(acc);
            return;
        }
        for c in start..=n - left {
            rec(c + 1, n, left - 1, acc | 1 << c, f);
        }
    }
    if size <= n {
        rec(0, n, size, 0, f);
    }
}

impl RecoveryScheme for ArrayCode {
    fn field(&self) -> &FieldSpec {
        static F2: std::sync::OnceLock<FieldSpec> = std::sync::OnceLock::new();
        F2.get_or_init(FieldSpec::binary)
    }

    fn servers(&self) -> usize {
        self.m2
    }

    fn rows(&self) -> usize {
        self.m1
    }

    fn parts(&self) -> usize {
        self.s_total
    }

    fn k(&self) -> usize {
        self.k
    }

    fn cell(&self, server: usize, row: usize) -> Vec<(usize, Elem)> {
        self.cells[row][server].iter().map(|&b| (b, 1)).collect()
    }

    fn recipes(&self, part: usize) -> Vec<Vec<Term>> {
        self.witnesses[part]
            .iter()
            .map(|r| r.iter().map(|&(server, row)| Term { server, row, coef: 1 }).collect())
            .collect()
    }
}

fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_subset(n, size, &mut |m| out.push((0..n).filter(|&b| m >> b & 1 == 1).collect()));
    out.sort();
    out
}

/// The array family on `t(t+1)` bits and `t` rows, given the sum columns as
/// a partition of all `(t+1)`-subsets into perfect matchings. The first
/// `C(t(t+1), t)` columns hold the `t`-subsets as single bits.
fn apir_from_classes(t: usize, classes: Vec<Vec<Vec<usize>>>) -> Result<ArrayCode, ArrayError> {
    let n = t * (t + 1);
    let singles = subsets(n, t);
    let m2 = singles.len() + classes.len();
    let mut cells = vec![vec![Vec::new(); m2]; t];
    for (c, set) in singles.iter().enumerate() {
        for (r, &b) in set.iter().enumerate() {
            cells[r][c] = vec![b];
        }
    }
    let mut sum_at: HashMap<Vec<usize>, (usize, usize)> = HashMap::new();
    for (ci, class) in classes.iter().enumerate() {
        if class.len() != t {
            return Err(ArrayError::Shape(format!("sum column {ci} holds {} blocks", class.len())));
        }
        for (r, block) in class.iter().enumerate() {
            cells[r][singles.len() + ci] = block.clone();
            sum_at.insert(block.clone(), (singles.len() + ci, r));
        }
    }
    let witnesses = (0..n)
        .map(|i| {
            let mut own: Vec<Recipe> = Vec::new();
            let mut paired: Vec<Recipe> = Vec::new();
            for (c, set) in singles.iter().enumerate() {
                if let Some(r) = set.iter().position(|&b| b == i) {
                    own.push(vec![(c, r)]);
                } else {
                    let mut block = set.clone();
                    block.push(i);
                    block.sort_unstable();
                    let &(sc, sr) = sum_at.get(&block).ok_or_else(|| ArrayError::Shape(format!("block {block:?} missing")))?;
                    let mut recipe: Recipe = (0..t).map(|r| (c, r)).collect();
                    recipe.push((sc, sr));
                    paired.push(recipe);
                }
            }
            own.extend(paired);
            Ok(own)
        })
        .collect::<Result<Vec<_>, ArrayError>>()?;
    ArrayCode::new(t, m2, n, singles.len(), cells, witnesses)
}

/// `t = 2` pairs every triple containing bit 0 with its complement; `t = 3`
/// resolves the 4-subsets of 12 points by flows. Larger `t` is rejected.
pub fn apir(t: usize) -> Result<ArrayCode, ArrayError> {
    let n = t * (t + 1);
    let classes: Vec<Vec<Vec<usize>>> = match t {
        2 => subsets(n, 3)
            .into_iter()
            .filter(|b| b[0] == 0)
            .map(|b| {
                let rest: Vec<usize> = (0..n).filter(|x| !b.contains(x)).collect();
                vec![b, rest]
            })
            .collect(),
        3 => resolve(n, t + 1)?
            .into_iter()
            .map(|class| class.into_iter().map(|m| (0..n).filter(|&b| m >> b & 1 == 1).collect()).collect())
            .collect(),
        _ => return Err(ArrayError::Unsupported(format!("t = {t}: only t = 2 and t = 3 are built"))),
    };
    apir_from_classes(t, classes)
}

/// The `[2 x 25, 6]` array: columns of bit pairs, then the ten triples
/// containing bit 0 stacked over their complements.
pub fn example_2x25() -> ArrayCode {
    apir(2).expect("fixed construction")
}

/// The `[7 x 4, 12]` three-server array: four blocks of three bits, each
/// spread over the servers as pairs plus one sum.
pub fn example_7x4() -> ArrayCode {
    let rows: [[&[usize]; 4]; 7] = [
        [&[0], &[1], &[2], &[0, 1, 2]],
        [&[1], &[2], &[0], &[5]],
        [&[3], &[4], &[3, 4, 5], &[3]],
        [&[4], &[5], &[7], &[8]],
        [&[6], &[6, 7, 8], &[8], &[6]],
        [&[7], &[9], &[10], &[11]],
        [&[9, 10, 11], &[10], &[11], &[9]],
    ];
    let cells = rows.iter().map(|r| r.iter().map(|c| c.to_vec()).collect()).collect();
    ArrayCode::certify(7, 4, 12, cells).expect("fixed layout")
}
