//! Dense matrices over a [`FieldSpec`].
//!
//! GF(2) matrices keep each row as a run of `u64` words so that row
//! additions and codeword weights are word operations; every other field
//! stores one byte per entry.

use std::fmt;

use super::{Elem, FieldSpec, GfError};

fn choose(n: usize, r: usize) -> u128 {
    let r = r.min(n.saturating_sub(r));
    (0..r).fold(1u128, |acc, j| acc.saturating_mul((n - j) as u128) / (j + 1) as u128)
}

/// Largest number of codewords `min_distance` will enumerate (`q^s`).
pub const MIN_DISTANCE_SPACE_LIMIT: u128 = 1 << 24;

#[derive(Clone, PartialEq, Eq)]
enum Store {
    Packed { words: usize, bits: Vec<u64> },
    Dense(Vec<Elem>),
}

#[derive(Clone)]
pub struct FieldMatrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    store: Store,
}

/// One elementary row operation, as recorded by [`FieldMatrix::rref`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowOp {
    Swap(usize, usize),
    Scale { row: usize, by: Elem },
    /// `row[dst] += by * row[src]`
    AddScaled { dst: usize, src: usize, by: Elem },
}

#[derive(Debug, Clone)]
pub struct Rref {
    pub matrix: FieldMatrix,
    pub pivots: Vec<usize>,
    pub ops: Vec<RowOp>,
}

impl PartialEq for FieldMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.rows == other.rows
            && self.cols == other.cols
            && (0..self.rows).all(|r| self.row(r) == other.row(r))
    }
}

impl Eq for FieldMatrix {}

impl fmt::Debug for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}x{}", self.field, self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|v| v.to_string()).collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

impl FieldMatrix {
    pub fn zeros(field: &FieldSpec, rows: usize, cols: usize) -> Self {
        let store = if field.is_binary() {
            let words = cols.div_ceil(64).max(1);
            Store::Packed { words, bits: vec![0; rows * words] }
        } else {
            Store::Dense(vec![0; rows * cols])
        };
        Self { field: field.clone(), rows, cols, store }
    }

    pub fn identity(field: &FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(field: &FieldSpec, rows: &[Vec<Elem>]) -> Result<Self, GfError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(field, rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(GfError::DimensionMismatch { expected: cols, got: row.len() });
            }
            for (c, &v) in row.iter().enumerate() {
                if !field.contains(v) {
                    return Err(GfError::InvalidElement);
                }
                m.set(r, c, v);
            }
        }
        Ok(m)
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(field: &FieldSpec, rows: usize, cols: &[Vec<Elem>]) -> Result<Self, GfError> {
        let mut m = Self::zeros(field, rows, cols.len());
        for (c, col) in cols.iter().enumerate() {
            if col.len() != rows {
                return Err(GfError::DimensionMismatch { expected: rows, got: col.len() });
            }
            for (r, &v) in col.iter().enumerate() {
                if !field.contains(v) {
                    return Err(GfError::InvalidElement);
                }
                m.set(r, c, v);
            }
        }
        Ok(m)
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Elem {
        debug_assert!(r < self.rows && c < self.cols);
        match &self.store {
            Store::Packed { words, bits } => ((bits[r * words + c / 64] >> (c % 64)) & 1) as Elem,
            Store::Dense(d) => d[r * self.cols + c],
        }
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Elem) {
        debug_assert!(r < self.rows && c < self.cols);
        let cols = self.cols;
        match &mut self.store {
            Store::Packed { words, bits } => {
                let w = &mut bits[r * *words + c / 64];
                if v & 1 == 1 {
                    *w |= 1 << (c % 64);
                } else {
                    *w &= !(1 << (c % 64));
                }
            }
            Store::Dense(d) => d[r * cols + c] = v,
        }
    }

    pub fn row(&self, r: usize) -> Vec<Elem> {
        (0..self.cols).map(|c| self.get(r, c)).collect()
    }

    pub fn column(&self, c: usize) -> Vec<Elem> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Elem>> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    /// Packed GF(2) row words, if this is a binary matrix.
    pub fn packed_row(&self, r: usize) -> Option<&[u64]> {
        match &self.store {
            Store::Packed { words, bits } => Some(&bits[r * words..(r + 1) * words]),
            Store::Dense(_) => None,
        }
    }

    /// Columns of a binary matrix with at most 64 rows, one bitmask each
    /// (bit `r` is row `r`).
    pub fn columns_as_masks(&self) -> Option<Vec<u64>> {
        if !self.field.is_binary() || self.rows > 64 {
            return None;
        }
        Some(
            (0..self.cols)
                .map(|c| (0..self.rows).fold(0u64, |m, r| m | ((self.get(r, c) as u64) << r)))
                .collect(),
        )
    }

    pub fn is_zero_column(&self, c: usize) -> bool {
        (0..self.rows).all(|r| self.get(r, c) == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Result<Self, GfError> {
        if self.rows != other.rows {
            return Err(GfError::DimensionMismatch { expected: self.rows, got: other.rows });
        }
        let mut m = Self::zeros(&self.field, self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(r, c, self.get(r, c));
            }
            for c in 0..other.cols {
                m.set(r, self.cols + c, other.get(r, c));
            }
        }
        Ok(m)
    }

    /// Block-diagonal matrix `diag(self, other)`.
    pub fn block_diag(&self, other: &Self) -> Self {
        let mut m = Self::zeros(&self.field, self.rows + other.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(r, c, self.get(r, c));
            }
        }
        for r in 0..other.rows {
            for c in 0..other.cols {
                m.set(self.rows + r, self.cols + c, other.get(r, c));
            }
        }
        m
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut m = Self::zeros(&self.field, self.rows, cols.len());
        for r in 0..self.rows {
            for (i, &c) in cols.iter().enumerate() {
                m.set(r, i, self.get(r, c));
            }
        }
        m
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut m = Self::zeros(&self.field, rows.len(), self.cols);
        for (i, &r) in rows.iter().enumerate() {
            for c in 0..self.cols {
                m.set(i, c, self.get(r, c));
            }
        }
        m
    }

    pub fn without_column(&self, col: usize) -> Self {
        let keep: Vec<usize> = (0..self.cols).filter(|&c| c != col).collect();
        self.select_columns(&keep)
    }

    pub fn without_row(&self, row: usize) -> Self {
        let keep: Vec<usize> = (0..self.rows).filter(|&r| r != row).collect();
        self.select_rows(&keep)
    }

    /// Appends a column at the right edge.
    pub fn with_column(&self, col: &[Elem]) -> Result<Self, GfError> {
        let extra = Self::from_columns(&self.field, self.rows, &[col.to_vec()])?;
        self.hstack(&extra)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        match &mut self.store {
            Store::Packed { words, bits } => {
                for w in 0..*words {
                    bits.swap(a * *words + w, b * *words + w);
                }
            }
            Store::Dense(d) => {
                for c in 0..self.cols {
                    d.swap(a * self.cols + c, b * self.cols + c);
                }
            }
        }
    }

    pub fn scale_row(&mut self, r: usize, by: Elem) {
        if self.field.is_binary() {
            if by == 0 {
                for c in 0..self.cols {
                    self.set(r, c, 0);
                }
            }
            return;
        }
        for c in 0..self.cols {
            let v = self.field.mul(self.get(r, c), by);
            self.set(r, c, v);
        }
    }

    /// `row[dst] += by * row[src]`.
    pub fn add_scaled_row(&mut self, dst: usize, src: usize, by: Elem) {
        if by == 0 {
            return;
        }
        match &mut self.store {
            Store::Packed { words, bits } => {
                let w = *words;
                for i in 0..w {
                    let v = bits[src * w + i];
                    bits[dst * w + i] ^= v;
                }
            }
            Store::Dense(d) => {
                let f = &self.field;
                let cols = self.cols;
                for c in 0..cols {
                    let v = f.add(d[dst * cols + c], f.mul(by, d[src * cols + c]));
                    d[dst * cols + c] = v;
                }
            }
        }
    }

    pub fn apply(&mut self, op: RowOp) {
        match op {
            RowOp::Swap(a, b) => self.swap_rows(a, b),
            RowOp::Scale { row, by } => self.scale_row(row, by),
            RowOp::AddScaled { dst, src, by } => self.add_scaled_row(dst, src, by),
        }
    }

    /// Reduced row-echelon form, with pivot columns and the sequence of row
    /// operations that carries `self` to it.
    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let f = self.field.clone();
        let mut pivots = Vec::new();
        let mut ops = Vec::new();
        let mut lead = 0;
        for c in 0..self.cols {
            if lead == self.rows {
                break;
            }
            let Some(p) = (lead..self.rows).find(|&r| m.get(r, c) != 0) else {
                continue;
            };
            if p != lead {
                m.swap_rows(p, lead);
                ops.push(RowOp::Swap(p, lead));
            }
            let pv = m.get(lead, c);
            if pv != 1 {
                let by = f.inv(pv).expect("pivot is nonzero");
                m.scale_row(lead, by);
                ops.push(RowOp::Scale { row: lead, by });
            }
            for r in 0..self.rows {
                let v = m.get(r, c);
                if r != lead && v != 0 {
                    let by = f.neg(v);
                    m.add_scaled_row(r, lead, by);
                    ops.push(RowOp::AddScaled { dst: r, src: lead, by });
                }
            }
            pivots.push(c);
            lead += 1;
        }
        Rref { matrix: m, pivots, ops }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Self) -> Result<Self, GfError> {
        if self.cols != other.rows {
            return Err(GfError::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        let f = &self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0 {
                    continue;
                }
                for c in 0..other.cols {
                    let v = f.add(out.get(r, c), f.mul(a, other.get(k, c)));
                    out.set(r, c, v);
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix: `c = u * self`.
    pub fn encode(&self, u: &[Elem]) -> Result<Vec<Elem>, GfError> {
        if u.len() != self.rows {
            return Err(GfError::DimensionMismatch { expected: self.rows, got: u.len() });
        }
        let f = &self.field;
        let mut c = vec![0; self.cols];
        for (r, &ur) in u.iter().enumerate() {
            if ur != 0 {
                f.axpy(&mut c, ur, &self.row(r));
            }
        }
        Ok(c)
    }

    /// Matrix times column vector: `self * v`.
    pub fn apply_to(&self, v: &[Elem]) -> Result<Vec<Elem>, GfError> {
        if v.len() != self.cols {
            return Err(GfError::DimensionMismatch { expected: self.cols, got: v.len() });
        }
        Ok((0..self.rows).map(|r| self.field.dot(&self.row(r), v)).collect())
    }

    /// A full-rank `(c - s) x c` matrix `H` with `self * H^T = 0`.
    pub fn dual(&self) -> Result<Self, GfError> {
        let rr = self.rref();
        let rank = rr.pivots.len();
        if rank < self.rows {
            return Err(GfError::RankDeficient { rank, rows: self.rows });
        }
        let f = &self.field;
        let free: Vec<usize> = (0..self.cols).filter(|c| !rr.pivots.contains(c)).collect();
        let mut h = Self::zeros(f, free.len(), self.cols);
        for (i, &fc) in free.iter().enumerate() {
            h.set(i, fc, 1);
            for (r, &pc) in rr.pivots.iter().enumerate() {
                h.set(i, pc, f.neg(rr.matrix.get(r, fc)));
            }
        }
        Ok(h)
    }

    /// True when both matrices have the same row space.
    pub fn same_row_space(&self, other: &Self) -> bool {
        if self.cols != other.cols {
            return false;
        }
        let mut stacked = Self::zeros(&self.field, self.rows + other.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                stacked.set(r, c, self.get(r, c));
            }
        }
        for r in 0..other.rows {
            for c in 0..self.cols {
                stacked.set(self.rows + r, c, other.get(r, c));
            }
        }
        let joint = stacked.rank();
        joint == self.rank() && joint == other.rank()
    }

    /// Minimum Hamming weight over all nonzero codewords `u * self`.
    pub fn min_distance(&self) -> Result<usize, GfError> {
        let q = self.field.order() as u128;
        let space = q.checked_pow(self.rows as u32).unwrap_or(u128::MAX);
        if space > MIN_DISTANCE_SPACE_LIMIT {
            return Err(GfError::TooLarge { space, limit: MIN_DISTANCE_SPACE_LIMIT });
        }
        if self.rows == 0 {
            return Ok(0);
        }
        if let Store::Packed { words, bits } = &self.store {
            // Gray code: step t flips message bit trailing_zeros(t).
            let mut cw = vec![0u64; *words];
            let mut best = usize::MAX;
            for t in 1u64..(1u64 << self.rows) {
                let r = t.trailing_zeros() as usize;
                for (w, x) in cw.iter_mut().enumerate() {
                    *x ^= bits[r * words + w];
                }
                let wt: usize = cw.iter().map(|x| x.count_ones() as usize).sum();
                best = best.min(wt);
            }
            return Ok(best);
        }
        // Odometer over messages; one digit changes per step in amortised
        // constant time, and the codeword is updated by the difference.
        let f = &self.field;
        let q = f.order() as usize;
        let rows: Vec<Vec<Elem>> = self.to_rows();
        let mut digits = vec![0usize; self.rows];
        let mut cw = vec![0 as Elem; self.cols];
        let mut best = usize::MAX;
        'outer: loop {
            let mut d = 0;
            loop {
                if d == self.rows {
                    break 'outer;
                }
                let old = digits[d] as Elem;
                digits[d] = (digits[d] + 1) % q;
                let delta = f.sub(digits[d] as Elem, old);
                f.axpy(&mut cw, delta, &rows[d]);
                if digits[d] != 0 {
                    break;
                }
                d += 1;
            }
            let wt = cw.iter().filter(|&&x| x != 0).count();
            best = best.min(wt);
        }
        Ok(best)
    }

    /// Whether every nonzero codeword has weight at least `d`: the rows are
    /// independent and stay so after deleting any `d - 1` columns. Works
    /// where [`Self::min_distance`] cannot enumerate the messages.
    pub fn distance_at_least(&self, d: usize) -> Result<bool, GfError> {
        if d == 0 {
            return Ok(true);
        }
        if d - 1 > self.cols {
            return Ok(false);
        }
        let subsets = choose(self.cols, d - 1);
        if subsets > MIN_DISTANCE_SPACE_LIMIT {
            return Err(GfError::TooLarge { space: subsets, limit: MIN_DISTANCE_SPACE_LIMIT });
        }
        let masks = self.columns_as_masks();
        let full = |removed: &[usize]| -> bool {
            match &masks {
                Some(cols) => {
                    let mut basis = [0u64; 64];
                    let mut rank = 0;
                    for (c, &v) in cols.iter().enumerate() {
                        if removed.contains(&c) {
                            continue;
                        }
                        let mut v = v;
                        while v != 0 {
                            let top = 63 - v.leading_zeros() as usize;
                            if basis[top] == 0 {
                                basis[top] = v;
                                rank += 1;
                                break;
                            }
                            v ^= basis[top];
                        }
                        if rank == self.rows {
                            return true;
                        }
                    }
                    rank == self.rows
                }
                None => {
                    let keep: Vec<usize> = (0..self.cols).filter(|c| !removed.contains(c)).collect();
                    self.select_columns(&keep).rank() == self.rows
                }
            }
        };
        let mut removed: Vec<usize> = (0..d - 1).collect();
        loop {
            if !full(&removed) {
                return Ok(false);
            }
            // next (d-1)-subset in lexicographic order
            let mut j = removed.len();
            loop {
                if j == 0 {
                    return Ok(true);
                }
                j -= 1;
                if removed[j] < self.cols - (removed.len() - j) {
                    break;
                }
            }
            removed[j] += 1;
            for t in j + 1..removed.len() {
                removed[t] = removed[t - 1] + 1;
            }
        }
    }

    /// Text form: `q r c`, then one row per line. Entries are decimal for
    /// `q <= 10` and hexadecimal otherwise.
    pub fn to_text(&self) -> String {
        let hex = self.field.order() > 10;
        let mut out = format!("{} {} {}\n", self.field.order(), self.rows, self.cols);
        for r in 0..self.rows {
            let row: Vec<String> = self
                .row(r)
                .iter()
                .map(|v| if hex { format!("{v:x}") } else { v.to_string() })
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, GfError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| GfError::Parse("empty input".into()))?;
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| GfError::Parse(format!("bad header token {t:?}"))))
            .collect::<Result<_, _>>()?;
        let [q, r, c] = nums[..] else {
            return Err(GfError::Parse("header must be `q rows cols`".into()));
        };
        let field = FieldSpec::of_order(q as u32)?;
        let radix = if q > 10 { 16 } else { 10 };
        let mut rows = Vec::with_capacity(r);
        for i in 0..r {
            let line = lines.next().ok_or_else(|| GfError::Parse(format!("missing row {i}")))?;
            let row: Vec<Elem> = line
                .split_whitespace()
                .map(|t| {
                    u8::from_str_radix(t, radix).map_err(|_| GfError::Parse(format!("bad entry {t:?}")))
                })
                .collect::<Result<_, _>>()?;
            if row.len() != c {
                return Err(GfError::DimensionMismatch { expected: c, got: row.len() });
            }
            rows.push(row);
        }
        if r == 0 {
            return Ok(Self::zeros(&field, 0, c));
        }
        Self::from_rows(&field, &rows)
    }
}
