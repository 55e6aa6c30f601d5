//! Block designs: Steiner triple systems (Bose for `n = 3 mod 6`, Skolem for
//! `n = 1 mod 6`), projective planes PG(2, q) and affine planes AG(2, q).

use std::fmt;

use crate::code::CodeError;
use crate::gf::{Elem, FieldSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SteinerSystem {
    pub t: usize,
    pub block_size: usize,
    pub n: usize,
    pub blocks: Vec<Vec<usize>>,
}

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

impl SteinerSystem {
    /// Builds and validates: every `t`-subset of points lies in exactly one
    /// block.
    pub fn new(t: usize, block_size: usize, n: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self, CodeError> {
        for b in &mut blocks {
            b.sort_unstable();
        }
        let sys = Self { t, block_size, n, blocks };
        sys.validate()?;
        Ok(sys)
    }

    pub fn validate(&self) -> Result<(), CodeError> {
        let bad = |msg: String| Err(CodeError::Unsupported(format!("not an S({},{},{}): {msg}", self.t, self.block_size, self.n)));
        if self.t == 0 || self.t > self.block_size || self.block_size > self.n {
            return bad("parameters out of range".into());
        }
        for b in &self.blocks {
            if b.len() != self.block_size || b.windows(2).any(|w| w[0] == w[1]) || b.iter().any(|&p| p >= self.n) {
                return bad(format!("malformed block {b:?}"));
            }
        }
        let expected = binom(self.n, self.t) / binom(self.block_size, self.t);
        if binom(self.n, self.t) % binom(self.block_size, self.t) != 0 || self.blocks.len() != expected {
            return bad(format!("{} blocks, expected {expected}", self.blocks.len()));
        }
        // count coverage of every t-subset through its colex rank
        let mut cover = vec![0u8; binom(self.n, self.t)];
        for b in &self.blocks {
            for_each_subset(b, self.t, &mut |sub| {
                let rank: usize = sub.iter().enumerate().map(|(j, &p)| binom(p, j + 1)).sum();
                cover[rank] = cover[rank].saturating_add(1);
            });
        }
        if let Some(pos) = cover.iter().position(|&c| c != 1) {
            return bad(format!("a {}-subset is covered {} times (rank {pos})", self.t, cover[pos]));
        }
        Ok(())
    }

    pub fn replication(&self) -> usize {
        binom(self.n - 1, self.t - 1) / binom(self.block_size - 1, self.t - 1)
    }

    /// For each point, the indices of blocks containing it.
    pub fn point_blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n];
        for (j, b) in self.blocks.iter().enumerate() {
            for &p in b {
                out[p].push(j);
            }
        }
        out
    }

    /// Text form: `t l n`, then one block per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.t, self.block_size, self.n);
        for b in &self.blocks {
            let line: Vec<String> = b.iter().map(ToString::to_string).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, CodeError> {
        let parse = |t: &str| t.parse::<usize>().map_err(|_| CodeError::Json(format!("bad integer {t:?}")));
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header: Vec<usize> = lines
            .next()
            .ok_or_else(|| CodeError::Json("empty design".into()))?
            .split_whitespace()
            .map(parse)
            .collect::<Result<_, _>>()?;
        let [t, l, n] = header[..] else {
            return Err(CodeError::Json("header must be `t l n`".into()));
        };
        let blocks = lines
            .map(|line| line.split_whitespace().map(parse).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(t, l, n, blocks)
    }
}

impl fmt::Display for SteinerSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S({},{},{})", self.t, self.block_size, self.n)
    }
}

fn for_each_subset(items: &[usize], t: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(items: &[usize], t: usize, start: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == t {
            f(cur);
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, t, i + 1, cur, f);
            cur.pop();
        }
    }
    rec(items, t, 0, &mut Vec::with_capacity(t), f);
}

/// A Steiner triple system on `n` points, `n = 1, 3 (mod 6)`, `n >= 7`.
pub fn steiner_triple(n: usize) -> Result<SteinerSystem, CodeError> {
    let blocks = match n % 6 {
        _ if n < 7 => return Err(CodeError::Unsupported(format!("no STS construction for n = {n}"))),
        3 => bose(n),
        1 => skolem(n),
        _ => return Err(CodeError::Unsupported(format!("STS({n}) needs n = 1 or 3 mod 6"))),
    };
    SteinerSystem::new(2, 3, n, blocks)
}

fn bose(n: usize) -> Vec<Vec<usize>> {
    let t = (n - 3) / 6;
    let v = 2 * t + 1;
    let pt = |x: usize, i: usize| x + v * (i % 3);
    let mut blocks: Vec<Vec<usize>> = (0..v).map(|x| vec![pt(x, 0), pt(x, 1), pt(x, 2)]).collect();
    for i in 0..3 {
        for x in 0..v {
            for y in x + 1..v {
                // (t + 1) is the inverse of 2 modulo v
                let z = (x + y) * (t + 1) % v;
                blocks.push(vec![pt(x, i), pt(y, i), pt(z, i + 1)]);
            }
        }
    }
    blocks
}

fn skolem(n: usize) -> Vec<Vec<usize>> {
    let t = (n - 1) / 6;
    let order = 2 * t;
    let inf = 6 * t;
    let pt = |x: usize, i: usize| x + order * (i % 3);
    // half-idempotent commutative quasigroup of order 2t
    let op = |x: usize, y: usize| {
        let z = (x + y) % order;
        if z % 2 == 0 {
            z / 2
        } else {
            (z - 1) / 2 + t
        }
    };
    let mut blocks: Vec<Vec<usize>> = (0..t).map(|x| vec![pt(x, 0), pt(x, 1), pt(x, 2)]).collect();
    for i in 0..3 {
        for x in 0..t {
            blocks.push(vec![inf, pt(x + t, i), pt(x, i + 1)]);
        }
    }
    for i in 0..3 {
        for x in 0..order {
            for y in x + 1..order {
                blocks.push(vec![pt(x, i), pt(y, i), pt(op(x, y), i + 1)]);
            }
        }
    }
    blocks
}

/// Points of PG(2, q): nonzero triples whose first nonzero entry is 1.
fn projective_points(f: &FieldSpec) -> Vec<[Elem; 3]> {
    let q = f.order() as Elem as u16;
    let els: Vec<Elem> = f.elements().collect();
    let mut pts = Vec::new();
    pts.push([0, 0, 1]);
    for &c in &els {
        pts.push([0, 1, c]);
    }
    for &b in &els {
        for &c in &els {
            pts.push([1, b, c]);
        }
    }
    debug_assert_eq!(pts.len() as u32, (q as u32).pow(2) + q as u32 + 1);
    pts
}

/// Lines of PG(2, q) for any supported field order `q`.
pub fn projective_plane(q: u32) -> Result<SteinerSystem, CodeError> {
    let f = FieldSpec::of_order(q)?;
    let pts = projective_points(&f);
    let blocks: Vec<Vec<usize>> = pts
        .iter()
        .map(|line| {
            pts.iter()
                .enumerate()
                .filter(|(_, p)| f.dot(line, &p[..]) == 0)
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    SteinerSystem::new(2, q as usize + 1, pts.len(), blocks)
}

/// Lines of AG(2, q).
pub fn affine_plane(q: u32) -> Result<SteinerSystem, CodeError> {
    let f = FieldSpec::of_order(q)?;
    let qs = q as usize;
    let pt = |x: Elem, y: Elem| x as usize * qs + y as usize;
    let mut blocks = Vec::new();
    for slope in f.elements() {
        for icpt in f.elements() {
            blocks.push(f.elements().map(|x| pt(x, f.add(f.mul(slope, x), icpt))).collect());
        }
    }
    for c in f.elements() {
        blocks.push(f.elements().map(|y| pt(c, y)).collect());
    }
    SteinerSystem::new(2, qs, qs * qs, blocks)
}
