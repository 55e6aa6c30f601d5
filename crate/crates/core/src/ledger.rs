//! Values where the published tables and the implemented derivations
//! disagree, recomputed on every call.

use std::fmt::Write;

use num_rational::Ratio;

use crate::array::{apir, example_2x25, example_7x4, resolution::binomial};
use crate::code::bounds::{lower_bound, theorem8_ceil, theorem8_ratio};
use crate::code::combinators::puncture;
use crate::code::CodeError;
use crate::construct::balanced_multiplicity_code;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discrepancy {
    pub topic: String,
    pub published: String,
    pub derived: String,
    pub agrees: bool,
}

fn entry(topic: impl Into<String>, published: impl ToString, derived: impl ToString, agrees: bool) -> Discrepancy {
    Discrepancy { topic: topic.into(), published: published.to_string(), derived: derived.to_string(), agrees }
}

/// `A(3, 15)`: lower bound and the punctured balanced `(3, 16)` code.
pub fn a_3_15() -> Result<(usize, usize, usize), CodeError> {
    let c = puncture(&balanced_multiplicity_code(3, 16)?, 0)?;
    Ok((lower_bound(3, 15), c.m(), c.k()))
}

/// Published lower bounds next to the array construction for `t = 2..=5`.
pub const ARRAY_COMPARISON: [(usize, usize, usize, usize); 4] =
    [(2, 15, 25, 26), (3, 220, 385, 413), (4, 4845, 8721, 9387), (5, 142506, 261261, 280559)];

pub fn discrepancies() -> Result<Vec<Discrepancy>, CodeError> {
    let mut out = Vec::new();
    let (lower, upper, k) = a_3_15()?;
    out.push(entry(
        "A(3,15)",
        26,
        format!("{lower} (lower bound {lower}, upper bound {upper} from puncture(balanced(3,16)) with k={k})"),
        lower == 26,
    ));
    for (t, k, m2, published) in ARRAY_COMPARISON {
        let s = t + 1;
        let ratio: Ratio<u128> = theorem8_ratio(s, k).expect("small s");
        let ceil = theorem8_ceil(s, k);
        let bound = if t == 2 { lower_bound(s, k) } else { ceil };
        out.push(entry(
            format!("array t={t}: A({s},{k}) lower bound (m2={m2})"),
            published,
            format!("{bound} (ratio {ratio} = {:.4})", *ratio.numer() as f64 / *ratio.denom() as f64),
            bound == published,
        ));
    }
    let bad: Vec<usize> = (1..=16).filter(|&k| lower_bound(3, k) != (7 * k).div_ceil(4)).collect();
    out.push(entry(
        "A(3,k) = ceil(7k/4) for k <= 16",
        "all k",
        format!("fails at k in {bad:?}; A(3,k) = {:?}", bad.iter().map(|&k| lower_bound(3, k)).collect::<Vec<_>>()),
        bad.is_empty(),
    ));
    let a = example_2x25();
    let x1: Vec<Vec<usize>> = (0..a.k()).map(|j| a.witness_columns(0)[j].iter().map(|c| c + 1).collect()).collect();
    out.push(entry(
        "[2x25,6] array, column 16",
        "{x1,x2,x3} over {x3,x4,x5}",
        format!("{{x1,x2,x3}} over {{x4,x5,x6}}; k={} with x1 recipes {x1:?}", a.k()),
        false,
    ));
    let b = example_7x4();
    out.push(entry(
        "[7x4,12] array, server 2 row 6 entry",
        "x11",
        format!("x10; k={}", b.k()),
        false,
    ));
    let c = apir(3).map_err(|e| CodeError::Unsupported(e.to_string()))?;
    out.push(entry(
        "array t=3 parameters (m2, k)",
        "(385, 220)",
        format!("({}, {}) from {} resolution classes", c.m2(), c.k(), binomial(12, 4) / 3),
        (c.m2(), c.k()) == (385, 220),
    ));
    Ok(out)
}

pub fn report(entries: &[Discrepancy]) -> String {
    let mut s = String::new();
    for e in entries {
        let flag = if e.agrees { "agrees" } else { "differs" };
        let _ = writeln!(s, "{}: published={} derived={} [{flag}]", e.topic, e.published, e.derived);
    }
    s
}
