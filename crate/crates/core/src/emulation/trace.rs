//! Symbolic walkthrough of a retrieval over a PIR code: which server gets
//! which base query, what it answers, and how the answers combine. Servers
//! and parts are printed 1-based.

use std::fmt::Write;

use crate::code::PirCode;
use crate::gf::Elem;

/// Chunk names for the `[8,4]` walkthrough code.
pub fn example2_labels() -> Vec<String> {
    ["x1", "x2", "x3", "x4", "x1+x2", "x2+x3", "x3+x4", "x4+x1"].map(String::from).to_vec()
}

/// Sum of parts with coefficients, ascending by part.
pub fn default_labels(code: &PirCode) -> Vec<String> {
    let g = code.generator();
    (0..code.m())
        .map(|h| {
            let terms: Vec<String> = (0..code.s())
                .filter_map(|r| match g.get(r, h) {
                    0 => None,
                    1 => Some(format!("x{}", r + 1)),
                    a => Some(format!("{a}x{}", r + 1)),
                })
                .collect();
            if terms.is_empty() {
                "0".into()
            } else {
                terms.join("+")
            }
        })
        .collect()
}

fn scaled(coef: Elem, term: &str) -> String {
    if coef == 1 {
        term.to_string()
    } else {
        format!("{coef}*{term}")
    }
}

/// Table of the covered servers for a retrieval from `part` (0-based) with
/// recipe `j` answered as base index `sigma[j]`, followed by the combined
/// answers and the reconstruction.
pub fn exposition(code: &PirCode, part: usize, sigma: &[usize], labels: &[String]) -> String {
    let (m, s, k) = (code.m(), code.s(), sigma.len());
    let recipes = &code.witnesses(part)[..k];
    let mut rows: Vec<(usize, usize)> = Vec::new();
    for (j, r) in recipes.iter().enumerate() {
        rows.extend(r.columns().map(|h| (h, sigma[j])));
    }
    rows.sort_unstable();
    let mut out = String::new();
    let _ = writeln!(out, "Server | Query | Response");
    for &(h, c) in &rows {
        let (h1, c1) = (h + 1, c + 1);
        let label = &labels[h];
        let chunk = if label.contains('+') { format!("c{h1}={label}") } else { label.clone() };
        let _ = writeln!(out, "{h1} | q{c1} | a{h1} = A*({m},{s},{h1},c{h1},q{c1}) = A({k},{c1},{chunk},q{c1})");
    }
    let target = format!("x{}", part + 1);
    let mut by_index: Vec<(usize, String)> = recipes
        .iter()
        .enumerate()
        .map(|(j, r)| {
            let c1 = sigma[j] + 1;
            let sum: Vec<String> = r.members().iter().map(|&(h, a)| scaled(a, &format!("a{}", h + 1))).collect();
            (sigma[j], format!("a'{c1} = {} = A({k},{c1},{target},q{c1})", sum.join(" + ")))
        })
        .collect();
    by_index.sort();
    for (_, line) in by_index {
        let _ = writeln!(out, "{line}");
    }
    let args: Vec<String> = (1..=k).map(|c| format!("a'{c}")).collect();
    let _ = writeln!(out, "C({k},n/{s};i,{}) = {target},i", args.join(","));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::example2_code;

    #[test]
    fn first_part_table() {
        let t = exposition(&example2_code(), 0, &[0, 1, 2], &example2_labels());
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines[1], "1 | q1 | a1 = A*(8,4,1,c1,q1) = A(3,1,x1,q1)");
        assert_eq!(lines[3], "4 | q3 | a4 = A*(8,4,4,c4,q3) = A(3,3,x4,q3)");
        assert_eq!(lines[4], "5 | q2 | a5 = A*(8,4,5,c5,q2) = A(3,2,c5=x1+x2,q2)");
        assert_eq!(lines[5], "8 | q3 | a8 = A*(8,4,8,c8,q3) = A(3,3,c8=x4+x1,q3)");
        assert!(t.contains("a'2 = a2 + a5 = A(3,2,x1,q2)"));
        assert!(t.contains("a'3 = a4 + a8 = A(3,3,x1,q3)"));
    }

    #[test]
    fn second_part_table() {
        let t = exposition(&example2_code(), 1, &[0, 1, 2], &example2_labels());
        let servers: Vec<&str> = t.lines().skip(1).take(5).map(|l| l.split(" | ").next().unwrap()).collect();
        assert_eq!(servers, ["1", "2", "3", "5", "6"]);
        assert!(t.contains("1 | q2 |"));
        assert!(t.contains("a'1 = a2 = A(3,1,x2,q1)"));
        assert!(t.contains("a'3 = a3 + a6 = A(3,3,x2,q3)"));
    }
}
