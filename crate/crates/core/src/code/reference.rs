//! Published upper bounds on `A(s, k)` for `s <= 32`, shipped as data for
//! comparison. Only the columns below are listed; odd `k` outside them is
//! derived as the value at `k + 1` minus one, and `k = 1` as `s`.

/// Listed columns.
pub const REFERENCE_KS: [usize; 9] = [2, 3, 4, 6, 8, 10, 12, 14, 16];
pub const REFERENCE_MAX_S: usize = 32;
pub const REFERENCE_MAX_K: usize = 16;

/// `(value, proved optimal)` per row `s = 1..=32`, column as in
/// [`REFERENCE_KS`].
pub const REFERENCE_TABLE: [[(usize, bool); 9]; 32] = [
    [(2, true), (3, true), (4, true), (6, true), (8, true), (10, true), (12, true), (14, true), (16, true)],
    [(3, true), (5, true), (6, true), (9, true), (12, true), (15, true), (18, true), (21, true), (24, true)],
    [(4, true), (6, true), (7, true), (11, true), (14, true), (18, true), (21, true), (25, true), (28, true)],
    [(5, true), (8, false), (9, false), (12, true), (15, true), (20, false), (24, false), (27, true), (30, true)],
    [(6, true), (10, false), (11, false), (13, false), (19, false), (24, false), (26, false), (29, false), (31, true)],
    [(7, true), (11, false), (12, false), (14, false), (21, false), (26, false), (28, false), (35, false), (40, false)],
    [(8, true), (12, false), (13, false), (15, false), (23, false), (28, false), (30, false), (38, false), (43, false)],
    [(9, true), (13, false), (14, false), (20, false), (28, false), (34, false), (40, false), (48, false), (54, false)],
    [(10, true), (14, false), (15, false), (23, false), (30, false), (38, false), (45, false), (53, false), (60, false)],
    [(11, true), (17, false), (18, false), (24, false), (35, false), (41, false), (48, false), (57, false), (61, false)],
    [(12, true), (19, false), (20, false), (25, false), (37, false), (42, false), (50, false), (62, false), (67, false)],
    [(13, true), (20, false), (21, false), (26, false), (39, false), (43, false), (52, false), (64, false), (69, false)],
    [(14, true), (21, false), (22, false), (27, false), (41, false), (44, false), (54, false), (66, false), (71, false)],
    [(15, true), (22, false), (23, false), (29, false), (43, false), (45, false), (58, false), (68, false), (74, false)],
    [(16, true), (23, false), (24, false), (34, false), (44, false), (46, false), (62, false), (70, false), (80, false)],
    [(17, true), (24, false), (25, false), (37, false), (45, false), (47, false), (64, false), (72, false), (84, false)],
    [(18, true), (27, false), (28, false), (38, false), (46, false), (48, false), (66, false), (76, false), (86, false)],
    [(19, true), (28, false), (29, false), (39, false), (47, false), (49, false), (68, false), (78, false), (88, false)],
    [(20, true), (29, false), (30, false), (40, false), (48, false), (50, false), (70, false), (80, false), (90, false)],
    [(21, true), (30, false), (31, false), (41, false), (49, false), (51, false), (72, false), (82, false), (92, false)],
    [(22, true), (31, false), (32, false), (42, false), (50, false), (52, false), (74, false), (84, false), (94, false)],
    [(23, true), (32, false), (33, false), (47, false), (51, false), (53, false), (76, false), (86, false), (100, false)],
    [(24, true), (33, false), (34, false), (50, false), (52, false), (54, false), (78, false), (88, false), (104, false)],
    [(25, true), (34, false), (35, false), (51, false), (53, false), (55, false), (80, false), (90, false), (106, false)],
    [(26, true), (35, false), (36, false), (52, false), (54, false), (56, false), (82, false), (92, false), (108, false)],
    [(27, true), (38, false), (39, false), (53, false), (55, false), (57, false), (84, false), (96, false), (110, false)],
    [(28, true), (39, false), (40, false), (54, false), (56, false), (58, false), (86, false), (98, false), (112, false)],
    [(29, true), (40, false), (41, false), (55, false), (57, false), (59, false), (88, false), (100, false), (114, false)],
    [(30, true), (41, false), (42, false), (56, false), (58, false), (60, false), (90, false), (102, false), (116, false)],
    [(31, true), (42, false), (43, false), (57, false), (59, false), (61, false), (92, false), (104, false), (118, false)],
    [(32, true), (43, false), (44, false), (58, false), (60, false), (62, false), (94, false), (106, false), (120, false)],
    [(33, true), (44, false), (45, false), (59, false), (61, false), (63, false), (96, false), (108, false), (122, false)],
];

fn listed(s: usize, k: usize) -> Option<(usize, bool)> {
    let col = REFERENCE_KS.iter().position(|&c| c == k)?;
    REFERENCE_TABLE.get(s.checked_sub(1)?).map(|row| row[col])
}

/// Reference value for any `1 <= s <= 32`, `1 <= k <= 16`.
pub fn reference_value(s: usize, k: usize) -> Option<usize> {
    if s == 0 || s > REFERENCE_MAX_S || k == 0 || k > REFERENCE_MAX_K {
        return None;
    }
    if k == 1 {
        return Some(s);
    }
    listed(s, k).map(|(v, _)| v).or_else(|| listed(s, k + 1).map(|(v, _)| v - 1))
}

/// Whether the reference marks the cell as proved optimal.
pub fn reference_starred(s: usize, k: usize) -> bool {
    listed(s, k).is_some_and(|(_, star)| star)
}

/// All starred cells.
pub fn starred_cells() -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for s in 1..=REFERENCE_MAX_S {
        for &k in &REFERENCE_KS {
            if let Some((v, true)) = listed(s, k) {
                out.push((s, k, v));
            }
        }
    }
    out
}
