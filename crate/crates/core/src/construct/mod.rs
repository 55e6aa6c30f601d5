//! Concrete PIR code families.

pub mod balanced;
pub mod constant_weight;
pub mod cubic;
pub mod design;
pub mod majority;
pub mod systematic;

pub use balanced::balanced_multiplicity_code;
pub use constant_weight::{constant_weight_code, lexicode, optimal_constant_weight};
pub use cubic::{cubic_code, cubic_shortened};
pub use design::{affine_plane, projective_plane, steiner_triple, SteinerSystem};
pub use majority::{cyclic_generator, cyclic_orthogonal_search, majority_logic_15_7, OrthogonalSet};
pub use systematic::{steiner_code, systematic_code, BipartiteIncidence, Orientation};

use crate::code::{PirCode, RecoverySet};
use crate::gf::{FieldMatrix, FieldSpec};

/// The `[8,4,3]` code with columns `x1..x4, x1+x2, x2+x3, x3+x4, x4+x1`.
pub fn example2_code() -> PirCode {
    let f = FieldSpec::binary();
    let rows: Vec<Vec<u8>> = ["10001001", "01001100", "00100110", "00010011"]
        .iter()
        .map(|r| r.bytes().map(|b| b - b'0').collect())
        .collect();
    let g = FieldMatrix::from_rows(&f, &rows).expect("fixed matrix");
    let sets = |a: &[&[usize]]| a.iter().map(|s| RecoverySet::ones(s.iter().copied())).collect::<Vec<_>>();
    let w = vec![
        sets(&[&[0], &[1, 4], &[3, 7]]),
        sets(&[&[1], &[0, 4], &[2, 5]]),
        sets(&[&[2], &[1, 5], &[3, 6]]),
        sets(&[&[3], &[2, 6], &[0, 7]]),
    ];
    PirCode::new(g, 3, w).expect("fixed certificate")
}

/// The `[5,2]` code over GF(4) with columns `x1, x2, x1+x2, x1+a x2,
/// x1+a^2 x2`, certified for three servers.
pub fn gf4_example_code() -> PirCode {
    let f = FieldSpec::of_order(4).expect("GF(4)");
    let a = f.primitive();
    let a2 = f.mul(a, a);
    let g = FieldMatrix::from_rows(&f, &[vec![1, 0, 1, 1, 1], vec![0, 1, 1, a, a2]]).expect("fixed matrix");
    let w = vec![
        vec![
            RecoverySet::ones([0]),
            RecoverySet::ones([1, 2]),
            RecoverySet::new(vec![(3, a2), (4, a)]),
        ],
        vec![RecoverySet::ones([1]), RecoverySet::ones([0, 2]), RecoverySet::ones([3, 4])],
    ];
    PirCode::new(g, 3, w).expect("fixed certificate")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf4_code_is_three_server_with_distance_four() {
        let c = gf4_example_code();
        assert_eq!(c.k(), 3);
        assert_eq!(c.generator().min_distance().unwrap(), 4);
        assert_eq!(c.witnesses(0)[2].to_string(), "{3*3,4*2}");
    }

    #[test]
    fn example2_layout() {
        let c = example2_code();
        assert_eq!(c.generator().encode(&[1, 0, 0, 0]).unwrap(), vec![1, 0, 0, 0, 1, 0, 0, 1]);
        assert_eq!(c.generator().min_distance().unwrap(), 3);
    }
}
