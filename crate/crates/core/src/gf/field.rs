//! Finite fields GF(p^w) with q = p^w <= 256.
//!
//! Elements are encoded as integers `0..q` whose base-`p` digits are the
//! coefficients of a polynomial in the modulus ring (least significant digit
//! first). For characteristic 2 this is the usual bit-polynomial encoding, so
//! addition is exclusive-or. Arithmetic is table driven; tables are built once
//! per order and shared through an `Arc`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use super::GfError;

/// A field element, encoded as described in the module docs.
pub type Elem = u8;

/// Reduction polynomials for GF(2^w), bit-encoded with the leading term.
/// All are primitive, so `x` (element `2`) generates the multiplicative group.
const BINARY_MODULI: [u32; 9] = [
    0,     // unused
    0b10,  // w = 1: x (degenerate, no reduction needed)
    0x7,   // x^2 + x + 1
    0xB,   // x^3 + x + 1
    0x13,  // x^4 + x + 1
    0x25,  // x^5 + x^2 + 1
    0x43,  // x^6 + x + 1
    0x83,  // x^7 + x + 1
    0x11D, // x^8 + x^4 + x^3 + x^2 + 1
];

struct Tables {
    p: u16,
    w: u32,
    modulus: Vec<u16>,
    q: u16,
    add: Vec<Elem>,
    mul: Vec<Elem>,
    neg: Vec<Elem>,
    inv: Vec<Elem>,
    primitive: Elem,
}

/// Arithmetic context of one finite field. Cheap to clone.
#[derive(Clone)]
pub struct FieldSpec {
    t: Arc<Tables>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.t, &other.t)
            || (self.t.p == other.t.p && self.t.w == other.t.w && self.t.modulus == other.t.modulus)
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.t.q)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.t.q)
    }
}

fn is_prime(n: u32) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

fn cache() -> &'static Mutex<HashMap<u16, FieldSpec>> {
    static CACHE: OnceLock<Mutex<HashMap<u16, FieldSpec>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl FieldSpec {
    /// GF(2).
    pub fn binary() -> Self {
        Self::of_order(2).expect("GF(2) always exists")
    }

    /// The field of order `q`, where `q` is a prime below 256 or `2^w` with
    /// `w <= 8`. Powers of 2 use the fixed modulus table.
    pub fn of_order(q: u32) -> Result<Self, GfError> {
        if q > 256 || q < 2 {
            return Err(GfError::UnsupportedOrder(q));
        }
        if let Some(f) = cache().lock().unwrap().get(&(q as u16)) {
            return Ok(f.clone());
        }
        let spec = if is_prime(q) {
            Self::build(q as u16, 1, vec![])?
        } else if q.is_power_of_two() {
            let w = q.trailing_zeros();
            let m = BINARY_MODULI[w as usize];
            let modulus = (0..=w).map(|b| ((m >> b) & 1) as u16).collect();
            Self::build(2, w, modulus)?
        } else {
            return Err(GfError::UnsupportedOrder(q));
        };
        cache().lock().unwrap().insert(q as u16, spec.clone());
        Ok(spec)
    }

    /// GF(p^w) with an explicit monic modulus given as `w + 1` base-`p`
    /// coefficients, constant term first. The modulus must be irreducible;
    /// this is checked by confirming every nonzero element is invertible.
    pub fn with_modulus(p: u32, modulus: &[u16]) -> Result<Self, GfError> {
        if !is_prime(p) {
            return Err(GfError::NotPrime(p));
        }
        let w = modulus.len().saturating_sub(1) as u32;
        if w == 0 || modulus[w as usize] != 1 || modulus.iter().any(|&c| c as u32 >= p) {
            return Err(GfError::BadModulus);
        }
        let q = (p as u64).pow(w);
        if q > 256 {
            return Err(GfError::UnsupportedOrder(q as u32));
        }
        Self::build(p as u16, w, modulus.to_vec())
    }

    fn build(p: u16, w: u32, modulus: Vec<u16>) -> Result<Self, GfError> {
        let q = p.pow(w);
        let qs = q as usize;
        let digits = |x: usize| -> Vec<u16> {
            let mut d = vec![0u16; w as usize];
            let mut v = x;
            for slot in d.iter_mut() {
                *slot = (v % p as usize) as u16;
                v /= p as usize;
            }
            d
        };
        let encode = |d: &[u16]| -> Elem {
            d.iter().rev().fold(0usize, |acc, &c| acc * p as usize + c as usize) as Elem
        };
        let mut add = vec![0; qs * qs];
        let mut mul = vec![0; qs * qs];
        for a in 0..qs {
            let da = digits(a);
            for b in 0..qs {
                let db = digits(b);
                let sum: Vec<u16> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * qs + b] = encode(&sum);
                // schoolbook product then reduction by the monic modulus
                let mut prod = vec![0u32; 2 * w as usize];
                for (i, &x) in da.iter().enumerate() {
                    for (j, &y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x as u32 * y as u32) % p as u32;
                    }
                }
                if w > 1 {
                    for deg in (w as usize..prod.len()).rev() {
                        let c = prod[deg];
                        if c == 0 {
                            continue;
                        }
                        for (t, &mc) in modulus.iter().enumerate() {
                            let idx = deg - w as usize + t;
                            prod[idx] = (prod[idx] + (p as u32 - c) * mc as u32) % p as u32;
                        }
                    }
                }
                let red: Vec<u16> = prod[..w as usize].iter().map(|&c| c as u16).collect();
                mul[a * qs + b] = encode(&red);
            }
        }
        let mut neg = vec![0; qs];
        let mut inv = vec![0; qs];
        for a in 0..qs {
            neg[a] = (0..qs).find(|&b| add[a * qs + b] == 0).unwrap() as Elem;
            if a != 0 {
                match (1..qs).find(|&b| mul[a * qs + b] == 1) {
                    Some(b) => inv[a] = b as Elem,
                    None => return Err(GfError::BadModulus),
                }
            }
        }
        let order_of = |g: usize| -> usize {
            let mut x = g;
            let mut n = 1;
            while x != 1 {
                x = mul[x * qs + g] as usize;
                n += 1;
            }
            n
        };
        let primitive = (1..qs).find(|&g| order_of(g) == qs - 1).unwrap_or(1) as Elem;
        Ok(Self {
            t: Arc::new(Tables { p, w, modulus, q, add, mul, neg, inv, primitive }),
        })
    }

    pub fn order(&self) -> u32 {
        self.t.q as u32
    }

    pub fn characteristic(&self) -> u32 {
        self.t.p as u32
    }

    pub fn degree(&self) -> u32 {
        self.t.w
    }

    pub fn is_binary(&self) -> bool {
        self.t.q == 2
    }

    /// Bits needed to carry one element on the wire: `ceil(log2 q)`.
    pub fn bits_per_element(&self) -> u32 {
        32 - (self.t.q as u32 - 1).leading_zeros()
    }

    /// A designated generator of the multiplicative group (`x` for the
    /// binary-extension table).
    pub fn primitive(&self) -> Elem {
        self.t.primitive
    }

    pub fn contains(&self, a: Elem) -> bool {
        (a as u16) < self.t.q
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.t.p == 2 {
            a ^ b
        } else {
            self.t.add[a as usize * self.t.q as usize + b as usize]
        }
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.t.neg[a as usize]
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.t.mul[a as usize * self.t.q as usize + b as usize]
    }

    pub fn inv(&self, a: Elem) -> Result<Elem, GfError> {
        if a == 0 {
            Err(GfError::ZeroInverse)
        } else {
            Ok(self.t.inv[a as usize])
        }
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem, GfError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Elem, e: u32) -> Elem {
        (0..e).fold(1, |acc, _| self.mul(acc, a))
    }

    /// Inner product of two equal-length vectors.
    pub fn dot(&self, a: &[Elem], b: &[Elem]) -> Elem {
        a.iter().zip(b).fold(0, |acc, (&x, &y)| self.add(acc, self.mul(x, y)))
    }

    /// `acc += c * v`, elementwise.
    pub fn axpy(&self, acc: &mut [Elem], c: Elem, v: &[Elem]) {
        if c == 0 {
            return;
        }
        for (a, &x) in acc.iter_mut().zip(v) {
            *a = self.add(*a, self.mul(c, x));
        }
    }

    /// Every element of the field, in encoding order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.t.q).map(|x| x as Elem)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = Elem> {
        (1..self.t.q).map(|x| x as Elem)
    }
}

/// The three elementary operations exposed for scripting and the FFI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Mul,
    Inv,
}

pub fn field_arith(f: &FieldSpec, a: Elem, b: Elem, op: FieldOp) -> Result<Elem, GfError> {
    if !f.contains(a) || !f.contains(b) {
        return Err(GfError::InvalidElement);
    }
    match op {
        FieldOp::Add => Ok(f.add(a, b)),
        FieldOp::Mul => Ok(f.mul(a, b)),
        FieldOp::Inv => f.inv(a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Multiplication of bit-polynomials followed by reduction, written
    /// independently of the table builder.
    fn clmul_reduce(a: u32, b: u32, modulus: u32, w: u32) -> u32 {
        let mut prod = 0u32;
        for i in 0..w {
            if (b >> i) & 1 == 1 {
                prod ^= a << i;
            }
        }
        for deg in (w..2 * w).rev() {
            if (prod >> deg) & 1 == 1 {
                prod ^= modulus << (deg - w);
            }
        }
        prod
    }

    #[test]
    fn gf2_one_plus_one_is_zero() {
        let f = FieldSpec::binary();
        assert_eq!(field_arith(&f, 1, 1, FieldOp::Add).unwrap(), 0);
    }

    #[test]
    fn gf4_alpha_identities() {
        let f = FieldSpec::of_order(4).unwrap();
        let a = f.primitive();
        assert_eq!(a, 2);
        let a2 = f.mul(a, a);
        assert_eq!(a2, 3);
        assert_eq!(f.add(a, a2), 1);
        assert_eq!(f.mul(a2, a), 1);
    }

    #[test]
    fn gf4_table_matches_brute_force() {
        let f = FieldSpec::of_order(4).unwrap();
        for a in 0..4u32 {
            for b in 0..4u32 {
                assert_eq!(f.mul(a as u8, b as u8) as u32, clmul_reduce(a, b, 0x7, 2));
            }
        }
    }

    #[test]
    fn binary_extension_tables_match_clmul() {
        for w in 2..=8u32 {
            let f = FieldSpec::of_order(1 << w).unwrap();
            for a in (0..(1u32 << w)).step_by(3) {
                for b in (0..(1u32 << w)).step_by(5) {
                    assert_eq!(
                        f.mul(a as u8, b as u8) as u32,
                        clmul_reduce(a, b, BINARY_MODULI[w as usize], w)
                    );
                }
            }
            assert_eq!(f.primitive(), 2, "x is primitive for w={w}");
        }
    }

    #[test]
    fn field_axioms_exhaustive_small_orders() {
        for q in [2u32, 3, 4, 5, 7, 8, 9, 11, 13, 16] {
            let f = match FieldSpec::of_order(q) {
                Ok(f) => f,
                Err(_) => FieldSpec::with_modulus(3, &[1, 0, 1]).unwrap(), // 9 = 3^2, x^2+1
            };
            let q = f.order() as u8;
            for a in 0..q {
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                for b in 0..q {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in 0..q {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn inverse_of_zero_is_an_error() {
        let f = FieldSpec::of_order(4).unwrap();
        assert!(matches!(field_arith(&f, 0, 0, FieldOp::Inv), Err(GfError::ZeroInverse)));
    }

    #[test]
    fn reducible_modulus_rejected() {
        // x^2 + 2x + 1 = (x+1)^2 over GF(3)
        assert!(FieldSpec::with_modulus(3, &[1, 2, 1]).is_err());
        assert!(FieldSpec::of_order(6).is_err());
        assert!(FieldSpec::of_order(9).is_err());
    }

    #[test]
    fn wire_width() {
        assert_eq!(FieldSpec::binary().bits_per_element(), 1);
        assert_eq!(FieldSpec::of_order(4).unwrap().bits_per_element(), 2);
        assert_eq!(FieldSpec::of_order(256).unwrap().bits_per_element(), 8);
        assert_eq!(FieldSpec::of_order(5).unwrap().bits_per_element(), 3);
    }
}
