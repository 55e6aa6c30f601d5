//! Randomness sources. Protocols draw every coin through [`Coins`], so the
//! same code runs against a seeded stream, a fixed tape, or an exhaustive
//! enumeration of the whole randomness space.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub trait Coins {
    /// A uniform value in `0..radix`.
    fn draw(&mut self, radix: u32) -> u32;
}

impl<C: Coins + ?Sized> Coins for &mut C {
    fn draw(&mut self, radix: u32) -> u32 {
        (**self).draw(radix)
    }
}

/// Seeded stream that remembers every draw as `(radix, value)`.
#[derive(Debug, Clone)]
pub struct RandomTape {
    seed: u64,
    rng: ChaCha8Rng,
    log: Vec<(u32, u32)>,
}

impl RandomTape {
    pub fn new(seed: u64) -> Self {
        Self { seed, rng: ChaCha8Rng::seed_from_u64(seed), log: Vec::new() }
    }

    /// Independent stream for sub-task `index` of the same seed.
    pub fn split(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index + 1);
        Self { seed, rng, log: Vec::new() }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn log(&self) -> &[(u32, u32)] {
        &self.log
    }

    /// A fixed tape that replays the values of this log.
    pub fn replay(&self) -> FixedTape {
        FixedTape::new(self.log.iter().map(|&(_, v)| v).collect())
    }
}

impl Coins for RandomTape {
    fn draw(&mut self, radix: u32) -> u32 {
        let v = if radix <= 1 { 0 } else { self.rng.gen_range(0..radix) };
        self.log.push((radix, v));
        v
    }
}

/// Replays given values in order, then zeros. Values are reduced modulo the
/// requested radix.
#[derive(Debug, Clone, Default)]
pub struct FixedTape {
    values: Vec<u32>,
    pos: usize,
}

impl FixedTape {
    pub fn new(values: Vec<u32>) -> Self {
        Self { values, pos: 0 }
    }
}

impl Coins for FixedTape {
    fn draw(&mut self, radix: u32) -> u32 {
        let v = self.values.get(self.pos).copied().unwrap_or(0);
        self.pos += 1;
        if radix == 0 {
            0
        } else {
            v % radix
        }
    }
}

/// Every draw returns 0.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroCoins;

impl Coins for ZeroCoins {
    fn draw(&mut self, _radix: u32) -> u32 {
        0
    }
}

/// Odometer over all tapes of a computation whose sequence of radices does
/// not depend on the values drawn. Each call of [`EnumCoins::run`] replays
/// the closure once per tape.
#[derive(Debug, Clone, Default)]
pub struct EnumCoins {
    digits: Vec<u32>,
    radices: Vec<u32>,
    pos: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpaceTooLarge {
    pub space: u128,
    pub limit: u128,
}

impl EnumCoins {
    /// Calls `f` once for every tape and returns the number of tapes. The
    /// first call discovers the radices; if their product exceeds `limit`
    /// nothing further runs.
    pub fn run<F: FnMut(&mut EnumCoins)>(limit: u128, mut f: F) -> Result<u128, SpaceTooLarge> {
        let mut coins = EnumCoins::default();
        f(&mut coins);
        let space = coins.radices.iter().try_fold(1u128, |acc, &r| acc.checked_mul(r.max(1) as u128)).unwrap_or(u128::MAX);
        if space > limit {
            return Err(SpaceTooLarge { space, limit });
        }
        let mut count = 1;
        while coins.advance() {
            coins.pos = 0;
            f(&mut coins);
            count += 1;
        }
        Ok(count)
    }

    /// Product of the radices seen on the first pass.
    pub fn space_of<F: FnMut(&mut EnumCoins)>(mut f: F) -> u128 {
        let mut coins = EnumCoins::default();
        f(&mut coins);
        coins.radices.iter().try_fold(1u128, |acc, &r| acc.checked_mul(r.max(1) as u128)).unwrap_or(u128::MAX)
    }

    fn advance(&mut self) -> bool {
        for p in (0..self.digits.len()).rev() {
            if self.digits[p] + 1 < self.radices[p] {
                self.digits[p] += 1;
                return true;
            }
            self.digits[p] = 0;
        }
        false
    }
}

impl Coins for EnumCoins {
    fn draw(&mut self, radix: u32) -> u32 {
        let p = self.pos;
        self.pos += 1;
        if p == self.digits.len() {
            self.digits.push(0);
            self.radices.push(radix.max(1));
        }
        debug_assert_eq!(self.radices[p], radix.max(1), "radix sequence changed between tapes");
        self.digits[p]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odometer_covers_space_once() {
        let mut seen = std::collections::HashSet::new();
        let n = EnumCoins::run(1000, |c| {
            let t = (c.draw(3), c.draw(1), c.draw(4));
            assert!(seen.insert(t));
        })
        .unwrap();
        assert_eq!(n, 12);
        assert_eq!(seen.len(), 12);
    }

    #[test]
    fn guard() {
        let e = EnumCoins::run(10, |c| {
            c.draw(4);
            c.draw(4);
        });
        assert_eq!(e, Err(SpaceTooLarge { space: 16, limit: 10 }));
    }

    #[test]
    fn tape_replays() {
        let mut t = RandomTape::new(7);
        let a: Vec<u32> = (0..20).map(|_| t.draw(5)).collect();
        let mut r = t.replay();
        let b: Vec<u32> = (0..20).map(|_| r.draw(5)).collect();
        assert_eq!(a, b);
        let mut t2 = RandomTape::new(7);
        assert_eq!(a, (0..20).map(|_| t2.draw(5)).collect::<Vec<_>>());
        let mut s = RandomTape::split(7, 0);
        assert_ne!(a, (0..20).map(|_| s.draw(5)).collect::<Vec<_>>());
    }
}
