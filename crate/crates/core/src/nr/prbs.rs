use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// PRBS23 generator, polynomial x^23 + x^18 + 1 (Fibonacci form).
///
/// The seed is hashed and folded into the non-zero 23-bit state space, so
/// every `u64` seed (including 0) yields a valid register state, and nearby
/// seeds do not start from sparse states with long runs of zeros.
#[derive(Debug, Clone)]
pub struct Prbs23 {
    state: u32,
}

const DEGREE: u32 = 23;
const MASK: u32 = (1 << DEGREE) - 1;

impl Prbs23 {
    pub fn new(seed: u64) -> Self {
        let mixed = ChaCha8Rng::seed_from_u64(seed).next_u32();
        let state = mixed % MASK + 1;
        Self { state }
    }

    pub fn next_bit(&mut self) -> u8 {
        let bit = ((self.state >> 22) ^ (self.state >> 17)) & 1;
        self.state = ((self.state << 1) | bit) & MASK;
        bit as u8
    }

    pub fn bits(&mut self, n: usize) -> Vec<u8> {
        (0..n).map(|_| self.next_bit()).collect()
    }
}

impl Iterator for Prbs23 {
    type Item = u8;

    fn next(&mut self) -> Option<u8> {
        Some(self.next_bit())
    }
}
