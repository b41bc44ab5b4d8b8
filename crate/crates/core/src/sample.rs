//! Seeded sampling of scalars and small structures.

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::pcr::{Carrier, Scalar, Q};

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Independent stream derived from this seed and a tag, so suites do not perturb each other.
    pub fn derived(seed: u64, tag: &str) -> Self {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in tag.bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        Sampler::new(seed ^ h)
    }

    pub fn below(&mut self, n: usize) -> usize {
        if n == 0 {
            0
        } else {
            self.rng.gen_range(0..n)
        }
    }

    pub fn range(&mut self, lo: usize, hi_inclusive: usize) -> usize {
        self.rng.gen_range(lo..=hi_inclusive)
    }

    pub fn chance(&mut self, num: u32, den: u32) -> bool {
        self.rng.gen_range(0..den) < num
    }

    pub fn pick<'a, T>(&mut self, xs: &'a [T]) -> &'a T {
        xs.choose(&mut self.rng).expect("nonempty choice")
    }

    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        xs.shuffle(&mut self.rng);
    }

    /// A small rational p/q with |p| ≤ 6 and 1 ≤ q ≤ 4.
    pub fn small_q(&mut self, signed: bool) -> Q {
        let p: i64 = self.rng.gen_range(0..=6);
        let d: i64 = self.rng.gen_range(1..=4);
        let p = if signed && self.rng.gen_bool(0.5) { -p } else { p };
        Q::new(BigInt::from(p), BigInt::from(d))
    }

    /// A rational in [0, 1] with small denominator.
    pub fn unit_q(&mut self) -> Q {
        let d: i64 = self.rng.gen_range(1..=4);
        let p: i64 = self.rng.gen_range(0..=d);
        Q::new(BigInt::from(p), BigInt::from(d))
    }

    /// A scalar of the carrier; zero about a quarter of the time.
    pub fn scalar(&mut self, carrier: Carrier) -> Scalar {
        if self.chance(1, 4) {
            return carrier.zero();
        }
        match carrier {
            Carrier::Bool | Carrier::FinitaryBool | Carrier::Coherence => {
                if self.chance(1, 2) {
                    carrier.one()
                } else {
                    carrier.zero()
                }
            }
            Carrier::ExtendedNonneg if self.chance(1, 12) => Scalar::Ext(None),
            _ => {
                let v = self.small_q(carrier.is_signed());
                carrier.from_q(v).expect("sampled in range")
            }
        }
    }

    /// A nonzero scalar of the carrier.
    pub fn nonzero_scalar(&mut self, carrier: Carrier) -> Scalar {
        loop {
            let s = self.scalar(carrier);
            if !s.is_zero() {
                return s;
            }
        }
    }
}
