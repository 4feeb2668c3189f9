//! Seeded random streams. Every stochastic quantity in the simulator is drawn
//! from a ChaCha stream keyed by (seed, domain, index), so results never depend
//! on evaluation order or thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Layout,
    Mobility,
    Snapshot,
    Link,
    Genetic,
}

impl Domain {
    fn tag(self) -> u64 {
        match self {
            Domain::Layout => 0x4c41_594f_5554,
            Domain::Mobility => 0x4d4f_4249_4c45,
            Domain::Snapshot => 0x534e_4150_5348,
            Domain::Link => 0x4c49_4e4b_5321,
            Domain::Genetic => 0x4745_4e45_5449,
        }
    }
}

pub fn stream_rng(seed: u64, domain: Domain, index: u64) -> ChaCha8Rng {
    let mut rng =
        ChaCha8Rng::seed_from_u64(seed ^ domain.tag().wrapping_mul(0x9e37_79b9_7f4a_7c15));
    rng.set_stream(index);
    rng
}
