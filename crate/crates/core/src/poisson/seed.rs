/// splitmix64 finalizer; a bijection on u64 used to derive independent
/// replicate seeds from a master seed.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Counter-based replicate seeding: the seed for a replicate depends only
/// on (master_seed, replicate_index), so replicates can run in any order
/// on any number of workers with identical output.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeedPolicy {
    pub master_seed: u64,
    pub replicate_index: u64,
}

impl SeedPolicy {
    pub fn new(master_seed: u64, replicate_index: u64) -> Self {
        SeedPolicy {
            master_seed,
            replicate_index,
        }
    }

    /// The derived stream seed for this (master, replicate) pair.
    pub fn seed(&self) -> u64 {
        mix(self.master_seed, self.replicate_index)
    }

    /// Derive a sub-stream seed from further labels (e.g. n, direction).
    pub fn derive(&self, labels: &[u64]) -> u64 {
        labels.iter().fold(self.seed(), |acc, &l| mix(acc, l))
    }
}

fn mix(a: u64, b: u64) -> u64 {
    splitmix64(a.wrapping_add(splitmix64(b)))
}
