//! Counter-based random number streams.
//!
//! Every random quantity in this crate is drawn from a stream identified by a
//! hierarchical key: a root seed folded with a sequence of integer path
//! components (replication index, role tag, vertex or pair identity, ...).
//! Two streams with the same path produce the same output; distinct paths are
//! statistically independent. Because draws are keyed by *what* they are for
//! rather than by draw order, dense/sparse generation modes and any parallel
//! evaluation order produce identical results.

/// Role tags used to separate sub-streams within one object.
pub mod role {
    pub const EDGE_GAP: u64 = 0x01;
    pub const EDGE_WEIGHT: u64 = 0x02;
    pub const VERTEX_WEIGHT: u64 = 0x03;
    pub const TREE: u64 = 0x04;
    pub const TREE_GAP: u64 = 0x05;
    pub const TREE_EDGE_WEIGHT: u64 = 0x06;
    pub const TREE_VERTEX_WEIGHT: u64 = 0x07;
    pub const REPLICATION: u64 = 0x08;
    pub const BOOTSTRAP: u64 = 0x09;
    pub const PILOT: u64 = 0x0a;
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A hierarchical stream identifier. Immutable; `child` derives sub-keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey(u64);

impl StreamKey {
    pub fn root(seed: u64) -> Self {
        StreamKey(mix64(seed ^ GOLDEN))
    }

    /// Fold one path component into the key.
    #[inline]
    pub fn child(self, component: u64) -> Self {
        StreamKey(mix64(self.0 ^ component.wrapping_mul(GOLDEN).wrapping_add(0x1234_5678_9abc_def1)))
    }

    pub fn rng(self) -> StreamRng {
        StreamRng { state: self.0 }
    }
}

/// Counter-based generator over one stream key (a SplitMix64 sequence).
#[derive(Debug, Clone)]
pub struct StreamRng {
    state: u64,
}

impl StreamRng {
    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform in [0, 1).
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in (0, 1]; safe as a log argument.
    #[inline]
    pub fn next_f64_open(&mut self) -> f64 {
        1.0 - self.next_f64()
    }

    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Exponential with the given rate, by inversion.
    #[inline]
    pub fn exponential(&mut self, rate: f64) -> f64 {
        -self.next_f64_open().ln() / rate
    }

    /// Geometric on {1, 2, ...} with success probability p: P(G > k) = (1-p)^k.
    #[inline]
    pub fn geometric(&mut self, p: f64) -> u64 {
        if p >= 1.0 {
            self.state = self.state.wrapping_add(GOLDEN); // keep draw count uniform
            return 1;
        }
        let u = self.next_f64_open();
        1 + (u.ln() / (1.0 - p).ln()).floor() as u64
    }

    /// Uniform index in [0, n).
    #[inline]
    pub fn index(&mut self, n: usize) -> usize {
        // n is tiny compared to 2^64; modulo bias is negligible here
        (self.next_u64() % n as u64) as usize
    }
}
