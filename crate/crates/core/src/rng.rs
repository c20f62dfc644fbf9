//! Counter-based random streams.
//!
//! Every random draw in the crate is a pure function of a master seed and a
//! path of `(tag, index)` pairs. A [`StreamKey`] names one stream; the stream
//! itself is the SplitMix64 sequence seeded with that key, so the `c`-th value
//! can be evaluated directly without generating the first `c - 1`. That makes
//! generation independent of iteration order and of the thread schedule.
//!
//! Split function: `child = mix(mix(parent + tag * G) ^ mix(index + G))`,
//! where `G` is the 64-bit golden ratio increment and `mix` is the SplitMix64
//! finalizer.

use rand::RngCore;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const MASTER_SALT: u64 = 0x6469_636c_6971_7565;

/// SplitMix64 output finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Purpose tags for sub-streams.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum StreamTag {
    Cell = 1,
    Replicate = 2,
    NodeX = 3,
    NodeY = 4,
    NodeShared = 5,
    Attribute = 6,
    Links = 7,
    LinkRow = 8,
    Limit = 9,
    Auxiliary = 10,
}

/// Identifies one random stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StreamKey(u64);

impl StreamKey {
    pub fn from_seed(seed: u64) -> Self {
        StreamKey(mix64(seed ^ MASTER_SALT))
    }

    pub fn raw(self) -> u64 {
        self.0
    }

    pub fn derive(self, tag: StreamTag, index: u64) -> Self {
        let left = mix64(self.0.wrapping_add((tag as u64).wrapping_mul(GOLDEN)));
        let right = mix64(index.wrapping_add(GOLDEN));
        StreamKey(mix64(left ^ right))
    }

    /// The `counter`-th 64-bit output of this stream.
    #[inline]
    pub fn bits_at(self, counter: u64) -> u64 {
        mix64(self.0.wrapping_add(counter.wrapping_add(1).wrapping_mul(GOLDEN)))
    }

    /// The `counter`-th output mapped to the open interval (0, 1).
    #[inline]
    pub fn uniform_at(self, counter: u64) -> f64 {
        bits_to_open_unit(self.bits_at(counter))
    }

    /// Sequential view of the stream, starting at position 0.
    pub fn sequential(self) -> SeqStream {
        SeqStream { key: self, counter: 0 }
    }
}

#[inline]
fn bits_to_open_unit(bits: u64) -> f64 {
    ((bits >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

/// A stream consumed in order. Implements [`RngCore`] so `rand_distr`
/// samplers can draw from it.
#[derive(Clone, Debug)]
pub struct SeqStream {
    key: StreamKey,
    counter: u64,
}

impl SeqStream {
    pub fn uniform(&mut self) -> f64 {
        bits_to_open_unit(self.next_u64())
    }

    pub fn position(&self) -> u64 {
        self.counter
    }
}

impl RngCore for SeqStream {
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        let out = self.key.bits_at(self.counter);
        self.counter += 1;
        out
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let bytes = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}
