//! Counter-based random numbers (Philox4x32-10).
//!
//! Every random draw is a pure function of `(seed, replicate, x, y, t, k)`,
//! so a simulation gives the same result whatever order or thread the site
//! updates run on.

use rand::RngCore;

const M0: u32 = 0xD251_1F53;
const M1: u32 = 0xCD9E_8D57;
const W0: u32 = 0x9E37_79B9;
const W1: u32 = 0xBB67_AE85;

#[inline]
fn mulhilo(a: u32, b: u32) -> (u32, u32) {
    let p = u64::from(a) * u64::from(b);
    ((p >> 32) as u32, p as u32)
}

/// Ten rounds of Philox4x32 on `counter` under `key`.
pub fn philox4x32(mut ctr: [u32; 4], mut key: [u32; 2]) -> [u32; 4] {
    for round in 0..10 {
        if round > 0 {
            key[0] = key[0].wrapping_add(W0);
            key[1] = key[1].wrapping_add(W1);
        }
        let (hi0, lo0) = mulhilo(M0, ctr[0]);
        let (hi1, lo1) = mulhilo(M1, ctr[2]);
        ctr = [hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0];
    }
    ctr
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Key material for one replicate of one experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamKey {
    key: [u32; 2],
}

impl StreamKey {
    pub fn new(seed: u64, replicate: u64) -> Self {
        let k = splitmix64(seed ^ splitmix64(replicate.wrapping_add(0x5851_F42D_4C95_7F2D)));
        Self { key: [k as u32, (k >> 32) as u32] }
    }

    /// Generator for the draws belonging to one site at one time. `tag`
    /// separates unrelated uses of the same coordinates.
    pub fn site(&self, x: i64, y: i64, t: u32, tag: u32) -> SiteRng {
        // coordinates are folded into 32 bits; windows are far smaller than 2^31
        let base = [x as u32, y as u32, t, tag << 24];
        SiteRng { key: self.key, base, block: 0, buf: [0; 4], used: 4 }
    }

    /// One 128-bit block for an arbitrary counter.
    pub fn block(&self, counter: [u32; 4]) -> [u32; 4] {
        philox4x32(counter, self.key)
    }
}

/// Stream of draws for a single counter prefix; the low 24 bits of the last
/// counter word number the 128-bit blocks.
#[derive(Debug, Clone)]
pub struct SiteRng {
    key: [u32; 2],
    base: [u32; 4],
    block: u32,
    buf: [u32; 4],
    used: usize,
}

impl SiteRng {
    fn refill(&mut self) {
        let mut ctr = self.base;
        ctr[3] |= self.block & 0x00FF_FFFF;
        self.buf = philox4x32(ctr, self.key);
        self.block = self.block.wrapping_add(1);
        self.used = 0;
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

impl RngCore for SiteRng {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        if self.used == 4 {
            self.refill();
        }
        let v = self.buf[self.used];
        self.used += 1;
        v
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        let lo = u64::from(self.next_u32());
        let hi = u64::from(self.next_u32());
        (hi << 32) | lo
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        for chunk in dest.chunks_mut(4) {
            let b = self.next_u32().to_le_bytes();
            chunk.copy_from_slice(&b[..chunk.len()]);
        }
    }
}
