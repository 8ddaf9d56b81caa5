//! The 16-bit halting hash and the per-block collision table.
//!
//! The hash absorbs `4 * (h_c + 1)` leading state words into a four-word
//! accumulator seeded from the random words, the round number and the
//! previous checkpoint tag. Each absorbed row is followed by one quarter
//! round and a final quarter round mixes the result, so one evaluation costs
//! exactly `h_c + 2` quarter rounds and uses nothing but add, rotate and xor.
//!
//! The collision table is a plain lookup structure; its access pattern
//! depends on secret tags, so it is not constant time.

use crate::state::{quarter_round, CipherState, RandomWords};

/// A 16-bit checkpoint hash.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HaltTag(pub u16);

impl HaltTag {
    pub fn next(self) -> HaltTag {
        HaltTag(self.0.wrapping_add(1))
    }
}

/// Chained checkpoint hash of the state after round `r`.
///
/// `h_c` must be 1, 2 or 3.
#[inline]
pub fn compute_hash(
    state: &CipherState,
    r: u32,
    rw: &RandomWords,
    prev: HaltTag,
    h_c: u8,
) -> HaltTag {
    debug_assert!((1..=3).contains(&h_c));
    let s = state.words();
    let mut t = rw.0;
    t[0] = t[0].wrapping_add(r);
    t[1] = t[1].wrapping_add(u32::from(prev.0));
    for row in s.chunks_exact(4).take(usize::from(h_c) + 1) {
        let (a, b, c, d) =
            quarter_round(t[0] ^ row[0], t[1] ^ row[1], t[2] ^ row[2], t[3] ^ row[3]);
        t = [a, b, c, d];
    }
    let (a, b, c, d) = quarter_round(t[0], t[1], t[2], t[3]);
    let folded = a ^ b ^ c ^ d;
    HaltTag((folded ^ (folded >> 16)) as u16)
}

const TABLE_WORDS: usize = (1 << 16) / 64;

/// Observationally a set of 2^16 boolean flags. Clearing only touches the
/// words that were set, so a reset costs as much as the block used.
#[derive(Clone)]
pub struct CollisionTable {
    bits: Box<[u64; TABLE_WORDS]>,
    touched: Vec<u16>,
    len: usize,
}

impl Default for CollisionTable {
    fn default() -> Self {
        Self::new()
    }
}

impl CollisionTable {
    pub fn new() -> Self {
        Self {
            bits: Box::new([0; TABLE_WORDS]),
            touched: Vec::new(),
            len: 0,
        }
    }

    pub fn reset(&mut self) {
        for &w in &self.touched {
            self.bits[usize::from(w)] = 0;
        }
        self.touched.clear();
        self.len = 0;
    }

    #[inline]
    pub fn contains(&self, tag: HaltTag) -> bool {
        let i = usize::from(tag.0);
        self.bits[i / 64] & (1 << (i % 64)) != 0
    }

    /// Sets the flag for `tag`.
    #[inline]
    pub fn mark(&mut self, tag: HaltTag) {
        let i = usize::from(tag.0);
        let word = &mut self.bits[i / 64];
        if *word == 0 {
            self.touched.push((i / 64) as u16);
        }
        if *word & (1 << (i % 64)) == 0 {
            *word |= 1 << (i % 64);
            self.len += 1;
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// First free tag at or after `tag`, wrapping modulo 2^16. Does not set
    /// the flag.
    ///
    /// # Panics
    ///
    /// If all 2^16 flags are set. A block marks at most `N_r` tags, which is
    /// at most 65535, so this cannot happen through the block operations.
    #[inline]
    pub fn probe(&self, mut tag: HaltTag) -> HaltTag {
        assert!(self.len < 1 << 16, "collision table is full");
        while self.contains(tag) {
            tag = tag.next();
        }
        tag
    }
}

/// Free-function form of [`CollisionTable::probe`].
pub fn probe(table: &CollisionTable, tag: HaltTag) -> HaltTag {
    table.probe(tag)
}
