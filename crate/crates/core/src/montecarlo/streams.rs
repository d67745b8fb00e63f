//! Counter-addressed random substreams.
//!
//! Every random quantity is drawn from a ChaCha stream keyed by the master
//! seed, a purpose tag and the topology index, with the stream id built from
//! (slot or attempt, item). Results therefore do not depend on scheduling
//! order or worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) const TAG_BS: u64 = 1;
pub(crate) const TAG_POOL: u64 = 2;
pub(crate) const TAG_SLOT: u64 = 3;
pub(crate) const TAG_PROBE: u64 = 4;

const ITEM_BITS: u32 = 24;

pub(crate) fn substream(seed: u64, tag: u64, topology: u64, index: u64, item: u64) -> ChaCha8Rng {
    debug_assert!(item < 1 << ITEM_BITS && index < 1 << (64 - ITEM_BITS));
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&tag.to_le_bytes());
    key[16..24].copy_from_slice(&topology.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream((index << ITEM_BITS) | item);
    rng
}
