//! Execution-order derivation: canonicalize the admissible set, derive the
//! delay-function input, and produce/verify the execution permutation.
//!
//! The whole pipeline is a pure function of `(prev_block_hash, admissible
//! set, slot, delay params)`, so any party can recompute and check a
//! published ordering bit-exactly.
//!
//! # Shuffle stream
//!
//! Cross-implementation reproducibility requires the shuffle randomness to
//! be pinned precisely:
//!
//! * stream blocks: `block_k = H(seed ‖ k)` with `k` an 8-byte big-endian
//!   counter starting at 0;
//! * each 32-byte block yields four words, consumed as successive 8-byte
//!   big-endian unsigned integers;
//! * Fisher–Yates runs from index `m-1` down to `1`; at index `i` the swap
//!   partner is `word mod (i+1)`, where words `>= floor(2^64/(i+1))*(i+1)`
//!   are rejected and the next word is drawn (removes modulo bias).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::{hash, merkle_root, Digest, SlotNumber};
use crate::commit::CommitCertificate;
use crate::vdf::{vdf_eval, vdf_verify, VdfOutput, VdfParams};

/// Canonically sorted, deduplicated set of admissible commitment
/// certificates for one slot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibleSet {
    pub slot: SlotNumber,
    pub entries: Vec<CommitCertificate>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CanonicalizeError {
    #[error("certificate for slot {got} cannot enter the set for slot {expected}")]
    WrongSlot { expected: SlotNumber, got: SlotNumber },
}

/// Sorts certificates byte-lexicographically by `(idcom, commitment)` and
/// drops duplicates. Duplicate pairs with differing receipt sets keep one
/// canonical representative: the smallest canonical encoding after receipt
/// normalization.
pub fn canonicalize(
    certificates: Vec<CommitCertificate>,
    slot: SlotNumber,
) -> Result<AdmissibleSet, CanonicalizeError> {
    for cert in &certificates {
        if cert.slot() != slot {
            return Err(CanonicalizeError::WrongSlot {
                expected: slot,
                got: cert.slot(),
            });
        }
    }
    let mut entries = certificates;
    entries.sort_by(|a, b| {
        (a.idcom(), a.commitment_digest(), a.canonical_bytes())
            .cmp(&(b.idcom(), b.commitment_digest(), b.canonical_bytes()))
    });
    entries.dedup_by(|next, prev| {
        next.idcom() == prev.idcom() && next.commitment_digest() == prev.commitment_digest()
    });
    Ok(AdmissibleSet { slot, entries })
}

impl AdmissibleSet {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn index_of(&self, idcom: &Digest, commitment: &Digest) -> Option<usize> {
        self.entries
            .binary_search_by(|e| (e.idcom(), e.commitment_digest()).cmp(&(*idcom, *commitment)))
            .ok()
    }

    pub fn contains(&self, idcom: &Digest, commitment: &Digest) -> bool {
        self.index_of(idcom, commitment).is_some()
    }

    /// True iff entries are sorted by `(idcom, commitment)` with no
    /// duplicate pairs and every certificate names this slot.
    pub fn is_canonical(&self) -> bool {
        self.entries.iter().all(|e| e.slot() == self.slot)
            && self
                .entries
                .windows(2)
                .all(|w| (w[0].idcom(), w[0].commitment_digest()) < (w[1].idcom(), w[1].commitment_digest()))
    }

    /// Merkle root over the canonical certificate encodings, binding the
    /// receipt evidence as well as the commitments.
    pub fn root(&self) -> Digest {
        let leaves: Vec<Vec<u8>> = self.entries.iter().map(|e| e.canonical_bytes()).collect();
        merkle_root(&leaves)
    }
}

/// Delay-function input: `H(prev_block_hash ‖ set_root ‖ slot)` over the
/// fixed-width 32 ‖ 32 ‖ 8 layout.
pub fn derive_vdf_input(prev_block_hash: &Digest, set_root: &Digest, slot: SlotNumber) -> Digest {
    let mut pre = [0u8; 72];
    pre[..32].copy_from_slice(&prev_block_hash.0);
    pre[32..64].copy_from_slice(&set_root.0);
    pre[64..].copy_from_slice(&slot.to_be_bytes());
    hash(&pre)
}

/// A bijection on `[0, m)`. `order[k]` is the admissible-set index executed
/// at traversal position `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Permutation {
    pub order: Vec<u32>,
}

impl Permutation {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn is_bijection(&self) -> bool {
        let m = self.order.len();
        let mut seen = vec![false; m];
        for &v in &self.order {
            let Some(slot) = seen.get_mut(v as usize) else {
                return false;
            };
            if *slot {
                return false;
            }
            *slot = true;
        }
        true
    }
}

/// Counter-based word stream over `H(seed ‖ counter)` blocks.
struct SeedStream {
    seed: Digest,
    counter: u64,
    buffer: [u64; 4],
    next_word: usize,
}

impl SeedStream {
    fn new(seed: Digest) -> Self {
        SeedStream {
            seed,
            counter: 0,
            buffer: [0; 4],
            next_word: 4,
        }
    }

    fn next_u64(&mut self) -> u64 {
        if self.next_word == 4 {
            let mut pre = [0u8; 40];
            pre[..32].copy_from_slice(&self.seed.0);
            pre[32..].copy_from_slice(&self.counter.to_be_bytes());
            let block = hash(&pre);
            for (i, chunk) in block.0.chunks_exact(8).enumerate() {
                self.buffer[i] = u64::from_be_bytes(chunk.try_into().expect("8-byte chunk"));
            }
            self.counter += 1;
            self.next_word = 0;
        }
        let word = self.buffer[self.next_word];
        self.next_word += 1;
        word
    }

    /// Uniform draw from `[0, bound)` by rejection sampling.
    fn next_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound >= 1);
        let limit = ((1u128 << 64) / bound as u128 * bound as u128) as u128;
        loop {
            let word = self.next_u64();
            if (word as u128) < limit {
                return word % bound;
            }
        }
    }
}

/// Seeded Fisher–Yates over `[0, m)` using the pinned stream above.
pub fn derive_permutation(seed: &Digest, m: usize) -> Permutation {
    let mut order: Vec<u32> = (0..m as u32).collect();
    let mut stream = SeedStream::new(*seed);
    for i in (1..m).rev() {
        let j = stream.next_below(i as u64 + 1) as usize;
        order.swap(i, j);
    }
    Permutation { order }
}

/// Published ordering material: everything a verifier needs to recompute
/// the execution permutation from the admissible set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderingBundle {
    pub set_root: Digest,
    pub vdf_input: Digest,
    pub seed: Digest,
    pub vdf_proof: Vec<Digest>,
    pub permutation: Permutation,
}

impl OrderingBundle {
    fn vdf_output(&self) -> VdfOutput {
        VdfOutput {
            y: self.seed,
            proof: self.vdf_proof.clone(),
        }
    }
}

/// Runs the full order phase over a canonical admissible set.
pub fn produce_ordering(
    admissible: &AdmissibleSet,
    prev_block_hash: &Digest,
    vdf_params: &VdfParams,
) -> OrderingBundle {
    let set_root = admissible.root();
    let vdf_input = derive_vdf_input(prev_block_hash, &set_root, admissible.slot);
    let out = vdf_eval(vdf_params, vdf_input);
    let permutation = derive_permutation(&out.y, admissible.len());
    OrderingBundle {
        set_root,
        vdf_input,
        seed: out.y,
        vdf_proof: out.proof,
        permutation,
    }
}

/// Why a published ordering failed recomputation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderingViolation {
    RootMismatch,
    VdfInputMismatch,
    InvalidVdf,
    PermutationMismatch,
}

impl std::fmt::Display for OrderingViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            OrderingViolation::RootMismatch => "set root mismatch",
            OrderingViolation::VdfInputMismatch => "vdf input mismatch",
            OrderingViolation::InvalidVdf => "vdf output does not verify",
            OrderingViolation::PermutationMismatch => "permutation mismatch",
        };
        f.write_str(s)
    }
}

/// Recomputes root, delay input, delay output, and permutation; accepts iff
/// all match the published bundle.
pub fn verify_ordering(
    bundle: &OrderingBundle,
    admissible: &AdmissibleSet,
    prev_block_hash: &Digest,
    vdf_params: &VdfParams,
) -> Result<(), OrderingViolation> {
    if bundle.set_root != admissible.root() {
        return Err(OrderingViolation::RootMismatch);
    }
    if bundle.vdf_input != derive_vdf_input(prev_block_hash, &bundle.set_root, admissible.slot) {
        return Err(OrderingViolation::VdfInputMismatch);
    }
    if !vdf_verify(vdf_params, bundle.vdf_input, &bundle.vdf_output()) {
        return Err(OrderingViolation::InvalidVdf);
    }
    if bundle.permutation != derive_permutation(&bundle.seed, admissible.len()) {
        return Err(OrderingViolation::PermutationMismatch);
    }
    Ok(())
}
