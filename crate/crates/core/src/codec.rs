//! Canonical byte encodings and hashing for everything that is signed or
//! hashed on the wire, plus the Merkle tree over the admissible set.
//!
//! Every layout here is fixed-width (or carries an explicit length prefix on
//! the one variable-length field), so each encoding is injective and stable
//! across implementations. Golden vectors for all three encoders live in
//! `tests/golden_vectors.txt` and are checked on every build.
//!
//! # Layouts
//!
//! Signed commit/open message (73 bytes):
//!
//! ```text
//! ╔═════════╦═══════════╦═══════════════╦═══════════╗
//! ║ tag 1B  ║ idcom 32B ║ commitment 32B║ slot 8B BE║
//! ╚═════════╩═══════════╩═══════════════╩═══════════╝
//! tag: 0x01 = commit, 0x02 = open
//! ```
//!
//! Commitment preimage: `len(tx) 8B BE ‖ tx ‖ nonce 32B ‖ idcom 32B ‖ slot 8B BE`.
//!
//! Merkle tree: leaf = `H(0x00 ‖ data)`, interior = `H(0x01 ‖ left ‖ right)`,
//! an odd node at any level is promoted unchanged, the empty tree hashes to
//! `H(0x00)`.

use serde::{Deserialize, Serialize};
use sha2::{Digest as _, Sha256};

/// 32-byte SHA-256 output. Ordered byte-lexicographically.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Digest(pub [u8; 32]);

impl Digest {
    pub const LEN: usize = 32;

    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self, hex::FromHexError> {
        let bytes = hex::decode(s)?;
        let arr: [u8; 32] = bytes
            .try_into()
            .map_err(|_| hex::FromHexError::InvalidStringLength)?;
        Ok(Digest(arr))
    }
}

impl std::fmt::Debug for Digest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Digest({})", self.to_hex())
    }
}

impl std::fmt::Display for Digest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.to_hex())
    }
}

impl AsRef<[u8]> for Digest {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

impl Serialize for Digest {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for Digest {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Digest::from_hex(&s).map_err(serde::de::Error::custom)
    }
}

/// Slot index; monotone across simulated slots.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct SlotNumber(pub u64);

impl SlotNumber {
    pub fn to_be_bytes(self) -> [u8; 8] {
        self.0.to_be_bytes()
    }
}

impl std::fmt::Display for SlotNumber {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Domain tag separating commit-phase from open-phase messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainTag {
    /// Wire byte 0x01, the "commit" message family.
    Commit,
    /// Wire byte 0x02, the "open" message family.
    Open,
}

impl DomainTag {
    pub fn wire_byte(self) -> u8 {
        match self {
            DomainTag::Commit => 0x01,
            DomainTag::Open => 0x02,
        }
    }
}

/// The tuple every user signature and validator receipt covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CanonicalMessage {
    pub domain_tag: DomainTag,
    pub idcom: Digest,
    pub commitment: Digest,
    pub slot: SlotNumber,
}

/// Encoded length of a [`CanonicalMessage`].
pub const MESSAGE_LEN: usize = 1 + 32 + 32 + 8;

/// SHA-256.
pub fn hash(data: &[u8]) -> Digest {
    let mut h = Sha256::new();
    h.update(data);
    Digest(h.finalize().into())
}

/// Fixed-width injective encoding of a signed message tuple.
pub fn encode_message(msg: &CanonicalMessage) -> [u8; MESSAGE_LEN] {
    let mut out = [0u8; MESSAGE_LEN];
    out[0] = msg.domain_tag.wire_byte();
    out[1..33].copy_from_slice(&msg.idcom.0);
    out[33..65].copy_from_slice(&msg.commitment.0);
    out[65..73].copy_from_slice(&msg.slot.to_be_bytes());
    out
}

/// Hash binding a transaction to its opening nonce, identity, and slot.
///
/// The 8-byte length prefix on `tx` keeps the preimage injective even though
/// `tx` is the only variable-length field.
pub fn commitment_hash(tx: &[u8], nonce: &[u8; 32], idcom: &Digest, slot: SlotNumber) -> Digest {
    let mut h = Sha256::new();
    h.update((tx.len() as u64).to_be_bytes());
    h.update(tx);
    h.update(nonce);
    h.update(idcom.0);
    h.update(slot.to_be_bytes());
    Digest(h.finalize().into())
}

const LEAF_PREFIX: u8 = 0x00;
const INTERIOR_PREFIX: u8 = 0x01;

fn leaf_hash(data: &[u8]) -> Digest {
    let mut h = Sha256::new();
    h.update([LEAF_PREFIX]);
    h.update(data);
    Digest(h.finalize().into())
}

fn interior_hash(left: &Digest, right: &Digest) -> Digest {
    let mut h = Sha256::new();
    h.update([INTERIOR_PREFIX]);
    h.update(left.0);
    h.update(right.0);
    Digest(h.finalize().into())
}

/// Binary Merkle root over already-ordered leaves.
///
/// An odd node at any level is promoted unchanged to the next level (no
/// duplicate-leaf ambiguity). The empty list hashes to the sentinel `H(0x00)`.
pub fn merkle_root<L: AsRef<[u8]>>(leaves: &[L]) -> Digest {
    if leaves.is_empty() {
        return hash(&[LEAF_PREFIX]);
    }
    let mut level: Vec<Digest> = leaves.iter().map(|l| leaf_hash(l.as_ref())).collect();
    while level.len() > 1 {
        let mut next = Vec::with_capacity(level.len().div_ceil(2));
        let mut chunks = level.chunks_exact(2);
        for pair in chunks.by_ref() {
            next.push(interior_hash(&pair[0], &pair[1]));
        }
        if let [odd] = chunks.remainder() {
            next.push(*odd);
        }
        level = next;
    }
    level[0]
}

/// Serde adapter for raw byte fields rendered as hex strings.
pub mod hex_bytes {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bytes: &[u8], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
        let s = String::deserialize(d)?;
        hex::decode(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for fixed 32-byte fields rendered as hex strings.
pub mod hex_array {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bytes: &[u8; 32], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[u8; 32], D::Error> {
        let s = String::deserialize(d)?;
        let bytes = hex::decode(&s).map_err(serde::de::Error::custom)?;
        bytes
            .try_into()
            .map_err(|_| serde::de::Error::custom("expected 32 bytes"))
    }
}
