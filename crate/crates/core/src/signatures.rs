//! Signature interface shared by user authentication keys and validator
//! receipt keys, with two interchangeable instantiations.
//!
//! * [`SchemeId::MockDeterministic`] — keyed-hash scheme for reproducible
//!   simulation. The verification key equals the secret seed, so it provides
//!   **no security whatsoever**; it is excluded from every authenticity test.
//! * [`SchemeId::Ed25519`] — a real EUF-CMA signature scheme. Any other
//!   scheme with 32-byte-seed key generation (including post-quantum ones)
//!   can be slotted in behind the same interface without protocol changes.

use ed25519_dalek::{Signer as _, Verifier as _};
use serde::{Deserialize, Serialize};

use crate::codec::{hash, hex_bytes};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeId {
    MockDeterministic,
    Ed25519,
}

impl SchemeId {
    fn wire_byte(self) -> u8 {
        match self {
            SchemeId::MockDeterministic => 0x00,
            SchemeId::Ed25519 => 0x01,
        }
    }
}

/// Secret signing key. Never serialized.
#[derive(Clone)]
pub enum SigningKey {
    Mock([u8; 32]),
    Ed25519(Box<ed25519_dalek::SigningKey>),
}

impl std::fmt::Debug for SigningKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        // Key material stays out of debug output.
        match self {
            SigningKey::Mock(_) => write!(f, "SigningKey::Mock(..)"),
            SigningKey::Ed25519(_) => write!(f, "SigningKey::Ed25519(..)"),
        }
    }
}

/// Public verification key carried in registrations and validator rosters.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VerificationKey {
    pub scheme: SchemeId,
    #[serde(with = "hex_bytes")]
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub scheme: SchemeId,
    #[serde(with = "hex_bytes")]
    pub bytes: Vec<u8>,
}

impl Signature {
    /// Injective byte form used inside hashed certificate encodings:
    /// scheme byte ‖ 8-byte BE length ‖ signature bytes.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(9 + self.bytes.len());
        out.push(self.scheme.wire_byte());
        out.extend_from_slice(&(self.bytes.len() as u64).to_be_bytes());
        out.extend_from_slice(&self.bytes);
        out
    }
}

/// Deterministic key generation from a 32-byte seed.
pub fn keypair_from_seed(scheme: SchemeId, seed: &[u8; 32]) -> (SigningKey, VerificationKey) {
    match scheme {
        SchemeId::MockDeterministic => {
            // Mock: the seed is both the signing and the verification key.
            let vk = VerificationKey {
                scheme,
                bytes: seed.to_vec(),
            };
            (SigningKey::Mock(*seed), vk)
        }
        SchemeId::Ed25519 => {
            let sk = ed25519_dalek::SigningKey::from_bytes(seed);
            let vk = VerificationKey {
                scheme,
                bytes: sk.verifying_key().to_bytes().to_vec(),
            };
            (SigningKey::Ed25519(Box::new(sk)), vk)
        }
    }
}

pub fn sign(key: &SigningKey, message: &[u8]) -> Signature {
    match key {
        SigningKey::Mock(seed) => {
            let mut pre = Vec::with_capacity(40 + message.len());
            pre.extend_from_slice(seed);
            pre.extend_from_slice(&(message.len() as u64).to_be_bytes());
            pre.extend_from_slice(message);
            Signature {
                scheme: SchemeId::MockDeterministic,
                bytes: hash(&pre).0.to_vec(),
            }
        }
        SigningKey::Ed25519(sk) => Signature {
            scheme: SchemeId::Ed25519,
            bytes: sk.sign(message).to_bytes().to_vec(),
        },
    }
}

/// Returns true iff `sig` is valid for `message` under `key`.
/// Malformed key or signature bytes verify as false, never panic.
pub fn verify(key: &VerificationKey, message: &[u8], sig: &Signature) -> bool {
    if key.scheme != sig.scheme {
        return false;
    }
    match key.scheme {
        SchemeId::MockDeterministic => {
            let Ok(seed): Result<[u8; 32], _> = key.bytes.as_slice().try_into() else {
                return false;
            };
            let expected = sign(&SigningKey::Mock(seed), message);
            expected.bytes == sig.bytes
        }
        SchemeId::Ed25519 => {
            let Ok(vk_bytes): Result<[u8; 32], _> = key.bytes.as_slice().try_into() else {
                return false;
            };
            let Ok(vk) = ed25519_dalek::VerifyingKey::from_bytes(&vk_bytes) else {
                return false;
            };
            let Ok(sig_bytes): Result<[u8; 64], _> = sig.bytes.as_slice().try_into() else {
                return false;
            };
            let sig = ed25519_dalek::Signature::from_bytes(&sig_bytes);
            vk.verify(message, &sig).is_ok()
        }
    }
}

/// Ordered roster of validator receipt keys; index = validator id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidatorSet {
    pub keys: Vec<VerificationKey>,
}

impl ValidatorSet {
    pub fn new(keys: Vec<VerificationKey>) -> Self {
        ValidatorSet { keys }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn key(&self, validator_id: u32) -> Option<&VerificationKey> {
        self.keys.get(validator_id as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCHEMES: [SchemeId; 2] = [SchemeId::MockDeterministic, SchemeId::Ed25519];

    #[test]
    fn round_trip_accepts() {
        for scheme in SCHEMES {
            let (sk, vk) = keypair_from_seed(scheme, &[7u8; 32]);
            let sig = sign(&sk, b"canonical message bytes");
            assert!(verify(&vk, b"canonical message bytes", &sig), "{scheme:?}");
        }
    }

    #[test]
    fn wrong_key_rejects() {
        for scheme in SCHEMES {
            let (sk, _) = keypair_from_seed(scheme, &[1u8; 32]);
            let (_, other_vk) = keypair_from_seed(scheme, &[2u8; 32]);
            let sig = sign(&sk, b"msg");
            assert!(!verify(&other_vk, b"msg", &sig), "{scheme:?}");
        }
    }

    #[test]
    fn tampered_message_rejects() {
        for scheme in SCHEMES {
            let (sk, vk) = keypair_from_seed(scheme, &[9u8; 32]);
            let sig = sign(&sk, b"msg-original");
            assert!(!verify(&vk, b"msg-tampered", &sig), "{scheme:?}");
        }
    }

    #[test]
    fn malformed_signature_bytes_return_false() {
        for scheme in SCHEMES {
            let (_, vk) = keypair_from_seed(scheme, &[3u8; 32]);
            let junk = Signature {
                scheme,
                bytes: vec![0xde, 0xad],
            };
            assert!(!verify(&vk, b"msg", &junk), "{scheme:?}");
        }
    }

    #[test]
    fn scheme_mismatch_rejects() {
        let (sk, _) = keypair_from_seed(SchemeId::MockDeterministic, &[4u8; 32]);
        let (_, vk) = keypair_from_seed(SchemeId::Ed25519, &[4u8; 32]);
        let sig = sign(&sk, b"msg");
        assert!(!verify(&vk, b"msg", &sig));
    }

    #[test]
    fn deterministic_generation() {
        for scheme in SCHEMES {
            let (_, vk1) = keypair_from_seed(scheme, &[5u8; 32]);
            let (_, vk2) = keypair_from_seed(scheme, &[5u8; 32]);
            assert_eq!(vk1, vk2);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn round_trip_and_cross_key(
                seed_a: [u8; 32],
                seed_b: [u8; 32],
                msg in proptest::collection::vec(any::<u8>(), 0..128),
            ) {
                for scheme in SCHEMES {
                    let (sk_a, vk_a) = keypair_from_seed(scheme, &seed_a);
                    let (_, vk_b) = keypair_from_seed(scheme, &seed_b);
                    let sig = sign(&sk_a, &msg);
                    prop_assert!(verify(&vk_a, &msg, &sig));
                    if seed_a != seed_b {
                        prop_assert!(!verify(&vk_b, &msg, &sig));
                    }
                }
            }

            #[test]
            fn tamper_rejects(
                seed: [u8; 32],
                msg in proptest::collection::vec(any::<u8>(), 1..128),
                idx: proptest::sample::Index,
            ) {
                for scheme in SCHEMES {
                    let (sk, vk) = keypair_from_seed(scheme, &seed);
                    let sig = sign(&sk, &msg);
                    let mut tampered = msg.clone();
                    let i = idx.index(tampered.len());
                    tampered[i] ^= 0x01;
                    prop_assert!(!verify(&vk, &tampered, &sig));
                }
            }
        }
    }
}
