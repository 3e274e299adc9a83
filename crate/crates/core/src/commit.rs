//! Commit phase: user-side commitment creation, validator-side admission
//! checks with receipt issuance, and threshold certificate aggregation.
//!
//! A commitment becomes *admissible* once it gathers receipts from at least
//! `commit_threshold` distinct validators before the commit cutoff. The
//! validator checks run in a fixed order — registration, signature, quota,
//! cutoff — so that failure causes are deterministic and assertable.

use std::collections::BTreeMap;

use rand::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::{
    commitment_hash, encode_message, hex_array, CanonicalMessage, Digest, DomainTag, SlotNumber,
};
use crate::identity::{ProtocolParams, Registry, RegistryError};
use crate::signatures::{sign, verify, Signature, SigningKey, ValidatorSet};

/// A signed commitment tuple as broadcast by a user.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Commitment {
    pub idcom: Digest,
    pub commitment: Digest,
    pub slot: SlotNumber,
    pub user_sig: Signature,
}

impl Commitment {
    pub fn message(&self) -> CanonicalMessage {
        CanonicalMessage {
            domain_tag: DomainTag::Commit,
            idcom: self.idcom,
            commitment: self.commitment,
            slot: self.slot,
        }
    }
}

/// The secret side of a commitment, retained locally by its creator until
/// the open phase.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpeningSecret {
    #[serde(with = "crate::codec::hex_bytes")]
    pub tx: Vec<u8>,
    #[serde(with = "hex_array")]
    pub nonce: [u8; 32],
    pub idcom: Digest,
    pub slot: SlotNumber,
}

impl OpeningSecret {
    pub fn commitment_hash(&self) -> Digest {
        commitment_hash(&self.tx, &self.nonce, &self.idcom, self.slot)
    }
}

/// A single validator's receipt over the canonical commit message.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitReceipt {
    pub validator_id: u32,
    pub sig: Signature,
}

/// A commitment plus receipts from at least `commit_threshold` distinct
/// validators. Receipts are keyed by validator id, so duplicates are
/// impossible by construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitCertificate {
    pub commitment: Commitment,
    pub receipts: BTreeMap<u32, Signature>,
}

impl CommitCertificate {
    pub fn idcom(&self) -> Digest {
        self.commitment.idcom
    }

    pub fn commitment_digest(&self) -> Digest {
        self.commitment.commitment
    }

    pub fn slot(&self) -> SlotNumber {
        self.commitment.slot
    }

    /// Injective encoding of the full certificate (commitment fields plus
    /// the sorted receipt list). Used as the Merkle leaf for the
    /// admissible-set root, so the root binds the receipt evidence too.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&encode_message(&self.commitment.message()));
        out.extend_from_slice(&self.commitment.user_sig.canonical_bytes());
        out.extend_from_slice(&(self.receipts.len() as u32).to_be_bytes());
        for (validator_id, sig) in &self.receipts {
            out.extend_from_slice(&validator_id.to_be_bytes());
            out.extend_from_slice(&sig.canonical_bytes());
        }
        out
    }

    /// Receipt-level validity: at least `commit_threshold` receipts, each
    /// verifying under the matching validator key. This is the portable
    /// check omission proofs rely on; it needs no registry access.
    pub fn receipts_valid(&self, validators: &ValidatorSet, params: &ProtocolParams) -> bool {
        let msg = encode_message(&self.commitment.message());
        let valid = self
            .receipts
            .iter()
            .filter(|(id, sig)| {
                validators
                    .key(**id)
                    .map(|vk| verify(vk, &msg, sig))
                    .unwrap_or(false)
            })
            .count();
        valid >= params.commit_threshold as usize
    }

    /// Full admissibility recheck against a registry snapshot: identity
    /// registered with a key hashing to `idcom`, user signature valid, and
    /// the receipt threshold met.
    pub fn verify(
        &self,
        registry: &Registry,
        validators: &ValidatorSet,
        params: &ProtocolParams,
    ) -> bool {
        let Some(record) = registry.get(&self.commitment.idcom) else {
            return false;
        };
        let msg = encode_message(&self.commitment.message());
        verify(&record.verification_key, &msg, &self.commitment.user_sig)
            && self.receipts_valid(validators, params)
    }
}

/// Creates a commitment for `tx` at `slot`, returning the signed public
/// tuple and the locally retained opening secret.
pub fn make_commitment<R: RngCore>(
    signing_key: &SigningKey,
    idcom: Digest,
    tx: Vec<u8>,
    slot: SlotNumber,
    nonce_source: &mut R,
) -> (Commitment, OpeningSecret) {
    let mut nonce = [0u8; 32];
    nonce_source.fill_bytes(&mut nonce);
    let digest = commitment_hash(&tx, &nonce, &idcom, slot);
    let msg = CanonicalMessage {
        domain_tag: DomainTag::Commit,
        idcom,
        commitment: digest,
        slot,
    };
    let user_sig = sign(signing_key, &encode_message(&msg));
    (
        Commitment {
            idcom,
            commitment: digest,
            slot,
            user_sig,
        },
        OpeningSecret {
            tx,
            nonce,
            idcom,
            slot,
        },
    )
}

/// Admission failure causes, in check order.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum AdmissionError {
    #[error("identity is not registered or inactive")]
    NotRegistered,
    #[error("commitment signature does not verify under the registered key")]
    BadSignature,
    #[error("per-slot commitment quota exhausted")]
    QuotaExceeded,
    #[error("commit window closed at tick {cutoff}, received at {now}")]
    PastCutoff { now: i64, cutoff: i64 },
}

/// Validator-side admission check over a registry snapshot and clock
/// reading. Checks run in a fixed order: (1) registration and activity,
/// (2) user signature, (3) quota (consumed on success against the
/// validator's local view), (4) commit cutoff (strict: `now < cutoff`
/// admits). On success the validator signs and returns a receipt.
pub fn validator_check_commitment(
    registry: &mut Registry,
    commitment: &Commitment,
    now: i64,
    params: &ProtocolParams,
    validator_id: u32,
    validator_key: &SigningKey,
) -> Result<CommitReceipt, AdmissionError> {
    let record = registry
        .get(&commitment.idcom)
        .filter(|r| r.active)
        .ok_or(AdmissionError::NotRegistered)?;

    let msg = encode_message(&commitment.message());
    if !verify(&record.verification_key, &msg, &commitment.user_sig) {
        return Err(AdmissionError::BadSignature);
    }

    // Quota is probed read-only here to keep the error precedence fixed;
    // it is consumed only once every check has passed.
    let used = record
        .per_slot_commit_count
        .get(&commitment.slot)
        .copied()
        .unwrap_or(0);
    if used >= params.per_slot_quota {
        return Err(AdmissionError::QuotaExceeded);
    }

    let cutoff = params.slot_budget.commit_window;
    if now >= cutoff {
        return Err(AdmissionError::PastCutoff { now, cutoff });
    }

    match registry.consume_quota(&commitment.idcom, commitment.slot, params) {
        Ok(_) => {}
        Err(RegistryError::QuotaExceeded { .. }) => return Err(AdmissionError::QuotaExceeded),
        Err(_) => return Err(AdmissionError::NotRegistered),
    }

    Ok(CommitReceipt {
        validator_id,
        sig: sign(validator_key, &msg),
    })
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AggregateError {
    #[error("only {valid} distinct valid receipts, need {required}")]
    InsufficientReceipts { valid: usize, required: usize },
}

/// Aggregates receipts into a certificate. Non-verifying receipts are
/// dropped rather than poisoning the bundle; duplicates by validator id
/// count once. Succeeds iff the surviving receipts meet the threshold.
pub fn aggregate_commit_certificate(
    commitment: Commitment,
    receipts: Vec<CommitReceipt>,
    validators: &ValidatorSet,
    params: &ProtocolParams,
) -> Result<CommitCertificate, AggregateError> {
    let msg = encode_message(&commitment.message());
    let kept = dedup_valid_receipts(receipts.into_iter().map(|r| (r.validator_id, r.sig)), &msg, validators);
    let required = params.commit_threshold as usize;
    if kept.len() < required {
        return Err(AggregateError::InsufficientReceipts {
            valid: kept.len(),
            required,
        });
    }
    Ok(CommitCertificate {
        commitment,
        receipts: kept,
    })
}

/// Shared receipt filter: keeps one verifying signature per validator id.
pub(crate) fn dedup_valid_receipts(
    receipts: impl Iterator<Item = (u32, Signature)>,
    msg: &[u8],
    validators: &ValidatorSet,
) -> BTreeMap<u32, Signature> {
    let mut kept = BTreeMap::new();
    for (validator_id, sig) in receipts {
        if kept.contains_key(&validator_id) {
            continue;
        }
        let Some(vk) = validators.key(validator_id) else {
            continue;
        };
        if verify(vk, msg, &sig) {
            kept.insert(validator_id, sig);
        }
    }
    kept
}
