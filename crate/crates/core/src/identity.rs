//! Economic identities: deterministic authentication-key derivation from a
//! root secret, the bonded registry, per-slot commitment quotas, and the
//! slashing ledger.
//!
//! The registry is a single logical state machine: one exclusive writer per
//! simulated chain mutates it, read-only snapshots may be cloned freely.
//! Conservation holds at all times: locked bonds plus cumulative slashed
//! amounts equal cumulative deposits.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::{hash, Digest, SlotNumber};
use crate::ratio::Ratio;
use crate::signatures::{keypair_from_seed, SchemeId, SigningKey, VerificationKey};

/// Integer token units. All economics are exact integer arithmetic.
pub type TokenAmount = u128;

/// 32-byte identity root secret. Application keys derive from it under
/// explicit context labels; the root itself never appears in any message.
#[derive(Clone, Copy)]
pub struct RootEntropy(pub [u8; 32]);

impl std::fmt::Debug for RootEntropy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RootEntropy(..)")
    }
}

/// Context label for ordering-protocol authentication keys.
pub const AUTH_CONTEXT: &str = "fairord/auth/v1";

#[derive(Debug, Clone)]
pub struct AuthKeyPair {
    pub signing_key: SigningKey,
    pub verification_key: VerificationKey,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DeriveError {
    #[error("derivation context must be non-empty")]
    EmptyContext,
}

/// Derives the authentication key pair for `context` from a root secret.
///
/// Seed = H(root ‖ 8-byte BE len(context) ‖ context); the same pair is
/// recomputable from the root alone, and distinct contexts yield independent
/// pairs under the hash.
pub fn derive_auth_keypair(
    root: &RootEntropy,
    context: &str,
    scheme: SchemeId,
) -> Result<AuthKeyPair, DeriveError> {
    if context.is_empty() {
        return Err(DeriveError::EmptyContext);
    }
    let mut pre = Vec::with_capacity(40 + context.len());
    pre.extend_from_slice(&root.0);
    pre.extend_from_slice(&(context.len() as u64).to_be_bytes());
    pre.extend_from_slice(context.as_bytes());
    let seed = hash(&pre);
    let (signing_key, verification_key) = keypair_from_seed(scheme, &seed.0);
    Ok(AuthKeyPair {
        signing_key,
        verification_key,
    })
}

/// Public identity commitment: the hash of the verification key bytes.
pub fn compute_idcom(verification_key: &VerificationKey) -> Digest {
    hash(&verification_key.bytes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlashReason {
    NonOpening,
    InvalidBehavior,
    ProducerInvalidBlock,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlashEvent {
    pub idcom: Digest,
    pub slot: SlotNumber,
    pub fraction: Ratio,
    /// floor(fraction × bond at the time of the slash); never exceeds the
    /// remaining bond.
    pub amount: TokenAmount,
    pub reason: SlashReason,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityRole {
    User,
    Producer,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityRecord {
    pub idcom: Digest,
    pub verification_key: VerificationKey,
    pub role: IdentityRole,
    pub bond: TokenAmount,
    pub active: bool,
    /// Commitments admitted per slot, keyed by slot number.
    pub per_slot_commit_count: BTreeMap<SlotNumber, u32>,
    pub slash_history: Vec<SlashEvent>,
}

/// Slot timing budget in abstract ticks. Components are signed so that a
/// malformed configuration can be *reported* invalid rather than being
/// unrepresentable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotBudget {
    pub commit_window: i64,
    pub vdf_window: i64,
    pub open_window: i64,
    pub margin: i64,
    pub total: i64,
}

impl SlotBudget {
    pub fn components_sum(&self) -> i64 {
        self.commit_window + self.vdf_window + self.open_window + self.margin
    }

    pub fn all_components_positive(&self) -> bool {
        self.commit_window > 0 && self.vdf_window > 0 && self.open_window > 0 && self.margin > 0
    }

    /// Tick at which the open window closes and the block is assembled.
    pub fn open_cutoff(&self) -> i64 {
        self.commit_window + self.vdf_window + self.open_window
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolParams {
    /// Byzantine fault bound f; the validator count must equal 3f+1.
    pub fault_bound: u32,
    pub validator_count: u32,
    /// Receipt thresholds; both must be at least 2f+1.
    pub commit_threshold: u32,
    pub open_threshold: u32,
    /// Maximum commitments per identity per slot.
    pub per_slot_quota: u32,
    pub user_bond: TokenAmount,
    pub producer_bond: TokenAmount,
    /// Bond fraction forfeited per unopened admissible commitment.
    pub non_opening_slash: Ratio,
    /// Producer bond fraction forfeited for an invalid block.
    pub invalid_block_slash: Ratio,
    /// Sequential step count of the delay function.
    pub vdf_delay_steps: u64,
    pub slot_budget: SlotBudget,
    /// Bit-security label; informational, carried through reports.
    pub security_bits: u32,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParamsError {
    #[error("validator count {n} is not 3f+1 for fault bound {f}")]
    ValidatorCount { n: u32, f: u32 },
    #[error("{which} threshold {q} is below 2f+1 = {min}")]
    ThresholdTooLow {
        which: &'static str,
        q: u32,
        min: u32,
    },
    #[error("{which} threshold {q} exceeds validator count {n}")]
    ThresholdTooHigh {
        which: &'static str,
        q: u32,
        n: u32,
    },
    #[error("per-slot quota must be at least 1")]
    ZeroQuota,
    #[error("vdf delay step count must be at least 1")]
    ZeroDelay,
    #[error("slot budget components must all be positive")]
    NonPositiveBudget,
    #[error("slot budget total {total} does not equal component sum {sum}")]
    BudgetMismatch { total: i64, sum: i64 },
}

impl ProtocolParams {
    pub fn quorum(&self) -> u32 {
        2 * self.fault_bound + 1
    }

    pub fn validate(&self) -> Result<(), ParamsError> {
        let f = self.fault_bound;
        let n = self.validator_count;
        if n != 3 * f + 1 {
            return Err(ParamsError::ValidatorCount { n, f });
        }
        let min = 2 * f + 1;
        for (which, q) in [
            ("commit", self.commit_threshold),
            ("open", self.open_threshold),
        ] {
            if q < min {
                return Err(ParamsError::ThresholdTooLow { which, q, min });
            }
            if q > n {
                return Err(ParamsError::ThresholdTooHigh { which, q, n });
            }
        }
        if self.per_slot_quota == 0 {
            return Err(ParamsError::ZeroQuota);
        }
        if self.vdf_delay_steps == 0 {
            return Err(ParamsError::ZeroDelay);
        }
        if !self.slot_budget.all_components_positive() {
            return Err(ParamsError::NonPositiveBudget);
        }
        let sum = self.slot_budget.components_sum();
        if self.slot_budget.total != sum {
            return Err(ParamsError::BudgetMismatch {
                total: self.slot_budget.total,
                sum,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RegistryError {
    #[error("identity {0} is already registered")]
    DuplicateIdentity(Digest),
    #[error("bond {bond} is below the required minimum {required}")]
    InsufficientBond {
        bond: TokenAmount,
        required: TokenAmount,
    },
    #[error("identity {0} is not registered")]
    NotRegistered(Digest),
    #[error("identity {0} is inactive")]
    Inactive(Digest),
    #[error("identity {idcom} exhausted its quota of {quota} commitments for slot {slot}")]
    QuotaExceeded {
        idcom: Digest,
        slot: SlotNumber,
        quota: u32,
    },
}

/// Bonded identity registry plus the cumulative slashing ledger.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Registry {
    pub identities: BTreeMap<Digest, IdentityRecord>,
    pub total_deposits: TokenAmount,
    pub total_slashed: TokenAmount,
}

impl Registry {
    pub fn new() -> Self {
        Registry::default()
    }

    /// Registers a user identity, locking its bond. The identity activates
    /// only if the bond meets the protocol minimum.
    pub fn register(
        &mut self,
        verification_key: VerificationKey,
        bond: TokenAmount,
        params: &ProtocolParams,
    ) -> Result<&IdentityRecord, RegistryError> {
        self.register_with_role(verification_key, bond, IdentityRole::User, params.user_bond)
    }

    /// Registers the block producer as a bonded identity with its own
    /// minimum; producers carry a distinct role flag but share the ledger.
    pub fn register_producer(
        &mut self,
        verification_key: VerificationKey,
        bond: TokenAmount,
        params: &ProtocolParams,
    ) -> Result<&IdentityRecord, RegistryError> {
        self.register_with_role(
            verification_key,
            bond,
            IdentityRole::Producer,
            params.producer_bond,
        )
    }

    fn register_with_role(
        &mut self,
        verification_key: VerificationKey,
        bond: TokenAmount,
        role: IdentityRole,
        required: TokenAmount,
    ) -> Result<&IdentityRecord, RegistryError> {
        if bond < required {
            return Err(RegistryError::InsufficientBond { bond, required });
        }
        let idcom = compute_idcom(&verification_key);
        if self.identities.contains_key(&idcom) {
            return Err(RegistryError::DuplicateIdentity(idcom));
        }
        self.total_deposits += bond;
        let record = IdentityRecord {
            idcom,
            verification_key,
            role,
            bond,
            active: true,
            per_slot_commit_count: BTreeMap::new(),
            slash_history: Vec::new(),
        };
        Ok(self.identities.entry(idcom).or_insert(record))
    }

    pub fn get(&self, idcom: &Digest) -> Option<&IdentityRecord> {
        self.identities.get(idcom)
    }

    pub fn is_active(&self, idcom: &Digest) -> bool {
        self.get(idcom).map(|r| r.active).unwrap_or(false)
    }

    /// Counts one commitment against the identity's quota for `slot`.
    pub fn consume_quota(
        &mut self,
        idcom: &Digest,
        slot: SlotNumber,
        params: &ProtocolParams,
    ) -> Result<u32, RegistryError> {
        let record = self
            .identities
            .get_mut(idcom)
            .ok_or(RegistryError::NotRegistered(*idcom))?;
        if !record.active {
            return Err(RegistryError::Inactive(*idcom));
        }
        let count = record.per_slot_commit_count.entry(slot).or_insert(0);
        if *count >= params.per_slot_quota {
            return Err(RegistryError::QuotaExceeded {
                idcom: *idcom,
                slot,
                quota: params.per_slot_quota,
            });
        }
        *count += 1;
        Ok(*count)
    }

    /// Slashes `fraction` of the identity's current bond, rounding down.
    /// The identity deactivates when its bond reaches zero.
    pub fn slash(
        &mut self,
        idcom: &Digest,
        fraction: Ratio,
        reason: SlashReason,
        slot: SlotNumber,
    ) -> Result<SlashEvent, RegistryError> {
        let record = self
            .identities
            .get_mut(idcom)
            .ok_or(RegistryError::NotRegistered(*idcom))?;
        let amount = fraction.mul_floor(record.bond);
        record.bond -= amount;
        if record.bond == 0 {
            record.active = false;
        }
        let event = SlashEvent {
            idcom: *idcom,
            slot,
            fraction,
            amount,
            reason,
        };
        record.slash_history.push(event.clone());
        self.total_slashed += amount;
        Ok(event)
    }

    pub fn locked_bonds(&self) -> TokenAmount {
        self.identities.values().map(|r| r.bond).sum()
    }

    /// Conservation invariant: deposits = locked bonds + slashed total.
    pub fn conservation_holds(&self) -> bool {
        self.locked_bonds() + self.total_slashed == self.total_deposits
    }

    /// Structured-text export for scenario setup and post-run audits.
    pub fn export_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("registry serializes")
    }

    pub fn import_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
