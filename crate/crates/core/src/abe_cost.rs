//! Share and pairing counts, and a linear timing model for KP-ABE.
//!
//! No cryptography happens here. Key generation produces one secret share
//! per leaf of the policy formula and decryption spends one pairing per
//! share, so both costs are modeled as a constant time per share.

use alloc::collections::BTreeMap;

use crate::formula::{Attribute, Formula};

/// Shares handed out for a policy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShareCount {
    /// Total shares, equal to the formula's literal count.
    pub total: usize,
    /// Shares received by each attribute.
    pub per_attribute: BTreeMap<Attribute, usize>,
}

/// Counts the secret shares of `f`: one per leaf.
pub fn share_count(f: &Formula) -> ShareCount {
    ShareCount {
        total: f.cost(),
        per_attribute: f.occurrences(),
    }
}

/// Which policy key generation is charged for.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum KeygenBasis {
    /// Shares of the policy as written; the optimizer only adds its own time.
    #[default]
    Original,
    /// Shares of the optimized policy.
    Optimized,
}

/// Per-share timing constants, in milliseconds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostModel {
    /// One pairing during decryption.
    pub pairing_ms: f64,
    /// Generating one share during key generation.
    pub share_gen_ms: f64,
    /// Share count used for key generation.
    pub keygen_basis: KeygenBasis,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            pairing_ms: 1.3,
            share_gen_ms: 1.3,
            keygen_basis: KeygenBasis::Original,
        }
    }
}

impl CostModel {
    /// Modeled decryption time for `shares` shares.
    pub fn decrypt_ms(&self, shares: usize) -> f64 {
        self.pairing_ms * shares as f64
    }

    /// Modeled key generation time: share generation plus the measured
    /// optimizer time.
    pub fn keygen_ms(&self, shares: usize, optimizer_ms: f64) -> f64 {
        self.share_gen_ms * shares as f64 + optimizer_ms
    }

    /// Builds a pipeline record from share counts and optimizer time.
    pub fn record(&self, orig_shares: usize, opt_shares: usize, optimizer_ms: f64) -> PipelineRecord {
        PipelineRecord {
            orig_shares,
            opt_shares,
            keygen_ms: self.keygen_ms(
                match self.keygen_basis {
                    KeygenBasis::Original => orig_shares,
                    KeygenBasis::Optimized => opt_shares,
                },
                optimizer_ms,
            ),
            decrypt_ms: self.decrypt_ms(opt_shares),
            optimizer_ms,
        }
    }
}

/// Modeled cost of issuing and using one key.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PipelineRecord {
    /// Shares of the policy as written.
    pub orig_shares: usize,
    /// Shares after optimization.
    pub opt_shares: usize,
    /// Key generation time including optimization.
    pub keygen_ms: f64,
    /// Decryption time.
    pub decrypt_ms: f64,
    /// Wall time of the optimizer alone.
    pub optimizer_ms: f64,
}
