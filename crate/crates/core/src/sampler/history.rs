use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::config::{SamplerConfig, SamplerKind};
use crate::error::Result;
use crate::geometry::{Grasp, State};
use crate::kernel::Subsample;

/// Target density value at a grasp and whether the grasp is feasible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub measure: f64,
    pub feasible: bool,
}

/// Unnormalized target density over grasps.
///
/// Implementations must be deterministic and safe to share between threads.
pub trait Target: Sync {
    fn evaluate(&self, g: &Grasp) -> Result<Evaluation>;

    /// A uniformly random grasp from the region the target is defined over,
    /// used for random initial chains.
    fn random_grasp(&self, rng: &mut dyn RngCore) -> Grasp;
}

impl<T: Target + ?Sized> Target for &T {
    fn evaluate(&self, g: &Grasp) -> Result<Evaluation> {
        (**self).evaluate(g)
    }

    fn random_grasp(&self, rng: &mut dyn RngCore) -> Grasp {
        (**self).random_grasp(rng)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainRecord {
    pub iter: usize,
    pub proposal: Grasp,
    pub measure: f64,
    pub feasible: bool,
    pub accepted: bool,
    pub temperature: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitMode {
    #[default]
    Random,
    Explicit,
    Chain,
    Subsample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransferMode {
    Chain,
    Subsample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    #[default]
    Complete,
    Aborted,
}

/// First line of a history file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryMeta {
    pub version: u32,
    pub object: String,
    pub seed: u64,
    pub sampler: SamplerKind,
    pub params: serde_json::Value,
    #[serde(default)]
    pub init: InitMode,
    #[serde(default)]
    pub donor: Option<String>,
    #[serde(default)]
    pub transfer_mode: Option<TransferMode>,
    #[serde(default)]
    pub frozen_subsample: Option<Vec<[f64; 7]>>,
    #[serde(default)]
    pub status: RunStatus,
}

pub const HISTORY_VERSION: u32 = 1;

impl HistoryMeta {
    pub fn new(object: impl Into<String>, seed: u64, config: &SamplerConfig) -> Self {
        Self {
            version: HISTORY_VERSION,
            object: object.into(),
            seed,
            sampler: config.kind(),
            params: config.to_params(),
            init: InitMode::Random,
            donor: None,
            transfer_mode: None,
            frozen_subsample: None,
            status: RunStatus::Complete,
        }
    }

    pub fn config(&self) -> Result<SamplerConfig> {
        SamplerConfig::from_params(self.sampler, &self.params)
    }

    pub fn burn_in(&self) -> usize {
        self.config().map(|c| c.burn_in()).unwrap_or(0)
    }

    pub fn frozen(&self) -> Option<Subsample> {
        self.frozen_subsample
            .as_ref()
            .map(|z| Subsample(z.iter().map(|s| State::from_column_slice(s)).collect()))
    }
}

/// Ordered record of one chain run.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainHistory {
    pub meta: HistoryMeta,
    pub records: Vec<ChainRecord>,
}

impl ChainHistory {
    pub fn accepted(&self) -> impl Iterator<Item = &ChainRecord> {
        self.records.iter().filter(|r| r.accepted)
    }

    pub fn accepted_states(&self) -> Vec<State> {
        self.accepted().map(|r| r.proposal.to_state()).collect()
    }

    pub fn proposal_states(&self) -> Vec<State> {
        self.records.iter().map(|r| r.proposal.to_state()).collect()
    }

    /// The chain state after every record (the last accepted proposal).
    pub fn chain_states(&self) -> Vec<Grasp> {
        let mut out = Vec::with_capacity(self.records.len());
        let mut current = None;
        for r in &self.records {
            if r.accepted {
                current = Some(r.proposal);
            }
            if let Some(g) = current {
                out.push(g);
            }
        }
        out
    }

    pub fn is_complete(&self) -> bool {
        self.meta.status == RunStatus::Complete
    }
}
