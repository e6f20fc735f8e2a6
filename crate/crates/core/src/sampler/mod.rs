//! Random-walk and kernel-adaptive Metropolis-Hastings chains with annealed
//! acceptance.

mod accept;
mod config;
mod history;
pub mod io;
mod kameleon;
mod run;
mod rw;
mod schedule;
mod vmf;

pub use accept::{accept_log, log_acceptance, mh_accept, AnnealingMode};
pub use config::{Bandwidth, EtaRule, KameleonConfig, RwConfig, SamplerConfig, SamplerKind};
pub use history::{
    ChainHistory, ChainRecord, Evaluation, HistoryMeta, InitMode, RunStatus, Target, TransferMode,
    HISTORY_VERSION,
};
pub use kameleon::{
    draw_subsample, kameleon_step, local_gaussian, propose_with_subsample, KameleonProposal,
    LocalGaussian,
};
pub use run::{chain_rng, run_chain, run_chains, ChainFailure, ChainRng, KameleonChain, RwChain};
pub use rw::rw_step;
pub use schedule::{temperature, AnnealingSchedule};
pub use vmf::sample_vmf;
