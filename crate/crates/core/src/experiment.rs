//! Object preparation shared by the CLI, tests and benches: generate,
//! align, detect rims and assemble the target density.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use nalgebra::Isometry3;

use crate::geometry::{align_to_canonical, detect_rims_from, RimDetectionParams, RimSet};
use crate::model::{
    synthetic_oracle, HeuristicParams, ObjectSpec, OracleTolerances, Region, SyntheticObject,
    SyntheticOracle, TargetDensity,
};
use crate::sampler::{
    run_chain, Bandwidth, ChainFailure, ChainHistory, KameleonConfig, SamplerConfig, TransferMode,
};
use crate::transfer::{transfer_experiment, InitSpec, TransferOptions};

/// Knobs that turn an object spec into a target density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Setup {
    pub rim: RimDetectionParams,
    pub tolerances: OracleTolerances,
    pub min_gws: f64,
    /// Margin around the cloud's bounding box for random grasps, meters.
    pub margin: f64,
    /// Move the object into its canonical frame before sampling.
    pub align: bool,
}

impl Default for Setup {
    fn default() -> Self {
        Self {
            rim: RimDetectionParams {
                radius: 0.015,
                zeta: 0.005,
            },
            tolerances: OracleTolerances::default(),
            min_gws: crate::model::DEFAULT_MIN_GWS,
            margin: 0.1,
            align: true,
        }
    }
}

impl Setup {
    pub fn with_zeta(mut self, zeta: f64) -> Self {
        self.rim.zeta = zeta;
        self
    }
}

/// Kameleon settings used by the experiments: normalized step size with a
/// fixed bandwidth of 0.5.
pub fn kameleon_preset() -> KameleonConfig {
    KameleonConfig::normalized(Bandwidth::Fixed(0.5))
}

/// An object ready for sampling.
pub struct Prepared {
    pub object: SyntheticObject,
    /// Maps the generated object's frame onto the sampling frame.
    pub alignment: Isometry3<f64>,
    pub target: TargetDensity<SyntheticOracle>,
}

impl Prepared {
    pub fn name(&self) -> String {
        self.object.name()
    }

    pub fn rims(&self) -> &RimSet {
        &self.target.rims
    }
}

pub fn prepare_spec(spec: &ObjectSpec, setup: &Setup) -> Result<Prepared> {
    prepare(SyntheticObject::generate(spec)?, setup)
}

/// Aligns `object` (if requested), detects its rims and builds the target.
pub fn prepare(object: SyntheticObject, setup: &Setup) -> Result<Prepared> {
    prepare_with_rims(object, None, setup)
}

/// Like [`prepare`], but with rims given in the generated object's frame
/// instead of detected.
pub fn prepare_with_rims(object: SyntheticObject, rims: Option<RimSet>, setup: &Setup) -> Result<Prepared> {
    let alignment = if setup.align {
        align_to_canonical(&object.cloud)?.transform
    } else {
        Isometry3::identity()
    };
    let object = object.transformed(&alignment);
    let rims = match rims {
        Some(r) if r.is_empty() => return Err(crate::error::Error::NoRims),
        Some(r) => r.transformed(&alignment),
        None => detect_rims_from(&object.cloud, &setup.rim, &object.name())?,
    };
    let oracle = synthetic_oracle(&object, setup.tolerances)?;
    let region = Region::around(&object.cloud.points, setup.margin)
        .expect("generated clouds are non-empty");
    let target = TargetDensity::new(oracle, rims, HeuristicParams::new(setup.min_gws)?, region)?;
    Ok(Prepared {
        object,
        alignment,
        target,
    })
}

/// Random-initialized run of `cfg` on `obj`.
pub fn run_random(
    obj: &Prepared,
    cfg: &SamplerConfig,
    seed: u64,
) -> std::result::Result<ChainHistory, ChainFailure> {
    run_chain(&obj.target, &InitSpec::Random, cfg, &obj.name(), seed)
}

/// Kameleon run on `obj` seeded from a donor history.
pub fn run_transfer(
    obj: &Prepared,
    donor: &ChainHistory,
    mode: TransferMode,
    cfg: &KameleonConfig,
    opts: &TransferOptions,
    seed: u64,
) -> std::result::Result<ChainHistory, ChainFailure> {
    transfer_experiment(donor, &obj.target, &obj.name(), mode, cfg, opts, seed)
}
