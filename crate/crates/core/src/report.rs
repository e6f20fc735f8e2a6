//! Per-run statistics in the layout of the published result tables.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{quat_geodesic, Grasp};
use crate::sampler::{ChainHistory, InitMode, SamplerKind, TransferMode};

/// Poses closer than this in position (m) and orientation (rad) count once.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DedupRadius {
    pub position: f64,
    pub orientation: f64,
}

impl Default for DedupRadius {
    fn default() -> Self {
        Self {
            position: 0.005,
            orientation: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub object: String,
    pub sampler: SamplerKind,
    pub label: String,
    pub burn_in: usize,
    pub init: InitMode,
    pub seed: u64,
    pub iterations: usize,
    /// Accepted feasible proposals over the sampling iterations, i.e.
    /// those after burn-in.
    pub feasible_count: usize,
    /// Same, with near-duplicate poses merged.
    pub feasible_unique: usize,
    pub acceptance_rate: f64,
    pub complete: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

/// Row label: `[burn-in,np]`, `[burn-in,p]`, `[burn-in,c]` or `[0,z]`.
pub fn run_label(h: &ChainHistory) -> String {
    let tag = match (h.meta.transfer_mode, h.meta.init) {
        (Some(TransferMode::Subsample), _) | (None, InitMode::Subsample) => "z",
        (Some(TransferMode::Chain), _) => "c",
        (None, InitMode::Chain) => "p",
        _ => "np",
    };
    format!("[{},{}]", h.meta.burn_in(), tag)
}

/// Accepted feasible poses from iterations after burn-in. The initial state
/// never counts.
pub fn feasible_grasps(h: &ChainHistory) -> Vec<Grasp> {
    let burn_in = h.meta.burn_in();
    h.records
        .iter()
        .filter(|r| r.iter > burn_in && r.iter > 0)
        .filter(|r| r.accepted && r.feasible)
        .map(|r| r.proposal)
        .collect()
}

/// Greedy representatives: a pose is kept unless a kept pose lies within
/// both radii.
pub fn dedup_grasps(grasps: &[Grasp], radius: &DedupRadius) -> Vec<Grasp> {
    let mut kept: Vec<Grasp> = Vec::new();
    for g in grasps {
        let dup = kept.iter().any(|k| {
            (k.position - g.position).norm() <= radius.position
                && quat_geodesic(&k.orientation, &g.orientation)
                    .map(|a| a <= radius.orientation)
                    .unwrap_or(false)
        });
        if !dup {
            kept.push(*g);
        }
    }
    kept
}

pub fn run_report(h: &ChainHistory, radius: &DedupRadius) -> RunReport {
    let iterations = h.records.len().saturating_sub(1);
    let accepted = h.records.iter().skip(1).filter(|r| r.accepted).count();
    let feasible = feasible_grasps(h);
    RunReport {
        object: h.meta.object.clone(),
        sampler: h.meta.sampler,
        label: run_label(h),
        burn_in: h.meta.burn_in(),
        init: h.meta.init,
        seed: h.meta.seed,
        iterations,
        feasible_count: feasible.len(),
        feasible_unique: dedup_grasps(&feasible, radius).len(),
        acceptance_rate: if iterations == 0 {
            0.0
        } else {
            accepted as f64 / iterations as f64
        },
        complete: h.is_complete(),
        wall_time_s: None,
    }
}

/// Reports for several histories; all must share one format version.
pub fn reports(histories: &[ChainHistory], radius: &DedupRadius) -> Result<Vec<RunReport>> {
    if let Some(first) = histories.first() {
        if let Some(h) = histories.iter().find(|h| h.meta.version != first.meta.version) {
            return Err(Error::IncompatibleVersion(format!(
                "{} has version {}, {} has version {}",
                first.meta.object, first.meta.version, h.meta.object, h.meta.version
            )));
        }
    }
    Ok(histories.iter().map(|h| run_report(h, radius)).collect())
}

pub fn write_csv<W: Write>(rows: &[RunReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::BadConfig(e.to_string()))
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<RunReport>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(csv_err))
        .collect()
}

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    Error::Parse {
        path: "<csv>".into(),
        line,
        msg: e.to_string(),
    }
}

/// Accepted feasible poses as `iter,x,y,z,qw,qx,qy,qz,measure` rows.
pub fn scatter_csv(h: &ChainHistory) -> String {
    let mut s = String::from("iter,x,y,z,qw,qx,qy,qz,measure\n");
    for r in h.records.iter().skip(1).filter(|r| r.accepted && r.feasible) {
        let g = r.proposal.to_array();
        s.push_str(&r.iter.to_string());
        for v in g {
            s.push(',');
            s.push_str(&v.to_string());
        }
        s.push(',');
        s.push_str(&r.measure.to_string());
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::{ChainRecord, HistoryMeta, KameleonConfig, SamplerConfig};
    use nalgebra::{UnitQuaternion, Vector3};

    fn rec(iter: usize, x: f64, accepted: bool, feasible: bool) -> ChainRecord {
        ChainRecord {
            iter,
            proposal: Grasp::identity_at(Vector3::new(x, 0.0, 0.0)),
            measure: 0.5,
            feasible,
            accepted,
            temperature: 1.0,
        }
    }

    fn history_with_burn_in(burn_in: usize) -> ChainHistory {
        let cfg = SamplerConfig::Kameleon(KameleonConfig {
            burn_in,
            ..KameleonConfig::default()
        });
        ChainHistory {
            meta: HistoryMeta::new("plate", 3, &cfg),
            records: vec![
                rec(0, 0.0, true, true),
                rec(1, 0.0, true, true),
                rec(2, 0.001, true, true),
                rec(3, 0.1, false, true),
                rec(4, 0.2, true, false),
                rec(5, 0.3, true, true),
            ],
        }
    }

    fn history() -> ChainHistory {
        history_with_burn_in(0)
    }

    #[test]
    fn counts_skip_initial_state() {
        let r = run_report(&history(), &DedupRadius::default());
        assert_eq!(r.iterations, 5);
        assert_eq!(r.feasible_count, 3);
        assert_eq!(r.feasible_unique, 2);
        assert_eq!(r.acceptance_rate, 0.8);
        assert_eq!(r.label, "[0,np]");
    }

    #[test]
    fn counts_skip_burn_in() {
        let r = run_report(&history_with_burn_in(1), &DedupRadius::default());
        assert_eq!(r.feasible_count, 2);
        assert_eq!(r.feasible_unique, 2);
        assert_eq!(r.label, "[1,np]");
        let all = run_report(&history_with_burn_in(1000), &DedupRadius::default());
        assert_eq!(all.feasible_count, 0);
    }

    #[test]
    fn dedup_needs_both_radii() {
        let a = Grasp::identity_at(Vector3::zeros());
        let b = Grasp::new(Vector3::zeros(), UnitQuaternion::from_euler_angles(0.5, 0.0, 0.0));
        assert_eq!(dedup_grasps(&[a, b], &DedupRadius::default()).len(), 2);
        assert_eq!(dedup_grasps(&[a, a], &DedupRadius::default()).len(), 1);
    }

    #[test]
    fn csv_round_trip() {
        let mut r = run_report(&history(), &DedupRadius::default());
        r.object = "pan, large".into();
        r.acceptance_rate = 0.1 + 0.2;
        let mut buf = Vec::new();
        write_csv(&[r.clone()], &mut buf).unwrap();
        assert_eq!(read_csv(buf.as_slice()).unwrap(), vec![r]);
    }

    #[test]
    fn mixed_versions_rejected() {
        let a = history();
        let mut b = history();
        b.meta.version = 2;
        assert!(matches!(
            reports(&[a, b], &DedupRadius::default()),
            Err(Error::IncompatibleVersion(_))
        ));
    }
}
