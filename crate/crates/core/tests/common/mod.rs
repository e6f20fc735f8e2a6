#![allow(dead_code)]

use graspmc_core::experiment::{kameleon_preset, prepare_spec, Prepared, Setup};
use graspmc_core::geometry::{Grasp, State};
use graspmc_core::kernel::{gauss_kernel, gradient_matrix, KernelConfig, Matrix7, Subsample};
use graspmc_core::model::ObjectKind;
use graspmc_core::sampler::{Evaluation, KameleonConfig, Target};
use graspmc_core::ObjectSpec;
use nalgebra::Vector3;
use rand::{Rng, RngCore};
use rand_distr::StandardNormal;

/// Standard normal over `x, y`; every other coordinate is ignored.
pub struct Gaussian2;

impl Target for Gaussian2 {
    fn evaluate(&self, g: &Grasp) -> graspmc_core::Result<Evaluation> {
        let p = g.position;
        Ok(Evaluation {
            measure: (-0.5 * (p.x * p.x + p.y * p.y)).exp(),
            feasible: true,
        })
    }

    fn random_grasp(&self, rng: &mut dyn RngCore) -> Grasp {
        Grasp::identity_at(Vector3::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            0.0,
        ))
    }
}

/// Frozen, non-annealed Kameleon moving only `x, y`.
pub fn gaussian_config(n_iters: usize) -> KameleonConfig {
    KameleonConfig {
        n_iters,
        burn_in: 0,
        gamma: 0.8,
        nu: 1.0,
        eta: 1.0,
        bandwidth: graspmc_core::sampler::Bandwidth::Fixed(1.0),
        active: [true, true, false, false, false, false, false],
        t0: 1.0,
        tn: 1.0,
        ..KameleonConfig::default()
    }
}

pub fn gaussian_subsample<R: Rng>(n: usize, rng: &mut R) -> Subsample {
    Subsample(
        (0..n)
            .map(|_| {
                let mut s = Grasp::identity_at(Vector3::zeros()).to_state();
                s[0] = rng.sample(StandardNormal);
                s[1] = rng.sample(StandardNormal);
                s
            })
            .collect(),
    )
}

pub fn random_state<R: Rng>(rng: &mut R, scale: f64) -> State {
    State::from_fn(|_, _| rng.random_range(-scale..scale))
}

/// `exp(-sum_i (w_i (x_i - y_i))^2 / (2 sigma^2))` written out term by term.
pub fn kernel_by_hand(x: &State, y: &State, cfg: &KernelConfig) -> f64 {
    let mut s = 0.0;
    for i in 0..7 {
        let d = cfg.weights[i] * (x[i] - y[i]);
        s += d * d;
    }
    (-s / (2.0 * cfg.sigma * cfg.sigma)).exp()
}

/// Central finite-difference gradient of the kernel in its first argument.
pub fn fd_gradient(x: &State, z: &State, cfg: &KernelConfig, h: f64) -> State {
    State::from_fn(|i, _| {
        let mut a = *x;
        let mut b = *x;
        a[i] += h;
        b[i] -= h;
        (gauss_kernel(&a, z, cfg) - gauss_kernel(&b, z, cfg)) / (2.0 * h)
    })
}

/// `gamma^2 I + nu^2 M H M^T` with `H` built explicitly and every product
/// done with plain loops.
pub fn naive_covariance(z: &Subsample, y: &State, gamma: f64, nu: f64, cfg: &KernelConfig) -> Matrix7 {
    let n = z.len();
    let mut out = Matrix7::identity() * (gamma * gamma);
    if n == 0 {
        return out;
    }
    let m = gradient_matrix(z, y, cfg);
    let h = |i: usize, j: usize| (if i == j { 1.0 } else { 0.0 }) - 1.0 / n as f64;
    let mut mh = vec![[0.0; 7]; n];
    for (j, col) in mh.iter_mut().enumerate() {
        for (a, v) in col.iter_mut().enumerate() {
            for i in 0..n {
                *v += m[(a, i)] * h(i, j);
            }
        }
    }
    for a in 0..7 {
        for b in 0..7 {
            let mut s = 0.0;
            for (j, col) in mh.iter().enumerate() {
                s += col[a] * m[(b, j)];
            }
            out[(a, b)] += nu * nu * s;
        }
    }
    out
}

/// Modified Bessel function of the first kind, integer order, by series.
pub fn bessel_i(order: u32, x: f64) -> f64 {
    let half = x / 2.0;
    let mut term = half.powi(order as i32) / (1..=order).map(f64::from).product::<f64>();
    let mut sum = term;
    for k in 1..200 {
        term *= half * half / (k as f64 * (k + order) as f64);
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

/// Mean resultant length of a von Mises-Fisher law on S^3.
pub fn vmf_mean_resultant(kappa: f64) -> f64 {
    bessel_i(2, kappa) / bessel_i(1, kappa)
}

pub const PLATE_RADIUS: f64 = 0.12;
pub const PLATE_POINTS: usize = 2000;

/// Thresholds for the 2000-point plate: neighborhood radius and zeta.
pub const DISC_RIM_RADIUS: f64 = 0.015;
pub const DISC_RIM_ZETA: f64 = 3e-3;

pub fn plate(radius: f64, seed: u64) -> Prepared {
    prepare_spec(&ObjectSpec::new(ObjectKind::Plate, radius, PLATE_POINTS, seed), &Setup::default())
        .expect("plate prepares")
}

/// Tall mug-like object with a handle; a poor match for any plate.
pub fn pitcher() -> Prepared {
    let spec = ObjectSpec::new(ObjectKind::PitcherAnalog, 0.07, 3000, 9).with_height(0.25);
    prepare_spec(&spec, &Setup::default().with_zeta(1e-3)).expect("pitcher prepares")
}

pub fn preset(burn_in: usize) -> KameleonConfig {
    KameleonConfig {
        burn_in,
        ..kameleon_preset()
    }
}
