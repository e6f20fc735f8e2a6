//! Gaussian-kernel machinery behind the kernel-adaptive proposal.
//!
//! The proposal covariance at a state `y` given a subsample `z` is
//! `gamma^2 I + nu^2 M H M^T`, where column `i` of `M` is
//! `2 eta grad_x k(x, z_i)` evaluated at `x = y` and `H` is the centering
//! matrix. Only the product `nu * eta` affects the result.

use nalgebra::{Cholesky, DMatrix, Dyn, Matrix, OMatrix, SMatrix, VecStorage, U7};

use crate::error::{Error, Result};
use crate::geometry::State;

pub type Matrix7 = SMatrix<f64, 7, 7>;
pub type GradientMatrix = OMatrix<f64, U7, Dyn>;

/// Bandwidth and gradient step size of the Gaussian kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConfig {
    pub sigma: f64,
    pub eta: f64,
    /// Per-coordinate scaling applied to differences before the norm.
    pub weights: State,
}

impl KernelConfig {
    pub fn new(sigma: f64, eta: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::BadParams(format!("kernel sigma {sigma} must be > 0")));
        }
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::BadParams(format!("kernel eta {eta} must be > 0")));
        }
        Ok(Self {
            sigma,
            eta,
            weights: State::repeat(1.0),
        })
    }

    pub fn with_weights(mut self, weights: State) -> Self {
        self.weights = weights;
        self
    }

    fn weighted_sq_dist(&self, x: &State, y: &State) -> f64 {
        (x - y).component_mul(&self.weights).norm_squared()
    }
}

/// Ordered subsample of chain states the proposal adapts to.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Subsample(pub Vec<State>);

impl Subsample {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn states(&self) -> &[State] {
        &self.0
    }

    /// Median pairwise (weighted) distance, or `None` for fewer than two
    /// states or an all-identical subsample.
    pub fn median_distance(&self, weights: &State) -> Option<f64> {
        let z = &self.0;
        let mut d: Vec<f64> = Vec::with_capacity(z.len() * z.len().saturating_sub(1) / 2);
        for i in 0..z.len() {
            for j in i + 1..z.len() {
                d.push((z[i] - z[j]).component_mul(weights).norm());
            }
        }
        if d.is_empty() {
            return None;
        }
        let mid = d.len() / 2;
        let odd = d.len() % 2 == 1;
        let (lower, &mut upper, _) = d.select_nth_unstable_by(mid, f64::total_cmp);
        let median = if odd {
            upper
        } else {
            let below = lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            0.5 * (below + upper)
        };
        (median > 0.0).then_some(median)
    }
}

/// `exp(-||x - y||^2 / (2 sigma^2))`.
pub fn gauss_kernel(x: &State, y: &State, cfg: &KernelConfig) -> f64 {
    (-cfg.weighted_sq_dist(x, y) / (2.0 * cfg.sigma * cfg.sigma)).exp()
}

/// Gradient of [`gauss_kernel`] in its first argument.
pub fn kernel_gradient(x: &State, z: &State, cfg: &KernelConfig) -> State {
    let w2 = cfg.weights.component_mul(&cfg.weights);
    let k = gauss_kernel(x, z, cfg);
    -(x - z).component_mul(&w2) * (k / (cfg.sigma * cfg.sigma))
}

pub fn gradient_matrix(z: &Subsample, y: &State, cfg: &KernelConfig) -> GradientMatrix {
    let mut m = GradientMatrix::zeros(z.len());
    for (i, zi) in z.states().iter().enumerate() {
        m.set_column(i, &(kernel_gradient(y, zi, cfg) * (2.0 * cfg.eta)));
    }
    m
}

/// `I - (1/n) 1 1^T`.
pub fn centering_matrix(n: usize) -> Result<DMatrix<f64>> {
    if n == 0 {
        return Err(Error::EmptyCentering);
    }
    let inv = 1.0 / n as f64;
    Ok(DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            1.0 - inv
        } else {
            -inv
        }
    }))
}

/// Symmetric positive-definite proposal covariance with its Cholesky factor.
#[derive(Debug, Clone)]
pub struct ProposalCovariance {
    matrix: Matrix7,
}

impl ProposalCovariance {
    pub fn matrix(&self) -> &Matrix7 {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix7 {
        self.matrix
    }
}

/// `gamma^2 I + nu^2 M H M^T`, symmetrized.
pub fn proposal_covariance(
    z: &Subsample,
    y: &State,
    gamma: f64,
    nu: f64,
    cfg: &KernelConfig,
) -> Result<ProposalCovariance> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::BadGamma(gamma));
    }
    let mut cov = Matrix7::identity() * (gamma * gamma);
    if !z.is_empty() {
        // M H M^T = (M H)(M H)^T since H is symmetric and idempotent; M H is
        // M with its mean column subtracted.
        let mut m = gradient_matrix(z, y, cfg);
        let mean = m.column_mean();
        for mut col in m.column_iter_mut() {
            col -= &mean;
        }
        cov += (&m * m.transpose()) * (nu * nu);
    }
    let sym = (cov + cov.transpose()) * 0.5;
    Ok(ProposalCovariance { matrix: sym })
}

/// Lower Cholesky factor of an SPD matrix, flooring eigenvalues at `floor`
/// when rounding has made the matrix numerically indefinite.
pub(crate) fn robust_cholesky(
    a: &DMatrix<f64>,
    floor: f64,
) -> Matrix<f64, Dyn, Dyn, VecStorage<f64, Dyn, Dyn>> {
    if let Some(ch) = Cholesky::new(a.clone()) {
        return ch.l();
    }
    let mut eig = a.clone().symmetric_eigen();
    for v in eig.eigenvalues.iter_mut() {
        *v = v.max(floor);
    }
    let repaired = eig.recompose();
    let repaired = (&repaired + repaired.transpose()) * 0.5;
    Cholesky::new(repaired)
        .expect("eigenvalue-floored matrix is positive definite")
        .l()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(rng: &mut impl Rng) -> State {
        State::from_fn(|_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn kernel_values() {
        let cfg = KernelConfig::new(0.7, 1.0).unwrap();
        let x = State::from_element(0.3);
        assert_eq!(gauss_kernel(&x, &x, &cfg), 1.0);
        let mut y = x;
        y[2] += 0.7;
        // exp(-1/2) to 17 digits
        assert!((gauss_kernel(&x, &y, &cfg) - 0.606_530_659_712_633_4).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let (a, b) = (random_state(&mut rng), random_state(&mut rng));
            assert_eq!(gauss_kernel(&a, &b, &cfg), gauss_kernel(&b, &a, &cfg));
        }
    }

    #[test]
    fn gradient_closed_form() {
        let cfg = KernelConfig::new(1.0, 1.0).unwrap();
        let mut x = State::zeros();
        x[0] = 1.0;
        let g = kernel_gradient(&x, &State::zeros(), &cfg);
        assert!((g[0] + 0.606_530_659_712_633_4).abs() < 1e-15);
        assert!(g.iter().skip(1).all(|v| *v == 0.0));
        assert_eq!(kernel_gradient(&x, &x, &cfg), State::zeros());
    }

    #[test]
    fn gradient_matrix_shapes_and_linearity() {
        let cfg = KernelConfig::new(0.5, 1.0).unwrap();
        let y = State::from_element(0.1);
        let m = gradient_matrix(&Subsample(vec![y]), &y, &cfg);
        assert_eq!(m.ncols(), 1);
        assert!(m.iter().all(|v| *v == 0.0));
        assert_eq!(gradient_matrix(&Subsample::default(), &y, &cfg).ncols(), 0);

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let z = Subsample((0..5).map(|_| random_state(&mut rng)).collect());
        let cfg2 = KernelConfig { eta: 2.0, ..cfg };
        let m1 = gradient_matrix(&z, &y, &cfg);
        let m2 = gradient_matrix(&z, &y, &cfg2);
        assert!((m2 - m1 * 2.0).abs().max() < 1e-15);
    }

    #[test]
    fn centering_identities() {
        assert!(matches!(centering_matrix(0), Err(Error::EmptyCentering)));
        assert_eq!(centering_matrix(1).unwrap()[(0, 0)], 0.0);
        let h2 = centering_matrix(2).unwrap();
        assert_eq!(h2, DMatrix::from_row_slice(2, 2, &[0.5, -0.5, -0.5, 0.5]));
        let h = centering_matrix(200).unwrap();
        let ones = nalgebra::DVector::from_element(200, 1.0);
        assert!((&h * ones).amax() < 1e-12);
        assert!((&h * &h - &h).amax() < 1e-12);
        assert_eq!(h, h.transpose());
    }

    #[test]
    fn covariance_special_cases() {
        let cfg = KernelConfig::new(1.0, 1.0).unwrap();
        let y = State::from_element(0.2);
        let gamma = 1e-4;
        let empty = proposal_covariance(&Subsample::default(), &y, gamma, 1.0, &cfg).unwrap();
        assert_eq!(*empty.matrix(), Matrix7::identity() * (gamma * gamma));
        let same = proposal_covariance(&Subsample(vec![y, y]), &y, gamma, 1.0, &cfg).unwrap();
        assert_eq!(*same.matrix(), Matrix7::identity() * (gamma * gamma));
        assert!(matches!(
            proposal_covariance(&Subsample::default(), &y, 0.0, 1.0, &cfg),
            Err(Error::BadGamma(_))
        ));
    }

    #[test]
    fn eta_and_nu_trade_off() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let z = Subsample((0..30).map(|_| random_state(&mut rng)).collect());
        let y = random_state(&mut rng);
        let a = KernelConfig::new(0.8, 2.0).unwrap();
        let b = KernelConfig::new(0.8, 1.0).unwrap();
        let ca = proposal_covariance(&z, &y, 0.01, 1.0, &a).unwrap();
        let cb = proposal_covariance(&z, &y, 0.01, 2.0, &b).unwrap();
        assert!((ca.matrix() - cb.matrix()).abs().max() < 1e-12);
    }

    #[test]
    fn median_distance_cases() {
        let w = State::repeat(1.0);
        assert_eq!(Subsample::default().median_distance(&w), None);
        let s = State::zeros();
        assert_eq!(Subsample(vec![s, s]).median_distance(&w), None);
        let mut a = State::zeros();
        a[0] = 1.0;
        let mut b = State::zeros();
        b[0] = 3.0;
        // pairwise: 1, 3, 2 -> median 2
        assert_eq!(Subsample(vec![s, a, b]).median_distance(&w), Some(2.0));
        let mut c = State::zeros();
        c[0] = 10.0;
        // pairwise: 1, 3, 10, 2, 9, 7 -> median (3 + 7) / 2
        assert_eq!(Subsample(vec![s, a, b, c]).median_distance(&w), Some(5.0));
    }

    #[test]
    fn robust_cholesky_repairs_indefinite_input() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0 - 1e-15]);
        let l = robust_cholesky(&a, 1e-8);
        let back = &l * l.transpose();
        assert!((back - a).amax() < 1e-7);
    }
}
