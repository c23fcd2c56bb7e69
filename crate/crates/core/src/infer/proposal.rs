use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

/// Running mean and covariance of the chain for the adaptive proposal.
#[derive(Clone, Debug, PartialEq)]
pub struct ProposalState {
    pub mean: DVector<f64>,
    /// Sum of squared deviations; covariance is `m2 / (count - 1)`.
    pub m2: DMatrix<f64>,
    pub count: usize,
}

/// Proposal settings shared by the engine and [`ProposalState::covariance`].
#[derive(Clone, Debug, PartialEq)]
pub struct ProposalSettings {
    pub adapt_start: usize,
    pub scale: f64,
    pub jitter: f64,
    /// Used until adaptation starts.
    pub initial_sd: Vec<f64>,
    /// Size of the first block; entries crossing blocks are zeroed when set.
    pub split: Option<usize>,
}

impl ProposalState {
    pub fn new(dim: usize) -> Self {
        Self {
            mean: DVector::zeros(dim),
            m2: DMatrix::zeros(dim, dim),
            count: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Welford rank-one update.
    pub fn push(&mut self, draw: &[f64]) {
        let x = DVector::from_column_slice(draw);
        self.count += 1;
        let delta = &x - &self.mean;
        self.mean += &delta / self.count as f64;
        let delta2 = &x - &self.mean;
        self.m2 += &delta * delta2.transpose();
    }

    /// Sample covariance; zero with fewer than two draws.
    pub fn sample_cov(&self) -> DMatrix<f64> {
        if self.count < 2 {
            return DMatrix::zeros(self.dim(), self.dim());
        }
        let c = &self.m2 / (self.count - 1) as f64;
        (&c + c.transpose()) * 0.5
    }

    /// Proposal covariance at iteration `iteration`.
    pub fn covariance(&self, iteration: usize, s: &ProposalSettings) -> DMatrix<f64> {
        let d = self.dim();
        let mut c = if iteration < s.adapt_start || self.count < 2 {
            DMatrix::from_diagonal(&DVector::from_iterator(d, s.initial_sd.iter().map(|v| v * v)))
        } else {
            (self.sample_cov() + DMatrix::identity(d, d) * s.jitter) * s.scale
        };
        if let Some(k) = s.split {
            for i in 0..d {
                for j in 0..d {
                    if (i < k) != (j < k) {
                        c[(i, j)] = 0.0;
                    }
                }
            }
        }
        c
    }
}

/// Functional form of [`ProposalState::push`].
pub fn adapt_proposal(state: &ProposalState, new_draw: &[f64]) -> ProposalState {
    let mut s = state.clone();
    s.push(new_draw);
    s
}

/// Draws `current + L ε` where `L Lᵀ = cov`.
pub fn propose(current: &[f64], cov: &DMatrix<f64>, rng: &mut impl Rng) -> Vec<f64> {
    let d = current.len();
    let eps = DVector::from_iterator(d, (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)));
    let l = match cov.clone().cholesky() {
        Some(ch) => ch.l(),
        None => {
            // fall back to the diagonal if rounding broke positive definiteness
            DMatrix::from_diagonal(&cov.diagonal().map(|v| v.max(0.0).sqrt()))
        }
    };
    let step = l * eps;
    current.iter().zip(step.iter()).map(|(a, b)| a + b).collect()
}
