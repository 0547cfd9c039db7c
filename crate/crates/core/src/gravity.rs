//! Gravity-law exchange dynamics on random geography.
//!
//! N countries sit at random points in the unit square, each holding a
//! share `m_i` of a unit total GDP. One transaction selects a random pair
//! `(i, j)`; each side invests a gravity-weighted amount
//!
//! `F_ij = m_i^alpha * (m_j^beta / l_ij^theta) / sum_{k != i} (m_k^beta / l_ik^theta)`
//!
//! (note the i-centred denominator, so `F_ij != F_ji` in general). The
//! pooled investment `F~ = F_ij + F_ji` is split by a fresh uniform
//! fraction `eps`, no-debt corrections top a side up when its investment
//! exceeds its holdings, and the whole GDP vector is rescaled back to unit
//! total — the corrections make the dynamics non-conservative. Iterating
//! drives `<m^2>` to a stationary plateau; accumulating per-pair invested
//! volume after that point grows a weighted trade network up to any target
//! link density.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::WeightedNetwork;
use crate::scaling::{
    self, CollapseCurve, LogNormalParams, PowerLawFit, ScalingError, DEFAULT_LOG_BINS,
    DEFAULT_MIN_COUNT,
};

#[derive(Debug, Error, PartialEq)]
pub enum GravityError {
    #[error("countries {i} and {j} occupy the same point")]
    CoincidentPoints { i: usize, j: usize },
    #[error("transaction budget exhausted after {transactions} transactions (last drift {last_drift:?})")]
    BudgetExhausted {
        transactions: u64,
        last_drift: Option<f64>,
    },
}

/// Simulation parameters. `burn_in_window = None` derives the default
/// window of `1000 * n` transactions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Number of countries, at least 2.
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub theta: f64,
    /// Fraction of all pairs that must become links, in (0, 1].
    pub target_density: f64,
    pub seed: u64,
    #[serde(default)]
    pub burn_in_window: Option<u64>,
    pub drift_tol: f64,
    pub max_transactions: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n: 187,
            alpha: 0.5,
            beta: 1.0,
            theta: 0.5,
            target_density: 0.5895,
            seed: 0,
            burn_in_window: None,
            drift_tol: 1e-3,
            max_transactions: 100_000_000,
        }
    }
}

impl SimConfig {
    pub fn window(&self) -> u64 {
        self.burn_in_window.unwrap_or(1000 * self.n as u64)
    }

    fn assert_valid(&self) {
        assert!(self.n >= 2, "need at least 2 countries");
        assert!(
            self.alpha.is_finite() && self.beta.is_finite() && self.theta.is_finite(),
            "exponents must be finite"
        );
        assert!(
            self.target_density > 0.0 && self.target_density <= 1.0,
            "target_density must lie in (0, 1]"
        );
        assert!(self.drift_tol > 0.0, "drift_tol must be positive");
        assert!(self.window() >= 1, "burn-in window must be at least 1");
    }
}

/// Links needed to reach `density` among `n` countries.
pub fn target_link_count(n: usize, density: f64) -> usize {
    let pairs = (n * (n - 1) / 2) as f64;
    (density * pairs).ceil() as usize
}

/// One transaction's bookkeeping, reported back for inspection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransactionOutcome {
    pub i: usize,
    pub j: usize,
    pub f_ij: f64,
    pub f_ji: f64,
    /// Pooled investment `f_ij + f_ji`, the amount added to the pair weight.
    pub f_tilde: f64,
    /// Share of the pool returned to `i`; `j` receives the complement.
    pub epsilon: f64,
    pub delta_i: f64,
    pub delta_j: f64,
}

/// Full simulation state: fixed geography, evolving GDP shares, and the
/// per-pair invested volume accumulated so far.
#[derive(Debug, Clone)]
pub struct SimState {
    config: SimConfig,
    positions: Vec<(f64, f64)>,
    /// Precomputed `l_ik^-theta`, row-major, zero on the diagonal so a
    /// whole-row dot product skips the self term for free.
    inv_dist_theta: Vec<f64>,
    m: Vec<f64>,
    /// Upper-triangular accumulated pair weights.
    weights: Vec<f64>,
    distinct_links: usize,
    t: u64,
    /// Per-burn-in-window `(t, <m^2>)` trace.
    trace: Vec<(u64, f64)>,
    rng: ChaCha12Rng,
}

fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

impl SimState {
    /// Random world: positions i.i.d. uniform on the unit square (re-drawn
    /// on the measure-zero chance of a coincidence), GDP shares i.i.d.
    /// uniform then normalized to unit total, no weight accumulated yet.
    pub fn init_world(config: SimConfig) -> SimState {
        config.assert_valid();
        let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
        let n = config.n;
        let mut positions: Vec<(f64, f64)> = Vec::with_capacity(n);
        while positions.len() < n {
            let p = (rng.random::<f64>(), rng.random::<f64>());
            if positions.iter().all(|q| *q != p) {
                positions.push(p);
            }
        }
        let mut m: Vec<f64> = (0..n).map(|_| 1.0 - rng.random::<f64>()).collect();
        let total: f64 = m.iter().sum();
        for v in &mut m {
            *v /= total;
        }
        Self::assemble(config, positions, m, rng)
            .expect("distinct positions were enforced at draw time")
    }

    /// Build a state from chosen geography and GDP shares (shares are
    /// normalized to unit total). Rejects coincident positions — the
    /// gravity kernel needs every distance positive.
    pub fn from_parts(
        config: SimConfig,
        positions: Vec<(f64, f64)>,
        mut m: Vec<f64>,
    ) -> Result<SimState, GravityError> {
        config.assert_valid();
        assert_eq!(positions.len(), config.n, "one position per country");
        assert_eq!(m.len(), config.n, "one GDP share per country");
        let total: f64 = m.iter().sum();
        assert!(total > 0.0, "total GDP must be positive");
        for v in &mut m {
            *v /= total;
        }
        let rng = ChaCha12Rng::seed_from_u64(config.seed);
        Self::assemble(config, positions, m, rng)
    }

    fn assemble(
        config: SimConfig,
        positions: Vec<(f64, f64)>,
        m: Vec<f64>,
        rng: ChaCha12Rng,
    ) -> Result<SimState, GravityError> {
        let n = config.n;
        let mut inv_dist_theta = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let dx = positions[i].0 - positions[j].0;
                let dy = positions[i].1 - positions[j].1;
                let dist_sq = dx * dx + dy * dy;
                if dist_sq == 0.0 {
                    return Err(GravityError::CoincidentPoints { i, j });
                }
                // l^-theta computed as (l^2)^(-theta/2).
                let inv = dist_sq.powf(-config.theta / 2.0);
                inv_dist_theta[i * n + j] = inv;
                inv_dist_theta[j * n + i] = inv;
            }
        }
        let weights = vec![0.0; n * (n - 1) / 2];
        Ok(SimState {
            config,
            positions,
            inv_dist_theta,
            m,
            weights,
            distinct_links: 0,
            t: 0,
            trace: Vec::new(),
            rng,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn positions(&self) -> &[(f64, f64)] {
        &self.positions
    }

    pub fn m(&self) -> &[f64] {
        &self.m
    }

    pub fn transactions(&self) -> u64 {
        self.t
    }

    pub fn distinct_links(&self) -> usize {
        self.distinct_links
    }

    /// Per-window stationarity trace: `(t at window end, windowed <m^2>)`.
    pub fn trace(&self) -> &[(u64, f64)] {
        &self.trace
    }

    pub fn accumulated_weight(&self, i: usize, j: usize) -> f64 {
        let n = self.config.n;
        self.weights[pair_index(n, i.min(j), i.max(j))]
    }

    pub fn total_accumulated_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn mean_m_squared(&self) -> f64 {
        self.m.iter().map(|v| v * v).sum::<f64>() / self.config.n as f64
    }

    /// Gravity investment of `i` toward `j` under the current GDP shares.
    /// Because the j-term of the denominator also multiplies the numerator,
    /// the result never exceeds `m_i^alpha`, at machine precision included.
    pub fn gravity_flow(&self, i: usize, j: usize) -> f64 {
        debug_assert_ne!(i, j);
        let n = self.config.n;
        let beta = self.config.beta;
        let row = &self.inv_dist_theta[i * n..(i + 1) * n];
        let attraction = |k: usize| {
            let mb = if beta == 1.0 {
                self.m[k]
            } else {
                self.m[k].powf(beta)
            };
            mb * row[k]
        };
        // The diagonal entry of `row` is zero, so k == i adds nothing.
        let mut denom = 0.0;
        for k in 0..n {
            denom += attraction(k);
        }
        if denom <= 0.0 {
            return 0.0; // everyone else is exactly broke: nothing attracts
        }
        self.m[i].powf(self.config.alpha) * (attraction(j) / denom)
    }

    /// Execute one transaction between `i` and `j`: both invest their
    /// gravity flows (evaluated on the pre-transaction shares), the pool is
    /// split by a fresh uniform fraction, no-debt corrections keep both
    /// sides non-negative, the GDP vector is renormalized to unit total,
    /// and the pair's accumulated weight grows by the pooled investment.
    pub fn transact(&mut self, i: usize, j: usize) -> TransactionOutcome {
        assert_ne!(i, j, "a country cannot trade with itself");
        let f_ij = self.gravity_flow(i, j);
        let f_ji = self.gravity_flow(j, i);
        let f_tilde = f_ij + f_ji;
        let epsilon: f64 = self.rng.random();
        let delta_i = (f_ij - self.m[i]).max(0.0);
        let delta_j = (f_ji - self.m[j]).max(0.0);

        self.m[i] = self.m[i] - f_ij + epsilon * f_tilde + delta_i;
        self.m[j] = self.m[j] - f_ji + (1.0 - epsilon) * f_tilde + delta_j;
        debug_assert!(self.m[i] >= 0.0 && self.m[j] >= 0.0);

        // The corrections are the only non-conservative inflow; rescale the
        // realized total rather than trusting 1 + delta_i + delta_j.
        let total: f64 = self.m.iter().sum();
        for v in &mut self.m {
            *v /= total;
        }

        if f_tilde > 0.0 {
            let idx = pair_index(self.config.n, i.min(j), i.max(j));
            if self.weights[idx] == 0.0 {
                self.distinct_links += 1;
            }
            self.weights[idx] += f_tilde;
        }
        self.t += 1;

        TransactionOutcome {
            i,
            j,
            f_ij,
            f_ji,
            f_tilde,
            epsilon,
            delta_i,
            delta_j,
        }
    }

    /// Transact one uniformly random unordered pair.
    pub fn random_transaction(&mut self) -> TransactionOutcome {
        let n = self.config.n;
        let i = self.rng.random_range(0..n);
        let mut j = self.rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        self.transact(i, j)
    }

    /// Run until the windowed mean of `<m^2>` settles: two consecutive
    /// windows of `window` transactions whose means differ by less than
    /// `drift_tol` (relative). Accumulated weights are then reset so that
    /// network recording starts in the stationary regime.
    pub fn run_to_stationarity(&mut self, window: u64, drift_tol: f64) -> Result<(), GravityError> {
        assert!(window >= 1, "window must be at least 1");
        let mut previous: Option<f64> = None;
        let mut last_drift: Option<f64> = None;
        loop {
            let mut acc = 0.0;
            for _ in 0..window {
                if self.t >= self.config.max_transactions {
                    return Err(GravityError::BudgetExhausted {
                        transactions: self.t,
                        last_drift,
                    });
                }
                self.random_transaction();
                acc += self.mean_m_squared();
            }
            let mean = acc / window as f64;
            self.trace.push((self.t, mean));
            if let Some(prev) = previous {
                let drift = (mean - prev).abs() / prev;
                last_drift = Some(drift);
                if drift < drift_tol {
                    self.reset_weights();
                    return Ok(());
                }
            }
            previous = Some(mean);
        }
    }

    /// Burn in with the configured window and tolerance.
    pub fn run_default_burn_in(&mut self) -> Result<(), GravityError> {
        self.run_to_stationarity(self.config.window(), self.config.drift_tol)
    }

    /// Clear the accumulated pair weights and the distinct-link counter.
    ///
    /// Useful for taking several independent network snapshots from a single
    /// stationary run: reset, then call [`run_to_density`](Self::run_to_density)
    /// again.
    pub fn reset_weights(&mut self) {
        self.weights.iter_mut().for_each(|w| *w = 0.0);
        self.distinct_links = 0;
    }

    /// Keep transacting until the configured link density is reached, then
    /// return the accumulated weighted network and the final GDP shares.
    pub fn run_to_density(&mut self) -> Result<(WeightedNetwork, Vec<f64>), GravityError> {
        let target = target_link_count(self.config.n, self.config.target_density);
        while self.distinct_links < target {
            if self.t >= self.config.max_transactions {
                return Err(GravityError::BudgetExhausted {
                    transactions: self.t,
                    last_drift: None,
                });
            }
            self.random_transaction();
        }
        Ok((self.build_network(), self.m.clone()))
    }

    /// Snapshot of the accumulated trade network: one link per pair with
    /// positive invested volume.
    pub fn build_network(&self) -> WeightedNetwork {
        let n = self.config.n;
        let mut edges = Vec::with_capacity(self.distinct_links);
        for i in 0..n {
            for j in (i + 1)..n {
                let w = self.weights[pair_index(n, i, j)];
                if w > 0.0 {
                    edges.push((i, j, w));
                }
            }
        }
        WeightedNetwork::build(n, &edges).expect("accumulated weights are positive and canonical")
    }
}

/// The model's headline statistics bundled from one synthetic network:
/// weight-distribution collapse quality, GDP-distribution tail exponent,
/// and the endpoint-strength correlation exponent.
#[derive(Debug, Clone, Serialize)]
pub struct ModelObservables {
    pub weight_params: LogNormalParams,
    pub collapse: CollapseCurve,
    pub parabola_gof: f64,
    /// `None` when the top decade of the GDP shares is too sparse to fit:
    /// a heavily condensed run can leave fewer than three countries there.
    pub gdp_tail: Option<PowerLawFit>,
    pub nu: PowerLawFit,
}

/// Compute the observables for a network produced by `run_to_density`,
/// with `m` the final GDP shares. The collapse statistic is evaluated on
/// the well-populated core (`|x| <= 2 sigma`) of the weight histogram.
pub fn model_observables(
    net: &WeightedNetwork,
    m: &[f64],
) -> Result<ModelObservables, ScalingError> {
    let weights: Vec<f64> = net.edges().iter().map(|&(_, _, w)| w).collect();
    let weight_params = scaling::lognormal_params(&weights)?;
    let collapse = scaling::collapse_curve(&weights, DEFAULT_LOG_BINS, DEFAULT_MIN_COUNT)?;
    let core = collapse.restricted(2.0 * collapse.params.sigma);
    let parabola_gof = scaling::parabola_gof(&core)?;
    let gdp_tail = scaling::tail_exponent_ccdf(m, 1.0).ok();
    let nu = scaling::strength_correlation_exponent(net, DEFAULT_LOG_BINS)?;
    Ok(ModelObservables {
        weight_params,
        collapse,
        parabola_gof,
        gdp_tail,
        nu,
    })
}
