//! Rich-club analysis with degree- and strength-preserving null models.
//!
//! A "club" is the set of nodes whose degree (unweighted variant) or
//! strength (weighted variant) is at least a threshold. The club
//! coefficient measures how densely — or how heavily, in weight — club
//! members link to each other. Because even uncorrelated random graphs
//! show rising coefficients, each curve is judged against a null model:
//!
//! * MRN — maximally random network: the topology is rewired by pairwise
//!   link-end exchange, preserving every node's degree exactly.
//! * MRWN — maximally random weighted network: random initial weights on
//!   the MRN topology are balanced by self-consistent sweeps until every
//!   node's strength matches its target.
//!
//! The ratio `rho = coefficient / null-ensemble mean` close to one means
//! the apparent club structure is fully explained by the degree and
//! strength sequences.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::network::{NodeId, WeightedNetwork};

/// Default accepted-swap multiple for MRN rewiring: `swap_factor * L`
/// accepted swaps are performed.
pub const DEFAULT_SWAP_FACTOR: usize = 10;
/// Default relative-strength convergence tolerance for MRWN balancing.
pub const MRWN_DEFAULT_TOL: f64 = 1e-10;
/// Default sweep budget for MRWN balancing.
pub const MRWN_DEFAULT_MAX_SWEEPS: usize = 100_000;
/// Relative residuals divide by `max(s_i, STRENGTH_FLOOR)` so zero-strength
/// targets cannot blow up the convergence test.
pub const STRENGTH_FLOOR: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum RichClubError {
    #[error("network has no edges")]
    EmptyNetwork,
    #[error("strength balancing did not converge; residual {residual}")]
    NonConvergence { residual: f64 },
    #[error("node {node} has positive target strength but no links")]
    IsolatedPositiveStrength { node: NodeId },
    #[error("node {node} has links but non-positive target strength {value}")]
    NonPositiveTarget { node: NodeId, value: f64 },
    #[error("expected {expected} target strengths, got {got}")]
    TargetLengthMismatch { got: usize, expected: usize },
}

/// Club coefficient against threshold. `coefficient[i]` is `None` where the
/// measure is undefined (fewer than two club members); the trade-share
/// curve `f_w` is defined at every threshold instead.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RichClubCurve {
    /// Degree values, or strength thresholds as a fraction of `s_max`.
    pub thresholds: Vec<f64>,
    pub coefficient: Vec<Option<f64>>,
    pub club_size: Vec<usize>,
}

/// Ensemble statistics of a null model evaluated on the original curve's
/// threshold grid, plus the original/null ratio.
#[derive(Debug, Clone, Serialize)]
pub struct NullEnsembleResult {
    pub thresholds: Vec<f64>,
    /// Original network's coefficient (copied for self-contained reports).
    pub original: Vec<Option<f64>>,
    pub club_size: Vec<usize>,
    pub null_mean: Vec<Option<f64>>,
    /// Sample standard deviation across members; `None` for size-1
    /// ensembles or where no member defines the coefficient.
    pub spread: Vec<Option<f64>>,
    /// `original / null_mean`; `None` where either side is undefined.
    pub rho: Vec<Option<f64>>,
    pub ensemble_size: usize,
}

/// Unweighted club coefficient at degree threshold `k`: the link density
/// among nodes of degree at least `k`. `None` when the club has fewer than
/// two members.
pub fn phi_unweighted(net: &WeightedNetwork, k: usize) -> Option<f64> {
    let member: Vec<bool> = (0..net.n_nodes()).map(|i| net.degree(i) >= k).collect();
    let n_k = member.iter().filter(|&&m| m).count();
    if n_k < 2 {
        return None;
    }
    let e_k = net
        .edges()
        .iter()
        .filter(|&&(i, j, _)| member[i] && member[j])
        .count();
    Some(2.0 * e_k as f64 / (n_k as f64 * (n_k - 1) as f64))
}

/// Weighted club coefficient at strength threshold `s`: twice the
/// intra-club weight per ordered member pair. `None` when the club has
/// fewer than two members.
pub fn rw_weighted(net: &WeightedNetwork, s_threshold: f64) -> Option<f64> {
    let strengths = net.strengths();
    let member: Vec<bool> = strengths.iter().map(|&s| s >= s_threshold).collect();
    let n_s = member.iter().filter(|&&m| m).count();
    if n_s < 2 {
        return None;
    }
    let intra: f64 = net
        .edges()
        .iter()
        .filter(|&&(i, j, _)| member[i] && member[j])
        .map(|&(_, _, w)| w)
        .sum();
    Some(2.0 * intra / (n_s as f64 * (n_s - 1) as f64))
}

/// Fraction of total trade volume carried inside the club of strength at
/// least `s`. Defined at every threshold: an empty or single-member club
/// carries zero intra-club volume.
pub fn fw_fraction(net: &WeightedNetwork, s_threshold: f64) -> Result<f64, RichClubError> {
    let total = net.total_weight();
    if total <= 0.0 {
        return Err(RichClubError::EmptyNetwork);
    }
    let strengths = net.strengths();
    let member: Vec<bool> = strengths.iter().map(|&s| s >= s_threshold).collect();
    let intra: f64 = net
        .edges()
        .iter()
        .filter(|&&(i, j, _)| member[i] && member[j])
        .map(|&(_, _, w)| w)
        .sum();
    Ok(intra / total)
}

/// Size (as a fraction of N) of the smallest strength-ranked club that
/// carries at least half of the total trade volume. Thresholds descend
/// through the realized strength values, so the club grows one strength
/// class at a time until its internal volume crosses one half.
pub fn half_trade_club_size(net: &WeightedNetwork) -> Result<f64, RichClubError> {
    let total = net.total_weight();
    if total <= 0.0 {
        return Err(RichClubError::EmptyNetwork);
    }
    let strengths = net.strengths();
    let mut distinct: Vec<f64> = strengths.clone();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    // Highest threshold first: the first club to cross 1/2 is the smallest.
    for &t in distinct.iter().rev() {
        let member: Vec<bool> = strengths.iter().map(|&s| s >= t).collect();
        let intra: f64 = net
            .edges()
            .iter()
            .filter(|&&(i, j, _)| member[i] && member[j])
            .map(|&(_, _, w)| w)
            .sum();
        if intra >= 0.5 * total {
            let n_club = member.iter().filter(|&&m| m).count();
            return Ok(n_club as f64 / net.n_nodes() as f64);
        }
    }
    // Unreachable: the lowest threshold admits every node, so the club's
    // internal volume equals the total.
    unreachable!("full club must carry the total volume")
}

/// All realized degree values, ascending — the natural threshold grid for
/// the unweighted curve.
pub fn degree_grid(net: &WeightedNetwork) -> Vec<usize> {
    let mut degrees = net.degree_sequence();
    degrees.sort_unstable();
    degrees.dedup();
    degrees
}

/// 100 logarithmic strength thresholds spanning `s/s_max` from 1e-4 to 1.
pub fn log_strength_grid() -> Vec<f64> {
    (0..100)
        .map(|i| 10f64.powf(-4.0 + 4.0 * i as f64 / 99.0))
        .collect()
}

/// Unweighted coefficient over a degree grid.
pub fn phi_curve(net: &WeightedNetwork, ks: &[usize]) -> RichClubCurve {
    debug_assert!(ks.windows(2).all(|w| w[0] < w[1]));
    let mut curve = RichClubCurve {
        thresholds: Vec::with_capacity(ks.len()),
        coefficient: Vec::with_capacity(ks.len()),
        club_size: Vec::with_capacity(ks.len()),
    };
    for &k in ks {
        curve.thresholds.push(k as f64);
        curve.coefficient.push(phi_unweighted(net, k));
        curve
            .club_size
            .push((0..net.n_nodes()).filter(|&i| net.degree(i) >= k).count());
    }
    curve
}

fn strength_curve(
    net: &WeightedNetwork,
    relative_thresholds: &[f64],
    eval: impl Fn(&WeightedNetwork, f64) -> Option<f64>,
) -> Result<RichClubCurve, RichClubError> {
    debug_assert!(relative_thresholds.windows(2).all(|w| w[0] < w[1]));
    let strengths = net.strengths();
    let s_max = strengths.iter().copied().fold(0.0, f64::max);
    if s_max <= 0.0 {
        return Err(RichClubError::EmptyNetwork);
    }
    let mut curve = RichClubCurve {
        thresholds: relative_thresholds.to_vec(),
        coefficient: Vec::with_capacity(relative_thresholds.len()),
        club_size: Vec::with_capacity(relative_thresholds.len()),
    };
    for &rel in relative_thresholds {
        let abs = rel * s_max;
        curve.coefficient.push(eval(net, abs));
        curve
            .club_size
            .push(strengths.iter().filter(|&&s| s >= abs).count());
    }
    Ok(curve)
}

/// Weighted coefficient over relative strength thresholds (`s/s_max`).
pub fn rw_curve(
    net: &WeightedNetwork,
    relative_thresholds: &[f64],
) -> Result<RichClubCurve, RichClubError> {
    strength_curve(net, relative_thresholds, rw_weighted)
}

/// Intra-club trade share over relative strength thresholds.
pub fn fw_curve(
    net: &WeightedNetwork,
    relative_thresholds: &[f64],
) -> Result<RichClubCurve, RichClubError> {
    strength_curve(net, relative_thresholds, |n, s| {
        fw_fraction(n, s).ok()
    })
}

/// Degree-preserving rewiring by pairwise link-end exchange. Two random
/// links `(a,b)` and `(c,d)` are replaced by `(a,d)` and `(c,b)` — each
/// endpoint keeps its degree — with proposals rejected if they would form
/// a self-loop or a duplicate link. `swap_factor * L` *accepted* swaps are
/// performed so mixing quality does not depend on density.
///
/// Returns a topology-only network: every rewired link carries unit
/// weight. Rigid topologies (complete graphs, or fewer than two links)
/// admit no swaps and are returned unchanged; near-rigid ones stop early
/// when an attempt budget is exhausted.
pub fn generate_mrn(net: &WeightedNetwork, rng_seed: u64, swap_factor: usize) -> WeightedNetwork {
    let n = net.n_nodes();
    let l = net.n_edges();
    let unit_copy = |edges: &[(NodeId, NodeId)]| {
        let weighted: Vec<(NodeId, NodeId, f64)> =
            edges.iter().map(|&(i, j)| (i, j, 1.0)).collect();
        WeightedNetwork::with_labels(net.labels().to_vec(), &weighted)
            .expect("swap moves preserve the simple-graph property")
    };

    let mut edges: Vec<(NodeId, NodeId)> = net.edges().iter().map(|&(i, j, _)| (i, j)).collect();
    // A complete graph admits no accepted swap; don't burn the budget.
    if l < 2 || swap_factor == 0 || l == n * (n - 1) / 2 {
        return unit_copy(&edges);
    }

    let mut present: HashSet<(NodeId, NodeId)> = edges.iter().copied().collect();
    let mut rng = ChaCha12Rng::seed_from_u64(rng_seed);
    let target = swap_factor * l;
    let attempt_budget = 200usize.saturating_mul(target).max(1000);
    let mut accepted = 0usize;

    for _ in 0..attempt_budget {
        if accepted >= target {
            break;
        }
        let e1 = rng.random_range(0..edges.len());
        let e2 = rng.random_range(0..edges.len());
        if e1 == e2 {
            continue;
        }
        let (mut a, mut b) = edges[e1];
        let (mut c, mut d) = edges[e2];
        // Random orientation so both pairings (a,d)/(c,b) and (a,c)/(d,b)
        // are reachable.
        if rng.random::<bool>() {
            std::mem::swap(&mut a, &mut b);
        }
        if rng.random::<bool>() {
            std::mem::swap(&mut c, &mut d);
        }
        if a == d || c == b {
            continue; // self-loop
        }
        let new1 = (a.min(d), a.max(d));
        let new2 = (c.min(b), c.max(b));
        // The old links are still in `present`, so proposals that recreate
        // either of them (identity moves included) are rejected here.
        if new1 == new2 || present.contains(&new1) || present.contains(&new2) {
            continue;
        }
        present.remove(&edges[e1]);
        present.remove(&edges[e2]);
        present.insert(new1);
        present.insert(new2);
        edges[e1] = new1;
        edges[e2] = new2;
        accepted += 1;
    }
    unit_copy(&edges)
}

/// Strength-preserving weight randomization. Keeps the given topology,
/// draws initial symmetric weights uniformly in `(0, 1]`, then repeatedly
/// sweeps the nodes in ascending id order rescaling each node's incident
/// weights by `s_i / (current strength)` — the proportional form of
/// `w_ij += delta_i * w_ij / sum_j w_ij` — until every node's strength
/// matches its target within `tol` (relative, floored for tiny targets).
///
/// Weights stay strictly positive through every update, so the result is a
/// valid weighted network on exactly the input topology.
pub fn generate_mrwn(
    topology: &WeightedNetwork,
    target_strengths: &[f64],
    rng_seed: u64,
    tol: f64,
    max_sweeps: usize,
) -> Result<WeightedNetwork, RichClubError> {
    let n = topology.n_nodes();
    if target_strengths.len() != n {
        return Err(RichClubError::TargetLengthMismatch {
            got: target_strengths.len(),
            expected: n,
        });
    }
    for (node, &s) in target_strengths.iter().enumerate() {
        match (topology.degree(node), s) {
            (0, s) if s > 0.0 => {
                return Err(RichClubError::IsolatedPositiveStrength { node })
            }
            (d, s) if d > 0 && (s <= 0.0 || !s.is_finite()) => {
                return Err(RichClubError::NonPositiveTarget { node, value: s })
            }
            _ => {}
        }
    }

    // Incident edge indices per node; weights live in one flat vector so
    // symmetry is automatic.
    let edge_list = topology.edges();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (idx, &(i, j, _)) in edge_list.iter().enumerate() {
        incident[i].push(idx);
        incident[j].push(idx);
    }

    let mut rng = ChaCha12Rng::seed_from_u64(rng_seed);
    let mut weights: Vec<f64> = (0..edge_list.len())
        .map(|_| 1.0 - rng.random::<f64>()) // uniform in (0, 1]
        .collect();

    let node_sum = |weights: &[f64], i: usize| -> f64 {
        incident[i].iter().map(|&e| weights[e]).sum()
    };

    let mut residual = f64::INFINITY;
    for _ in 0..max_sweeps {
        for i in 0..n {
            if incident[i].is_empty() {
                continue;
            }
            let sum = node_sum(&weights, i);
            let factor = target_strengths[i] / sum;
            for &e in &incident[i] {
                weights[e] *= factor;
            }
        }
        residual = (0..n)
            .filter(|&i| !incident[i].is_empty())
            .map(|i| {
                (target_strengths[i] - node_sum(&weights, i)).abs()
                    / target_strengths[i].max(STRENGTH_FLOOR)
            })
            .fold(0.0, f64::max);
        if residual < tol {
            let reweighted: Vec<(NodeId, NodeId, f64)> = edge_list
                .iter()
                .enumerate()
                .map(|(idx, &(i, j, _))| (i, j, weights[idx]))
                .collect();
            return WeightedNetwork::with_labels(topology.labels().to_vec(), &reweighted)
                .map_err(|_| unreachable!("topology is unchanged and weights stay positive"));
        }
    }
    Err(RichClubError::NonConvergence { residual })
}

/// Configuration for null-model ensembles.
#[derive(Debug, Clone, Serialize)]
pub struct NullModelConfig {
    pub ensemble_size: usize,
    pub master_seed: u64,
    pub swap_factor: usize,
    pub mrwn_tol: f64,
    pub mrwn_max_sweeps: usize,
}

impl Default for NullModelConfig {
    fn default() -> Self {
        Self {
            ensemble_size: 20,
            master_seed: 0,
            swap_factor: DEFAULT_SWAP_FACTOR,
            mrwn_tol: MRWN_DEFAULT_TOL,
            mrwn_max_sweeps: MRWN_DEFAULT_MAX_SWEEPS,
        }
    }
}

/// Splitmix64 finalizer: decorrelates per-member RNG streams derived from
/// one master seed.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

fn ensemble_stats(
    thresholds: &[f64],
    original: &RichClubCurve,
    members: &[Vec<Option<f64>>],
) -> NullEnsembleResult {
    let n_thresholds = thresholds.len();
    let mut null_mean = Vec::with_capacity(n_thresholds);
    let mut spread = Vec::with_capacity(n_thresholds);
    let mut rho = Vec::with_capacity(n_thresholds);
    for t in 0..n_thresholds {
        let defined: Vec<f64> = members.iter().filter_map(|m| m[t]).collect();
        let mean = (!defined.is_empty())
            .then(|| defined.iter().sum::<f64>() / defined.len() as f64);
        let sd = (defined.len() >= 2).then(|| {
            let m = mean.unwrap();
            let var = defined.iter().map(|v| (v - m).powi(2)).sum::<f64>()
                / (defined.len() - 1) as f64;
            var.sqrt()
        });
        null_mean.push(mean);
        spread.push(sd);
        rho.push(match (original.coefficient[t], mean) {
            (Some(orig), Some(m)) if m != 0.0 => Some(orig / m),
            _ => None,
        });
    }
    NullEnsembleResult {
        thresholds: thresholds.to_vec(),
        original: original.coefficient.clone(),
        club_size: original.club_size.clone(),
        null_mean,
        spread,
        rho,
        ensemble_size: members.len(),
    }
}

/// Null-model comparison curves: the unweighted coefficient against an MRN
/// ensemble on the realized-degree grid, and the weighted coefficient
/// against an MRWN ensemble (strength-balanced on each member's rewired
/// topology) on the logarithmic strength grid. Members are independent and
/// generated in parallel, each from its own seed stream.
pub fn null_ensemble_curves(
    net: &WeightedNetwork,
    cfg: &NullModelConfig,
) -> Result<(NullEnsembleResult, NullEnsembleResult), RichClubError> {
    assert!(cfg.ensemble_size >= 1, "ensemble_size must be at least 1");
    let ks = degree_grid(net);
    let rel_grid = log_strength_grid();
    let phi_orig = phi_curve(net, &ks);
    let rw_orig = rw_curve(net, &rel_grid)?;
    let targets = net.strengths();
    let s_max = targets.iter().copied().fold(0.0, f64::max);

    let members: Result<Vec<(Vec<Option<f64>>, Vec<Option<f64>>)>, RichClubError> = (0..cfg
        .ensemble_size)
        .into_par_iter()
        .map(|m| {
            let mrn_seed = splitmix64(cfg.master_seed.wrapping_add(2 * m as u64));
            let mrwn_seed = splitmix64(cfg.master_seed.wrapping_add(2 * m as u64 + 1));
            let mrn = generate_mrn(net, mrn_seed, cfg.swap_factor);
            debug_assert_eq!(mrn.degree_sequence(), net.degree_sequence());
            let phi_member: Vec<Option<f64>> =
                ks.iter().map(|&k| phi_unweighted(&mrn, k)).collect();
            let mrwn = generate_mrwn(&mrn, &targets, mrwn_seed, cfg.mrwn_tol, cfg.mrwn_max_sweeps)?;
            let rw_member: Vec<Option<f64>> = rel_grid
                .iter()
                .map(|&rel| rw_weighted(&mrwn, rel * s_max))
                .collect();
            Ok((phi_member, rw_member))
        })
        .collect();
    let members = members?;

    let phi_members: Vec<Vec<Option<f64>>> = members.iter().map(|m| m.0.clone()).collect();
    let rw_members: Vec<Vec<Option<f64>>> = members.iter().map(|m| m.1.clone()).collect();
    let k_thresholds: Vec<f64> = ks.iter().map(|&k| k as f64).collect();
    Ok((
        ensemble_stats(&k_thresholds, &phi_orig, &phi_members),
        ensemble_stats(&rel_grid, &rw_orig, &rw_members),
    ))
}
