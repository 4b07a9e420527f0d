//! Maximization of a chosen compliance measure over the weight vector, and
//! numerical optimality certificates for a candidate maximizer.
//!
//! One weight coordinate is pinned to 1 (all measures here are invariant
//! under coordinate permutations, and the class is normalized to max weight
//! 1), a coarse grid over the remaining coordinates picks starting cells,
//! and a simplex refinement polishes the best of them. Monte Carlo measures
//! share the same seed across evaluations, so comparisons run on common
//! random numbers.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{compliance_nonuniform_3d, compliance_uniform_3d};
use crate::model::{SparsityModel, WeightVector};
use crate::numerics::nelder_mead_min;
use crate::rip::{delta_suff, gamma_sigma};
use crate::sampler::{mc_compliance, substream_seed, McMode};

/// Weights are kept at or above this floor during search and random draws;
/// the degenerate limit of vanishing weights is reported, not optimized over.
pub const WEIGHT_FLOOR: f64 = 0.05;

/// Budget and determinism knobs shared by the supremum searches and the
/// weight optimizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    /// Multistart count for local searches.
    pub restarts: usize,
    /// Grid resolution per free coordinate in the weight optimizer.
    pub grid_steps: usize,
    /// Convergence tolerance on the objective.
    pub tolerance: f64,
    /// Iteration cap per simplex run.
    pub max_iters: usize,
    /// Master seed; all sub-tasks derive deterministic substreams from it.
    pub seed: u64,
    /// Sample count used when the measure is Monte Carlo.
    pub mc_samples: u64,
    /// Cross-check supremum searches against the brute-force oracle when the
    /// instance is small enough.
    pub certify: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            restarts: 32,
            grid_steps: 8,
            tolerance: 1e-10,
            max_iters: 400,
            seed: 0,
            mc_samples: 1_000_000,
            certify: false,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_steps < 1 || self.max_iters < 1 || self.mc_samples < 1 {
            return Err(Error::Config(
                "grid_steps, max_iters and mc_samples must be positive".into(),
            ));
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1e-2) {
            return Err(Error::Config(
                "tolerance must lie in (0, 1e-2)".into(),
            ));
        }
        Ok(())
    }
}

/// Compliance measures that can be optimized over the weight vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeasureKind {
    /// Exact uniform-recovery measure, n = 3 only.
    #[serde(rename = "u3")]
    Uniform3d,
    /// Exact non-uniform-recovery measure, n = 3 only.
    #[serde(rename = "nu3")]
    NonUniform3d,
    /// Necessary-side RIP measure (reported as delta_nec).
    #[serde(rename = "rip-nec")]
    RipNecessary,
    /// Sufficient-side RIP measure (delta_suff).
    #[serde(rename = "rip-suff")]
    RipSufficient,
    /// Monte Carlo uniform measure, any n.
    #[serde(rename = "mc-u")]
    McUniform,
    /// Monte Carlo non-uniform measure, any n.
    #[serde(rename = "mc-nu")]
    McNonUniform,
}

impl MeasureKind {
    pub fn requires_n3(self) -> bool {
        matches!(self, MeasureKind::Uniform3d | MeasureKind::NonUniform3d)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MeasureKind::Uniform3d => "u3",
            MeasureKind::NonUniform3d => "nu3",
            MeasureKind::RipNecessary => "rip-nec",
            MeasureKind::RipSufficient => "rip-suff",
            MeasureKind::McUniform => "mc-u",
            MeasureKind::McNonUniform => "mc-nu",
        }
    }
}

/// Evaluate one compliance measure at a weight vector. Larger is better for
/// every variant.
pub fn measure_value(
    measure: MeasureKind,
    w: &WeightVector,
    model: &SparsityModel,
    config: &SearchConfig,
) -> Result<f64> {
    if measure.requires_n3() && model.n != 3 {
        return Err(Error::Config(format!(
            "measure {} requires n = 3, model has n = {}",
            measure.as_str(),
            model.n
        )));
    }
    if w.len() != model.n {
        return Err(Error::DimensionMismatch {
            expected: model.n,
            got: w.len(),
        });
    }
    match measure {
        MeasureKind::Uniform3d => compliance_uniform_3d(w),
        MeasureKind::NonUniform3d => compliance_nonuniform_3d(w),
        MeasureKind::RipNecessary => Ok(gamma_sigma(w, model, config)?.delta.value),
        MeasureKind::RipSufficient => Ok(delta_suff(w, model, config)?.delta.value),
        MeasureKind::McUniform => {
            Ok(mc_compliance(w, model, McMode::U, config.mc_samples, config.seed)?.estimate)
        }
        MeasureKind::McNonUniform => {
            Ok(mc_compliance(w, model, McMode::Nu, config.mc_samples, config.seed)?.estimate)
        }
    }
}

/// One improvement step recorded by the optimizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iteration: usize,
    pub weights: Vec<f64>,
    pub value: f64,
}

/// Outcome of a weight optimization run. `history` records the best-so-far
/// improvements, so its values are nondecreasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationTrace {
    pub measure: MeasureKind,
    pub best_weights: WeightVector,
    pub best_value: f64,
    pub history: Vec<TracePoint>,
    pub budget_exhausted: bool,
}

const GRID_POINT_CAP: usize = 20_000;

fn weights_from_free(free: &[f64]) -> Result<WeightVector> {
    let mut raw = Vec::with_capacity(free.len() + 1);
    raw.push(1.0);
    for &v in free {
        raw.push(v.clamp(WEIGHT_FLOOR, 1.0));
    }
    WeightVector::normalized(&raw)
}

/// Maximize `measure` over normalized weight vectors: coarse grid (the
/// all-ones point is always included), then simplex refinement from the best
/// grid cells.
pub fn optimize_weights(
    measure: MeasureKind,
    model: &SparsityModel,
    config: &SearchConfig,
) -> Result<OptimizationTrace> {
    config.validate()?;
    if measure.requires_n3() && model.n != 3 {
        return Err(Error::Config(format!(
            "measure {} requires n = 3, model has n = {}",
            measure.as_str(),
            model.n
        )));
    }
    let dim = model.n - 1;
    let mut budget_exhausted = false;

    // grid over the free coordinates
    let steps = config.grid_steps.max(1);
    let axis: Vec<f64> = if steps == 1 {
        vec![1.0]
    } else {
        (0..steps)
            .map(|i| {
                WEIGHT_FLOOR + (1.0 - WEIGHT_FLOOR) * i as f64 / (steps - 1) as f64
            })
            .collect()
    };
    let total: usize = axis.len().checked_pow(dim as u32).unwrap_or(usize::MAX);
    let mut points: Vec<Vec<f64>> = Vec::new();
    points.push(vec![1.0; dim]); // all-ones is always seeded
    if total <= GRID_POINT_CAP {
        let mut idx = vec![0usize; dim];
        loop {
            points.push(idx.iter().map(|&i| axis[i]).collect());
            let mut c = 0;
            while c < dim {
                idx[c] += 1;
                if idx[c] < axis.len() {
                    break;
                }
                idx[c] = 0;
                c += 1;
            }
            if c == dim {
                break;
            }
        }
    } else {
        budget_exhausted = true;
        let mut rng = ChaCha8Rng::seed_from_u64(substream_seed(config.seed, 0x6121D, 0));
        for _ in 0..GRID_POINT_CAP {
            points.push(
                (0..dim)
                    .map(|_| {
                        // snap random draws onto the grid to keep determinism readable
                        let i = rng.random_range(0..axis.len());
                        axis[i]
                    })
                    .collect(),
            );
        }
    }
    if dim == 0 {
        points.truncate(1);
    }

    let evals: Vec<(f64, Vec<f64>)> = points
        .into_par_iter()
        .map(|p| {
            let w = weights_from_free(&p)?;
            let v = measure_value(measure, &w, model, config)?;
            Ok((v, p))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut history = Vec::new();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for (i, (v, p)) in evals.iter().enumerate() {
        let candidate_better = match &best {
            None => true,
            Some((bv, bp)) => v > bv || (v == bv && p < bp),
        };
        if candidate_better && (best.is_none() || *v > best.as_ref().unwrap().0) {
            history.push(TracePoint {
                iteration: i,
                weights: weights_from_free(p)?.into(),
                value: *v,
            });
        }
        if candidate_better {
            best = Some((*v, p.clone()));
        }
    }
    let (mut best_value, mut best_free) = best.expect("grid is non-empty");

    // simplex refinement from the best grid cell
    if dim > 0 {
        let objective = |x: &[f64]| -> f64 {
            match weights_from_free(x)
                .and_then(|w| measure_value(measure, &w, model, config))
            {
                Ok(v) => -v,
                Err(_) => f64::INFINITY,
            }
        };
        let step: Vec<f64> = vec![(1.0 - WEIGHT_FLOOR) / (steps.max(2) as f64 - 1.0); dim];
        let out = nelder_mead_min(
            objective,
            &best_free,
            &step,
            config.tolerance,
            config.max_iters,
        );
        if !out.converged {
            budget_exhausted = true;
        }
        let refined: Vec<f64> = out.x.iter().map(|v| v.clamp(WEIGHT_FLOOR, 1.0)).collect();
        let w = weights_from_free(&refined)?;
        let v = measure_value(measure, &w, model, config)?;
        if v > best_value {
            best_value = v;
            best_free = refined;
            history.push(TracePoint {
                iteration: evals.len(),
                weights: w.into(),
                value: v,
            });
        }
    }

    Ok(OptimizationTrace {
        measure,
        best_weights: weights_from_free(&best_free)?,
        best_value,
        history,
        budget_exhausted,
    })
}

/// A trial weight vector that beat the candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateViolation {
    pub trial: usize,
    pub weights: Vec<f64>,
    pub value: f64,
    pub margin: f64,
}

/// Result of an optimality certificate run: every sampled w (kept away from
/// the candidate by the weight floor) should score strictly below the
/// candidate; violations are listed with full witnesses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub measure: MeasureKind,
    pub candidate_weights: Vec<f64>,
    pub candidate_value: f64,
    pub trials: usize,
    pub seed: u64,
    pub margins: Vec<f64>,
    pub violations: Vec<CertificateViolation>,
    pub min_margin: f64,
}

/// Draw a normalized weight vector with coordinates in [floor, 1], at
/// infinity-distance at least `separation` from `candidate`.
fn random_weights_away_from(
    n: usize,
    rng: &mut ChaCha8Rng,
    candidate: &[f64],
    separation: f64,
) -> WeightVector {
    loop {
        let raw: Vec<f64> = (0..n).map(|_| rng.random_range(WEIGHT_FLOOR..=1.0)).collect();
        let w = WeightVector::normalized(&raw).expect("draws are positive");
        let dist = w
            .as_slice()
            .iter()
            .zip(candidate)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        if dist >= separation {
            return w;
        }
    }
}

/// Sample `trials` random weight vectors and verify that the measure at each
/// stays strictly below the measure at `w_candidate`.
pub fn optimality_certificate(
    measure: MeasureKind,
    w_candidate: &WeightVector,
    model: &SparsityModel,
    trials: usize,
    seed: u64,
) -> Result<CertificateReport> {
    if trials < 1 {
        return Err(Error::Config("certificate needs at least one trial".into()));
    }
    let config = SearchConfig {
        seed,
        ..Default::default()
    };
    let candidate_value = measure_value(measure, w_candidate, model, &config)?;
    let candidate = w_candidate.as_slice().to_vec();

    let outcomes: Vec<(Vec<f64>, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(substream_seed(seed, 0xCE47, t as u64));
            let w = random_weights_away_from(model.n, &mut rng, &candidate, WEIGHT_FLOOR);
            let v = measure_value(measure, &w, model, &config)?;
            Ok((w.into(), v))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut margins = Vec::with_capacity(trials);
    let mut violations = Vec::new();
    for (t, (w, v)) in outcomes.into_iter().enumerate() {
        let margin = candidate_value - v;
        margins.push(margin);
        if margin <= 0.0 {
            violations.push(CertificateViolation {
                trial: t,
                weights: w,
                value: v,
                margin,
            });
        }
    }
    let min_margin = margins.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(CertificateReport {
        measure,
        candidate_weights: candidate,
        candidate_value,
        trials,
        seed,
        margins,
        violations,
        min_margin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_config() -> SearchConfig {
        SearchConfig {
            restarts: 6,
            grid_steps: 5,
            max_iters: 150,
            ..Default::default()
        }
    }

    #[test]
    fn config_validation() {
        assert!(SearchConfig::default().validate().is_ok());
        let bad = SearchConfig {
            tolerance: 0.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = SearchConfig {
            mc_samples: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn measure_requires_matching_model() {
        let w = WeightVector::ones(4).unwrap();
        let m = SparsityModel::new(4, 1).unwrap();
        assert!(measure_value(MeasureKind::Uniform3d, &w, &m, &quick_config()).is_err());
        let m3 = SparsityModel::new(3, 1).unwrap();
        assert!(measure_value(MeasureKind::NonUniform3d, &w, &m3, &quick_config()).is_err());
    }

    #[test]
    fn measures_are_permutation_invariant() {
        let cfg = quick_config();
        let m = SparsityModel::new(4, 1).unwrap();
        let w = WeightVector::normalized(&[1.0, 0.7, 0.5, 0.9]).unwrap();
        let s = w.as_slice();
        let wp = WeightVector::normalized(&[s[2], s[0], s[3], s[1]]).unwrap();
        for measure in [MeasureKind::RipNecessary, MeasureKind::RipSufficient] {
            let a = measure_value(measure, &w, &m, &cfg).unwrap();
            let b = measure_value(measure, &wp, &m, &cfg).unwrap();
            assert!((a - b).abs() < 1e-10, "{measure:?}: {a} vs {b}");
        }
    }

    #[test]
    fn optimizer_finds_ones_for_nu3() {
        let cfg = SearchConfig {
            grid_steps: 5,
            restarts: 4,
            max_iters: 300,
            ..Default::default()
        };
        let m = SparsityModel::new(3, 1).unwrap();
        let trace = optimize_weights(MeasureKind::NonUniform3d, &m, &cfg).unwrap();
        for &v in trace.best_weights.as_slice() {
            assert!((v - 1.0).abs() < 1e-3, "best weights {:?}", trace.best_weights);
        }
        assert!((trace.best_value - 0.8918265520306072).abs() < 1e-6);
        // history is nondecreasing
        for pair in trace.history.windows(2) {
            assert!(pair[1].value >= pair[0].value);
        }
    }

    #[test]
    fn optimizer_finds_ones_for_rip_suff() {
        let cfg = SearchConfig {
            grid_steps: 4,
            restarts: 6,
            max_iters: 250,
            ..Default::default()
        };
        let m = SparsityModel::new(4, 1).unwrap();
        let trace = optimize_weights(MeasureKind::RipSufficient, &m, &cfg).unwrap();
        for &v in trace.best_weights.as_slice() {
            assert!((v - 1.0).abs() < 1e-3);
        }
        assert!((trace.best_value - 1.0 / std::f64::consts::SQRT_2).abs() < 1e-6);
    }

    #[test]
    fn optimizer_finds_ones_for_rip_nec() {
        let cfg = SearchConfig {
            grid_steps: 4,
            restarts: 6,
            max_iters: 250,
            ..Default::default()
        };
        let m = SparsityModel::new(4, 1).unwrap();
        let trace = optimize_weights(MeasureKind::RipNecessary, &m, &cfg).unwrap();
        for &v in trace.best_weights.as_slice() {
            assert!((v - 1.0).abs() < 1e-3);
        }
        // gamma-derived delta at the optimum: 5/7
        assert!((trace.best_value - 5.0 / 7.0).abs() < 1e-6);
    }

    #[test]
    fn optimizer_never_reports_below_all_ones() {
        let cfg = quick_config();
        let m = SparsityModel::new(4, 1).unwrap();
        let ones = WeightVector::ones(4).unwrap();
        for measure in [MeasureKind::RipNecessary, MeasureKind::RipSufficient] {
            let at_ones = measure_value(measure, &ones, &m, &cfg).unwrap();
            let trace = optimize_weights(measure, &m, &cfg).unwrap();
            assert!(trace.best_value >= at_ones - 1e-12);
        }
    }

    #[test]
    fn certificate_accepts_ones_and_rejects_skewed_candidate() {
        let m3 = SparsityModel::new(3, 1).unwrap();
        let ones = WeightVector::ones(3).unwrap();
        let report =
            optimality_certificate(MeasureKind::NonUniform3d, &ones, &m3, 50, 7).unwrap();
        assert!(report.violations.is_empty());
        assert!(report.min_margin > 0.0);

        let skewed = WeightVector::normalized(&[1.0, 1.0, 0.5]).unwrap();
        let report =
            optimality_certificate(MeasureKind::NonUniform3d, &skewed, &m3, 50, 7).unwrap();
        assert!(
            !report.violations.is_empty(),
            "the unweighted norm should beat (1, 1, 0.5)"
        );
    }

    #[test]
    fn certificate_is_reproducible() {
        let m = SparsityModel::new(3, 1).unwrap();
        let ones = WeightVector::ones(3).unwrap();
        let a = optimality_certificate(MeasureKind::Uniform3d, &ones, &m, 40, 3).unwrap();
        let b = optimality_certificate(MeasureKind::Uniform3d, &ones, &m, 40, 3).unwrap();
        assert_eq!(a, b);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(2).build().unwrap();
        let c = pool
            .install(|| optimality_certificate(MeasureKind::Uniform3d, &ones, &m, 40, 3))
            .unwrap();
        assert_eq!(a, c);
    }
}
