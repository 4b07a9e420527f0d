//! RIP-based compliance measures for weighted l1 regularizers over k-sparse
//! models.
//!
//! Necessary side: `B = sup ||z_{T2^c}||_2^2 / ||z_{T2}||_2^2` over descent
//! vectors z (T2 = top-2k magnitudes), restricted conditioning
//! `gamma = 1 + 1/B`, and `delta_nec = (gamma - 1)/(gamma + 1)`.
//!
//! Sufficient side: `D = sup ||z_{T^c}||_S^2 / ||z_T||_2^2` with the k-support
//! norm on the off-support block, and `delta_suff = 1/sqrt(D + 1)`.
//!
//! The suprema have no general closed form. They are evaluated as the maximum
//! of closed-form candidate families (two-block and flat witnesses on the
//! extreme-weight supports, plus a greedy saturated witness that dominates
//! for strongly skewed weights) and a multistart projected local search;
//! results are certified lower bounds, cross-checkable against the
//! brute-force oracles.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ksupport::ksupport_norm_sq_sorted_desc;
use crate::model::{
    model_descent_contains_unchecked, sorted_indices_desc, SortedMagnitudeView, SparsityModel,
    WeightVector,
};
use crate::numerics::{golden_section_max, nelder_mead_min};
use crate::search::SearchConfig;

/// Which compliance quantity a report carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Measure {
    #[serde(rename = "rip-nec-B")]
    RipNecB,
    #[serde(rename = "rip-nec-gamma")]
    RipNecGamma,
    #[serde(rename = "rip-nec-delta")]
    RipNecDelta,
    #[serde(rename = "rip-suff-D")]
    RipSuffD,
    #[serde(rename = "rip-suff-delta")]
    RipSuffDelta,
}

/// How a reported value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    CandidateFamily,
    LocalSearch,
    Oracle,
}

/// Serialize possibly-infinite values as a number or the string "inf".
pub(crate) mod ext_real {
    use serde::de::Error as DeError;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Str(s) if s == "inf" => Ok(f64::INFINITY),
            Raw::Str(s) if s == "-inf" => Ok(f64::NEG_INFINITY),
            Raw::Str(s) => Err(DeError::custom(format!("invalid extended real: {s}"))),
        }
    }
}

/// One compliance value with provenance. When a witness is present it
/// re-evaluates to `value` under the corresponding pointwise functional
/// (within 1e-9) and lies in the descent set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplianceReport {
    pub measure: Measure,
    #[serde(with = "ext_real")]
    pub value: f64,
    pub witness: Option<Vec<f64>>,
    pub method: Method,
    /// True when a brute-force oracle run confirmed the value on this
    /// instance (within 2% relative).
    pub certified: bool,
}

/// Necessary-side bundle: B, gamma = 1 + 1/B, delta = (gamma-1)/(gamma+1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NecessaryCompliance {
    pub b: ComplianceReport,
    pub gamma: ComplianceReport,
    pub delta: ComplianceReport,
}

/// Sufficient-side bundle: D and delta = 1/sqrt(D + 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SufficientCompliance {
    pub d: ComplianceReport,
    pub delta: ComplianceReport,
}

/// RIP constant of an operator with restricted conditioning `gamma`:
/// `delta = (gamma - 1) / (gamma + 1)`, increasing in gamma. `gamma = +inf`
/// maps to 1.
pub fn delta_from_gamma(gamma: f64) -> Result<f64> {
    if gamma.is_nan() || gamma < 1.0 {
        return Err(Error::Domain(format!(
            "restricted conditioning must be >= 1, got {gamma}"
        )));
    }
    if gamma.is_infinite() {
        return Ok(1.0);
    }
    Ok((gamma - 1.0) / (gamma + 1.0))
}

/// Restricted conditioning of `I - P_z` (projection removing span(z)) over
/// unit 2k-sparse vectors: `||z||_2^2 / ||z_{T2^c}||_2^2`, and `+inf` when z
/// is 2k-sparse (such kernel directions never break recovery).
pub fn gamma_projector(z: &[f64], model: &SparsityModel) -> Result<f64> {
    if z.len() != model.n {
        return Err(Error::DimensionMismatch {
            expected: model.n,
            got: z.len(),
        });
    }
    let view = SortedMagnitudeView::new(z, model.k);
    let t2 = view.top2().len();
    let on = view.energy_of_ranks(0..t2);
    let off = view.energy_of_ranks(t2..z.len());
    if on + off == 0.0 {
        return Err(Error::Domain("gamma is undefined at z = 0".into()));
    }
    if off == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((on + off) / off)
}

/// Pointwise necessary-side functional:
/// `||z_{T2^c}||_2^2 / ||z_{T2}||_2^2` with T2 the top-2k magnitudes.
pub fn b_value(z: &[f64], k: usize) -> Result<f64> {
    if k < 1 {
        return Err(Error::Domain("sparsity level must be >= 1".into()));
    }
    let view = SortedMagnitudeView::new(z, k);
    let t2 = view.top2().len();
    let on = view.energy_of_ranks(0..t2);
    if on == 0.0 {
        return Err(Error::Domain("B is undefined at z = 0".into()));
    }
    Ok(view.energy_of_ranks(t2..z.len()) / on)
}

/// Pointwise sufficient-side functional:
/// `||z_{T^c}||_S^2 / ||z_T||_2^2` with T the top-k magnitudes and the
/// k-support norm on the off block.
pub fn d_value(z: &[f64], k: usize) -> Result<f64> {
    if k < 1 {
        return Err(Error::Domain("sparsity level must be >= 1".into()));
    }
    let view = SortedMagnitudeView::new(z, k);
    let t = view.top().len();
    let on = view.energy_of_ranks(0..t);
    if on == 0.0 {
        return Err(Error::Domain("D is undefined at z = 0".into()));
    }
    let tail = view.tail_magnitudes(t);
    Ok(ksupport_norm_sq_sorted_desc(&tail, k) / on)
}

/// Value of B at the optimal two-block flat witness for the unweighted l1
/// norm with off-support block length L: `f(L/k)` with
/// `f(u) = u / ((u+1)^2 + 1)`.
pub fn b_flat_l1(l: usize, k: usize) -> f64 {
    b_flat_l1_continuous(l as f64 / k as f64)
}

/// The continuous relaxation `f(u) = u / ((u+1)^2 + 1)` of `b_flat_l1`.
pub fn b_flat_l1_continuous(u: f64) -> f64 {
    u / ((u + 1.0) * (u + 1.0) + 1.0)
}

/// Maximizer of the continuous relaxation over u >= 0, found by
/// golden-section search: `u* = sqrt(2)`, `f(u*) = (sqrt(2)-1)/2`.
pub fn b_flat_l1_continuous_peak(tol: f64) -> (f64, f64) {
    golden_section_max(b_flat_l1_continuous, 0.0, 16.0, tol.max(1e-14))
}

/// Value of D at the optimal flat witness for the unweighted l1 norm with
/// off-support block length L: `min(1, L/k)`.
pub fn d_flat_l1(l: usize, k: usize) -> f64 {
    (l as f64 / k as f64).min(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum SupSide {
    B,
    D,
}

impl SupSide {
    fn eval(self, z: &[f64], k: usize) -> Result<f64> {
        match self {
            SupSide::B => b_value(z, k),
            SupSide::D => d_value(z, k),
        }
    }

    fn measure(self) -> Measure {
        match self {
            SupSide::B => Measure::RipNecB,
            SupSide::D => Measure::RipSuffD,
        }
    }

    fn seed_domain(self) -> u64 {
        match self {
            SupSide::B => 0xB,
            SupSide::D => 0xD,
        }
    }
}

const FEASIBILITY_SHRINK: f64 = 1.0 - 1e-12;

/// Shrink everything off the top-k-weights support until the membership
/// predicate holds; candidates are built on (or rescaled to) the equality
/// boundary, where rounding can land a hair outside.
fn nudge_feasible(z: &mut [f64], w: &[f64], k: usize, h0: &[usize]) -> bool {
    for _ in 0..8 {
        if model_descent_contains_unchecked(w, k, z) {
            return true;
        }
        for (j, v) in z.iter_mut().enumerate() {
            if !h0.contains(&j) {
                *v *= FEASIBILITY_SHRINK;
            }
        }
    }
    model_descent_contains_unchecked(w, k, z)
}

/// Closed-form candidate witnesses, all supported on the top-k weights H0
/// plus a block of the smallest weights:
///  - two-block: flat alpha off-support, flat beta on H0 with the weighted
///    masses balanced (the supremum is approached on that boundary);
///  - flat: constant magnitude across the union (feasible whenever the
///    top-k weighted mass dominates the block's);
///  - greedy saturated: H0 at the top level, off-support filled greedily by
///    ascending weight up to that level under the balanced-mass budget.
fn candidate_family(w: &[f64], k: usize, side: SupSide) -> Vec<Vec<f64>> {
    let n = w.len();
    let order = sorted_indices_desc(w);
    let h0 = &order[..k.min(n)];
    let s0: f64 = h0.iter().map(|&j| w[j]).sum();
    let mut out = Vec::new();
    let max_l = match side {
        SupSide::B => n.saturating_sub(2 * k),
        SupSide::D => n.saturating_sub(k),
    };
    for l in 1..=max_l {
        let block = match side {
            SupSide::B => k + l,
            SupSide::D => l,
        };
        let h1 = &order[n - block..];
        let s1: f64 = h1.iter().map(|&j| w[j]).sum();
        let mut two_block = vec![0.0; n];
        for &j in h1 {
            two_block[j] = 1.0;
        }
        for &j in h0 {
            two_block[j] = s1 / s0;
        }
        out.push(two_block);
        let mut flat = vec![0.0; n];
        for &j in h1.iter().chain(h0.iter()) {
            flat[j] = 1.0;
        }
        out.push(flat);
    }
    // greedy saturated witness
    let mut greedy = vec![0.0; n];
    for &j in h0 {
        greedy[j] = 1.0;
    }
    let mut budget = s0;
    for &j in order[k.min(n)..].iter().rev() {
        if budget <= 0.0 {
            break;
        }
        let v = (budget / w[j]).min(1.0);
        greedy[j] = v;
        budget -= v * w[j];
    }
    out.push(greedy);
    out
}

/// Multistart projected local search: free magnitudes on all coordinates,
/// off-support block rescaled onto the descent-set boundary before each
/// evaluation. Returns feasible (value, witness) pairs.
fn local_search(
    w: &[f64],
    k: usize,
    side: SupSide,
    config: &SearchConfig,
    warm_start: Option<&[f64]>,
) -> Vec<(f64, Vec<f64>)> {
    let n = w.len();
    let order = sorted_indices_desc(w);
    let h0: Vec<usize> = order[..k.min(n)].to_vec();
    let is_on: Vec<bool> = (0..n).map(|j| h0.contains(&j)).collect();

    let project = |x: &[f64]| -> Option<Vec<f64>> {
        let mut z: Vec<f64> = x.iter().map(|v| v.abs()).collect();
        let s_on: f64 = z
            .iter()
            .zip(&is_on)
            .zip(w)
            .filter(|((_, &on), _)| on)
            .map(|((v, _), wj)| v * wj)
            .sum();
        let s_off: f64 = z
            .iter()
            .zip(&is_on)
            .zip(w)
            .filter(|((_, &on), _)| !on)
            .map(|((v, _), wj)| v * wj)
            .sum();
        if s_on <= 0.0 || s_off <= 0.0 {
            return None;
        }
        let t = s_on / s_off;
        for (v, &on) in z.iter_mut().zip(&is_on) {
            if !on {
                *v *= t;
            }
        }
        Some(z)
    };

    let objective = |x: &[f64]| -> f64 {
        match project(x) {
            Some(z) => -side.eval(&z, k).unwrap_or(0.0),
            None => 0.0,
        }
    };

    (0..config.restarts)
        .into_par_iter()
        .filter_map(|restart| {
            let x0: Vec<f64> = if restart == 0 {
                if let Some(ws) = warm_start {
                    ws.to_vec()
                } else {
                    vec![0.5; n]
                }
            } else {
                let seed = crate::sampler::substream_seed(
                    config.seed,
                    side.seed_domain(),
                    restart as u64,
                );
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..n).map(|_| rng.random_range(0.02..=1.0)).collect()
            };
            let step: Vec<f64> = x0.iter().map(|v| 0.2 * v.abs().max(0.25)).collect();
            let out = nelder_mead_min(objective, &x0, &step, config.tolerance, config.max_iters);
            let mut z = project(&out.x)?;
            if !nudge_feasible(&mut z, w, k, &h0) {
                return None;
            }
            let value = side.eval(&z, k).ok()?;
            Some((value, z))
        })
        .collect()
}

/// Scale the witness to max coordinate 1 and keep it feasible.
fn finalize_witness(mut z: Vec<f64>, w: &[f64], k: usize) -> Option<Vec<f64>> {
    let max = z.iter().cloned().fold(0.0f64, |a, b| a.max(b.abs()));
    if max <= 0.0 {
        return None;
    }
    for v in z.iter_mut() {
        *v = v.abs() / max;
    }
    let order = sorted_indices_desc(w);
    let h0: Vec<usize> = order[..k.min(w.len())].to_vec();
    if nudge_feasible(&mut z, w, k, &h0) {
        Some(z)
    } else {
        None
    }
}

/// Deterministic total order on (value, witness) pairs: larger value wins,
/// ties go to the lexicographically smaller witness.
fn better(a: &(f64, Vec<f64>), b: &(f64, Vec<f64>)) -> bool {
    if a.0 != b.0 {
        return a.0 > b.0;
    }
    for (x, y) in a.1.iter().zip(&b.1) {
        if x != y {
            return x < y;
        }
    }
    false
}

fn supremum_search(
    w: &WeightVector,
    model: &SparsityModel,
    config: &SearchConfig,
    side: SupSide,
) -> Result<ComplianceReport> {
    if w.len() != model.n {
        return Err(Error::DimensionMismatch {
            expected: model.n,
            got: w.len(),
        });
    }
    config.validate()?;
    let ws = w.as_slice();
    let k = model.k;
    let n = model.n;

    let trivially_zero = match side {
        // every descent vector is 2k-sparse, so the off-T2 block is empty
        SupSide::B => n < 2 * k + 1,
        SupSide::D => n < k + 1,
    };
    if trivially_zero {
        return Ok(ComplianceReport {
            measure: side.measure(),
            value: 0.0,
            witness: None,
            method: Method::ClosedForm,
            certified: false,
        });
    }

    let order = sorted_indices_desc(ws);
    let h0: Vec<usize> = order[..k].to_vec();

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut best_method = Method::CandidateFamily;
    for mut cand in candidate_family(ws, k, side) {
        if !nudge_feasible(&mut cand, ws, k, &h0) {
            continue;
        }
        let value = side.eval(&cand, k)?;
        let pair = (value, cand);
        if best.as_ref().is_none_or(|b| better(&pair, b)) {
            best = Some(pair);
        }
    }

    // The search must beat the closed-form witness by more than float noise
    // to override it; within 1e-9 relative the candidate stands.
    let warm = best.as_ref().map(|(_, z)| z.clone());
    let mut best_search: Option<(f64, Vec<f64>)> = None;
    for pair in local_search(ws, k, side, config, warm.as_deref()) {
        if best_search.as_ref().is_none_or(|b| better(&pair, b)) {
            best_search = Some(pair);
        }
    }
    if let Some(pair) = best_search {
        let bar = best
            .as_ref()
            .map(|(v, _)| v * (1.0 + 1e-9))
            .unwrap_or(f64::NEG_INFINITY);
        if pair.0 > bar {
            best = Some(pair);
            best_method = Method::LocalSearch;
        }
    }

    let (value, witness) = match best {
        Some((v, z)) => match finalize_witness(z, ws, k) {
            Some(z) => {
                // the reported value must re-evaluate from the witness
                let v = side.eval(&z, k)?;
                (v, Some(z))
            }
            None => (v, None),
        },
        None => (0.0, None),
    };

    let mut certified = false;
    if config.certify {
        let oracle_value = match side {
            SupSide::B => crate::oracle::brute_b_sigma(w, model, &Default::default())?.value,
            SupSide::D => crate::oracle::brute_d_sigma(w, model, &Default::default())?.value,
        };
        certified = (value - oracle_value).abs() <= 0.02 * oracle_value.max(1e-9);
    }

    Ok(ComplianceReport {
        measure: side.measure(),
        value,
        witness,
        method: best_method,
        certified,
    })
}

/// Supremum of the necessary-side functional B over the descent set of
/// `||.||_w`; a certified lower bound (candidates + multistart local search).
/// For n <= 2k the supremum is 0 (no room for an off-T2 block).
pub fn b_sigma(
    w: &WeightVector,
    model: &SparsityModel,
    config: &SearchConfig,
) -> Result<ComplianceReport> {
    supremum_search(w, model, config, SupSide::B)
}

/// Necessary-side compliance: `gamma = 1 + 1/B` (infinite when B = 0: every
/// rank-one kernel is harmless) and the derived `delta_nec`.
pub fn gamma_sigma(
    w: &WeightVector,
    model: &SparsityModel,
    config: &SearchConfig,
) -> Result<NecessaryCompliance> {
    let b = b_sigma(w, model, config)?;
    let gamma_value = if b.value > 0.0 {
        1.0 + 1.0 / b.value
    } else {
        f64::INFINITY
    };
    let delta_value = delta_from_gamma(gamma_value)?;
    let gamma = ComplianceReport {
        measure: Measure::RipNecGamma,
        value: gamma_value,
        witness: b.witness.clone(),
        method: b.method,
        certified: b.certified,
    };
    let delta = ComplianceReport {
        measure: Measure::RipNecDelta,
        value: delta_value,
        witness: b.witness.clone(),
        method: b.method,
        certified: b.certified,
    };
    Ok(NecessaryCompliance { b, gamma, delta })
}

/// Sufficient-side compliance: `delta_suff = 1 / sqrt(D + 1)` with D the
/// supremum of the sufficient-side functional. For unweighted l1 and
/// n >= 2k this equals exactly `1/sqrt(2)`.
pub fn delta_suff(
    w: &WeightVector,
    model: &SparsityModel,
    config: &SearchConfig,
) -> Result<SufficientCompliance> {
    let d = supremum_search(w, model, config, SupSide::D)?;
    let delta_value = (1.0 / (d.value + 1.0)).sqrt();
    let delta = ComplianceReport {
        measure: Measure::RipSuffDelta,
        value: delta_value,
        witness: d.witness.clone(),
        method: d.method,
        certified: d.certified,
    };
    Ok(SufficientCompliance { d, delta })
}
