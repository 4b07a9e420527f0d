//! Domain types for weighted l1 regularizers over sparse models, plus the
//! descent-set membership predicates every other module consumes.
//!
//! A weight vector `w` defines the norm `||z||_w = sum_i w_i |z_i|`. The
//! descent set of that norm at a sign pattern is a cone; its union over all
//! sparse sign patterns is what the compliance measures integrate or optimize
//! over.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Normalized positive weights defining `||z||_w = sum w_i |z_i|`.
///
/// Invariants: every entry is strictly positive and finite, and the largest
/// entry is exactly 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct WeightVector {
    w: Vec<f64>,
}

impl WeightVector {
    /// Build a weight vector by dividing by the maximum entry, so that
    /// `max_i w_i == 1` exactly.
    pub fn normalized(raw: &[f64]) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::Domain("weight vector must be non-empty".into()));
        }
        let mut max = 0.0f64;
        for &v in raw {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Domain(format!(
                    "weights must be positive finite, got {v}"
                )));
            }
            max = max.max(v);
        }
        let w = raw.iter().map(|&v| v / max).collect();
        Ok(WeightVector { w })
    }

    /// The unweighted-l1 element of the class: all weights equal to 1.
    pub fn ones(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("weight vector must be non-empty".into()));
        }
        Ok(WeightVector { w: vec![1.0; n] })
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    pub fn min_entry(&self) -> f64 {
        self.w.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// `||z||_w = sum_i w_i |z_i|`; zero iff `z = 0`.
    pub fn weighted_l1(&self, z: &[f64]) -> Result<f64> {
        if z.len() != self.w.len() {
            return Err(Error::DimensionMismatch {
                expected: self.w.len(),
                got: z.len(),
            });
        }
        Ok(self
            .w
            .iter()
            .zip(z)
            .map(|(wi, zi)| wi * zi.abs())
            .sum())
    }
}

impl TryFrom<Vec<f64>> for WeightVector {
    type Error = Error;

    fn try_from(raw: Vec<f64>) -> Result<Self> {
        let v = WeightVector::normalized(&raw)?;
        // Reject silent renormalization of data that claims to be normalized.
        if raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - 1.0 > 1e-12 {
            return Err(Error::Domain("weights not normalized (max > 1)".into()));
        }
        Ok(v)
    }
}

impl From<WeightVector> for Vec<f64> {
    fn from(w: WeightVector) -> Vec<f64> {
        w.w
    }
}

/// Ambient dimension `n` and sparsity level `k`; the model is the set of
/// k-sparse vectors, whose secant set is the set of 2k-sparse vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparsityModel {
    pub n: usize,
    pub k: usize,
}

impl SparsityModel {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::Domain("ambient dimension must be >= 1".into()));
        }
        if k < 1 {
            return Err(Error::Domain("sparsity level must be >= 1".into()));
        }
        Ok(SparsityModel { n, k })
    }

    /// The identities relating the measures assume `n >= 2k`; smaller models
    /// are accepted but flagged.
    pub fn undersized(&self) -> bool {
        self.n < 2 * self.k
    }

    pub fn secant_sparsity(&self) -> usize {
        (2 * self.k).min(self.n)
    }
}

/// A support set together with a sign per index, identifying one face of the
/// weighted l1 ball (equivalently, one descent cone).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedSupport {
    entries: Vec<(usize, i8)>,
}

impl SignedSupport {
    /// Entries are (index, sign) pairs with distinct indices and signs in
    /// {-1, +1}; they are kept sorted by index.
    pub fn new(entries: &[(usize, i8)]) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Domain("signed support must be non-empty".into()));
        }
        let mut sorted = entries.to_vec();
        sorted.sort_by_key(|&(i, _)| i);
        for pair in sorted.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::Domain(format!(
                    "duplicate support index {}",
                    pair[0].0
                )));
            }
        }
        for &(_, s) in &sorted {
            if s != 1 && s != -1 {
                return Err(Error::Domain(format!("sign must be +1 or -1, got {s}")));
            }
        }
        Ok(SignedSupport { entries: sorted })
    }

    /// All-positive signs on the given indices.
    pub fn positive(indices: &[usize]) -> Result<Self> {
        let entries: Vec<(usize, i8)> = indices.iter().map(|&i| (i, 1)).collect();
        SignedSupport::new(&entries)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(usize, i8)] {
        &self.entries
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|&(i, _)| i)
    }

    pub fn max_index(&self) -> usize {
        self.entries.last().map(|&(i, _)| i).unwrap_or(0)
    }
}

/// Indices of `z` sorted by decreasing magnitude (ties broken by lowest
/// index), with markers for the top-k block `T` and top-2k block `T2`.
#[derive(Debug, Clone)]
pub struct SortedMagnitudeView {
    magnitudes: Vec<f64>,
    order: Vec<usize>,
    k: usize,
}

impl SortedMagnitudeView {
    pub fn new(z: &[f64], k: usize) -> Self {
        let magnitudes: Vec<f64> = z.iter().map(|v| v.abs()).collect();
        let order = sorted_indices_desc(&magnitudes);
        SortedMagnitudeView {
            magnitudes,
            order,
            k,
        }
    }

    /// Permutation sorting |z| in decreasing order.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Indices of the k largest magnitudes.
    pub fn top(&self) -> &[usize] {
        &self.order[..self.k.min(self.order.len())]
    }

    /// Indices of the 2k largest magnitudes.
    pub fn top2(&self) -> &[usize] {
        &self.order[..(2 * self.k).min(self.order.len())]
    }

    /// |z| at the given rank (0 = largest).
    pub fn magnitude_at_rank(&self, rank: usize) -> f64 {
        self.magnitudes[self.order[rank]]
    }

    /// Sum of squared magnitudes over a rank range.
    pub fn energy_of_ranks(&self, ranks: std::ops::Range<usize>) -> f64 {
        self.order[ranks]
            .iter()
            .map(|&i| self.magnitudes[i] * self.magnitudes[i])
            .sum()
    }

    /// Magnitudes at ranks `from..`, in decreasing order.
    pub fn tail_magnitudes(&self, from: usize) -> Vec<f64> {
        self.order[from.min(self.order.len())..]
            .iter()
            .map(|&i| self.magnitudes[i])
            .collect()
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// Indices sorted by decreasing key; equal keys keep the lower index first.
pub(crate) fn sorted_indices_desc(keys: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    idx.sort_by(|&a, &b| {
        keys[b]
            .partial_cmp(&keys[a])
            .expect("keys must not be NaN")
            .then(a.cmp(&b))
    });
    idx
}

/// Membership of `z` in the descent cone attached to the sign pattern `s`:
/// the conic hull of all directions that do not increase `||.||_w` at any
/// point carrying that sign pattern. Holds iff
/// `sum_{j not in S} w_j |z_j| <= -sum_{j in S} w_j s_j z_j`.
pub fn signed_descent_cone_contains(
    w: &WeightVector,
    s: &SignedSupport,
    z: &[f64],
) -> Result<bool> {
    let n = w.len();
    if z.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: z.len(),
        });
    }
    if s.max_index() >= n {
        return Err(Error::Domain(format!(
            "support index {} out of range for dimension {n}",
            s.max_index()
        )));
    }
    Ok(signed_cone_contains_unchecked(w.as_slice(), s.entries(), z))
}

pub(crate) fn signed_cone_contains_unchecked(w: &[f64], entries: &[(usize, i8)], z: &[f64]) -> bool {
    let mut on = 0.0;
    let mut off_total = 0.0;
    for (j, (&wj, &zj)) in w.iter().zip(z).enumerate() {
        off_total += wj * zj.abs();
        if let Some(&(_, sign)) = entries.iter().find(|&&(i, _)| i == j) {
            on += wj * f64::from(sign) * zj;
            off_total -= wj * zj.abs();
        }
    }
    off_total <= -on
}

/// Membership of `z` in the union of descent cones over all k-sparse sign
/// patterns. The best support is the top-k of `w_i |z_i|` (any other choice
/// is dominated because the total `||z||_w` is fixed), so membership reduces
/// to `||z_H||_w >= ||z_{H^c}||_w` for that support.
pub fn model_descent_set_contains(
    w: &WeightVector,
    model: &SparsityModel,
    z: &[f64],
) -> Result<bool> {
    let n = w.len();
    if model.n != n {
        return Err(Error::DimensionMismatch {
            expected: model.n,
            got: n,
        });
    }
    if z.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: z.len(),
        });
    }
    Ok(model_descent_contains_unchecked(
        w.as_slice(),
        model.k,
        z,
    ))
}

pub(crate) fn model_descent_contains_unchecked(w: &[f64], k: usize, z: &[f64]) -> bool {
    let keys: Vec<f64> = w.iter().zip(z).map(|(wi, zi)| wi * zi.abs()).collect();
    let order = sorted_indices_desc(&keys);
    let total: f64 = keys.iter().sum();
    let on: f64 = order[..k.min(order.len())].iter().map(|&i| keys[i]).sum();
    on >= total - on
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn wv(vals: &[f64]) -> WeightVector {
        WeightVector::normalized(vals).unwrap()
    }

    #[test]
    fn normalization_divides_by_max() {
        let w = wv(&[2.0, 1.0, 0.5]);
        assert_eq!(w.as_slice(), &[1.0, 0.5, 0.25]);
        let ones = wv(&[1.0, 1.0, 1.0]);
        assert_eq!(ones.as_slice(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn normalization_rejects_bad_input() {
        assert!(WeightVector::normalized(&[0.0, 1.0]).is_err());
        assert!(WeightVector::normalized(&[-1.0, 1.0]).is_err());
        assert!(WeightVector::normalized(&[]).is_err());
        assert!(WeightVector::normalized(&[f64::NAN, 1.0]).is_err());
        assert!(WeightVector::normalized(&[f64::INFINITY, 1.0]).is_err());
    }

    #[test]
    fn weighted_l1_values() {
        let w = wv(&[1.0, 1.0, 1.0]);
        assert_eq!(w.weighted_l1(&[1.0, -2.0, 3.0]).unwrap(), 6.0);
        let w = wv(&[1.0, 0.5, 0.5]);
        assert_eq!(w.weighted_l1(&[1.0, -2.0, 3.0]).unwrap(), 3.5);
        assert_eq!(w.weighted_l1(&[0.0, 0.0, 0.0]).unwrap(), 0.0);
        assert!(matches!(
            w.weighted_l1(&[1.0, 2.0]),
            Err(Error::DimensionMismatch { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn sparsity_model_validation() {
        assert!(SparsityModel::new(0, 1).is_err());
        assert!(SparsityModel::new(3, 0).is_err());
        let m = SparsityModel::new(3, 2).unwrap();
        assert!(m.undersized());
        let m = SparsityModel::new(4, 2).unwrap();
        assert!(!m.undersized());
    }

    #[test]
    fn signed_support_validation() {
        assert!(SignedSupport::new(&[(0, 1), (0, -1)]).is_err());
        assert!(SignedSupport::new(&[(0, 2)]).is_err());
        assert!(SignedSupport::new(&[]).is_err());
        let s = SignedSupport::new(&[(2, -1), (0, 1)]).unwrap();
        assert_eq!(s.entries(), &[(0, 1), (2, -1)]);
    }

    #[test]
    fn signed_cone_examples() {
        let w = wv(&[1.0, 1.0, 1.0]);
        let s = SignedSupport::new(&[(0, 1)]).unwrap();
        assert!(signed_descent_cone_contains(&w, &s, &[-1.0, 0.5, 0.4]).unwrap());
        assert!(!signed_descent_cone_contains(&w, &s, &[-1.0, 0.6, 0.5]).unwrap());
        // boundary: the generator e2 - e1 itself
        assert!(signed_descent_cone_contains(&w, &s, &[-1.0, 1.0, 0.0]).unwrap());
    }

    #[test]
    fn signed_cone_rejects_bad_dims() {
        let w = wv(&[1.0, 1.0]);
        let s = SignedSupport::new(&[(5, 1)]).unwrap();
        assert!(signed_descent_cone_contains(&w, &s, &[1.0, 0.0]).is_err());
        let s = SignedSupport::new(&[(0, 1)]).unwrap();
        assert!(signed_descent_cone_contains(&w, &s, &[1.0]).is_err());
    }

    /// Enumeration over every support and sign pattern; the reference for
    /// model-level membership at small n.
    fn member_by_enumeration(w: &WeightVector, k: usize, z: &[f64]) -> bool {
        let n = w.len();
        let mut supports: Vec<Vec<usize>> = Vec::new();
        // all subsets of {0..n} of size exactly k (smaller supports are dominated)
        fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for i in start..n {
                cur.push(i);
                rec(i + 1, n, k, cur, out);
                cur.pop();
            }
        }
        rec(0, n, k.min(n), &mut Vec::new(), &mut supports);
        supports.iter().any(|sup| {
            // best signs oppose z on the support
            let entries: Vec<(usize, i8)> = sup
                .iter()
                .map(|&i| (i, if z[i] >= 0.0 { -1 } else { 1 }))
                .collect();
            let s = SignedSupport::new(&entries).unwrap();
            signed_descent_cone_contains(w, &s, z).unwrap()
        })
    }

    #[test]
    fn model_descent_examples() {
        let w = wv(&[1.0, 1.0, 1.0]);
        let m = SparsityModel::new(3, 1).unwrap();
        assert!(model_descent_set_contains(&w, &m, &[1.0, 0.5, 0.4]).unwrap());
        assert!(!model_descent_set_contains(&w, &m, &[1.0, 1.0, 1.0]).unwrap());
    }

    #[test]
    fn model_descent_matches_enumeration_on_weighted_case() {
        // w = (1, 1, 0.1), k = 1, z = (0, 0.5, 4): the support {1} certifies
        // membership (0.5 >= 0.4), as enumeration confirms.
        let w = wv(&[1.0, 1.0, 0.1]);
        let m = SparsityModel::new(3, 1).unwrap();
        let z = [0.0, 0.5, 4.0];
        assert!(member_by_enumeration(&w, 1, &z));
        assert!(model_descent_set_contains(&w, &m, &z).unwrap());
    }

    #[test]
    fn model_descent_matches_enumeration_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..2000 {
            let n = rng.random_range(2..=6);
            let k = rng.random_range(1..=n.min(3));
            let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..=1.0)).collect();
            let w = wv(&raw);
            let m = SparsityModel::new(n, k).unwrap();
            let z: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            assert_eq!(
                model_descent_set_contains(&w, &m, &z).unwrap(),
                member_by_enumeration(&w, k, &z),
                "disagreement at w={raw:?} k={k} z={z:?}"
            );
        }
    }

    #[test]
    fn membership_is_scale_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..500 {
            let n = rng.random_range(2..=6);
            let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..=1.0)).collect();
            let w = wv(&raw);
            let k = rng.random_range(1..=n.min(3));
            let m = SparsityModel::new(n, k).unwrap();
            let z: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let t = rng.random_range(0.01..100.0);
            let tz: Vec<f64> = z.iter().map(|v| v * t).collect();
            assert_eq!(
                model_descent_set_contains(&w, &m, &z).unwrap(),
                model_descent_set_contains(&w, &m, &tz).unwrap()
            );
            let s = SignedSupport::new(&[(0, 1)]).unwrap();
            assert_eq!(
                signed_descent_cone_contains(&w, &s, &z).unwrap(),
                signed_descent_cone_contains(&w, &s, &tz).unwrap()
            );
        }
    }

    #[test]
    fn signed_cone_equals_direct_descent_at_large_base_point() {
        // For x = sigma * t * e_i with t >= |z_i|, the norm comparison
        // ||x + z||_w <= ||x||_w is exactly the cone inequality.
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..2000 {
            let n = rng.random_range(2..=5);
            let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..=1.0)).collect();
            let w = wv(&raw);
            let i = rng.random_range(0..n);
            let sigma: i8 = if rng.random_bool(0.5) { 1 } else { -1 };
            let z: Vec<f64> = (0..n).map(|_| rng.random_range(-1.5..1.5)).collect();
            let s = SignedSupport::new(&[(i, sigma)]).unwrap();
            let t = 10.0 * (1.0 + z.iter().cloned().fold(0.0f64, |a, b| a.max(b.abs())));
            let mut x = vec![0.0; n];
            x[i] = f64::from(sigma) * t;
            let xz: Vec<f64> = x.iter().zip(&z).map(|(a, b)| a + b).collect();
            let descends = w.weighted_l1(&xz).unwrap() <= w.weighted_l1(&x).unwrap();
            assert_eq!(
                descends,
                signed_descent_cone_contains(&w, &s, &z).unwrap()
            );
        }
    }

    #[test]
    fn descent_at_sparse_point_implies_cone_membership() {
        // Over 10^4 random triples (w, x, z) with x k-sparse of large
        // magnitude, actual descent implies membership of the matching cone.
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let mut hits = 0usize;
        for _ in 0..10_000 {
            let n = rng.random_range(2..=6);
            let k = rng.random_range(1..=n.min(3));
            let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..=1.0)).collect();
            let w = wv(&raw);
            let m = SparsityModel::new(n, k).unwrap();
            let mut idx: Vec<usize> = (0..n).collect();
            idx.shuffle(&mut rng);
            let support = &idx[..k];
            let mut entries: Vec<(usize, i8)> = Vec::new();
            let mut x = vec![0.0; n];
            for &j in support {
                let sigma: i8 = if rng.random_bool(0.5) { 1 } else { -1 };
                x[j] = f64::from(sigma) * rng.random_range(50.0..100.0);
                entries.push((j, sigma));
            }
            let s = SignedSupport::new(&entries).unwrap();
            let z: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let xz: Vec<f64> = x.iter().zip(&z).map(|(a, b)| a + b).collect();
            if w.weighted_l1(&xz).unwrap() <= w.weighted_l1(&x).unwrap() {
                hits += 1;
                assert!(signed_descent_cone_contains(&w, &s, &z).unwrap());
                assert!(model_descent_set_contains(&w, &m, &z).unwrap());
            }
        }
        assert!(hits > 100, "descent events too rare for the check to bite");
    }

    #[test]
    fn sorted_view_breaks_ties_by_lowest_index() {
        let view = SortedMagnitudeView::new(&[1.0, -2.0, 2.0, 1.0], 1);
        assert_eq!(view.order(), &[1, 2, 0, 3]);
        assert_eq!(view.top(), &[1]);
        assert_eq!(view.top2(), &[1, 2]);
        assert_eq!(view.magnitude_at_rank(0), 2.0);
        assert_eq!(view.tail_magnitudes(2), vec![1.0, 1.0]);
        assert_eq!(view.energy_of_ranks(0..2), 8.0);
    }
}
