//! Exact 3D computations: tetrahedral solid angles, descent-cone areas on the
//! unit sphere, and the closed-form uniform / non-uniform compliance measures
//! for weighted l1 norms in R^3.
//!
//! Solid angles use the full van Oosterom-Strackee formula
//! `tan(omega/2) = |det[a b c]| / (1 + a.b + b.c + c.a)`. A published closed
//! form for these descent cones drops the scalar-triple-product numerator; it
//! is kept available (`published_*`) for side-by-side comparison, but every
//! measure here uses the sphere-exact version, which the Monte Carlo
//! membership oracle confirms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::WeightVector;

pub const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

/// Inverse weights `mu_i = 1 / w_i` for the 3D case. In normalized form all
/// entries are >= 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mu3 {
    mu: [f64; 3],
}

impl Mu3 {
    pub fn from_weights(w: &WeightVector) -> Result<Self> {
        if w.len() != 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                got: w.len(),
            });
        }
        let s = w.as_slice();
        Ok(Mu3 {
            mu: [1.0 / s[0], 1.0 / s[1], 1.0 / s[2]],
        })
    }

    pub fn new(mu: [f64; 3]) -> Result<Self> {
        for &m in &mu {
            if !m.is_finite() || m <= 0.0 {
                return Err(Error::Domain(format!(
                    "inverse weights must be positive finite, got {m}"
                )));
            }
        }
        Ok(Mu3 { mu })
    }

    pub fn as_array(&self) -> [f64; 3] {
        self.mu
    }
}

/// A solid angle in steradians, in [0, 4*pi].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SolidAngle {
    steradians: f64,
}

impl SolidAngle {
    pub fn new(steradians: f64) -> Result<Self> {
        if !(0.0..=FOUR_PI).contains(&steradians) {
            return Err(Error::Domain(format!(
                "solid angle {steradians} outside [0, 4pi]"
            )));
        }
        Ok(SolidAngle { steradians })
    }

    pub fn steradians(&self) -> f64 {
        self.steradians
    }

    /// Fraction of the full sphere.
    pub fn sphere_fraction(&self) -> f64 {
        self.steradians / FOUR_PI
    }
}

/// Cosine of the tetrahedron angle at vertex i toward vertex j:
/// `beta_ij = (1 + (mu_j / mu_i)^2)^(-1/2)`.
pub fn beta(i: usize, j: usize, mu: &Mu3) -> Result<f64> {
    if i > 2 || j > 2 {
        return Err(Error::Domain(format!("axis indices must be in 0..3, got ({i}, {j})")));
    }
    if i == j {
        return Err(Error::Domain(
            "beta is defined for distinct axes; the diagonal is the product of the off-diagonals"
                .into(),
        ));
    }
    let m = mu.as_array();
    let r = m[j] / m[i];
    Ok((1.0 + r * r).sqrt().recip())
}

/// The coefficient `c_i = 1 + sum_{j!=i} beta_ij + prod_{j!=i} beta_ij` from
/// the published cone-area closed form, kept verbatim so the associated
/// ordering argument can be reproduced and compared against the sphere-exact
/// areas.
pub fn c_published(i: usize, mu: &Mu3) -> Result<f64> {
    if i > 2 {
        return Err(Error::Domain(format!("axis index must be in 0..3, got {i}")));
    }
    let mut sum = 0.0;
    let mut prod = 1.0;
    for j in 0..3 {
        if j != i {
            let b = beta(i, j, mu)?;
            sum += b;
            prod *= b;
        }
    }
    Ok(1.0 + sum + prod)
}

/// Published closed form `4 * atan(1 / (1 + c_i))` for the descent-cone area
/// at axis i. Reported for comparison only; see `descent_cone_area_3d`.
pub fn published_cone_area_3d(w: &WeightVector, axis: usize) -> Result<SolidAngle> {
    let mu = Mu3::from_weights(w)?;
    let c = c_published(axis, &mu)?;
    SolidAngle::new(4.0 * (1.0 / (1.0 + c)).atan())
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: &[f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

fn det3(a: &[f64; 3], b: &[f64; 3], c: &[f64; 3]) -> f64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
}

/// Solid angle of the cone spanned by three linearly independent generators,
/// via van Oosterom-Strackee:
/// `omega = 2 * atan2(|det[a b c]|, 1 + a.b + b.c + c.a)` on unit vectors.
///
/// Inputs are normalized internally; near-zero generators and (numerically)
/// coplanar triples are rejected.
pub fn tetra_solid_angle(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> Result<SolidAngle> {
    let mut u = [a, b, c];
    for v in &mut u {
        let n = norm(v);
        if !n.is_finite() || n <= 1e-12 {
            return Err(Error::Domain(format!(
                "generator norm {n} too small to normalize"
            )));
        }
        for x in v.iter_mut() {
            *x /= n;
        }
    }
    let [a, b, c] = u;
    let d = det3(&a, &b, &c).abs();
    if d < 1e-14 {
        return Err(Error::DegenerateCone(
            "generators are coplanar; the spanned cone has empty interior".into(),
        ));
    }
    let denom = 1.0 + dot(&a, &b) + dot(&b, &c) + dot(&c, &a);
    SolidAngle::new(2.0 * d.atan2(denom))
}

/// Solid angle of the descent cone of `||.||_w` at the signed axis
/// `sigma * e_axis`, for n = 3.
///
/// The cone is spanned by `{s_j mu_j e_j - sigma mu_axis e_axis}` over the
/// two other axes j and both signs s_j; reflections across the coordinate
/// planes split it into four tetrahedra of equal solid angle, so one
/// tetrahedron is computed and scaled by 4. The result does not depend on
/// `sigma` (central symmetry).
pub fn descent_cone_area_3d(w: &WeightVector, axis: usize, sign: i8) -> Result<SolidAngle> {
    if axis > 2 {
        return Err(Error::Domain(format!("axis must be in 0..3, got {axis}")));
    }
    if sign != 1 && sign != -1 {
        return Err(Error::Domain(format!("sign must be +1 or -1, got {sign}")));
    }
    let mu = Mu3::from_weights(w)?.as_array();
    let others: Vec<usize> = (0..3).filter(|&j| j != axis).collect();
    let mut apex = [0.0; 3];
    apex[axis] = -f64::from(sign) * mu[axis];
    let mut g1 = apex;
    g1[others[0]] += mu[others[0]];
    let mut g2 = apex;
    g2[others[1]] += mu[others[1]];
    let omega = tetra_solid_angle(g1, g2, apex)?;
    SolidAngle::new(4.0 * omega.steradians())
}

/// Uniform-recovery compliance in R^3:
/// `1 - (sum over the six signed axes of the cone area) / (4*pi)`.
///
/// The six signed cones are pairwise disjoint up to measure zero for every
/// admissible w, so the sum is the exact measure of the union.
pub fn compliance_uniform_3d(w: &WeightVector) -> Result<f64> {
    let mut total = 0.0;
    for axis in 0..3 {
        // sign-independent, so each axis counts twice
        total += 2.0 * descent_cone_area_3d(w, axis, 1)?.steradians();
    }
    Ok(1.0 - total / FOUR_PI)
}

/// Non-uniform-recovery compliance in R^3:
/// `1 - max over axes of the cone area / (4*pi)`.
pub fn compliance_nonuniform_3d(w: &WeightVector) -> Result<f64> {
    let mut worst = 0.0f64;
    for axis in 0..3 {
        worst = worst.max(descent_cone_area_3d(w, axis, 1)?.steradians());
    }
    Ok(1.0 - worst / FOUR_PI)
}
