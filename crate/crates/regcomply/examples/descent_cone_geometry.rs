//! Exact 3D descent-cone geometry for weighted l1 norms.
//!
//! Computes per-axis cone solid angles, compares the sphere-exact formula
//! against the published closed form, and evaluates the uniform and
//! non-uniform compliance measures on a few weight vectors.

use regcomply::geometry::{
    compliance_nonuniform_3d, compliance_uniform_3d, descent_cone_area_3d, published_cone_area_3d,
    tetra_solid_angle, FOUR_PI,
};
use regcomply::model::WeightVector;

fn main() {
    println!("=== Descent-cone geometry in R^3 ===\n");

    // one octant, as a sanity anchor: 4*pi / 8
    let octant = tetra_solid_angle([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]).unwrap();
    println!("octant solid angle: {:.9} sr (pi/2 = {:.9})\n", octant.steradians(), std::f64::consts::FRAC_PI_2);

    for raw in [[1.0, 1.0, 1.0], [1.0, 0.8, 0.6], [1.0, 0.5, 0.5]] {
        let w = WeightVector::normalized(&raw).unwrap();
        println!("weights {raw:?}");
        for axis in 0..3 {
            let exact = descent_cone_area_3d(&w, axis, 1).unwrap().steradians();
            let published = published_cone_area_3d(&w, axis).unwrap().steradians();
            println!(
                "  axis {axis}: cone area {exact:.6} sr ({:.4} of the sphere), published form {published:.6} sr",
                exact / FOUR_PI
            );
        }
        println!(
            "  uniform compliance     {:.6}",
            compliance_uniform_3d(&w).unwrap()
        );
        println!(
            "  non-uniform compliance {:.6}\n",
            compliance_nonuniform_3d(&w).unwrap()
        );
    }

    // the unweighted norm wins on a small grid around it
    let ones = WeightVector::ones(3).unwrap();
    let nu_ones = compliance_nonuniform_3d(&ones).unwrap();
    let mut best_other = f64::NEG_INFINITY;
    for a in [0.8, 0.9, 0.95] {
        for b in [0.8, 0.9, 0.95, 1.0] {
            let w = WeightVector::normalized(&[1.0, a, b]).unwrap();
            best_other = best_other.max(compliance_nonuniform_3d(&w).unwrap());
        }
    }
    println!(
        "non-uniform compliance at ones: {nu_ones:.6}; best nearby grid point: {best_other:.6}"
    );
}
