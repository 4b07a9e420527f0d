//! Brute-force oracles arbitrating the fast evaluators: grid search over
//! witness magnitudes for the B and D suprema, eigen-analysis for the
//! restricted conditioning, and sphere sampling for the 3D cone areas.

use regcomply::geometry::descent_cone_area_3d;
use regcomply::model::{SparsityModel, WeightVector};
use regcomply::oracle::{
    brute_b_sigma, brute_cone_area_3d, brute_d_sigma, brute_gamma_projector, GridSpec,
};
use regcomply::rip::{b_sigma, delta_suff, gamma_projector};
use regcomply::search::SearchConfig;

fn main() {
    println!("=== Brute-force cross-checks ===\n");

    let config = SearchConfig::default();
    let grid = GridSpec::default();
    for (raw, k) in [(vec![1.0, 1.0, 1.0, 1.0], 1usize), (vec![1.0, 0.8, 0.55, 0.9], 1)] {
        let w = WeightVector::normalized(&raw).unwrap();
        let model = SparsityModel::new(raw.len(), k).unwrap();
        let b_fast = b_sigma(&w, &model, &config).unwrap().value;
        let b_brute = brute_b_sigma(&w, &model, &grid).unwrap();
        let d_fast = delta_suff(&w, &model, &config).unwrap().d.value;
        let d_brute = brute_d_sigma(&w, &model, &grid).unwrap();
        println!("weights {raw:?}, k = {k}:");
        println!(
            "  B: search {b_fast:.6} vs grid {:.6} over {} points (gap {:.2}%)",
            b_brute.value,
            b_brute.points_evaluated,
            100.0 * (b_fast - b_brute.value).abs() / b_brute.value
        );
        println!(
            "  D: search {d_fast:.6} vs grid {:.6} (gap {:.2}%)\n",
            d_brute.value,
            100.0 * (d_fast - d_brute.value).abs() / d_brute.value
        );
    }

    // restricted conditioning: top-2k closed form vs explicit eigen-analysis
    let model = SparsityModel::new(5, 1).unwrap();
    let z = [0.3, -1.2, 0.8, 0.05, -0.6];
    let closed = gamma_projector(&z, &model).unwrap();
    let eigen = brute_gamma_projector(&z, &model).unwrap();
    println!("restricted conditioning of I - P_z at z = {z:?}:");
    println!("  closed form {closed:.12}, eigen-analysis {eigen:.12}\n");

    // cone area: sphere-membership sampling vs the solid-angle formula
    let w3 = WeightVector::normalized(&[1.0, 0.7, 0.9]).unwrap();
    let mc = brute_cone_area_3d(&w3, 0, 1, 1_000_000, 3).unwrap();
    let exact = descent_cone_area_3d(&w3, 0, 1).unwrap().steradians();
    println!("cone area at axis 0 for (1, 0.7, 0.9):");
    println!(
        "  sampling {:.6} +- {:.6} sr, formula {exact:.6} sr ({:.2} sigma apart)",
        mc.steradians,
        mc.std_error,
        (mc.steradians - exact).abs() / mc.std_error
    );
}
