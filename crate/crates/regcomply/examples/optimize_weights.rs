//! Maximizing a compliance measure over the weight vector: coarse grid plus
//! simplex refinement, with the all-ones point always seeded. Both runs
//! should land on the unweighted norm.

use regcomply::model::SparsityModel;
use regcomply::search::{optimize_weights, MeasureKind, SearchConfig};

fn main() {
    println!("=== Weight optimization ===\n");

    let config = SearchConfig {
        grid_steps: 5,
        restarts: 8,
        max_iters: 300,
        ..Default::default()
    };

    let model = SparsityModel::new(3, 1).unwrap();
    let trace = optimize_weights(MeasureKind::NonUniform3d, &model, &config).unwrap();
    println!("non-uniform 3D measure, n = 3, k = 1:");
    for p in &trace.history {
        println!(
            "  step {:>3}: value {:.9} at {:?}",
            p.iteration,
            p.value,
            p.weights.iter().map(|v| (v * 1e4).round() / 1e4).collect::<Vec<_>>()
        );
    }
    println!(
        "  best {:?} -> {:.9}\n",
        trace.best_weights.as_slice(),
        trace.best_value
    );

    let model = SparsityModel::new(4, 1).unwrap();
    let trace = optimize_weights(MeasureKind::RipSufficient, &model, &config).unwrap();
    println!("sufficient-side RIP measure, n = 4, k = 1:");
    println!(
        "  best {:?} -> {:.12} (1/sqrt(2) = {:.12})",
        trace
            .best_weights
            .as_slice()
            .iter()
            .map(|v| (v * 1e6).round() / 1e6)
            .collect::<Vec<_>>(),
        trace.best_value,
        std::f64::consts::FRAC_1_SQRT_2
    );
}
