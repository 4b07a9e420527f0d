//! Optimality certificates: sample random competitor weight vectors and
//! check that the candidate scores strictly higher on the chosen measure.
//! A good candidate collects zero violations; a bad one is exposed.

use regcomply::model::{SparsityModel, WeightVector};
use regcomply::search::{optimality_certificate, MeasureKind};

fn main() {
    println!("=== Optimality certificates ===\n");

    let model = SparsityModel::new(4, 1).unwrap();
    let ones = WeightVector::ones(4).unwrap();
    for measure in [MeasureKind::RipNecessary, MeasureKind::RipSufficient] {
        let report = optimality_certificate(measure, &ones, &model, 200, 7).unwrap();
        println!(
            "{:?} at all-ones: {} violations over {} trials, min margin {:.6}",
            measure,
            report.violations.len(),
            report.trials,
            report.min_margin
        );
    }
    println!();

    // a deliberately bad candidate loses immediately
    let model3 = SparsityModel::new(3, 1).unwrap();
    let skewed = WeightVector::normalized(&[1.0, 1.0, 0.5]).unwrap();
    let report =
        optimality_certificate(MeasureKind::NonUniform3d, &skewed, &model3, 50, 7).unwrap();
    println!(
        "non-uniform 3D at (1, 1, 0.5): {} violations over {} trials",
        report.violations.len(),
        report.trials
    );
    if let Some(v) = report.violations.first() {
        println!(
            "  e.g. trial {} with weights {:?} scores {:.6} (margin {:.6})",
            v.trial,
            v.weights.iter().map(|x| (x * 1e3).round() / 1e3).collect::<Vec<_>>(),
            v.value,
            v.margin
        );
    }
}
