//! Descent-set membership: the predicates at the bottom of every compliance
//! measure. A vector z is a descent direction at a signed sparse pattern if
//! moving from any point with that pattern toward z never increases the
//! weighted norm.

use regcomply::model::{
    model_descent_set_contains, signed_descent_cone_contains, SignedSupport, SparsityModel,
    WeightVector,
};

fn main() {
    println!("=== Descent-set membership ===\n");

    let w = WeightVector::ones(3).unwrap();
    let support = SignedSupport::new(&[(0, 1)]).unwrap();
    for z in [[-1.0, 0.5, 0.4], [-1.0, 0.6, 0.5], [-1.0, 1.0, 0.0]] {
        println!(
            "cone at +e_0 contains {z:?}: {}",
            signed_descent_cone_contains(&w, &support, &z).unwrap()
        );
    }
    println!("(the third case is the boundary generator e_1 - e_0)\n");

    // model-level membership: any 1-sparse pattern may certify the vector
    let model = SparsityModel::new(3, 1).unwrap();
    let w = WeightVector::normalized(&[1.0, 1.0, 0.1]).unwrap();
    let z = [0.0, 0.5, 4.0];
    println!(
        "union over 1-sparse patterns, weights (1, 1, 0.1), z = {z:?}: {}",
        model_descent_set_contains(&w, &model, &z).unwrap()
    );
    println!("(the middle coordinate certifies it: 0.5 >= 0.1 * 4)\n");

    // membership is conic: scaling z never changes the answer
    let scaled: Vec<f64> = z.iter().map(|v| v * 1e6).collect();
    println!(
        "same z scaled by 1e6: {}",
        model_descent_set_contains(&w, &model, &scaled).unwrap()
    );
}
