//! Flat-witness value tables: B_L and D_L as functions of the off-support
//! block length L for the unweighted l1 norm. The same table backs the
//! `curves` subcommand of the CLI.

use regcomply::rip::{b_flat_l1, b_flat_l1_continuous_peak, d_flat_l1, delta_from_gamma};

fn main() {
    println!("=== B_L and D_L curves for the unweighted norm ===\n");
    for k in [1usize, 2, 3] {
        println!("k = {k}:");
        println!("  {:>3} {:>12} {:>12}", "L", "B_L", "D_L");
        for l in 1..=10 {
            println!("  {l:>3} {:>12.8} {:>12.8}", b_flat_l1(l, k), d_flat_l1(l, k));
        }
        let best_l = (1..=10).max_by(|&a, &b| {
            b_flat_l1(a, k).partial_cmp(&b_flat_l1(b, k)).unwrap()
        });
        println!("  integer argmax of B_L: L = {}\n", best_l.unwrap());
    }

    let (u, f) = b_flat_l1_continuous_peak(1e-10);
    let gamma = 1.0 + 1.0 / f;
    println!("continuous relaxation: peak at L/k = {u:.9} (sqrt(2) = {:.9})", 2f64.sqrt());
    println!(
        "peak value {f:.9}, gamma {gamma:.9}, delta {:.9}",
        delta_from_gamma(gamma).unwrap()
    );
}
