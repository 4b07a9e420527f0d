//! The k-support norm: gauge of the convex hull of unit-norm k-sparse
//! vectors. Equals l2 on k-sparse inputs, l1 at k = 1, and interpolates in
//! between; a variational water-filling oracle certifies the closed form.

use regcomply::ksupport::{ksupport_norm, ksupport_norm_oracle, ksupport_norm_squared};

fn main() {
    println!("=== k-support norm ===\n");

    let z = [1.0, -2.0, 3.0, 0.5];
    for k in 1..=4 {
        println!("k = {k}: ||z||_S = {:.9}", ksupport_norm(&z, k));
    }
    let l1: f64 = z.iter().map(|v| v.abs()).sum();
    let l2: f64 = z.iter().map(|v| v * v).sum::<f64>().sqrt();
    println!("l1 = {l1:.9} (k = 1 recovers it), l2 = {l2:.9} (k = n recovers it)\n");

    // flat vectors obey ||1_L||^2 = L^2 / k exactly
    println!("flat-vector law, squared norms of (1,...,1) with L ones:");
    for (l, k) in [(3usize, 2usize), (4, 2), (5, 3)] {
        let mut flat = vec![0.0; 6];
        for v in flat.iter_mut().take(l) {
            *v = 1.0;
        }
        println!(
            "  L={l}, k={k}: {:.6} = {}^2/{}",
            ksupport_norm_squared(&flat, k),
            l,
            k
        );
    }
    println!();

    // the independent variational evaluator agrees
    let z = [0.9, -0.4, 0.1, 2.3, -1.7];
    for k in [1usize, 2, 3] {
        let closed = ksupport_norm(&z, k);
        let oracle = ksupport_norm_oracle(&z, k, 1e-12).unwrap();
        println!(
            "k = {k}: closed form {closed:.12}, water-filling oracle {oracle:.12} (diff {:.1e})",
            (closed - oracle).abs()
        );
    }
}
