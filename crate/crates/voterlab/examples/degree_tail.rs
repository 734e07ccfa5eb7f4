// Degree structure of rank-one random graphs: empirical tail index against
// the predicted tau = 1 + 1/gamma, hub scaling, and component geometry.
//
// Run with: cargo run --release --example degree_tail

use voterlab::netgen::{
    componentwise_diameter, components, degree_summary, generate, NetworkParams, Variant,
};
use voterlab::theory::tau_from_gamma;

fn main() {
    let n = 100_000;
    let beta = 2.0;

    println!("tail index on one realization per gamma (n = {n}, beta = {beta}):");
    println!("gamma\ttau\ttau_hat\tpoints\tmax_deg\tmean");
    for &gamma in &[0.3, 0.5, 0.6, 0.75] {
        let params = NetworkParams::new(n, beta, gamma, Variant::Snr, 0xdeed + (gamma * 100.0) as u64);
        let g = generate(&params).unwrap();
        let summary = degree_summary(&g, gamma).unwrap();
        let tau = tau_from_gamma(gamma).unwrap();
        let tau_hat = summary
            .tail_exponent
            .map_or("-".into(), |t| format!("{t:.3}"));
        println!(
            "{gamma}\t{tau:.3}\t{tau_hat}\t{}\t{}\t{:.3}",
            summary.tail_points, summary.max_degree, summary.mean_degree
        );
    }

    // The hub statistic max_v d(v) (v/N)^gamma should stay logarithmic in N
    // when the graph really has the rank-one intensity it was generated from.
    println!();
    println!("hub scaling statistic by size (gamma = 0.75):");
    println!("n\tstat\tstat/ln(n)");
    for k in 10..=16u32 {
        let m = 1usize << k;
        let params = NetworkParams::new(m, beta, 0.75, Variant::Snr, 42 + k as u64);
        let g = generate(&params).unwrap();
        let summary = degree_summary(&g, 0.75).unwrap();
        let s = summary.scaling_statistic;
        println!("{m}\t{s:.2}\t{:.3}", s / (m as f64).ln());
    }

    // Component decomposition and diameter on a moderate graph, where the
    // exact breadth-first diameter is still affordable.
    println!();
    let params = NetworkParams::new(20_000, beta, 0.6, Variant::Snr, 99);
    let g = generate(&params).unwrap();
    let comp = components(&g);
    let diam = componentwise_diameter(&g);
    println!(
        "n = 20000, gamma = 0.6: {} components, giant = {} vertices ({:.1}%), largest diameter = {diam}",
        comp.count(),
        comp.giant_size(),
        100.0 * comp.giant_size() as f64 / g.n() as f64
    );
}
