// Duality between voter consensus and coalescing walkers.
//
// The consensus time from all-distinct opinions has the same law as the
// coalescence time of walkers started on every vertex. This example
// verifies the expectation identity exactly (linear solves) on every
// connected graph with up to four vertices, then cross-checks one case by
// simulation.
//
// Run with: cargo run --release --example duality_check

use voterlab::chain::{coalescing_time_exact, connected_graphs, labeled_consensus_exact};
use voterlab::dynamics::{simulate_coalescing, WalkerSet};
use voterlab::netgen::Graph;

fn main() {
    println!("exact duality on all small connected graphs");
    println!("n\tgraphs\ttheta\tmax |consensus - coalescence|");
    for n in 2..=4usize {
        let graphs = connected_graphs(n);
        for theta in [0.0, 1.0, 2.0] {
            let mut worst = 0.0f64;
            for g in &graphs {
                let cons = labeled_consensus_exact(g, theta).unwrap();
                let everyone: Vec<u32> = (0..n as u32).collect();
                let coal = coalescing_time_exact(g, theta, &everyone).unwrap();
                worst = worst.max((cons - coal).abs());
            }
            println!("{n}\t{}\t{theta}\t{worst:.3e}", graphs.len());
        }
    }

    // Monte Carlo side of the same identity on the 4-cycle.
    let g = Graph::cycle(4);
    let theta = 1.0;
    let exact = labeled_consensus_exact(&g, theta).unwrap();
    let replicas = 40_000u64;
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for seed in 0..replicas {
        let mut walkers = WalkerSet::full(&g);
        let t = simulate_coalescing(&g, &mut walkers, theta, seed).unwrap().time;
        sum += t;
        sumsq += t * t;
    }
    let mean = sum / replicas as f64;
    let se = ((sumsq / replicas as f64 - mean * mean) / replicas as f64).sqrt();
    println!();
    println!("4-cycle, theta = 1:");
    println!("  exact consensus from all-distinct opinions: {exact:.6}");
    println!("  simulated coalescence from full occupancy:  {mean:.6} +/- {se:.6}");
    println!("  deviation: {:.2} standard errors", (mean - exact).abs() / se);
}
