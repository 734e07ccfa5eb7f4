// Meeting times of two dual walkers: exact product-chain solves, the
// universal stationary lower bound, and a Monte Carlo cross-check.
//
// Run with: cargo run --release --example meeting_times

use voterlab::chain::{
    build_dual_generator, meeting_lower_bound, meeting_times, stationary_meeting_time,
};
use voterlab::dynamics::simulate_meeting;
use voterlab::netgen::Graph;

fn main() {
    let g = Graph::path(4);
    let theta = 1.0;
    let gm = build_dual_generator(&g, theta).unwrap();

    println!("expected meeting times on the 4-path (theta = 1):");
    let m = meeting_times(&gm).unwrap();
    print!("     ");
    for y in 0..g.n() {
        print!("{y:>8}");
    }
    println!();
    for x in 0..g.n() {
        print!("x = {x}");
        for y in 0..g.n() {
            print!("{:>8.4}", m[(x, y)]);
        }
        println!();
    }

    let t_pi = stationary_meeting_time(&gm).unwrap();
    let bound = meeting_lower_bound(&gm);
    println!();
    println!("stationary meeting time: {t_pi:.6}");
    println!("universal lower bound:   {bound:.6}");

    // Simulated meeting from the worst pair (the two ends).
    let replicas = 30_000u64;
    let mut sum = 0.0;
    for seed in 0..replicas {
        sum += simulate_meeting(&g, 0, 3, theta, seed).unwrap().time;
    }
    let mc = sum / replicas as f64;
    println!();
    println!("ends of the path, exact {:.4} vs simulated {mc:.4}", m[(0, 3)]);

    // How the degree weighting shifts meetings on a star: the hub moves
    // fast for theta = 2 and slowly for theta = 0.
    println!();
    println!("star with 5 leaves, leaf-to-leaf meeting time by theta:");
    let star = Graph::star(5);
    for theta in [0.0, 1.0, 2.0] {
        let m = meeting_times(&build_dual_generator(&star, theta).unwrap()).unwrap();
        println!("  theta = {theta}: {:.4}", m[(1, 2)]);
    }
}
