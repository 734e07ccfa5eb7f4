// The dual picture of the discursive voter model: coalescing variable-speed
// walkers. Traces single walks, restricts them to an observed subset, and
// compares simulated coalescence against the exact meeting-time machinery.
//
// Run with: cargo run --release --example coalescing_walkers

use voterlab::chain::{
    build_dual_generator, coalescing_time_exact, exact_meeting_time, stationary_meeting_time,
};
use voterlab::derive_seed;
use voterlab::dynamics::{
    observe_on_subset, simulate_coalescing, simulate_meeting, simulate_walk, WalkerSet,
};
use voterlab::netgen::{components, generate, Graph, NetworkParams, Variant};

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn main() {
    // One walker on a path, watched in full and then only on its endpoints.
    let g = Graph::path(5);
    let rec = simulate_walk(&g, 0, 1.0, 30.0, 11).unwrap();
    println!(
        "single walker on P5 up to t = 30 ({} jumps):",
        rec.positions.len() - 1
    );
    let occ: Vec<String> = rec
        .occupation_fractions()
        .iter()
        .map(|o| format!("{o:.3}"))
        .collect();
    println!("occupation fractions: {occ:?}");
    let ends = observe_on_subset(&rec, &[0, 4]).unwrap();
    println!(
        "restricted to the endpoints it makes {} observed moves, fraction at 0 = {:.3}",
        ends.positions.len() - 1,
        ends.occupation_fractions()[0]
    );

    // Walker counts as coalescence proceeds from full occupancy.
    let g = Graph::cycle(12);
    let mut ws = WalkerSet::full(&g);
    let rec = simulate_coalescing(&g, &mut ws, 1.0, 3).unwrap();
    println!();
    println!(
        "coalescence on C12 from full occupancy, finished at t = {:.3}:",
        rec.time
    );
    for (t, k) in rec.trajectory.as_ref().unwrap() {
        println!("  t = {t:>8.3}  walkers = {k}");
    }

    // Meeting times by simulation against the exact generator computation.
    let g = Graph::star(6);
    let gm = build_dual_generator(&g, 1.0).unwrap();
    let exact_pair = exact_meeting_time(&gm, 1, 2).unwrap();
    let stat = stationary_meeting_time(&gm).unwrap();
    let samples: Vec<f64> = (0..20_000u64)
        .map(|r| {
            simulate_meeting(&g, 1, 2, 1.0, derive_seed(1234, r))
                .unwrap()
                .time
        })
        .collect();
    let (mean, se) = mean_se(&samples);
    println!();
    println!("star with 6 leaves, theta = 1:");
    println!("  leaf-leaf meeting time exact = {exact_pair:.4}, simulated = {mean:.4} +- {se:.4}");
    println!("  stationary meeting time = {stat:.4}");

    // Exact coalescence from full occupancy on a 4-vertex graph against the
    // Monte Carlo estimate, then the same comparison on a sampled giant
    // where only simulation is available.
    let g = Graph::cycle(4);
    let all: Vec<u32> = (0..4).collect();
    let exact = coalescing_time_exact(&g, 2.0, &all).unwrap();
    let times: Vec<f64> = (0..40_000u64)
        .map(|r| {
            let mut ws = WalkerSet::full(&g);
            simulate_coalescing(&g, &mut ws, 2.0, derive_seed(7, r))
                .unwrap()
                .time
        })
        .collect();
    let (mc, sc) = mean_se(&times);
    println!();
    println!("full-occupancy coalescence on C4 at theta = 2: exact = {exact:.4}, mc = {mc:.4} +- {sc:.4}");

    let params = NetworkParams::new(300, 2.5, 0.6, Variant::Snr, 77);
    let g = generate(&params).unwrap();
    let giant = g.induced(&components(&g).giant_vertices());
    println!();
    println!(
        "coalescence from full occupancy on a {}-vertex sampled giant:",
        giant.n()
    );
    println!("theta\tmean\tstderr");
    for &theta in &[0.0, 1.0, 2.0] {
        let times: Vec<f64> = (0..400u64)
            .map(|r| {
                let mut ws = WalkerSet::full(&giant);
                simulate_coalescing(&giant, &mut ws, theta, derive_seed(1000 + r, r))
                    .unwrap()
                    .time
            })
            .collect();
        let (m, s) = mean_se(&times);
        println!("{theta}\t{m:.3}\t{s:.3}");
    }
}
