// Consensus-time scaling sweep on simplified Norros-Reittu graphs.
//
// Measures the mean consensus time of the discursive voter model over a
// range of graph sizes, fits the growth exponent on a log-log scale, and
// compares it with the phase-diagram prediction.
//
// Run with: cargo run --release --example consensus_scaling

use voterlab::harness::{run_sweep_with, ExperimentConfig, Mode};
use voterlab::netgen::Variant;
use voterlab::theory::predict_exponent;

fn main() {
    let cfg = ExperimentConfig {
        beta: 2.0,
        gamma: 0.75,
        theta: 2.0,
        u: 0.5,
        variant: Variant::Snr,
        n_values: vec![128, 256, 512, 1024, 2048],
        replicas: None, // auto budget, max(64, 2^18 / n)
        mode: Mode::Consensus,
        base_seed: 2024,
        quenched: false,
        with_polylog: false,
        max_events_per_replica: None,
        out_csv: None,
        out_json: None,
        out_svg: None,
    };

    println!(
        "voter model: beta = {}, gamma = {}, theta = {}, u = {}",
        cfg.beta, cfg.gamma, cfg.theta, cfg.u
    );
    println!("n\tmean\tstderr\treplicas");
    let result = run_sweep_with(&cfg, |p| {
        println!("{}\t{:.4}\t{:.4}\t{}", p.n, p.mean, p.stderr, p.replicas);
    })
    .expect("sweep failed");

    println!();
    println!(
        "fitted exponent: {:.4} +/- {:.4}",
        result.fitted_exponent, result.fit_stderr
    );
    match result.predicted_exponent {
        Some(p) => println!("predicted exponent: {p:.4}"),
        None => println!("predicted exponent: none (critical line)"),
    }

    // The same point in the phase diagram, queried directly. Above
    // theta = 1/gamma the consensus time turns superlinear.
    println!();
    println!("phase diagram slice at beta = 2, gamma = 0.75:");
    for theta in [0.5, 1.0, 1.5, 2.0] {
        let e = predict_exponent(2.0, 0.75, theta).unwrap().unwrap();
        println!("  theta = {theta}: consensus time ~ N^{e:.3}");
    }
}
