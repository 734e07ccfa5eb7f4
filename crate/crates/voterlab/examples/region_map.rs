// Maps the (beta, gamma) parameter plane: giant fraction, the
// supercriticality integral, and the consensus-time exponent predicted for
// each phase.
//
// Run with: cargo run --example region_map

use voterlab::theory::{
    assumption_integral, gamma_grid, min_beta_highgamma, min_beta_uniform, predict_exponent,
    region_point, solve_rho,
};

fn main() {
    println!("giant fraction of the embedded uniform graph:");
    println!("beta\trho");
    for &beta in &[0.5, 1.0, 1.5, 2.0, 3.0, 4.0] {
        println!("{beta}\t{:.6}", solve_rho(beta));
    }

    println!();
    println!("phase table (rows gamma, columns beta), letters S/c/G/U:");
    print!("      ");
    let betas = [0.1, 0.3, 0.5, 0.9, 1.5, 2.5, 4.0];
    for b in betas {
        print!("{b:>6}");
    }
    println!();
    for &gamma in &[0.05, 0.15, 0.25, 0.35, 0.45, 0.55, 0.75, 0.95] {
        print!("{gamma:>6}");
        for &beta in &betas {
            let p = region_point(beta, gamma).unwrap();
            let letter = match p.regime {
                voterlab::theory::Regime::Subcritical => 'S',
                voterlab::theory::Regime::Critical => 'c',
                voterlab::theory::Regime::Supercritical => 'G',
                voterlab::theory::Regime::Ultrasmall => 'U',
            };
            print!("{letter:>6}");
        }
        println!();
    }

    // Smallest densities for which the supercriticality integral drops
    // below one, uniformly over gamma and over gamma >= 1/2.
    println!();
    println!("minimal beta with integral < 1 on all of (0, 1):  {:.6}", min_beta_uniform());
    println!("minimal beta with integral < 1 on [1/2, 1):       {:.6}", min_beta_highgamma());
    let worst = gamma_grid()
        .into_iter()
        .map(|g| assumption_integral(3.0, g).unwrap())
        .fold(0.0f64, f64::max);
    println!("largest integral over the gamma grid at beta = 3: {worst:.6}");

    // Predicted consensus-time exponents across the phases. A dash marks
    // the critical line, where no power law is claimed.
    println!();
    println!("predicted exponent of E[consensus time] in N (beta = 2):");
    println!("gamma\ttheta=0\ttheta=1\ttheta=2");
    for &gamma in &[0.3, 0.45, 0.55, 0.6, 0.75, 0.9] {
        print!("{gamma}");
        for theta in [0.0, 1.0, 2.0] {
            match predict_exponent(2.0, gamma, theta).unwrap() {
                Some(c) => print!("\t{c:.3}"),
                None => print!("\t-"),
            }
        }
        println!();
    }
    println!();
    println!("same at beta = 0.2 (subcritical for gamma < 0.4):");
    println!("gamma\ttheta=0\ttheta=0.5\ttheta=1\ttheta=2");
    for &gamma in &[0.1, 0.2, 0.3, 0.35] {
        print!("{gamma}");
        for theta in [0.0, 0.5, 1.0, 2.0] {
            match predict_exponent(0.2, gamma, theta).unwrap() {
                Some(c) => print!("\t{c:.3}"),
                None => print!("\t-"),
            }
        }
        println!();
    }
}
