//! Complex spectrum of the effective Hamiltonian H = L − iΓ_op: eigenvalues
//! E_l = ε_l − iγ_l, trace identities, and conditioning diagnostics. Prints
//! the spectrum CSV on stdout.
//!
//!     cargo run --release --example complex_spectrum -- [n] [p] [m] [gamma] [seed]

use qwalk::dynamics::build_hamiltonian;
use qwalk::graph::{generate_er, place_traps, ErParams};
use qwalk::spectra::eig_complex;

fn main() -> qwalk::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(40, |a| a.parse().expect("n"));
    let p: f64 = args.next().map_or(0.5, |a| a.parse().expect("p"));
    let m: usize = args.next().map_or(1, |a| a.parse().expect("m"));
    let gamma: f64 = args.next().map_or(0.1, |a| a.parse().expect("gamma"));
    let seed: u64 = args.next().map_or(12345, |a| a.parse().expect("seed"));

    let draw = generate_er(&ErParams::new(n, p, seed)?, true, 1000)?;
    let traps = place_traps(&draw.graph, m, gamma, seed)?;
    let h = build_hamiltonian(&draw.graph, &traps);
    let spectrum = eig_complex(&h.matrix)?;

    let sum_gamma: f64 = spectrum.decay_rates().sum();
    let sum_eps: f64 = spectrum.eigenvalues.iter().map(|e| e.re).sum();
    let degree_sum: f64 = draw.graph.degrees().iter().sum::<usize>() as f64;
    eprintln!(
        "sum gamma_l = {sum_gamma:.6e} (Gamma*M = {:.6e})",
        gamma * m as f64
    );
    eprintln!("sum eps_l = {sum_eps:.6e} (sum of degrees = {degree_sum:.6e})");
    eprintln!(
        "biorthogonality residual {:.2e}, completeness residual {:.2e}",
        spectrum.biorth_residual(),
        spectrum.completeness_residual
    );

    spectrum.write_csv(std::io::stdout().lock())?;
    Ok(())
}
