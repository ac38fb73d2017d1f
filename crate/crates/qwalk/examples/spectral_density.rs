//! Compare the empirical Laplacian spectral density of a large ER graph with
//! the Wigner semicircle form. Prints `lambda, empirical, semicircle` CSV.
//!
//!     cargo run --release --example spectral_density -- [n] [p] [seed]

use qwalk::graph::{generate_er, ErParams};
use qwalk::spectra::{eig_symmetric, empirical_density, wigner_density};

fn main() -> qwalk::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(1000, |a| a.parse().expect("n"));
    let p: f64 = args.next().map_or(0.1, |a| a.parse().expect("p"));
    let seed: u64 = args.next().map_or(12345, |a| a.parse().expect("seed"));

    let params = ErParams::new(n, p, seed)?;
    let draw = generate_er(&params, true, 100)?;
    let spectrum = eig_symmetric(&draw.graph.laplacian())?;

    // The zero mode sits isolated below the bulk; drop it before binning.
    let bulk: Vec<f64> = spectrum.eigenvalues.iter().skip(1).cloned().collect();
    let hist = empirical_density(&bulk, 40)?;

    println!("# lambda, empirical, semicircle");
    for (center, density) in hist.bin_centers().iter().zip(&hist.density) {
        println!("{center:.6}, {density:.6e}, {:.6e}", wigner_density(*center, n, p));
    }
    Ok(())
}
