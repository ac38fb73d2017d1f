//! Long-time average χ of the return probability, a localization measure:
//! χ̄ grows toward 1 as eigenmodes confine the walker. Printed for complete
//! graphs K_N and for ER graphs across dilutions.
//!
//!     cargo run --release --example localization -- [n] [seed]

use qwalk::analysis::{long_time_average, DEFAULT_DEGENERACY_TOL_FACTOR};
use qwalk::graph::{generate_er, ErParams, Graph};
use qwalk::spectra::eig_symmetric;

fn chi_bar(g: &Graph) -> qwalk::Result<f64> {
    let spectrum = eig_symmetric(&g.laplacian())?;
    Ok(long_time_average(&spectrum, DEFAULT_DEGENERACY_TOL_FACTOR).chi_bar)
}

fn main() -> qwalk::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(32, |a| a.parse().expect("n"));
    let seed: u64 = args.next().map_or(12345, |a| a.parse().expect("seed"));

    for k in [4usize, 8, 16, 32] {
        let mut edges = Vec::new();
        for i in 0..k {
            for j in (i + 1)..k {
                edges.push((i, j));
            }
        }
        let g = Graph::from_edges(k, &edges)?;
        println!("K_{k}: chi_bar = {:.6}", chi_bar(&g)?);
    }

    for p in [0.11, 0.3, 0.5, 0.7, 0.95] {
        let draw = generate_er(&ErParams::new(n, p, seed)?, true, 1000)?;
        println!("ER(n={n}, p={p}): chi_bar = {:.6}", chi_bar(&draw.graph)?);
    }
    Ok(())
}
