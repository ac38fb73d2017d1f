//! Ensemble-averaged survival curves ⟨P_M⟩ and ⟨Π_M⟩ over R substrate
//! realizations. Classical and quantum runs share the same graphs and trap
//! placements because they derive from the same base seed.
//!
//!     cargo run --release --example ensemble_mean -- [n] [p] [m] [r] [seed]

use qwalk::analysis::run_ensemble;
use qwalk::dynamics::{TimeGrid, WalkKind};
use qwalk::graph::ErParams;

fn main() -> qwalk::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(40, |a| a.parse().expect("n"));
    let p: f64 = args.next().map_or(0.5, |a| a.parse().expect("p"));
    let m: usize = args.next().map_or(1, |a| a.parse().expect("m"));
    let r: usize = args.next().map_or(100, |a| a.parse().expect("r"));
    let seed: u64 = args.next().map_or(12345, |a| a.parse().expect("seed"));

    let params = ErParams::new(n, p, seed)?;
    let grid = TimeGrid::default_log();
    let gamma = 0.1;

    let classical = run_ensemble(&params, m, gamma, WalkKind::Classical, &grid, r, seed)?;
    let quantum = run_ensemble(&params, m, gamma, WalkKind::Quantum, &grid, r, seed)?;
    eprintln!(
        "R = {} effective (classical), {} effective (quantum)",
        classical.r_effective, quantum.r_effective
    );

    println!("# t, classical_mean, classical_stderr, quantum_mean, quantum_stderr");
    for i in 0..grid.len() {
        println!(
            "{:.6e}, {:.6e}, {:.6e}, {:.6e}, {:.6e}",
            classical.times[i],
            classical.mean[i],
            classical.stderr[i],
            quantum.mean[i],
            quantum.stderr[i]
        );
    }
    Ok(())
}
