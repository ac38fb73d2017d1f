//! Transport-efficiency comparison across dilutions: ensemble survival at a
//! probe dilution p' divided by the reference z̄ = N/2 curve. Ratios above 1
//! mean the probe dilution keeps more probability alive.
//!
//!     cargo run --release --example ratio_curves -- [n] [p_probe] [r] [seed]

use qwalk::analysis::{ratio_curves, run_ensemble};
use qwalk::dynamics::{TimeGrid, WalkKind};
use qwalk::graph::ErParams;

fn main() -> qwalk::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(100, |a| a.parse().expect("n"));
    let probe: f64 = args.next().map_or(0.05, |a| a.parse().expect("p_probe"));
    let r: usize = args.next().map_or(100, |a| a.parse().expect("r"));
    let seed: u64 = args.next().map_or(12345, |a| a.parse().expect("seed"));
    let (m, gamma) = (1usize, 0.1);

    let grid = TimeGrid::log(1e-1, 1e3, 150)?;
    let reference = run_ensemble(
        &ErParams::new(n, 0.5, seed)?,
        m,
        gamma,
        WalkKind::Quantum,
        &grid,
        r,
        seed,
    )?;
    let probed = run_ensemble(
        &ErParams::new(n, probe, seed)?,
        m,
        gamma,
        WalkKind::Quantum,
        &grid,
        r,
        seed,
    )?;

    let ratio = ratio_curves(&probed, &reference)?;
    println!("# t, ratio, stderr");
    for i in 0..ratio.times.len() {
        println!(
            "{:.6e}, {:.6e}, {:.6e}",
            ratio.times[i], ratio.ratio[i], ratio.stderr[i]
        );
    }
    Ok(())
}
