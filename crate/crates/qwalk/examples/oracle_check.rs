//! Cross-check of the two propagation routes: spectral mode sums against the
//! matrix-exponential oracle, for both walk kinds on a random instance.
//!
//!     cargo run --release --example oracle_check -- [n] [p] [seed]

use num_complex::Complex64;

use qwalk::dynamics::{
    build_hamiltonian, build_transfer, ctqw_survival, ctqw_survival_oracle, ctrw_survival, expm,
    CurveMeta, TimeGrid,
};
use qwalk::graph::{generate_er, place_traps, ErParams};

fn main() -> qwalk::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(16, |a| a.parse().expect("n"));
    let p: f64 = args.next().map_or(0.5, |a| a.parse().expect("p"));
    let seed: u64 = args.next().map_or(12345, |a| a.parse().expect("seed"));
    let (m, gamma) = (2usize, 0.2);

    let draw = generate_er(&ErParams::new(n, p, seed)?, true, 1000)?;
    let traps = place_traps(&draw.graph, m, gamma, seed)?;
    let grid = TimeGrid::log(1e-1, 1e2, 30)?;
    let meta = CurveMeta::bare(n, m, gamma);

    let h = build_hamiltonian(&draw.graph, &traps);
    let spectral_q = ctqw_survival(&h, &grid, meta.clone())?;
    let oracle_q = ctqw_survival_oracle(&h, &grid, meta.clone())?;
    let sup_q = spectral_q
        .values
        .iter()
        .zip(&oracle_q.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);

    let t_op = build_transfer(&draw.graph, &traps);
    let spectral_c = ctrw_survival(&t_op, &grid, meta)?;
    let free: Vec<usize> = (0..n).filter(|&k| !traps.is_trap(k)).collect();
    let mut sup_c = 0.0f64;
    for (i, &t) in grid.times().iter().enumerate() {
        let u = expm(&t_op.matrix.mapv(|x| Complex64::new(x * t, 0.0)))?;
        let mut s = 0.0;
        for &j in &free {
            for &k in &free {
                s += u[[k, j]].re;
            }
        }
        s /= free.len() as f64;
        sup_c = sup_c.max((spectral_c.values[i] - s).abs());
    }

    println!("quantum  spectral vs oracle sup-norm: {sup_q:.3e}");
    println!("classical spectral vs oracle sup-norm: {sup_c:.3e}");
    Ok(())
}
