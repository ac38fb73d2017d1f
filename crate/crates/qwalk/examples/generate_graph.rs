//! Draw a connected Erdős–Rényi graph and print it in the edge-list format,
//! plus a short structural summary on stderr.
//!
//!     cargo run --example generate_graph -- [n] [p] [seed]

use qwalk::graph::{generate_er, ErParams};

fn main() -> qwalk::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(40, |a| a.parse().expect("n"));
    let p: f64 = args.next().map_or(0.5, |a| a.parse().expect("p"));
    let seed: u64 = args.next().map_or(12345, |a| a.parse().expect("seed"));

    let params = ErParams::new(n, p, seed)?;
    let draw = generate_er(&params, true, 1000)?;
    let g = &draw.graph;

    let twins = g.find_twin_pairs();
    eprintln!(
        "n={} edges={} mean_degree={:.2} (expected {:.2}) rejected_draws={}",
        g.node_count(),
        g.edge_count(),
        2.0 * g.edge_count() as f64 / n as f64,
        params.mean_degree(),
        draw.attempts - 1,
    );
    eprintln!(
        "twin pairs: {} total, {} node-disjoint",
        twins.pairs.len(),
        twins.disjoint_count
    );

    g.write_edge_list(std::io::stdout().lock(), Some(&params))?;
    Ok(())
}
