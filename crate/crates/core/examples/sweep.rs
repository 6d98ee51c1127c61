//! Mean equilibrium of the stochastic benchmark on an `n_r x n_s` grid.
//!
//! `cargo run --release --example sweep -- 200 20000 4`

use std::time::Instant;

use snep_core::{benchmark, solve_streaming, Grid, GridSpec, SolverConfig, SweepOptions};

fn main() -> snep_core::Result<()> {
    let args: Vec<usize> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("numeric argument"))
        .collect();
    let (n_r, n_s, workers) = match args[..] {
        [r, s, w] => (r, s, w),
        [r, s] => (r, s, 1),
        _ => (50, 2000, 1),
    };
    let instance = benchmark::stochastic::<f64>();
    let grid = Grid::new(&instance, &GridSpec::new(5, n_r, n_s))?;
    let start = Instant::now();
    let summary = solve_streaming(
        &instance,
        &grid,
        &SolverConfig::default(),
        &SweepOptions {
            workers,
            max_flagged_fraction: 0.0,
        },
    )?;
    println!("cells      {}", summary.cells);
    println!("mean       {:?}", summary.moments.mean);
    println!("variance   {:?}", summary.moments.variance);
    println!("weight     {}", summary.moments.total_weight);
    println!("iterations {}", summary.total_iterations);
    println!("elapsed    {:.2?}", start.elapsed());
    Ok(())
}
