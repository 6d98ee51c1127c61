//! Monte Carlo reference for the mean equilibrium.
//!
//! Each sample draws every factor by inverse-CDF from its own uniform, solves
//! the frozen VI exactly (to solver tolerance) and averages. Sample `i` uses
//! stream `i` of a ChaCha8 generator keyed by the seed, so any sample can be
//! reproduced on its own and results do not depend on the worker count.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cournot::{CournotInstance, Scenario};
use crate::distributions::RandomFactor;
use crate::error::{invalid, Result};
use crate::scalar::Scalar;
use crate::summation::CompensatedSum;
use crate::vi::{solve_vi, Extragradient, SolverConfig};

/// Samples per work unit; chunks are merged in order.
const CHUNK: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport<T> {
    pub mean: Vec<T>,
    /// Standard error of each mean component.
    pub standard_error: Vec<T>,
    pub n_samples: usize,
    pub seed: u64,
    /// Samples whose solve did not converge; they are left out of the mean.
    pub failed_solves: usize,
}

impl<T: Scalar> OracleReport<T> {
    /// Writes `component,mc_mean,std_error,n_samples,seed`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "component,mc_mean,std_error,n_samples,seed")?;
        for (i, (m, se)) in self.mean.iter().zip(&self.standard_error).enumerate() {
            writeln!(out, "{},{},{},{},{}", i + 1, m, se, self.n_samples, self.seed)?;
        }
        Ok(())
    }
}

/// One draw of all factors: the scenario and the capacity vector.
///
/// Uniforms are consumed in the order `r, s, alpha, beta_1..m, q_bar_1..m`,
/// one per factor, constants included.
pub fn sample_scenario<T: Scalar>(
    instance: &CournotInstance<T>,
    seed: u64,
    index: u64,
) -> (Scenario<T>, Vec<T>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut draw = |f: &RandomFactor<T>| {
        let u: f64 = rng.gen();
        f.quantile(T::lit(u))
    };
    let r = draw(instance.r_factor());
    let s = draw(instance.s_factor());
    let alpha = draw(instance.alpha_factor());
    let beta = instance.beta_factors().iter().map(&mut draw).collect();
    let bounds = instance.firms().iter().map(|f| draw(&f.q_bar)).collect();
    (Scenario { r, s, beta, alpha }, bounds)
}

struct Partial<T> {
    first: Vec<CompensatedSum<T>>,
    second: Vec<CompensatedSum<T>>,
    count: usize,
    failed: usize,
}

impl<T: Scalar> Partial<T> {
    fn new(m: usize) -> Self {
        Self {
            first: vec![CompensatedSum::new(); m],
            second: vec![CompensatedSum::new(); m],
            count: 0,
            failed: 0,
        }
    }

    fn merge(&mut self, other: &Self) {
        for (a, b) in self.first.iter_mut().zip(&other.first) {
            a.merge(b);
        }
        for (a, b) in self.second.iter_mut().zip(&other.second) {
            a.merge(b);
        }
        self.count += other.count;
        self.failed += other.failed;
    }
}

/// Monte Carlo estimate of the expected equilibrium from `n` samples.
pub fn monte_carlo_mean<T: Scalar>(
    instance: &CournotInstance<T>,
    n: usize,
    seed: u64,
    config: &SolverConfig<T>,
    workers: usize,
) -> Result<OracleReport<T>> {
    if n == 0 {
        return Err(invalid("n_samples", "must be at least 1"));
    }
    if workers == 0 {
        return Err(invalid("workers", "must be at least 1"));
    }
    instance.validate()?;
    let m = instance.num_firms();
    let (mean_scenario, mean_bounds) = instance.mean_scenario();
    let (start, _) = solve_vi(&instance.vi_problem(&mean_scenario, &mean_bounds)?, config, None)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| invalid("workers", e.to_string()))?;
    let chunks = n.div_ceil(CHUNK);
    let partials: Vec<Partial<T>> = pool.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(|c| -> Result<Partial<T>> {
                let mut part = Partial::new(m);
                let mut solver = Extragradient::new(*config)?;
                let mut x = vec![T::zero(); m];
                for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                    let (scenario, bounds) = sample_scenario(instance, seed, i as u64);
                    let problem = instance.vi_problem(&scenario, &bounds)?;
                    x.copy_from_slice(&start);
                    match solver.solve(&problem, &mut x) {
                        Ok(rep) if rep.converged => {
                            for ((f, s), &v) in part.first.iter_mut().zip(&mut part.second).zip(&x) {
                                f.add(v);
                                s.add(v * v);
                            }
                            part.count += 1;
                        }
                        _ => part.failed += 1,
                    }
                }
                Ok(part)
            })
            .collect::<Result<_>>()
    })?;
    let mut total = Partial::new(m);
    for p in &partials {
        total.merge(p);
    }
    let count = T::from_usize(total.count).expect("sample count fits");
    let mut mean = Vec::with_capacity(m);
    let mut standard_error = Vec::with_capacity(m);
    for (f, s) in total.first.iter().zip(&total.second) {
        if total.count == 0 {
            mean.push(T::nan());
            standard_error.push(T::nan());
            continue;
        }
        let mu = f.value() / count;
        let var = if total.count > 1 {
            ((s.value() - count * mu * mu) / (count - T::one())).max(T::zero())
        } else {
            T::zero()
        };
        mean.push(mu);
        standard_error.push((var / count).sqrt());
    }
    Ok(OracleReport {
        mean,
        standard_error,
        n_samples: total.count,
        seed,
        failed_solves: total.failed,
    })
}
