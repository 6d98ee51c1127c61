//! Cell-wise discretization of the random factors.
//!
//! Each factor's support is cut into cells; the Cartesian product of the
//! cells gives finitely many frozen problems, one per cell, weighted by the
//! cell probability (factors are independent). Solving all of them yields a
//! step function over the factor space whose moments approximate those of
//! the random equilibrium.
//!
//! Cells are ordered lexicographically with factors in the order
//! `r, alpha, beta_1..beta_m, q_bar_1..q_bar_m, s`, so the price scale `s`
//! varies fastest. A *row* is a run of cells that differ only in `s`; rows
//! are the unit of work and of warm starting.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::aggregate::{MomentAccumulator, MomentReport};
use crate::cournot::{CournotInstance, CournotOperator, Scenario};
use crate::distributions::{make_partition, Partition1D, RepresentativeRule};
use crate::error::{check_dim, invalid, Error, Result};
use crate::quadrature::GaussLegendre;
use crate::scalar::Scalar;
use crate::vi::{BoxSet, Extragradient, SolverConfig, VIProblem};

/// Default upper limit on the number of cells in one grid.
pub const DEFAULT_CELL_CAP: u128 = 100_000_000;

/// Which slot of the model a factor feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FactorRole {
    /// Additive cost shock `r`.
    CostShift,
    /// Additive price shock `alpha`.
    PriceShift,
    /// Multiplicative marginal-cost factor `beta_i` (0-based firm).
    CostScale(usize),
    /// Capacity `q_bar_i` (0-based firm).
    Capacity(usize),
    /// Price scale `s`.
    PriceScale,
}

impl FactorRole {
    /// Name used in configs and CSV headers (`beta_1` is the first firm).
    pub fn name(&self) -> String {
        match self {
            Self::CostShift => "r".into(),
            Self::PriceShift => "alpha".into(),
            Self::CostScale(i) => format!("beta_{}", i + 1),
            Self::Capacity(i) => format!("q_bar_{}", i + 1),
            Self::PriceScale => "s".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorResolution {
    pub cells: usize,
    pub rule: RepresentativeRule,
}

impl FactorResolution {
    pub fn new(cells: usize, rule: RepresentativeRule) -> Self {
        Self { cells, rule }
    }
}

/// Per-factor cell counts and representative rules.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub r: FactorResolution,
    pub s: FactorResolution,
    pub alpha: FactorResolution,
    pub beta: Vec<FactorResolution>,
    pub capacity: Vec<FactorResolution>,
    pub cell_cap: u128,
}

impl GridSpec {
    /// `n_r` and `n_s` cells with lower-endpoint representatives; every other
    /// factor gets one cell (lower endpoint for `alpha`/`beta`, conditional
    /// mean for capacities).
    pub fn new(firms: usize, n_r: usize, n_s: usize) -> Self {
        let lower = |cells| FactorResolution::new(cells, RepresentativeRule::LowerEndpoint);
        Self {
            r: lower(n_r),
            s: lower(n_s),
            alpha: lower(1),
            beta: vec![lower(1); firms],
            capacity: vec![FactorResolution::new(1, RepresentativeRule::ConditionalMean); firms],
            cell_cap: DEFAULT_CELL_CAP,
        }
    }

    pub fn with_rules(mut self, r: RepresentativeRule, s: RepresentativeRule) -> Self {
        self.r.rule = r;
        self.s.rule = s;
        self
    }
}

/// Cartesian grid over all factors of an instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    firms: usize,
    roles: Vec<FactorRole>,
    partitions: Vec<Partition1D<T>>,
    strides: Vec<usize>,
    total: usize,
}

impl<T: Scalar> Grid<T> {
    pub fn new(instance: &CournotInstance<T>, spec: &GridSpec) -> Result<Self> {
        let m = instance.num_firms();
        check_dim(m, spec.beta.len())?;
        check_dim(m, spec.capacity.len())?;
        let mut factors = vec![
            (FactorRole::CostShift, *instance.r_factor(), spec.r),
            (FactorRole::PriceShift, *instance.alpha_factor(), spec.alpha),
        ];
        for i in 0..m {
            factors.push((FactorRole::CostScale(i), instance.beta_factors()[i], spec.beta[i]));
        }
        for i in 0..m {
            factors.push((FactorRole::Capacity(i), instance.firms()[i].q_bar, spec.capacity[i]));
        }
        factors.push((FactorRole::PriceScale, *instance.s_factor(), spec.s));

        let mut roles = Vec::with_capacity(factors.len());
        let mut partitions = Vec::with_capacity(factors.len());
        for (role, factor, res) in factors {
            let p = make_partition(&factor, res.cells, res.rule).map_err(|e| match e {
                Error::InvalidParameter { reason, .. } => invalid(&role.name(), reason),
                other => other,
            })?;
            roles.push(role);
            partitions.push(p);
        }
        let total = partitions
            .iter()
            .fold(1u128, |acc, p| acc.saturating_mul(p.cells() as u128));
        if total > spec.cell_cap || total > usize::MAX as u128 {
            return Err(Error::CellCap {
                cells: total,
                cap: spec.cell_cap,
            });
        }
        let mut strides = vec![1usize; partitions.len()];
        for d in (0..partitions.len().saturating_sub(1)).rev() {
            strides[d] = strides[d + 1] * partitions[d + 1].cells();
        }
        Ok(Self {
            firms: m,
            roles,
            partitions,
            strides,
            total: total as usize,
        })
    }

    pub fn num_firms(&self) -> usize {
        self.firms
    }

    pub fn cell_count(&self) -> usize {
        self.total
    }

    pub fn roles(&self) -> &[FactorRole] {
        &self.roles
    }

    pub fn partitions(&self) -> &[Partition1D<T>] {
        &self.partitions
    }

    pub fn partition(&self, role: FactorRole) -> Option<&Partition1D<T>> {
        self.roles
            .iter()
            .position(|&r| r == role)
            .map(|i| &self.partitions[i])
    }

    /// Cells per row (the number of `s` cells).
    pub fn row_len(&self) -> usize {
        self.partitions.last().map_or(1, Partition1D::cells)
    }

    pub fn rows(&self) -> usize {
        self.total / self.row_len()
    }

    pub fn index_of(&self, flat: usize) -> CellIndex {
        let indices = self
            .strides
            .iter()
            .zip(&self.partitions)
            .map(|(&stride, p)| (flat / stride) % p.cells())
            .collect();
        CellIndex { indices }
    }

    pub fn flat_index(&self, index: &CellIndex) -> Result<usize> {
        check_dim(self.partitions.len(), index.indices.len())?;
        let mut flat = 0;
        for ((&i, &stride), p) in index.indices.iter().zip(&self.strides).zip(&self.partitions) {
            if i >= p.cells() {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    len: p.cells(),
                });
            }
            flat += i * stride;
        }
        Ok(flat)
    }

    /// Cell containing the factor point `y` (one coordinate per factor in
    /// grid order).
    pub fn locate(&self, y: &[T]) -> Result<usize> {
        check_dim(self.partitions.len(), y.len())?;
        let indices = self
            .partitions
            .iter()
            .zip(y)
            .map(|(p, &v)| p.locate(v))
            .collect();
        self.flat_index(&CellIndex { indices })
    }

    pub fn cell(&self, flat: usize) -> Result<(CellIndex, CellProblem<T>)> {
        if flat >= self.total {
            return Err(Error::IndexOutOfRange {
                index: flat,
                len: self.total,
            });
        }
        let index = self.index_of(flat);
        let problem = self.cell_problem(&index)?;
        Ok((index, problem))
    }

    fn cell_problem(&self, index: &CellIndex) -> Result<CellProblem<T>> {
        let m = self.firms;
        let mut r = T::zero();
        let mut s = T::one();
        let mut alpha = T::zero();
        let mut beta = vec![T::one(); m];
        let mut upper = vec![T::zero(); m];
        let mut weight = T::one();
        for ((role, p), &k) in self.roles.iter().zip(&self.partitions).zip(&index.indices) {
            let rep = p.representatives()[k];
            weight *= p.probabilities()[k];
            match *role {
                FactorRole::CostShift => r = rep,
                FactorRole::PriceShift => alpha = rep,
                FactorRole::CostScale(i) => beta[i] = rep,
                FactorRole::Capacity(i) => upper[i] = rep,
                FactorRole::PriceScale => s = rep,
            }
        }
        Ok(CellProblem {
            scenario: Scenario { r, s, beta, alpha },
            bounds: BoxSet::new(vec![T::zero(); m], upper)?,
            weight,
        })
    }
}

/// Per-factor cell indices in grid order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CellIndex {
    pub indices: Vec<usize>,
}

/// Frozen data of one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellProblem<T> {
    /// Representatives of `r`, `s`, `beta`, `alpha`.
    pub scenario: Scenario<T>,
    /// Box from the capacity representatives.
    pub bounds: BoxSet<T>,
    /// Product of per-factor cell probabilities.
    pub weight: T,
}

/// Every cell of `grid` in lexicographic order.
pub fn enumerate_cells<T: Scalar>(
    grid: &Grid<T>,
) -> impl Iterator<Item = (CellIndex, CellProblem<T>)> + '_ {
    (0..grid.cell_count()).map(move |flat| grid.cell(flat).expect("flat index in range"))
}

/// The finite-dimensional VI of one cell.
pub fn build_cell_problem<T: Scalar>(
    instance: &CournotInstance<T>,
    cell: &CellProblem<T>,
) -> Result<VIProblem<T, CournotOperator<T>>> {
    instance.vi_problem(&cell.scenario, cell.bounds.upper())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    /// Worker threads; results do not depend on this.
    pub workers: usize,
    /// Fraction of non-converged cells tolerated before the sweep fails.
    pub max_flagged_fraction: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            workers: 1,
            max_flagged_fraction: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellReport<T> {
    pub iterations: u32,
    pub residual: T,
    pub converged: bool,
}

/// Piecewise-constant approximate equilibrium over the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSolution<T> {
    grid: Grid<T>,
    solutions: Vec<T>,
    weights: Vec<T>,
    reports: Vec<CellReport<T>>,
}

impl<T: Scalar> StepSolution<T> {
    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.num_firms()
    }

    pub fn cell_count(&self) -> usize {
        self.weights.len()
    }

    pub fn solution(&self, cell: usize) -> &[T] {
        let m = self.dim();
        &self.solutions[cell * m..(cell + 1) * m]
    }

    pub fn weight(&self, cell: usize) -> T {
        self.weights[cell]
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn report(&self, cell: usize) -> &CellReport<T> {
        &self.reports[cell]
    }

    pub fn flagged_cells(&self) -> usize {
        self.reports.iter().filter(|r| !r.converged).count()
    }

    /// Value of the step function at factor point `y` (grid order).
    pub fn evaluate(&self, y: &[T]) -> Result<&[T]> {
        Ok(self.solution(self.grid.locate(y)?))
    }

    /// `cells.csv`: indices, representatives, weight, solution, residual,
    /// iterations, one row per cell.
    pub fn write_cells_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let names: Vec<String> = self.grid.roles().iter().map(FactorRole::name).collect();
        let mut header: Vec<String> = names.iter().map(|n| format!("idx_{n}")).collect();
        header.extend(names.iter().map(|n| format!("rep_{n}")));
        header.push("weight".into());
        header.extend((1..=self.dim()).map(|i| format!("q_{i}")));
        header.push("residual".into());
        header.push("iterations".into());
        writeln!(out, "{}", header.join(","))?;
        for cell in 0..self.cell_count() {
            let index = self.grid.index_of(cell);
            let mut fields: Vec<String> = index.indices.iter().map(|i| i.to_string()).collect();
            fields.extend(
                self.grid
                    .partitions()
                    .iter()
                    .zip(&index.indices)
                    .map(|(p, &k)| p.representatives()[k].to_string()),
            );
            fields.push(self.weights[cell].to_string());
            fields.extend(self.solution(cell).iter().map(|v| v.to_string()));
            let rep = &self.reports[cell];
            fields.push(rep.residual.to_string());
            fields.push(rep.iterations.to_string());
            writeln!(out, "{}", fields.join(","))?;
        }
        Ok(())
    }
}

/// Aggregates of a sweep that did not keep per-cell solutions.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary<T> {
    pub moments: MomentReport<T>,
    pub cells: usize,
    pub total_iterations: u64,
    pub max_residual: T,
}

struct RowOutcome<T> {
    acc: MomentAccumulator<T>,
    iterations: u64,
    max_residual: T,
    cells: Option<(Vec<T>, Vec<T>, Vec<CellReport<T>>)>,
}

/// Solves every cell of one row, warm-starting each from its predecessor.
fn solve_row<T: Scalar>(
    instance: &CournotInstance<T>,
    grid: &Grid<T>,
    config: &SolverConfig<T>,
    row: usize,
    keep: bool,
) -> Result<RowOutcome<T>> {
    let m = grid.num_firms();
    let n_s = grid.row_len();
    let first = row * n_s;
    let (_, head) = grid.cell(first)?;
    let s_partition = grid.partitions().last().expect("grid has factors");
    let row_weight = row_weight_direct(grid, first);
    let mut problem = build_cell_problem(instance, &head)?;
    let mut solver = Extragradient::new(*config)?;
    let mut x = problem.set.midpoint();
    let mut acc = MomentAccumulator::new(m);
    let mut iterations = 0u64;
    let mut max_residual = T::zero();
    let mut cells = keep.then(|| {
        (
            Vec::with_capacity(n_s * m),
            Vec::with_capacity(n_s),
            Vec::with_capacity(n_s),
        )
    });
    // `x` holds a converged solution of the previous cell when `x_solved`;
    // `prev` the one before it when `prev_solved`.
    let mut prev = vec![T::zero(); m];
    let mut last = vec![T::zero(); m];
    let (mut x_solved, mut prev_solved) = (false, false);
    for k in 0..n_s {
        problem
            .operator
            .set_price_scale(s_partition.representatives()[k]);
        let weight = row_weight * s_partition.probabilities()[k];
        // Linear extrapolation from the two previous cells of the row; the
        // representatives are equally spaced.
        last.copy_from_slice(&x);
        if x_solved && prev_solved {
            for (xi, &pi) in x.iter_mut().zip(&prev) {
                *xi = *xi + (*xi - pi);
            }
        }
        let report = match solver.solve(&problem, &mut x) {
            Ok(rep) => CellReport {
                iterations: rep.iterations.min(u32::MAX as usize) as u32,
                residual: rep.residual,
                converged: rep.converged,
            },
            Err(_) => {
                x.iter_mut().for_each(|v| *v = T::nan());
                CellReport {
                    iterations: 0,
                    residual: T::nan(),
                    converged: false,
                }
            }
        };
        iterations += report.iterations as u64;
        if report.residual > max_residual {
            max_residual = report.residual;
        }
        if x.iter().all(|v| v.is_finite()) {
            acc.add(weight, &x);
        }
        if !report.converged {
            acc.flag();
        }
        if let Some((sol, w, reps)) = cells.as_mut() {
            sol.extend_from_slice(&x);
            w.push(weight);
            reps.push(report);
        }
        if report.converged {
            prev.copy_from_slice(&last);
            prev_solved = x_solved;
            x_solved = true;
        } else {
            // Restart the next cell from the box midpoint.
            x = problem.set.midpoint();
            x_solved = false;
            prev_solved = false;
        }
    }
    Ok(RowOutcome {
        acc,
        iterations,
        max_residual,
        cells,
    })
}

fn row_weight_direct<T: Scalar>(grid: &Grid<T>, first: usize) -> T {
    let index = grid.index_of(first);
    let n = grid.partitions().len();
    grid.partitions()[..n - 1]
        .iter()
        .zip(&index.indices)
        .fold(T::one(), |w, (p, &k)| w * p.probabilities()[k])
}

fn sweep<T: Scalar>(
    instance: &CournotInstance<T>,
    grid: &Grid<T>,
    config: &SolverConfig<T>,
    options: &SweepOptions,
    keep: bool,
) -> Result<Vec<RowOutcome<T>>> {
    config.validate()?;
    if options.workers == 0 {
        return Err(invalid("workers", "must be at least 1"));
    }
    if !(0.0..=1.0).contains(&options.max_flagged_fraction) {
        return Err(invalid("max_flagged_fraction", "must lie in [0, 1]"));
    }
    check_dim(instance.num_firms(), grid.num_firms())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.workers)
        .build()
        .map_err(|e| invalid("workers", e.to_string()))?;
    let rows: Vec<RowOutcome<T>> = pool.install(|| {
        (0..grid.rows())
            .into_par_iter()
            .map(|row| solve_row(instance, grid, config, row, keep))
            .collect::<Result<_>>()
    })?;
    let flagged: usize = rows.iter().map(|r| r.acc.finish().flagged_cells).sum();
    let allowed = options.max_flagged_fraction * grid.cell_count() as f64;
    if flagged as f64 > allowed {
        return Err(Error::TooManyFlagged {
            flagged,
            total: grid.cell_count(),
            allowed: options.max_flagged_fraction,
        });
    }
    Ok(rows)
}

/// Solves every cell and keeps the full step solution.
pub fn solve_all<T: Scalar>(
    instance: &CournotInstance<T>,
    grid: &Grid<T>,
    config: &SolverConfig<T>,
    options: &SweepOptions,
) -> Result<StepSolution<T>> {
    let rows = sweep(instance, grid, config, options, true)?;
    let m = grid.num_firms();
    let mut solutions = Vec::with_capacity(grid.cell_count() * m);
    let mut weights = Vec::with_capacity(grid.cell_count());
    let mut reports = Vec::with_capacity(grid.cell_count());
    for row in rows {
        let (s, w, r) = row.cells.expect("cells kept");
        solutions.extend(s);
        weights.extend(w);
        reports.extend(r);
    }
    Ok(StepSolution {
        grid: grid.clone(),
        solutions,
        weights,
        reports,
    })
}

/// Solves every cell and folds the results into moments without storing
/// them; bit-identical to `expectation(&solve_all(..))`.
pub fn solve_streaming<T: Scalar>(
    instance: &CournotInstance<T>,
    grid: &Grid<T>,
    config: &SolverConfig<T>,
    options: &SweepOptions,
) -> Result<SweepSummary<T>> {
    let rows = sweep(instance, grid, config, options, false)?;
    let mut acc = MomentAccumulator::new(grid.num_firms());
    let mut total_iterations = 0;
    let mut max_residual = T::zero();
    for row in &rows {
        acc.merge(&row.acc);
        total_iterations += row.iterations;
        if row.max_residual > max_residual {
            max_residual = row.max_residual;
        }
    }
    Ok(SweepSummary {
        moments: acc.finish(),
        cells: grid.cell_count(),
        total_iterations,
        max_residual,
    })
}

/// Per-cell conditional means of a function over a product of partitions.
#[derive(Debug, Clone, PartialEq)]
pub struct CellAverages<T> {
    /// Cell values in lexicographic order (last partition fastest).
    pub values: Vec<T>,
    /// Cell probabilities (product of factor probabilities).
    pub probabilities: Vec<T>,
    /// Cells where the 16- and 8-point rules disagree beyond tolerance.
    pub unconverged_cells: usize,
}

impl<T: Scalar> CellAverages<T> {
    /// `(sum_cells P_cell |v_cell|^p)^(1/p)`.
    pub fn lp_norm(&self, p: T) -> T {
        crate::summation::compensated_sum(
            self.values
                .iter()
                .zip(&self.probabilities)
                .map(|(&v, &w)| w * v.abs().powf(p)),
        )
        .powf(T::one() / p)
    }
}

const TRUNCATION_ORDER: usize = 16;
const TRUNCATION_CHECK_ORDER: usize = 8;
const TRUNCATION_RTOL: f64 = 1e-8;

/// Density-weighted quadrature nodes of one cell of one factor.
fn cell_nodes<T: Scalar>(p: &Partition1D<T>, k: usize, rule: &GaussLegendre<T>) -> Vec<(T, T)> {
    let factor = p.factor();
    if factor.is_constant() {
        return vec![(p.representatives()[k], T::one())];
    }
    let (a, b) = p.cell_bounds(k);
    rule.mapped(a, b).map(|(x, w)| (x, w * factor.pdf(x))).collect()
}

/// Tensor-product conditional mean of `target` over one cell.
fn cell_mean<T: Scalar, F: Fn(&[T]) -> T>(nodes: &[Vec<(T, T)>], target: &F) -> Option<T> {
    let d = nodes.len();
    let mut idx = vec![0usize; d];
    let mut point: Vec<T> = nodes.iter().map(|n| n[0].0).collect();
    let pivot = target(&point);
    let mut weighted = T::zero();
    let mut mass = T::zero();
    loop {
        let mut w = T::one();
        for (dim, &i) in idx.iter().enumerate() {
            point[dim] = nodes[dim][i].0;
            w *= nodes[dim][i].1;
        }
        // Deviations from the first node keep constants exact.
        weighted += w * (target(&point) - pivot);
        mass += w;
        let mut dim = d;
        loop {
            if dim == 0 {
                return (mass > T::zero()).then(|| pivot + weighted / mass);
            }
            dim -= 1;
            idx[dim] += 1;
            if idx[dim] < nodes[dim].len() {
                break;
            }
            idx[dim] = 0;
        }
    }
}

/// Mean-value truncation: replaces `target` by its conditional expectation
/// on every cell of the product partition; zero on null cells.
///
/// `target` receives one coordinate per partition.
pub fn mean_truncation<T: Scalar, F: Fn(&[T]) -> T>(
    partitions: &[Partition1D<T>],
    target: F,
) -> Result<CellAverages<T>> {
    if partitions.is_empty() {
        return Err(invalid("partitions", "need at least one factor"));
    }
    let fine = GaussLegendre::new(TRUNCATION_ORDER)?;
    let coarse = GaussLegendre::new(TRUNCATION_CHECK_ORDER)?;
    let shape: Vec<usize> = partitions.iter().map(Partition1D::cells).collect();
    let total: usize = shape.iter().product();
    let mut values = Vec::with_capacity(total);
    let mut probabilities = Vec::with_capacity(total);
    let mut unconverged = 0;
    let mut idx = vec![0usize; shape.len()];
    for _ in 0..total {
        let prob = partitions
            .iter()
            .zip(&idx)
            .fold(T::one(), |w, (p, &k)| w * p.probabilities()[k]);
        let value = if prob > T::zero() {
            let fine_nodes: Vec<_> = partitions
                .iter()
                .zip(&idx)
                .map(|(p, &k)| cell_nodes(p, k, &fine))
                .collect();
            let coarse_nodes: Vec<_> = partitions
                .iter()
                .zip(&idx)
                .map(|(p, &k)| cell_nodes(p, k, &coarse))
                .collect();
            match (cell_mean(&fine_nodes, &target), cell_mean(&coarse_nodes, &target)) {
                (Some(f), Some(c)) => {
                    if (f - c).abs() > T::lit(TRUNCATION_RTOL) * (T::one() + f.abs()) {
                        unconverged += 1;
                    }
                    f
                }
                _ => {
                    unconverged += 1;
                    T::zero()
                }
            }
        } else {
            T::zero()
        };
        values.push(value);
        probabilities.push(prob);
        for d in (0..shape.len()).rev() {
            idx[d] += 1;
            if idx[d] < shape[d] {
                break;
            }
            idx[d] = 0;
        }
    }
    Ok(CellAverages {
        values,
        probabilities,
        unconverged_cells: unconverged,
    })
}

/// `(E |target|^p)^(1/p)` under the product of the partitions' factors,
/// integrated with the same per-cell rule as [`mean_truncation`].
pub fn lp_norm_of<T: Scalar, F: Fn(&[T]) -> T>(
    partitions: &[Partition1D<T>],
    target: F,
    p: T,
) -> Result<T> {
    let powered = mean_truncation(partitions, |y| target(y).abs().powf(p))?;
    let total = crate::summation::compensated_sum(
        powered
            .values
            .iter()
            .zip(&powered.probabilities)
            .map(|(&v, &w)| w * v),
    );
    Ok(total.powf(T::one() / p))
}
