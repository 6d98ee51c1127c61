//! Moments of step-function solutions and refinement-ladder reports.

use std::io::{self, Write};

use crate::discretize::StepSolution;
use crate::error::{check_dim, invalid, Result};
use crate::scalar::Scalar;
use crate::summation::CompensatedSum;

/// Weighted first and second moments, accumulated with compensation.
///
/// Partial accumulators merge associatively up to round-off; the sweep
/// merges them in a fixed order so results do not depend on scheduling.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentAccumulator<T> {
    weight: CompensatedSum<T>,
    first: Vec<CompensatedSum<T>>,
    second: Vec<CompensatedSum<T>>,
    flagged: usize,
}

impl<T: Scalar> MomentAccumulator<T> {
    pub fn new(dim: usize) -> Self {
        Self {
            weight: CompensatedSum::new(),
            first: vec![CompensatedSum::new(); dim],
            second: vec![CompensatedSum::new(); dim],
            flagged: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.first.len()
    }

    #[inline]
    pub fn add(&mut self, weight: T, values: &[T]) {
        debug_assert_eq!(values.len(), self.dim());
        self.weight.add(weight);
        for ((f, s), &v) in self.first.iter_mut().zip(&mut self.second).zip(values) {
            let wv = weight * v;
            f.add(wv);
            s.add(wv * v);
        }
    }

    pub fn flag(&mut self) {
        self.flagged += 1;
    }

    pub fn merge(&mut self, other: &Self) {
        debug_assert_eq!(other.dim(), self.dim());
        self.weight.merge(&other.weight);
        for (a, b) in self.first.iter_mut().zip(&other.first) {
            a.merge(b);
        }
        for (a, b) in self.second.iter_mut().zip(&other.second) {
            a.merge(b);
        }
        self.flagged += other.flagged;
    }

    pub fn finish(&self) -> MomentReport<T> {
        let mean: Vec<T> = self.first.iter().map(CompensatedSum::value).collect();
        let second_moment: Vec<T> = self.second.iter().map(CompensatedSum::value).collect();
        let variance = mean
            .iter()
            .zip(&second_moment)
            .map(|(&m, &s)| (s - m * m).max(T::zero()))
            .collect();
        MomentReport {
            mean,
            second_moment,
            variance,
            total_weight: self.weight.value(),
            flagged_cells: self.flagged,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport<T> {
    /// `sum_cells weight * value`.
    pub mean: Vec<T>,
    pub second_moment: Vec<T>,
    /// `second_moment - mean^2`, floored at zero.
    pub variance: Vec<T>,
    pub total_weight: T,
    pub flagged_cells: usize,
}

impl<T: Scalar> MomentReport<T> {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Writes `component,mean,variance` rows; components are 1-based.
    pub fn write_summary_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "component,mean,variance")?;
        for (i, (m, v)) in self.mean.iter().zip(&self.variance).enumerate() {
            writeln!(out, "{},{},{}", i + 1, m, v)?;
        }
        Ok(())
    }
}

/// Expectation and second moments of a step solution.
///
/// Cells are folded row by row in grid order, the same grouping the
/// streaming sweep uses, so both paths give bit-identical reports.
pub fn expectation<T: Scalar>(solution: &StepSolution<T>) -> MomentReport<T> {
    let m = solution.dim();
    let row_len = solution.grid().row_len();
    let mut total = MomentAccumulator::new(m);
    for row in 0..solution.grid().rows() {
        let mut acc = MomentAccumulator::new(m);
        for cell in row * row_len..(row + 1) * row_len {
            let report = solution.report(cell);
            let x = solution.solution(cell);
            if x.iter().all(|v| v.is_finite()) {
                acc.add(solution.weight(cell), x);
            }
            if !report.converged {
                acc.flag();
            }
        }
        total.merge(&acc);
    }
    total.finish()
}

/// One rung of a refinement ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderLevel<T> {
    /// Cells per factor at this level, in a caller-chosen order (`n_r, n_s, ...`).
    pub cells: Vec<usize>,
    pub report: MomentReport<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow<T> {
    /// Index of the finer level of the pair (starting at 1).
    pub level: usize,
    pub cells: Vec<usize>,
    /// `|mean^(level) - mean^(level-1)|` componentwise.
    pub delta: Vec<T>,
    pub max_delta: T,
}

/// Successive mean differences along a refinement ladder.
pub fn convergence_report<T: Scalar>(levels: &[LadderLevel<T>]) -> Result<Vec<ConvergenceRow<T>>> {
    if levels.len() < 2 {
        return Err(invalid("levels", "need at least two reports"));
    }
    let m = levels[0].report.dim();
    for level in levels {
        check_dim(m, level.report.dim())?;
    }
    Ok(levels
        .windows(2)
        .enumerate()
        .map(|(i, pair)| {
            let delta: Vec<T> = pair[1]
                .report
                .mean
                .iter()
                .zip(&pair[0].report.mean)
                .map(|(&a, &b)| (a - b).abs())
                .collect();
            let max_delta = delta.iter().copied().fold(T::zero(), T::max);
            ConvergenceRow {
                level: i + 1,
                cells: pair[1].cells.clone(),
                delta,
                max_delta,
            }
        })
        .collect())
}

/// Writes `level,n_r,n_s,delta_1..delta_m,max_delta`; the cell-count columns
/// follow `factor_names`.
pub fn write_convergence_csv<T: Scalar, W: Write>(
    rows: &[ConvergenceRow<T>],
    factor_names: &[&str],
    mut out: W,
) -> io::Result<()> {
    let m = rows.first().map_or(0, |r| r.delta.len());
    let mut header = vec!["level".to_string()];
    header.extend(factor_names.iter().map(|n| format!("n_{n}")));
    header.extend((1..=m).map(|i| format!("delta_{i}")));
    header.push("max_delta".into());
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        let mut fields = vec![row.level.to_string()];
        fields.extend(row.cells.iter().map(|c| c.to_string()));
        fields.extend(row.delta.iter().map(|d| d.to_string()));
        fields.push(row.max_delta.to_string());
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}
