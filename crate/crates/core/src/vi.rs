//! Finite-dimensional variational inequalities over boxes.
//!
//! A problem is `find x in K with <F(x) - c, z - x> >= 0 for all z in K`
//! where `K = {x : lower <= x <= upper}`. The solver is a projected
//! extragradient method with a backtracking step size, which only needs
//! monotonicity and continuity of `F` (no Lipschitz constant up front).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, invalid, Error, Result};
use crate::scalar::{dist2, dot, Scalar};

/// Axis-aligned box `{x : lower <= x <= upper}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxSet<T> {
    lower: Vec<T>,
    upper: Vec<T>,
}

impl<T: Scalar> BoxSet<T> {
    pub fn new(lower: Vec<T>, upper: Vec<T>) -> Result<Self> {
        check_dim(lower.len(), upper.len())?;
        for (i, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(invalid("box", format!("bound {i} is not finite")));
            }
            if lo > hi {
                return Err(invalid(
                    "box",
                    format!("lower bound {lo} exceeds upper bound {hi} in coordinate {i}"),
                ));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The cube `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: T, hi: T) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[T] {
        &self.lower
    }

    pub fn upper(&self) -> &[T] {
        &self.upper
    }

    pub fn contains(&self, x: &[T]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&v, (&lo, &hi))| lo <= v && v <= hi)
    }

    pub fn midpoint(&self) -> Vec<T> {
        let two = T::lit(2.0);
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&lo, &hi)| lo + (hi - lo) / two)
            .collect()
    }

    /// True if some coordinate is pinned (`lower == upper`).
    pub fn is_degenerate(&self) -> bool {
        self.lower.iter().zip(&self.upper).any(|(lo, hi)| lo == hi)
    }

    /// Euclidean projection (componentwise clamp).
    pub fn project(&self, point: &[T]) -> Result<Vec<T>> {
        check_dim(self.dim(), point.len())?;
        let mut out = point.to_vec();
        self.project_in_place(&mut out);
        Ok(out)
    }

    /// Clamps `x` into the box. `x.len()` must equal `self.dim()`.
    #[inline]
    pub fn project_in_place(&self, x: &mut [T]) {
        debug_assert_eq!(x.len(), self.dim());
        for ((v, &lo), &hi) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *v = v.max(lo).min(hi);
        }
    }
}

/// Euclidean projection of `point` onto `set`.
pub fn project<T: Scalar>(point: &[T], set: &BoxSet<T>) -> Result<Vec<T>> {
    set.project(point)
}

/// A vector field `R^m -> R^m`.
pub trait Operator<T> {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[T], out: &mut [T]);
}

impl<T, O: Operator<T> + ?Sized> Operator<T> for &O {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn apply(&self, x: &[T], out: &mut [T]) {
        (**self).apply(x, out)
    }
}

/// Adapts a closure `|x, out|` into an [`Operator`].
#[derive(Clone)]
pub struct FnOperator<F> {
    dim: usize,
    f: F,
}

impl<F> FnOperator<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<T, F: Fn(&[T], &mut [T])> Operator<T> for FnOperator<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn apply(&self, x: &[T], out: &mut [T]) {
        (self.f)(x, out)
    }
}

/// `F(x) = M x + d` with a dense row-major `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineOperator<T> {
    dim: usize,
    matrix: Vec<T>,
    offset: Vec<T>,
}

impl<T: Scalar> AffineOperator<T> {
    pub fn new(matrix: Vec<T>, offset: Vec<T>) -> Result<Self> {
        let dim = offset.len();
        check_dim(dim * dim, matrix.len())?;
        Ok(Self {
            dim,
            matrix,
            offset,
        })
    }

    pub fn matrix(&self) -> &[T] {
        &self.matrix
    }

    pub fn offset(&self) -> &[T] {
        &self.offset
    }
}

impl<T: Scalar> Operator<T> for AffineOperator<T> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn apply(&self, x: &[T], out: &mut [T]) {
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.matrix[i * self.dim..(i + 1) * self.dim];
            *o = dot(row, x) + self.offset[i];
        }
    }
}

/// `find x in set : <operator(x) - shift, z - x> >= 0 for all z in set`.
#[derive(Debug, Clone)]
pub struct VIProblem<T, O> {
    pub operator: O,
    pub shift: Vec<T>,
    pub set: BoxSet<T>,
    /// Set by constructors that know the operator is strictly monotone, so
    /// the solution is unique.
    pub strictly_monotone: bool,
}

impl<T: Scalar, O: Operator<T>> VIProblem<T, O> {
    pub fn new(operator: O, shift: Vec<T>, set: BoxSet<T>) -> Result<Self> {
        check_dim(set.dim(), operator.dim())?;
        check_dim(set.dim(), shift.len())?;
        Ok(Self {
            operator,
            shift,
            set,
            strictly_monotone: false,
        })
    }

    pub fn with_strict_monotonicity(mut self) -> Self {
        self.strictly_monotone = true;
        self
    }

    pub fn dim(&self) -> usize {
        self.set.dim()
    }

    /// Writes `operator(x) - shift` into `out`.
    #[inline]
    pub fn field(&self, x: &[T], out: &mut [T]) {
        self.operator.apply(x, out);
        for (o, &c) in out.iter_mut().zip(&self.shift) {
            *o -= c;
        }
    }
}

/// `||x - P(x - gamma (F(x) - c))||_2`; zero exactly at solutions.
pub fn natural_residual<T: Scalar, O: Operator<T>>(
    problem: &VIProblem<T, O>,
    point: &[T],
    gamma: T,
) -> Result<T> {
    if !(gamma > T::zero()) {
        return Err(invalid("gamma", "must be positive"));
    }
    check_dim(problem.dim(), point.len())?;
    let mut f = vec![T::zero(); point.len()];
    problem.field(point, &mut f);
    let mut trial: Vec<T> = point.iter().zip(&f).map(|(&x, &g)| x - gamma * g).collect();
    problem.set.project_in_place(&mut trial);
    Ok(dist2(point, &trial))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig<T> {
    /// Natural-residual stopping tolerance (absolute, in solution units).
    pub tolerance: T,
    pub max_iterations: usize,
    pub initial_step: T,
    pub step_shrink: T,
    /// Scaling used in the natural residual.
    pub gamma: T,
}

impl<T: Scalar> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            tolerance: T::lit(1e-8),
            max_iterations: 20_000,
            initial_step: T::one(),
            step_shrink: T::lit(0.5),
            gamma: T::one(),
        }
    }
}

impl<T: Scalar> SolverConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > T::zero()) {
            return Err(invalid("tolerance", "must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(invalid("max_iterations", "must be at least 1"));
        }
        if !(self.initial_step > T::zero()) || !self.initial_step.is_finite() {
            return Err(invalid("initial_step", "must be positive and finite"));
        }
        if !(self.step_shrink > T::zero() && self.step_shrink < T::one()) {
            return Err(invalid("step_shrink", "must lie in (0, 1)"));
        }
        if !(self.gamma > T::zero()) || !self.gamma.is_finite() {
            return Err(invalid("gamma", "must be positive and finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveReport<T> {
    pub iterations: usize,
    pub evaluations: usize,
    pub residual: T,
    pub converged: bool,
    /// Step size in effect when the solve stopped.
    pub final_step: T,
    /// Whether the problem was declared strictly monotone, which makes the
    /// returned point the unique solution.
    pub uniqueness_certified: bool,
}

/// Acceptance ratio for the backtracking test `tau ||F(x)-F(y)|| <= nu ||x-y||`.
const LIPSCHITZ_RATIO: f64 = 0.9;

/// Reusable extragradient solver.
///
/// Holds scratch buffers and the last accepted step so a sequence of nearby
/// problems (the cells of one sweep row) can reuse both.
#[derive(Debug, Clone)]
pub struct Extragradient<T> {
    config: SolverConfig<T>,
    step: T,
    fx: Vec<T>,
    fy: Vec<T>,
    y: Vec<T>,
    probe: Vec<T>,
}

impl<T: Scalar> Extragradient<T> {
    pub fn new(config: SolverConfig<T>) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            step: config.initial_step,
            config,
            fx: Vec::new(),
            fy: Vec::new(),
            y: Vec::new(),
            probe: Vec::new(),
        })
    }

    pub fn config(&self) -> &SolverConfig<T> {
        &self.config
    }

    /// Forgets the adapted step size.
    pub fn reset_step(&mut self) {
        self.step = self.config.initial_step;
    }

    /// Solves `problem` starting from `x` (projected first); `x` holds the
    /// final iterate on return. Non-convergence is reported, not raised.
    pub fn solve<O: Operator<T>>(
        &mut self,
        problem: &VIProblem<T, O>,
        x: &mut [T],
    ) -> Result<SolveReport<T>> {
        let m = problem.dim();
        check_dim(m, x.len())?;
        for buf in [&mut self.fx, &mut self.fy, &mut self.y, &mut self.probe] {
            buf.clear();
            buf.resize(m, T::zero());
        }
        let cfg = self.config;
        let nu = T::lit(LIPSCHITZ_RATIO);
        let grow = T::one() / cfg.step_shrink;
        let set = &problem.set;
        set.project_in_place(x);

        let mut evaluations = 1;
        problem.field(x, &mut self.fx);
        let mut residual;
        let mut iterations = 0;
        'outer: loop {
            if self.fx.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    iteration: iterations,
                });
            }
            for i in 0..m {
                self.probe[i] = x[i] - cfg.gamma * self.fx[i];
            }
            set.project_in_place(&mut self.probe);
            residual = dist2(x, &self.probe);
            if residual <= cfg.tolerance || iterations >= cfg.max_iterations {
                break;
            }
            iterations += 1;

            // Prediction with backtracking on the local Lipschitz estimate.
            let mut tau = self.step;
            let ratio;
            loop {
                for i in 0..m {
                    self.y[i] = x[i] - tau * self.fx[i];
                }
                set.project_in_place(&mut self.y);
                let dxy = dist2(x, &self.y);
                if dxy == T::zero() {
                    // x is a fixed point of the projected step: a solution.
                    break 'outer;
                }
                problem.field(&self.y, &mut self.fy);
                evaluations += 1;
                if self.fy.iter().any(|v| !v.is_finite()) {
                    return Err(Error::NonFinite {
                        iteration: iterations,
                    });
                }
                let r = tau * dist2(&self.fx, &self.fy) / dxy;
                if r <= nu {
                    ratio = r;
                    break;
                }
                tau *= cfg.step_shrink;
                if tau < T::min_positive_value() {
                    return Err(Error::NonFinite {
                        iteration: iterations,
                    });
                }
            }
            // Correction uses the field at the predicted point.
            for i in 0..m {
                x[i] = x[i] - tau * self.fy[i];
            }
            set.project_in_place(x);
            problem.field(x, &mut self.fx);
            evaluations += 1;

            self.step = if ratio <= nu * T::lit(0.5) { tau * grow } else { tau };
        }
        Ok(SolveReport {
            iterations,
            evaluations,
            residual,
            converged: residual <= cfg.tolerance || residual_is_fixed_point(x, &self.y, residual),
            final_step: self.step,
            uniqueness_certified: problem.strictly_monotone,
        })
    }
}

fn residual_is_fixed_point<T: Scalar>(x: &[T], y: &[T], residual: T) -> bool {
    // Round-off can leave a residual of a few ulps at an exact fixed point.
    residual.is_finite() && x == y
}

/// Solves the VI to `config.tolerance` in natural residual.
///
/// `warm_start` is projected onto the box; the box midpoint is used without
/// one. Returns [`Error::NonConvergence`] if the iteration budget runs out.
pub fn solve_vi<T: Scalar, O: Operator<T>>(
    problem: &VIProblem<T, O>,
    config: &SolverConfig<T>,
    warm_start: Option<&[T]>,
) -> Result<(Vec<T>, SolveReport<T>)> {
    let mut x = match warm_start {
        Some(w) => {
            check_dim(problem.dim(), w.len())?;
            w.to_vec()
        }
        None => problem.set.midpoint(),
    };
    let mut solver = Extragradient::new(*config)?;
    let report = solver.solve(problem, &mut x)?;
    if !report.converged {
        return Err(Error::NonConvergence {
            iterations: report.iterations,
            residual: report.residual.to_f64_lossy(),
        });
    }
    Ok((x, report))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotonicityReport<T> {
    /// Minimum of `<F(q)-F(q'), q-q'> / ||q-q'||^2` over evaluated pairs.
    pub min_ratio: T,
    pub pairs_evaluated: usize,
    /// Pairs skipped because both samples coincided.
    pub pairs_skipped: usize,
    /// Strict positivity of every evaluated ratio.
    pub passed: bool,
}

/// Empirical monotonicity probe on uniformly sampled pairs from `set`.
pub fn check_monotone<T: Scalar, O: Operator<T>>(
    operator: &O,
    set: &BoxSet<T>,
    num_pairs: usize,
    seed: u64,
) -> Result<MonotonicityReport<T>> {
    if num_pairs == 0 {
        return Err(invalid("num_pairs", "must be at least 1"));
    }
    check_dim(set.dim(), operator.dim())?;
    let m = set.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q = vec![T::zero(); m];
    let mut qp = vec![T::zero(); m];
    let mut fq = vec![T::zero(); m];
    let mut fqp = vec![T::zero(); m];
    let mut min_ratio = T::infinity();
    let mut evaluated = 0;
    let mut skipped = 0;
    for _ in 0..num_pairs {
        sample_box(&mut rng, set, &mut q);
        sample_box(&mut rng, set, &mut qp);
        let gap = dist2(&q, &qp);
        if gap == T::zero() {
            skipped += 1;
            continue;
        }
        operator.apply(&q, &mut fq);
        operator.apply(&qp, &mut fqp);
        let inner = fq
            .iter()
            .zip(&fqp)
            .zip(q.iter().zip(&qp))
            .fold(T::zero(), |acc, ((&a, &b), (&x, &y))| acc + (a - b) * (x - y));
        let ratio = inner / (gap * gap);
        if ratio < min_ratio || ratio.is_nan() {
            min_ratio = ratio;
        }
        evaluated += 1;
    }
    Ok(MonotonicityReport {
        min_ratio,
        pairs_evaluated: evaluated,
        pairs_skipped: skipped,
        passed: evaluated > 0 && min_ratio > T::zero(),
    })
}

fn sample_box<T: Scalar>(rng: &mut ChaCha8Rng, set: &BoxSet<T>, out: &mut [T]) {
    for ((o, &lo), &hi) in out.iter_mut().zip(set.lower()).zip(set.upper()) {
        let u = T::lit(rng.gen::<f64>());
        *o = lo + u * (hi - lo);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn identity(dim: usize) -> FnOperator<impl Fn(&[f64], &mut [f64])> {
        FnOperator::new(dim, |x: &[f64], out: &mut [f64]| out.copy_from_slice(x))
    }

    #[test]
    fn project_examples() {
        let b = BoxSet::cube(2, 0.0, 4.0).unwrap();
        assert_eq!(project(&[5.0, -3.0], &b).unwrap(), vec![4.0, 0.0]);
        assert_eq!(project(&[1.0, 2.0], &b).unwrap(), vec![1.0, 2.0]);
        let flat = BoxSet::cube(1, 0.0, 0.0).unwrap();
        assert_eq!(project(&[0.5], &flat).unwrap(), vec![0.0]);
    }

    #[test]
    fn project_rejects_dimension_mismatch() {
        let b = BoxSet::cube(2, 0.0, 1.0).unwrap();
        assert!(matches!(
            project(&[1.0], &b),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn box_rejects_inverted_or_infinite_bounds() {
        assert!(BoxSet::new(vec![1.0], vec![0.0]).is_err());
        assert!(BoxSet::new(vec![0.0], vec![f64::INFINITY]).is_err());
        assert!(BoxSet::new(vec![0.0, 0.0], vec![1.0]).is_err());
    }

    #[test]
    fn natural_residual_examples() {
        let p = VIProblem::new(identity(1), vec![0.0], BoxSet::cube(1, -1.0, 1.0).unwrap()).unwrap();
        assert_eq!(natural_residual(&p, &[0.0], 1.0).unwrap(), 0.0);

        let p = VIProblem::new(identity(1), vec![0.0], BoxSet::cube(1, 1.0, 2.0).unwrap()).unwrap();
        assert_eq!(natural_residual(&p, &[1.0], 1.0).unwrap(), 0.0);

        let shifted = FnOperator::new(1, |x: &[f64], out: &mut [f64]| out[0] = x[0] - 3.0);
        let p = VIProblem::new(shifted, vec![0.0], BoxSet::cube(1, 0.0, 1.0).unwrap()).unwrap();
        assert_eq!(natural_residual(&p, &[0.0], 1.0).unwrap(), 1.0);
    }

    #[test]
    fn natural_residual_rejects_nonpositive_gamma() {
        let p = VIProblem::new(identity(1), vec![0.0], BoxSet::cube(1, -1.0, 1.0).unwrap()).unwrap();
        assert!(natural_residual(&p, &[0.0], 0.0).is_err());
        assert!(natural_residual(&p, &[0.0], -1.0).is_err());
    }

    #[test]
    fn solves_unconstrained_affine_zero() {
        let c = [0.3, -0.7, 1.2];
        let op = FnOperator::new(3, move |x: &[f64], out: &mut [f64]| {
            for i in 0..3 {
                out[i] = x[i] - c[i];
            }
        });
        let p = VIProblem::new(op, vec![0.0; 3], BoxSet::cube(3, -5.0, 5.0).unwrap()).unwrap();
        let cfg = SolverConfig::default();
        let (x, report) = solve_vi(&p, &cfg, None).unwrap();
        for i in 0..3 {
            assert!((x[i] - c[i]).abs() < 1e-8);
        }
        assert!(report.residual <= cfg.tolerance);
        assert!(!report.uniqueness_certified);
    }

    #[test]
    fn shift_enters_with_negative_sign() {
        // F(x) = x, shift c: the solution of x - c = 0 is c.
        let p = VIProblem::new(identity(2), vec![0.25, 0.5], BoxSet::cube(2, 0.0, 1.0).unwrap()).unwrap();
        let (x, _) = solve_vi(&p, &SolverConfig::default(), None).unwrap();
        assert!((x[0] - 0.25).abs() < 1e-8 && (x[1] - 0.5).abs() < 1e-8);
    }

    #[test]
    fn degenerate_coordinates_stay_pinned() {
        let b = BoxSet::new(vec![0.0, 2.0], vec![1.0, 2.0]).unwrap();
        assert!(b.is_degenerate());
        let p = VIProblem::new(identity(2), vec![0.5, 10.0], b).unwrap();
        let (x, _) = solve_vi(&p, &SolverConfig::default(), Some(&[0.0, 0.0])).unwrap();
        assert_eq!(x[1], 2.0);
        assert!((x[0] - 0.5).abs() < 1e-8);
    }

    #[test]
    fn reports_nonconvergence() {
        let op = FnOperator::new(1, |x: &[f64], out: &mut [f64]| out[0] = x[0] - 0.5);
        let p = VIProblem::new(op, vec![0.0], BoxSet::cube(1, 0.0, 1.0).unwrap()).unwrap();
        let cfg = SolverConfig {
            max_iterations: 1,
            tolerance: 1e-300,
            initial_step: 1e-3,
            ..SolverConfig::default()
        };
        match solve_vi(&p, &cfg, Some(&[0.0])) {
            Err(Error::NonConvergence { iterations, residual }) => {
                assert_eq!(iterations, 1);
                assert!(residual > 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reports_non_finite_operator() {
        let op = FnOperator::new(1, |_: &[f64], out: &mut [f64]| out[0] = f64::NAN);
        let p = VIProblem::new(op, vec![0.0], BoxSet::cube(1, 0.0, 1.0).unwrap()).unwrap();
        assert!(matches!(
            solve_vi(&p, &SolverConfig::default(), None),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn config_validation() {
        let bad = [
            SolverConfig { tolerance: 0.0, ..SolverConfig::default() },
            SolverConfig { max_iterations: 0, ..SolverConfig::default() },
            SolverConfig { step_shrink: 1.0, ..SolverConfig::default() },
            SolverConfig { initial_step: -1.0, ..SolverConfig::default() },
            SolverConfig { gamma: 0.0, ..SolverConfig::default() },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
        assert!(SolverConfig::<f64>::default().validate().is_ok());
    }

    #[test]
    fn works_in_single_precision() {
        let op = FnOperator::new(2, |x: &[f32], out: &mut [f32]| {
            out[0] = 2.0 * x[0] - 1.0;
            out[1] = x[1] + 3.0;
        });
        let p = VIProblem::new(op, vec![0.0f32; 2], BoxSet::cube(2, 0.0f32, 1.0).unwrap()).unwrap();
        let cfg = SolverConfig { tolerance: 1e-5f32, ..SolverConfig::default() };
        let (x, _) = solve_vi(&p, &cfg, None).unwrap();
        assert!((x[0] - 0.5).abs() < 1e-4);
        assert_eq!(x[1], 0.0);
    }

    #[test]
    fn monotonicity_probe_examples() {
        let b = BoxSet::cube(2, 0.0, 1.0).unwrap();
        let rep = check_monotone(&identity(2), &b, 200, 7).unwrap();
        assert!((rep.min_ratio - 1.0).abs() < 1e-12);
        assert!(rep.passed);

        let neg = FnOperator::new(2, |x: &[f64], out: &mut [f64]| {
            out[0] = -x[0];
            out[1] = -x[1];
        });
        let rep = check_monotone(&neg, &b, 200, 7).unwrap();
        assert!((rep.min_ratio + 1.0).abs() < 1e-12);
        assert!(!rep.passed);
    }

    #[test]
    fn monotonicity_probe_on_zero_volume_box_skips_pairs() {
        let b = BoxSet::cube(2, 0.5, 0.5).unwrap();
        let rep = check_monotone(&identity(2), &b, 10, 1).unwrap();
        assert_eq!(rep.pairs_skipped, 10);
        assert_eq!(rep.pairs_evaluated, 0);
        assert!(!rep.passed);
        assert!(check_monotone(&identity(2), &b, 0, 1).is_err());
    }

    proptest! {
        #[test]
        fn projection_is_idempotent(x in prop::collection::vec(-10.0f64..10.0, 3),
                                    lo in prop::collection::vec(-5.0f64..0.0, 3),
                                    width in prop::collection::vec(0.0f64..5.0, 3)) {
            let hi: Vec<f64> = lo.iter().zip(&width).map(|(l, w)| l + w).collect();
            let b = BoxSet::new(lo, hi).unwrap();
            let once = b.project(&x).unwrap();
            prop_assert_eq!(b.project(&once).unwrap(), once.clone());
            prop_assert!(b.contains(&once));
        }

        #[test]
        fn projection_is_nearest_point(x in prop::collection::vec(-10.0f64..10.0, 4),
                                       u in prop::collection::vec(0.0f64..1.0, 4)) {
            let b = BoxSet::new(vec![-1.0, 0.0, 2.0, -3.0], vec![1.0, 0.5, 6.0, -1.0]).unwrap();
            let p = b.project(&x).unwrap();
            let z: Vec<f64> = (0..4).map(|i| b.lower()[i] + u[i] * (b.upper()[i] - b.lower()[i])).collect();
            prop_assert!(dist2(&x, &p) <= dist2(&x, &z) + 1e-12);
        }
    }
}
