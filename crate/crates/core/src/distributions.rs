//! Bounded random factors and their one-dimensional partitions.

use crate::error::{invalid, Result};
use crate::scalar::Scalar;
use crate::summation::compensated_sum;

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal density.
pub fn normal_pdf<T: Scalar>(z: T) -> T {
    T::lit(FRAC_1_SQRT_2PI) * (-(z * z) / T::lit(2.0)).exp()
}

/// Standard normal CDF, via `erfc` so the lower tail keeps relative accuracy.
pub fn normal_cdf<T: Scalar>(z: T) -> T {
    T::lit(0.5) * (-z / T::lit(std::f64::consts::SQRT_2)).erfc()
}

/// Upper tail `1 - Phi(z)` without cancellation.
pub fn normal_sf<T: Scalar>(z: T) -> T {
    T::lit(0.5) * (z / T::lit(std::f64::consts::SQRT_2)).erfc()
}

/// `Phi(zb) - Phi(za)` for `za <= zb`, evaluated on the tail that avoids
/// cancellation between two numbers close to one.
fn normal_mass<T: Scalar>(za: T, zb: T) -> T {
    if za >= T::zero() {
        normal_sf(za) - normal_sf(zb)
    } else {
        normal_cdf(zb) - normal_cdf(za)
    }
}

/// Inverse standard normal CDF.
///
/// Acklam's rational approximation (relative error ~1e-9) followed by one
/// Halley step against the `erfc`-based CDF.
pub fn normal_quantile<T: Scalar>(p: T) -> T {
    if p <= T::zero() {
        return T::neg_infinity();
    }
    if p >= T::one() {
        return T::infinity();
    }
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383_577_518_672_69e2,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    let pf = p.to_f64_lossy();
    let lo = 0.02425;
    let z = if pf < lo {
        let q = (-2.0 * pf.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if pf <= 1.0 - lo {
        let q = pf - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - pf).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    let z = T::lit(z);
    let e = normal_cdf(z) - p;
    let u = e / normal_pdf(z);
    z - u / (T::one() + z * u / T::lit(2.0))
}

/// A scalar random factor with bounded support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RandomFactor<T> {
    Constant { value: T },
    Uniform { lo: T, hi: T },
    /// Normal `N(mu, sigma^2)` conditioned on `[lo, hi]`.
    TruncatedNormal { mu: T, sigma: T, lo: T, hi: T },
}

impl<T: Scalar> RandomFactor<T> {
    pub fn constant(value: T) -> Result<Self> {
        if !value.is_finite() {
            return Err(invalid("value", "constant factor must be finite"));
        }
        Ok(Self::Constant { value })
    }

    pub fn uniform(lo: T, hi: T) -> Result<Self> {
        check_interval(lo, hi)?;
        Ok(Self::Uniform { lo, hi })
    }

    pub fn truncated_normal(mu: T, sigma: T, lo: T, hi: T) -> Result<Self> {
        check_interval(lo, hi)?;
        if !(sigma > T::zero()) || !sigma.is_finite() || !mu.is_finite() {
            return Err(invalid("sigma", "truncated normal needs finite mu and sigma > 0"));
        }
        let f = Self::TruncatedNormal { mu, sigma, lo, hi };
        if !(f.normalizer() > T::zero()) {
            return Err(invalid(
                "truncated_normal",
                "support carries no normal mass in working precision",
            ));
        }
        Ok(f)
    }

    /// Checks invariants of a value built directly from the enum.
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Constant { value } => Self::constant(value).map(|_| ()),
            Self::Uniform { lo, hi } => Self::uniform(lo, hi).map(|_| ()),
            Self::TruncatedNormal { mu, sigma, lo, hi } => {
                Self::truncated_normal(mu, sigma, lo, hi).map(|_| ())
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Self::Constant { .. })
    }

    /// Support endpoints; equal for constants.
    pub fn support(&self) -> (T, T) {
        match *self {
            Self::Constant { value } => (value, value),
            Self::Uniform { lo, hi } | Self::TruncatedNormal { lo, hi, .. } => (lo, hi),
        }
    }

    fn normalizer(&self) -> T {
        match *self {
            Self::TruncatedNormal { mu, sigma, lo, hi } => {
                normal_mass((lo - mu) / sigma, (hi - mu) / sigma)
            }
            _ => T::one(),
        }
    }

    /// Probability density; zero for constants.
    pub fn pdf(&self, x: T) -> T {
        match *self {
            Self::Constant { .. } => T::zero(),
            Self::Uniform { lo, hi } => {
                if x < lo || x > hi {
                    T::zero()
                } else {
                    T::one() / (hi - lo)
                }
            }
            Self::TruncatedNormal { mu, sigma, lo, hi } => {
                if x < lo || x > hi {
                    T::zero()
                } else {
                    normal_pdf((x - mu) / sigma) / (sigma * self.normalizer())
                }
            }
        }
    }

    pub fn cdf(&self, x: T) -> T {
        match *self {
            Self::Constant { value } => {
                if x < value {
                    T::zero()
                } else {
                    T::one()
                }
            }
            Self::Uniform { lo, hi } => {
                if x <= lo {
                    T::zero()
                } else if x >= hi {
                    T::one()
                } else {
                    (x - lo) / (hi - lo)
                }
            }
            Self::TruncatedNormal { mu, sigma, lo, hi } => {
                if x <= lo {
                    T::zero()
                } else if x >= hi {
                    T::one()
                } else {
                    let v = normal_mass((lo - mu) / sigma, (x - mu) / sigma) / self.normalizer();
                    v.max(T::zero()).min(T::one())
                }
            }
        }
    }

    /// `P(a <= X < b)`; the closed upper end is used for a constant sitting on
    /// the last breakpoint of its degenerate cell.
    pub fn cell_probability(&self, a: T, b: T) -> T {
        match *self {
            Self::Constant { value } => {
                if (a <= value && value < b) || (a == b && a == value) {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Self::Uniform { lo, hi } => {
                let (a, b) = (a.max(lo), b.min(hi));
                if b <= a {
                    T::zero()
                } else {
                    (b - a) / (hi - lo)
                }
            }
            Self::TruncatedNormal { mu, sigma, lo, hi } => {
                let (a, b) = (a.max(lo), b.min(hi));
                if b <= a {
                    T::zero()
                } else {
                    let p = normal_mass((a - mu) / sigma, (b - mu) / sigma) / self.normalizer();
                    p.max(T::zero())
                }
            }
        }
    }

    /// `E[X | a <= X < b]`; the cell midpoint when the cell has no mass.
    pub fn cell_conditional_mean(&self, a: T, b: T) -> T {
        let mid = a + (b - a) / T::lit(2.0);
        match *self {
            Self::Constant { value } => {
                if self.cell_probability(a, b) > T::zero() {
                    value
                } else {
                    mid
                }
            }
            Self::Uniform { lo, hi } => {
                let (ca, cb) = (a.max(lo), b.min(hi));
                if cb <= ca {
                    mid
                } else {
                    ca + (cb - ca) / T::lit(2.0)
                }
            }
            Self::TruncatedNormal { mu, sigma, lo, hi } => {
                let (ca, cb) = (a.max(lo), b.min(hi));
                if cb <= ca {
                    return mid;
                }
                let (za, zb) = ((ca - mu) / sigma, (cb - mu) / sigma);
                let mass = normal_mass(za, zb);
                if !(mass > T::zero()) {
                    return mid;
                }
                let m = mu + sigma * (normal_pdf(za) - normal_pdf(zb)) / mass;
                m.max(ca).min(cb)
            }
        }
    }

    pub fn mean(&self) -> T {
        match *self {
            Self::Constant { value } => value,
            _ => {
                let (lo, hi) = self.support();
                self.cell_conditional_mean(lo, hi)
            }
        }
    }

    /// Inverse CDF on `[0, 1]`.
    pub fn quantile(&self, u: T) -> T {
        let u = u.max(T::zero()).min(T::one());
        match *self {
            Self::Constant { value } => value,
            Self::Uniform { lo, hi } => lo + u * (hi - lo),
            Self::TruncatedNormal { mu, sigma, lo, hi } => {
                let (za, zb) = ((lo - mu) / sigma, (hi - mu) / sigma);
                let z = if za >= T::zero() {
                    // Right of the mode: invert the upper tail.
                    let q = normal_sf(za) - u * normal_mass(za, zb);
                    -normal_quantile(q)
                } else {
                    let p = normal_cdf(za) + u * normal_mass(za, zb);
                    normal_quantile(p)
                };
                (mu + sigma * z).max(lo).min(hi)
            }
        }
    }
}

fn check_interval<T: Scalar>(lo: T, hi: T) -> Result<()> {
    if !lo.is_finite() || !hi.is_finite() {
        return Err(invalid("support", "bounds must be finite"));
    }
    if !(lo < hi) {
        return Err(invalid("support", format!("need lo < hi, got [{lo}, {hi}]")));
    }
    Ok(())
}

/// How a cell is represented by a single point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RepresentativeRule {
    LowerEndpoint,
    ConditionalMean,
    Midpoint,
}

/// Uniform partition of a factor's support with per-cell representatives and
/// probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition1D<T> {
    factor: RandomFactor<T>,
    rule: RepresentativeRule,
    breakpoints: Vec<T>,
    representatives: Vec<T>,
    probabilities: Vec<T>,
}

impl<T: Scalar> Partition1D<T> {
    pub fn factor(&self) -> &RandomFactor<T> {
        &self.factor
    }

    pub fn rule(&self) -> RepresentativeRule {
        self.rule
    }

    pub fn cells(&self) -> usize {
        self.representatives.len()
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn representatives(&self) -> &[T] {
        &self.representatives
    }

    pub fn probabilities(&self) -> &[T] {
        &self.probabilities
    }

    pub fn cell_bounds(&self, k: usize) -> (T, T) {
        (self.breakpoints[k], self.breakpoints[k + 1])
    }

    /// Index of the half-open cell containing `x`, clamping to the ends.
    pub fn locate(&self, x: T) -> usize {
        let n = self.cells();
        let inner = &self.breakpoints[1..n];
        inner.partition_point(|&b| b <= x)
    }

    /// Largest cell width.
    pub fn mesh(&self) -> T {
        self.breakpoints
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(T::zero(), T::max)
    }
}

/// Uniform partition of `factor`'s support into `n_cells` cells.
///
/// Constant factors always give a single degenerate cell.
pub fn make_partition<T: Scalar>(
    factor: &RandomFactor<T>,
    n_cells: usize,
    rule: RepresentativeRule,
) -> Result<Partition1D<T>> {
    if n_cells == 0 {
        return Err(invalid("n_cells", "must be at least 1"));
    }
    factor.validate()?;
    if let RandomFactor::Constant { value } = *factor {
        return Ok(Partition1D {
            factor: *factor,
            rule,
            breakpoints: vec![value, value],
            representatives: vec![value],
            probabilities: vec![T::one()],
        });
    }
    let (lo, hi) = factor.support();
    let n = T::from_usize(n_cells).ok_or_else(|| invalid("n_cells", "too large"))?;
    let width = hi - lo;
    let mut breakpoints: Vec<T> = (0..=n_cells)
        .map(|k| lo + width * (T::from_usize(k).unwrap() / n))
        .collect();
    breakpoints[n_cells] = hi;
    if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(invalid("n_cells", "cells narrower than working precision"));
    }
    let probabilities: Vec<T> = breakpoints
        .windows(2)
        .map(|w| factor.cell_probability(w[0], w[1]))
        .collect();
    let representatives = breakpoints
        .windows(2)
        .map(|w| match rule {
            RepresentativeRule::LowerEndpoint => w[0],
            RepresentativeRule::Midpoint => w[0] + (w[1] - w[0]) / T::lit(2.0),
            RepresentativeRule::ConditionalMean => factor.cell_conditional_mean(w[0], w[1]),
        })
        .collect();
    Ok(Partition1D {
        factor: *factor,
        rule,
        breakpoints,
        representatives,
        probabilities,
    })
}

/// `E |rep(X) - X|` over the partition, by Gauss–Legendre per cell.
pub fn step_approximation_error<T: Scalar>(partition: &Partition1D<T>) -> Result<T> {
    let rule = crate::quadrature::GaussLegendre::<T>::new(16)?;
    if partition.factor().is_constant() {
        return Ok((partition.representatives()[0] - partition.factor().mean()).abs());
    }
    Ok(compensated_sum((0..partition.cells()).map(|k| {
        let (a, b) = partition.cell_bounds(k);
        let rep = partition.representatives()[k];
        rule.integrate(a, b, |x| (rep - x).abs() * partition.factor().pdf(x))
    })))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tn() -> RandomFactor<f64> {
        RandomFactor::<f64>::truncated_normal(0.0, 0.25, -0.5, 0.5).unwrap()
    }

    #[test]
    fn normal_cdf_reference_values() {
        // Phi(1) and Phi(-5) from standard tables.
        assert!((normal_cdf(1.0f64) - 0.841_344_746_068_543).abs() < 1e-15);
        assert!((normal_cdf(-5.0f64) - 2.866_515_718_791_939e-7).abs() < 1e-20);
        assert!((normal_sf(5.0f64) - 2.866_515_718_791_939e-7).abs() < 1e-20);
    }

    #[test]
    fn normal_quantile_inverts_cdf() {
        for &p in &[1e-12, 1e-7, 0.01, 0.3, 0.5, 0.77, 0.99, 1.0 - 1e-9] {
            let z: f64 = normal_quantile(p);
            let back = normal_cdf(z);
            assert!((back - p).abs() <= 1e-14 * p.max(1e-3), "p={p} back={back}");
        }
        assert_eq!(normal_quantile(0.5f64), 0.0);
    }

    #[test]
    fn cdf_examples() {
        let u = RandomFactor::<f64>::uniform(0.0, 1.0).unwrap();
        assert!((u.cdf(0.3) - 0.3).abs() < 1e-15);
        assert!((tn().cdf(0.0) - 0.5).abs() < 1e-15);
        assert_eq!(tn().cdf(-0.5), 0.0);
        assert_eq!(tn().cdf(0.7), 1.0);
        let c = RandomFactor::<f64>::constant(7.0).unwrap();
        assert_eq!(c.cdf(6.9), 0.0);
        assert_eq!(c.cdf(7.0), 1.0);
    }

    #[test]
    fn cell_probability_examples() {
        let u = RandomFactor::<f64>::uniform(0.0, 1.0).unwrap();
        assert!((u.cell_probability(0.2, 0.5) - 0.3).abs() < 1e-15);
        assert!((tn().cell_probability(-0.5, 0.0) - 0.5).abs() < 1e-15);
        assert_eq!(u.cell_probability(1.5, 2.0), 0.0);
    }

    #[test]
    fn conditional_mean_examples() {
        let u = RandomFactor::<f64>::uniform(0.0, 1.0).unwrap();
        assert!((u.cell_conditional_mean(0.2, 0.6) - 0.4).abs() < 1e-15);
        let c = RandomFactor::<f64>::constant(7.0).unwrap();
        assert_eq!(c.cell_conditional_mean(6.0, 8.0), 7.0);
        assert_eq!(c.cell_conditional_mean(7.0, 7.0), 7.0);
        // A cell with no mass falls back to its midpoint.
        assert_eq!(u.cell_conditional_mean(2.0, 3.0), 2.5);
        let far = RandomFactor::<f64>::truncated_normal(0.0, 1.0, -50.0, 50.0).unwrap();
        assert_eq!(far.cell_conditional_mean(45.0, 46.0), 45.5);
    }

    #[test]
    fn constructors_enforce_invariants() {
        assert!(RandomFactor::<f64>::uniform(1.0, 1.0).is_err());
        assert!(RandomFactor::<f64>::uniform(0.0, f64::INFINITY).is_err());
        assert!(RandomFactor::<f64>::truncated_normal(0.0, 0.0, -1.0, 1.0).is_err());
        assert!(RandomFactor::<f64>::truncated_normal(0.0, 1.0, 1.0, -1.0).is_err());
        assert!(RandomFactor::<f64>::constant(f64::NAN).is_err());
        let raw = RandomFactor::Uniform { lo: 2.0, hi: 1.0 };
        assert!(raw.validate().is_err());
    }

    #[test]
    fn partition_uniform_lower_endpoint() {
        let u = RandomFactor::<f64>::uniform(0.0, 1.0).unwrap();
        let p = make_partition(&u, 4, RepresentativeRule::LowerEndpoint).unwrap();
        assert_eq!(p.breakpoints(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(p.representatives(), &[0.0, 0.25, 0.5, 0.75]);
        for &q in p.probabilities() {
            assert!((q - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn partition_of_constant_is_single_cell() {
        let c = RandomFactor::<f64>::constant(5000.0).unwrap();
        for n in [1, 7, 1000] {
            let p = make_partition(&c, n, RepresentativeRule::ConditionalMean).unwrap();
            assert_eq!(p.cells(), 1);
            assert_eq!(p.representatives(), &[5000.0]);
            assert_eq!(p.probabilities(), &[1.0]);
        }
    }

    #[test]
    fn partition_rejects_zero_cells() {
        assert!(make_partition(&tn(), 0, RepresentativeRule::Midpoint).is_err());
    }

    #[test]
    fn truncated_normal_partition_is_symmetric_and_normalized() {
        let p = make_partition(&tn(), 200, RepresentativeRule::LowerEndpoint).unwrap();
        let total = compensated_sum(p.probabilities().iter().copied());
        assert!((total - 1.0).abs() < 1e-12);
        for k in 0..100 {
            let (a, b) = (p.probabilities()[k], p.probabilities()[199 - k]);
            assert!((a - b).abs() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn locate_finds_half_open_cells() {
        let u = RandomFactor::<f64>::uniform(0.0, 1.0).unwrap();
        let p = make_partition(&u, 4, RepresentativeRule::Midpoint).unwrap();
        assert_eq!(p.locate(0.0), 0);
        assert_eq!(p.locate(0.25), 1);
        assert_eq!(p.locate(0.2499), 0);
        assert_eq!(p.locate(1.0), 3);
        assert_eq!(p.locate(-3.0), 0);
    }

    #[test]
    fn quantile_round_trips_cdf() {
        let s = RandomFactor::<f64>::truncated_normal(5000.0, 10.0, 4950.0, 5050.0).unwrap();
        for &u in &[0.0, 1e-9, 0.1, 0.5, 0.9, 1.0 - 1e-9, 1.0] {
            let x = s.quantile(u);
            assert!((4950.0..=5050.0).contains(&x));
            assert!((s.cdf(x) - u).abs() < 1e-10, "u={u}");
        }
        // Support entirely right of the mode exercises the upper-tail branch.
        let right = RandomFactor::<f64>::truncated_normal(0.0, 1.0, 1.0, 3.0).unwrap();
        for &u in &[0.05, 0.5, 0.95] {
            assert!((right.cdf(right.quantile(u)) - u).abs() < 1e-12);
        }
    }

    #[test]
    fn means_of_symmetric_factors() {
        assert!(tn().mean().abs() < 1e-15);
        let s = RandomFactor::<f64>::truncated_normal(5000.0, 10.0, 4950.0, 5050.0).unwrap();
        assert!((s.mean() - 5000.0).abs() < 1e-9);
        assert_eq!(RandomFactor::<f64>::uniform(2.0, 4.0).unwrap().mean(), 3.0);
    }
}
