//! Stochastic Cournot oligopoly with power-law costs and isoelastic demand.
//!
//! Firm `i` produces `q_i` with cost
//!
//! ```text
//! f_i(q) = (c_i + r) q + beta_i * b_i/(b_i+1) * k_i^(-1/b_i) * q^((b_i+1)/b_i)
//! ```
//!
//! and sells at the price `p(Q) = s^a / (Q + e)^a + alpha`, `Q = sum_j q_j`.
//! The random data enter through scalar factors: `r` and `alpha` only shift
//! the right-hand side of the equilibrium VI, `s` scales the price part and
//! each `beta_i` scales one firm's marginal cost.

use crate::distributions::RandomFactor;
use crate::error::{check_dim, invalid, Error, Result};
use crate::scalar::Scalar;
use crate::vi::{BoxSet, Operator, VIProblem};

#[derive(Debug, Clone, PartialEq)]
pub struct FirmParams<T> {
    /// Linear cost coefficient.
    pub c: T,
    pub k: T,
    /// Cost curvature exponent.
    pub b: T,
    /// Production capacity.
    pub q_bar: RandomFactor<T>,
}

impl<T: Scalar> FirmParams<T> {
    pub fn new(c: T, k: T, b: T, q_bar: RandomFactor<T>) -> Result<Self> {
        let firm = Self { c, k, b, q_bar };
        firm.validate()?;
        Ok(firm)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c >= T::zero()) || !self.c.is_finite() {
            return Err(invalid("c", "linear cost coefficient must be finite and >= 0"));
        }
        if !(self.k > T::zero()) || !self.k.is_finite() {
            return Err(invalid("k", "must be finite and > 0"));
        }
        if !(self.b > T::zero()) || !self.b.is_finite() {
            return Err(invalid("b", "must be finite and > 0"));
        }
        self.q_bar.validate()?;
        if self.q_bar.support().0 < T::zero() {
            return Err(invalid("q_bar", "capacity support must be nonnegative"));
        }
        Ok(())
    }

    /// `k^(-1/b)`.
    fn marginal_scale(&self) -> T {
        self.k.powf(-T::one() / self.b)
    }
}

/// Firm cost at output `q` under cost shock `r` and cost modulation `beta`.
pub fn cost<T: Scalar>(firm: &FirmParams<T>, q: T, r: T, beta: T) -> Result<T> {
    if q < T::zero() {
        return Err(invalid("q", "production must be nonnegative"));
    }
    if !(beta > T::zero()) {
        return Err(invalid("beta", "must be positive"));
    }
    let exponent = (firm.b + T::one()) / firm.b;
    let power = beta * firm.b / (firm.b + T::one()) * firm.marginal_scale() * q.powf(exponent);
    Ok((firm.c + r) * q + power)
}

/// One realization of the operator and right-hand-side factors.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<T> {
    pub r: T,
    pub s: T,
    pub beta: Vec<T>,
    pub alpha: T,
}

impl<T: Scalar> Scenario<T> {
    /// `beta = 1`, `alpha = 0`.
    pub fn new(m: usize, r: T, s: T) -> Self {
        Self {
            r,
            s,
            beta: vec![T::one(); m],
            alpha: T::zero(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CournotInstance<T> {
    firms: Vec<FirmParams<T>>,
    a: T,
    e: T,
    r_factor: RandomFactor<T>,
    s_factor: RandomFactor<T>,
    beta_factors: Vec<RandomFactor<T>>,
    alpha_factor: RandomFactor<T>,
}

impl<T: Scalar> CournotInstance<T> {
    /// Instance with constant `beta_i = 1` and `alpha = 0`.
    pub fn new(
        firms: Vec<FirmParams<T>>,
        a: T,
        e: T,
        r_factor: RandomFactor<T>,
        s_factor: RandomFactor<T>,
    ) -> Result<Self> {
        let m = firms.len();
        let inst = Self {
            firms,
            a,
            e,
            r_factor,
            s_factor,
            beta_factors: vec![RandomFactor::Constant { value: T::one() }; m],
            alpha_factor: RandomFactor::Constant { value: T::zero() },
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn with_beta_factors(mut self, beta: Vec<RandomFactor<T>>) -> Result<Self> {
        check_dim(self.firms.len(), beta.len())?;
        self.beta_factors = beta;
        self.validate()?;
        Ok(self)
    }

    pub fn with_alpha_factor(mut self, alpha: RandomFactor<T>) -> Result<Self> {
        self.alpha_factor = alpha;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.firms.is_empty() {
            return Err(invalid("firms", "at least one firm is required"));
        }
        for firm in &self.firms {
            firm.validate()?;
        }
        if !(self.a > T::zero() && self.a < T::one()) {
            return Err(invalid("a", format!("{} violates 0 < a < 1", self.a)));
        }
        if !(self.e > T::zero()) || !self.e.is_finite() {
            return Err(invalid("e", format!("{} violates e > 0", self.e)));
        }
        self.r_factor.validate()?;
        self.s_factor.validate()?;
        if !(self.s_factor.support().0 > T::zero()) {
            return Err(invalid("s", "price scale support must lie in (0, inf)"));
        }
        check_dim(self.firms.len(), self.beta_factors.len())?;
        for beta in &self.beta_factors {
            beta.validate()?;
            if !(beta.support().0 > T::zero()) {
                return Err(invalid("beta", "cost modulation support must lie in (0, inf)"));
            }
        }
        self.alpha_factor.validate()?;
        Ok(())
    }

    pub fn num_firms(&self) -> usize {
        self.firms.len()
    }

    pub fn firms(&self) -> &[FirmParams<T>] {
        &self.firms
    }

    pub fn a(&self) -> T {
        self.a
    }

    pub fn e(&self) -> T {
        self.e
    }

    pub fn r_factor(&self) -> &RandomFactor<T> {
        &self.r_factor
    }

    pub fn s_factor(&self) -> &RandomFactor<T> {
        &self.s_factor
    }

    pub fn beta_factors(&self) -> &[RandomFactor<T>] {
        &self.beta_factors
    }

    pub fn alpha_factor(&self) -> &RandomFactor<T> {
        &self.alpha_factor
    }

    /// Same firms and price law with every factor replaced by its mean.
    pub fn mean_scenario(&self) -> (Scenario<T>, Vec<T>) {
        let scenario = Scenario {
            r: self.r_factor.mean(),
            s: self.s_factor.mean(),
            beta: self.beta_factors.iter().map(RandomFactor::mean).collect(),
            alpha: self.alpha_factor.mean(),
        };
        let bounds = self.firms.iter().map(|f| f.q_bar.mean()).collect();
        (scenario, bounds)
    }

    /// Inverse demand `s^a / (Q + e)^a` (without the additive shift).
    pub fn price(&self, total: T, s: T) -> T {
        (s / (total + self.e)).powf(self.a)
    }

    /// `dp/dQ = -a s^a / (Q + e)^(a+1)`.
    pub fn price_slope(&self, total: T, s: T) -> T {
        -self.a * self.price(total, s) / (total + self.e)
    }

    /// `d2p/dQ2 = a (a+1) s^a / (Q + e)^(a+2)`.
    pub fn price_curvature(&self, total: T, s: T) -> T {
        let base = total + self.e;
        self.a * (self.a + T::one()) * self.price(total, s) / (base * base)
    }

    fn check_point(&self, q: &[T]) -> Result<()> {
        check_dim(self.num_firms(), q.len())?;
        if q.iter().any(|&v| !(v >= T::zero())) {
            return Err(invalid("q", "production must be nonnegative"));
        }
        Ok(())
    }

    fn check_scenario(&self, scenario: &Scenario<T>) -> Result<()> {
        check_dim(self.num_firms(), scenario.beta.len())?;
        if !(scenario.s > T::zero()) {
            return Err(invalid("s", "must be positive"));
        }
        if scenario.beta.iter().any(|&b| !(b > T::zero())) {
            return Err(invalid("beta", "must be positive"));
        }
        Ok(())
    }

    /// The frozen operator for one scenario; the additive factors go into the
    /// shift of [`Self::vi_problem`], not into this operator.
    pub fn cell_operator(&self, scenario: &Scenario<T>) -> Result<CournotOperator<T>> {
        self.check_scenario(scenario)?;
        Ok(CournotOperator {
            a: self.a,
            e: self.e,
            s_pow_a: scenario.s.powf(self.a),
            scaled_marginal: self
                .firms
                .iter()
                .zip(&scenario.beta)
                .map(|(f, &beta)| beta * f.marginal_scale())
                .collect(),
            inv_b: self.firms.iter().map(|f| T::one() / f.b).collect(),
        })
    }

    /// Right-hand side `alpha - c_i - r`.
    pub fn shift(&self, scenario: &Scenario<T>) -> Vec<T> {
        self.firms
            .iter()
            .map(|f| scenario.alpha - (f.c + scenario.r))
            .collect()
    }

    /// The equilibrium VI for one scenario and capacity vector.
    pub fn vi_problem(
        &self,
        scenario: &Scenario<T>,
        bounds: &[T],
    ) -> Result<VIProblem<T, CournotOperator<T>>> {
        check_dim(self.num_firms(), bounds.len())?;
        let set = BoxSet::new(vec![T::zero(); bounds.len()], bounds.to_vec())?;
        Ok(VIProblem::new(self.cell_operator(scenario)?, self.shift(scenario), set)?
            .with_strict_monotonicity())
    }

    /// `F_i(q) = c_i + r + beta_i k_i^(-1/b_i) q_i^(1/b_i) - p'(Q) q_i - p(Q) - alpha`.
    pub fn operator_eval(&self, q: &[T], scenario: &Scenario<T>) -> Result<Vec<T>> {
        self.check_point(q)?;
        let op = self.cell_operator(scenario)?;
        let mut out = vec![T::zero(); q.len()];
        op.apply(q, &mut out);
        for (o, c) in out.iter_mut().zip(self.shift(scenario)) {
            *o -= c;
        }
        Ok(out)
    }

    /// Price-driven part `-p(Q) - p'(Q) q_i` of the operator.
    pub fn price_operator(&self, q: &[T], s: T) -> Result<Vec<T>> {
        self.check_point(q)?;
        let total: T = q.iter().copied().sum();
        let p = self.price(total, s);
        let dp = self.price_slope(total, s);
        Ok(q.iter().map(|&qi| -p - dp * qi).collect())
    }

    /// Net revenue of firm `i`: `(p(Q) + alpha) q_i - f_i(q_i)`.
    pub fn welfare(&self, i: usize, q: &[T], scenario: &Scenario<T>) -> Result<T> {
        if i >= self.num_firms() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.num_firms(),
            });
        }
        self.check_point(q)?;
        self.check_scenario(scenario)?;
        let total: T = q.iter().copied().sum();
        let revenue = (self.price(total, scenario.s) + scenario.alpha) * q[i];
        Ok(revenue - cost(&self.firms[i], q[i], scenario.r, scenario.beta[i])?)
    }

    /// Quadratic form `h^T J h` of the Jacobian of the price part, from the
    /// rank-one-plus-diagonal split `J = -p' 1 - p' I - p'' (q_i)_ij`.
    pub fn price_jacobian_form(&self, q: &[T], h: &[T], s: T) -> Result<T> {
        self.check_point(q)?;
        check_dim(q.len(), h.len())?;
        if h.iter().all(|&v| v == T::zero()) {
            return Err(invalid("h", "direction must be nonzero"));
        }
        if !(s > T::zero()) {
            return Err(invalid("s", "must be positive"));
        }
        let total: T = q.iter().copied().sum();
        let dp = self.price_slope(total, s);
        let d2p = self.price_curvature(total, s);
        let sum_h: T = h.iter().copied().sum();
        let norm_sq: T = h.iter().map(|&v| v * v).sum();
        let weighted: T = q.iter().zip(h).map(|(&qi, &hi)| qi * hi).sum();
        Ok(-(dp * (sum_h * sum_h + norm_sq) + d2p * sum_h * weighted))
    }
}

/// `q -> beta_i k_i^(-1/b_i) q_i^(1/b_i) - p'(Q) q_i - p(Q)` with the scenario
/// constants folded in.
#[derive(Debug, Clone, PartialEq)]
pub struct CournotOperator<T> {
    a: T,
    e: T,
    s_pow_a: T,
    scaled_marginal: Vec<T>,
    inv_b: Vec<T>,
}

impl<T: Scalar> CournotOperator<T> {
    /// Re-freezes the operator at another price scale `s`.
    pub fn set_price_scale(&mut self, s: T) {
        self.s_pow_a = s.powf(self.a);
    }
}

impl<T: Scalar> Operator<T> for CournotOperator<T> {
    fn dim(&self) -> usize {
        self.inv_b.len()
    }

    #[inline]
    fn apply(&self, q: &[T], out: &mut [T]) {
        let total: T = q.iter().copied().sum();
        let base = total + self.e;
        let p = self.s_pow_a * base.powf(-self.a);
        let slope = self.a * p / base;
        for i in 0..q.len() {
            let qi = q[i];
            let marginal = if self.inv_b[i] == T::one() {
                qi
            } else {
                qi.powf(self.inv_b[i])
            };
            out[i] = self.scaled_marginal[i] * marginal + slope * qi - p;
        }
    }
}

/// Five-firm benchmark data: `c = (10, 8, 6, 4, 2)`, `k = 5`,
/// `b = (1.2, 1.1, 1.0, 0.9, 0.8)`, capacity 100, `a = 1/1.1`.
pub mod benchmark {
    use super::*;

    pub const LINEAR_COST: [f64; 5] = [10.0, 8.0, 6.0, 4.0, 2.0];
    pub const CAPACITY_PARAM: [f64; 5] = [5.0; 5];
    pub const CURVATURE: [f64; 5] = [1.2, 1.1, 1.0, 0.9, 0.8];
    pub const CAPACITY: f64 = 100.0;
    pub const PRICE_EXPONENT: f64 = 1.0 / 1.1;
    pub const PRICE_FLOOR: f64 = 1e-4;
    pub const PRICE_SCALE: f64 = 5000.0;

    pub fn firms<T: Scalar>() -> Vec<FirmParams<T>> {
        (0..5)
            .map(|i| FirmParams {
                c: T::lit(LINEAR_COST[i]),
                k: T::lit(CAPACITY_PARAM[i]),
                b: T::lit(CURVATURE[i]),
                q_bar: RandomFactor::Constant {
                    value: T::lit(CAPACITY),
                },
            })
            .collect()
    }

    /// `r = 0`, `s = 5000`.
    pub fn deterministic<T: Scalar>() -> CournotInstance<T> {
        CournotInstance::new(
            firms(),
            T::lit(PRICE_EXPONENT),
            T::lit(PRICE_FLOOR),
            RandomFactor::Constant { value: T::zero() },
            RandomFactor::Constant {
                value: T::lit(PRICE_SCALE),
            },
        )
        .expect("benchmark data are valid")
    }

    /// `r ~ N(0, 0.25^2)` on `[-0.5, 0.5]`, `s ~ N(5000, 10^2)` on `[4950, 5050]`.
    pub fn stochastic<T: Scalar>() -> CournotInstance<T> {
        CournotInstance::new(
            firms(),
            T::lit(PRICE_EXPONENT),
            T::lit(PRICE_FLOOR),
            RandomFactor::truncated_normal(T::zero(), T::lit(0.25), T::lit(-0.5), T::lit(0.5))
                .expect("valid factor"),
            RandomFactor::truncated_normal(
                T::lit(5000.0),
                T::lit(10.0),
                T::lit(4950.0),
                T::lit(5050.0),
            )
            .expect("valid factor"),
        )
        .expect("benchmark data are valid")
    }
}
