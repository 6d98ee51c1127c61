//! Independent reference computations for checking the solver crates.
//!
//! Nothing here depends on `snep-core`: roots come from bisection, integrals
//! from adaptive Simpson, and box VIs from enumerating active sets.

/// Root of a continuous `f` on `[lo, hi]` with a sign change, to `tol`.
pub fn bisect(mut lo: f64, mut hi: f64, tol: f64, f: impl Fn(f64) -> f64) -> f64 {
    let mut flo = f(lo);
    assert!(flo * f(hi) <= 0.0, "no sign change on [{lo}, {hi}]");
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn simpson_step(f: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature of `f` on `[a, b]`.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Unnormalised normal density.
pub fn gauss(x: f64, mu: f64, sigma: f64) -> f64 {
    let z = (x - mu) / sigma;
    (-0.5 * z * z).exp()
}

/// Truncated normal CDF by direct integration of the density.
pub fn tn_cdf_quadrature(mu: f64, sigma: f64, lo: f64, hi: f64, x: f64) -> f64 {
    let total = adaptive_simpson(|t| gauss(t, mu, sigma), lo, hi, 1e-14);
    adaptive_simpson(|t| gauss(t, mu, sigma), lo, x.clamp(lo, hi), 1e-14) / total
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Solution of the box VI `<M x + d, z - x> >= 0` for `lo <= z <= hi` by
/// enumerating which coordinates sit at the lower bound, the upper bound, or
/// in the interior (`3^m` patterns) and checking the KKT sign conditions.
pub fn active_set_box_vi(m: &[Vec<f64>], d: &[f64], lo: &[f64], hi: &[f64]) -> Vec<f64> {
    let n = d.len();
    let patterns = 3usize.pow(n as u32);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for code in 0..patterns {
        let mut state = vec![0u8; n];
        let mut c = code;
        for s in state.iter_mut() {
            *s = (c % 3) as u8;
            c /= 3;
        }
        let mut x = vec![0.0; n];
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 2).collect();
        for i in 0..n {
            match state[i] {
                0 => x[i] = lo[i],
                1 => x[i] = hi[i],
                _ => {}
            }
        }
        if !free.is_empty() {
            let a: Vec<Vec<f64>> = free
                .iter()
                .map(|&i| free.iter().map(|&j| m[i][j]).collect())
                .collect();
            let b: Vec<f64> = free
                .iter()
                .map(|&i| {
                    -(d[i]
                        + (0..n)
                            .filter(|j| state[*j] != 2)
                            .map(|j| m[i][j] * x[j])
                            .sum::<f64>())
                })
                .collect();
            let Some(sol) = gauss_solve(a, b) else { continue };
            for (k, &i) in free.iter().enumerate() {
                x[i] = sol[k];
            }
        }
        // KKT violation: F_i >= 0 at lower, <= 0 at upper, = 0 inside, x in box.
        let mut violation: f64 = 0.0;
        for i in 0..n {
            let f: f64 = (0..n).map(|j| m[i][j] * x[j]).sum::<f64>() + d[i];
            violation = violation.max(match state[i] {
                0 => (-f).max(0.0),
                1 => f.max(0.0),
                _ => (lo[i] - x[i]).max(x[i] - hi[i]).max(0.0),
            });
        }
        if best.as_ref().is_none_or(|(v, _)| violation < *v) {
            best = Some((violation, x));
        }
    }
    let (violation, x) = best.expect("at least one pattern");
    assert!(violation < 1e-9, "active-set oracle found no KKT point ({violation})");
    x
}

/// Random symmetric positive definite matrix `B^T B + mu I`.
pub fn random_spd(rng: &mut impl rand::Rng, n: usize, mu: f64) -> Vec<Vec<f64>> {
    let b: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let s: f64 = (0..n).map(|k| b[k][i] * b[k][j]).sum();
                    s + if i == j { mu } else { 0.0 }
                })
                .collect()
        })
        .collect()
}

/// Published deterministic equilibrium of the five-firm benchmark.
pub const DETERMINISTIC_GOLDEN: [f64; 5] = [36.937, 41.817, 43.706, 42.659, 39.179];
/// Published mean values at `(n_r, n_s) = (200, 20000)`.
pub const PUBLISHED_MEAN_200: [f64; 5] = [36.8855, 41.7615, 43.6448, 42.5972, 39.121];
/// Published mean values at `(n_r, n_s) = (400, 40000)`.
pub const PUBLISHED_MEAN_400: [f64; 5] = [36.913, 41.7928, 43.6776, 42.6294, 39.1506];
