//! Least-squares fit of `y = L / (1 + exp(-k (x - x0)))` by
//! Levenberg-Marquardt with box projection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 10_000;
const L_MAX: f64 = 1.05;
const X0_MAX: f64 = 100.0;
const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticFit {
    pub l: f64,
    pub k: f64,
    pub x0: f64,
    pub r_squared: f64,
    pub sse: f64,
    /// Standard errors of `(L, k, x0)` from the Gauss-Newton covariance;
    /// `None` for a singular normal matrix.
    pub std_errors: Option<[f64; 3]>,
    pub iterations: usize,
}

impl LogisticFit {
    pub fn eval(&self, x: f64) -> f64 {
        logistic([self.l, self.k, self.x0], x)
    }
}

fn logistic(p: [f64; 3], x: f64) -> f64 {
    p[0] / (1.0 + (-p[1] * (x - p[2])).exp())
}

fn gradient(p: [f64; 3], x: f64) -> [f64; 3] {
    let e = (-p[1] * (x - p[2])).exp();
    let d = 1.0 + e;
    if !e.is_finite() {
        return [0.0; 3];
    }
    let q = p[0] * e / (d * d);
    [1.0 / d, q * (x - p[2]), -q * p[1]]
}

fn sse(p: [f64; 3], xs: &[f64], ys: &[f64]) -> f64 {
    xs.iter()
        .zip(ys)
        .map(|(&x, &y)| (y - logistic(p, x)).powi(2))
        .sum()
}

fn project(p: [f64; 3]) -> [f64; 3] {
    [
        p[0].clamp(EPS, L_MAX),
        p[1].max(EPS),
        p[2].clamp(EPS, X0_MAX - EPS),
    ]
}

/// Solves the 3x3 system `a x = b` by Gaussian elimination with partial
/// pivoting.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            let pivot_row = a[col];
            for (x, p) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= f * p;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

fn normal_equations(p: [f64; 3], xs: &[f64], ys: &[f64]) -> ([[f64; 3]; 3], [f64; 3]) {
    let mut jtj = [[0.0; 3]; 3];
    let mut jtr = [0.0; 3];
    for (&x, &y) in xs.iter().zip(ys) {
        let g = gradient(p, x);
        let r = y - logistic(p, x);
        for i in 0..3 {
            jtr[i] += g[i] * r;
            for j in 0..3 {
                jtj[i][j] += g[i] * g[j];
            }
        }
    }
    (jtj, jtr)
}

/// Initial guess: `L0` is the largest observation, `x0` the first abscissa
/// where the data reach `L0 / 2` (interpolated), `k0 = 0.1`.
pub fn initial_guess(xs: &[f64], ys: &[f64]) -> [f64; 3] {
    let l0 = ys.iter().copied().fold(f64::MIN, f64::max);
    let half = l0 / 2.0;
    let mut x0 = xs[0];
    for i in 0..xs.len() {
        if ys[i] >= half {
            x0 = if i == 0 || ys[i] == ys[i - 1] {
                xs[i]
            } else {
                let t = (half - ys[i - 1]) / (ys[i] - ys[i - 1]);
                xs[i - 1] + t * (xs[i] - xs[i - 1])
            };
            break;
        }
    }
    project([l0, 0.1, x0])
}

/// Fits the three-parameter logistic to `(xs, ys)`. `xs` are knowledge
/// percentages in `(0, 100]`, `ys` rates in `[0, 1]`.
pub fn fit_logistic(xs: &[f64], ys: &[f64]) -> Result<LogisticFit> {
    if xs.len() != ys.len() {
        return Err(Error::Dimension(format!(
            "{} abscissae but {} observations",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 4 {
        return Err(Error::FitFailure {
            iterations: 0,
            reason: "at least four points are needed".into(),
            sse: f64::NAN,
        });
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::Invalid("non-finite input to logistic fit".into()));
    }

    let mut p = initial_guess(xs, ys);
    let mut cost = sse(p, xs, ys);
    let mut lambda = 1e-3;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let (jtj, jtr) = normal_equations(p, xs, ys);
        if jtr.iter().map(|v| v.abs()).fold(0.0, f64::max) < 1e-15 || cost < 1e-30 {
            converged = true;
            break;
        }
        let mut damped = jtj;
        for i in 0..3 {
            damped[i][i] += lambda * jtj[i][i].max(1e-12);
        }
        let Some(delta) = solve3(damped, jtr) else {
            lambda *= 10.0;
            if lambda > 1e16 {
                break;
            }
            continue;
        };
        let trial = project([p[0] + delta[0], p[1] + delta[1], p[2] + delta[2]]);
        let trial_cost = sse(trial, xs, ys);
        if trial_cost <= cost {
            let step: f64 = (0..3)
                .map(|i| ((trial[i] - p[i]) / (p[i].abs() + 1e-12)).abs())
                .fold(0.0, f64::max);
            let gain = cost - trial_cost;
            p = trial;
            cost = trial_cost;
            lambda = (lambda / 10.0).max(1e-15);
            if step < 1e-12 || gain <= 1e-16 * cost.max(1e-300) {
                converged = true;
                break;
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e16 {
                // no descent direction left: treat the current point as the
                // constrained optimum
                converged = true;
                break;
            }
        }
    }
    if !converged || !cost.is_finite() {
        return Err(Error::FitFailure {
            iterations,
            reason: "Levenberg-Marquardt did not converge".into(),
            sse: cost,
        });
    }

    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let sst: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
    let r_squared = if sst > 0.0 {
        1.0 - cost / sst
    } else if cost < 1e-24 {
        1.0
    } else {
        0.0
    };
    Ok(LogisticFit {
        l: p[0],
        k: p[1],
        x0: p[2],
        r_squared,
        sse: cost,
        std_errors: std_errors(p, xs, ys, cost),
        iterations,
    })
}

fn std_errors(p: [f64; 3], xs: &[f64], ys: &[f64], cost: f64) -> Option<[f64; 3]> {
    let dof = xs.len().checked_sub(3).filter(|&d| d > 0)? as f64;
    let (jtj, _) = normal_equations(p, xs, ys);
    let sigma2 = cost / dof;
    let mut out = [0.0; 3];
    for i in 0..3 {
        let mut e = [0.0; 3];
        e[i] = 1.0;
        let col = solve3(jtj, e)?;
        let var = sigma2 * col[i];
        if var.is_nan() || var < 0.0 {
            return None;
        }
        out[i] = var.sqrt();
    }
    Some(out)
}
