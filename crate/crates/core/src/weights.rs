//! Gamma function and the fractional two-step Adams–Bashforth weights.
//!
//! Integrating the linear interpolant of `F` through `(t_{n-1}, F_{n-1})` and
//! `(t_n, F_n)` against the Riemann–Liouville kernel `(t - τ)^{α-1}` at
//! `t_{n+1}` and at `t_n`, and subtracting, gives
//!
//! ```text
//! u_{n+1} = u_n + h^α/Γ(α) · (δ_n F_n − δ'_n F_{n-1})
//! δ_n  = (2(n+1)^α − n^α)/α + (n^{α+1} − (n+1)^{α+1})/(α+1)
//! δ'_n = (n+1)^α/α          + (n^{α+1} − (n+1)^{α+1})/(α+1)
//! ```
//!
//! At `α = 1` the pair is `(3/2, 1/2)` for every `n`, i.e. classical AB2.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(z: f64) -> f64 {
    // z is the shifted argument x - 1
    LANCZOS[1..]
        .iter()
        .enumerate()
        .fold(LANCZOS[0], |acc, (k, c)| acc + c / (z + (k + 1) as f64))
}

/// Γ(x) for `x > 0`.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::invalid("x", format!("gamma needs x > 0, got {x}")));
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // reflection keeps the Lanczos sum on its accurate half-plane
        PI / ((PI * x).sin() * gamma_unchecked(1.0 - x))
    } else {
        let z = x - 1.0;
        let t = z + LANCZOS_G + 0.5;
        (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * lanczos_sum(z)
    }
}

/// ln Γ(x) for `x > 0`; stays finite where Γ itself overflows.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::invalid("x", format!("ln_gamma needs x > 0, got {x}")));
    }
    Ok(ln_gamma_unchecked(x))
}

pub(crate) fn ln_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        (PI / (PI * x).sin()).ln() - ln_gamma_unchecked(1.0 - x)
    } else {
        let z = x - 1.0;
        let t = z + LANCZOS_G + 0.5;
        0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln()
    }
}

/// Coefficients of `F_n` (`delta`) and `F_{n-1}` (`delta_prev`) at level `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepWeights {
    pub delta: f64,
    pub delta_prev: f64,
    pub n: usize,
    pub alpha: f64,
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid("alpha", format!("must lie in (0, 1], got {alpha}")))
    }
}

/// Closed-form weight pair for level `n`.
///
/// The power differences `(n+1)^p − n^p` are formed as
/// `(n+1)^p · (1 − (n/(n+1))^p)` through `ln_1p`/`exp_m1`, so nothing
/// cancels when `n` is large. `n = 0` uses `0^α = 0^{α+1} = 0`.
pub fn delta_weights(alpha: f64, n: usize) -> Result<StepWeights> {
    check_alpha(alpha)?;
    let np1 = (n + 1) as f64;
    let log_ratio = (-1.0 / np1).ln_1p();
    let pow_a = np1.powf(alpha);
    let pow_a1 = pow_a * np1;
    let diff_a = -pow_a * (alpha * log_ratio).exp_m1();
    let diff_a1 = -pow_a1 * ((alpha + 1.0) * log_ratio).exp_m1();

    let delta_prev = pow_a / alpha - diff_a1 / (alpha + 1.0);
    let delta = delta_prev + diff_a / alpha;
    Ok(StepWeights {
        delta,
        delta_prev,
        n,
        alpha,
    })
}

/// Recomputes the weight pair by numerically integrating the kernel against
/// the two Lagrange basis functions (with `h = 1`, `t_j = j`).
///
/// Each moment is summed panel by panel over `[t_j, t_{j+1}]` after the
/// substitution `y = T − t`. The panel touching `y = 0` carries the
/// `y^{α-1}` singularity and is mapped once more through `y = s^{1/α}`,
/// which turns `y^{α-1} dy` into `ds/α`.
pub fn kernel_moment_oracle(alpha: f64, n: usize, quad_tol: f64) -> Result<StepWeights> {
    check_alpha(alpha)?;
    if !(quad_tol.is_finite() && quad_tol > 0.0) {
        return Err(Error::invalid("quad_tol", format!("must be positive, got {quad_tol}")));
    }
    let nf = n as f64;
    let t_prev = nf - 1.0;
    let t_cur = nf;
    // basis for F_n is (t - t_{n-1}); basis for F_{n-1} is -(t - t_n)
    let panels_total = (2 * n + 1) as f64;
    let tol = quad_tol / (2.0 * panels_total);

    let outer = nf + 1.0;
    let a_upper = kernel_moment(alpha, outer, n + 1, |t| t - t_prev, tol)?;
    let b_upper = kernel_moment(alpha, outer, n + 1, |t| t - t_cur, tol)?;
    let a_lower = kernel_moment(alpha, nf, n, |t| t - t_prev, tol)?;
    let b_lower = kernel_moment(alpha, nf, n, |t| t - t_cur, tol)?;

    Ok(StepWeights {
        delta: a_upper - a_lower,
        delta_prev: b_upper - b_lower,
        n,
        alpha,
    })
}

/// `∫₀^T (T − t)^{α−1} basis(t) dt` over `panels` unit panels, `T = panels`.
fn kernel_moment<B: Fn(f64) -> f64>(
    alpha: f64,
    upper: f64,
    panels: usize,
    basis: B,
    tol: f64,
) -> Result<f64> {
    let mut total = 0.0;
    for j in 0..panels {
        let y_lo = upper - (j + 1) as f64;
        let y_hi = upper - j as f64;
        let value = if y_lo <= 0.0 {
            let s_hi = y_hi.powf(alpha);
            quadrature::integrate(
                |s: f64| basis(upper - s.powf(1.0 / alpha)) / alpha,
                0.0,
                s_hi,
                tol,
            )?
        } else {
            quadrature::integrate(
                |y: f64| y.powf(alpha - 1.0) * basis(upper - y),
                y_lo,
                y_hi,
                tol,
            )?
        };
        total += value;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // Euler integral Γ(x) = ∫₀^∞ t^{x-1} e^{-t} dt, with t = s² to tame x = 1/2.
    fn euler_integral_half() -> f64 {
        2.0 * quadrature::integrate(|s: f64| (-s * s).exp(), 0.0, 40.0, 1e-14).unwrap()
    }

    #[test]
    fn gamma_known_values() {
        assert_relative_eq!(gamma_fn(1.0).unwrap(), 1.0, max_relative = 1e-13);
        assert_relative_eq!(gamma_fn(5.0).unwrap(), 24.0, max_relative = 1e-13);
        let half = gamma_fn(0.5).unwrap();
        assert_relative_eq!(half, 1.772_453_850_9, epsilon = 1e-10);
        assert_relative_eq!(half, euler_integral_half(), max_relative = 1e-12);
        assert_relative_eq!(half, PI.sqrt(), max_relative = 1e-13);
    }

    #[test]
    fn gamma_recurrence_on_unit_interval_to_ten() {
        for k in 1..1000 {
            let x = k as f64 * 0.009;
            let lhs = gamma_fn(x + 1.0).unwrap();
            let rhs = x * gamma_fn(x).unwrap();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
        }
    }

    #[test]
    fn gamma_factorials() {
        let mut fact = 1.0;
        for k in 1..=10 {
            assert_relative_eq!(gamma_fn(k as f64).unwrap(), fact, max_relative = 1e-13);
            fact *= k as f64;
        }
    }

    #[test]
    fn gamma_rejects_nonpositive() {
        assert!(gamma_fn(0.0).is_err());
        assert!(gamma_fn(-1.5).is_err());
        assert!(gamma_fn(f64::NAN).is_err());
    }

    #[test]
    fn ln_gamma_matches_gamma_and_handles_large() {
        for &x in &[0.1, 0.5, 1.3, 4.0, 9.9, 30.0] {
            assert_relative_eq!(
                ln_gamma(x).unwrap(),
                gamma_fn(x).unwrap().ln(),
                max_relative = 1e-12,
                epsilon = 1e-13
            );
        }
        // ln 200! − ln 199! = ln 200
        let d = ln_gamma(201.0).unwrap() - ln_gamma(200.0).unwrap();
        assert_relative_eq!(d, 200f64.ln(), max_relative = 1e-12);
    }

    #[test]
    fn classical_weights_recovered() {
        let w = delta_weights(1.0, 7).unwrap();
        assert_relative_eq!(w.delta, 1.5, epsilon = 1e-12);
        assert_relative_eq!(w.delta_prev, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn half_order_level_zero() {
        // 2/0.5 − 1/1.5 and 1/0.5 − 1/1.5
        let w = delta_weights(0.5, 0).unwrap();
        assert_relative_eq!(w.delta, 4.0 - 2.0 / 3.0, epsilon = 1e-14);
        assert_relative_eq!(w.delta_prev, 2.0 - 2.0 / 3.0, epsilon = 1e-14);
        assert_relative_eq!(w.delta, 3.333_333_3, epsilon = 1e-7);
        assert_relative_eq!(w.delta_prev, 1.333_333_3, epsilon = 1e-7);
    }

    #[test]
    fn half_order_level_one() {
        let s2 = 2f64.sqrt();
        let s2_3 = 2f64.powf(1.5);
        let delta = (2.0 * s2 - 1.0) / 0.5 + (1.0 - s2_3) / 1.5;
        let delta_prev = s2 / 0.5 + (1.0 - s2_3) / 1.5;
        let w = delta_weights(0.5, 1).unwrap();
        assert_relative_eq!(w.delta, delta, epsilon = 1e-14);
        assert_relative_eq!(w.delta_prev, delta_prev, epsilon = 1e-14);
        assert_relative_eq!(w.delta, 2.437_902_8, epsilon = 1e-7);
        assert_relative_eq!(w.delta_prev, 1.609_475_7, epsilon = 1e-7);
    }

    #[test]
    fn weights_reject_bad_alpha() {
        for a in [0.0, -0.2, 1.0001, f64::NAN] {
            assert!(delta_weights(a, 3).is_err());
            assert!(kernel_moment_oracle(a, 3, 1e-10).is_err());
        }
        assert!(kernel_moment_oracle(0.5, 3, 0.0).is_err());
    }

    #[test]
    fn oracle_classical_case() {
        let w = kernel_moment_oracle(1.0, 3, 1e-10).unwrap();
        assert!((w.delta - 1.5).abs() < 1e-9);
        assert!((w.delta_prev - 0.5).abs() < 1e-9);
    }

    #[test]
    fn oracle_matches_closed_form_spot_checks() {
        for &(alpha, n) in &[(0.5, 0), (0.3, 20), (0.5, 1)] {
            let q = kernel_moment_oracle(alpha, n, 1e-10).unwrap();
            let c = delta_weights(alpha, n).unwrap();
            assert!((q.delta - c.delta).abs() < 1e-8, "α={alpha} n={n}");
            assert!((q.delta_prev - c.delta_prev).abs() < 1e-8, "α={alpha} n={n}");
        }
    }

    #[test]
    fn weight_gap_identity() {
        for &alpha in &[0.05, 0.3, 0.77, 1.0] {
            for n in [0usize, 1, 3, 50, 999] {
                let w = delta_weights(alpha, n).unwrap();
                let np1 = (n + 1) as f64;
                let gap = (np1.powf(alpha) - (n as f64).powf(alpha)) / alpha;
                assert_relative_eq!(w.delta - w.delta_prev, gap, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn delta_increments_shrink_for_large_n() {
        // the increments only settle into decrease once n is past a few
        // multiples of 1/(1-α); n >= 10 covers α <= 0.8
        for &(alpha, start) in &[(0.1, 10), (0.2, 10), (0.5, 10), (0.8, 10), (0.9, 20)] {
            let d: Vec<f64> = (start..start + 200)
                .map(|n| delta_weights(alpha, n).unwrap().delta)
                .collect();
            for k in 0..d.len() - 2 {
                let a = (d[k + 1] - d[k]).abs();
                let b = (d[k + 2] - d[k + 1]).abs();
                assert!(b < a, "α={alpha}: increments not decreasing at n={}", k + start);
            }
        }
    }
}
