//! Reference solutions used to check the schemes: closed-form advection
//! profiles, the Mittag-Leffler function, a separable fractional heat mode,
//! and a full-memory L1 integrator for scalar Caputo problems.

use std::fmt;
use std::sync::Arc;

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::weights::{gamma_fn, ln_gamma_unchecked};

type Evaluator = Arc<dyn Fn(f64, f64) -> Result<f64> + Send + Sync>;

/// Exact `u(x, t)` plus a short description of where it holds.
#[derive(Clone)]
pub struct OracleSolution {
    name: String,
    domain: String,
    eval: Evaluator,
}

impl OracleSolution {
    pub fn new(
        name: impl Into<String>,
        domain: impl Into<String>,
        eval: impl Fn(f64, f64) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            domain: domain.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &str {
        &self.domain
    }

    pub fn eval(&self, x: f64, t: f64) -> Result<f64> {
        (self.eval)(x, t)
    }
}

impl fmt::Debug for OracleSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OracleSolution")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialProfile {
    Exp,
    Cos,
}

/// Solution of `u_t = c·u_x` carrying the profile along `x + ct`.
pub fn exact_advection(kind: InitialProfile, c: f64) -> Result<OracleSolution> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::invalid("c", format!("must be positive, got {c}")));
    }
    Ok(match kind {
        InitialProfile::Exp => {
            OracleSolution::new("exp(x + ct)", "all x, t >= 0", move |x, t| Ok((x + c * t).exp()))
        }
        InitialProfile::Cos => {
            OracleSolution::new("cos(x + ct)", "all x, t >= 0", move |x, t| Ok((x + c * t).cos()))
        }
    })
}

const ML_MAX_TERMS: usize = 10_000;
const ML_MAX_ARG: f64 = 50.0;

/// `E_α(z) = Σ_j z^j/Γ(αj + 1)`.
///
/// The series is summed with terms formed as `exp(j·ln|z| − ln Γ(αj+1))` so
/// the Gamma factor never overflows. Summation stops once terms are shrinking
/// and below `1e-16·|sum|`. Alternating sums whose largest term swamps the
/// result by more than eight digits are not trusted: for `z < 0` and
/// `0 < α < 1` the value then comes from the integral representation
///
/// ```text
/// E_α(−x) = sin(απ)/(απ) · ∫₀¹ [e^{−t·s^{1/α}} + e^{−t·s^{−1/α}}] / (s² + 2s·cos(απ) + 1) ds,
/// t = x^{1/α}
/// ```
///
/// which is also used for `z < −50`. Otherwise such arguments are rejected.
pub fn mittag_leffler(alpha: f64, z: f64) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::invalid("alpha", format!("must be positive, got {alpha}")));
    }
    if !z.is_finite() {
        return Err(Error::invalid("z", format!("must be finite, got {z}")));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    let integral_available = z < 0.0 && alpha < 1.0;
    if z.abs() > ML_MAX_ARG {
        if integral_available {
            return ml_negative_integral(alpha, -z);
        }
        return Err(Error::invalid("z", format!("need |z| <= {ML_MAX_ARG}, got {z}")));
    }
    match ml_series(alpha, z) {
        Err(Error::SeriesNonConvergence { .. }) if integral_available => ml_negative_integral(alpha, -z),
        other => other,
    }
}

fn ml_negative_integral(alpha: f64, x: f64) -> Result<f64> {
    let t = x.powf(1.0 / alpha);
    let cos = (alpha * PI).cos();
    let inv = 1.0 / alpha;
    let integrand = |s: f64| {
        let near = (-t * s.powf(inv)).exp();
        let far = if s > 0.0 { (-t * s.powf(-inv)).exp() } else { 0.0 };
        (near + far) / (s * s + 2.0 * s * cos + 1.0)
    };
    let total = integrate(integrand, 0.0, 1.0, 1e-15)?;
    Ok((alpha * PI).sin() / (alpha * PI) * total)
}

fn ml_series(alpha: f64, z: f64) -> Result<f64> {
    let log_abs = z.abs().ln();
    let negative = z < 0.0;
    let mut sum = 1.0;
    let mut largest = 1.0_f64;
    let mut prev_log = 0.0;
    for j in 1..ML_MAX_TERMS {
        let jf = j as f64;
        let log_term = jf * log_abs - ln_gamma_unchecked(alpha * jf + 1.0);
        let magnitude = log_term.exp();
        let term = if negative && j % 2 == 1 { -magnitude } else { magnitude };
        sum += term;
        largest = largest.max(magnitude);
        if !sum.is_finite() {
            break;
        }
        if log_term < prev_log && magnitude < 1e-16 * sum.abs() {
            if largest * f64::EPSILON > 1e-8 * sum.abs() {
                break;
            }
            return Ok(sum);
        }
        prev_log = log_term;
    }
    Err(Error::SeriesNonConvergence {
        z,
        terms: ML_MAX_TERMS,
    })
}

/// `sin(kx)·E_α(−d·k²·t^α)`: solves `D_t^α u = d·u_xx` with `u(x,0) = sin(kx)`
/// and zero data at `x = 0` and `x = π/k`.
pub fn exact_fractional_diffusion_mode(alpha: f64, d: f64, k: f64) -> Result<OracleSolution> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::invalid("alpha", format!("must lie in (0, 1], got {alpha}")));
    }
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::invalid("k", format!("must be positive, got {k}")));
    }
    if !(d.is_finite() && d >= 0.0) {
        return Err(Error::invalid("d", format!("must be non-negative, got {d}")));
    }
    Ok(OracleSolution::new(
        format!("sin({k}x)·E_{alpha}(-{d}·{k}²·t^{alpha})"),
        format!("0 <= x <= pi/{k}, t >= 0"),
        move |x, t| {
            let decay = mittag_leffler(alpha, -d * k * k * t.max(0.0).powf(alpha))?;
            Ok((k * x).sin() * decay)
        },
    ))
}

/// `u0·E_α(λ·t^α)`, the solution of `D^α u = λu`.
pub fn exact_caputo_relaxation(alpha: f64, lambda: f64, u0: f64) -> Result<OracleSolution> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::invalid("alpha", format!("must lie in (0, 1], got {alpha}")));
    }
    Ok(OracleSolution::new(
        format!("{u0}·E_{alpha}({lambda}·t^{alpha})"),
        "t >= 0",
        move |_x, t| Ok(u0 * mittag_leffler(alpha, lambda * t.max(0.0).powf(alpha))?),
    ))
}

/// Full-history L1 scheme for `D^α u = λu`, implicit in the right-hand side:
///
/// ```text
/// h^{-α}/Γ(2−α) · Σ_{j=0}^{n} b_j (u_{n+1−j} − u_{n−j}) = λ u_{n+1},
/// b_j = (j+1)^{1−α} − j^{1−α}
/// ```
///
/// Returns `u` at levels `0..=nt`.
pub fn l1_fractional_ode_solve(lambda: f64, alpha: f64, u0: f64, h: f64, nt: usize) -> Result<Vec<f64>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid("alpha", format!("must lie in (0, 1), got {alpha}")));
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::invalid("h", format!("must be positive, got {h}")));
    }
    if !lambda.is_finite() || !u0.is_finite() {
        return Err(Error::NonFinite { what: "lambda/u0" });
    }
    let one_minus = 1.0 - alpha;
    let b: Vec<f64> = (0..=nt)
        .map(|j| {
            let jf = j as f64;
            (jf + 1.0).powf(one_minus) - jf.powf(one_minus)
        })
        .collect();
    let scale = h.powf(-alpha) / gamma_fn(2.0 - alpha)?;
    let mut u = Vec::with_capacity(nt + 1);
    u.push(u0);
    for n in 0..nt {
        let history: f64 = (1..=n).map(|j| b[j] * (u[n + 1 - j] - u[n - j])).sum();
        let next = scale * (u[n] - history) / (scale - lambda);
        u.push(next);
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{E, PI};

    #[test]
    fn advection_profiles() {
        let e = exact_advection(InitialProfile::Exp, 1.0).unwrap();
        assert_eq!(e.eval(0.0, 0.0).unwrap(), 1.0);
        assert_relative_eq!(e.eval(0.5, 0.5).unwrap(), E, epsilon = 1e-15);
        let c = exact_advection(InitialProfile::Cos, 2.0).unwrap();
        assert_eq!(c.eval(0.0, 0.0).unwrap(), 1.0);
        assert!(exact_advection(InitialProfile::Exp, 0.0).is_err());
    }

    #[test]
    fn advection_profiles_satisfy_pde() {
        let step = 1e-5;
        for kind in [InitialProfile::Exp, InitialProfile::Cos] {
            let c = 1.3;
            let o = exact_advection(kind, c).unwrap();
            for &(x, t) in &[(0.1, 0.2), (0.5, 0.5), (0.9, 0.05)] {
                let ut = (o.eval(x, t + step).unwrap() - o.eval(x, t - step).unwrap()) / (2.0 * step);
                let ux = (o.eval(x + step, t).unwrap() - o.eval(x - step, t).unwrap()) / (2.0 * step);
                assert!((ut - c * ux).abs() <= 1e-6, "{kind:?} at ({x},{t})");
            }
        }
    }

    #[test]
    fn mittag_leffler_identities() {
        for a in [0.1, 0.5, 1.0, 2.0] {
            assert_eq!(mittag_leffler(a, 0.0).unwrap(), 1.0);
        }
        assert_relative_eq!(mittag_leffler(1.0, 1.0).unwrap(), E, max_relative = 1e-14);
        assert_relative_eq!(mittag_leffler(1.0, -3.0).unwrap(), (-3f64).exp(), max_relative = 1e-12);
        assert_relative_eq!(mittag_leffler(2.0, -1.0).unwrap(), 1f64.cos(), max_relative = 1e-14);
        assert_relative_eq!(mittag_leffler(2.0, -4.0).unwrap(), 2f64.cos(), epsilon = 1e-13);
        // E_{1/2}(−z) = e^{z²}·erfc(z); erfc(1) = 0.157299207050285
        assert_relative_eq!(
            mittag_leffler(0.5, -1.0).unwrap(),
            1f64.exp() * 0.157_299_207_050_285_13,
            max_relative = 1e-12
        );
    }

    #[test]
    fn mittag_leffler_rejects_out_of_range() {
        assert!(mittag_leffler(0.5, 60.0).is_err());
        assert!(mittag_leffler(0.0, 1.0).is_err());
        assert!(mittag_leffler(0.5, f64::NAN).is_err());
        assert!(mittag_leffler(1.5, -60.0).is_err());
    }

    #[test]
    fn mittag_leffler_large_negative_arguments() {
        // E_{1/2}(−x) = erfcx(x), values from an independent erfcx implementation
        for (x, erfcx) in [(3.0, 0.179_001_151_181_389_98), (10.0, 0.056_140_992_743_822_59), (60.0, 0.009_401_854_275_176_388)] {
            assert_relative_eq!(mittag_leffler(0.5, -x).unwrap(), erfcx, max_relative = 1e-10);
        }
        // 40-digit series sums
        assert_relative_eq!(mittag_leffler(0.3, -2.420_808_150_838_691_4).unwrap(), 0.251_200_623_029_589_07, max_relative = 1e-10);
        assert_relative_eq!(mittag_leffler(0.3, -4.9).unwrap(), 0.139_549_327_679_470_3, max_relative = 1e-10);
        assert_relative_eq!(mittag_leffler(0.1, -1.5).unwrap(), 0.385_826_133_363_783_7, max_relative = 1e-10);
    }

    #[test]
    fn mittag_leffler_relaxation_is_monotone() {
        for &alpha in &[0.3, 0.6, 0.9, 1.0] {
            let mut last = f64::INFINITY;
            for k in 0..=60 {
                let t = k as f64 * 0.05;
                let v = mittag_leffler(alpha, -1.5 * t.powf(alpha)).unwrap();
                assert!(v < last || k == 0, "α={alpha} t={t}");
                last = v;
            }
        }
    }

    #[test]
    fn heat_mode_values() {
        let o = exact_fractional_diffusion_mode(1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(o.eval(PI / 2.0, 1.0).unwrap(), (-1f64).exp(), max_relative = 1e-12);
        let f = exact_fractional_diffusion_mode(0.6, 0.3, 2.0).unwrap();
        for &x in &[0.1, 0.7, 1.3] {
            assert_relative_eq!(f.eval(x, 0.0).unwrap(), (2.0 * x).sin(), epsilon = 1e-15);
        }
        for &t in &[0.0, 0.5, 2.0] {
            assert!(f.eval(0.0, t).unwrap().abs() < 1e-15);
            assert!(f.eval(PI / 2.0, t).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn heat_mode_solves_classical_equation() {
        // α = 1: check u_t = d u_xx by central differences
        let (d, k) = (0.4, 1.5);
        let o = exact_fractional_diffusion_mode(1.0, d, k).unwrap();
        let s = 1e-4;
        for &(x, t) in &[(0.3, 0.2), (1.0, 0.7)] {
            let ut = (o.eval(x, t + s).unwrap() - o.eval(x, t - s).unwrap()) / (2.0 * s);
            let uxx = (o.eval(x + s, t).unwrap() - 2.0 * o.eval(x, t).unwrap() + o.eval(x - s, t).unwrap())
                / (s * s);
            assert!((ut - d * uxx).abs() <= 1e-6, "({x},{t})");
        }
    }

    #[test]
    fn l1_examples() {
        let flat = l1_fractional_ode_solve(0.0, 0.4, 2.5, 0.1, 30).unwrap();
        assert!(flat.iter().all(|&u| u == 2.5));

        let u = l1_fractional_ode_solve(-1.0, 0.5, 1.0, 0.01, 100).unwrap();
        let exact = mittag_leffler(0.5, -1.0).unwrap();
        assert!((u[100] - exact).abs() < 2e-2);

        let near = l1_fractional_ode_solve(-1.0, 0.99, 1.0, 0.01, 100).unwrap();
        assert!((near[100] - (-1f64).exp()).abs() < 5e-2);

        assert!(l1_fractional_ode_solve(-1.0, 1.0, 1.0, 0.01, 10).is_err());
    }
}
