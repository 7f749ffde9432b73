//! Two-step time advancement: classical AB2, the fractional two-step
//! scheme, and the Euler-type first step that starts them.

use crate::error::{Error, Result};
use crate::mesh::{check_finite, FieldState, TimeGrid};
use crate::weights::{check_alpha, delta_weights, gamma_fn};

/// Evaluates `F_n` from the state at level `n`.
pub trait RhsEvaluator {
    fn evaluate(&self, u: &[f64], level: usize) -> Vec<f64>;
}

impl<F> RhsEvaluator for F
where
    F: Fn(&[f64], usize) -> Vec<f64>,
{
    fn evaluate(&self, u: &[f64], level: usize) -> Vec<f64> {
        self(u, level)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SchemeKind {
    ClassicalAb2,
    FractionalAb2 { alpha: f64 },
}

impl SchemeKind {
    pub fn fractional(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(SchemeKind::FractionalAb2 { alpha })
    }

    pub fn alpha(&self) -> f64 {
        match *self {
            SchemeKind::ClassicalAb2 => 1.0,
            SchemeKind::FractionalAb2 { alpha } => alpha,
        }
    }

    /// Coefficients `(a, b)` of the update `u + a·F_n − b·F_{n-1}` at level `n`.
    pub fn coefficients(&self, h: f64, n: usize) -> Result<(f64, f64)> {
        match *self {
            SchemeKind::ClassicalAb2 => Ok((1.5 * h, 0.5 * h)),
            SchemeKind::FractionalAb2 { alpha } => {
                let w = delta_weights(alpha, n)?;
                let scale = h.powf(alpha) / gamma_fn(alpha)?;
                Ok((scale * w.delta, scale * w.delta_prev))
            }
        }
    }
}

fn check_step_inputs(u: &[f64], f: &[f64], f_prev: &[f64], h: f64) -> Result<()> {
    for v in [f, f_prev] {
        if v.len() != u.len() {
            return Err(Error::LengthMismatch {
                expected: u.len(),
                found: v.len(),
            });
        }
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::invalid("h", format!("must be positive, got {h}")));
    }
    check_finite(u, "u")?;
    check_finite(f, "F_n")?;
    check_finite(f_prev, "F_prev")
}

fn combine(u: &[f64], f: &[f64], f_prev: &[f64], a: f64, b: f64) -> Vec<f64> {
    u.iter()
        .zip(f)
        .zip(f_prev)
        .map(|((u, f), fp)| u + (a * f - b * fp))
        .collect()
}

/// `u_n + h·(3/2·F_n − 1/2·F_{n-1})`.
pub fn ab2_step(u: &[f64], f: &[f64], f_prev: &[f64], h: f64) -> Result<Vec<f64>> {
    check_step_inputs(u, f, f_prev, h)?;
    Ok(u
        .iter()
        .zip(f)
        .zip(f_prev)
        .map(|((u, f), fp)| u + h * (1.5 * f - 0.5 * fp))
        .collect())
}

/// `u_n + h^α/Γ(α)·(δ_n F_n − δ'_n F_{n-1})`.
pub fn fab2_step(
    u: &[f64],
    f: &[f64],
    f_prev: &[f64],
    h: f64,
    alpha: f64,
    n: usize,
) -> Result<Vec<f64>> {
    check_step_inputs(u, f, f_prev, h)?;
    let (a, b) = SchemeKind::fractional(alpha)?.coefficients(h, n)?;
    Ok(combine(u, f, f_prev, a, b))
}

/// First step. Classical: forward Euler. Fractional: the `n = 0` step with
/// `F_{-1} := F_0`, which collapses to `u_0 + h^α/Γ(α+1)·F_0` since
/// `δ_0 − δ'_0 = 1/α`.
pub fn bootstrap_step(u0: &[f64], f0: &[f64], h: f64, scheme: SchemeKind) -> Result<Vec<f64>> {
    check_step_inputs(u0, f0, f0, h)?;
    match scheme {
        SchemeKind::ClassicalAb2 => Ok(u0.iter().zip(f0).map(|(u, f)| u + h * f).collect()),
        SchemeKind::FractionalAb2 { alpha } => fab2_step(u0, f0, f0, h, alpha, 0),
    }
}

type Constraint<'a> = Box<dyn FnMut(&mut [f64], f64) + 'a>;

/// Time loop holding exactly two levels of `u` and the previous `F`.
///
/// An optional constraint runs on each new level before it is stored
/// (used to re-impose Dirichlet data).
pub struct Integrator<'a, R: RhsEvaluator + ?Sized> {
    rhs: &'a R,
    scheme: SchemeKind,
    time: TimeGrid,
    state: FieldState,
    rhs_prev: Option<Vec<f64>>,
    constraint: Option<Constraint<'a>>,
}

impl<'a, R: RhsEvaluator + ?Sized> Integrator<'a, R> {
    pub fn new(ic: Vec<f64>, rhs: &'a R, time: TimeGrid, scheme: SchemeKind) -> Result<Self> {
        if let SchemeKind::FractionalAb2 { alpha } = scheme {
            check_alpha(alpha)?;
        }
        if ic.is_empty() {
            return Err(Error::invalid("ic", "empty initial condition"));
        }
        Ok(Self {
            rhs,
            scheme,
            time,
            state: FieldState::initial(ic)?,
            rhs_prev: None,
            constraint: None,
        })
    }

    pub fn with_constraint(mut self, f: impl FnMut(&mut [f64], f64) + 'a) -> Self {
        self.constraint = Some(Box::new(f));
        self
    }

    pub fn state(&self) -> &FieldState {
        &self.state
    }

    pub fn level(&self) -> usize {
        self.state.level
    }

    pub fn time_grid(&self) -> &TimeGrid {
        &self.time
    }

    pub fn is_finished(&self) -> bool {
        self.state.level >= self.time.nt()
    }

    /// `F` at the level before the current one, once a step has been taken.
    pub fn previous_rhs(&self) -> Option<&[f64]> {
        self.rhs_prev.as_deref()
    }

    /// Advances one level. A non-finite result is reported as
    /// [`Error::Unstable`] carrying the level that failed; the stored state
    /// is left at the last finite level.
    pub fn step(&mut self) -> Result<&FieldState> {
        let n = self.state.level;
        let h = self.time.h();
        let f = self.rhs.evaluate(&self.state.current, n);
        if f.len() != self.state.len() {
            return Err(Error::LengthMismatch {
                expected: self.state.len(),
                found: f.len(),
            });
        }
        let mut next = match &self.rhs_prev {
            None => {
                let (a, b) = self.scheme_first_coefficients(h)?;
                combine(&self.state.current, &f, &f, a, b)
            }
            Some(f_prev) => {
                let (a, b) = self.scheme.coefficients(h, n)?;
                combine(&self.state.current, &f, f_prev, a, b)
            }
        };
        if !next.iter().all(|x| x.is_finite()) || !f.iter().all(|x| x.is_finite()) {
            return Err(Error::Unstable { level: n + 1 });
        }
        if let Some(c) = self.constraint.as_mut() {
            c(&mut next, self.time.time(n + 1));
        }
        self.state.push(next);
        self.rhs_prev = Some(f);
        Ok(&self.state)
    }

    fn scheme_first_coefficients(&self, h: f64) -> Result<(f64, f64)> {
        match self.scheme {
            // forward Euler as u + h·F − 0·F
            SchemeKind::ClassicalAb2 => Ok((h, 0.0)),
            SchemeKind::FractionalAb2 { .. } => self.scheme.coefficients(h, 0),
        }
    }
}

/// Runs the full loop and returns the states at levels `1..=nt`.
pub fn advance<R: RhsEvaluator + ?Sized>(
    ic: Vec<f64>,
    rhs: &R,
    time: &TimeGrid,
    scheme: SchemeKind,
) -> Result<Vec<FieldState>> {
    let mut integrator = Integrator::new(ic, rhs, *time, scheme)?;
    let mut out = Vec::with_capacity(time.nt());
    while !integrator.is_finished() {
        out.push(integrator.step()?.clone());
    }
    Ok(out)
}
