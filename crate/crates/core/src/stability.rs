//! Stability margins, a Fourier-mode amplification probe, and the
//! interpolation-remainder bound for the fractional step.
//!
//! The margins are the textbook single-step criteria (`3hc/4l < 1` for the
//! advection scheme, `2h^α d δ_n/(l²Γ(α)) < 1` for fractional diffusion).
//! Neither accounts for the second root of the two-step recurrence, so the
//! probe iterates the recurrence itself and is the operative check.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::weights::{check_alpha, delta_weights, gamma_fn};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarginKind {
    Classical,
    Fractional,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityMargin {
    pub value: f64,
    pub kind: MarginKind,
    /// Level attaining the maximum (fractional margins only).
    pub n_at_max: Option<usize>,
}

impl StabilityMargin {
    pub fn within_criterion(&self) -> bool {
        self.value < 1.0
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be positive, got {v}")))
    }
}

/// `3hc/(4l)` for AB2 with forward differencing.
pub fn classical_margin(h: f64, l: f64, c: f64) -> Result<StabilityMargin> {
    positive("h", h)?;
    positive("l", l)?;
    positive("c", c)?;
    Ok(StabilityMargin {
        value: 3.0 * h * c / (4.0 * l),
        kind: MarginKind::Classical,
        n_at_max: None,
    })
}

/// `max_{0≤n≤n_max} 2·h^α·d·δ_n/(l²·Γ(α))`.
pub fn fractional_margin(h: f64, l: f64, d: f64, alpha: f64, n_max: usize) -> Result<StabilityMargin> {
    positive("h", h)?;
    positive("l", l)?;
    if !(d.is_finite() && d >= 0.0) {
        return Err(Error::invalid("d", format!("must be non-negative, got {d}")));
    }
    check_alpha(alpha)?;
    let scale = 2.0 * h.powf(alpha) * d / (l * l * gamma_fn(alpha)?);
    let mut best = (0usize, f64::NEG_INFINITY);
    for n in 0..=n_max {
        let delta = delta_weights(alpha, n)?.delta;
        if delta > best.1 {
            best = (n, delta);
        }
    }
    Ok(StabilityMargin {
        value: scale * best.1,
        kind: MarginKind::Fractional,
        n_at_max: Some(best.0),
    })
}

/// Largest `δ_n` over `0..=n_max`.
pub fn max_delta(alpha: f64, n_max: usize) -> Result<f64> {
    let mut best = f64::NEG_INFINITY;
    for n in 0..=n_max {
        best = best.max(delta_weights(alpha, n)?.delta);
    }
    Ok(best)
}

/// Scalar model whose Fourier modes the probe iterates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProbeModel {
    /// AB2 with forward differencing; depends only on `ν = hc/l`.
    ClassicalAdvection { courant: f64 },
    /// Fractional two-step scheme with centred second differences.
    FractionalDiffusion { h: f64, l: f64, d: f64, alpha: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmplificationTrace {
    /// Fourier angle `f·l`.
    pub theta: f64,
    /// `|û_n|/|û_0|` for `n = 0..`; an overflowing run ends with `+∞`.
    pub ratios: Vec<f64>,
    /// Recurrence coefficients at the last level iterated.
    pub a1: Complex64,
    pub a2: Complex64,
}

impl AmplificationTrace {
    pub fn max_ratio(&self) -> f64 {
        self.ratios.iter().copied().fold(0.0, f64::max)
    }

    pub fn final_ratio(&self) -> f64 {
        *self.ratios.last().expect("ratios start at 1")
    }
}

/// Iterates `û_{n+1} = A₁(θ,n)·û_n + A₂(θ,n)·û_{n-1}` from `û_0 = 1`, with
/// `û_1` from the bootstrap rule, for `θ_k = kπ/theta_samples`,
/// `k = 1..=theta_samples`.
pub fn amplification_probe(
    model: &ProbeModel,
    theta_samples: usize,
    n_steps: usize,
) -> Result<Vec<AmplificationTrace>> {
    if theta_samples < 1 {
        return Err(Error::invalid("theta_samples", "need at least one sample"));
    }
    if n_steps < 2 {
        return Err(Error::invalid("n_steps", format!("need at least 2, got {n_steps}")));
    }
    let coeffs = Coefficients::new(model, n_steps)?;
    Ok((1..=theta_samples)
        .map(|k| {
            let theta = std::f64::consts::PI * k as f64 / theta_samples as f64;
            probe_one(&coeffs, theta, n_steps)
        })
        .collect())
}

/// Largest `|û_n|/|û_0|` over every sampled angle and level.
pub fn max_amplification(traces: &[AmplificationTrace]) -> f64 {
    traces.iter().map(AmplificationTrace::max_ratio).fold(0.0, f64::max)
}

enum Coefficients {
    Advection { courant: f64 },
    // per-level (μ·δ_n, μ·δ'_n) with μ = 2h^α d/(l²Γ(α)), before the (1 − cos θ) factor
    Diffusion { scaled: Vec<(f64, f64)> },
}

impl Coefficients {
    fn new(model: &ProbeModel, n_steps: usize) -> Result<Self> {
        match *model {
            ProbeModel::ClassicalAdvection { courant } => {
                positive("courant", courant)?;
                Ok(Coefficients::Advection { courant })
            }
            ProbeModel::FractionalDiffusion { h, l, d, alpha } => {
                positive("h", h)?;
                positive("l", l)?;
                positive("d", d)?;
                check_alpha(alpha)?;
                let mu = 2.0 * h.powf(alpha) * d / (l * l * gamma_fn(alpha)?);
                let scaled = (0..n_steps)
                    .map(|n| delta_weights(alpha, n).map(|w| (mu * w.delta, mu * w.delta_prev)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Coefficients::Diffusion { scaled })
            }
        }
    }

    fn at(&self, theta: f64, n: usize) -> (Complex64, Complex64) {
        match self {
            Coefficients::Advection { courant } => {
                let shift = Complex64::from_polar(1.0, theta);
                let a1 = 1.0 - 1.5 * courant + 1.5 * courant * shift;
                let a2 = 0.5 * courant - 0.5 * courant * shift;
                (a1, a2)
            }
            Coefficients::Diffusion { scaled } => {
                let s = 1.0 - theta.cos();
                let (m, mp) = scaled[n];
                (Complex64::new(1.0 - m * s, 0.0), Complex64::new(mp * s, 0.0))
            }
        }
    }

    fn first_factor(&self, theta: f64) -> Complex64 {
        match self {
            Coefficients::Advection { courant } => {
                1.0 + courant * (Complex64::from_polar(1.0, theta) - 1.0)
            }
            // F_{-1} := F_0 folds both level-0 coefficients together
            Coefficients::Diffusion { .. } => {
                let (a1, a2) = self.at(theta, 0);
                a1 + a2
            }
        }
    }
}

fn probe_one(coeffs: &Coefficients, theta: f64, n_steps: usize) -> AmplificationTrace {
    let mut ratios = Vec::with_capacity(n_steps + 1);
    let mut prev = Complex64::new(1.0, 0.0);
    let mut cur = coeffs.first_factor(theta) * prev;
    ratios.push(1.0);
    ratios.push(cur.norm());
    let (mut a1, mut a2) = coeffs.at(theta, 0);
    for n in 1..n_steps {
        (a1, a2) = coeffs.at(theta, n);
        let next = a1 * cur + a2 * prev;
        let r = next.norm();
        if !r.is_finite() {
            ratios.push(f64::INFINITY);
            break;
        }
        ratios.push(r);
        prev = cur;
        cur = next;
    }
    AmplificationTrace {
        theta,
        ratios,
        a1,
        a2,
    }
}

/// `h^{2+α}·m2·((n+1)^α + n^α)/(8·Γ(α+1))`, a bound on the remainder left
/// by replacing `F` with its linear interpolant; `m2 = max |F''|`.
pub fn residual_bound(h: f64, alpha: f64, n: usize, m2: f64) -> Result<f64> {
    positive("h", h)?;
    check_alpha(alpha)?;
    if !(m2.is_finite() && m2 >= 0.0) {
        return Err(Error::invalid("m2", format!("must be finite and non-negative, got {m2}")));
    }
    let nf = n as f64;
    let powers = (nf + 1.0).powf(alpha) + nf.powf(alpha);
    Ok(h.powf(2.0 + alpha) * m2 * powers / (8.0 * gamma_fn(alpha + 1.0)?))
}

/// Running `max |F_{n+1} − 2F_n + F_{n-1}|/h²` over a trajectory of `F`.
#[derive(Debug, Clone, Default)]
pub struct SecondDifferenceTracker {
    older: Option<Vec<f64>>,
    newer: Option<Vec<f64>>,
    max: f64,
}

impl SecondDifferenceTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, f: Vec<f64>, h: f64) {
        if let (Some(a), Some(b)) = (&self.older, &self.newer) {
            let inv = 1.0 / (h * h);
            for ((x, y), z) in a.iter().zip(b).zip(&f) {
                let v = ((z - 2.0 * y + x) * inv).abs();
                if v.is_finite() {
                    self.max = self.max.max(v);
                }
            }
        }
        self.older = self.newer.take();
        self.newer = Some(f);
    }

    pub fn max(&self) -> f64 {
        self.max
    }
}

/// [`SecondDifferenceTracker`] over a stored history.
pub fn estimate_m2(history: &[Vec<f64>], h: f64) -> f64 {
    let mut t = SecondDifferenceTracker::new();
    for f in history {
        t.push(f.clone(), h);
    }
    t.max()
}
