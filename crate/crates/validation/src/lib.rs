//! The acceptance criteria as callable checks. Each returns an [`Outcome`]
//! whose thresholds are fixed constants inside the check.
//!
//! ```no_run
//! for check in fracab_validation::ALL {
//!     println!("{}", check());
//! }
//! ```

use std::fmt;
use std::time::{Duration, Instant};

use fracab_cli::{convergence_study, parse_config, simulate, stability_sweep, RunConfig};
use fracab_core::reference::{exact_caputo_relaxation, l1_fractional_ode_solve};
use fracab_core::spatial::{advection_rhs, diffusion_rhs};
use fracab_core::stability::residual_bound;
use fracab_core::steppers::{ab2_step, fab2_step};
use fracab_core::weights::kernel_moment_oracle;
use fracab_core::{advance, delta_weights, gamma_fn, SchemeKind, TimeGrid};

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: u32,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl Outcome {
    fn new(id: u32, title: &'static str, pass: bool, detail: String) -> Self {
        Self { id, title, pass, detail }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{tag} criterion {} {}: {}", self.id, self.title, self.detail)
    }
}

pub const ALL: [fn() -> Outcome; 9] = [
    criterion_1_weight_recovery,
    criterion_2_closed_form_vs_quadrature,
    criterion_3_stencil_equivalence,
    criterion_4_bootstrap_identity,
    criterion_5_advection_accuracy,
    criterion_6_fractional_ode_convergence,
    criterion_7_fractional_diffusion,
    criterion_8_stability_dichotomy,
    criterion_9_residual_bound,
];


pub fn criterion_1_weight_recovery() -> Outcome {
    const TOL: f64 = 1e-12;
    const BUDGET: Duration = Duration::from_secs(1);
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for n in 0..1000 {
        let w = delta_weights(1.0, n).unwrap();
        worst = worst.max((w.delta - 1.5).abs()).max((w.delta_prev - 0.5).abs());
    }
    let elapsed = start.elapsed();
    Outcome::new(
        1,
        "weight recovery",
        worst <= TOL && elapsed < BUDGET,
        format!("max deviation {worst:.2e} (tol {TOL:e}), {elapsed:?}"),
    )
}

pub fn criterion_2_closed_form_vs_quadrature() -> Outcome {
    const TOL: f64 = 1e-8;
    const QUAD_TOL: f64 = 1e-11;
    const BUDGET: Duration = Duration::from_secs(30);
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for alpha in [0.1, 0.3, 0.5, 0.7, 0.9] {
        for n in [0usize, 1, 2, 5, 20, 100] {
            let w = delta_weights(alpha, n).unwrap();
            let q = kernel_moment_oracle(alpha, n, QUAD_TOL).unwrap();
            worst = worst.max((w.delta - q.delta).abs()).max((w.delta_prev - q.delta_prev).abs());
        }
    }
    let elapsed = start.elapsed();
    Outcome::new(
        2,
        "closed form vs quadrature",
        worst <= TOL && elapsed < BUDGET,
        format!("max deviation {worst:.2e} (tol {TOL:e}), {elapsed:?}"),
    )
}

fn unit(k: usize, n: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[k] = 1.0;
    e
}

pub fn criterion_3_stencil_equivalence() -> Outcome {
    const ADV_TOL: f64 = 1e-14;
    const DIFF_TOL: f64 = 1e-12;
    let nx = 9;
    let i = 4;
    let zero = vec![0.0; nx];

    let (h, l, c) = (0.004, 0.05, 1.3);
    let r = h * c / l;
    let fz = advection_rhs(&zero, l, c).unwrap();
    let cur = |k| {
        let e = unit(k, nx);
        ab2_step(&e, &advection_rhs(&e, l, c).unwrap(), &fz, h).unwrap()[i]
    };
    let prev = |k| ab2_step(&zero, &fz, &advection_rhs(&unit(k, nx), l, c).unwrap(), h).unwrap()[i];
    let adv_err = [
        cur(i) - (1.0 - 1.5 * r),
        cur(i + 1) - 1.5 * r,
        prev(i) - 0.5 * r,
        prev(i + 1) + 0.5 * r,
    ]
    .iter()
    .fold(0.0_f64, |m, e| m.max(e.abs()));

    let (h, l, d) = (0.003_f64, 0.1, 0.25);
    let mut diff_err: f64 = 0.0;
    for alpha in [0.5, 1.0] {
        for n in [1usize, 5] {
            let w = delta_weights(alpha, n).unwrap();
            let r = h.powf(alpha) * d / (l * l * gamma_fn(alpha).unwrap());
            let fz = diffusion_rhs(&zero, l, d).unwrap();
            let cur = |k| {
                let e = unit(k, nx);
                fab2_step(&e, &diffusion_rhs(&e, l, d).unwrap(), &fz, h, alpha, n).unwrap()[i]
            };
            let prev = |k| {
                fab2_step(&zero, &fz, &diffusion_rhs(&unit(k, nx), l, d).unwrap(), h, alpha, n).unwrap()[i]
            };
            for e in [
                cur(i - 1) - r * w.delta,
                cur(i) - (1.0 - 2.0 * r * w.delta),
                cur(i + 1) - r * w.delta,
                prev(i - 1) + r * w.delta_prev,
                prev(i) - 2.0 * r * w.delta_prev,
                prev(i + 1) + r * w.delta_prev,
            ] {
                diff_err = diff_err.max(e.abs());
            }
        }
    }
    Outcome::new(
        3,
        "stencil equivalence",
        adv_err <= ADV_TOL && diff_err <= DIFF_TOL,
        format!("advection {adv_err:.2e} (tol {ADV_TOL:e}), diffusion {diff_err:.2e} (tol {DIFF_TOL:e})"),
    )
}

pub fn criterion_4_bootstrap_identity() -> Outcome {
    const TOL: f64 = 1e-14;
    let u0 = [1.0, -0.5, 2.25];
    let f0 = [0.3, 1.7, -2.0];
    let h = 0.05_f64;
    let mut worst: f64 = 0.0;
    for alpha in [0.3, 0.5, 0.9] {
        let stepped = fab2_step(&u0, &f0, &f0, h, alpha, 0).unwrap();
        let scale = h.powf(alpha) / gamma_fn(alpha + 1.0).unwrap();
        for k in 0..3 {
            worst = worst.max((stepped[k] - (u0[k] + scale * f0[k])).abs());
        }
    }
    Outcome::new(4, "bootstrap identity", worst <= TOL, format!("max deviation {worst:.2e} (tol {TOL:e})"))
}

fn advection_config(nx: usize, nt: usize) -> RunConfig {
    parse_config(&format!(
        "problem=advection\nc=1\nic=exp\nx_min=0\nx_max=1\nnx={nx}\nt_end=0.5\nnt={nt}"
    ))
    .unwrap()
}

pub fn criterion_5_advection_accuracy() -> Outcome {
    const ERR_TOL: f64 = 0.05;
    const RATIO_RANGE: (f64, f64) = (1.5, 2.5);
    const BUDGET: Duration = Duration::from_secs(5);
    let start = Instant::now();
    let base = advection_config(101, 400);
    let (coarse, _) = simulate(&base).unwrap();
    let (fine, _) = simulate(&base.refined()).unwrap();
    let elapsed = start.elapsed();
    let e0 = coarse.max_abs_error_final.unwrap();
    let e1 = fine.max_abs_error_final.unwrap();
    let ratio = e0 / e1;
    let pass = coarse.halted_unstable_at.is_none()
        && e0 <= ERR_TOL
        && (RATIO_RANGE.0..=RATIO_RANGE.1).contains(&ratio)
        && elapsed < BUDGET;
    Outcome::new(
        5,
        "advection accuracy",
        pass,
        format!("error {e0:.4e} (tol {ERR_TOL}), refined {e1:.4e}, ratio {ratio:.3} in {RATIO_RANGE:?}, {elapsed:?}"),
    )
}

pub fn criterion_6_fractional_ode_convergence() -> Outcome {
    const AGREE_TOL: f64 = 5e-2;
    const STEPS: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];
    let mut monotone = true;
    let mut agree_worst: f64 = 0.0;
    let mut lines = Vec::new();
    for alpha in [0.5, 0.7, 0.9] {
        let oracle = exact_caputo_relaxation(alpha, -1.0, 1.0).unwrap();
        let exact_end = oracle.eval(0.0, 1.0).unwrap();
        let errs: Vec<f64> = STEPS
            .iter()
            .map(|&h| {
                let nt = (1.0 / h).round() as usize;
                let grid = TimeGrid::new(1.0, nt).unwrap();
                let rhs = |u: &[f64], _: usize| vec![-u[0]];
                let states = advance(vec![1.0], &rhs, &grid, SchemeKind::fractional(alpha).unwrap()).unwrap();
                (states.last().unwrap().current[0] - exact_end).abs()
            })
            .collect();
        monotone &= errs.windows(2).all(|w| w[1] < w[0]);

        // same ladder through the experiment driver
        let cfg = parse_config(&format!("problem=ode_caputo\nalpha={alpha}\nlambda=-1\nu0=1\nt_end=1\nnt=10")).unwrap();
        let rows = convergence_study(&cfg, STEPS.len()).unwrap();
        let driver_errs: Vec<f64> = rows.iter().map(|r| r.max_abs_error.unwrap_or(f64::INFINITY)).collect();
        monotone &= driver_errs.windows(2).all(|w| w[1] < w[0]);

        let (h, nt) = (0.01, 100);
        let grid = TimeGrid::new(1.0, nt).unwrap();
        let rhs = |u: &[f64], _: usize| vec![-u[0]];
        let fab2 = advance(vec![1.0], &rhs, &grid, SchemeKind::fractional(alpha).unwrap()).unwrap();
        let l1 = l1_fractional_ode_solve(-1.0, alpha, 1.0, h, nt).unwrap();
        for (s, v) in fab2.iter().zip(&l1[1..]) {
            agree_worst = agree_worst.max((s.current[0] - v).abs());
        }
        lines.push(format!(
            "alpha {alpha}: errors {}",
            errs.iter().map(|e| format!("{e:.4e}")).collect::<Vec<_>>().join(" ")
        ));
    }
    let agree = agree_worst <= AGREE_TOL;
    Outcome::new(
        6,
        "fractional ODE convergence",
        monotone && agree,
        format!(
            "strictly decreasing: {monotone}; fab2 vs L1 max gap {agree_worst:.3e} (tol {AGREE_TOL}); {}",
            lines.join("; ")
        ),
    )
}

pub fn criterion_7_fractional_diffusion() -> Outcome {
    const ERR_TOL: f64 = 0.1;
    const MARGIN_CAP: f64 = 0.5;
    const BUDGET: Duration = Duration::from_secs(10);
    let start = Instant::now();
    let base = parse_config(
        "problem=fractional_diffusion\nalpha=0.8\nd=0.1\nic=sin\nx_min=0\nx_max=3.141592653589793\nnx=11\nt_end=0.2\nnt=200",
    )
    .unwrap();
    let (coarse, _) = simulate(&base).unwrap();
    let (fine, _) = simulate(&base.refined()).unwrap();
    let elapsed = start.elapsed();
    let m0 = coarse.stability_margin.unwrap().value;
    let m1 = fine.stability_margin.unwrap().value;
    let e0 = coarse.max_abs_error_final.unwrap();
    let e1 = fine.max_abs_error_final.unwrap();
    let pass = m0 <= MARGIN_CAP && m1 <= MARGIN_CAP && e0 <= ERR_TOL && e1 < e0 && elapsed < BUDGET;
    Outcome::new(
        7,
        "fractional diffusion",
        pass,
        format!(
            "margins {m0:.3}/{m1:.3} (cap {MARGIN_CAP}), error {e0:.4e} -> {e1:.4e} (tol {ERR_TOL}), {elapsed:?}"
        ),
    )
}

pub fn criterion_8_stability_dichotomy() -> Outcome {
    const STABLE_AMP: f64 = 1.0 + 1e-9;
    const UNSTABLE_AMP: f64 = 1e3;
    const BOUND_FACTOR: f64 = 2.0;
    let stable_cfg = advection_config(101, 500);
    let stable = &stability_sweep(&stable_cfg, &[0.4]).unwrap()[0];
    let exact_peak = (1.0 + 500.0 * stable.h).exp();
    let bounded = stable.final_max_abs.is_finite() && stable.final_max_abs <= BOUND_FACTOR * exact_peak;
    let stable_ok = stable.max_amplification <= STABLE_AMP && stable.halted_level.is_none() && bounded;

    let unstable = &stability_sweep(&advection_config(101, 1000), &[2.0]).unwrap()[0];
    let unstable_ok = unstable.max_amplification > UNSTABLE_AMP && unstable.halted_level.is_some();
    Outcome::new(
        8,
        "stability dichotomy",
        stable_ok && unstable_ok,
        format!(
            "hc/l=0.4: amplification {:.12}, max|u| {:.3} vs exact peak {exact_peak:.3}, halted {:?}; \
             hc/l=2.0: amplification {:.3e}, halted at {:?}",
            stable.max_amplification, stable.final_max_abs, stable.halted_level, unstable.max_amplification,
            unstable.halted_level
        ),
    )
}

pub fn criterion_9_residual_bound() -> Outcome {
    const TOL: f64 = 1e-15;
    let a = residual_bound(0.1, 1.0, 0, 1.0).unwrap();
    let b = residual_bound(0.1, 1.0, 1, 2.0).unwrap();
    let examples_ok = (a - 1.25e-4).abs() <= TOL && (b - 7.5e-4).abs() <= TOL;

    let hs = [1e-3, 1e-2, 0.05, 0.1, 0.5];
    let ns = [0usize, 1, 3, 10, 100, 1000];
    let m2s = [0.5, 1.0, 4.0, 100.0];
    let mut monotone = true;
    for alpha in [0.2, 0.5, 0.8, 1.0] {
        for (&h0, &h1) in hs.iter().zip(&hs[1..]) {
            for &n in &ns {
                for &m in &m2s {
                    let r0 = residual_bound(h0, alpha, n, m).unwrap();
                    let r1 = residual_bound(h1, alpha, n, m).unwrap();
                    monotone &= r0.is_finite() && r1.is_finite() && r0 < r1;
                }
            }
        }
        for &h in &hs {
            for (&n0, &n1) in ns.iter().zip(&ns[1..]) {
                for &m in &m2s {
                    monotone &= residual_bound(h, alpha, n0, m).unwrap() < residual_bound(h, alpha, n1, m).unwrap();
                }
            }
            for &n in &ns {
                for (&m0, &m1) in m2s.iter().zip(&m2s[1..]) {
                    monotone &= residual_bound(h, alpha, n, m0).unwrap() < residual_bound(h, alpha, n, m1).unwrap();
                }
            }
        }
    }
    Outcome::new(
        9,
        "residual bound",
        examples_ok && monotone,
        format!("examples {a:e}, {b:e} (tol {TOL:e}); finite and monotone in h, n, m2: {monotone}"),
    )
}
