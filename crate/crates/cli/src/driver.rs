//! Single runs, convergence studies, stability sweeps and the static check.

use fracab_core::mesh::TimeGrid;
use fracab_core::reference::{
    exact_advection, exact_caputo_relaxation, exact_fractional_diffusion_mode, InitialProfile,
    OracleSolution,
};
use fracab_core::spatial::{
    advection_rhs_with, diffusion_rhs, BoundaryCondition, BoundarySpec, EdgeClosure,
};
use fracab_core::stability::{
    amplification_probe, classical_margin, fractional_margin, max_amplification, max_delta,
    residual_bound, ProbeModel, SecondDifferenceTracker, StabilityMargin,
};
use fracab_core::mesh::max_abs;
use fracab_core::{gamma_fn, Error as CoreError, Integrator, SchemeKind};

use crate::config::{InitialKind, Problem, RightEdge, RunConfig};
use crate::error::CliError;
use crate::output::{write_csv_file, CsvRow};

/// Fourier angles sampled by the sweep's amplification probe.
pub const PROBE_ANGLES: usize = 64;

type Rhs = Box<dyn Fn(&[f64], usize) -> Vec<f64>>;

struct Setup {
    nodes: Vec<f64>,
    l: Option<f64>,
    time: TimeGrid,
    scheme: SchemeKind,
    rhs: Rhs,
    bc: BoundarySpec,
    ic: Vec<f64>,
    oracle: OracleSolution,
    margin: Option<StabilityMargin>,
    notes: Vec<String>,
}

fn setup(cfg: &RunConfig) -> Result<Setup, CliError> {
    let time = cfg.time_grid();
    let mut notes = Vec::new();
    let s = match cfg.problem {
        Problem::Advection => {
            let grid = cfg.grid();
            let c = cfg.c.expect("validated");
            let l = grid.l();
            let profile = match cfg.ic {
                InitialKind::Cos => InitialProfile::Cos,
                _ => InitialProfile::Exp,
            };
            let oracle = exact_advection(profile, c)?;
            let nodes = grid.nodes();
            let ic = nodes
                .iter()
                .map(|&x| oracle.eval(x, 0.0))
                .collect::<Result<Vec<_>, _>>()?;
            let edge = |x: f64| {
                let o = oracle.clone();
                BoundaryCondition::dirichlet(move |t| o.eval(x, t).unwrap_or(f64::NAN))
            };
            let right = match cfg.right_bc {
                RightEdge::Exact => edge(grid.x_max()),
                RightEdge::CopyInward => BoundaryCondition::CopyInward,
                RightEdge::Zero => BoundaryCondition::Zero,
            };
            let closure = match cfg.right_bc {
                RightEdge::Zero => EdgeClosure::Zero,
                _ => EdgeClosure::CopyInward,
            };
            notes.push(format!("right edge: {}", cfg.right_bc));
            notes.push(
                "classical criterion is 3hc/(4l) < 1, i.e. h/l < 4/(3c) (not h/l < 4c/3)".into(),
            );
            Setup {
                nodes,
                l: Some(l),
                time,
                scheme: SchemeKind::ClassicalAb2,
                rhs: Box::new(move |u, _| {
                    advection_rhs_with(u, l, c, closure).expect("grid validated")
                }),
                bc: BoundarySpec::new(edge(grid.x_min()), right),
                ic,
                oracle,
                margin: Some(classical_margin(time.h(), l, c)?),
                notes,
            }
        }
        Problem::FractionalDiffusion => {
            let grid = cfg.grid();
            let d = cfg.d.expect("validated");
            let l = grid.l();
            let oracle = exact_fractional_diffusion_mode(cfg.alpha, d, 1.0)?;
            let nodes = grid.nodes();
            let ic = nodes.iter().map(|x| x.sin()).collect();
            let edge = |x: f64| {
                let o = oracle.clone();
                BoundaryCondition::dirichlet(move |t| o.eval(x, t).unwrap_or(f64::NAN))
            };
            Setup {
                nodes,
                l: Some(l),
                time,
                scheme: SchemeKind::fractional(cfg.alpha)?,
                rhs: Box::new(move |u, _| diffusion_rhs(u, l, d).expect("grid validated")),
                bc: BoundarySpec::new(edge(grid.x_min()), edge(grid.x_max())),
                ic,
                oracle,
                margin: Some(fractional_margin(time.h(), l, d, cfg.alpha, cfg.nt)?),
                notes,
            }
        }
        Problem::OdeCaputo => {
            let lambda = cfg.lambda;
            let scheme = if cfg.alpha == 1.0 {
                SchemeKind::ClassicalAb2
            } else {
                SchemeKind::fractional(cfg.alpha)?
            };
            Setup {
                nodes: vec![0.0],
                l: None,
                time,
                scheme,
                rhs: Box::new(move |u, _| u.iter().map(|v| lambda * v).collect()),
                bc: BoundarySpec::default(),
                ic: vec![cfg.u0],
                oracle: exact_caputo_relaxation(cfg.alpha, lambda, cfg.u0)?,
                margin: None,
                notes,
            }
        }
    };
    let mut s = s;
    if let Some(m) = &s.margin {
        if !m.within_criterion() {
            s.notes.push(format!(
                "warning: stability margin {:.6} >= 1; the run may blow up",
                m.value
            ));
        }
    }
    Ok(s)
}

impl Setup {
    fn exact_at(&self, t: f64) -> Result<Vec<f64>, CliError> {
        self.nodes
            .iter()
            .map(|&x| self.oracle.eval(x, t).map_err(CliError::from))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub problem: Problem,
    pub alpha: f64,
    pub h: f64,
    pub l: Option<f64>,
    pub nx: usize,
    pub nt: usize,
    pub oracle: String,
    /// `None` when `emit_exact` is off.
    pub max_abs_error_final: Option<f64>,
    /// Max-norm error at levels `0..=final_level`; empty when `emit_exact` is off.
    pub error_by_level: Vec<f64>,
    pub stability_margin: Option<StabilityMargin>,
    pub m2: f64,
    pub residual_bound_final: f64,
    pub halted_unstable_at: Option<usize>,
    /// Last level with a finite solution.
    pub final_level: usize,
    pub final_time: f64,
    pub final_solution: Vec<f64>,
    pub notes: Vec<String>,
}

struct Recorder<'a> {
    setup: &'a Setup,
    emit_exact: bool,
    stride: usize,
    rows: Vec<CsvRow>,
    errors: Vec<f64>,
    last_row_level: Option<usize>,
}

impl Recorder<'_> {
    fn record(&mut self, level: usize, u: &[f64], track_error: bool, force_row: bool) -> Result<(), CliError> {
        let want_row = level.is_multiple_of(self.stride) || force_row;
        if !want_row && !(track_error && self.emit_exact) {
            return Ok(());
        }
        let t = self.setup.time.time(level);
        let exact = if self.emit_exact { Some(self.setup.exact_at(t)?) } else { None };
        if let (Some(ex), true) = (&exact, track_error) {
            let err = u.iter().zip(ex).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            self.errors.push(err);
        }
        if want_row {
            self.last_row_level = Some(level);
            for (i, (&x, &v)) in self.setup.nodes.iter().zip(u).enumerate() {
                let ue = exact.as_ref().map(|e| e[i]);
                self.rows.push(CsvRow {
                    x,
                    t,
                    u_numeric: v,
                    u_exact: ue,
                    abs_err: ue.map(|e| (v - e).abs()),
                });
            }
        }
        Ok(())
    }
}

/// Runs the time loop and returns the report together with the sampled CSV rows.
pub fn simulate(cfg: &RunConfig) -> Result<(RunReport, Vec<CsvRow>), CliError> {
    let s = setup(cfg)?;
    let stride = cfg.sample_stride();
    let h = s.time.h();
    let mut rec = Recorder {
        setup: &s,
        emit_exact: cfg.emit_exact,
        stride,
        rows: Vec::new(),
        errors: Vec::new(),
        last_row_level: None,
    };
    let mut tracker = SecondDifferenceTracker::new();

    let bc = &s.bc;
    let rhs = &s.rhs;
    let mut integrator = Integrator::new(s.ic.clone(), rhs, s.time, s.scheme)?
        .with_constraint(move |u: &mut [f64], t| bc.apply_in_place(u, t));
    rec.record(0, &s.ic, true, s.time.nt() == 0)?;
    let mut halted = None;
    while !integrator.is_finished() {
        match integrator.step() {
            Ok(state) => {
                let level = state.level;
                let u = state.current.clone();
                if let Some(f) = integrator.previous_rhs() {
                    tracker.push(f.to_vec(), h);
                }
                rec.record(level, &u, true, level == s.time.nt())?;
            }
            Err(CoreError::Unstable { level }) => {
                halted = Some(level);
                break;
            }
            Err(e) => return Err(e.into()),
        }
    }
    let state = integrator.state().clone();
    if halted.is_some() && rec.last_row_level != Some(state.level) {
        rec.record(state.level, &state.current, false, true)?;
    }
    let Recorder { rows, errors, .. } = rec;

    let alpha = s.scheme.alpha();
    let m2 = tracker.max();
    let n_last = state.level.saturating_sub(1);
    let bound = residual_bound(h, alpha, n_last, m2)?;
    let report = RunReport {
        problem: cfg.problem,
        alpha,
        h,
        l: s.l,
        nx: s.nodes.len(),
        nt: s.time.nt(),
        oracle: s.oracle.name().to_string(),
        max_abs_error_final: errors.last().copied(),
        error_by_level: errors,
        stability_margin: s.margin,
        m2,
        residual_bound_final: bound,
        halted_unstable_at: halted,
        final_level: state.level,
        final_time: s.time.time(state.level),
        final_solution: state.current,
        notes: s.notes,
    };
    Ok((report, rows))
}

/// [`simulate`] plus CSV output to `cfg.output_path` when set. An unstable
/// halt is recorded in the report and the partial CSV is still written.
pub fn run_simulation(cfg: &RunConfig) -> Result<RunReport, CliError> {
    let (report, rows) = simulate(cfg)?;
    if let Some(path) = &cfg.output_path {
        write_csv_file(path, &rows)?;
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub h: f64,
    pub l: Option<f64>,
    /// `None` when the level halted.
    pub max_abs_error: Option<f64>,
    /// Previous row's error over this row's; `None` when either is zero or missing.
    pub ratio: Option<f64>,
    pub halted_unstable_at: Option<usize>,
}

/// Halves `h` and `l` together `levels − 1` times, starting from `cfg`.
pub fn convergence_study(cfg: &RunConfig, levels: usize) -> Result<Vec<ConvergenceRow>, CliError> {
    if levels < 3 {
        return Err(CliError::Argument(format!("levels must be at least 3, got {levels}")));
    }
    let mut level_cfg = cfg.clone();
    level_cfg.emit_exact = true;
    level_cfg.output_path = None;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(levels);
    for _ in 0..levels {
        let (report, _) = simulate(&level_cfg)?;
        let err = match report.halted_unstable_at {
            Some(_) => None,
            None => report.max_abs_error_final,
        };
        let ratio = match (rows.last().and_then(|r| r.max_abs_error), err) {
            (Some(prev), Some(cur)) if prev > 0.0 && cur > 0.0 => Some(prev / cur),
            _ => None,
        };
        rows.push(ConvergenceRow {
            h: report.h,
            l: report.l,
            max_abs_error: err,
            ratio,
            halted_unstable_at: report.halted_unstable_at,
        });
        level_cfg = level_cfg.refined();
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// Requested margin: `hc/l` for advection, the fractional margin for diffusion.
    pub margin: f64,
    pub h: f64,
    pub max_amplification: f64,
    pub halted_level: Option<usize>,
    /// Max-norm of the last finite level of the full run.
    pub final_max_abs: f64,
    pub max_abs_error_final: Option<f64>,
}

/// Rescales `h` (keeping `nt`) to hit each margin, then runs the Fourier
/// probe and a full simulation.
pub fn stability_sweep(cfg: &RunConfig, margins: &[f64]) -> Result<Vec<SweepRow>, CliError> {
    if margins.is_empty() {
        return Err(CliError::Argument("need at least one margin value".into()));
    }
    if let Some(m) = margins.iter().find(|m| !(m.is_finite() && **m > 0.0)) {
        return Err(CliError::Argument(format!("margins must be positive, got {m}")));
    }
    let nt = cfg.nt;
    let l = (cfg.x_max - cfg.x_min) / (cfg.nx - 1) as f64;
    let mut out = Vec::with_capacity(margins.len());
    for &margin in margins {
        let (h, model) = match cfg.problem {
            Problem::Advection => {
                let c = cfg.c.expect("validated");
                (margin * l / c, ProbeModel::ClassicalAdvection { courant: margin })
            }
            Problem::FractionalDiffusion => {
                let d = cfg.d.expect("validated");
                if d == 0.0 {
                    return Err(CliError::Argument("sweep needs d > 0".into()));
                }
                let alpha = cfg.alpha;
                let scale = 2.0 * d * max_delta(alpha, nt)? / (l * l * gamma_fn(alpha)?);
                let h = (margin / scale).powf(1.0 / alpha);
                (h, ProbeModel::FractionalDiffusion { h, l, d, alpha })
            }
            Problem::OdeCaputo => {
                return Err(CliError::Argument("sweep applies to advection and fractional_diffusion".into()))
            }
        };
        let traces = amplification_probe(&model, PROBE_ANGLES, nt.max(2))?;
        let mut run_cfg = cfg.clone();
        run_cfg.t_end = h * nt as f64;
        run_cfg.output_path = None;
        let (report, _) = simulate(&run_cfg)?;
        out.push(SweepRow {
            margin,
            h,
            max_amplification: max_amplification(&traces),
            halted_level: report.halted_unstable_at,
            final_max_abs: max_abs(&report.final_solution),
            max_abs_error_final: report.max_abs_error_final,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub stability_margin: Option<StabilityMargin>,
    /// `max |F''|` of the exact solution pushed through the spatial operator.
    pub m2: f64,
    pub residual_bound_final: f64,
    pub notes: Vec<String>,
}

/// Margins and residual bound without running the scheme.
pub fn check(cfg: &RunConfig) -> Result<CheckReport, CliError> {
    let s = setup(cfg)?;
    let h = s.time.h();
    let mut tracker = SecondDifferenceTracker::new();
    for n in 0..=s.time.nt() {
        let mut u = s.exact_at(s.time.time(n))?;
        s.bc.apply_in_place(&mut u, s.time.time(n));
        tracker.push((s.rhs)(&u, n), h);
    }
    let m2 = tracker.max();
    Ok(CheckReport {
        stability_margin: s.margin,
        m2,
        residual_bound_final: residual_bound(h, s.scheme.alpha(), s.time.nt() - 1, m2)?,
        notes: s.notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn advection(nx: usize, nt: usize) -> RunConfig {
        parse_config(&format!(
            "problem=advection\nc=1\nx_min=0\nx_max=1\nnx={nx}\nt_end=0.5\nnt={nt}"
        ))
        .unwrap()
    }

    #[test]
    fn advection_run_within_tolerance() {
        let (report, rows) = simulate(&advection(101, 400)).unwrap();
        assert!(report.max_abs_error_final.unwrap() <= 0.05);
        assert_eq!(report.error_by_level.len(), 401);
        assert!(report.error_by_level[0] == 0.0);
        assert!(report.error_by_level.iter().all(|e| *e >= 0.0));
        let m = report.stability_margin.unwrap();
        assert!((m.value - 0.09375).abs() < 1e-12);
        assert_eq!(report.halted_unstable_at, None);
        // levels 0, 8, ..., 400
        assert_eq!(rows.len(), 51 * 101);
        assert!(report.residual_bound_final.is_finite());
    }

    #[test]
    fn emit_exact_off() {
        let mut cfg = advection(11, 20);
        cfg.emit_exact = false;
        let (report, rows) = simulate(&cfg).unwrap();
        assert!(report.max_abs_error_final.is_none());
        assert!(report.error_by_level.is_empty());
        assert!(rows.iter().all(|r| r.u_exact.is_none() && r.abs_err.is_none()));
    }

    #[test]
    fn heat_limit() {
        let cfg = parse_config(
            "problem=fractional_diffusion\nalpha=1\nd=0.1\nx_min=0\nx_max=3.141592653589793\nnx=21\nt_end=0.2\nnt=100",
        )
        .unwrap();
        let (report, _) = simulate(&cfg).unwrap();
        assert!(report.stability_margin.unwrap().value <= 0.5);
        assert!(report.max_abs_error_final.unwrap() <= 0.05);
    }

    #[test]
    fn zero_dynamics() {
        let cfg = parse_config(
            "problem=fractional_diffusion\nalpha=0.6\nd=0\nx_min=0\nx_max=3.141592653589793\nnx=11\nt_end=1\nnt=40",
        )
        .unwrap();
        let (report, _) = simulate(&cfg).unwrap();
        assert_eq!(report.max_abs_error_final, Some(0.0));
        let rows = convergence_study(&cfg, 3).unwrap();
        assert!(rows.iter().all(|r| r.max_abs_error == Some(0.0) && r.ratio.is_none()));
    }

    #[test]
    fn zero_ode_is_identically_zero() {
        let cfg = parse_config("problem=ode_caputo\nalpha=0.5\nu0=0\nt_end=1\nnt=30").unwrap();
        let (report, rows) = simulate(&cfg).unwrap();
        assert_eq!(report.final_solution, vec![0.0]);
        assert!(report.error_by_level.iter().all(|e| *e == 0.0));
        assert!(rows.iter().all(|r| r.u_numeric == 0.0));
    }

    #[test]
    fn advection_convergence_decreases() {
        let rows = convergence_study(&advection(26, 100), 3).unwrap();
        assert_eq!(rows.len(), 3);
        for w in rows.windows(2) {
            assert!(w[1].max_abs_error.unwrap() < w[0].max_abs_error.unwrap());
        }
        assert!(rows[0].ratio.is_none() && rows[1].ratio.is_some());
        assert!(convergence_study(&advection(26, 100), 2).is_err());
    }

    #[test]
    fn sweep_dichotomy() {
        let cfg = advection(101, 500);
        let stable = stability_sweep(&cfg, &[0.4]).unwrap();
        assert!(stable[0].max_amplification <= 1.0 + 1e-9);
        assert_eq!(stable[0].halted_level, None);
        // overflow needs a little over 500 levels from round-off-sized seeds
        let unstable = stability_sweep(&advection(101, 1000), &[2.0]).unwrap();
        assert!(unstable[0].max_amplification > 1e3);
        assert!(unstable[0].halted_level.is_some());
        assert!(stability_sweep(&cfg, &[]).is_err());
        assert!(stability_sweep(&cfg, &[-1.0]).is_err());
    }

    #[test]
    fn unstable_run_is_reported_not_thrown() {
        let mut cfg = advection(101, 1000);
        cfg.t_end = 1000.0 * 0.02;
        let (report, rows) = simulate(&cfg).unwrap();
        let halted = report.halted_unstable_at.unwrap();
        assert_eq!(report.final_level, halted - 1);
        assert!(report.notes.iter().any(|n| n.starts_with("warning")));
        assert!(rows.iter().all(|r| r.u_numeric.is_finite()));
        let last_t = cfg.time_grid().time(report.final_level);
        assert!(rows.iter().any(|r| r.t == last_t));
        assert_eq!(report.error_by_level.len(), report.final_level + 1);
    }

    #[test]
    fn static_check() {
        let cfg = advection(101, 400);
        let c = check(&cfg).unwrap();
        assert!((c.stability_margin.unwrap().value - 0.09375).abs() < 1e-12);
        assert!(c.m2 > 0.0 && c.residual_bound_final > 0.0);
        let ode = parse_config("problem=ode_caputo\nalpha=0.7\nt_end=1\nnt=10").unwrap();
        let c = check(&ode).unwrap();
        assert!(c.stability_margin.is_none());
    }
}
