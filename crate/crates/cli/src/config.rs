//! Flat `key = value` run configuration.
//!
//! ```text
//! # exponential profile carried left at unit speed
//! problem = advection
//! c = 1
//! x_min = 0
//! x_max = 1
//! nx = 101
//! t_end = 0.5
//! nt = 200
//! ```

use std::collections::HashSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use fracab_core::mesh::{make_uniform_grid, SpaceTimeGrid, TimeGrid};

use crate::error::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    /// `u_t = c·u_x`, AB2 with forward differences.
    Advection,
    /// `D_t^α u = d·u_xx`, fractional two-step scheme with centred differences.
    FractionalDiffusion,
    /// Scalar `D_t^α u = λ·u`.
    OdeCaputo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialKind {
    Exp,
    Cos,
    Sin,
}

/// Right-end treatment for advection. With `c > 0` the right end is the
/// inflow boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RightEdge {
    /// Dirichlet data taken from the exact solution.
    Exact,
    /// `F_{nx-1} = F_{nx-2}`.
    CopyInward,
    /// `u_{nx-1} = 0`.
    Zero,
}

macro_rules! keyword_enum {
    ($ty:ident { $($text:literal => $variant:ident),+ $(,)? }) => {
        impl FromStr for $ty {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($text => Ok($ty::$variant),)+
                    _ => Err(format!(
                        "expected one of {}",
                        [$($text),+].join(", ")
                    )),
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($ty::$variant => $text,)+ })
            }
        }
    };
}

keyword_enum!(Problem {
    "advection" => Advection,
    "fractional_diffusion" => FractionalDiffusion,
    "ode_caputo" => OdeCaputo,
});
keyword_enum!(InitialKind { "exp" => Exp, "cos" => Cos, "sin" => Sin });
keyword_enum!(RightEdge { "exact" => Exact, "copy_inward" => CopyInward, "zero" => Zero });

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: Problem,
    pub alpha: f64,
    pub c: Option<f64>,
    pub d: Option<f64>,
    /// Rate for `ode_caputo`.
    pub lambda: f64,
    /// Initial value for `ode_caputo`.
    pub u0: f64,
    pub ic: InitialKind,
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub t_end: f64,
    pub nt: usize,
    pub output_path: Option<PathBuf>,
    pub emit_exact: bool,
    pub right_bc: RightEdge,
    /// CSV level stride; `None` means `max(1, nt/50)`.
    pub sample_every: Option<usize>,
}

const KEYS: &[&str] = &[
    "problem",
    "alpha",
    "c",
    "d",
    "lambda",
    "u0",
    "ic",
    "x_min",
    "x_max",
    "nx",
    "t_end",
    "nt",
    "output_path",
    "emit_exact",
    "right_bc",
    "sample_every",
];

fn parse_value<T: FromStr>(key: &str, raw: &str, line: usize) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    raw.parse::<T>().map_err(|e| ConfigError::Unparsable {
        line,
        key: key.to_string(),
        value: raw.to_string(),
        reason: e.to_string(),
    })
}

fn parse_bool(key: &str, raw: &str, line: usize) -> Result<bool, ConfigError> {
    match raw {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(ConfigError::Unparsable {
            line,
            key: key.to_string(),
            value: raw.to_string(),
            reason: "expected true or false".into(),
        }),
    }
}

#[derive(Default)]
struct Raw {
    problem: Option<(Problem, usize)>,
    alpha: Option<(f64, usize)>,
    c: Option<(f64, usize)>,
    d: Option<(f64, usize)>,
    lambda: Option<(f64, usize)>,
    u0: Option<(f64, usize)>,
    ic: Option<(InitialKind, usize)>,
    x_min: Option<(f64, usize)>,
    x_max: Option<(f64, usize)>,
    nx: Option<(usize, usize)>,
    t_end: Option<(f64, usize)>,
    nt: Option<(usize, usize)>,
    output_path: Option<PathBuf>,
    emit_exact: Option<bool>,
    right_bc: Option<(RightEdge, usize)>,
    sample_every: Option<(usize, usize)>,
}

/// Parses and validates a configuration. Defaults: `alpha = 1`,
/// `ic = exp` (`sin` for `fractional_diffusion`), `emit_exact = true`,
/// `right_bc = exact`, `lambda = -1`, `u0 = 1`.
pub fn parse_config(source: &str) -> Result<RunConfig, ConfigError> {
    let mut raw = Raw::default();
    let mut seen = HashSet::new();
    for (idx, text) in source.lines().enumerate() {
        let line = idx + 1;
        let content = text.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| ConfigError::Syntax {
                line,
                text: text.to_string(),
            })?;
        if !KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey {
                line,
                key: key.to_string(),
            });
        }
        if !seen.insert(key.to_string()) {
            return Err(ConfigError::DuplicateKey {
                line,
                key: key.to_string(),
            });
        }
        match key {
            "problem" => raw.problem = Some((parse_value(key, value, line)?, line)),
            "alpha" => raw.alpha = Some((parse_value(key, value, line)?, line)),
            "c" => raw.c = Some((parse_value(key, value, line)?, line)),
            "d" => raw.d = Some((parse_value(key, value, line)?, line)),
            "lambda" => raw.lambda = Some((parse_value(key, value, line)?, line)),
            "u0" => raw.u0 = Some((parse_value(key, value, line)?, line)),
            "ic" => raw.ic = Some((parse_value(key, value, line)?, line)),
            "x_min" => raw.x_min = Some((parse_value(key, value, line)?, line)),
            "x_max" => raw.x_max = Some((parse_value(key, value, line)?, line)),
            "nx" => raw.nx = Some((parse_value(key, value, line)?, line)),
            "t_end" => raw.t_end = Some((parse_value(key, value, line)?, line)),
            "nt" => raw.nt = Some((parse_value(key, value, line)?, line)),
            "output_path" => raw.output_path = Some(PathBuf::from(value)),
            "emit_exact" => raw.emit_exact = Some(parse_bool(key, value, line)?),
            "right_bc" => raw.right_bc = Some((parse_value(key, value, line)?, line)),
            "sample_every" => raw.sample_every = Some((parse_value(key, value, line)?, line)),
            _ => unreachable!("key list checked above"),
        }
    }
    raw.finish()
}

fn require<T: Copy>(slot: Option<(T, usize)>, key: &'static str) -> Result<(T, usize), ConfigError> {
    slot.ok_or(ConfigError::MissingKey { key })
}

fn invalid(line: Option<usize>, key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        line,
        key: key.to_string(),
        reason: reason.into(),
    }
}

impl Raw {
    fn finish(self) -> Result<RunConfig, ConfigError> {
        let (problem, _) = require(self.problem, "problem")?;
        let (alpha, alpha_line) = self.alpha.map_or((1.0, None), |(a, l)| (a, Some(l)));
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(invalid(alpha_line, "alpha", format!("must lie in (0, 1], got {alpha}")));
        }
        let default_ic = match problem {
            Problem::FractionalDiffusion => InitialKind::Sin,
            _ => InitialKind::Exp,
        };
        let (ic, ic_line) = self.ic.map_or((default_ic, None), |(v, l)| (v, Some(l)));

        let (t_end, t_line) = require(self.t_end, "t_end")?;
        let (nt, nt_line) = require(self.nt, "nt")?;
        TimeGrid::new(t_end, nt).map_err(|e| {
            let line = if t_end > 0.0 { nt_line } else { t_line };
            invalid(Some(line), if t_end > 0.0 { "nt" } else { "t_end" }, e.to_string())
        })?;

        let mut cfg = RunConfig {
            problem,
            alpha,
            c: self.c.map(|(v, _)| v),
            d: self.d.map(|(v, _)| v),
            lambda: self.lambda.map_or(-1.0, |(v, _)| v),
            u0: self.u0.map_or(1.0, |(v, _)| v),
            ic,
            x_min: 0.0,
            x_max: 1.0,
            nx: 3,
            t_end,
            nt,
            output_path: self.output_path,
            emit_exact: self.emit_exact.unwrap_or(true),
            right_bc: self.right_bc.map_or(RightEdge::Exact, |(v, _)| v),
            sample_every: None,
        };
        if let Some((s, line)) = self.sample_every {
            if s == 0 {
                return Err(invalid(Some(line), "sample_every", "must be at least 1"));
            }
            cfg.sample_every = Some(s);
        }

        match problem {
            Problem::Advection => {
                let (c, line) = require(self.c, "c")?;
                if !(c.is_finite() && c > 0.0) {
                    return Err(invalid(Some(line), "c", format!("must be positive, got {c}")));
                }
                if alpha != 1.0 {
                    return Err(invalid(alpha_line, "alpha", "advection is integer order; alpha must be 1"));
                }
                if ic == InitialKind::Sin {
                    return Err(invalid(ic_line, "ic", "advection supports exp or cos"));
                }
            }
            Problem::FractionalDiffusion => {
                let (d, line) = require(self.d, "d")?;
                if !(d.is_finite() && d >= 0.0) {
                    return Err(invalid(Some(line), "d", format!("must be non-negative, got {d}")));
                }
                if ic != InitialKind::Sin {
                    return Err(invalid(ic_line, "ic", "fractional_diffusion supports sin"));
                }
            }
            Problem::OdeCaputo => {
                if !cfg.lambda.is_finite() || !cfg.u0.is_finite() {
                    return Err(invalid(None, "lambda", "lambda and u0 must be finite"));
                }
            }
        }

        if problem != Problem::OdeCaputo {
            let (x_min, _) = require(self.x_min, "x_min")?;
            let (x_max, x_line) = require(self.x_max, "x_max")?;
            let (nx, nx_line) = require(self.nx, "nx")?;
            make_uniform_grid(x_min, x_max, nx, t_end, nt).map_err(|e| {
                let (line, key) = if nx < 3 { (nx_line, "nx") } else { (x_line, "x_max") };
                invalid(Some(line), key, e.to_string())
            })?;
            cfg.x_min = x_min;
            cfg.x_max = x_max;
            cfg.nx = nx;
        }
        Ok(cfg)
    }
}

impl RunConfig {
    /// Space-time grid (a dummy three-node space mesh for `ode_caputo`).
    pub fn grid(&self) -> SpaceTimeGrid {
        make_uniform_grid(self.x_min, self.x_max, self.nx, self.t_end, self.nt)
            .expect("validated at parse time")
    }

    pub fn time_grid(&self) -> TimeGrid {
        TimeGrid::new(self.t_end, self.nt).expect("validated at parse time")
    }

    pub fn sample_stride(&self) -> usize {
        self.sample_every.unwrap_or((self.nt / 50).max(1))
    }

    /// Same problem with `h` and `l` both halved.
    pub fn refined(&self) -> Self {
        let mut next = self.clone();
        next.nt *= 2;
        if self.problem != Problem::OdeCaputo {
            next.nx = 2 * (self.nx - 1) + 1;
        }
        next.sample_every = self.sample_every.map(|s| 2 * s);
        next
    }

    /// Serialises back to the flat format accepted by [`parse_config`].
    pub fn to_source(&self) -> String {
        let mut out = format!("problem = {}\nalpha = {}\n", self.problem, self.alpha);
        if let Some(c) = self.c {
            out += &format!("c = {c}\n");
        }
        if let Some(d) = self.d {
            out += &format!("d = {d}\n");
        }
        if self.problem == Problem::OdeCaputo {
            out += &format!("lambda = {}\nu0 = {}\n", self.lambda, self.u0);
        } else {
            out += &format!(
                "ic = {}\nx_min = {}\nx_max = {}\nnx = {}\n",
                self.ic, self.x_min, self.x_max, self.nx
            );
        }
        out += &format!("t_end = {}\nnt = {}\nemit_exact = {}\n", self.t_end, self.nt, self.emit_exact);
        if self.problem == Problem::Advection {
            out += &format!("right_bc = {}\n", self.right_bc);
        }
        if let Some(p) = &self.output_path {
            out += &format!("output_path = {}\n", p.display());
        }
        if let Some(s) = self.sample_every {
            out += &format!("sample_every = {s}\n");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ADVECTION: &str = "problem=advection\nc=1\nnx=101\nx_min=0\nx_max=1\nt_end=0.5\nnt=200";

    #[test]
    fn advection_example() {
        let cfg = parse_config(ADVECTION).unwrap();
        let g = cfg.grid();
        assert!((g.l() - 0.01).abs() < 1e-15);
        assert!((g.h() - 0.0025).abs() < 1e-15);
        assert_eq!(cfg.alpha, 1.0);
        assert_eq!(cfg.ic, InitialKind::Exp);
        assert!(cfg.emit_exact);
        assert_eq!(cfg.right_bc, RightEdge::Exact);
        assert_eq!(cfg.sample_stride(), 4);
    }

    #[test]
    fn missing_diffusivity_is_named() {
        let err = parse_config("problem=fractional_diffusion").unwrap_err();
        // t_end/nt come first in validation; supply them to reach `d`
        assert!(matches!(err, ConfigError::MissingKey { .. }));
        let err = parse_config("problem=fractional_diffusion\nt_end=1\nnt=10").unwrap_err();
        assert_eq!(err, ConfigError::MissingKey { key: "d" });
        assert!(err.to_string().contains("'d'"));
    }

    #[test]
    fn alpha_out_of_range() {
        let err = parse_config("problem=ode_caputo\nalpha=1.5\nt_end=1\nnt=10").unwrap_err();
        assert!(matches!(err, ConfigError::Invalid { line: Some(2), ref key, .. } if key == "alpha"));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_config("# header\nproblem=advection\nspeed=3\n").unwrap_err();
        assert_eq!(err, ConfigError::UnknownKey { line: 3, key: "speed".into() });
        let err = parse_config("problem=advection\n\nnx=ten\n").unwrap_err();
        assert!(matches!(err, ConfigError::Unparsable { line: 3, .. }));
        let err = parse_config("problem=advection\nc 1\n").unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { line: 2, .. }));
        let err = parse_config("problem=advection\nc=1\nc=2\n").unwrap_err();
        assert!(matches!(err, ConfigError::DuplicateKey { line: 3, .. }));
        let err = parse_config("problem=diffusion").unwrap_err();
        assert!(matches!(err, ConfigError::Unparsable { line: 1, .. }));
    }

    #[test]
    fn comments_and_whitespace() {
        let src = "  problem = ode_caputo   # scalar test\nalpha = 0.7\n\n t_end=1 \nnt = 100 # steps\n";
        let cfg = parse_config(src).unwrap();
        assert_eq!(cfg.problem, Problem::OdeCaputo);
        assert_eq!(cfg.alpha, 0.7);
        assert_eq!(cfg.lambda, -1.0);
        assert_eq!(cfg.u0, 1.0);
    }

    #[test]
    fn problem_specific_validation() {
        assert!(parse_config(&format!("{ADVECTION}\nalpha=0.5")).is_err());
        assert!(parse_config(&format!("{ADVECTION}\nic=sin")).is_err());
        assert!(parse_config("problem=advection\nc=-1\nnx=11\nx_min=0\nx_max=1\nt_end=1\nnt=10").is_err());
        assert!(parse_config("problem=advection\nc=1\nnx=2\nx_min=0\nx_max=1\nt_end=1\nnt=10").is_err());
        assert!(parse_config("problem=advection\nc=1\nnx=11\nx_min=1\nx_max=0\nt_end=1\nnt=10").is_err());
        let diff = "problem=fractional_diffusion\nd=0.1\nalpha=0.8\nx_min=0\nx_max=3.14159\nnx=21\nt_end=0.2\nnt=100";
        let cfg = parse_config(diff).unwrap();
        assert_eq!(cfg.ic, InitialKind::Sin);
        assert!(parse_config(&format!("{diff}\nic=exp")).is_err());
    }

    #[test]
    fn source_round_trip() {
        let cfg = parse_config(&format!("{ADVECTION}\nic=cos\nright_bc=copy_inward\nsample_every=7\nemit_exact=false"))
            .unwrap();
        assert_eq!(parse_config(&cfg.to_source()).unwrap(), cfg);
        let r = cfg.refined();
        assert_eq!(r.nx, 201);
        assert_eq!(r.nt, 400);
    }
}
