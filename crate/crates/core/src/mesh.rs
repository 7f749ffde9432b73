//! Uniform node-based grids and the two-level solution state.

use crate::error::{Error, Result};

/// Uniform time mesh `t_n = n·h`, `0 ≤ n ≤ nt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_end: f64,
    nt: usize,
    h: f64,
}

impl TimeGrid {
    pub fn new(t_end: f64, nt: usize) -> Result<Self> {
        if !(t_end.is_finite() && t_end > 0.0) {
            return Err(Error::invalid("t_end", format!("must be positive, got {t_end}")));
        }
        if nt < 2 {
            return Err(Error::invalid("nt", format!("need at least 2 steps, got {nt}")));
        }
        Ok(Self {
            t_end,
            nt,
            h: t_end / nt as f64,
        })
    }

    /// Builds the mesh from a step size, so `t_end = nt·h`.
    pub fn from_step(h: f64, nt: usize) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::invalid("h", format!("must be positive, got {h}")));
        }
        if nt < 2 {
            return Err(Error::invalid("nt", format!("need at least 2 steps, got {nt}")));
        }
        Ok(Self {
            t_end: h * nt as f64,
            nt,
            h,
        })
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.h
    }
}

/// Uniform space-time grid. Nodes include both endpoints; `nx` counts
/// nodes and `nt` counts steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceTimeGrid {
    x_min: f64,
    x_max: f64,
    nx: usize,
    l: f64,
    time: TimeGrid,
}

/// Builds a uniform grid; `l = (x_max - x_min)/(nx - 1)` and `h = t_end/nt`.
pub fn make_uniform_grid(
    x_min: f64,
    x_max: f64,
    nx: usize,
    t_end: f64,
    nt: usize,
) -> Result<SpaceTimeGrid> {
    SpaceTimeGrid::new(x_min, x_max, nx, TimeGrid::new(t_end, nt)?)
}

impl SpaceTimeGrid {
    pub fn new(x_min: f64, x_max: f64, nx: usize, time: TimeGrid) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) {
            return Err(Error::invalid("x_min/x_max", "must be finite"));
        }
        if x_max <= x_min {
            return Err(Error::invalid(
                "x_max",
                format!("must exceed x_min ({x_max} <= {x_min})"),
            ));
        }
        if nx < 3 {
            return Err(Error::invalid("nx", format!("need at least 3 nodes, got {nx}")));
        }
        Ok(Self {
            x_min,
            x_max,
            nx,
            l: (x_max - x_min) / (nx - 1) as f64,
            time,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    /// Spatial step.
    pub fn l(&self) -> f64 {
        self.l
    }

    /// Time step.
    pub fn h(&self) -> f64 {
        self.time.h
    }

    pub fn nt(&self) -> usize {
        self.time.nt
    }

    pub fn t_end(&self) -> f64 {
        self.time.t_end
    }

    pub fn time_grid(&self) -> &TimeGrid {
        &self.time
    }

    pub fn node(&self, i: usize) -> f64 {
        // pin the last node to x_max so rounding never overshoots the domain
        if i + 1 == self.nx {
            self.x_max
        } else {
            self.x_min + i as f64 * self.l
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.node(i)).collect()
    }

    pub fn time(&self, n: usize) -> f64 {
        self.time.time(n)
    }

    /// Halves both `h` and `l` (doubling steps and intervals).
    pub fn refined(&self) -> Self {
        let time = TimeGrid {
            t_end: self.time.t_end,
            nt: 2 * self.time.nt,
            h: self.time.t_end / (2 * self.time.nt) as f64,
        };
        let nx = 2 * (self.nx - 1) + 1;
        Self {
            x_min: self.x_min,
            x_max: self.x_max,
            nx,
            l: (self.x_max - self.x_min) / (nx - 1) as f64,
            time,
        }
    }
}

/// Solution at level `n` together with level `n - 1`. Nothing older is kept.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub current: Vec<f64>,
    pub previous: Vec<f64>,
    pub level: usize,
}

impl FieldState {
    /// State at level 0; `previous` mirrors `current` until a step is taken.
    pub fn initial(u0: Vec<f64>) -> Result<Self> {
        check_finite(&u0, "initial condition")?;
        Ok(Self {
            previous: u0.clone(),
            current: u0,
            level: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.current.len()
    }

    pub fn is_empty(&self) -> bool {
        self.current.is_empty()
    }

    /// Rotates `next` in as the current level.
    pub(crate) fn push(&mut self, next: Vec<f64>) {
        self.previous = std::mem::replace(&mut self.current, next);
        self.level += 1;
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.current)
    }
}

pub(crate) fn check_finite(v: &[f64], what: &'static str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { what })
    }
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}
