//! Finite-difference right-hand sides and Dirichlet boundary enforcement.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mesh::SpaceTimeGrid;

/// How the last node's `F` is closed for the forward-difference operator,
/// which has no right neighbour there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgeClosure {
    /// `F_{nx-1} = F_{nx-2}`.
    #[default]
    CopyInward,
    Zero,
}

/// `F_i = c·(u_{i+1} − u_i)/l` with the default [`EdgeClosure::CopyInward`].
pub fn advection_rhs(u: &[f64], l: f64, c: f64) -> Result<Vec<f64>> {
    advection_rhs_with(u, l, c, EdgeClosure::CopyInward)
}

pub fn advection_rhs_with(u: &[f64], l: f64, c: f64, closure: EdgeClosure) -> Result<Vec<f64>> {
    if u.len() < 2 {
        return Err(Error::invalid("u", format!("need at least 2 nodes, got {}", u.len())));
    }
    check_spacing(l)?;
    let mut f: Vec<f64> = u.windows(2).map(|w| c * (w[1] - w[0]) / l).collect();
    let last = match closure {
        EdgeClosure::CopyInward => f[f.len() - 1],
        EdgeClosure::Zero => 0.0,
    };
    f.push(last);
    Ok(f)
}

/// `F_i = d·(u_{i+1} − 2u_i + u_{i-1})/l²` inside, `0` on both end nodes.
pub fn diffusion_rhs(u: &[f64], l: f64, d: f64) -> Result<Vec<f64>> {
    if u.len() < 3 {
        return Err(Error::invalid("u", format!("need at least 3 nodes, got {}", u.len())));
    }
    check_spacing(l)?;
    let k = d / (l * l);
    let mut f = Vec::with_capacity(u.len());
    f.push(0.0);
    f.extend(u.windows(3).map(|w| k * (w[2] - 2.0 * w[1] + w[0])));
    f.push(0.0);
    Ok(f)
}

fn check_spacing(l: f64) -> Result<()> {
    if l.is_finite() && l > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid("l", format!("must be positive, got {l}")))
    }
}

pub type BoundaryFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Treatment of one end of the domain after each time level.
#[derive(Clone, Default)]
pub enum BoundaryCondition {
    /// Value overwritten by `g(t)`.
    Dirichlet(BoundaryFn),
    /// Value overwritten by zero.
    Zero,
    /// Left alone here; the operator's [`EdgeClosure::CopyInward`] handles it.
    CopyInward,
    #[default]
    None,
}

impl BoundaryCondition {
    pub fn dirichlet(g: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        BoundaryCondition::Dirichlet(Arc::new(g))
    }

    fn value(&self, t: f64) -> Option<f64> {
        match self {
            BoundaryCondition::Dirichlet(g) => Some(g(t)),
            BoundaryCondition::Zero => Some(0.0),
            BoundaryCondition::CopyInward | BoundaryCondition::None => None,
        }
    }

    pub fn is_dirichlet(&self) -> bool {
        matches!(self, BoundaryCondition::Dirichlet(_) | BoundaryCondition::Zero)
    }
}

impl fmt::Debug for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryCondition::Dirichlet(_) => f.write_str("Dirichlet(..)"),
            BoundaryCondition::Zero => f.write_str("Zero"),
            BoundaryCondition::CopyInward => f.write_str("CopyInward"),
            BoundaryCondition::None => f.write_str("None"),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct BoundarySpec {
    pub left: BoundaryCondition,
    pub right: BoundaryCondition,
}

impl BoundarySpec {
    pub fn new(left: BoundaryCondition, right: BoundaryCondition) -> Self {
        Self { left, right }
    }

    pub fn zero() -> Self {
        Self::new(BoundaryCondition::Zero, BoundaryCondition::Zero)
    }

    /// Overwrites the end values in place; interior nodes are untouched.
    pub fn apply_in_place(&self, u: &mut [f64], t: f64) {
        if u.is_empty() {
            return;
        }
        if let Some(v) = self.left.value(t) {
            u[0] = v;
        }
        if let Some(v) = self.right.value(t) {
            let last = u.len() - 1;
            u[last] = v;
        }
    }
}

/// Returns `u` with the Dirichlet data of `bc` imposed at time `t`.
pub fn apply_boundary(u: &[f64], t: f64, bc: &BoundarySpec, grid: &SpaceTimeGrid) -> Vec<f64> {
    debug_assert_eq!(u.len(), grid.nx());
    let mut out = u.to_vec();
    bc.apply_in_place(&mut out, t);
    out
}
