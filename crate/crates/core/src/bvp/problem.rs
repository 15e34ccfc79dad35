use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::linalg::CVec;
use crate::operator::OperatorHandle;
use crate::scalar::{cabs, carg, to_f64, Real};

/// Boundary-condition families at `x = a` and `x = b`.
///
/// | family | at each end            |
/// |--------|------------------------|
/// | `Bc1`  | `u`, `u''`             |
/// | `Bc2`  | `u'`, `u'' + A u`      |
/// | `Bc3`  | `u`, `u'`              |
/// | `Bc4`  | `u'`, `u''`            |
/// | `Bc5`  | `u`, `u'' + A u`       |
///
/// In the steady solvers the operator in `Bc2`/`Bc5` is the frame's `P`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BcFamily {
    Bc1,
    Bc2,
    Bc3,
    Bc4,
    Bc5,
}

impl BcFamily {
    pub const ALL: [BcFamily; 5] = [BcFamily::Bc1, BcFamily::Bc2, BcFamily::Bc3, BcFamily::Bc4, BcFamily::Bc5];

    pub fn from_index(i: usize) -> Result<Self> {
        match i {
            1 => Ok(BcFamily::Bc1),
            2 => Ok(BcFamily::Bc2),
            3 => Ok(BcFamily::Bc3),
            4 => Ok(BcFamily::Bc4),
            5 => Ok(BcFamily::Bc5),
            _ => Err(Error::Invalid(format!("boundary family {i} not in 1..=5"))),
        }
    }

    pub fn index(self) -> usize {
        match self {
            BcFamily::Bc1 => 1,
            BcFamily::Bc2 => 2,
            BcFamily::Bc3 => 3,
            BcFamily::Bc4 => 4,
            BcFamily::Bc5 => 5,
        }
    }

    /// Families whose resolvent set is only known outside a ball around the
    /// sector vertex.
    pub fn has_exclusion_ball(self) -> bool {
        matches!(self, BcFamily::Bc3 | BcFamily::Bc4)
    }
}

/// Boundary data `phi_1 .. phi_4`, ordered as in the family table: the two
/// values of the first quantity at `a`, `b`, then the second at `a`, `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData<T: Real> {
    pub phi: [CVec<T>; 4],
}

impl<T: Real> BoundaryData<T> {
    pub fn zeros(dim: usize) -> Self {
        BoundaryData { phi: [CVec::zeros(dim), CVec::zeros(dim), CVec::zeros(dim), CVec::zeros(dim)] }
    }

    pub fn new(phi1: CVec<T>, phi2: CVec<T>, phi3: CVec<T>, phi4: CVec<T>) -> Self {
        BoundaryData { phi: [phi1, phi2, phi3, phi4] }
    }

    pub fn dim(&self) -> usize {
        self.phi[0].len()
    }

    pub fn max_norm(&self) -> T {
        let mut s = T::zero();
        for v in &self.phi {
            for z in v.iter() {
                s = s.max(cabs(*z));
            }
        }
        s
    }
}

#[derive(Debug, Clone)]
pub struct ProblemSpec<T: Real> {
    pub a: T,
    pub b: T,
    pub k: T,
    pub op_a: OperatorHandle<T>,
    pub family: BcFamily,
    pub phi: BoundaryData<T>,
    pub f: GridFunction<T>,
}

impl<T: Real> ProblemSpec<T> {
    pub fn new(
        op_a: OperatorHandle<T>,
        k: T,
        family: BcFamily,
        phi: BoundaryData<T>,
        f: GridFunction<T>,
    ) -> Result<Self> {
        let spec = ProblemSpec { a: f.grid.a(), b: f.grid.b(), k, op_a, family, phi, f };
        spec.validate()?;
        Ok(spec)
    }

    /// Homogeneous boundary data and zero forcing on the given grid.
    pub fn homogeneous(op_a: OperatorHandle<T>, k: T, family: BcFamily, grid: Arc<Grid<T>>) -> Result<Self> {
        let dim = op_a.dim();
        let f = GridFunction::zeros(grid, dim);
        Self::new(op_a, k, family, BoundaryData::zeros(dim), f)
    }

    pub fn c(&self) -> T {
        self.b - self.a
    }

    pub fn dim(&self) -> usize {
        self.op_a.dim()
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.f.grid
    }

    pub fn with_forcing(&self, f: GridFunction<T>) -> Self {
        ProblemSpec { f, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a < self.b) {
            return Err(Error::Invalid("interval requires a < b".into()));
        }
        let d = self.dim();
        if self.f.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: self.f.dim() });
        }
        if self.phi.phi.iter().any(|v| v.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, got: self.phi.dim() });
        }
        // [k, +inf) must avoid the spectrum of A
        for z in self.op_a.spectrum() {
            let tol = 1e-12 * (to_f64(cabs(*z)) + 1.0);
            if to_f64(z.im).abs() <= tol && z.re >= self.k {
                return Err(Error::Invalid(format!(
                    "eigenvalue {:.6e} of A lies on [k, +inf) with k = {:.6e}",
                    to_f64(z.re),
                    to_f64(self.k)
                )));
            }
        }
        Ok(())
    }

    /// Spectral-angle surrogate `theta_A = max |arg(-mu)|` over eigenvalues
    /// `mu` of `A`.
    pub fn theta_a(&self) -> f64 {
        theta_of(&self.op_a)
    }
}

pub fn theta_of<T: Real>(op: &OperatorHandle<T>) -> f64 {
    op.spectrum().iter().map(|z| to_f64(carg(-*z)).abs()).fold(0.0, f64::max)
}
