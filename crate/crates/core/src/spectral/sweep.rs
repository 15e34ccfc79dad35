use rayon::prelude::*;

use super::region::{classify_direct, Region};
use crate::bvp::{PreparedResolvent, ProblemSpec};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::operator::operator_norm;
use crate::operator::log_space;
use crate::scalar::{real, to_f64, Cx, Real};
use crate::tolerance::PROBE_MARGIN;
use std::f64::consts::PI;

/// Slope of `log ratio` against `log radius` over the last decade above which
/// a ray may be flagged as trending upward.
pub const TREND_SLOPE: f64 = 0.05;
/// The flag also needs the last-decade maximum to exceed the earlier maximum
/// by this factor; bounded rays oscillate as they pass discrete eigenvalues.
pub const TREND_EXCESS: f64 = 1.1;

/// Points `vertex + rho e^{i phi}` outside the shifted closed sector.
#[derive(Debug, Clone)]
pub struct SweepGrid {
    pub vertex: (f64, f64),
    pub radii: Vec<f64>,
    pub angles: Vec<f64>,
    pub exclusion_radius: f64,
}

impl SweepGrid {
    /// Checks `|angle| in (2 theta_A + margin, pi]`, positive radii beyond the
    /// exclusion radius.
    pub fn new(k: f64, theta_a: f64, radii: Vec<f64>, angles: Vec<f64>, exclusion_radius: f64) -> Result<Self> {
        if !(exclusion_radius >= 0.0) {
            return Err(Error::Invalid("exclusion radius must be >= 0".into()));
        }
        let lo = 2.0 * theta_a + PROBE_MARGIN;
        for &phi in &angles {
            if !(phi.abs() > lo && phi.abs() <= PI) {
                return Err(Error::Invalid(format!(
                    "angle {phi:.6} is not in (2 theta_A + {PROBE_MARGIN}, pi] with theta_A = {theta_a:.6}"
                )));
            }
        }
        for &r in &radii {
            if !(r > exclusion_radius) || !r.is_finite() {
                return Err(Error::Invalid(format!("radius {r:e} does not exceed the exclusion radius {exclusion_radius:e}")));
            }
        }
        Ok(SweepGrid { vertex: (-k * k / 4.0, 0.0), radii, angles, exclusion_radius })
    }

    /// Log-spaced radii and `n_angles` symmetric angles filling
    /// `(2 theta_A + margin, pi)` at cell midpoints.
    pub fn standard(
        k: f64,
        theta_a: f64,
        r_min: f64,
        r_max: f64,
        n_radii: usize,
        n_angles: usize,
        exclusion_radius: f64,
    ) -> Result<Self> {
        if n_angles < 2 || n_angles % 2 != 0 {
            return Err(Error::Invalid("angle count must be even and at least 2".into()));
        }
        let lo = 2.0 * theta_a + PROBE_MARGIN;
        if lo >= PI {
            return Err(Error::Invalid(format!("no directions outside a sector of half-angle {lo:.6}")));
        }
        let half = n_angles / 2;
        let mut angles = Vec::with_capacity(n_angles);
        for j in 0..half {
            let phi = lo + (PI - lo) * (j as f64 + 0.5) / half as f64;
            angles.push(phi);
            angles.push(-phi);
        }
        Self::new(k, theta_a, log_space(r_min, r_max, n_radii), angles, exclusion_radius)
    }

    pub fn len(&self) -> usize {
        self.radii.len() * self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid points in radius-major order.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.len());
        for &r in &self.radii {
            for &phi in &self.angles {
                out.push((self.vertex.0 + r * phi.cos(), self.vertex.1 + r * phi.sin()));
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct SweepRecord {
    pub lambda: (f64, f64),
    pub radius: f64,
    pub angle: f64,
    pub norm: Option<f64>,
    pub ratio: Option<f64>,
    pub frame_ok: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub records: Vec<SweepRecord>,
    pub c_empirical: f64,
    pub failures: Vec<(f64, f64)>,
    /// Largest `|lambda + k^2/4|` among failures (0 when none).
    pub r_observed: f64,
    /// Angles whose ratio grows over the last radius decade.
    pub upward_trend: Vec<f64>,
}

impl SweepReport {
    pub fn successes(&self) -> usize {
        self.records.iter().filter(|r| r.frame_ok).count()
    }
}

/// Weighted norm of `(-A_i - lambda)^-1` on the grid of `spec`.
pub fn resolvent_norm<T: Real>(spec: &ProblemSpec<T>, lambda: Cx<T>) -> Result<f64> {
    let pr = PreparedResolvent::new(&spec.op_a, spec.k, spec.family, lambda, spec.grid().clone())?;
    let m = pr.materialize()?;
    let w = GridFunction::flat_weights(spec.grid(), spec.dim());
    Ok(to_f64(operator_norm(&m, Some(&w))))
}

pub fn run_sweep<T: Real>(spec: &ProblemSpec<T>, grid: &SweepGrid) -> Result<SweepReport> {
    if spec.family.has_exclusion_ball() && !(grid.exclusion_radius > 0.0) {
        return Err(Error::Invalid(format!(
            "{:?} requires a positive exclusion radius around the vertex",
            spec.family
        )));
    }
    let theta_a = spec.theta_a();
    let k = spec.k;
    let mut tasks = Vec::with_capacity(grid.len());
    for &r in &grid.radii {
        for &phi in &grid.angles {
            tasks.push((r, phi));
        }
    }
    let vertex = grid.vertex;
    let records: Vec<SweepRecord> = tasks
        .par_iter()
        .map(|&(r, phi)| {
            let lam = (vertex.0 + r * phi.cos(), vertex.1 + r * phi.sin());
            let lambda = Cx::new(real::<T>(lam.0), real::<T>(lam.1));
            if classify_direct(lambda, k, theta_a) != Region::OutsideSector {
                return SweepRecord {
                    lambda: lam,
                    radius: r,
                    angle: phi,
                    norm: None,
                    ratio: None,
                    frame_ok: false,
                    error: Some("point is not outside the shifted sector".into()),
                };
            }
            match resolvent_norm(spec, lambda) {
                Ok(norm) => SweepRecord {
                    lambda: lam,
                    radius: r,
                    angle: phi,
                    norm: Some(norm),
                    ratio: Some((1.0 + r) * norm),
                    frame_ok: true,
                    error: None,
                },
                Err(e) => SweepRecord {
                    lambda: lam,
                    radius: r,
                    angle: phi,
                    norm: None,
                    ratio: None,
                    frame_ok: false,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();

    let c_empirical = records.iter().filter_map(|r| r.ratio).fold(0.0, f64::max);
    let failures: Vec<(f64, f64)> = records.iter().filter(|r| !r.frame_ok).map(|r| r.lambda).collect();
    let r_observed = records.iter().filter(|r| !r.frame_ok).map(|r| r.radius).fold(0.0, f64::max);
    let upward_trend = grid.angles.iter().copied().filter(|&phi| trends_upward(&records, phi)).collect();
    Ok(SweepReport { records, c_empirical, failures, r_observed, upward_trend })
}

/// Positive log-log slope on the last radius decade of one ray together with
/// a new maximum there.
fn trends_upward(records: &[SweepRecord], phi: f64) -> bool {
    let ray: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.angle == phi)
        .filter_map(|r| r.ratio.map(|q| (r.radius.ln(), q.ln())))
        .collect();
    let Some(&(top, _)) = ray.iter().max_by(|a, b| a.0.total_cmp(&b.0)) else {
        return false;
    };
    let cut = top - 10f64.ln();
    let (tail, head): (Vec<(f64, f64)>, Vec<(f64, f64)>) = ray.into_iter().partition(|(x, _)| *x >= cut);
    let tail_max = tail.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let head_max = head.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    least_squares_slope(&tail) > TREND_SLOPE && tail_max > head_max + TREND_EXCESS.ln()
}

pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}
