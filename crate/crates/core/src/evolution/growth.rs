use super::contour::{ContourParams, ContourPropagator};
use super::stepping::check_analytic;
use crate::bvp::{BcFamily, ProblemSpec};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::linalg::CVec;
use crate::operator::{expm, operator_norm};
use crate::oracle::dense_generator;
use crate::scalar::{cr, real, to_f64, Real};

#[derive(Debug, Clone)]
pub struct GrowthReport {
    /// `(t, ||e^{t A_i}||)`
    pub samples: Vec<(f64, f64)>,
    /// Smallest `M` with `||e^{t A_i}|| <= M e^{t k^2/4}` on the samples.
    pub m_fit: f64,
    pub violation: bool,
    /// `dense` or `contour`.
    pub route: &'static str,
}

/// Semigroup norms on `t_grid` and the fitted growth constant.
pub fn growth_bound_probe<T: Real>(spec: &ProblemSpec<T>, t_grid: &[f64]) -> Result<GrowthReport> {
    if matches!(spec.family, BcFamily::Bc3 | BcFamily::Bc4) {
        return Err(Error::Invalid("growth probe covers BC1, BC2 and BC5".into()));
    }
    check_analytic(spec)?;
    let shift = to_f64(spec.k * spec.k) / 4.0;
    let (samples, route) = match dense_generator(spec) {
        Ok(g) => {
            let w = g.weights();
            let s = t_grid
                .iter()
                .map(|&t| {
                    let norm = if t == 0.0 { 1.0 } else { to_f64(operator_norm(&expm(&(&g.g * cr(real::<T>(t)))), Some(&w))) };
                    (t, norm)
                })
                .collect();
            (s, "dense")
        }
        Err(Error::CapExceeded { .. }) => {
            let grid = spec.grid().clone();
            let dim = spec.dim();
            let w = GridFunction::flat_weights(&grid, dim);
            let probe = GridFunction::from_fn(grid.clone(), dim, |x| CVec::<T>::from_element(dim, cr(x)));
            let mut s = Vec::with_capacity(t_grid.len());
            for &t in t_grid {
                let norm = if t == 0.0 {
                    1.0
                } else {
                    let prop = ContourPropagator::build(spec, t, &probe, &ContourParams::default())?;
                    to_f64(operator_norm(&prop.materialize()?, Some(&w)))
                };
                s.push((t, norm));
            }
            (s, "contour")
        }
        Err(e) => return Err(e),
    };
    let m_fit = samples.iter().map(|&(t, n)| n * (-t * shift).exp()).fold(0.0, f64::max);
    let violation = samples.iter().any(|&(t, n)| n > m_fit * (t * shift).exp() * (1.0 + 1e-8));
    Ok(GrowthReport { samples, m_fit, violation, route })
}
