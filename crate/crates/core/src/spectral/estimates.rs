use super::region::{classify_direct, Region};
use super::sweep::least_squares_slope;
use crate::bvp::{lambda_frame, particular_parts, BoundaryData, ProblemSpec};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::linalg::{spectral_norm, vnorm};
use crate::scalar::{cabs, real, to_f64, Cx, Real};

/// One row of the lambda-dependent estimates.
#[derive(Debug, Clone)]
pub struct EstimateRow {
    pub lambda: (f64, f64),
    /// `|lambda + k^2/4|`
    pub distance: f64,
    pub ml_inv: f64,
    pub lm_inv: f64,
    pub ecm: f64,
    pub m2_ecm: f64,
    /// `||M^2 e^{cM}|| e^{c omega |lambda + k^2/4|^{1/4}}` with the fitted omega.
    pub m2_ecm_scaled: f64,
    /// `||v_0|| / ||f||`
    pub v0_ratio: f64,
    /// `(|F'(a)| + |F'(b)|) / ||f||`
    pub fprime_ratio: f64,
}

#[derive(Debug, Clone)]
pub struct EstimateDiagnostics {
    pub rows: Vec<EstimateRow>,
    pub omega_fit: f64,
    /// Largest of `||M L^-1||`, `||L M^-1||` over the samples.
    pub pair_bound: f64,
    pub pair_bounded: bool,
    pub ecm_monotone: bool,
    pub v0_monotone: bool,
    /// Log-log slopes of the two ratios against the distance to the vertex.
    pub v0_slope: f64,
    pub fprime_slope: f64,
}

/// Tabulates the frame estimates over `samples` (all outside the shifted
/// sector), using the forcing of `spec` or a unit profile when it vanishes.
pub fn lemma_estimate_checks<T: Real>(spec: &ProblemSpec<T>, samples: &[Cx<T>]) -> Result<EstimateDiagnostics> {
    let theta_a = spec.theta_a();
    let dim = spec.dim();
    let grid = spec.grid().clone();
    let c = spec.c();
    let f = if to_f64(spec.f.max_norm()) > 0.0 {
        spec.f.clone()
    } else {
        let a = grid.a();
        GridFunction::from_fn(grid.clone(), dim, |x| {
            crate::linalg::CVec::<T>::from_element(dim, Cx::new(real::<T>(1.0) + (x - a) / c, T::zero()))
        })
    };
    let f_norm = to_f64(f.norm());
    let mut rows = Vec::with_capacity(samples.len());
    for &lambda in samples {
        if classify_direct(lambda, spec.k, theta_a) != Region::OutsideSector {
            return Err(Error::Invalid(format!(
                "sample {:.6e}{:+.6e}i is not outside the shifted sector",
                to_f64(lambda.re),
                to_f64(lambda.im)
            )));
        }
        let fr = lambda_frame(&spec.op_a, spec.k, lambda, c, false)?;
        let l = fr.l.matrix();
        let m = fr.m.matrix();
        let gf = fr.on_grid(grid.clone());
        let parts = particular_parts(&gf, &f.values, &BoundaryData::zeros(dim));
        let v0 = GridFunction::new(grid.clone(), parts.v0.clone())?;
        let shifted = lambda + Cx::new(spec.k * spec.k / real(4.0), T::zero());
        rows.push(EstimateRow {
            lambda: (to_f64(lambda.re), to_f64(lambda.im)),
            distance: to_f64(cabs(shifted)),
            ml_inv: to_f64(spectral_norm(&(m * &fr.l_inv))),
            lm_inv: to_f64(spectral_norm(&(l * &fr.m_inv))),
            ecm: to_f64(spectral_norm(&fr.ecm)),
            m2_ecm: to_f64(spectral_norm(&(m * m * &fr.ecm))),
            m2_ecm_scaled: 0.0,
            v0_ratio: to_f64(v0.norm()) / f_norm,
            fprime_ratio: (to_f64(vnorm(&parts.fprime_a())) + to_f64(vnorm(&parts.fprime_b()))) / f_norm,
        });
    }
    rows.sort_by(|a, b| a.distance.total_cmp(&b.distance));

    // log ||M^2 e^{cM}|| ~ log K - omega c s with s = |lambda + k^2/4|^{1/4}
    let cf = to_f64(c);
    let pts: Vec<(f64, f64)> =
        rows.iter().filter(|r| r.m2_ecm > 0.0).map(|r| (cf * r.distance.powf(0.25), r.m2_ecm.ln())).collect();
    let omega_fit = (-least_squares_slope(&pts)).max(0.0);
    for r in rows.iter_mut() {
        r.m2_ecm_scaled = r.m2_ecm * (cf * omega_fit * r.distance.powf(0.25)).exp();
    }
    let pair_bound = rows.iter().map(|r| r.ml_inv.max(r.lm_inv)).fold(0.0, f64::max);
    let nonincreasing = |vals: Vec<f64>| vals.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9));
    let ecm_monotone = nonincreasing(rows.iter().map(|r| r.ecm).collect());
    let v0_monotone = nonincreasing(rows.iter().map(|r| r.v0_ratio).collect());
    let loglog = |g: &dyn Fn(&EstimateRow) -> f64| {
        let pts: Vec<(f64, f64)> =
            rows.iter().filter(|r| g(r) > 0.0 && r.distance > 0.0).map(|r| (r.distance.ln(), g(r).ln())).collect();
        least_squares_slope(&pts)
    };
    let v0_slope = loglog(&|r| r.v0_ratio);
    let fprime_slope = loglog(&|r| r.fprime_ratio);
    Ok(EstimateDiagnostics {
        pair_bounded: pair_bound.is_finite(),
        rows,
        omega_fit,
        pair_bound,
        ecm_monotone,
        v0_monotone,
        v0_slope,
        fprime_slope,
    })
}
