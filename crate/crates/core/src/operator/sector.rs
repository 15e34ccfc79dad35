use super::OperatorHandle;
use crate::error::{Error, Result};
use crate::linalg::{inverse_guarded, scaled_eye, spectral_norm};
use crate::scalar::{cabs, carg, cexp, ci, cr, real, to_f64, Cx, Real};
use crate::tolerance::{BLOWUP_CAP, CONDITION_CAP};

/// Sampling pattern for a sector probe: `lambda = shift + r e^{i phi}`.
#[derive(Debug, Clone)]
pub struct ProbeGrid {
    pub radii: Vec<f64>,
    pub angles: Vec<f64>,
}

impl ProbeGrid {
    /// `n_radii` log-spaced radii on `[r_min, r_max]` times the given angles.
    pub fn log_spaced(r_min: f64, r_max: f64, n_radii: usize, angles: Vec<f64>) -> Self {
        let radii = log_space(r_min, r_max, n_radii);
        ProbeGrid { radii, angles }
    }
}

pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

#[derive(Debug, Clone)]
pub struct ProbeSample<T: Real> {
    pub lambda: Cx<T>,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct SectorProbe<T: Real> {
    pub angle_alpha: f64,
    /// Sector vertex; the probe measures `T - shift` against `S_alpha`.
    pub shift: Cx<T>,
    pub ray_samples: Vec<ProbeSample<T>>,
    pub sup_bound: f64,
    pub blow_up: bool,
    /// Eigenvalues of the shifted operator found outside the closed sector
    /// within the probed radius window.
    pub escaped_eigenvalues: Vec<Cx<T>>,
}

/// Samples `||mu (mu I - (T - shift))^-1||` for `mu = r e^{i phi}` outside
/// the closed sector `S_alpha = { |arg z| <= alpha }`.
pub fn sector_angle_probe<T: Real>(
    op: &OperatorHandle<T>,
    alpha: f64,
    shift: Cx<T>,
    grid: &ProbeGrid,
) -> Result<SectorProbe<T>> {
    if grid.radii.is_empty() || grid.angles.is_empty() {
        return Err(Error::Invalid("probe grid is empty".into()));
    }
    if !(0.0..std::f64::consts::PI).contains(&alpha) {
        return Err(Error::Invalid(format!("sector angle {alpha} outside [0, pi)")));
    }
    for &phi in &grid.angles {
        if phi.abs() <= alpha || phi.abs() > std::f64::consts::PI {
            return Err(Error::Invalid(format!("probe angle {phi} lies inside the closed sector of angle {alpha}")));
        }
    }
    let n = op.dim();
    let shifted = op.matrix() - scaled_eye(n, shift);
    let mut samples = Vec::with_capacity(grid.radii.len() * grid.angles.len());
    let mut sup = 0.0f64;
    let mut blow_up = false;
    for &phi in &grid.angles {
        for &r in &grid.radii {
            let mu = cexp(ci::<T>() * cr(real::<T>(phi))) * cr(real::<T>(r));
            let m = scaled_eye(n, mu) - &shifted;
            let value = match inverse_guarded(&m, CONDITION_CAP) {
                Ok((inv, _)) => to_f64(cabs(mu)) * to_f64(spectral_norm(&inv)),
                Err(_) => {
                    return Err(Error::SampleOnSpectrum {
                        re: to_f64((mu + shift).re),
                        im: to_f64((mu + shift).im),
                    })
                }
            };
            if !(value <= BLOWUP_CAP) {
                blow_up = true;
            }
            sup = sup.max(value);
            samples.push(ProbeSample { lambda: mu + shift, value });
        }
    }
    let r_max = grid.radii.iter().cloned().fold(0.0, f64::max);
    let mut escaped = Vec::new();
    for z in op.spectrum() {
        let w = *z - shift;
        let mag = to_f64(cabs(w));
        if mag > 0.0 && mag <= r_max && to_f64(carg(w)).abs() > alpha {
            escaped.push(*z);
        }
    }
    if !escaped.is_empty() {
        blow_up = true;
    }
    Ok(SectorProbe {
        angle_alpha: alpha,
        shift,
        ray_samples: samples,
        sup_bound: sup,
        blow_up,
        escaped_eigenvalues: escaped,
    })
}

#[cfg(test)]
mod tests {
    use super::super::make_operator;
    use super::*;
    use crate::linalg::diag;
    use crate::scalar::cx;

    fn angles(alpha: f64) -> Vec<f64> {
        let pi = std::f64::consts::PI;
        let mut v = Vec::new();
        for j in 1..=8 {
            let phi = alpha + (pi - alpha) * j as f64 / 8.0;
            v.push(phi);
            v.push(-phi);
        }
        v
    }

    #[test]
    fn positive_diagonal_is_bounded() {
        let op = make_operator(diag(&[cx::<f64>(1.0, 0.0), cx(2.0, 0.0)])).unwrap();
        let g = ProbeGrid::log_spaced(1e-2, 1e3, 30, angles(0.1));
        let p = sector_angle_probe(&op, 0.1, cx(0.0, 0.0), &g).unwrap();
        assert!(!p.blow_up);
        assert!(p.sup_bound.is_finite() && p.sup_bound < 20.0);
        let max = p.ray_samples.iter().map(|s| s.value).fold(0.0, f64::max);
        assert_eq!(max, p.sup_bound);
    }

    #[test]
    fn escaped_eigenvalue_flags_blow_up() {
        let z = cx::<f64>(0.0, std::f64::consts::PI / 3.0).exp();
        let op = make_operator(diag(&[z])).unwrap();
        let g = ProbeGrid::log_spaced(1e-1, 1e1, 17, angles(std::f64::consts::FRAC_PI_4));
        let p = sector_angle_probe(&op, std::f64::consts::FRAC_PI_4, cx(0.0, 0.0), &g).unwrap();
        assert!(p.blow_up);
        assert_eq!(p.escaped_eigenvalues.len(), 1);
    }

    #[test]
    fn rejects_samples_inside_sector() {
        let op = make_operator(diag(&[cx::<f64>(1.0, 0.0)])).unwrap();
        let g = ProbeGrid { radii: vec![1.0], angles: vec![0.05] };
        assert!(sector_angle_probe(&op, 0.1, cx(0.0, 0.0), &g).is_err());
    }
}
