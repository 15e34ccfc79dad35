use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::kernel::SemigroupKernel;
use crate::linalg::{commutator_norm, eye, fro, inverse_guarded, norm1, scaled_eye, CMat};
use crate::operator::{make_operator, sqrt_principal, OperatorHandle};
use crate::scalar::{ci, cr, csqrt, cscale, to_f64, Cx, Real};
use crate::tolerance::{floor_tol, CONDITION_CAP, CUT_MARGIN, IDENTITY};

/// `P_lambda`, `Q_lambda`, `B_lambda` for the shifted spectral problem.
#[derive(Debug, Clone)]
pub struct PqLambda<T: Real> {
    pub p: OperatorHandle<T>,
    pub q: OperatorHandle<T>,
    pub b: OperatorHandle<T>,
    /// `A_{k/2} = A - (k/2) I`
    pub a_half: OperatorHandle<T>,
    /// `sqrt(-lambda - k^2/4)`, principal branch.
    pub root: Cx<T>,
}

/// `w = -lambda - k^2/4`; the formula path needs `w` off `(-inf, 0]`.
pub fn shifted_parameter<T: Real>(k: T, lambda: Cx<T>) -> Cx<T> {
    let k2 = k * k / (T::one() + T::one() + T::one() + T::one());
    -lambda - cr(k2)
}

pub fn on_branch_cut<T: Real>(w: Cx<T>) -> bool {
    let scale = to_f64(crate::scalar::cabs(w)).max(1.0);
    to_f64(w.re) <= 0.0 && to_f64(w.im).abs() <= CUT_MARGIN * scale
}

pub fn build_pq_lambda<T: Real>(a: &OperatorHandle<T>, k: T, lambda: Cx<T>) -> Result<PqLambda<T>> {
    let w = shifted_parameter(k, lambda);
    if on_branch_cut(w) {
        return Err(Error::BranchCut { re: to_f64(w.re), im: to_f64(w.im) });
    }
    let n = a.dim();
    let root = csqrt(w);
    let half = k / (T::one() + T::one());
    let a_half = a.matrix() - scaled_eye(n, cr(half));
    let shift = scaled_eye(n, ci::<T>() * root);
    let p = make_operator(&a_half + &shift)?.with_label("P");
    let q = make_operator(&a_half - &shift)?.with_label("Q");
    let b = make_operator(scaled_eye(n, cscale(ci::<T>() * root, T::one() + T::one())))?.with_label("B");
    Ok(PqLambda { p, q, b, a_half: make_operator(a_half)?, root })
}

/// The operator bundle entering the representation formulas.
#[derive(Debug, Clone)]
pub struct BcFrame<T: Real> {
    pub p: OperatorHandle<T>,
    pub q: OperatorHandle<T>,
    pub l: OperatorHandle<T>,
    pub m: OperatorHandle<T>,
    pub b: OperatorHandle<T>,
    pub z: OperatorHandle<T>,
    pub w: OperatorHandle<T>,
    pub t_minus: OperatorHandle<T>,
    pub t_plus: OperatorHandle<T>,
    pub u: OperatorHandle<T>,
    pub v: OperatorHandle<T>,
    pub u_inv: Option<CMat<T>>,
    pub v_inv: Option<CMat<T>>,
    pub l_inv: CMat<T>,
    pub m_inv: CMat<T>,
    pub b_inv: CMat<T>,
    /// `e^{cL}`, `e^{cM}`
    pub ecl: CMat<T>,
    pub ecm: CMat<T>,
    pub c: T,
    pub lambda: Option<Cx<T>>,
    pub t_minus_norm: f64,
    pub t_plus_norm: f64,
    /// Condition estimates of `U` and `V` (infinite when singular).
    pub u_cond: f64,
    pub v_cond: f64,
}

fn frame_inverse<T: Real>(m: &CMat<T>, which: &'static str) -> Result<(CMat<T>, f64)> {
    inverse_guarded(m, CONDITION_CAP).map_err(|e| match e {
        Error::NearSpectrum { cond } => Error::FrameSingular { which, cond },
        other => other,
    })
}

/// Inverse of a difference `m = X - Y` whose terms have size `scale`: the
/// condition is measured against `max(||m||, scale)` so that cancellation
/// (a scalar `1 - t` with `t ~ 1`) counts as near-singular.
fn frame_inverse_scaled<T: Real>(m: &CMat<T>, scale: f64, which: &'static str) -> Result<(CMat<T>, f64)> {
    let (inv, cond) = frame_inverse(m, which)?;
    let rel = cond.max(to_f64(norm1(&inv)) * scale);
    if !(rel <= CONDITION_CAP) {
        return Err(Error::FrameSingular { which, cond: rel });
    }
    Ok((inv, rel))
}

/// Assembles the frame; `U` and `V` must be invertible.
pub fn assemble_frame<T: Real>(
    p: &OperatorHandle<T>,
    q: &OperatorHandle<T>,
    b: &OperatorHandle<T>,
    c: T,
) -> Result<BcFrame<T>> {
    let f = assemble_frame_lenient(p, q, b, c)?;
    f.require_uv()?;
    Ok(f)
}

/// Assembles the frame, recording (not rejecting) singular `U` or `V`.
pub fn assemble_frame_lenient<T: Real>(
    p: &OperatorHandle<T>,
    q: &OperatorHandle<T>,
    b: &OperatorHandle<T>,
    c: T,
) -> Result<BcFrame<T>> {
    let n = p.dim();
    if q.dim() != n || b.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: q.dim().min(b.dim()) });
    }
    if !(c > T::zero()) {
        return Err(Error::Invalid("interval length c must be positive".into()));
    }
    let tol = to_f64(floor_tol::<T>(IDENTITY));
    let scale = to_f64(fro(p.matrix()) + fro(q.matrix())).max(1.0);
    if to_f64(fro(&(q.matrix() + b.matrix() - p.matrix()))) > tol * scale {
        return Err(Error::Invalid("frame requires P = Q + B".into()));
    }
    if to_f64(commutator_norm(p.matrix(), q.matrix())) > tol * scale * scale {
        return Err(Error::Invalid("frame requires commuting P and Q".into()));
    }
    let pq_scale = to_f64(norm1(p.matrix()) + norm1(q.matrix()));
    let (b_inv, _) = frame_inverse_scaled(b.matrix(), pq_scale, "B")?;
    let neg_q = make_operator(-q.matrix())?;
    let neg_p = make_operator(-p.matrix())?;
    let l = make_operator(-sqrt_principal(&neg_q)?.matrix())?.with_label("L");
    let m = make_operator(-sqrt_principal(&neg_p)?.matrix())?.with_label("M");
    let (l_inv, _) = frame_inverse(l.matrix(), "L")?;
    let (m_inv, _) = frame_inverse(m.matrix(), "M")?;
    let id = eye::<T>(n);
    let ecl = l.exp_matrix(c);
    let ecm = m.exp_matrix(c);
    let e2m = &ecm * &ecm;
    let e2l = &ecl * &ecl;
    let (z, _) = frame_inverse_scaled(&(&id - &e2m), 1.0 + to_f64(norm1(&e2m)), "Z")?;
    let (w, _) = frame_inverse_scaled(&(&id - &e2l), 1.0 + to_f64(norm1(&e2l)), "W")?;
    let lpm = l.matrix() + m.matrix();
    let ec_sum = &ecl * &ecm;
    let corr = &b_inv * &lpm * &lpm * (&ecm - &ecl);
    let t_minus = &ec_sum + &corr;
    let t_plus = &ec_sum - &corr;
    let u = &id - &t_minus;
    let v = &id - &t_plus;
    let (u_inv, u_cond) = match frame_inverse_scaled(&u, 1.0 + to_f64(norm1(&t_minus)), "U") {
        Ok((inv, cond)) => (Some(inv), cond),
        Err(Error::FrameSingular { cond, .. }) => (None, cond),
        Err(e) => return Err(e),
    };
    let (v_inv, v_cond) = match frame_inverse_scaled(&v, 1.0 + to_f64(norm1(&t_plus)), "V") {
        Ok((inv, cond)) => (Some(inv), cond),
        Err(Error::FrameSingular { cond, .. }) => (None, cond),
        Err(e) => return Err(e),
    };
    let t_minus = make_operator(t_minus)?.with_label("T-");
    let t_plus = make_operator(t_plus)?.with_label("T+");
    Ok(BcFrame {
        p: p.clone(),
        q: q.clone(),
        b: b.clone(),
        l,
        m,
        z: make_operator(z)?.with_label("Z"),
        w: make_operator(w)?.with_label("W"),
        t_minus_norm: to_f64(t_minus.norm()),
        t_plus_norm: to_f64(t_plus.norm()),
        u: make_operator(u)?.with_label("U"),
        v: make_operator(v)?.with_label("V"),
        t_minus,
        t_plus,
        u_inv,
        v_inv,
        l_inv,
        m_inv,
        b_inv,
        ecl,
        ecm,
        c,
        lambda: None,
        u_cond,
        v_cond,
    })
}

/// Frame for the shifted spectral problem at `lambda`.
pub fn lambda_frame<T: Real>(a: &OperatorHandle<T>, k: T, lambda: Cx<T>, c: T, need_uv: bool) -> Result<BcFrame<T>> {
    let pq = build_pq_lambda(a, k, lambda)?;
    let mut f = assemble_frame_lenient(&pq.p, &pq.q, &pq.b, c)?;
    if need_uv {
        f.require_uv()?;
    }
    f.lambda = Some(lambda);
    Ok(f)
}

/// Residuals of the defining frame identities.
#[derive(Debug, Clone, Copy)]
pub struct FrameResiduals {
    pub l_squared: f64,
    pub m_squared: f64,
    pub z_inverse: f64,
    pub w_inverse: f64,
    pub u_def: f64,
    pub v_def: f64,
    pub p_split: f64,
    /// `||(L - M) - B (L + M)^-1||`
    pub l_minus_m: f64,
    pub max_commutator: f64,
}

impl FrameResiduals {
    pub fn max(&self) -> f64 {
        [
            self.l_squared,
            self.m_squared,
            self.z_inverse,
            self.w_inverse,
            self.u_def,
            self.v_def,
            self.p_split,
            self.l_minus_m,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

impl<T: Real> BcFrame<T> {
    pub fn dim(&self) -> usize {
        self.p.dim()
    }

    pub fn require_uv(&self) -> Result<()> {
        if self.u_inv.is_none() {
            return Err(Error::FrameSingular { which: "U", cond: self.u_cond });
        }
        if self.v_inv.is_none() {
            return Err(Error::FrameSingular { which: "V", cond: self.v_cond });
        }
        Ok(())
    }

    /// Contraction diagnostic: `||T-|| < 1` and `||T+|| < 1`.
    pub fn contractive(&self) -> bool {
        self.t_minus_norm < 1.0 && self.t_plus_norm < 1.0
    }

    pub fn on_grid(&self, grid: Arc<Grid<T>>) -> GridFrame<T> {
        GridFrame {
            kl: SemigroupKernel::new(&self.l, grid.clone()),
            km: SemigroupKernel::new(&self.m, grid.clone()),
            frame: self.clone(),
            grid,
        }
    }

    /// Relative residuals (Frobenius, scaled by the larger side).
    pub fn residuals(&self) -> FrameResiduals {
        let n = self.dim();
        let id = eye::<T>(n);
        let rel = |x: CMat<T>, s: &CMat<T>| to_f64(fro(&x)) / to_f64(fro(s)).max(1.0);
        let l = self.l.matrix();
        let m = self.m.matrix();
        let lpm = l + m;
        let lpm_inv = lpm.clone().lu().try_inverse().unwrap_or_else(|| CMat::zeros(n, n));
        let members = [&self.p, &self.q, &self.l, &self.m, &self.b, &self.z, &self.w, &self.u, &self.v];
        let mut comm = 0.0f64;
        for i in 0..members.len() {
            for j in (i + 1)..members.len() {
                let a = members[i].matrix();
                let b = members[j].matrix();
                let s = (to_f64(fro(a)) * to_f64(fro(b))).max(1.0);
                comm = comm.max(to_f64(commutator_norm(a, b)) / s);
            }
        }
        let ec_sum = &self.ecl * &self.ecm;
        let corr = &self.b_inv * &lpm * &lpm * (&self.ecm - &self.ecl);
        FrameResiduals {
            l_squared: rel(l * l + self.q.matrix(), self.q.matrix()),
            m_squared: rel(m * m + self.p.matrix(), self.p.matrix()),
            z_inverse: rel(self.z.matrix() * (&id - &self.ecm * &self.ecm) - &id, &id),
            w_inverse: rel(self.w.matrix() * (&id - &self.ecl * &self.ecl) - &id, &id),
            u_def: rel(self.u.matrix() - (&id - &ec_sum - &corr), &id),
            v_def: rel(self.v.matrix() - (&id - &ec_sum + &corr), &id),
            p_split: rel(self.q.matrix() + self.b.matrix() - self.p.matrix(), self.p.matrix()),
            l_minus_m: rel((l - m) - self.b.matrix() * lpm_inv, &(l - m)),
            max_commutator: comm,
        }
    }

    /// Largest real part over the spectra of `L` and `M`; negative for a
    /// valid frame.
    pub fn max_generator_real_part(&self) -> f64 {
        self.l
            .spectrum()
            .iter()
            .chain(self.m.spectrum())
            .map(|z| to_f64(z.re))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// A frame together with the convolution kernels of `L` and `M` on a grid.
#[derive(Debug, Clone)]
pub struct GridFrame<T: Real> {
    pub frame: BcFrame<T>,
    pub grid: Arc<Grid<T>>,
    pub kl: SemigroupKernel<T>,
    pub km: SemigroupKernel<T>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::diag;
    use crate::scalar::cx;

    #[test]
    fn pq_lambda_examples() {
        let a = make_operator(diag(&[cx::<f64>(-1.0, 0.0)])).unwrap();
        let pq = build_pq_lambda(&a, 0.0, cx(-4.0, 0.0)).unwrap();
        assert!((pq.p.matrix()[(0, 0)] - cx(-1.0, 2.0)).norm() < 1e-15);
        assert!((pq.q.matrix()[(0, 0)] - cx(-1.0, -2.0)).norm() < 1e-15);
        assert!((pq.b.matrix()[(0, 0)] - cx(0.0, 4.0)).norm() < 1e-15);
        assert!(matches!(build_pq_lambda(&a, 0.0, cx(0.0, 0.0)), Err(Error::BranchCut { .. })));
        assert!(matches!(build_pq_lambda(&a, 0.0, cx(3.0, 0.0)), Err(Error::BranchCut { .. })));
        let small = build_pq_lambda(&a, 0.0, cx(-1e-12, 0.0)).unwrap();
        assert!(small.b.matrix()[(0, 0)].norm() < 1e-5);

        let a2 = make_operator(diag(&[cx::<f64>(-1.0, 0.0), cx(-4.0, 0.0)])).unwrap();
        let pq = build_pq_lambda(&a2, 1.0, cx(-10.0, 0.0)).unwrap();
        let s = (10.0f64 - 0.25).sqrt();
        let d = pq.p.matrix() - pq.q.matrix();
        assert!((d[(0, 0)] - cx(0.0, 2.0 * s)).norm() < 1e-14);
        assert!((d[(1, 1)] - cx(0.0, 2.0 * s)).norm() < 1e-14);
        assert!((pq.p.matrix()[(1, 1)] - cx(-4.5, s)).norm() < 1e-14);
        assert_eq!(pq.p.matrix(), &(pq.q.matrix() + pq.b.matrix()));
    }

    #[test]
    fn scalar_frame_identities() {
        let p = make_operator(diag(&[cx::<f64>(-1.0, 2.0)])).unwrap();
        let q = make_operator(diag(&[cx::<f64>(-1.0, -2.0)])).unwrap();
        let b = make_operator(p.matrix() - q.matrix()).unwrap();
        let f = assemble_frame(&p, &q, &b, std::f64::consts::PI).unwrap();
        let r = f.residuals();
        assert!(r.l_squared <= 1e-12 && r.m_squared <= 1e-12, "{r:?}");
        assert!(r.max() <= 1e-12, "{r:?}");
        // closed form: L = -sqrt(1 + 2i)
        let l = -csqrt(cx::<f64>(1.0, 2.0));
        assert!((f.l.matrix()[(0, 0)] - l).norm() < 1e-14);
        assert!(f.max_generator_real_part() < 0.0);
    }

    #[test]
    fn degenerate_split_is_rejected() {
        let p = make_operator(diag(&[cx::<f64>(-1.0, 0.0)])).unwrap();
        let b = make_operator(diag(&[cx::<f64>(0.0, 0.0)])).unwrap();
        assert!(matches!(assemble_frame(&p, &p, &b, 1.0), Err(Error::FrameSingular { which: "B", .. })));
    }

    #[test]
    fn long_interval_is_contractive() {
        let p = make_operator(diag(&[cx::<f64>(-2.0, 0.5)])).unwrap();
        let q = make_operator(diag(&[cx::<f64>(-0.5, -0.3)])).unwrap();
        let b = make_operator(p.matrix() - q.matrix()).unwrap();
        let f = assemble_frame(&p, &q, &b, 20.0).unwrap();
        assert!(f.contractive(), "{} {}", f.t_minus_norm, f.t_plus_norm);
    }
}
