use super::frame::GridFrame;
use super::particular::{check_dims, particular_parts, ParticularParts};
use super::problem::{BcFamily, BoundaryData};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::linalg::{eye, inverse_guarded, CMat, CVec};
use crate::scalar::{cr, real, Real};
use crate::tolerance::CONDITION_CAP;

/// Solution of a steady problem with its first two derivatives.
#[derive(Debug, Clone)]
pub struct BvpSolution<T: Real> {
    pub u: GridFunction<T>,
    pub du: GridFunction<T>,
    pub d2u: GridFunction<T>,
    /// `alpha_1 .. alpha_4` of the exponential representation (none for the
    /// BC1/BC5 path, which is `F_{Phi,f}` alone).
    pub coefficients: Option<[CVec<T>; 4]>,
    /// `F'_{0,f}(a)`, `F'_{0,f}(b)` used by the coefficient systems.
    pub fprime: Option<(CVec<T>, CVec<T>)>,
}

impl<T: Real> BvpSolution<T> {
    fn from_parts(gf: &GridFrame<T>, parts: ParticularParts<T>) -> Self {
        let g = gf.grid.clone();
        BvpSolution {
            u: GridFunction { grid: g.clone(), values: parts.value },
            du: GridFunction { grid: g.clone(), values: parts.d1 },
            d2u: GridFunction { grid: g, values: parts.d2 },
            coefficients: None,
            fprime: None,
        }
    }
}

fn frame_inv<T: Real>(m: &CMat<T>, which: &'static str) -> Result<CMat<T>> {
    inverse_guarded(m, CONDITION_CAP).map(|(inv, _)| inv).map_err(|e| match e {
        Error::NearSpectrum { cond } => Error::FrameSingular { which, cond },
        other => other,
    })
}

/// Adds the four exponential modes weighted by `alpha` to `parts`.
fn with_modes<T: Real>(gf: &GridFrame<T>, mut parts: ParticularParts<T>, alpha: [CVec<T>; 4]) -> BvpSolution<T> {
    let fr = &gf.frame;
    let (m, l) = (fr.m.matrix(), fr.l.matrix());
    let (m2, l2) = (m * m, l * l);
    let ma1 = gf.km.sweep_from_a(&alpha[0]);
    let mb1 = gf.km.sweep_from_b(&alpha[0]);
    let la2 = gf.kl.sweep_from_a(&alpha[1]);
    let lb2 = gf.kl.sweep_from_b(&alpha[1]);
    let ma3 = gf.km.sweep_from_a(&alpha[2]);
    let mb3 = gf.km.sweep_from_b(&alpha[2]);
    let la4 = gf.kl.sweep_from_a(&alpha[3]);
    let lb4 = gf.kl.sweep_from_b(&alpha[3]);
    let (m_odd, m_even) = (&ma1 - &mb1, &ma3 + &mb3);
    let (l_odd, l_even) = (&la2 - &lb2, &la4 + &lb4);
    parts.value += &m_odd + &l_odd + &m_even + &l_even;
    parts.d1 += m * (&ma1 + &mb1) + l * (&la2 + &lb2) + m * (&ma3 - &mb3) + l * (&la4 - &lb4);
    parts.d2 += &m2 * (&m_odd + &m_even) + &l2 * (&l_odd + &l_even);
    let mut s = BvpSolution::from_parts(gf, parts);
    s.coefficients = Some(alpha);
    s
}

fn base<T: Real>(gf: &GridFrame<T>, f: &GridFunction<T>) -> ParticularParts<T> {
    particular_parts(gf, &f.values, &BoundaryData::zeros(gf.frame.dim()))
}

/// `u = phi_1`, `u(b) = phi_2`, `u''(a) = phi_3`, `u''(b) = phi_4`.
pub fn solve_bc1<T: Real>(gf: &GridFrame<T>, f: &GridFunction<T>, phi: &BoundaryData<T>) -> Result<BvpSolution<T>> {
    check_dims(gf, f, phi)?;
    Ok(BvpSolution::from_parts(gf, particular_parts(gf, &f.values, phi)))
}

/// `u = phi_1, phi_2` and `u'' + P u = phi_3, phi_4`, by reduction to BC1.
pub fn solve_bc5<T: Real>(gf: &GridFrame<T>, f: &GridFunction<T>, phi: &BoundaryData<T>) -> Result<BvpSolution<T>> {
    check_dims(gf, f, phi)?;
    let p = gf.frame.p.matrix();
    let reduced = BoundaryData::new(
        phi.phi[0].clone(),
        phi.phi[1].clone(),
        &phi.phi[2] - p * &phi.phi[0],
        &phi.phi[3] - p * &phi.phi[1],
    );
    solve_bc1(gf, f, &reduced)
}

fn tilde<T: Real>(s1: &CVec<T>, s2: &CVec<T>, fa: &CVec<T>, fb: &CVec<T>) -> (CVec<T>, CVec<T>) {
    let half = cr::<T>(real(0.5));
    ((s1 + s2 - fa - fb) * half, (s1 - s2 - fa + fb) * half)
}

/// `u' = phi_1, phi_2` and `u'' + P u = phi_3, phi_4`.
pub fn solve_bc2<T: Real>(gf: &GridFrame<T>, f: &GridFunction<T>, phi: &BoundaryData<T>) -> Result<BvpSolution<T>> {
    check_dims(gf, f, phi)?;
    let fr = &gf.frame;
    let id = eye::<T>(fr.dim());
    let half = cr::<T>(real(0.5));
    let l = fr.l.matrix();
    let inv_1m_ecl = frame_inv(&(&id - &fr.ecl), "I - e^{cL}")?;
    let inv_1p_ecl = frame_inv(&(&id + &fr.ecl), "I + e^{cL}")?;
    let inv_1m_ecm = frame_inv(&(&id - &fr.ecm), "I - e^{cM}")?;
    let inv_1p_ecm = frame_inv(&(&id + &fr.ecm), "I + e^{cM}")?;
    let parts = base(gf, f);
    let (fa, fb) = (parts.fprime_a(), parts.fprime_b());
    let (t1, t2) = tilde(&phi.phi[0], &phi.phi[1], &fa, &fb);
    let a2 = &inv_1m_ecl * &fr.b_inv * (&phi.phi[2] - &phi.phi[3]) * half;
    let a4 = &inv_1p_ecl * &fr.b_inv * (&phi.phi[2] + &phi.phi[3]) * half;
    let a1 = &inv_1p_ecm * (&fr.m_inv * &t1 - (&id + &fr.ecl) * l * &fr.m_inv * &a2);
    let a3 = &inv_1m_ecm * (&fr.m_inv * &t2 - (&id - &fr.ecl) * l * &fr.m_inv * &a4);
    let mut s = with_modes(gf, parts, [a1, a2, a3, a4]);
    s.fprime = Some((fa, fb));
    Ok(s)
}

/// `u = phi_1, phi_2` and `u' = phi_3, phi_4`.
pub fn solve_bc3<T: Real>(gf: &GridFrame<T>, f: &GridFunction<T>, phi: &BoundaryData<T>) -> Result<BvpSolution<T>> {
    check_dims(gf, f, phi)?;
    let fr = &gf.frame;
    fr.require_uv()?;
    let (u_inv, v_inv) = (fr.u_inv.as_ref().unwrap(), fr.v_inv.as_ref().unwrap());
    let id = eye::<T>(fr.dim());
    let half = cr::<T>(real(0.5));
    let two = cr::<T>(real(2.0));
    let (l, m) = (fr.l.matrix(), fr.m.matrix());
    let pre = &fr.b_inv * (l + m) * half;
    let parts = base(gf, f);
    let (fa, fb) = (parts.fprime_a(), parts.fprime_b());
    let (t1, t2) = tilde(&phi.phi[2], &phi.phi[3], &fa, &fb);
    let dif = &phi.phi[0] - &phi.phi[1];
    let sum = &phi.phi[0] + &phi.phi[1];
    let a1 = &pre * u_inv * (l * (&id + &fr.ecl) * &dif - (&id - &fr.ecl) * &t1 * two);
    let a2 = -(&pre * u_inv * (m * (&id + &fr.ecm) * &dif - (&id - &fr.ecm) * &t1 * two));
    let a3 = &pre * v_inv * (l * (&id - &fr.ecl) * &sum - (&id + &fr.ecl) * &t2 * two);
    let a4 = -(&pre * v_inv * (m * (&id - &fr.ecm) * &sum - (&id + &fr.ecm) * &t2 * two));
    let mut s = with_modes(gf, parts, [a1, a2, a3, a4]);
    s.fprime = Some((fa, fb));
    Ok(s)
}

/// `u' = phi_1, phi_2` and `u'' = phi_3, phi_4`.
pub fn solve_bc4<T: Real>(gf: &GridFrame<T>, f: &GridFunction<T>, phi: &BoundaryData<T>) -> Result<BvpSolution<T>> {
    check_dims(gf, f, phi)?;
    let fr = &gf.frame;
    fr.require_uv()?;
    let (u_inv, v_inv) = (fr.u_inv.as_ref().unwrap(), fr.v_inv.as_ref().unwrap());
    let id = eye::<T>(fr.dim());
    let half = cr::<T>(real(0.5));
    let two = cr::<T>(real(2.0));
    let (l, m) = (fr.l.matrix(), fr.m.matrix());
    let (li, mi) = (&fr.l_inv, &fr.m_inv);
    let pre = &fr.b_inv * (l + m) * half;
    let parts = base(gf, f);
    let (fa, fb) = (parts.fprime_a(), parts.fprime_b());
    let (t1, t2) = tilde(&phi.phi[0], &phi.phi[1], &fa, &fb);
    let dif = &phi.phi[2] - &phi.phi[3];
    let sum = &phi.phi[2] + &phi.phi[3];
    let a1 = &pre * v_inv * ((&id - &fr.ecl) * l * mi * &t1 * two - (&id + &fr.ecl) * mi * &dif);
    let a2 = -(&pre * v_inv * ((&id - &fr.ecm) * m * li * &t1 * two - (&id + &fr.ecm) * li * &dif));
    let a3 = &pre * u_inv * ((&id + &fr.ecl) * l * mi * &t2 * two - (&id - &fr.ecl) * mi * &sum);
    let a4 = -(&pre * u_inv * ((&id + &fr.ecm) * m * li * &t2 * two - (&id - &fr.ecm) * li * &sum));
    let mut s = with_modes(gf, parts, [a1, a2, a3, a4]);
    s.fprime = Some((fa, fb));
    Ok(s)
}

pub fn solve<T: Real>(
    family: BcFamily,
    gf: &GridFrame<T>,
    f: &GridFunction<T>,
    phi: &BoundaryData<T>,
) -> Result<BvpSolution<T>> {
    match family {
        BcFamily::Bc1 => solve_bc1(gf, f, phi),
        BcFamily::Bc2 => solve_bc2(gf, f, phi),
        BcFamily::Bc3 => solve_bc3(gf, f, phi),
        BcFamily::Bc4 => solve_bc4(gf, f, phi),
        BcFamily::Bc5 => solve_bc5(gf, f, phi),
    }
}

/// Boundary residuals of a steady solution against its family's four
/// conditions (absolute values, max over components).
pub fn boundary_residuals<T: Real>(
    family: BcFamily,
    gf: &GridFrame<T>,
    sol: &BvpSolution<T>,
    phi: &BoundaryData<T>,
) -> [f64; 4] {
    let p = gf.frame.p.matrix();
    let (u, du, d2u) = (&sol.u, &sol.du, &sol.d2u);
    let ends = |g: &GridFunction<T>| (g.first(), g.last());
    let (ua, ub) = ends(u);
    let (da, db) = ends(du);
    let (sa, sb) = ends(d2u);
    let q = match family {
        BcFamily::Bc1 => [ua, ub, sa, sb],
        BcFamily::Bc2 => [da, db, &sa + p * &ua, &sb + p * &ub],
        BcFamily::Bc3 => [ua, ub, da, db],
        BcFamily::Bc4 => [da, db, sa, sb],
        BcFamily::Bc5 => [ua.clone(), ub.clone(), &sa + p * &ua, &sb + p * &ub],
    };
    let mut out = [0.0; 4];
    for i in 0..4 {
        out[i] = crate::scalar::to_f64((&q[i] - &phi.phi[i]).camax());
    }
    out
}
