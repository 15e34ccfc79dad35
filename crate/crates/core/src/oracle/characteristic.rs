//! Closed-form scalar oracle built on the characteristic roots
//! `xi^2 = -P`, `xi^2 = -Q` of `xi^4 + (P+Q) xi^2 + PQ`.

use std::sync::Arc;

use crate::bvp::BcFamily;
use crate::error::{Error, Result};
use crate::grid::gauss_legendre;
use crate::linalg::{inverse_guarded, CMat, CVec};
use crate::scalar::{cabs, cexp, cone, cr, csqrt, czero, real, to_f64, Cx, Real};

/// Scalar forcing for the oracle.
#[derive(Clone)]
pub enum ScalarForcing<T: Real> {
    /// `sum_k coef_k x^k plus sum_m amp_m e^{rate_m x}`, solved by
    /// undetermined coefficients.
    ExpPoly { poly: Vec<Cx<T>>, exps: Vec<(Cx<T>, Cx<T>)> },
    /// Arbitrary smooth forcing, solved by a Duhamel integral.
    General(Arc<dyn Fn(T) -> Cx<T> + Send + Sync>),
}

impl<T: Real> std::fmt::Debug for ScalarForcing<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScalarForcing::ExpPoly { poly, exps } => {
                f.debug_struct("ExpPoly").field("poly", poly).field("exps", exps).finish()
            }
            ScalarForcing::General(_) => f.write_str("General(..)"),
        }
    }
}

impl<T: Real> ScalarForcing<T> {
    pub fn zero() -> Self {
        ScalarForcing::ExpPoly { poly: vec![], exps: vec![] }
    }

    pub fn eval(&self, x: T) -> Cx<T> {
        match self {
            ScalarForcing::ExpPoly { poly, exps } => {
                let mut s = czero::<T>();
                for c in poly.iter().rev() {
                    s = s * cr(x) + *c;
                }
                for (amp, rate) in exps {
                    s += *amp * cexp(*rate * cr(x));
                }
                s
            }
            ScalarForcing::General(f) => f(x),
        }
    }
}

/// Scalar steady problem for the oracle.
#[derive(Debug, Clone)]
pub struct ScalarProblem<T: Real> {
    pub p: Cx<T>,
    pub q: Cx<T>,
    pub a: T,
    pub b: T,
    pub family: BcFamily,
    /// Operator in the `u'' + beta u` conditions of BC2/BC5.
    pub beta: Cx<T>,
    pub phi: [Cx<T>; 4],
    pub forcing: ScalarForcing<T>,
}

#[derive(Debug, Clone)]
enum Particular<T: Real> {
    /// Polynomial coefficients and `(amp / p(rate), rate)` pairs.
    ExpPoly { poly: Vec<Cx<T>>, exps: Vec<(Cx<T>, Cx<T>)> },
    General,
}

/// Evaluable closed-form solution.
#[derive(Debug, Clone)]
pub struct CharacteristicSolution<T: Real> {
    pub roots: [Cx<T>; 4],
    /// Coefficients of `e^{xi_j (x - anchor_j)}`.
    pub coeffs: [Cx<T>; 4],
    anchors: [T; 4],
    /// `1 / p'(xi_j)`: partial-fraction weights of the Green kernel.
    residues: [Cx<T>; 4],
    particular: Particular<T>,
    forcing: ScalarForcing<T>,
    a: T,
    b: T,
    panels: usize,
}

fn poly_derivative<T: Real>(c: &[Cx<T>]) -> Vec<Cx<T>> {
    c.iter().enumerate().skip(1).map(|(k, v)| *v * cr(real::<T>(k as f64))).collect()
}

fn poly_eval<T: Real>(c: &[Cx<T>], x: T) -> Cx<T> {
    let mut s = czero::<T>();
    for v in c.iter().rev() {
        s = s * cr(x) + *v;
    }
    s
}

impl<T: Real> CharacteristicSolution<T> {
    /// `d^m u / dx^m (x)` for `m <= 3`.
    pub fn eval(&self, x: T, m: usize) -> Cx<T> {
        let mut s = self.particular_eval(x, m);
        for j in 0..4 {
            let xi = self.roots[j];
            s += self.coeffs[j] * xi.powu(m as u32) * cexp(xi * cr(x - self.anchors[j]));
        }
        s
    }

    fn particular_eval(&self, x: T, m: usize) -> Cx<T> {
        match &self.particular {
            Particular::ExpPoly { poly, exps } => {
                let mut d = poly.clone();
                for _ in 0..m {
                    d = poly_derivative(&d);
                }
                let mut s = poly_eval(&d, x);
                for (amp, rate) in exps {
                    s += *amp * rate.powu(m as u32) * cexp(*rate * cr(x));
                }
                s
            }
            Particular::General => {
                let mut s = czero::<T>();
                for j in 0..4 {
                    let xi = self.roots[j];
                    s += self.residues[j] * xi.powu(m as u32) * self.duhamel(xi, x);
                }
                s
            }
        }
    }

    /// `int_a^x e^{xi (x-s)} f(s) ds` for decaying `xi`, otherwise
    /// `-int_x^b e^{xi (x-s)} f(s) ds`; either is a particular solution of
    /// `y' = xi y + f`.
    fn duhamel(&self, xi: Cx<T>, x: T) -> Cx<T> {
        let (lo, hi, sign) = if xi.re <= T::zero() { (self.a, x, T::one()) } else { (x, self.b, -T::one()) };
        if !(hi > lo) {
            return czero();
        }
        let (gx, gw) = gauss_legendre(12);
        let frac = to_f64((hi - lo) / (self.b - self.a));
        let m = ((self.panels as f64 * frac).ceil() as usize).max(1);
        let h = (hi - lo) / real(m as f64);
        let mut s = czero::<T>();
        for p in 0..m {
            let p0 = lo + h * real(p as f64);
            for q in 0..gx.len() {
                let t = p0 + h * real((gx[q] + 1.0) / 2.0);
                let w = h * real(gw[q] / 2.0);
                s += cexp(xi * cr(x - t)) * self.forcing.eval(t) * cr(w);
            }
        }
        s * cr(sign)
    }
}

/// Solves the scalar problem by characteristic roots.
pub fn characteristic_root_solve<T: Real>(prob: &ScalarProblem<T>) -> Result<CharacteristicSolution<T>> {
    let (p, q) = (prob.p, prob.q);
    let scale = cabs(p) + cabs(q) + T::one();
    if to_f64(cabs(p - q)) <= 1e-12 * to_f64(scale) {
        return Err(Error::DegenerateRoots);
    }
    let sp = csqrt(-p);
    let sq = csqrt(-q);
    let roots = [sp, -sp, sq, -sq];
    if roots.iter().any(|r| to_f64(cabs(*r)) == 0.0) {
        return Err(Error::DegenerateRoots);
    }
    let (a, b) = (prob.a, prob.b);
    let mut anchors = [a; 4];
    for j in 0..4 {
        if roots[j].re > T::zero() {
            anchors[j] = b;
        }
    }
    let poly_p = |z: Cx<T>| (z * z + p) * (z * z + q);
    let dpoly = |z: Cx<T>| {
        let z2 = z * z;
        z * (z2 + q) * cr(real::<T>(2.0)) + z * (z2 + p) * cr(real::<T>(2.0))
    };
    let residues = [cone::<T>() / dpoly(roots[0]), cone::<T>() / dpoly(roots[1]), cone::<T>() / dpoly(roots[2]), cone::<T>() / dpoly(roots[3])];
    let particular = match &prob.forcing {
        ScalarForcing::ExpPoly { poly, exps } => {
            let deg = poly.len();
            let mut qc = vec![czero::<T>(); deg];
            let pq = p * q;
            let s1 = p + q;
            for k in (0..deg).rev() {
                let mut rhs = poly[k];
                if k + 2 < deg {
                    rhs -= s1 * cr(real::<T>(((k + 2) * (k + 1)) as f64)) * qc[k + 2];
                }
                if k + 4 < deg {
                    rhs -= cr(real::<T>(((k + 4) * (k + 3) * (k + 2) * (k + 1)) as f64)) * qc[k + 4];
                }
                qc[k] = rhs / pq;
            }
            let mut e = Vec::with_capacity(exps.len());
            for (amp, rate) in exps {
                let d = poly_p(*rate);
                if to_f64(cabs(d)) <= 1e-10 * to_f64(scale * scale) {
                    return Err(Error::Invalid("exponential forcing resonates with a characteristic root".into()));
                }
                e.push((*amp / d, *rate));
            }
            Particular::ExpPoly { poly: qc, exps: e }
        }
        ScalarForcing::General(_) => Particular::General,
    };
    let rho = roots.iter().map(|r| to_f64(cabs(*r))).fold(0.0, f64::max);
    let c = to_f64(b - a);
    let mut sol = CharacteristicSolution {
        roots,
        coeffs: [czero(); 4],
        anchors,
        residues,
        particular,
        forcing: prob.forcing.clone(),
        a,
        b,
        panels: ((rho * c * 2.0).ceil() as usize).max(64),
    };
    // boundary functionals: (derivative order, endpoint, add beta * u)
    let rows: [(usize, bool, bool); 4] = match prob.family {
        BcFamily::Bc1 => [(0, false, false), (0, true, false), (2, false, false), (2, true, false)],
        BcFamily::Bc2 => [(1, false, false), (1, true, false), (2, false, true), (2, true, true)],
        BcFamily::Bc3 => [(0, false, false), (0, true, false), (1, false, false), (1, true, false)],
        BcFamily::Bc4 => [(1, false, false), (1, true, false), (2, false, false), (2, true, false)],
        BcFamily::Bc5 => [(0, false, false), (0, true, false), (2, false, true), (2, true, true)],
    };
    let mut sys = CMat::<T>::zeros(4, 4);
    let mut rhs = CMat::<T>::zeros(4, 1);
    for (r, &(m, at_b, add_beta)) in rows.iter().enumerate() {
        let x = if at_b { b } else { a };
        for j in 0..4 {
            let xi = roots[j];
            let e = cexp(xi * cr(x - anchors[j]));
            let mut v = xi.powu(m as u32) * e;
            if add_beta {
                v += prob.beta * e;
            }
            sys[(r, j)] = v;
        }
        let mut up = sol.particular_eval(x, m);
        if add_beta {
            up += prob.beta * sol.particular_eval(x, 0);
        }
        rhs[(r, 0)] = prob.phi[r] - up;
    }
    let (inv, _) = inverse_guarded(&sys, 1e14).map_err(|_| Error::SingularSystem { cond: f64::INFINITY })?;
    let k = inv * rhs;
    for j in 0..4 {
        sol.coeffs[j] = k[(j, 0)];
    }
    Ok(sol)
}

/// Samples `u^{(m)}` at the given points.
pub fn sample<T: Real>(sol: &CharacteristicSolution<T>, xs: &[T], m: usize) -> CVec<T> {
    CVec::<T>::from_iterator(xs.len(), xs.iter().map(|&x| sol.eval(x, m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    fn base(family: BcFamily) -> ScalarProblem<f64> {
        ScalarProblem {
            p: cx(-1.0, 2.0),
            q: cx(-1.0, -2.0),
            a: 0.0,
            b: std::f64::consts::PI,
            family,
            beta: cx(-1.0, 2.0),
            phi: [cx(0.0, 0.0); 4],
            forcing: ScalarForcing::zero(),
        }
    }

    #[test]
    fn zero_data_gives_zero() {
        let s = characteristic_root_solve(&base(BcFamily::Bc3)).unwrap();
        for &x in &[0.0, 1.0, 3.0] {
            assert!(s.eval(x, 0).norm() < 1e-15);
        }
    }

    #[test]
    fn dirichlet_value_is_reproduced() {
        let mut p = base(BcFamily::Bc1);
        p.phi[0] = cx(1.0, 0.0);
        let s = characteristic_root_solve(&p).unwrap();
        assert!((s.eval(0.0, 0) - cx(1.0, 0.0)).norm() < 1e-12);
        assert!(s.eval(std::f64::consts::PI, 0).norm() < 1e-12);
        assert!(s.eval(0.0, 2).norm() < 1e-12);
    }

    #[test]
    fn particular_routes_agree() {
        // f = x^2 + e^{0.3 x} by undetermined coefficients and by Duhamel
        for family in BcFamily::ALL {
            let mut p = base(family);
            p.phi = [cx(0.3, -0.1), cx(-0.2, 0.5), cx(1.0, 0.0), cx(0.0, 0.7)];
            p.forcing = ScalarForcing::ExpPoly {
                poly: vec![cx(0.0, 0.0), cx(0.0, 0.0), cx(1.0, 0.0)],
                exps: vec![(cx(1.0, 0.0), cx(0.3, 0.0))],
            };
            let s1 = characteristic_root_solve(&p).unwrap();
            p.forcing = ScalarForcing::General(Arc::new(|x: f64| cx(x * x + (0.3 * x).exp(), 0.0)));
            let s2 = characteristic_root_solve(&p).unwrap();
            for i in 0..=20 {
                let x = std::f64::consts::PI * i as f64 / 20.0;
                for m in 0..=3 {
                    assert!((s1.eval(x, m) - s2.eval(x, m)).norm() < 1e-10, "{family:?} {x} {m}");
                }
            }
        }
    }

    #[test]
    fn degenerate_roots_rejected() {
        let mut p = base(BcFamily::Bc1);
        p.q = p.p;
        assert_eq!(characteristic_root_solve(&p).unwrap_err(), Error::DegenerateRoots);
    }
}
