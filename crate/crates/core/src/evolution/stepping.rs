use std::f64::consts::PI;
use std::sync::Arc;

use super::contour::{ContourParams, ContourPropagator};
use crate::bvp::{PreparedResolvent, ProblemSpec};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::scalar::{cr, real, to_f64, Cx, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Contour,
    ImplicitEuler,
    CrankNicolson,
}

impl Scheme {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "contour" => Ok(Scheme::Contour),
            "implicit_euler" | "euler" => Ok(Scheme::ImplicitEuler),
            "crank_nicolson" | "cn" => Ok(Scheme::CrankNicolson),
            other => Err(Error::Invalid(format!("unknown scheme '{other}'"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Contour => "contour",
            Scheme::ImplicitEuler => "implicit_euler",
            Scheme::CrankNicolson => "crank_nicolson",
        }
    }
}

/// Right-hand side `f(t)` of the Cauchy problem.
#[derive(Clone)]
pub enum Forcing<T: Real> {
    Zero,
    Constant(GridFunction<T>),
    /// Samples at `t_n = n dt`, `n = 0..=steps`.
    Sampled(Vec<GridFunction<T>>),
    Callable(Arc<dyn Fn(f64) -> GridFunction<T> + Send + Sync>),
}

impl<T: Real> std::fmt::Debug for Forcing<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Forcing::Zero => write!(f, "Zero"),
            Forcing::Constant(_) => write!(f, "Constant"),
            Forcing::Sampled(v) => write!(f, "Sampled({})", v.len()),
            Forcing::Callable(_) => write!(f, "Callable"),
        }
    }
}

impl<T: Real> Forcing<T> {
    fn at(&self, n: usize, t: f64) -> Result<Option<GridFunction<T>>> {
        Ok(match self {
            Forcing::Zero => None,
            Forcing::Constant(g) => Some(g.clone()),
            Forcing::Sampled(v) => Some(
                v.get(n)
                    .cloned()
                    .ok_or_else(|| Error::Invalid(format!("forcing has {} samples, step {n} needs more", v.len())))?,
            ),
            Forcing::Callable(g) => Some(g(t)),
        })
    }
}

#[derive(Debug, Clone)]
pub struct EvolutionSpec<T: Real> {
    /// Operator data; boundary data and forcing of the problem are ignored.
    pub problem: ProblemSpec<T>,
    pub t_final: f64,
    pub dt: f64,
    pub v0: GridFunction<T>,
    pub forcing: Forcing<T>,
    pub scheme: Scheme,
    pub contour: ContourParams,
}

impl<T: Real> EvolutionSpec<T> {
    pub fn new(problem: ProblemSpec<T>, t_final: f64, dt: f64, v0: GridFunction<T>, scheme: Scheme) -> Self {
        EvolutionSpec { problem, t_final, dt, v0, forcing: Forcing::Zero, scheme, contour: ContourParams::default() }
    }

    pub fn with_forcing(mut self, forcing: Forcing<T>) -> Self {
        self.forcing = forcing;
        self
    }

    /// Number of uniform steps (final time divided by `dt`, rounded).
    pub fn steps(&self) -> usize {
        ((self.t_final / self.dt).round() as usize).max(1)
    }

    fn validate(&self) -> Result<()> {
        if !(self.t_final > 0.0) || !(self.dt > 0.0) || !self.t_final.is_finite() {
            return Err(Error::Invalid("evolution needs T_final > 0 and dt > 0".into()));
        }
        if self.dt > self.t_final * (1.0 + 1e-12) {
            return Err(Error::Invalid(format!("dt = {} exceeds T_final = {}", self.dt, self.t_final)));
        }
        let d = self.problem.dim();
        if self.v0.dim() != d || self.v0.len() != self.problem.grid().len() {
            return Err(Error::DimensionMismatch { expected: d * self.problem.grid().len(), got: self.v0.values.len() });
        }
        check_analytic(&self.problem)
    }
}

/// The generated semigroup is analytic only for `theta_A < pi/4`.
pub fn check_analytic<T: Real>(problem: &ProblemSpec<T>) -> Result<()> {
    let theta = problem.theta_a();
    if theta >= PI / 4.0 {
        return Err(Error::NotAnalytic { theta });
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct Trajectory<T: Real> {
    pub times: Vec<f64>,
    pub states: Vec<GridFunction<T>>,
}

fn rejected<T: Real>(lambda: Cx<T>) -> impl Fn(Error) -> Error {
    move |e| {
        Error::StepRejected(format!("resolvent at lambda = {:.6e}{:+.6e}i failed: {e}", to_f64(lambda.re), to_f64(lambda.im)))
    }
}

fn prepared<T: Real>(p: &ProblemSpec<T>, lambda: f64) -> Result<PreparedResolvent<T>> {
    let l = Cx::new(real::<T>(lambda), T::zero());
    PreparedResolvent::new(&p.op_a, p.k, p.family, l, p.grid().clone()).map_err(rejected(l))
}

fn apply<T: Real>(r: &PreparedResolvent<T>, v: &GridFunction<T>) -> Result<GridFunction<T>> {
    r.apply(v).map(|s| s.u).map_err(rejected(r.lambda))
}

pub fn evolve<T: Real>(spec: &EvolutionSpec<T>) -> Result<Trajectory<T>> {
    spec.validate()?;
    let steps = spec.steps();
    let dt = spec.t_final / steps as f64;
    let p = &spec.problem;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push(spec.v0.clone());
    let time = |n: usize| n as f64 * dt;
    match spec.scheme {
        Scheme::ImplicitEuler => {
            // (I - dt A) v_{n+1} = v_n + dt f_{n+1}, i.e. v_{n+1} = R(-1/dt)(v_n + dt f_{n+1}) / dt
            let r = prepared(p, -1.0 / dt)?;
            let inv_dt = cr(real::<T>(1.0 / dt));
            for n in 0..steps {
                let mut rhs = states[n].clone();
                if let Some(f) = spec.forcing.at(n + 1, time(n + 1))? {
                    rhs = rhs.add(&f.scale(cr(real(dt))));
                }
                states.push(apply(&r, &rhs)?.scale(inv_dt));
                times.push(time(n + 1));
            }
        }
        Scheme::CrankNicolson => {
            // S = (I - dt/2 A)^-1 = (2/dt) R(-2/dt); v_{n+1} = 2 S v_n - v_n + (dt/2) S (f_n + f_{n+1})
            let r = prepared(p, -2.0 / dt)?;
            let s_scale = cr(real::<T>(2.0 / dt));
            for n in 0..steps {
                let v = &states[n];
                let mut rhs = v.scale(cr(real(2.0)));
                let f0 = spec.forcing.at(n, time(n))?;
                let f1 = spec.forcing.at(n + 1, time(n + 1))?;
                if let (Some(f0), Some(f1)) = (f0, f1) {
                    rhs = rhs.add(&f0.add(&f1).scale(cr(real(dt / 2.0))));
                }
                let next = apply(&r, &rhs)?.scale(s_scale).sub(v);
                states.push(next);
                times.push(time(n + 1));
            }
        }
        Scheme::Contour => {
            let probe = if to_f64(spec.v0.norm()) > 0.0 {
                spec.v0.clone()
            } else {
                GridFunction::from_fn(p.grid().clone(), p.dim(), |x| {
                    crate::linalg::CVec::<T>::from_element(p.dim(), cr(real::<T>(1.0) + x * x))
                })
            };
            let prop = ContourPropagator::build(p, dt, &probe, &spec.contour)?;
            let forced = !matches!(spec.forcing, Forcing::Zero);
            for n in 0..steps {
                let mut next = prop.apply(&states[n])?;
                if forced {
                    // forcing linear on the step
                    let f0 = spec.forcing.at(n, time(n))?.expect("non-zero forcing");
                    let f1 = spec.forcing.at(n + 1, time(n + 1))?.expect("non-zero forcing");
                    next = next.add(&prop.apply_duhamel(&f0, &f1.sub(&f0))?);
                }
                states.push(next);
                times.push(time(n + 1));
            }
        }
    }
    Ok(Trajectory { times, states })
}
