use crate::scalar::{cabs, carg, ci, csqrt, real, to_f64, Cx, Real};
use crate::tolerance::CUT_MARGIN;
use std::f64::consts::PI;

/// Position of `lambda` relative to the sector `-k^2/4 + S_{2 theta_A}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    InsideSector,
    OutsideSector,
    Vertex,
}

impl Region {
    pub fn tag(self) -> &'static str {
        match self {
            Region::InsideSector => "INSIDE_SECTOR",
            Region::OutsideSector => "OUTSIDE_SECTOR",
            Region::Vertex => "VERTEX",
        }
    }
}

fn is_vertex<T: Real>(lambda: Cx<T>, k: T) -> bool {
    let v = to_f64(k * k) / 4.0;
    let shifted = to_f64(cabs(lambda + Cx::new(real::<T>(v), T::zero())));
    shifted <= CUT_MARGIN * (1.0 + v)
}

/// Classification through the argument of `w = -lambda - k^2/4`:
/// outside iff `|arg w + pi| < 2(pi - theta_A)` and `|arg w - pi| < 2(pi - theta_A)`.
pub fn classify_lambda<T: Real>(lambda: Cx<T>, k: T, theta_a: f64) -> Region {
    if is_vertex(lambda, k) {
        return Region::Vertex;
    }
    let w = -lambda - Cx::new(k * k / real(4.0), T::zero());
    let arg = to_f64(carg(w));
    let bound = 2.0 * (PI - theta_a);
    if (arg + PI).abs() < bound && (arg - PI).abs() < bound {
        Region::OutsideSector
    } else {
        Region::InsideSector
    }
}

/// Classification by direct membership: outside iff
/// `|arg(lambda + k^2/4)| > 2 theta_A`.
pub fn classify_direct<T: Real>(lambda: Cx<T>, k: T, theta_a: f64) -> Region {
    if is_vertex(lambda, k) {
        return Region::Vertex;
    }
    let z = lambda + Cx::new(k * k / real(4.0), T::zero());
    if to_f64(carg(z)).abs() > 2.0 * theta_a {
        Region::OutsideSector
    } else {
        Region::InsideSector
    }
}

/// Angles attached to `-P_lambda` and `-Q_lambda`.
#[derive(Debug, Clone, Copy)]
pub struct AngleCheck {
    /// `max(theta_A, |arg w + pi| / 2)`
    pub theta1: f64,
    /// `max(theta_A, |arg w - pi| / 2)`
    pub theta2: f64,
    /// `|arg(i sqrt w)|` and `|arg(-i sqrt w)|`, measured on the complex numbers.
    pub shift_args: [f64; 2],
    /// `theta_A + |arg(+-i sqrt w)| < pi` for both signs.
    pub parabolic: bool,
}

pub fn lemma45_angle_check<T: Real>(lambda: Cx<T>, k: T, theta_a: f64) -> AngleCheck {
    let w = -lambda - Cx::new(k * k / real(4.0), T::zero());
    let arg = to_f64(carg(w));
    let theta1 = theta_a.max((arg + PI).abs() / 2.0);
    let theta2 = theta_a.max((arg - PI).abs() / 2.0);
    let r = csqrt(w);
    let plus = to_f64(carg(ci::<T>() * r)).abs();
    let minus = to_f64(carg(-(ci::<T>() * r))).abs();
    let parabolic = theta_a + plus < PI && theta_a + minus < PI;
    AngleCheck { theta1, theta2, shift_args: [plus, minus], parabolic }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    #[test]
    fn examples() {
        assert_eq!(classify_lambda(cx(-1.0, 0.0), 0.0, 0.0), Region::OutsideSector);
        assert_eq!(classify_lambda(cx(1.0, 0.0), 0.0, 0.0), Region::InsideSector);
        assert_eq!(classify_lambda(cx(-1.0, 0.0), 2.0, 0.0), Region::Vertex);
        assert_eq!(classify_direct(cx(-1.0, 0.0), 2.0, 0.3), Region::Vertex);
    }

    #[test]
    fn angles_on_negative_axis() {
        let c = lemma45_angle_check(cx(-3.0, 0.0), 1.0, 0.0);
        assert!((c.theta1 - PI / 2.0).abs() < 1e-15);
        assert!((c.theta2 - PI / 2.0).abs() < 1e-15);
        assert!(c.parabolic);
    }

    #[test]
    fn formula_matches_measured_shift_angles() {
        for &(re, im) in &[(-2.0, 0.5), (-0.1, -3.0), (4.0, 0.2), (1.0, -1e-3)] {
            let c = lemma45_angle_check(cx::<f64>(re, im), 0.7, 0.1);
            let w = cx::<f64>(-re - 0.49 / 4.0, -im);
            let arg = w.arg();
            assert!((c.shift_args[0] - (arg + PI).abs() / 2.0).abs() < 1e-14);
            assert!((c.shift_args[1] - (arg - PI).abs() / 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn near_boundary_direction() {
        let theta_a = 0.2;
        let vertex = cx::<f64>(-0.25, 0.0);
        let inside = lemma45_angle_check(vertex + Cx::from_polar(1.0, PI - 0.01), 1.0, theta_a);
        assert!(inside.parabolic);
        // arg(lambda + k^2/4) close to 2 theta_A: |arg w + pi| close to 2(pi - theta_A)
        let edge = lemma45_angle_check(vertex + Cx::from_polar(1.0, 2.0 * theta_a + 1e-9), 1.0, theta_a);
        assert!(edge.theta1.max(edge.theta2) > PI - theta_a - 1e-8);
        let past = lemma45_angle_check(vertex + Cx::from_polar(1.0, 2.0 * theta_a - 1e-3), 1.0, theta_a);
        assert!(!past.parabolic);
    }
}
