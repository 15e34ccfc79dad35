//! Matrix exponential by Pade scaling and squaring (degrees 3 to 13).

use crate::linalg::{eye, norm1, CMat};
use crate::scalar::{cr, real, to_f64, Real};

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA13: f64 = 5.371920351148152;

fn pade_low<T: Real>(a: &CMat<T>, b: &[f64]) -> (CMat<T>, CMat<T>) {
    let n = a.nrows();
    let id = eye::<T>(n);
    let a2 = a * a;
    let mut u = &id * cr::<T>(real(b[1]));
    let mut v = &id * cr::<T>(real(b[0]));
    let mut pow = id.clone();
    let m = b.len() - 1;
    let mut k = 1;
    while 2 * k + 1 <= m {
        pow = &pow * &a2;
        u += &pow * cr::<T>(real(b[2 * k + 1]));
        v += &pow * cr::<T>(real(b[2 * k]));
        k += 1;
    }
    (a * u, v)
}

fn pade13<T: Real>(a: &CMat<T>) -> (CMat<T>, CMat<T>) {
    let n = a.nrows();
    let id = eye::<T>(n);
    let b = |i: usize| cr::<T>(real(B13[i]));
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = &a6 * b(13) + &a4 * b(11) + &a2 * b(9);
    let u = a * (&a6 * inner_u + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &id * b(1));
    let inner_v = &a6 * b(12) + &a4 * b(10) + &a2 * b(8);
    let v = &a6 * inner_v + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &id * b(0);
    (u, v)
}

/// `exp(A)` for a general dense complex matrix.
pub fn expm<T: Real>(a: &CMat<T>) -> CMat<T> {
    let n = a.nrows();
    if n == 0 {
        return a.clone();
    }
    let nrm = to_f64(norm1(a));
    for (m, theta) in THETA {
        if nrm <= theta {
            let b: &[f64] = match m {
                3 => &B3,
                5 => &B5,
                7 => &B7,
                _ => &B9,
            };
            let (u, v) = pade_low(a, b);
            return solve_pade(&u, &v);
        }
    }
    let s = if nrm > THETA13 { (nrm / THETA13).log2().ceil().max(0.0) as i32 } else { 0 };
    let scale = real::<T>(2f64.powi(-s));
    let scaled = a * cr(scale);
    let (u, v) = pade13(&scaled);
    let mut r = solve_pade(&u, &v);
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

fn solve_pade<T: Real>(u: &CMat<T>, v: &CMat<T>) -> CMat<T> {
    let p = v + u;
    let q = v - u;
    q.lu().solve(&p).expect("Pade denominator is nonsingular for scaled arguments")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag, fro};
    use crate::scalar::cx;

    #[test]
    fn diagonal_exponential() {
        let d = diag(&[cx::<f64>(-1.0, 0.0), cx(0.5, 2.0)]);
        let e = expm(&d);
        assert!((e[(0, 0)] - cx(-1.0f64, 0.0).exp()).norm() < 1e-15);
        assert!((e[(1, 1)] - cx(0.5f64, 2.0).exp()).norm() < 1e-14);
        assert!(e[(0, 1)].norm() < 1e-16);
    }

    #[test]
    fn nilpotent_block() {
        // exp([[0,t],[0,0]]) = [[1,t],[0,1]]
        for &t in &[1e-3, 0.7, 40.0] {
            let a = CMat::<f64>::from_row_slice(2, 2, &[cx(0.0, 0.0), cx(t, 0.0), cx(0.0, 0.0), cx(0.0, 0.0)]);
            let e = expm(&a);
            assert!((e[(0, 1)] - cx(t, 0.0)).norm() < 1e-13 * t.max(1.0));
            assert!((e[(0, 0)] - cx(1.0, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn rotation_generator() {
        let th = 3.0;
        let a = CMat::<f64>::from_row_slice(2, 2, &[cx(0.0, 0.0), cx(-th, 0.0), cx(th, 0.0), cx(0.0, 0.0)]);
        let e = expm(&a);
        let expect = CMat::<f64>::from_row_slice(
            2,
            2,
            &[cx(th.cos(), 0.0), cx(-th.sin(), 0.0), cx(th.sin(), 0.0), cx(th.cos(), 0.0)],
        );
        assert!(fro(&(e - expect)) < 1e-14);
    }
}
