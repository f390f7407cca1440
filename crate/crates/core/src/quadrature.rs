//! Adaptive Gauss–Kronrod (7/15) quadrature on intervals and rectangles.

use std::cell::Cell;
use std::collections::BinaryHeap;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("quadrature did not converge: estimate {estimate:e}, error {error:e} after {intervals} intervals")]
pub struct QuadratureError {
    pub estimate: f64,
    pub error: f64,
    pub intervals: usize,
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

const MAX_INTERVALS: usize = 4000;

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    abs_value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Piece {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    let mut abs = fc.abs() * WGK[7];
    for j in 0..7 {
        let x = h * XGK[j];
        let (f1, f2) = (f(c - x), f(c + x));
        k += WGK[j] * (f1 + f2);
        abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            g += WG[j / 2] * (f1 + f2);
        }
    }
    Piece {
        a,
        b,
        value: k * h,
        abs_value: abs * h.abs(),
        error: ((k - g) * h).abs(),
    }
}

/// `∫_a^b f` to relative tolerance `rel_tol` (relative to `∫|f|`, so
/// integrals that cancel to zero still converge).
pub fn integrate(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
) -> Result<f64, QuadratureError> {
    let mut heap = BinaryHeap::new();
    let first = kronrod(&f, a, b);
    let (mut value, mut abs_value, mut error) = (first.value, first.abs_value, first.error);
    heap.push(first);
    while error > rel_tol * abs_value.max(f64::MIN_POSITIVE) && error > 1e-300 {
        if heap.len() >= MAX_INTERVALS {
            return Err(QuadratureError {
                estimate: value,
                error,
                intervals: heap.len(),
            });
        }
        let worst = heap.pop().expect("non-empty");
        let m = 0.5 * (worst.a + worst.b);
        let left = kronrod(&f, worst.a, m);
        let right = kronrod(&f, m, worst.b);
        value += left.value + right.value - worst.value;
        abs_value += left.abs_value + right.abs_value - worst.abs_value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum to shed the drift of the running updates.
    let total = heap.iter().map(|p| p.value).sum();
    Ok(total)
}

/// `∫_{a0}^{b0} ∫_{a1}^{b1} f(x, y) dy dx` by nested adaptive rules.
pub fn integrate_2d(
    f: impl Fn(f64, f64) -> f64,
    (a0, b0): (f64, f64),
    (a1, b1): (f64, f64),
    rel_tol: f64,
) -> Result<f64, QuadratureError> {
    let inner_err: Cell<Option<QuadratureError>> = Cell::new(None);
    let outer = integrate(
        |x| match integrate(|y| f(x, y), a1, b1, 0.1 * rel_tol) {
            Ok(v) => v,
            Err(e) => {
                inner_err.set(Some(e));
                f64::NAN
            }
        },
        a0,
        b0,
        rel_tol,
    );
    if let Some(e) = inner_err.take() {
        return Err(e);
    }
    outer
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomials_and_trig() {
        let v = integrate(|x| x * x, 0.0, 3.0, 1e-12).unwrap();
        assert!((v - 9.0).abs() < 1e-12);
        let v = integrate(|x| x.sin().powi(2), 0.0, 2.0 * PI, 1e-12).unwrap();
        assert!((v - PI).abs() < 1e-12);
        let v = integrate(|x| x.cos(), 0.0, 2.0 * PI, 1e-10).unwrap();
        assert!(v.abs() < 1e-10);
    }

    #[test]
    fn rectangle() {
        let v = integrate_2d(|x, y| x * y * y, (0.0, 1.0), (0.0, 2.0), 1e-10).unwrap();
        assert!((v - 4.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn sqrt_singularity_converges() {
        let v = integrate(|x: f64| x.sqrt(), 0.0, 1.0, 1e-9).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-9);
    }
}
