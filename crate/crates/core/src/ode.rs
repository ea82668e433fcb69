//! Classical fourth-order Runge–Kutta for autonomous systems.

use nalgebra::SVector;
use num_complex::Complex64;

pub(crate) trait OdeState: Clone {
    /// `self + a * x`
    fn axpy(&self, a: f64, x: &Self) -> Self;
}

impl OdeState for f64 {
    fn axpy(&self, a: f64, x: &Self) -> Self {
        self + a * x
    }
}

impl<const N: usize> OdeState for SVector<Complex64, N> {
    fn axpy(&self, a: f64, x: &Self) -> Self {
        self + x * Complex64::new(a, 0.0)
    }
}

pub(crate) fn rk4_step<S, F>(y: &S, h: f64, f: &F) -> S
where
    S: OdeState,
    F: Fn(&S) -> S,
{
    let k1 = f(y);
    let k2 = f(&y.axpy(h / 2.0, &k1));
    let k3 = f(&y.axpy(h / 2.0, &k2));
    let k4 = f(&y.axpy(h, &k3));
    y.axpy(h / 6.0, &k1)
        .axpy(h / 3.0, &k2)
        .axpy(h / 3.0, &k3)
        .axpy(h / 6.0, &k4)
}
