//! Classical fourth-order Runge–Kutta step for small fixed-size systems.

#[inline]
pub(crate) fn step<const N: usize, F>(rhs: &F, x: f64, y: [f64; N], h: f64) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let k1 = rhs(x, &y);
    let k2 = rhs(x + 0.5 * h, &axpy(y, 0.5 * h, &k1));
    let k3 = rhs(x + 0.5 * h, &axpy(y, 0.5 * h, &k2));
    let k4 = rhs(x + h, &axpy(y, h, &k3));
    let mut out = y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

#[inline]
fn axpy<const N: usize>(mut y: [f64; N], a: f64, k: &[f64; N]) -> [f64; N] {
    for i in 0..N {
        y[i] += a * k[i];
    }
    y
}
