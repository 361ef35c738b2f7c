//! Adaptive Dormand–Prince 5(4) integration and Taylor-series lifting of
//! autonomous ODE solutions to jets.

use alloc::vec::Vec;

use crate::error::Error;
use crate::jets::Jet2;

/// Default absolute/relative tolerance of [`integrate`].
pub const ODE_TOL: f64 = 1e-12;

const MAX_STEPS: usize = 200_000;

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

/// Integrates `y' = f(t, y)` from `t0` to `t1` (either direction), returning
/// every accepted step `(t, y)` including both endpoints.
pub fn integrate<const N: usize>(
    mut f: impl FnMut(f64, &[f64; N]) -> Result<[f64; N], Error>,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    tol: f64,
) -> Result<Vec<(f64, [f64; N])>, Error> {
    let mut out = Vec::new();
    out.push((t0, y0));
    if t1 == t0 {
        return Ok(out);
    }
    let dir = if t1 > t0 { 1.0 } else { -1.0 };
    let span = (t1 - t0).abs();
    let mut t = t0;
    let mut y = y0;
    let mut h = (span / 64.0).min(0.05);
    let mut k = [[0.0; N]; 7];
    k[0] = f(t, &y)?;
    for _ in 0..MAX_STEPS {
        let remaining = (t1 - t) * dir;
        if remaining <= 1e-15 * span.max(1.0) {
            return Ok(out);
        }
        let step = h.min(remaining);
        for s in 1..7 {
            let mut ys = y;
            for (i, yi) in ys.iter_mut().enumerate() {
                for r in 0..s {
                    *yi += dir * step * A[s][r] * k[r][i];
                }
            }
            k[s] = f(t + dir * step * C[s], &ys)?;
        }
        let mut y5 = y;
        let mut err: f64 = 0.0;
        for i in 0..N {
            let mut d5 = 0.0;
            let mut d4 = 0.0;
            for s in 0..7 {
                d5 += B5[s] * k[s][i];
                d4 += B4[s] * k[s][i];
            }
            y5[i] += dir * step * d5;
            let sc = tol * (1.0 + y[i].abs().max(y5[i].abs()));
            err = err.max((step * (d5 - d4)).abs() / sc);
        }
        if !err.is_finite() {
            return Err(Error::OdeFailure { t, reason: "non-finite state" });
        }
        if err <= 1.0 {
            t = if step == remaining { t1 } else { t + dir * step };
            y = y5;
            // first-same-as-last: the seventh stage is f at the new point
            k[0] = k[6];
            out.push((t, y));
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * libm::pow(err, -0.2)).clamp(0.2, 5.0) };
        h = step * factor;
        if h < 1e-14 * span.max(1.0) {
            return Err(Error::OdeFailure { t, reason: "step size underflow" });
        }
    }
    Err(Error::OdeFailure { t, reason: "too many steps" })
}

/// Final state of [`integrate`].
pub fn solve<const N: usize>(
    f: impl FnMut(f64, &[f64; N]) -> Result<[f64; N], Error>,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    tol: f64,
) -> Result<[f64; N], Error> {
    let path = integrate(f, t0, y0, t1, tol)?;
    Ok(path[path.len() - 1].1)
}

/// Taylor expansion in `v` of the solution of the autonomous system `y' = F(y)`
/// through `y0`, obtained by matching coefficients: `y_{k+1} = F(y)_k / (k + 1)`.
/// `field` receives `v`-series jets and must return jets of at least the same order.
pub fn taylor_lift<const N: usize>(y0: [f64; N], order: usize, field: impl Fn(&[Jet2; N]) -> [Jet2; N]) -> [Jet2; N] {
    let mut y: [Jet2; N] = core::array::from_fn(|i| Jet2::constant(y0[i], order));
    for k in 0..order {
        let fy = field(&y);
        for i in 0..N {
            let c = fy[i].coeff(0, k) / (k + 1) as f64;
            y[i].set_coeff(0, k + 1, c);
        }
    }
    y
}
