//! Gauss–Legendre rules and their tensor products over parameter rectangles.

use alloc::vec::Vec;

use crate::grid::Domain;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// nodes ascending. Newton iteration on the three-term recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = alloc::vec![0.0; n];
    let mut weights = alloc::vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Tensor Gauss–Legendre rule on a rectangle.
#[derive(Debug, Clone)]
pub struct TensorRule {
    pub u_nodes: Vec<f64>,
    pub u_weights: Vec<f64>,
    pub v_nodes: Vec<f64>,
    pub v_weights: Vec<f64>,
}

impl TensorRule {
    pub fn new(domain: &Domain, nu: usize, nv: usize) -> Self {
        let (un, uw) = map_rule(gauss_legendre(nu), domain.u0, domain.u1);
        let (vn, vw) = map_rule(gauss_legendre(nv), domain.v0, domain.v1);
        Self { u_nodes: un, u_weights: uw, v_nodes: vn, v_weights: vw }
    }

    /// Nodes with their weights, `v` outer.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.v_nodes
            .iter()
            .zip(&self.v_weights)
            .flat_map(move |(&v, &wv)| self.u_nodes.iter().zip(&self.u_weights).map(move |(&u, &wu)| (u, v, wu * wv)))
    }

    pub fn integrate<E>(&self, mut f: impl FnMut(f64, f64) -> Result<f64, E>) -> Result<f64, E> {
        let mut total = 0.0;
        for (u, v, w) in self.points() {
            total += w * f(u, v)?;
        }
        Ok(total)
    }
}

/// Composite Gauss–Legendre integral of `f` over `[a, b]` split into
/// `pieces` equal panels of `n` nodes each.
pub fn integrate_1d<E>(a: f64, b: f64, pieces: usize, n: usize, mut f: impl FnMut(f64) -> Result<f64, E>) -> Result<f64, E> {
    let (x, w) = gauss_legendre(n);
    let pieces = pieces.max(1);
    let width = (b - a) / pieces as f64;
    let mut total = 0.0;
    for p in 0..pieces {
        let lo = a + p as f64 * width;
        let (nodes, weights) = map_rule((x.clone(), w.clone()), lo, lo + width);
        for (t, wt) in nodes.into_iter().zip(weights) {
            total += wt * f(t)?;
        }
    }
    Ok(total)
}

fn map_rule((nodes, weights): (Vec<f64>, Vec<f64>), a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    (nodes.iter().map(|x| mid + half * x).collect(), weights.iter().map(|w| half * w).collect())
}
