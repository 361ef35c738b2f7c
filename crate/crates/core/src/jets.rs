//! Truncated bivariate Taylor jets.
//!
//! A [`Jet2`] holds the Taylor coefficients of a scalar field `f(u, v)` around
//! an expansion point, up to a total degree `order`:
//!
//! ```text
//! f(u0 + du, v0 + dv) = Σ_{i+j ≤ order} c[i][j] du^i dv^j + O(|d|^{order+1})
//! ```
//!
//! Coefficients are stored Taylor-normalized, `c[i][j] = ∂^{i+j}f/∂u^i∂v^j / (i! j!)`,
//! so multiplication is a plain truncated convolution. [`Jet2::partial`] rescales on
//! read. Binary operators on jets of different order truncate to the smaller order,
//! which is what happens naturally after differentiating a jet.

use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use thiserror::Error;

/// Largest supported total order.
pub const MAX_ORDER: usize = 8;

/// Smallest order accepted by [`Jet2::seed`]: principal curvatures consume two
/// derivative orders of the immersion, their mixed partials two more.
pub const MIN_SEED_ORDER: usize = 4;

/// Order used throughout the curvature pipeline.
pub const DEFAULT_ORDER: usize = 4;

const CAPACITY: usize = (MAX_ORDER + 1) * (MAX_ORDER + 2) / 2;

const FACTORIAL: [f64; MAX_ORDER + 1] = {
    let mut f = [1.0; MAX_ORDER + 1];
    let mut k = 1;
    while k <= MAX_ORDER {
        f[k] = f[k - 1] * k as f64;
        k += 1;
    }
    f
};

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum JetError {
    #[error("jet order {order} is below the minimum of {MIN_SEED_ORDER}")]
    OrderTooLow { order: usize },
    #[error("jet order {order} exceeds the maximum of {MAX_ORDER}")]
    OrderTooHigh { order: usize },
    #[error("jet orders differ ({left} vs {right})")]
    OrderMismatch { left: usize, right: usize },
    #[error("partial ({i}, {j}) is beyond jet order {order}")]
    IndexBeyondOrder { i: usize, j: usize, order: usize },
    #[error("division by small value {value:e}")]
    DivisionBySmallValue { value: f64 },
    #[error("{op} undefined at {value:e}")]
    DomainError { op: &'static str, value: f64 },
}

/// Which variable a seeded jet represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Seed {
    Constant,
    U,
    V,
}

#[inline]
const fn index(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

/// Number of coefficients of a jet of the given order.
pub const fn coefficient_count(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

#[derive(Clone, Copy, PartialEq)]
pub struct Jet2 {
    order: u8,
    coeffs: [f64; CAPACITY],
}

impl core::fmt::Debug for Jet2 {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Jet2").field("order", &self.order).field("coeffs", &&self.coeffs[..self.len()]).finish()
    }
}

impl Jet2 {
    /// Seeds a constant or coordinate jet. Orders below [`MIN_SEED_ORDER`] are
    /// rejected since they cannot carry the mixed curvature partials.
    pub fn seed(value: f64, which: Seed, order: usize) -> Result<Self, JetError> {
        if order < MIN_SEED_ORDER {
            return Err(JetError::OrderTooLow { order });
        }
        if order > MAX_ORDER {
            return Err(JetError::OrderTooHigh { order });
        }
        Ok(match which {
            Seed::Constant => Self::constant(value, order),
            Seed::U => Self::var_u(value, order),
            Seed::V => Self::var_v(value, order),
        })
    }

    /// Constant jet of any order up to [`MAX_ORDER`].
    ///
    /// # Panics
    /// If `order > MAX_ORDER`.
    pub fn constant(value: f64, order: usize) -> Self {
        assert!(order <= MAX_ORDER, "jet order {order} exceeds {MAX_ORDER}");
        let mut coeffs = [0.0; CAPACITY];
        coeffs[0] = value;
        Self { order: order as u8, coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::constant(0.0, order)
    }

    /// The coordinate `u` expanded at `value`.
    pub fn var_u(value: f64, order: usize) -> Self {
        let mut j = Self::constant(value, order);
        if order >= 1 {
            j.coeffs[index(1, 0)] = 1.0;
        }
        j
    }

    /// The coordinate `v` expanded at `value`.
    pub fn var_v(value: f64, order: usize) -> Self {
        let mut j = Self::constant(value, order);
        if order >= 1 {
            j.coeffs[index(0, 1)] = 1.0;
        }
        j
    }

    /// Builds a jet from Taylor-normalized coefficients listed in storage order
    /// (by total degree, then by the power of `v`).
    pub fn from_coeffs(order: usize, coeffs: &[f64]) -> Result<Self, JetError> {
        if order > MAX_ORDER {
            return Err(JetError::OrderTooHigh { order });
        }
        let n = coefficient_count(order);
        if coeffs.len() != n {
            return Err(JetError::IndexBeyondOrder { i: coeffs.len(), j: 0, order });
        }
        let mut j = Self::zero(order);
        j.coeffs[..n].copy_from_slice(coeffs);
        Ok(j)
    }

    /// Jet of a function of `v` alone from its univariate Taylor coefficients.
    pub fn from_v_series(series: &[f64], order: usize) -> Self {
        let mut j = Self::zero(order);
        for (k, &c) in series.iter().enumerate().take(order + 1) {
            j.coeffs[index(0, k)] = c;
        }
        j
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order as usize
    }

    #[inline]
    fn len(&self) -> usize {
        coefficient_count(self.order())
    }

    /// Coefficients in storage order.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs[..self.len()]
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Taylor-normalized coefficient of `du^i dv^j`; zero beyond the order.
    #[inline]
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i + j > self.order() {
            0.0
        } else {
            self.coeffs[index(i, j)]
        }
    }

    #[inline]
    pub fn set_coeff(&mut self, i: usize, j: usize, value: f64) {
        debug_assert!(i + j <= self.order());
        self.coeffs[index(i, j)] = value;
    }

    /// Mixed partial derivative `∂^{i+j} f / ∂u^i ∂v^j` at the expansion point.
    pub fn partial(&self, i: usize, j: usize) -> Result<f64, JetError> {
        if i + j > self.order() {
            return Err(JetError::IndexBeyondOrder { i, j, order: self.order() });
        }
        Ok(FACTORIAL[i] * FACTORIAL[j] * self.coeffs[index(i, j)])
    }

    /// Univariate Taylor coefficients of the `v`-section through the expansion point.
    pub fn v_series(&self) -> [f64; MAX_ORDER + 1] {
        let mut s = [0.0; MAX_ORDER + 1];
        for (k, c) in s.iter_mut().enumerate().take(self.order() + 1) {
            *c = self.coeffs[index(0, k)];
        }
        s
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order());
        let mut out = Self::zero(order);
        let n = coefficient_count(order);
        out.coeffs[..n].copy_from_slice(&self.coeffs[..n]);
        out
    }

    /// `∂f/∂u` as a jet of one order less.
    ///
    /// # Panics
    /// On an order-0 jet.
    pub fn d_du(&self) -> Self {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        let n = self.order() - 1;
        let mut out = Self::zero(n);
        for d in 0..=n {
            for j in 0..=d {
                let i = d - j;
                out.coeffs[index(i, j)] = (i + 1) as f64 * self.coeffs[index(i + 1, j)];
            }
        }
        out
    }

    /// `∂f/∂v` as a jet of one order less.
    ///
    /// # Panics
    /// On an order-0 jet.
    pub fn d_dv(&self) -> Self {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        let n = self.order() - 1;
        let mut out = Self::zero(n);
        for d in 0..=n {
            for j in 0..=d {
                let i = d - j;
                out.coeffs[index(i, j)] = (j + 1) as f64 * self.coeffs[index(i, j + 1)];
            }
        }
        out
    }

    /// Re-expands the jet in new variables `(s, t)` with `u = a s`, `v = c t`
    /// around the same point: coefficient `(i, j)` picks up `a^i c^j`.
    pub fn scale_variables(&self, a: f64, c: f64) -> Self {
        let mut out = *self;
        let mut ap = [1.0; MAX_ORDER + 1];
        let mut cp = [1.0; MAX_ORDER + 1];
        for k in 1..=MAX_ORDER {
            ap[k] = ap[k - 1] * a;
            cp[k] = cp[k - 1] * c;
        }
        for d in 0..=self.order() {
            for j in 0..=d {
                out.coeffs[index(d - j, j)] *= ap[d - j] * cp[j];
            }
        }
        out
    }

    /// Exchanges the roles of `u` and `v`.
    pub fn swap_variables(&self) -> Self {
        let mut out = Self::zero(self.order());
        for d in 0..=self.order() {
            for j in 0..=d {
                out.coeffs[index(j, d - j)] = self.coeffs[index(d - j, j)];
            }
        }
        out
    }

    /// Applies a univariate function given by its Taylor coefficients at the
    /// jet's value, `series[k] = g^{(k)}(a0) / k!`. Exact under truncation since
    /// the non-constant part is nilpotent.
    pub fn compose(&self, series: &[f64]) -> Self {
        let n = self.order();
        let mut delta = *self;
        delta.coeffs[0] = 0.0;
        let top = n.min(series.len().saturating_sub(1));
        let mut acc = Self::constant(series.get(top).copied().unwrap_or(0.0), n);
        for k in (0..top).rev() {
            acc *= delta;
            acc.coeffs[0] += series[k];
        }
        acc
    }

    fn map_derivatives(&self, derivs: impl Fn(usize) -> f64) -> Self {
        let mut series = [0.0; MAX_ORDER + 1];
        for (k, s) in series.iter_mut().enumerate().take(self.order() + 1) {
            *s = derivs(k) / FACTORIAL[k];
        }
        self.compose(&series[..=self.order()])
    }

    pub fn exp(&self) -> Self {
        let e = libm::exp(self.value());
        self.map_derivatives(|_| e)
    }

    pub fn sin(&self) -> Self {
        let (s, c) = (libm::sin(self.value()), libm::cos(self.value()));
        self.map_derivatives(|k| [s, c, -s, -c][k % 4])
    }

    pub fn cos(&self) -> Self {
        let (s, c) = (libm::sin(self.value()), libm::cos(self.value()));
        self.map_derivatives(|k| [c, -s, -c, s][k % 4])
    }

    pub fn sinh(&self) -> Self {
        let (s, c) = (libm::sinh(self.value()), libm::cosh(self.value()));
        self.map_derivatives(|k| if k % 2 == 0 { s } else { c })
    }

    pub fn cosh(&self) -> Self {
        let (s, c) = (libm::sinh(self.value()), libm::cosh(self.value()));
        self.map_derivatives(|k| if k % 2 == 0 { c } else { s })
    }

    /// Natural logarithm; NaN coefficients outside the domain (see [`Jet2::try_ln`]).
    pub fn ln(&self) -> Self {
        let a = self.value();
        self.map_derivatives(|k| {
            if k == 0 {
                libm::log(a)
            } else {
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * FACTORIAL[k - 1] / libm::pow(a, k as f64)
            }
        })
    }

    /// Real power `f^p`.
    pub fn powf(&self, p: f64) -> Self {
        let a = self.value();
        self.map_derivatives(|k| {
            let mut falling = 1.0;
            for m in 0..k {
                falling *= p - m as f64;
            }
            falling * libm::pow(a, p - k as f64)
        })
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = Self::constant(1.0, self.order());
        for _ in 0..n {
            acc *= *self;
        }
        acc
    }

    /// Square root by recursive coefficient solving of `s·s = f`.
    pub fn sqrt(&self) -> Self {
        let n = self.order();
        let mut s = Self::zero(n);
        let s0 = libm::sqrt(self.value());
        s.coeffs[0] = s0;
        for d in 1..=n {
            for j in 0..=d {
                let i = d - j;
                let mut acc = self.coeffs[index(i, j)];
                for p in 0..=i {
                    for q in 0..=j {
                        if (p == 0 && q == 0) || (p == i && q == j) {
                            continue;
                        }
                        acc -= s.coeffs[index(p, q)] * s.coeffs[index(i - p, j - q)];
                    }
                }
                s.coeffs[index(i, j)] = acc / (2.0 * s0);
            }
        }
        s
    }

    /// `1/f` by recursive coefficient solving of `r·f = 1`.
    pub fn recip(&self) -> Self {
        Self::constant(1.0, self.order()).divide(self)
    }

    fn divide(&self, rhs: &Self) -> Self {
        let n = self.order().min(rhs.order());
        let b0 = rhs.coeffs[0];
        let mut q = Self::zero(n);
        for d in 0..=n {
            for j in 0..=d {
                let i = d - j;
                let mut acc = self.coeffs[index(i, j)];
                for p in 0..=i {
                    for r in 0..=j {
                        if p == 0 && r == 0 {
                            continue;
                        }
                        acc -= rhs.coeffs[index(p, r)] * q.coeffs[index(i - p, j - r)];
                    }
                }
                q.coeffs[index(i, j)] = acc / b0;
            }
        }
        q
    }

    pub fn try_div(&self, rhs: &Self) -> Result<Self, JetError> {
        check_divisor(rhs.value())?;
        Ok(self.divide(rhs))
    }

    pub fn try_sqrt(&self) -> Result<Self, JetError> {
        if !(self.value() > 0.0) {
            return Err(JetError::DomainError { op: "sqrt", value: self.value() });
        }
        Ok(self.sqrt())
    }

    pub fn try_ln(&self) -> Result<Self, JetError> {
        if !(self.value() > 0.0) {
            return Err(JetError::DomainError { op: "log", value: self.value() });
        }
        Ok(self.ln())
    }

    /// Largest coefficient magnitude; handy for tolerance scaling.
    pub fn max_abs(&self) -> f64 {
        self.coeffs().iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs().iter().all(|c| c.is_finite())
    }
}

fn check_divisor(value: f64) -> Result<(), JetError> {
    if value.abs() <= f64::MIN_POSITIVE || !value.is_finite() {
        Err(JetError::DivisionBySmallValue { value })
    } else {
        Ok(())
    }
}

/// Second operand of [`jet_arith`].
#[derive(Debug, Clone, Copy)]
#[allow(clippy::large_enum_variant)]
pub enum Operand {
    Jet(Jet2),
    Real(f64),
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JetOp {
    Add,
    Sub,
    Mul,
    Div,
    Sqrt,
    Sin,
    Cos,
    Sinh,
    Cosh,
    Exp,
    Log,
    Pow,
}

/// Checked jet arithmetic. Binary operations require equal orders; `Pow` takes a
/// real exponent (or a jet exponent via `exp(b ln a)`).
pub fn jet_arith(a: &Jet2, b: Operand, op: JetOp) -> Result<Jet2, JetError> {
    let rhs = match b {
        Operand::Jet(j) => {
            if j.order() != a.order() {
                return Err(JetError::OrderMismatch { left: a.order(), right: j.order() });
            }
            Some(j)
        }
        Operand::Real(x) => Some(Jet2::constant(x, a.order())),
        Operand::None => None,
    };
    let binary = |op: &'static str| rhs.ok_or(JetError::DomainError { op, value: f64::NAN });
    Ok(match op {
        JetOp::Add => *a + binary("add")?,
        JetOp::Sub => *a - binary("sub")?,
        JetOp::Mul => *a * binary("mul")?,
        JetOp::Div => a.try_div(&binary("div")?)?,
        JetOp::Sqrt => a.try_sqrt()?,
        JetOp::Sin => a.sin(),
        JetOp::Cos => a.cos(),
        JetOp::Sinh => a.sinh(),
        JetOp::Cosh => a.cosh(),
        JetOp::Exp => a.exp(),
        JetOp::Log => a.try_ln()?,
        JetOp::Pow => match b {
            Operand::Real(p) => {
                if a.value() <= 0.0 && libm::trunc(p) != p {
                    return Err(JetError::DomainError { op: "pow", value: a.value() });
                }
                if a.value() == 0.0 && p < a.order() as f64 {
                    return Err(JetError::DomainError { op: "pow", value: 0.0 });
                }
                a.powf(p)
            }
            _ => (binary("pow")? * a.try_ln()?).exp(),
        },
    })
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        let n = self.order().min(rhs.order());
        let mut out = Jet2::zero(n);
        for k in 0..coefficient_count(n) {
            out.coeffs[k] = self.coeffs[k] + rhs.coeffs[k];
        }
        out
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        self + (-rhs)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(mut self) -> Jet2 {
        for c in self.coeffs.iter_mut() {
            *c = -*c;
        }
        self
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        let n = self.order().min(rhs.order());
        let mut out = Jet2::zero(n);
        for pa in 0..=n {
            for qa in 0..=(n - pa) {
                let a = self.coeffs[index(pa, qa)];
                if a == 0.0 {
                    continue;
                }
                for pb in 0..=(n - pa - qa) {
                    for qb in 0..=(n - pa - qa - pb) {
                        out.coeffs[index(pa + pb, qa + qb)] += a * rhs.coeffs[index(pb, qb)];
                    }
                }
            }
        }
        out
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    /// Unchecked division (IEEE semantics on a zero divisor); see [`Jet2::try_div`].
    fn div(self, rhs: Jet2) -> Jet2 {
        self.divide(&rhs)
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(mut self, rhs: f64) -> Jet2 {
        self.coeffs[0] += rhs;
        self
    }
}

impl Sub<f64> for Jet2 {
    type Output = Jet2;
    fn sub(mut self, rhs: f64) -> Jet2 {
        self.coeffs[0] -= rhs;
        self
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(mut self, rhs: f64) -> Jet2 {
        for c in self.coeffs.iter_mut() {
            *c *= rhs;
        }
        self
    }
}

impl Div<f64> for Jet2 {
    type Output = Jet2;
    fn div(self, rhs: f64) -> Jet2 {
        self * (1.0 / rhs)
    }
}

impl Add<Jet2> for f64 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        rhs + self
    }
}

impl Sub<Jet2> for f64 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        -rhs + self
    }
}

impl Mul<Jet2> for f64 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        rhs * self
    }
}

impl Div<Jet2> for f64 {
    type Output = Jet2;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet2) -> Jet2 {
        rhs.recip() * self
    }
}

impl AddAssign for Jet2 {
    fn add_assign(&mut self, rhs: Jet2) {
        *self = *self + rhs;
    }
}

impl SubAssign for Jet2 {
    fn sub_assign(&mut self, rhs: Jet2) {
        *self = *self - rhs;
    }
}

impl MulAssign for Jet2 {
    fn mul_assign(&mut self, rhs: Jet2) {
        *self = *self * rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn seed_constant_and_variables() {
        let c = Jet2::seed(2.0, Seed::Constant, 4).unwrap();
        assert_eq!(c.coeffs()[0], 2.0);
        assert!(c.coeffs()[1..].iter().all(|&x| x == 0.0));
        assert_eq!(c.coeffs().len(), 15);

        let u = Jet2::seed(3.0, Seed::U, 4).unwrap();
        assert_eq!(u.coeff(0, 0), 3.0);
        assert_eq!(u.coeff(1, 0), 1.0);
        assert_eq!(u.coeffs().iter().filter(|&&x| x != 0.0).count(), 2);

        let v = Jet2::seed(0.0, Seed::V, 4).unwrap();
        let v2 = v * v;
        for d in 0..=4 {
            for j in 0..=d {
                let expect = if (d - j, j) == (0, 2) { 1.0 } else { 0.0 };
                assert_eq!(v2.coeff(d - j, j), expect);
            }
        }
    }

    #[test]
    fn seed_rejects_low_order() {
        assert_eq!(Jet2::seed(1.0, Seed::U, 3), Err(JetError::OrderTooLow { order: 3 }));
        assert!(matches!(Jet2::seed(1.0, Seed::U, 9), Err(JetError::OrderTooHigh { .. })));
    }

    #[test]
    fn product_and_sqrt_examples() {
        let u = Jet2::var_u(1.0, 4);
        assert_eq!((u * u).partial(1, 0).unwrap(), 2.0);

        let w = Jet2::var_u(0.0, 4) + 1.0;
        let s = (w * w).try_sqrt().unwrap();
        assert!(close(s.partial(1, 0).unwrap(), 1.0, 1e-15));
        assert!(close(s.partial(2, 0).unwrap(), 0.0, 1e-15));
    }

    #[test]
    fn partial_examples() {
        let c = Jet2::seed(5.0, Seed::Constant, 4).unwrap();
        assert_eq!(c.partial(0, 0).unwrap(), 5.0);
        let uv = Jet2::var_u(0.3, 4) * Jet2::var_v(-1.2, 4);
        assert_eq!(uv.partial(1, 1).unwrap(), 1.0);
        assert!(matches!(uv.partial(3, 2), Err(JetError::IndexBeyondOrder { .. })));
    }

    #[test]
    fn cosh_second_partial_matches_central_difference() {
        let v = Jet2::var_v(0.7, 4);
        let h = 1e-3;
        let f = libm::cosh;
        let fd = (f(0.7 + h) - 2.0 * f(0.7) + f(0.7 - h)) / (h * h);
        assert!((v.cosh().partial(0, 2).unwrap() - fd).abs() <= 1e-6);
    }

    #[test]
    fn checked_ops_report_errors() {
        let a = Jet2::var_u(1.0, 4);
        let z = Jet2::zero(4);
        assert!(matches!(jet_arith(&a, Operand::Jet(z), JetOp::Div), Err(JetError::DivisionBySmallValue { .. })));
        assert!(matches!(jet_arith(&(-a), Operand::None, JetOp::Sqrt), Err(JetError::DomainError { op: "sqrt", .. })));
        assert!(matches!(jet_arith(&z, Operand::None, JetOp::Log), Err(JetError::DomainError { op: "log", .. })));
        assert!(matches!(jet_arith(&a, Operand::Jet(Jet2::zero(5)), JetOp::Add), Err(JetError::OrderMismatch { .. })));
    }

    #[test]
    fn division_inverts_multiplication() {
        let u = Jet2::var_u(0.4, 6);
        let v = Jet2::var_v(-0.2, 6);
        let a = (u * v).sin() + 2.0;
        let b = (u - v).exp() + v * v;
        let q = (a * b) / b;
        for (x, y) in q.coeffs().iter().zip(a.coeffs()) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn log_of_exp_is_identity() {
        let u = Jet2::var_u(0.1, 5);
        let v = Jet2::var_v(0.9, 5);
        let f = u * v - v.sin();
        let g = f.exp().ln();
        for (x, y) in g.coeffs().iter().zip(f.coeffs()) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn pow_matches_repeated_product() {
        let f = Jet2::var_u(1.3, 4) + Jet2::var_v(0.2, 4) * 0.5;
        let a = f.powf(3.0);
        let b = f.powi(3);
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_lowers_order() {
        let u = Jet2::var_u(0.5, 4);
        let v = Jet2::var_v(0.25, 4);
        let f = u * u * v;
        let fu = f.d_du();
        assert_eq!(fu.order(), 3);
        assert!(close(fu.value(), 2.0 * 0.5 * 0.25, 1e-15));
        assert!(close(fu.d_dv().value(), 1.0, 1e-15));
    }

    #[test]
    fn swap_and_scale() {
        let f = Jet2::var_u(0.3, 4).sin() * Jet2::var_v(0.1, 4).exp();
        let s = f.swap_variables();
        assert_eq!(s.partial(1, 2).unwrap(), f.partial(2, 1).unwrap());
        let g = f.scale_variables(2.0, -1.0);
        assert!(close(g.partial(2, 1).unwrap(), -4.0 * f.partial(2, 1).unwrap(), 1e-15));
    }
}
