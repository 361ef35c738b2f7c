//! Parameter rectangles and uniform sample grids.

use alloc::format;

use crate::error::Error;

/// Slack used when testing domain membership, relative to the domain size.
const DOMAIN_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub u0: f64,
    pub u1: f64,
    pub v0: f64,
    pub v1: f64,
}

impl Domain {
    pub fn new(u0: f64, u1: f64, v0: f64, v1: f64) -> Result<Self, Error> {
        let finite = [u0, u1, v0, v1].iter().all(|x| x.is_finite());
        if !finite || u1 < u0 || v1 < v0 {
            return Err(Error::InvalidDomain(format!("[{u0}, {u1}] x [{v0}, {v1}]")));
        }
        Ok(Self { u0, u1, v0, v1 })
    }

    pub fn width(&self) -> f64 {
        self.u1 - self.u0
    }

    pub fn height(&self) -> f64 {
        self.v1 - self.v0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        let su = DOMAIN_SLACK * (1.0 + self.u0.abs().max(self.u1.abs()));
        let sv = DOMAIN_SLACK * (1.0 + self.v0.abs().max(self.v1.abs()));
        u >= self.u0 - su && u <= self.u1 + su && v >= self.v0 - sv && v <= self.v1 + sv
    }

    /// Maps `(s, t) ∈ [0,1]²` affinely onto the domain.
    pub fn from_unit(&self, s: f64, t: f64) -> (f64, f64) {
        (self.u0 + s * self.width(), self.v0 + t * self.height())
    }

    pub fn center(&self) -> (f64, f64) {
        self.from_unit(0.5, 0.5)
    }
}

/// Uniform `nx × ny` sample grid including the domain corners.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub domain: Domain,
}

impl Grid {
    pub fn new(nx: usize, ny: usize, domain: Domain) -> Self {
        Self { nx, ny, domain }
    }

    fn coordinate(k: usize, n: usize, a: f64, b: f64) -> f64 {
        if n <= 1 {
            0.5 * (a + b)
        } else {
            a + (b - a) * k as f64 / (n - 1) as f64
        }
    }

    pub fn u(&self, i: usize) -> f64 {
        Self::coordinate(i, self.nx, self.domain.u0, self.domain.u1)
    }

    pub fn v(&self, j: usize) -> f64 {
        Self::coordinate(j, self.ny, self.domain.v0, self.domain.v1)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid points in row-major order (`v` outer, `u` inner) as `(i, j, u, v)`.
    pub fn points(&self) -> impl Iterator<Item = (usize, usize, f64, f64)> + '_ {
        (0..self.ny).flat_map(move |j| (0..self.nx).map(move |i| (i, j, self.u(i), self.v(j))))
    }
}
