//! Planar points, dyadic scales and small vector helpers.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest supported scale exponent; `delta >= 2^-20`.
pub const MAX_SCALE_EXPONENT: u32 = 20;

/// Dyadic resolution `delta = 2^-m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Scale {
    m: u32,
}

impl Scale {
    pub fn new(m: u32) -> Result<Self> {
        if m == 0 || m > MAX_SCALE_EXPONENT {
            return Err(Error::InvalidScale(m));
        }
        Ok(Self { m })
    }

    pub fn m(self) -> u32 {
        self.m
    }

    /// `2^-m`, exact in both `f32` and `f64`.
    pub fn delta<T: Real>(self) -> T {
        T::lit(self.delta_f64())
    }

    pub fn delta_f64(self) -> f64 {
        (-(self.m as f64)).exp2()
    }

    /// `delta^p` computed as `2^(-m p)`.
    pub fn delta_pow(self, p: f64) -> f64 {
        (-(self.m as f64) * p).exp2()
    }

    /// `log2(1/delta) = m`; every logarithm in the crate is base 2.
    pub fn log_inv_delta(self) -> f64 {
        self.m as f64
    }

    /// Number of grid cells `2^m` of length `delta` in `[0, 1)`.
    pub fn cells(self) -> u64 {
        1u64 << self.m
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Point2<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Self) -> T {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the planar cross product.
    pub fn cross(self, other: Self) -> T {
        self.x * other.y - self.y * other.x
    }

    pub fn norm_sq(self) -> T {
        self.dot(self)
    }

    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    pub fn dist_sq(self, other: Self) -> T {
        (self - other).norm_sq()
    }

    pub fn dist(self, other: Self) -> T {
        (self - other).norm()
    }

    /// Counter-clockwise rotation by a quarter turn.
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    pub fn rotate(self, angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    /// Lexicographic order on `(x, y)`; NaN-free inputs assumed.
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        self.x
            .partial_cmp(&other.x)
            .unwrap_or(Ordering::Equal)
            .then(self.y.partial_cmp(&other.y).unwrap_or(Ordering::Equal))
    }

    /// δ-grid cell containing the point.
    pub fn cell(self, delta: T) -> (i64, i64) {
        (self.x.cell(delta), self.y.cell(delta))
    }

    pub fn to_f64(self) -> [f64; 2] {
        [self.x.to_f64_lossy(), self.y.to_f64_lossy()]
    }
}

impl<T: Real> Add for Point2<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl<T: Real> Sub for Point2<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl<T: Real> Neg for Point2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

impl<T: Real> Mul<T> for Point2<T> {
    type Output = Self;
    fn mul(self, rhs: T) -> Self {
        Self::new(self.x * rhs, self.y * rhs)
    }
}
