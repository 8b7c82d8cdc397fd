//! Small fixed-capacity vectors for points and directions in 1, 2 or 3
//! dimensions. The vertical direction is always the last coordinate.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq)]
pub struct Vector {
    data: [f64; 3],
    dim: usize,
}

/// Points and vectors share a representation.
pub type Point = Vector;

impl Vector {
    pub fn zeros(dim: usize) -> Self {
        assert!((1..=3).contains(&dim), "vector dimension must be 1..=3");
        Vector {
            data: [0.0; 3],
            dim,
        }
    }

    pub fn from_slice(v: &[f64]) -> Self {
        let mut out = Vector::zeros(v.len());
        out.data[..v.len()].copy_from_slice(v);
        out
    }

    pub fn new2(x: f64, y: f64) -> Self {
        Vector {
            data: [x, y, 0.0],
            dim: 2,
        }
    }

    pub fn new3(x: f64, y: f64, z: f64) -> Self {
        Vector {
            data: [x, y, z],
            dim: 3,
        }
    }

    /// Unit vector along axis `i`.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Vector::zeros(dim);
        v.data[i] = 1.0;
        v
    }

    /// Upward unit vector `e_y` (last coordinate).
    pub fn vertical(dim: usize) -> Self {
        Vector::unit(dim, dim - 1)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data[..self.dim]
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        self.as_slice()
            .iter()
            .zip(other.as_slice())
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.as_slice().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Vertical (last) component.
    pub fn vertical_part(&self) -> f64 {
        self.data[self.dim - 1]
    }

    /// Horizontal components `x'` as a vector of dimension `dim - 1`.
    pub fn horizontal(&self) -> Vector {
        Vector::from_slice(&self.data[..self.dim - 1])
    }

    /// Builds `(x', y)` from a horizontal vector and a vertical coordinate.
    pub fn from_horizontal(h: &Vector, y: f64) -> Vector {
        let mut v = Vector::zeros(h.dim + 1);
        v.data[..h.dim].copy_from_slice(h.as_slice());
        v.data[h.dim] = y;
        v
    }

    /// Cross product for 3-vectors.
    pub fn cross(&self, o: &Vector) -> Vector {
        assert!(self.dim == 3 && o.dim == 3);
        let [a1, a2, a3] = self.data;
        let [b1, b2, b3] = o.data;
        Vector::new3(a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1)
    }

    /// Planar cross product `u_1 v_2 - u_2 v_1` for 2-vectors.
    pub fn cross2(&self, o: &Vector) -> f64 {
        assert!(self.dim == 2 && o.dim == 2);
        self.data[0] * o.data[1] - self.data[1] * o.data[0]
    }

    pub fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected,
                found: self.dim,
            })
        }
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.as_slice()).finish()
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        assert!(i < self.dim);
        &self.data[i]
    }
}

impl IndexMut<usize> for Vector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        assert!(i < self.dim);
        &mut self.data[i]
    }
}

impl Add for Vector {
    type Output = Vector;
    fn add(mut self, o: Vector) -> Vector {
        debug_assert_eq!(self.dim, o.dim);
        for i in 0..3 {
            self.data[i] += o.data[i];
        }
        self
    }
}

impl AddAssign for Vector {
    fn add_assign(&mut self, o: Vector) {
        *self = *self + o;
    }
}

impl Sub for Vector {
    type Output = Vector;
    fn sub(mut self, o: Vector) -> Vector {
        debug_assert_eq!(self.dim, o.dim);
        for i in 0..3 {
            self.data[i] -= o.data[i];
        }
        self
    }
}

impl Neg for Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        self * -1.0
    }
}

impl Mul<f64> for Vector {
    type Output = Vector;
    fn mul(mut self, s: f64) -> Vector {
        for v in self.data.iter_mut() {
            *v *= s;
        }
        self
    }
}

impl Mul<Vector> for f64 {
    type Output = Vector;
    fn mul(self, v: Vector) -> Vector {
        v * self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horizontal_roundtrip() {
        let v = Vector::new3(1.0, 2.0, -3.0);
        let h = v.horizontal();
        assert_eq!(h.as_slice(), &[1.0, 2.0]);
        assert_eq!(Vector::from_horizontal(&h, -3.0), v);
    }

    #[test]
    fn cross_products() {
        let a = Vector::new3(1.0, 0.0, 0.0);
        let ey = Vector::vertical(3);
        assert_eq!(a.cross(&ey).as_slice(), &[0.0, -1.0, 0.0]);
        assert_eq!(Vector::new2(1.0, 0.0).cross2(&Vector::vertical(2)), 1.0);
    }
}
