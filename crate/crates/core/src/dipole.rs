//! Dipole-moment estimates produced by the different extraction routes.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::vector::Vector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Kelvin,
    Tail,
    Energy,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Kelvin => "kelvin",
            Method::Tail => "tail",
            Method::Energy => "energy",
        })
    }
}

/// A dipole moment `a` with the route that produced it.
///
/// `a` is horizontal by construction. The Kelvin route also fits a vertical
/// component; it is kept in `vertical_fit` so callers can check it is zero.
/// `transverse_known` is false when only the component along `c` is
/// determined (the energy route in three dimensions).
#[derive(Clone, Debug, PartialEq)]
pub struct DipoleEstimate {
    pub a: Vector,
    pub method: Method,
    pub uncertainty: f64,
    pub vertical_fit: f64,
    pub transverse_known: bool,
}

impl DipoleEstimate {
    /// Builds an estimate, zeroing the vertical component of `raw` and
    /// recording it separately.
    pub fn new(raw: Vector, method: Method, uncertainty: f64) -> Self {
        let mut a = raw;
        let vertical_fit = raw.vertical_part();
        let n = a.dim();
        a[n - 1] = 0.0;
        DipoleEstimate {
            a,
            method,
            uncertainty: uncertainty.abs(),
            vertical_fit,
            transverse_known: true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertical_part_is_split_off() {
        let e = DipoleEstimate::new(Vector::new2(-1.0, 1e-3), Method::Kelvin, -0.5);
        assert_eq!(e.a.as_slice(), &[-1.0, 0.0]);
        assert_eq!(e.vertical_fit, 1e-3);
        assert_eq!(e.uncertainty, 0.5);
        assert_eq!(Method::Energy.to_string(), "energy");
    }
}
