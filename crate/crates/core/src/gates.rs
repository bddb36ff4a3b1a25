//! Small dense matrices: gate definitions, measurement projectors and Kraus
//! operators before they are lifted into decision diagrams.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;

use crate::error::{DdError, Result};

const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Dense row-major `2×2` or `4×4` complex matrix.
#[derive(Clone, PartialEq)]
pub struct Gate {
    dim: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gate{}x{}[", self.dim, self.dim)?;
        for r in 0..self.dim {
            if r > 0 {
                write!(f, "; ")?;
            }
            for col in 0..self.dim {
                let v = self.get(r, col);
                write!(f, "{}{:+}i ", v.re, v.im)?;
            }
        }
        write!(f, "]")
    }
}

impl Gate {
    /// Builds from row-major entries; 4 entries give a 2×2, 16 a 4×4 matrix.
    pub fn new(data: Vec<Complex64>) -> Result<Gate> {
        let dim = match data.len() {
            4 => 2,
            16 => 4,
            got => return Err(DdError::BadGateShape { expected: 2, got }),
        };
        if let Some(v) = data.iter().find(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(DdError::NonFinite { re: v.re, im: v.im });
        }
        Ok(Gate { dim, data })
    }

    pub fn from_2x2(m: [[Complex64; 2]; 2]) -> Gate {
        Gate {
            dim: 2,
            data: m.iter().flatten().copied().collect(),
        }
    }

    pub fn from_4x4(m: [[Complex64; 4]; 4]) -> Gate {
        Gate {
            dim: 4,
            data: m.iter().flatten().copied().collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of qubits the matrix acts on.
    pub fn arity(&self) -> usize {
        if self.dim == 2 {
            1
        } else {
            2
        }
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn scaled(&self, f: Complex64) -> Gate {
        Gate {
            dim: self.dim,
            data: self.data.iter().map(|v| v * f).collect(),
        }
    }

    pub fn adjoint(&self) -> Gate {
        let d = self.dim;
        let mut data = vec![c(0.0, 0.0); d * d];
        for r in 0..d {
            for col in 0..d {
                data[col * d + r] = self.get(r, col).conj();
            }
        }
        Gate { dim: d, data }
    }

    pub fn matmul(&self, other: &Gate) -> Gate {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut data = vec![c(0.0, 0.0); d * d];
        for r in 0..d {
            for col in 0..d {
                data[r * d + col] = (0..d).map(|k| self.get(r, k) * other.get(k, col)).sum();
            }
        }
        Gate { dim: d, data }
    }

    pub fn identity_of(dim: usize) -> Gate {
        let mut data = vec![c(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = c(1.0, 0.0);
        }
        Gate { dim, data }
    }

    /// Largest entrywise deviation from another matrix of the same size.
    pub fn max_deviation(&self, other: &Gate) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.adjoint()
            .matmul(self)
            .max_deviation(&Gate::identity_of(self.dim))
            <= tol
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| *v == c(0.0, 0.0))
    }

    // ---- standard gates ---------------------------------------------------

    pub fn i() -> Gate {
        Gate::identity_of(2)
    }

    pub fn x() -> Gate {
        Gate::from_2x2([[c(0., 0.), c(1., 0.)], [c(1., 0.), c(0., 0.)]])
    }

    pub fn y() -> Gate {
        Gate::from_2x2([[c(0., 0.), c(0., -1.)], [c(0., 1.), c(0., 0.)]])
    }

    pub fn z() -> Gate {
        Gate::from_2x2([[c(1., 0.), c(0., 0.)], [c(0., 0.), c(-1., 0.)]])
    }

    pub fn h() -> Gate {
        let s = FRAC_1_SQRT_2;
        Gate::from_2x2([[c(s, 0.), c(s, 0.)], [c(s, 0.), c(-s, 0.)]])
    }

    pub fn s() -> Gate {
        Gate::phase(std::f64::consts::FRAC_PI_2)
    }

    pub fn sdg() -> Gate {
        Gate::phase(-std::f64::consts::FRAC_PI_2)
    }

    pub fn t() -> Gate {
        Gate::phase(std::f64::consts::FRAC_PI_4)
    }

    pub fn tdg() -> Gate {
        Gate::phase(-std::f64::consts::FRAC_PI_4)
    }

    /// `diag(1, e^{iθ})`.
    pub fn phase(theta: f64) -> Gate {
        Gate::from_2x2([
            [c(1., 0.), c(0., 0.)],
            [c(0., 0.), phase_factor(theta)],
        ])
    }

    pub fn rx(theta: f64) -> Gate {
        let (s, co) = (theta / 2.0).sin_cos();
        Gate::from_2x2([[c(co, 0.), c(0., -s)], [c(0., -s), c(co, 0.)]])
    }

    pub fn ry(theta: f64) -> Gate {
        let (s, co) = (theta / 2.0).sin_cos();
        Gate::from_2x2([[c(co, 0.), c(-s, 0.)], [c(s, 0.), c(co, 0.)]])
    }

    /// `diag(e^{−iθ/2}, e^{iθ/2})`.
    pub fn rz(theta: f64) -> Gate {
        Gate::from_2x2([
            [phase_factor(-theta / 2.0), c(0., 0.)],
            [c(0., 0.), phase_factor(theta / 2.0)],
        ])
    }

    pub fn swap() -> Gate {
        let o = c(0., 0.);
        let l = c(1., 0.);
        Gate::from_4x4([[l, o, o, o], [o, o, l, o], [o, l, o, o], [o, o, o, l]])
    }

    /// Projector onto `|0⟩`.
    pub fn m0() -> Gate {
        Gate::from_2x2([[c(1., 0.), c(0., 0.)], [c(0., 0.), c(0., 0.)]])
    }

    /// Projector onto `|1⟩`.
    pub fn m1() -> Gate {
        Gate::from_2x2([[c(0., 0.), c(0., 0.)], [c(0., 0.), c(1., 0.)]])
    }
}

/// `e^{iθ}` with exact values at multiples of π/2.
pub fn phase_factor(theta: f64) -> Complex64 {
    let (s, co) = theta.sin_cos();
    let snap = |v: f64| {
        if v.abs() < 1e-15 {
            0.0
        } else if (v.abs() - 1.0).abs() < 1e-15 {
            v.signum()
        } else {
            v
        }
    };
    c(snap(co), snap(s))
}
