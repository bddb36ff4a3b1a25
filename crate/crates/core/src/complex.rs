//! Tolerance-based interning of complex edge weights.
//!
//! Every weight stored in a decision diagram is routed through a
//! [`ComplexTable`]. Real and imaginary parts are interned separately: a value
//! is snapped to an already-stored real within the tolerance if one exists,
//! otherwise it becomes a new representative. Afterwards weights can be
//! compared and hashed bit-for-bit, which is what the unique table relies on.

use std::hash::{Hash, Hasher};

use num_complex::Complex64;
use rustc_hash::FxHashMap;

use crate::error::{DdError, Result};

/// Default componentwise tolerance for weight identity.
pub const DEFAULT_TOLERANCE: f64 = 1e-13;

/// An interned complex number.
///
/// Values are only produced by [`ComplexTable::intern`] (or the two
/// pre-interned constants), so bitwise equality is canonical equality.
#[derive(Clone, Copy, Debug)]
pub struct CanonicalComplex(Complex64);

impl CanonicalComplex {
    pub const ZERO: CanonicalComplex = CanonicalComplex(Complex64::new(0.0, 0.0));
    pub const ONE: CanonicalComplex = CanonicalComplex(Complex64::new(1.0, 0.0));

    #[inline]
    pub fn value(self) -> Complex64 {
        self.0
    }

    #[inline]
    pub fn re(self) -> f64 {
        self.0.re
    }

    #[inline]
    pub fn im(self) -> f64 {
        self.0.im
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0.re == 0.0 && self.0.im == 0.0
    }

    #[inline]
    pub fn is_one(self) -> bool {
        self.0.re == 1.0 && self.0.im == 0.0
    }

    #[inline]
    pub(crate) fn bits(self) -> (u64, u64) {
        (self.0.re.to_bits(), self.0.im.to_bits())
    }
}

impl PartialEq for CanonicalComplex {
    fn eq(&self, other: &Self) -> bool {
        self.bits() == other.bits()
    }
}

impl Eq for CanonicalComplex {}

impl Hash for CanonicalComplex {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.bits().hash(state);
    }
}

/// Interning table for the real components of edge weights.
#[derive(Debug, Clone)]
pub struct ComplexTable {
    tolerance: f64,
    buckets: FxHashMap<i64, Vec<f64>>,
    len: usize,
}

impl ComplexTable {
    pub fn new(tolerance: f64) -> Self {
        assert!(tolerance > 0.0 && tolerance.is_finite());
        let mut table = ComplexTable {
            tolerance,
            buckets: FxHashMap::default(),
            len: 0,
        };
        // 0 and ±1 are exact representatives; everything close snaps to them.
        for v in [0.0, 1.0, -1.0] {
            table.insert_new(v);
        }
        table
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Number of distinct real representatives stored.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    fn bucket(&self, x: f64) -> i64 {
        // `as` saturates for huge magnitudes, which only merges far-away buckets.
        (x / self.tolerance).floor() as i64
    }

    fn insert_new(&mut self, x: f64) {
        let b = self.bucket(x);
        self.buckets.entry(b).or_default().push(x);
        self.len += 1;
    }

    fn lookup(&self, x: f64) -> Option<f64> {
        let b = self.bucket(x);
        let mut best: Option<f64> = None;
        for k in [b, b.saturating_sub(1), b.saturating_add(1)] {
            if let Some(vals) = self.buckets.get(&k) {
                for &v in vals {
                    let d = (v - x).abs();
                    if d <= self.tolerance && best.is_none_or(|bv| d < (bv - x).abs()) {
                        best = Some(v);
                    }
                }
            }
        }
        best
    }

    fn intern_real(&mut self, x: f64) -> f64 {
        if x.abs() <= self.tolerance {
            return 0.0;
        }
        if let Some(v) = self.lookup(x) {
            return v;
        }
        self.insert_new(x);
        x
    }

    /// Interns a complex value; errors on NaN or infinities.
    pub fn intern(&mut self, re: f64, im: f64) -> Result<CanonicalComplex> {
        if !re.is_finite() || !im.is_finite() {
            return Err(DdError::NonFinite { re, im });
        }
        Ok(self.intern_value(Complex64::new(re, im)))
    }

    /// Interns a value already known to be finite.
    #[inline]
    pub(crate) fn intern_value(&mut self, c: Complex64) -> CanonicalComplex {
        debug_assert!(c.re.is_finite() && c.im.is_finite(), "non-finite weight {c}");
        let re = self.intern_real(c.re);
        let im = self.intern_real(c.im);
        // collapse -0.0 so that bit equality holds
        CanonicalComplex(Complex64::new(re + 0.0, im + 0.0))
    }

    /// True when `c` lies within tolerance of zero in both components.
    #[inline]
    pub fn approx_zero(&self, c: Complex64) -> bool {
        c.re.abs() <= self.tolerance && c.im.abs() <= self.tolerance
    }

    /// Drops all representatives except the exact constants.
    pub fn clear(&mut self) {
        *self = ComplexTable::new(self.tolerance);
    }
}

impl Default for ComplexTable {
    fn default() -> Self {
        ComplexTable::new(DEFAULT_TOLERANCE)
    }
}
