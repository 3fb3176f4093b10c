//! Metric signatures and the scalar-field tag.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::GaError;

/// Hard cap on total dimension; keeps the dense table at 4096 coefficients.
pub const MAX_DIM: usize = 12;

/// The signature (p, q, r) of a Clifford algebra Cl(p,q,r): counts of basis
/// vectors squaring to +1, -1 and 0 respectively.
///
/// Basis vectors are addressed by bit position. Degenerate (null) vectors
/// occupy the lowest bits, so in Cl(p,q,1) bit 0 is the null vector `e0`.
/// The positive-square vectors come next, then the negative ones. Display
/// labels match PGA convention: with r = 1 the label equals the bit index
/// (`e0`, `e1`, ...); with r = 0 labels are 1-based (`e1` is bit 0).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    p: u8,
    q: u8,
    r: u8,
}

impl Signature {
    pub fn new(p: usize, q: usize, r: usize) -> Result<Self, GaError> {
        if p + q + r > MAX_DIM {
            return Err(GaError::InvalidSignature(p, q, r));
        }
        Ok(Self {
            p: p as u8,
            q: q as u8,
            r: r as u8,
        })
    }

    /// Euclidean Cl(d,0,0).
    pub fn euclidean(d: usize) -> Result<Self, GaError> {
        Self::new(d, 0, 0)
    }

    pub fn p(&self) -> usize {
        self.p as usize
    }

    pub fn q(&self) -> usize {
        self.q as usize
    }

    pub fn r(&self) -> usize {
        self.r as usize
    }

    /// Total dimension p + q + r.
    pub fn dim(&self) -> usize {
        (self.p + self.q + self.r) as usize
    }

    /// Dimension of the non-degenerate part, p + q.
    pub fn dim_nondegenerate(&self) -> usize {
        (self.p + self.q) as usize
    }

    /// Number of basis blades, 2^dim.
    pub fn blade_count(&self) -> usize {
        1 << self.dim()
    }

    /// The square of basis vector at `bit`: 0.0, +1.0 or -1.0.
    pub fn metric(&self, bit: usize) -> f64 {
        debug_assert!(bit < self.dim());
        let r = self.r as usize;
        let p = self.p as usize;
        if bit < r {
            0.0
        } else if bit < r + p {
            1.0
        } else {
            -1.0
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.r > 0
    }

    /// Bitmask selecting the non-degenerate basis vectors.
    pub fn nondegenerate_mask(&self) -> usize {
        (self.blade_count() - 1) & !((1usize << self.r) - 1)
    }

    /// Mask of the full pseudoscalar e_{0...d} in ascending-index orientation.
    ///
    /// No sign convention for the orientation in odd dimension is imposed
    /// beyond this ascending order; callers pick the sign they need.
    pub fn pseudoscalar_mask(&self) -> usize {
        self.blade_count() - 1
    }

    /// Display label of a basis vector bit.
    pub fn label_of_bit(&self, bit: usize) -> usize {
        if self.r > 0 {
            bit
        } else {
            bit + 1
        }
    }

    /// Bit position of a display label. Label 0 refers to the degenerate
    /// vector and is only valid when r = 1.
    pub fn bit_of_label(&self, label: usize) -> Result<usize, GaError> {
        let bit = if self.r > 0 {
            label
        } else {
            if label == 0 {
                return Err(GaError::IndexOutOfRange(0));
            }
            label - 1
        };
        if bit >= self.dim() {
            return Err(GaError::IndexOutOfRange(label));
        }
        Ok(bit)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.r > 0 {
            write!(f, "Cl({},{},{})", self.p, self.q, self.r)
        } else {
            write!(f, "Cl({},{})", self.p, self.q)
        }
    }
}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Scalar field tag. Storage is always complex; the tag records whether the
/// value is semantically real. Mixed operations promote to `Complex`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    pub fn join(self, other: Field) -> Field {
        match (self, other) {
            (Field::Real, Field::Real) => Field::Real,
            _ => Field::Complex,
        }
    }
}
