//! Brute-force oracle: the left-regular matrix representation.
//!
//! Each generator e_i becomes the 2^d × 2^d matrix of left multiplication on
//! the blade basis, built from the one-generator insertion rule rather than
//! the general blade-product kernel, so the two code paths check each other.
//! Blade matrices are products of generator matrices, and `rep` of an
//! arbitrary element is the coefficient-weighted sum.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::algebra::multivector::Multivector;
use crate::algebra::sig::Signature;
use crate::error::GaError;

/// Largest dimension the dense oracle accepts (256×256 matrices).
pub const MAX_ORACLE_DIM: usize = 8;

/// Precomputed blade matrices for one signature.
pub struct MatrixRep {
    sig: Signature,
    blades: Vec<DMatrix<Complex64>>,
}

impl MatrixRep {
    pub fn new(sig: Signature) -> Result<Self, GaError> {
        let d = sig.dim();
        if d > MAX_ORACLE_DIM {
            return Err(GaError::OracleDimension {
                dim: d,
                max: MAX_ORACLE_DIM,
            });
        }
        let n = sig.blade_count();

        // Generator matrices: left multiplication e_i · e_M. Inserting e_i
        // into an ascending blade swaps it past every index below i, and a
        // repeated index contracts to the metric square.
        let mut gens = Vec::with_capacity(d);
        for i in 0..d {
            let mut m = DMatrix::<Complex64>::zeros(n, n);
            let low_mask = (1usize << i) - 1;
            for col in 0..n {
                let swaps = (col & low_mask).count_ones();
                let mut sign = if swaps % 2 == 0 { 1.0 } else { -1.0 };
                if col & (1 << i) != 0 {
                    sign *= sig.metric(i);
                    if sign == 0.0 {
                        continue;
                    }
                }
                m[(col ^ (1 << i), col)] = Complex64::new(sign, 0.0);
            }
            gens.push(m);
        }

        let mut blades = Vec::with_capacity(n);
        for mask in 0..n {
            let mut m = DMatrix::<Complex64>::identity(n, n);
            for i in 0..d {
                if mask & (1 << i) != 0 {
                    m = &m * &gens[i];
                }
            }
            blades.push(m);
        }
        Ok(Self { sig, blades })
    }

    pub fn sig(&self) -> Signature {
        self.sig
    }

    /// Matrix of left multiplication by `a`.
    pub fn rep(&self, a: &Multivector) -> DMatrix<Complex64> {
        assert_eq!(a.sig(), self.sig, "signature mismatch");
        let n = self.sig.blade_count();
        let mut out = DMatrix::<Complex64>::zeros(n, n);
        for (mask, c) in a.terms() {
            out += &self.blades[mask] * c;
        }
        out
    }

    /// Coefficient column vector of a multivector.
    pub fn coeff_vector(&self, a: &Multivector) -> DVector<Complex64> {
        DVector::from_iterator(
            self.sig.blade_count(),
            (0..self.sig.blade_count()).map(|m| a.coeff(m)),
        )
    }

    fn from_coeff_vector(&self, v: &DVector<Complex64>) -> Multivector {
        let mut out = Multivector::zero(self.sig);
        for (m, c) in v.iter().enumerate() {
            if *c != Complex64::ZERO {
                out.set_coeff(m, *c);
            }
        }
        out
    }

    /// The geometric product computed entirely through the representation:
    /// rep(a) applied to the coefficient vector of b.
    pub fn product(&self, a: &Multivector, b: &Multivector) -> Multivector {
        let v = self.rep(a) * self.coeff_vector(b);
        self.from_coeff_vector(&v)
    }

    /// Relative deviation of rep(a)·rep(b) from rep(ab); the homomorphism
    /// residual of a candidate product `ab`.
    pub fn homomorphism_residual(
        &self,
        a: &Multivector,
        b: &Multivector,
        ab: &Multivector,
    ) -> f64 {
        let lhs = self.rep(a) * self.rep(b);
        let rhs = self.rep(ab);
        let scale = 1f64.max(cmax(&lhs)).max(cmax(&rhs));
        cmax(&(&lhs - &rhs)) / scale
    }
}

/// Largest entry magnitude of a complex matrix.
pub fn cmax(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}
