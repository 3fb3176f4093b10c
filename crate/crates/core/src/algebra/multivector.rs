//! Dense multivectors.
//!
//! A multivector stores one complex coefficient per basis blade, indexed by
//! bitmask. All operations are pure; values are immutable after construction
//! and safe to share across threads.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DVector;
use num_complex::Complex64;

use crate::algebra::blade;
use crate::algebra::sig::{Field, Signature};
use crate::error::GaError;

/// Parity of a versor's grade support.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Certificate that an element passed the probabilistic versor checks:
/// UŨ is a nonzero real scalar, the grade support has a single parity, and
/// conjugation maps every basis vector to a pure vector.
#[derive(Clone, Debug)]
pub struct VersorCertificate {
    pub parity: Parity,
    /// The real scalar value of UŨ.
    pub norm: f64,
}

#[derive(Clone)]
pub struct Multivector {
    sig: Signature,
    field: Field,
    coeffs: Vec<Complex64>,
}

impl Multivector {
    // ------------------------------------------------------------------
    // Constructors
    // ------------------------------------------------------------------

    pub fn zero(sig: Signature) -> Self {
        Self {
            sig,
            field: Field::Real,
            coeffs: vec![Complex64::ZERO; sig.blade_count()],
        }
    }

    pub fn scalar(sig: Signature, value: f64) -> Self {
        let mut mv = Self::zero(sig);
        mv.coeffs[0] = Complex64::new(value, 0.0);
        mv
    }

    pub fn one(sig: Signature) -> Self {
        Self::scalar(sig, 1.0)
    }

    pub fn complex_scalar(sig: Signature, value: Complex64) -> Self {
        let mut mv = Self::zero(sig);
        mv.coeffs[0] = value;
        mv.field = if value.im == 0.0 {
            Field::Real
        } else {
            Field::Complex
        };
        mv
    }

    /// The imaginary unit as a multivector (complex field tag).
    pub fn imaginary(sig: Signature) -> Self {
        Self::complex_scalar(sig, Complex64::new(0.0, 1.0))
    }

    /// Basis vector by display label (see [`Signature::bit_of_label`]).
    pub fn basis_vector(sig: Signature, label: usize) -> Result<Self, GaError> {
        let bit = sig.bit_of_label(label)?;
        Ok(Self::from_term(sig, 1 << bit, Complex64::new(1.0, 0.0)))
    }

    /// Basis blade from a list of display labels. The labels are normalized
    /// into ascending order, absorbing the reorder sign; duplicates error.
    pub fn basis_blade(sig: Signature, labels: &[usize]) -> Result<Self, GaError> {
        let (sign, mask) = normalize_labels(sig, labels)?;
        Ok(Self::from_term(sig, mask, Complex64::new(sign, 0.0)))
    }

    /// Single-term multivector with the given blade mask.
    pub fn from_term(sig: Signature, mask: usize, coeff: Complex64) -> Self {
        debug_assert!(mask < sig.blade_count());
        let mut mv = Self::zero(sig);
        mv.coeffs[mask] = coeff;
        if coeff.im != 0.0 {
            mv.field = Field::Complex;
        }
        mv
    }

    /// Grade-1 element from real coordinates indexed by bit position.
    pub fn from_vector_coords(sig: Signature, coords: &[f64]) -> Self {
        assert_eq!(coords.len(), sig.dim());
        let mut mv = Self::zero(sig);
        for (bit, &c) in coords.iter().enumerate() {
            mv.coeffs[1 << bit] = Complex64::new(c, 0.0);
        }
        mv
    }

    // ------------------------------------------------------------------
    // Accessors
    // ------------------------------------------------------------------

    pub fn sig(&self) -> Signature {
        self.sig
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn coeff(&self, mask: usize) -> Complex64 {
        self.coeffs[mask]
    }

    pub fn set_coeff(&mut self, mask: usize, value: Complex64) {
        self.coeffs[mask] = value;
        if value.im != 0.0 {
            self.field = Field::Complex;
        }
    }

    /// Non-zero terms as (mask, coefficient), in ascending mask order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != Complex64::ZERO)
            .map(|(m, c)| (m, *c))
    }

    pub fn scalar_part(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn real_scalar_part(&self) -> f64 {
        self.coeffs[0].re
    }

    /// Real coordinates of the grade-1 part, indexed by bit position.
    pub fn grade1_coords(&self) -> DVector<f64> {
        DVector::from_iterator(self.sig.dim(), (0..self.sig.dim()).map(|b| self.coeffs[1 << b].re))
    }

    /// Force the field tag to complex.
    pub fn promoted(&self) -> Self {
        let mut out = self.clone();
        out.field = Field::Complex;
        out
    }

    /// Re-reads the coefficient table in a larger algebra whose low basis
    /// vectors carry the same metric. Blade masks are unchanged, so a
    /// flatland element keeps its meaning in the bigger space.
    pub fn embed(&self, target: Signature) -> Result<Self, GaError> {
        if target.dim() < self.sig.dim() {
            return Err(GaError::SignatureMismatch(
                self.sig.to_string(),
                target.to_string(),
            ));
        }
        for bit in 0..self.sig.dim() {
            if self.sig.metric(bit) != target.metric(bit) {
                return Err(GaError::SignatureMismatch(
                    self.sig.to_string(),
                    target.to_string(),
                ));
            }
        }
        let mut out = Self::zero(target);
        out.field = self.field;
        for (m, c) in self.terms() {
            out.coeffs[m] = c;
        }
        Ok(out)
    }

    /// Drop every term whose blade touches a degenerate basis vector.
    pub fn nondegenerate_part(&self) -> Self {
        let keep = self.sig.nondegenerate_mask();
        let mut out = Self::zero(self.sig);
        out.field = self.field;
        for (m, c) in self.terms() {
            if m & !keep == 0 {
                out.coeffs[m] = c;
            }
        }
        out
    }

    // ------------------------------------------------------------------
    // Norms and comparisons
    // ------------------------------------------------------------------

    /// Largest coefficient magnitude.
    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Euclidean norm of the coefficient table.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.norm_inf() <= tol
    }

    /// Relative comparison: max coefficient difference against the larger of
    /// 1 and both magnitudes.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.distance(other) <= tol * 1f64.max(self.norm_inf()).max(other.norm_inf())
    }

    /// Max-norm of the difference.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(self.sig, other.sig, "signature mismatch");
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// True when every imaginary part is below `tol` relative to the size.
    pub fn is_real(&self, tol: f64) -> bool {
        let scale = 1f64.max(self.norm_inf());
        self.coeffs.iter().all(|c| c.im.abs() <= tol * scale)
    }

    /// Pure grade-0 within `tol`; returns the scalar.
    pub fn try_scalar(&self, tol: f64) -> Result<Complex64, GaError> {
        let scale = 1f64.max(self.norm_inf());
        let residual = self
            .terms()
            .filter(|(m, _)| *m != 0)
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max);
        if residual > tol * scale {
            return Err(GaError::NotPureGrade {
                expected: 0,
                residual,
            });
        }
        Ok(self.coeffs[0])
    }

    // ------------------------------------------------------------------
    // Grade structure
    // ------------------------------------------------------------------

    /// Grades with any non-zero coefficient.
    pub fn grades(&self) -> Vec<usize> {
        let mut present = vec![false; self.sig.dim() + 1];
        for (m, _) in self.terms() {
            present[blade::grade(m)] = true;
        }
        (0..=self.sig.dim()).filter(|&k| present[k]).collect()
    }

    /// Grade projection; errors when k exceeds the dimension.
    pub fn grade_select(&self, k: usize) -> Result<Self, GaError> {
        if k > self.sig.dim() {
            return Err(GaError::GradeOutOfRange {
                grade: k,
                dim: self.sig.dim(),
            });
        }
        Ok(self.grade_part(k))
    }

    pub(crate) fn grade_part(&self, k: usize) -> Self {
        let mut out = Self::zero(self.sig);
        out.field = self.field;
        for (m, c) in self.terms() {
            if blade::grade(m) == k {
                out.coeffs[m] = c;
            }
        }
        out
    }

    pub fn even_part(&self) -> Self {
        self.parity_part(0)
    }

    pub fn odd_part(&self) -> Self {
        self.parity_part(1)
    }

    fn parity_part(&self, parity: usize) -> Self {
        let mut out = Self::zero(self.sig);
        out.field = self.field;
        for (m, c) in self.terms() {
            if blade::grade(m) % 2 == parity {
                out.coeffs[m] = c;
            }
        }
        out
    }

    /// Relative size of everything off grade k.
    pub fn off_grade_residual(&self, k: usize) -> f64 {
        let scale = 1f64.max(self.norm_inf());
        self.terms()
            .filter(|(m, _)| blade::grade(*m) != k)
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max)
            / scale
    }

    /// Checks the element is a pure grade-k part within `tol`.
    pub fn expect_grade(&self, k: usize, tol: f64) -> Result<(), GaError> {
        let residual = self.off_grade_residual(k);
        if residual > tol {
            return Err(GaError::NotPureGrade {
                expected: k,
                residual,
            });
        }
        Ok(())
    }

    /// Parity of the grade support within `tol`, if single.
    pub fn parity(&self, tol: f64) -> Option<Parity> {
        let scale = 1f64.max(self.norm_inf());
        let mut even = 0.0f64;
        let mut odd = 0.0f64;
        for (m, c) in self.terms() {
            if blade::grade(m) % 2 == 0 {
                even = even.max(c.norm());
            } else {
                odd = odd.max(c.norm());
            }
        }
        match (even > tol * scale, odd > tol * scale) {
            (true, false) => Some(Parity::Even),
            (false, true) => Some(Parity::Odd),
            (false, false) => Some(Parity::Even), // zero counts as even
            (true, true) => None,
        }
    }

    // ------------------------------------------------------------------
    // Involutions
    // ------------------------------------------------------------------

    fn map_grades(&self, sign: fn(usize) -> f64) -> Self {
        let mut out = self.clone();
        for (m, c) in out.coeffs.iter_mut().enumerate() {
            *c *= sign(blade::grade(m));
        }
        out
    }

    /// Reverse Ã: flips grades 2,3 mod 4.
    pub fn reverse(&self) -> Self {
        self.map_grades(blade::reverse_sign)
    }

    /// Grade involution: flips odd grades.
    pub fn grade_involution(&self) -> Self {
        self.map_grades(blade::involution_sign)
    }

    /// Clifford conjugate: reverse composed with grade involution.
    pub fn clifford_conjugate(&self) -> Self {
        self.map_grades(blade::conjugate_sign)
    }

    // ------------------------------------------------------------------
    // Products
    // ------------------------------------------------------------------

    fn assert_compatible(&self, other: &Self) {
        assert_eq!(
            self.sig, other.sig,
            "signature mismatch: {} vs {}",
            self.sig, other.sig
        );
    }

    /// The geometric product.
    pub fn geometric_product(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        let mut out = Self::zero(self.sig);
        out.field = self.field.join(other.field);
        for (ma, ca) in self.terms() {
            for (mb, cb) in other.terms() {
                if let Some((sign, m)) = blade::product(&self.sig, ma, mb) {
                    out.coeffs[m] += ca * cb * sign;
                }
            }
        }
        out
    }

    /// Geometric product with compensated accumulation: FMA two-products
    /// and Neumaier sums recover the cancellation between large terms, so
    /// the error scales with the result rather than the intermediates.
    /// Used where versor quotients cancel catastrophically.
    pub(crate) fn geometric_product_compensated(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        let n = self.sig.blade_count();
        let mut sum = vec![[0.0f64; 2]; n];
        let mut comp = vec![[0.0f64; 2]; n];

        let mut add = |slot: &mut [f64; 2], carry: &mut [f64; 2], part: usize, value: f64| {
            let s = slot[part] + value;
            carry[part] += if slot[part].abs() >= value.abs() {
                (slot[part] - s) + value
            } else {
                (value - s) + slot[part]
            };
            slot[part] = s;
        };

        for (ma, ca) in self.terms() {
            for (mb, cb) in other.terms() {
                if let Some((sign, m)) = blade::product(&self.sig, ma, mb) {
                    let slot = &mut sum[m];
                    let carry = &mut comp[m];
                    // (a+bi)(c+di), each partial product split exactly
                    for (part, u, v) in [
                        (0, sign * ca.re, cb.re),
                        (0, -sign * ca.im, cb.im),
                        (1, sign * ca.re, cb.im),
                        (1, sign * ca.im, cb.re),
                    ] {
                        let p = u * v;
                        let err = f64::mul_add(u, v, -p);
                        add(slot, carry, part, p);
                        add(slot, carry, part, err);
                    }
                }
            }
        }

        let mut out = Self::zero(self.sig);
        out.field = self.field.join(other.field);
        for (m, (s, c)) in sum.iter().zip(&comp).enumerate() {
            let value = Complex64::new(s[0] + c[0], s[1] + c[1]);
            if value != Complex64::ZERO {
                out.coeffs[m] = value;
            }
        }
        out
    }

    /// The outer (wedge) product: only disjoint blade pairs contribute.
    pub fn outer_product(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        let mut out = Self::zero(self.sig);
        out.field = self.field.join(other.field);
        for (ma, ca) in self.terms() {
            for (mb, cb) in other.terms() {
                if ma & mb == 0 {
                    out.coeffs[ma | mb] += ca * cb * blade::reorder_sign(ma, mb);
                }
            }
        }
        out
    }

    /// The commutator product ½(ab - ba).
    pub fn commutator_product(&self, other: &Self) -> Self {
        let ab = self.geometric_product(other);
        let ba = other.geometric_product(self);
        &(&ab - &ba) * 0.5
    }

    /// Left contraction a ⌟ b: blade pairs with a's support inside b's.
    pub fn left_contraction(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        let mut out = Self::zero(self.sig);
        out.field = self.field.join(other.field);
        for (ma, ca) in self.terms() {
            for (mb, cb) in other.terms() {
                if ma & mb == ma {
                    if let Some((sign, m)) = blade::product(&self.sig, ma, mb) {
                        out.coeffs[m] += ca * cb * sign;
                    }
                }
            }
        }
        out
    }

    /// Scalar part of the geometric product, ⟨ab⟩₀.
    pub fn scalar_product(&self, other: &Self) -> Complex64 {
        self.assert_compatible(other);
        let mut acc = Complex64::ZERO;
        for (m, ca) in self.terms() {
            let cb = other.coeffs[m];
            if cb != Complex64::ZERO {
                if let Some((sign, _)) = blade::product(&self.sig, m, m) {
                    acc += ca * cb * sign;
                }
            }
        }
        acc
    }

    // ------------------------------------------------------------------
    // Versor operations
    // ------------------------------------------------------------------

    /// The symmetric norm UŨ as a multivector.
    pub fn symmetric_norm(&self) -> Self {
        self.geometric_product(&self.reverse())
    }

    /// UŨ reduced to a real scalar; errors when it is not one, or when it
    /// vanishes relative to the element's size.
    pub fn versor_scalar_norm(&self) -> Result<f64, GaError> {
        let n = self.symmetric_norm();
        let scale = 1f64.max(self.norm_inf() * self.norm_inf());
        let s = n
            .try_scalar(1e-9)
            .map_err(|_| GaError::NotAVersor(format!("UŨ is not a scalar: {n}")))?;
        if s.im.abs() > 1e-9 * scale {
            return Err(GaError::NotAVersor("UŨ is not real".into()));
        }
        if s.re.abs() <= 1e-12 * scale {
            return Err(GaError::NotInvertible { norm: s.re.abs() });
        }
        Ok(s.re)
    }

    /// Versor inverse Ũ/(UŨ).
    pub fn versor_inverse(&self) -> Result<Self, GaError> {
        let n = self.versor_scalar_norm()?;
        Ok(&self.reverse() * (1.0 / n))
    }

    /// Conjugation U W U⁻¹.
    pub fn sandwich(&self, w: &Self) -> Result<Self, GaError> {
        let inv = self.versor_inverse()?;
        Ok(self.geometric_product(w).geometric_product(&inv))
    }

    /// Reverse-sided conjugation U W Ũ (no inverse, no normalization).
    pub fn sandwich_rev(&self, w: &Self) -> Self {
        self.geometric_product(w).geometric_product(&self.reverse())
    }

    /// The orthogonal transformation a versor induces on vectors: for an
    /// ℓ-reflection this is v ↦ (-1)^ℓ U v U⁻¹, so single vectors act as
    /// reflections with the mirror fixed.
    pub fn versor_transform(&self, x: &Self) -> Result<Self, GaError> {
        let parity = self
            .parity(1e-9)
            .ok_or_else(|| GaError::NotAVersor("mixed grade parity".into()))?;
        let out = self.sandwich(x)?;
        Ok(match parity {
            Parity::Even => out,
            Parity::Odd => -&out,
        })
    }

    /// Probabilistic versor certification: single parity, UŨ a nonzero real
    /// scalar, and grade preservation on every basis vector.
    pub fn certify_versor(&self, tol: f64) -> Result<VersorCertificate, GaError> {
        let parity = self
            .parity(tol)
            .ok_or_else(|| GaError::NotAVersor("mixed grade parity".into()))?;
        let norm = self.versor_scalar_norm()?;
        for bit in 0..self.sig.dim() {
            let v = Self::from_term(self.sig, 1 << bit, Complex64::new(1.0, 0.0));
            let image = self.sandwich(&v)?;
            if image.off_grade_residual(1) > tol {
                return Err(GaError::NotAVersor(format!(
                    "conjugation does not preserve grade 1 on basis vector bit {bit}"
                )));
            }
        }
        Ok(VersorCertificate { parity, norm })
    }

    // ------------------------------------------------------------------
    // Exponential
    // ------------------------------------------------------------------

    /// Exponential of a bivector. Simple bivectors (B² scalar) use the
    /// closed cos/cosh/1+B forms; non-simple ones are split into commuting
    /// simple factors first and the factor exponentials multiplied.
    pub fn exp_bivector(&self) -> Result<Self, GaError> {
        self.expect_grade(2, 1e-9)?;
        if let Some(out) = self.exp_simple() {
            return Ok(out);
        }
        let split = crate::decompose::bivector_split(self)?;
        let mut out = Self::one(self.sig);
        for factor in &split.factors {
            let e = factor
                .bivector
                .exp_simple()
                .ok_or_else(|| GaError::DecompositionFailed("split factor is not simple".into()))?;
            out = out.geometric_product(&e);
        }
        Ok(out)
    }

    /// Closed-form exponential when B² is a scalar; `None` otherwise.
    pub(crate) fn exp_simple(&self) -> Option<Self> {
        let b2 = self.geometric_product(self);
        let scale = 1f64.max(self.norm_inf() * self.norm_inf());
        let off = b2
            .terms()
            .filter(|(m, _)| *m != 0)
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max);
        if off > 1e-10 * scale {
            return None;
        }
        let lambda = b2.real_scalar_part();
        let out = if lambda > 1e-12 * scale {
            let t = lambda.sqrt();
            &Self::scalar(self.sig, t.cosh()) + &(self * (t.sinh() / t))
        } else if lambda < -1e-12 * scale {
            let t = (-lambda).sqrt();
            &Self::scalar(self.sig, t.cos()) + &(self * (t.sin() / t))
        } else {
            &Self::one(self.sig) + self
        };
        Some(out)
    }
}

fn normalize_labels(sig: Signature, labels: &[usize]) -> Result<(f64, usize), GaError> {
    let mut mask = 0usize;
    let mut sign = 1.0;
    for &label in labels {
        let bit = sig.bit_of_label(label)?;
        let bitmask = 1usize << bit;
        if mask & bitmask != 0 {
            return Err(GaError::NotABlade(format!(
                "duplicate basis index {label} in one blade"
            )));
        }
        // count set bits above `bit` already present: each is one swap
        let above = mask >> (bit + 1);
        if above.count_ones() % 2 == 1 {
            sign = -sign;
        }
        mask |= bitmask;
    }
    Ok((sign, mask))
}

/// Equality compares signature and coefficients exactly; the field tag is a
/// presentation detail and does not participate.
impl PartialEq for Multivector {
    fn eq(&self, other: &Self) -> bool {
        self.sig == other.sig && self.coeffs == other.coeffs
    }
}

impl Add for &Multivector {
    type Output = Multivector;
    fn add(self, rhs: &Multivector) -> Multivector {
        self.assert_compatible(rhs);
        let mut out = self.clone();
        out.field = self.field.join(rhs.field);
        for (c, r) in out.coeffs.iter_mut().zip(&rhs.coeffs) {
            *c += r;
        }
        out
    }
}

impl Sub for &Multivector {
    type Output = Multivector;
    fn sub(self, rhs: &Multivector) -> Multivector {
        self.assert_compatible(rhs);
        let mut out = self.clone();
        out.field = self.field.join(rhs.field);
        for (c, r) in out.coeffs.iter_mut().zip(&rhs.coeffs) {
            *c -= r;
        }
        out
    }
}

impl Neg for &Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c = -*c;
        }
        out
    }
}

impl Mul<f64> for &Multivector {
    type Output = Multivector;
    fn mul(self, rhs: f64) -> Multivector {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c *= rhs;
        }
        out
    }
}

impl Mul<Complex64> for &Multivector {
    type Output = Multivector;
    fn mul(self, rhs: Complex64) -> Multivector {
        let mut out = self.clone();
        if rhs.im != 0.0 {
            out.field = Field::Complex;
        }
        for c in out.coeffs.iter_mut() {
            *c *= rhs;
        }
        out
    }
}

impl Mul for &Multivector {
    type Output = Multivector;
    fn mul(self, rhs: &Multivector) -> Multivector {
        self.geometric_product(rhs)
    }
}

impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::algebra::parse::format_multivector(self))
    }
}

impl fmt::Debug for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in {}", self, self.sig)
    }
}
