//! Points as top-grade blades.
//!
//! A point factors into mutually orthogonal invertible vectors; pairing the
//! vectors gives the commuting Cartan bivectors b_j, and conjugation by the
//! b_j labels every tangent element with a tuple of ±1 eigenvalues. The
//! factorization is not unique: rotors that fix the point act on frames as a
//! local gauge group.

use num_complex::Complex64;

use crate::algebra::multivector::{Multivector, Parity};
use crate::algebra::sig::Signature;
use crate::error::GaError;

/// A tuple of ±1 eigenvalues labelling a tangent element.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabelVector(Vec<i8>);

impl LabelVector {
    pub fn new(signs: Vec<i8>) -> Result<Self, GaError> {
        if signs.iter().any(|s| *s != 1 && *s != -1) {
            return Err(GaError::FrameMismatch("labels must be ±1".into()));
        }
        Ok(Self(signs))
    }

    /// All-plus label of length k.
    pub fn all_plus(k: usize) -> Self {
        Self(vec![1; k])
    }

    /// Label from the bits of `index`: bit j set means s_j = -1.
    pub fn from_index(k: usize, index: usize) -> Self {
        Self((0..k).map(|j| if index >> j & 1 == 1 { -1 } else { 1 }).collect())
    }

    pub fn signs(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn negative_count(&self) -> usize {
        self.0.iter().filter(|s| **s < 0).count()
    }
}

impl std::fmt::Display for LabelVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for s in &self.0 {
            f.write_str(if *s > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

impl std::fmt::Debug for LabelVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({self})")
    }
}

/// A point with one chosen factorization into orthogonal vectors and the
/// paired Cartan bivectors.
#[derive(Clone, Debug)]
pub struct PointFrame {
    point: Multivector,
    vectors: Vec<Multivector>,
    cartan: Vec<Multivector>,
    extra: Option<Multivector>,
}

impl PointFrame {
    /// Builds and validates a frame from orthogonal invertible vectors.
    pub fn from_vectors(vectors: Vec<Multivector>) -> Result<Self, GaError> {
        if vectors.is_empty() {
            return Err(GaError::NotABlade("empty factorization".into()));
        }
        let sig = vectors[0].sig();
        let mut point = Multivector::one(sig);
        for (i, v) in vectors.iter().enumerate() {
            v.expect_grade(1, 1e-9)?;
            v.versor_scalar_norm()?;
            for w in &vectors[..i] {
                let dot = symmetric_dot(v, w);
                if dot.norm() > 1e-8 * 1f64.max(v.norm_inf() * w.norm_inf()) {
                    return Err(GaError::NotABlade(format!(
                        "frame vectors {i} and earlier are not orthogonal (dot {dot:.3e})"
                    )));
                }
            }
            point = point.geometric_product(v);
        }
        let k = vectors.len() / 2;
        let cartan: Vec<Multivector> = (0..k)
            .map(|j| vectors[2 * j].geometric_product(&vectors[2 * j + 1]))
            .collect();
        let extra = if vectors.len() % 2 == 1 {
            Some(vectors[vectors.len() - 1].clone())
        } else {
            None
        };
        Ok(Self {
            point,
            vectors,
            cartan,
            extra,
        })
    }

    /// The canonical axis-aligned frame on the non-degenerate basis vectors.
    pub fn canonical(sig: Signature) -> Result<Self, GaError> {
        let vectors = (sig.r()..sig.dim())
            .map(|bit| Multivector::from_term(sig, 1 << bit, Complex64::new(1.0, 0.0)))
            .collect();
        Self::from_vectors(vectors)
    }

    pub fn point(&self) -> &Multivector {
        &self.point
    }

    pub fn vectors(&self) -> &[Multivector] {
        &self.vectors
    }

    pub fn cartan(&self) -> &[Multivector] {
        &self.cartan
    }

    pub fn extra(&self) -> Option<&Multivector> {
        self.extra.as_ref()
    }

    pub fn k(&self) -> usize {
        self.cartan.len()
    }

    pub fn sig(&self) -> Signature {
        self.point.sig()
    }

    /// Product of the Cartan bivectors: the even-dimensional point O_{2k}.
    pub fn cartan_point(&self) -> Multivector {
        let mut out = Multivector::one(self.sig());
        for b in &self.cartan {
            out = out.geometric_product(b);
        }
        out
    }

    /// The element used to split tangent elements in two: the point itself
    /// in even dimension, O_{2k} in odd dimension where the full point is
    /// central.
    pub fn chiral_anchor(&self) -> Multivector {
        if self.vectors.len() % 2 == 0 {
            self.point.clone()
        } else {
            self.cartan_point()
        }
    }

    /// Residuals of the frame invariants, for verification listings.
    pub fn residuals(&self) -> FrameResiduals {
        let mut orthogonality: f64 = 0.0;
        for i in 0..self.vectors.len() {
            for j in 0..i {
                orthogonality = orthogonality
                    .max(symmetric_dot(&self.vectors[i], &self.vectors[j]).norm());
            }
        }
        let mut product = Multivector::one(self.sig());
        for v in &self.vectors {
            product = product.geometric_product(v);
        }
        let scale = 1f64.max(self.point.norm_inf());
        let reconstruction = (&product - &self.point).norm_inf() / scale;

        let mut commutation: f64 = 0.0;
        let mut simplicity: f64 = 0.0;
        for (i, b) in self.cartan.iter().enumerate() {
            simplicity = simplicity.max(b.outer_product(b).norm_inf());
            for other in &self.cartan[..i] {
                commutation = commutation.max(b.commutator_product(other).norm_inf());
            }
            if let Some(extra) = &self.extra {
                commutation = commutation.max(extra.commutator_product(b).norm_inf());
            }
        }
        FrameResiduals {
            orthogonality,
            reconstruction,
            commutation,
            simplicity,
        }
    }

    pub fn validate(&self, tol: f64) -> Result<(), GaError> {
        let r = self.residuals();
        let worst = r
            .orthogonality
            .max(r.reconstruction)
            .max(r.commutation)
            .max(r.simplicity);
        if worst > tol {
            return Err(GaError::NotABlade(format!(
                "frame invariants violated (worst residual {worst:.3e})"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct FrameResiduals {
    pub orthogonality: f64,
    pub reconstruction: f64,
    pub commutation: f64,
    pub simplicity: f64,
}

/// Symmetric vector product ½(xy + yx), reduced to its scalar.
pub fn symmetric_dot(x: &Multivector, y: &Multivector) -> Complex64 {
    let s = &x.geometric_product(y) + &y.geometric_product(x);
    s.scalar_part() * 0.5
}

// ---------------------------------------------------------------------
// Blade factorization
// ---------------------------------------------------------------------

/// Factors an invertible blade into orthogonal invertible vectors whose
/// product reproduces it exactly. Candidates are basis-vector projections
/// through the blade, in ascending index order of the largest-coefficient
/// basis blade; the last factor is the quotient, which also sweeps up any
/// degenerate (null) components.
pub fn factor_blade(o: &Multivector) -> Result<Vec<Multivector>, GaError> {
    let sig = o.sig();
    // dominant grade, tolerating numerical dust on other grades
    let g = (0..=sig.dim())
        .max_by(|&a, &b| {
            o.grade_part(a)
                .norm_inf()
                .total_cmp(&o.grade_part(b).norm_inf())
        })
        .unwrap_or(0);
    if o.off_grade_residual(g) > 1e-9 {
        return Err(GaError::NotABlade(format!(
            "mixed grade support {:?}",
            o.grades()
        )));
    }
    let o = &o.grade_part(g);
    if g == 0 {
        return Err(GaError::NotABlade("scalar has no vector factors".into()));
    }
    if g == 1 {
        o.versor_scalar_norm()
            .map_err(|_| GaError::NotABlade("null blade".into()))?;
        return Ok(vec![o.clone()]);
    }
    let o_inv = o
        .versor_inverse()
        .map_err(|_| GaError::NotABlade("null or non-factorizable blade".into()))?;

    // anchor: the largest-coefficient basis blade, its bits first
    let anchor = o
        .terms()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .map(|(m, _)| m)
        .unwrap_or(0);
    let mut order: Vec<usize> = (0..sig.dim()).filter(|b| anchor >> b & 1 == 1).collect();
    order.extend((0..sig.dim()).filter(|b| anchor >> b & 1 == 0));

    let mut factors: Vec<Multivector> = Vec::with_capacity(g);
    for bit in order {
        if factors.len() == g - 1 {
            break;
        }
        let e_i = Multivector::from_term(sig, 1 << bit, Complex64::new(1.0, 0.0));
        let mut cand = e_i
            .left_contraction(o)
            .geometric_product(&o_inv)
            .grade_part(1);
        for v in &factors {
            let d = symmetric_dot(&cand, v);
            let v2 = symmetric_dot(v, v);
            cand = &cand - &(v * (d / v2));
        }
        let n2 = symmetric_dot(&cand, &cand);
        if n2.norm() > 1e-8 && n2.im.abs() < 1e-9 * n2.norm() {
            factors.push(&cand * (1.0 / n2.re.abs().sqrt()));
        }
    }
    if factors.len() != g - 1 {
        return Err(GaError::NotABlade(
            "could not isolate enough orthogonal factors".into(),
        ));
    }

    // last factor as the exact quotient
    let mut acc = Multivector::one(sig);
    for v in &factors {
        acc = acc.geometric_product(v);
    }
    let last = acc.versor_inverse()?.geometric_product(o);
    if last.off_grade_residual(1) > 1e-8 {
        return Err(GaError::NotABlade("quotient factor is not a vector".into()));
    }
    factors.push(last.grade_part(1));
    Ok(factors)
}

/// Factors a point (a blade of the algebra's top non-degenerate grade) into
/// a frame. The overall magnitude and sign land on the first vector; the
/// rest are unit.
pub fn factor_point(o: &Multivector) -> Result<PointFrame, GaError> {
    let sig = o.sig();
    let d = sig.dim_nondegenerate();
    if o.off_grade_residual(d) > 1e-9 {
        return Err(GaError::NotABlade(format!(
            "a point must be a pure grade-{d} blade"
        )));
    }
    let mut factors = factor_blade(o)?;

    // normalize all but the first, folding magnitudes forward
    let mut scale = 1.0;
    for v in factors.iter_mut().skip(1) {
        let n2 = symmetric_dot(v, v).re;
        let n = n2.abs().sqrt();
        scale *= n;
        *v = &*v * (1.0 / n);
    }
    factors[0] = &factors[0] * scale;

    let frame = PointFrame::from_vectors(factors)?;
    if !frame.point().approx_eq(o, 1e-8) {
        return Err(GaError::NotABlade(
            "factorization does not reproduce the point".into(),
        ));
    }
    Ok(frame)
}

/// Applies a gauge rotor to a frame: every vector is conjugated, the point
/// stays fixed. Errors when G is not a rotor or moves the point.
pub fn gauge_frame(frame: &PointFrame, g: &Multivector) -> Result<PointFrame, GaError> {
    if g.parity(1e-9) != Some(Parity::Even) {
        return Err(GaError::NotAVersor("gauge element must be even".into()));
    }
    let n = g.versor_scalar_norm()?;
    if (n - 1.0).abs() > 1e-7 {
        return Err(GaError::NotAVersor(format!(
            "gauge element must satisfy GG̃ = 1, got {n}"
        )));
    }
    let moved = g.sandwich_rev(frame.point());
    if !moved.approx_eq(frame.point(), 1e-8) {
        return Err(GaError::FrameMismatch(
            "gauge rotor moves the point".into(),
        ));
    }
    let vectors = frame
        .vectors()
        .iter()
        .map(|v| g.sandwich_rev(v))
        .collect();
    PointFrame::from_vectors(vectors)
}

// ---------------------------------------------------------------------
// Tangent subalgebra and label machinery
// ---------------------------------------------------------------------

/// Projection onto the subalgebra generated by the frame's vectors: the
/// outermorphism of the vector-level metric projector.
pub fn project_subalgebra(zeta: &Multivector, frame: &PointFrame) -> Multivector {
    let sig = zeta.sig();
    let d = sig.dim();

    // vector-level projector images of the basis vectors
    let mut p_vec = Vec::with_capacity(d);
    for bit in 0..d {
        let e_i = Multivector::from_term(sig, 1 << bit, Complex64::new(1.0, 0.0));
        let mut image = Multivector::zero(sig);
        for v in frame.vectors() {
            let c = symmetric_dot(&e_i, v) / symmetric_dot(v, v);
            image = &image + &(v * c);
        }
        p_vec.push(image);
    }

    // outermorphism on blades, built up by lowest bit
    let mut images: Vec<Multivector> = Vec::with_capacity(sig.blade_count());
    images.push(Multivector::one(sig));
    for mask in 1..sig.blade_count() {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let img = p_vec[low].outer_product(&images[rest]);
        images.push(img);
    }

    let mut out = Multivector::zero(sig);
    for (mask, c) in zeta.terms() {
        out = &out + &(&images[mask] * c);
    }
    out
}

fn require_membership(
    zeta: &Multivector,
    frame: &PointFrame,
    tol: f64,
) -> Result<Multivector, GaError> {
    let inside = project_subalgebra(zeta, frame);
    let residual = (zeta - &inside).norm_inf() / 1f64.max(zeta.norm_inf());
    if residual > tol {
        return Err(GaError::OutsideSubalgebra { residual });
    }
    Ok(inside)
}

/// Projects ζ onto the simultaneous eigenspace with eigenvalues s_j under
/// conjugation by each Cartan bivector b_j.
pub fn label_project(
    zeta: &Multivector,
    frame: &PointFrame,
    label: &LabelVector,
    tol: f64,
) -> Result<Multivector, GaError> {
    if label.len() != frame.k() {
        return Err(GaError::FrameMismatch(format!(
            "label length {} does not match k = {}",
            label.len(),
            frame.k()
        )));
    }
    let mut acc = require_membership(zeta, frame, tol)?;
    for (b, &s) in frame.cartan().iter().zip(label.signs()) {
        let conj = b.sandwich(&acc)?;
        acc = &(&acc + &(&conj * f64::from(s))) * 0.5;
    }
    Ok(acc)
}

/// Decomposes ζ into its labelled components; all-zero components are
/// omitted. The components sum back to ζ.
pub fn label_decompose(
    zeta: &Multivector,
    frame: &PointFrame,
    tol: f64,
) -> Result<Vec<(LabelVector, Multivector)>, GaError> {
    let inside = require_membership(zeta, frame, tol)?;
    let k = frame.k();
    let mut out = Vec::new();
    for index in 0..1usize << k {
        let label = LabelVector::from_index(k, index);
        let mut acc = inside.clone();
        for (b, &s) in frame.cartan().iter().zip(label.signs()) {
            let conj = b.sandwich(&acc)?;
            acc = &(&acc + &(&conj * f64::from(s))) * 0.5;
        }
        if !acc.is_zero(tol * 1f64.max(zeta.norm_inf())) {
            out.push((label, acc));
        }
    }
    Ok(out)
}

/// Splits ζ into the parts commuting and anti-commuting with the chiral
/// anchor: the point in even dimension, O_{2k} in odd dimension.
pub fn chiral_split(
    zeta: &Multivector,
    frame: &PointFrame,
    tol: f64,
) -> Result<(Multivector, Multivector), GaError> {
    let inside = require_membership(zeta, frame, tol)?;
    let anchor = frame.chiral_anchor();
    let conj = anchor.sandwich(&inside)?;
    let left = &(&inside + &conj) * 0.5;
    let right = &(&inside - &conj) * 0.5;
    Ok((left, right))
}
