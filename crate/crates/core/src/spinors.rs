//! Algebraic spinors over the complexified algebra.
//!
//! Each Cartan bivector contributes a pair of isotropic eigenvectors under
//! the commutator: real for boosts, complex for rotations, and a single
//! μ = 0 horizon vector for translations. The master idempotent is the
//! product of the pairs; left multiplication by lowering operators walks the
//! 2^k basis states of the minimal left ideal.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::algebra::multivector::Multivector;
use crate::decompose::{FactorKind, SimpleFactor};
use crate::error::GaError;
use crate::points::{factor_blade, symmetric_dot, LabelVector, PointFrame};

/// Isotropic eigenvectors of a simple bivector under the commutator.
#[derive(Clone, Debug)]
pub enum NullEigen {
    /// Boost or rotation: the pair (w₊, w₋) with eigenvalues ±μ.
    Pair {
        plus: Multivector,
        minus: Multivector,
        mu: Complex64,
    },
    /// Translation: the single null direction with eigenvalue zero.
    Horizon { vector: Multivector },
}

/// One Cartan plane's worth of spinor scaffolding: the unit bivector, its
/// null pair, the eigenvalue μ of w₊, and β = b/μ with β² = 1.
#[derive(Clone, Debug)]
pub struct NullPair {
    pub bivector: Multivector,
    pub plus: Multivector,
    pub minus: Multivector,
    pub mu: Complex64,
    pub beta: Multivector,
}

/// Null eigenvector pairs for every Cartan bivector of a frame, plus the
/// leftover vector in odd dimension.
#[derive(Clone, Debug)]
pub struct NullBasis {
    pairs: Vec<NullPair>,
    extra: Option<Multivector>,
}

impl NullBasis {
    pub fn pairs(&self) -> &[NullPair] {
        &self.pairs
    }

    pub fn extra(&self) -> Option<&Multivector> {
        self.extra.as_ref()
    }

    pub fn k(&self) -> usize {
        self.pairs.len()
    }

    pub fn sig(&self) -> crate::algebra::sig::Signature {
        self.pairs[0].bivector.sig()
    }

    /// The even point O_{2k}: product of the unit Cartan bivectors.
    pub fn cartan_point(&self) -> Multivector {
        let mut out = Multivector::one(self.sig());
        for p in &self.pairs {
            out = out.geometric_product(&p.bivector);
        }
        out
    }
}

/// A basis element of the minimal left ideal with its eigenvalue label.
#[derive(Clone, Debug)]
pub struct SpinorState {
    pub value: Multivector,
    pub label: LabelVector,
}

/// Eigenvectors of a simple bivector under b × (·), by kind: boosts give the
/// real pair ½(u ∓ v) with μ = ±|b|, rotations the complex pair ½(u ± iv)
/// with μ = ±i|b|, translations the null horizon direction with μ = 0.
pub fn null_eigenvectors(factor: &SimpleFactor) -> Result<NullEigen, GaError> {
    let b = &factor.bivector;
    b.expect_grade(2, 1e-9)?;
    let wedge = b.outer_product(b);
    if !wedge.is_zero(1e-9 * 1f64.max(b.norm_inf().powi(2))) {
        return Err(GaError::NotABlade("bivector is not simple".into()));
    }
    let sig = b.sig();

    match factor.kind {
        FactorKind::Translation => {
            // contract any non-null plane vector through b to land on the
            // null ray; a null contraction already is the ray
            let mut best: Option<Multivector> = None;
            for bit in 0..sig.dim() {
                let e_i = Multivector::from_term(sig, 1 << bit, Complex64::new(1.0, 0.0));
                let c = e_i.left_contraction(b).grade_part(1);
                if c.norm_inf() < 1e-12 {
                    continue;
                }
                let c2 = symmetric_dot(&c, &c).re;
                let h = if c2.abs() < 1e-10 * c.norm_inf().powi(2) {
                    c
                } else {
                    let h = c.left_contraction(b).grade_part(1);
                    if h.norm_inf() < 1e-12 {
                        continue;
                    }
                    h
                };
                let mut h = &h * (1.0 / h.norm());
                // orient the ray so its largest coefficient is positive
                if let Some((_, c)) = h
                    .terms()
                    .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
                {
                    if c.re < 0.0 {
                        h = -&h;
                    }
                }
                if b.commutator_product(&h).is_zero(1e-9) {
                    best = Some(h);
                    break;
                }
            }
            let vector = best.ok_or_else(|| {
                GaError::DecompositionFailed("no horizon direction found".into())
            })?;
            Ok(NullEigen::Horizon { vector })
        }
        kind => {
            let mag = factor.lambda.abs().sqrt();
            let unit = b * (1.0 / mag);
            let fs = factor_blade(&unit)?;
            let mut u = normalize_vector(&fs[0])?;
            let mut v = normalize_vector(&fs[1])?;

            if kind == FactorKind::Boost {
                // order so u² = +1, v² = -1
                if symmetric_dot(&u, &u).re < 0.0 {
                    std::mem::swap(&mut u, &mut v);
                }
                let mut plus = &(&u - &v) * 0.5;
                let mut minus = &(&u + &v) * 0.5;
                // orient so w₊ carries the +|b| eigenvalue
                let img = b.commutator_product(&plus);
                if !img.approx_eq(&(&plus * mag), 1e-8) {
                    std::mem::swap(&mut plus, &mut minus);
                }
                Ok(NullEigen::Pair {
                    plus,
                    minus,
                    mu: Complex64::new(mag, 0.0),
                })
            } else {
                let i = Complex64::new(0.0, 1.0);
                let mut plus = &(&u + &(&v * i)) * Complex64::new(0.5, 0.0);
                let img = unit.commutator_product(&plus);
                if !img.approx_eq(&(&plus * i), 1e-8) {
                    // flip the orientation of v so μ = +i for w₊
                    v = -&v;
                    plus = &(&u + &(&v * i)) * Complex64::new(0.5, 0.0);
                }
                let minus = &(&u - &(&v * i)) * Complex64::new(0.5, 0.0);
                Ok(NullEigen::Pair {
                    plus,
                    minus,
                    mu: i * mag,
                })
            }
        }
    }
}

fn normalize_vector(v: &Multivector) -> Result<Multivector, GaError> {
    let n2 = symmetric_dot(v, v).re;
    if n2.abs() < 1e-12 {
        return Err(GaError::NotInvertible { norm: n2.abs() });
    }
    Ok(v * (1.0 / n2.abs().sqrt()))
}

/// Builds the null basis over a frame's Cartan bivectors. Translation
/// planes are rejected; boost and rotation planes both work, though the
/// classical construction lives in the definite signatures.
pub fn null_basis(frame: &PointFrame) -> Result<NullBasis, GaError> {
    let mut pairs = Vec::with_capacity(frame.k());
    for b in frame.cartan() {
        let lambda = b.geometric_product(b).try_scalar(1e-9)?.re;
        let scale = 1f64.max(b.norm_inf().powi(2));
        if lambda.abs() < 1e-9 * scale {
            return Err(GaError::UnsupportedSignature(
                "translation planes carry no spinor structure".into(),
            ));
        }
        let unit = b * (1.0 / lambda.abs().sqrt());
        let factor = SimpleFactor {
            bivector: unit.clone(),
            lambda: lambda.signum(),
            kind: if lambda > 0.0 {
                FactorKind::Boost
            } else {
                FactorKind::Rotation
            },
        };
        match null_eigenvectors(&factor)? {
            NullEigen::Pair { plus, minus, mu } => {
                let beta = &unit * mu.inv();
                pairs.push(NullPair {
                    bivector: unit,
                    plus,
                    minus,
                    mu,
                    beta,
                });
            }
            NullEigen::Horizon { .. } => unreachable!("translation rejected above"),
        }
    }
    let extra = match frame.extra() {
        Some(v) => Some(normalize_vector(v)?),
        None => None,
    };
    Ok(NullBasis { pairs, extra })
}

/// The master idempotent ⊞ = ∏ w₊ⱼ w₋ⱼ.
pub fn master_idempotent(nb: &NullBasis) -> Multivector {
    let mut out = Multivector::one(nb.sig()).promoted();
    for p in &nb.pairs {
        out = out.geometric_product(&p.plus.geometric_product(&p.minus));
    }
    out
}

/// Basis spinor η_s: the lowering operators w₋ⱼ applied to ⊞ for every
/// negative label, in ascending j order.
pub fn basis_spinor(nb: &NullBasis, label: &LabelVector) -> Result<SpinorState, GaError> {
    if label.len() != nb.k() {
        return Err(GaError::FrameMismatch(format!(
            "label length {} does not match k = {}",
            label.len(),
            nb.k()
        )));
    }
    let mut acc = Multivector::one(nb.sig()).promoted();
    for (p, &s) in nb.pairs.iter().zip(label.signs()) {
        if s < 0 {
            acc = acc.geometric_product(&p.minus);
        }
    }
    Ok(SpinorState {
        value: acc.geometric_product(&master_idempotent(nb)),
        label: label.clone(),
    })
}

/// All 2^k basis states in label-index order.
pub fn basis_states(nb: &NullBasis) -> Vec<SpinorState> {
    (0..1usize << nb.k())
        .map(|i| basis_spinor(nb, &LabelVector::from_index(nb.k(), i)).expect("length matches"))
        .collect()
}

/// The chiral operator Γ = ∏ β_j; Γ² = 1 and Γ is a complex scalar multiple
/// of the even point O_{2k}.
pub fn chiral_operator(nb: &NullBasis) -> Multivector {
    let mut out = Multivector::one(nb.sig()).promoted();
    for p in &nb.pairs {
        out = out.geometric_product(&p.beta);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeylSide {
    Left,
    Right,
}

/// Weyl projector P_{L/R} = ½(1 ± Γ) applied from the left.
pub fn weyl_project(nb: &NullBasis, eta: &Multivector, side: WeylSide) -> Multivector {
    let gamma = chiral_operator(nb);
    let sign = match side {
        WeylSide::Left => 1.0,
        WeylSide::Right => -1.0,
    };
    let projector = &(&Multivector::one(nb.sig()).promoted() + &(&gamma * sign)) * 0.5;
    projector.geometric_product(eta)
}

/// Expands an ideal element over the basis states: η = Σ c_s η_s. The
/// coefficients come from the least-squares solve of the state matrix;
/// anything outside the ideal is reported through the residual.
pub fn spinor_expand(
    eta: &Multivector,
    nb: &NullBasis,
    tol: f64,
) -> Result<BTreeMap<LabelVector, Complex64>, GaError> {
    let states = basis_states(nb);
    let n = nb.sig().blade_count();
    let m = states.len();
    let a = DMatrix::<Complex64>::from_fn(n, m, |row, col| states[col].value.coeff(row));
    let rhs = DMatrix::<Complex64>::from_fn(n, 1, |row, _| eta.coeff(row));

    let gram = a.adjoint() * &a;
    let proj = a.adjoint() * &rhs;
    let sol = gram
        .lu()
        .solve(&proj)
        .ok_or_else(|| GaError::DecompositionFailed("singular spinor basis".into()))?;

    let reconstructed = &a * &sol;
    let residual = (&reconstructed - &rhs)
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max)
        / 1f64.max(eta.norm_inf());
    if residual > tol {
        return Err(GaError::OutsideIdeal { residual });
    }

    let mut out = BTreeMap::new();
    for (i, state) in states.iter().enumerate() {
        let c = sol[(i, 0)];
        if c.norm() > tol {
            out.insert(state.label.clone(), c);
        }
    }
    Ok(out)
}

/// Complex dimension of the span of the basis states.
pub fn ideal_dimension(nb: &NullBasis, tol: f64) -> usize {
    let states = basis_states(nb);
    let n = nb.sig().blade_count();
    let m = states.len();
    let a = DMatrix::<Complex64>::from_fn(n, m, |row, col| states[col].value.coeff(row));
    let svd = a.svd(false, false);
    svd.singular_values.iter().filter(|s| **s > tol).count()
}
