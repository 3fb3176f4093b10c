//! Pointors: elements ψ = ρ₊R + ρ₋P that fix a point up to magnitude,
//! ψ O ψ̃ = ρ O with ρ real.
//!
//! The even part lives in Spin, the odd part in the reflective coset of Pin,
//! both inside the subalgebra of the anchor point. In odd dimension the full
//! point is central and only pure-parity multiples preserve it, so the
//! anchor is the even point O_{2k} — the same element the chiral split uses.


use crate::algebra::multivector::{Multivector, Parity};
use crate::decompose::rotor_log;
use crate::error::GaError;
use crate::points::{
    chiral_split, label_decompose, project_subalgebra, symmetric_dot, LabelVector, PointFrame,
};
use crate::spinors::{master_idempotent, spinor_expand, NullBasis};

/// A pointor in factored form: magnitudes and unit versors for the even and
/// odd halves, anchored to a frame.
#[derive(Clone, Debug)]
pub struct Pointor {
    pub rho_plus: f64,
    pub even: Multivector,
    pub rho_minus: f64,
    pub odd: Option<Multivector>,
    pub frame: PointFrame,
}

/// Outcome of the defining check ψ O ψ̃ = ρ O.
#[derive(Clone, Debug)]
pub enum PointorCheck {
    Pointor { rho: f64 },
    NotAPointor { residual: f64 },
}

impl PointorCheck {
    pub fn rho(&self) -> Option<f64> {
        match self {
            PointorCheck::Pointor { rho } => Some(*rho),
            PointorCheck::NotAPointor { .. } => None,
        }
    }
}

/// One labelled component ρ_s · e^{Σ θ_j b̂_j} · ψ_s^ref of a pointor.
#[derive(Clone, Debug)]
pub struct LabeledPointorComponent {
    pub label: LabelVector,
    pub rho: f64,
    pub angles: Vec<f64>,
    pub reference: Multivector,
    pub value: Multivector,
}

/// The point a pointor must preserve: the frame's point in even dimension,
/// the Cartan product O_{2k} in odd dimension.
pub fn anchor_point(frame: &PointFrame) -> Multivector {
    frame.chiral_anchor()
}

/// Validates parities, versor norms and subalgebra membership, normalizes
/// the versors, and checks the assembled element preserves the anchor.
pub fn make_pointor(
    rho_plus: f64,
    even: &Multivector,
    rho_minus: f64,
    odd: Option<&Multivector>,
    frame: &PointFrame,
    tol: f64,
) -> Result<Pointor, GaError> {
    if even.parity(tol) != Some(Parity::Even) {
        return Err(GaError::NotAVersor("even part has odd grades".into()));
    }
    let n_even = even.versor_scalar_norm()?;
    if n_even <= 0.0 {
        return Err(GaError::NotAVersor(
            "even part must be a Spin element (RR̃ > 0)".into(),
        ));
    }
    let even_unit = even * (1.0 / n_even.sqrt());
    check_membership(&even_unit, frame, tol)?;

    let (rho_minus, odd_unit) = match odd {
        Some(p) if rho_minus != 0.0 => {
            if p.parity(tol) != Some(Parity::Odd) {
                return Err(GaError::NotAVersor("odd part has even grades".into()));
            }
            let n_odd = p.versor_scalar_norm()?;
            let unit = p * (1.0 / n_odd.abs().sqrt());
            check_membership(&unit, frame, tol)?;
            (rho_minus, Some(unit))
        }
        _ => (0.0, None),
    };

    let pointor = Pointor {
        rho_plus: rho_plus * n_even.sqrt(),
        even: even_unit,
        rho_minus,
        odd: odd_unit,
        frame: frame.clone(),
    };
    let psi = assemble(&pointor);
    match is_pointor(&psi, &anchor_point(frame), tol) {
        PointorCheck::Pointor { .. } => Ok(pointor),
        PointorCheck::NotAPointor { residual } => Err(GaError::DecompositionFailed(format!(
            "assembled element does not preserve the anchor point (residual {residual:.3e})"
        ))),
    }
}

fn check_membership(x: &Multivector, frame: &PointFrame, tol: f64) -> Result<(), GaError> {
    let inside = project_subalgebra(x, frame);
    let residual = (x - &inside).norm_inf() / 1f64.max(x.norm_inf());
    if residual > tol.max(1e-9) {
        return Err(GaError::OutsideSubalgebra { residual });
    }
    Ok(())
}

/// ψ = ρ₊R + ρ₋P as a multivector.
pub fn assemble(p: &Pointor) -> Multivector {
    let mut out = &p.even * p.rho_plus;
    if let Some(odd) = &p.odd {
        out = &out + &(odd * p.rho_minus);
    }
    out
}

/// The defining check: ψ O ψ̃ compared against ρ O with the best real ρ.
/// Failure is a value carrying the relative residual, not an error.
pub fn is_pointor(psi: &Multivector, o: &Multivector, tol: f64) -> PointorCheck {
    let image = psi.sandwich_rev(o);
    // least-squares ρ over the coefficient table, constrained real
    let mut num = 0.0;
    let mut den = 0.0;
    for (mask, c) in o.terms() {
        num += (image.coeff(mask) * c.conj()).re;
        den += c.norm_sqr();
    }
    if den == 0.0 {
        return PointorCheck::NotAPointor {
            residual: f64::INFINITY,
        };
    }
    let rho = num / den;
    let residual =
        (&image - &(o * rho)).norm_inf() / 1f64.max(image.norm_inf()).max(rho.abs() * o.norm_inf());
    if residual <= tol {
        PointorCheck::Pointor { rho }
    } else {
        PointorCheck::NotAPointor { residual }
    }
}

/// Weyl halves of a pointor: the parts commuting and anti-commuting with
/// the anchor point.
pub fn pointor_weyl_split(
    psi: &Multivector,
    frame: &PointFrame,
    tol: f64,
) -> Result<(Multivector, Multivector), GaError> {
    chiral_split(psi, frame, tol)
}

/// Reference versor ψ_s^ref: the product of the frame's first plane vectors
/// u_j = v_{2j-1} over the negative labels, normalized.
pub fn reference_state(frame: &PointFrame, label: &LabelVector) -> Result<Multivector, GaError> {
    if label.len() != frame.k() {
        return Err(GaError::FrameMismatch(format!(
            "label length {} does not match k = {}",
            label.len(),
            frame.k()
        )));
    }
    let mut out = Multivector::one(frame.sig());
    for (j, &s) in label.signs().iter().enumerate() {
        if s < 0 {
            let u = &frame.vectors()[2 * j];
            let n2 = symmetric_dot(u, u).re;
            out = out.geometric_product(&(u * (1.0 / n2.abs().sqrt())));
        }
    }
    Ok(out)
}

/// Unit Cartan bivectors of a frame.
fn unit_cartan(frame: &PointFrame) -> Result<Vec<Multivector>, GaError> {
    frame
        .cartan()
        .iter()
        .map(|b| {
            let lam = b.geometric_product(b).try_scalar(1e-9)?.re;
            if lam.abs() < 1e-12 {
                return Err(GaError::UnsupportedSignature(
                    "translation planes have no reference phase".into(),
                ));
            }
            Ok(b * (1.0 / lam.abs().sqrt()))
        })
        .collect()
}

/// Splits a pointor into labelled components and recovers (ρ_s, θ_s) for
/// each against the reference states.
pub fn pointor_label_decompose(
    psi: &Multivector,
    frame: &PointFrame,
    tol: f64,
) -> Result<Vec<LabeledPointorComponent>, GaError> {
    let parts = label_decompose(psi, frame, tol)?;
    let planes = unit_cartan(frame)?;
    let mut out = Vec::with_capacity(parts.len());
    for (label, value) in parts {
        let reference = reference_state(frame, &label)?;
        let x = value.geometric_product(&reference.versor_inverse()?);
        let n = x
            .symmetric_norm()
            .try_scalar(tol.max(1e-9))
            .map_err(|_| component_error(&label, 1.0))?;
        if n.re <= 0.0 || n.im.abs() > 1e-9 * n.norm() {
            return Err(component_error(&label, n.norm()));
        }
        let mut rho = n.re.sqrt();
        let unit = &x * (1.0 / rho);
        let log = match rotor_log(&unit) {
            Ok(log) => log,
            Err(GaError::BranchAmbiguity(_)) => {
                rho = -rho;
                rotor_log(&(&unit * -1.0)).map_err(|_| component_error(&label, 1.0))?
            }
            Err(e) => return Err(e),
        };
        let angles: Vec<f64> = planes
            .iter()
            .map(|b| {
                let den = b.scalar_product(&b.reverse()).re;
                log.scalar_product(&b.reverse()).re / den
            })
            .collect();

        // the component must reassemble from (ρ, θ, reference)
        let mut phase = Multivector::zero(psi.sig());
        for (b, &theta) in planes.iter().zip(&angles) {
            phase = &phase + &(b * theta);
        }
        let rebuilt = &phase
            .exp_bivector()?
            .geometric_product(&reference)
            * rho;
        let residual = (&rebuilt - &value).norm_inf() / 1f64.max(value.norm_inf());
        if residual > tol.max(1e-8) {
            return Err(component_error(&label, residual));
        }
        out.push(LabeledPointorComponent {
            label,
            rho,
            angles,
            reference,
            value,
        });
    }
    Ok(out)
}

fn component_error(label: &LabelVector, residual: f64) -> GaError {
    GaError::DecompositionFailed(format!(
        "component {label} is not expressible over its reference state (residual {residual:.3e})"
    ))
}

/// Theorem-2 verdict for k < 3: both chiral halves must have real symmetric
/// norm, making them (scaled) versors.
#[derive(Clone, Debug)]
pub enum Theorem2Verdict {
    Versors {
        even: Multivector,
        odd: Multivector,
    },
    CrossTermsRemain {
        residual: f64,
    },
}

pub fn theorem2_check(
    psi: &Multivector,
    frame: &PointFrame,
    tol: f64,
) -> Result<Theorem2Verdict, GaError> {
    if frame.k() >= 3 {
        return Err(GaError::UnsupportedSignature(
            "k >= 3 is outside the theorem's range; use the defining pointor check".into(),
        ));
    }
    let (left, right) = chiral_split(psi, frame, tol)?;
    let mut residual = 0.0f64;
    for half in [&left, &right] {
        if half.is_zero(1e-13) {
            continue;
        }
        let n = half.symmetric_norm();
        let scale = 1f64.max(half.norm_inf() * half.norm_inf());
        let off = (&n - &Multivector::complex_scalar(psi.sig(), n.scalar_part())).norm_inf();
        let im = n.scalar_part().im.abs();
        residual = residual.max(off.max(im) / scale);
    }
    if residual > tol {
        return Ok(Theorem2Verdict::CrossTermsRemain { residual });
    }
    Ok(Theorem2Verdict::Versors {
        even: left,
        odd: right,
    })
}

/// Maps a pointor into the minimal left ideal: Ψ = ψ ⊞. The expansion over
/// basis spinors is verified before returning.
pub fn to_algebraic_spinor(
    psi: &Multivector,
    nb: &NullBasis,
    tol: f64,
) -> Result<Multivector, GaError> {
    if psi.sig() != nb.sig() {
        return Err(GaError::FrameMismatch(
            "pointor and null basis live in different algebras".into(),
        ));
    }
    let capital_psi = psi.geometric_product(&master_idempotent(nb));
    spinor_expand(&capital_psi, nb, tol.max(1e-9))?;
    Ok(capital_psi)
}

/// Outcome of the grade-preservation check φ x φ̃ = ρ y with y² = x².
#[derive(Clone, Debug)]
pub enum HestenesCheck {
    GradePreserving { rho: f64, image: Multivector },
    Fails { residual: f64 },
}

pub fn hestenes_check(
    phi: &Multivector,
    x: &Multivector,
    tol: f64,
) -> Result<HestenesCheck, GaError> {
    x.expect_grade(1, 1e-9)?;
    let x2 = symmetric_dot(x, x).re;
    if x2.abs() < 1e-12 * 1f64.max(x.norm_inf().powi(2)) {
        return Err(GaError::NotInvertible { norm: x2.abs() });
    }

    let raw = phi.sandwich_rev(x);
    let residual = raw.off_grade_residual(1);
    if residual > tol {
        return Ok(HestenesCheck::Fails { residual });
    }
    let y_scaled = raw.grade_part(1);
    let y2 = symmetric_dot(&y_scaled, &y_scaled).re;
    let ratio = y2 / x2;
    if ratio < 0.0 {
        return Ok(HestenesCheck::Fails {
            residual: ratio.abs(),
        });
    }
    let mut rho = ratio.sqrt();
    // orient ρ by the symmetric norm when it is scalar, as for versors
    if let Ok(n) = phi.symmetric_norm().try_scalar(1e-9) {
        if n.im.abs() < 1e-9 && n.re < 0.0 {
            rho = -rho;
        }
    }
    if rho.abs() < 1e-300 {
        return Ok(HestenesCheck::Fails { residual: 1.0 });
    }
    Ok(HestenesCheck::GradePreserving {
        rho,
        image: &y_scaled * (1.0 / rho),
    })
}
