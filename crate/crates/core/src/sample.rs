//! Randomized element constructors used by the property-test suites.

use num_complex::Complex64;
use rand::Rng;

use crate::algebra::multivector::Multivector;
use crate::algebra::sig::Signature;

/// Uniform coefficients in [-1, 1) on every blade.
pub fn random_multivector<R: Rng>(rng: &mut R, sig: Signature) -> Multivector {
    let mut m = Multivector::zero(sig);
    for mask in 0..sig.blade_count() {
        m.set_coeff(mask, Complex64::new(rng.gen_range(-1.0..1.0), 0.0));
    }
    m
}

/// Uniform complex coefficients on every blade.
pub fn random_complex_multivector<R: Rng>(rng: &mut R, sig: Signature) -> Multivector {
    let mut m = Multivector::zero(sig);
    for mask in 0..sig.blade_count() {
        m.set_coeff(
            mask,
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        );
    }
    m
}

/// Random grade-1 element supported on the non-degenerate basis vectors.
pub fn random_vector<R: Rng>(rng: &mut R, sig: Signature) -> Multivector {
    let mut m = Multivector::zero(sig);
    for bit in sig.r()..sig.dim() {
        m.set_coeff(1 << bit, Complex64::new(rng.gen_range(-1.0..1.0), 0.0));
    }
    m
}

/// Random vector normalized to |v²| = 1, rejection-sampled away from the
/// null cone.
pub fn random_unit_vector<R: Rng>(rng: &mut R, sig: Signature) -> Multivector {
    loop {
        let v = random_vector(rng, sig);
        let n2 = v.geometric_product(&v).real_scalar_part();
        let e2: f64 = (sig.r()..sig.dim()).map(|b| v.coeff(1 << b).norm_sqr()).sum();
        if e2 > 1e-3 && n2.abs() > 0.05 * e2 {
            return &v * (1.0 / n2.abs().sqrt());
        }
    }
}

/// Product of `reflections` random unit vectors.
pub fn random_versor<R: Rng>(rng: &mut R, sig: Signature, reflections: usize) -> Multivector {
    let mut u = Multivector::one(sig);
    for _ in 0..reflections {
        u = u.geometric_product(&random_unit_vector(rng, sig));
    }
    u
}

/// Random even versor with UŨ = 1, built from an even number of unit
/// vectors (resampled until the norm is positive).
pub fn random_rotor<R: Rng>(rng: &mut R, sig: Signature, reflections: usize) -> Multivector {
    let pairs = reflections / 2;
    loop {
        let u = random_versor(rng, sig, 2 * pairs);
        let n = u.geometric_product(&u.reverse()).real_scalar_part();
        if n > 1e-6 {
            return &u * (1.0 / n.sqrt());
        }
    }
}

/// Random invertible blade of the given grade: the product of a random
/// orthogonalized vector set, with a random overall weight.
pub fn random_blade<R: Rng>(rng: &mut R, sig: Signature, grade: usize) -> Multivector {
    'outer: loop {
        let mut vs: Vec<Multivector> = Vec::with_capacity(grade);
        for _ in 0..grade {
            let mut v = random_vector(rng, sig);
            for w in &vs {
                let d = crate::points::symmetric_dot(&v, w);
                let w2 = crate::points::symmetric_dot(w, w);
                v = &v - &(w * (d / w2));
            }
            let n2 = crate::points::symmetric_dot(&v, &v).re;
            if n2.abs() < 0.05 {
                continue 'outer;
            }
            vs.push(&v * (1.0 / n2.abs().sqrt()));
        }
        let mut out = Multivector::scalar(sig, rng.gen_range(0.25..2.0));
        for v in &vs {
            out = out.geometric_product(v);
        }
        return out;
    }
}

/// Random unit vector inside the span of a frame's vectors.
pub fn random_span_vector<R: Rng>(rng: &mut R, frame: &crate::points::PointFrame) -> Multivector {
    let take = frame.vectors().len() - frame.vectors().len() % 2;
    loop {
        let mut v = Multivector::zero(frame.sig());
        for w in &frame.vectors()[..take] {
            let n2 = crate::points::symmetric_dot(w, w).re;
            let unit = w * (1.0 / n2.abs().sqrt());
            v = &v + &(&unit * rng.gen_range(-1.0..1.0));
        }
        let n2 = crate::points::symmetric_dot(&v, &v).re;
        let e2: f64 = v.terms().map(|(_, c)| c.norm_sqr()).sum();
        if e2 > 1e-3 && n2.abs() > 0.05 * e2 {
            return &v * (1.0 / n2.abs().sqrt());
        }
    }
}

/// Random rotor built from vectors of a frame's plane span; it stabilizes
/// the frame's Cartan point.
pub fn random_frame_rotor<R: Rng>(
    rng: &mut R,
    frame: &crate::points::PointFrame,
    pairs: usize,
) -> Multivector {
    loop {
        let mut u = Multivector::one(frame.sig());
        for _ in 0..2 * pairs {
            u = u.geometric_product(&random_span_vector(rng, frame));
        }
        let n = u.geometric_product(&u.reverse()).real_scalar_part();
        if n > 1e-6 {
            return &u * (1.0 / n.sqrt());
        }
    }
}

/// Random pointor over a frame: ψ = (σ + v)·R with R a span rotor and v a
/// span vector, split into its even and odd versor halves.
pub fn random_pointor<R: Rng>(
    rng: &mut R,
    frame: &crate::points::PointFrame,
) -> crate::pointors::Pointor {
    let pairs = rng.gen_range(0..=frame.k());
    let rotor = random_frame_rotor(rng, frame, pairs);
    let sigma = rng.gen_range(0.2..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let rho_minus = rng.gen_range(0.2..2.0);
    let v = random_span_vector(rng, frame);
    let odd = v.geometric_product(&rotor);
    crate::pointors::make_pointor(sigma, &rotor, rho_minus, Some(&odd), frame, 1e-8)
        .expect("span construction always yields a pointor")
}

/// Random pointor from the labelled family: Σ_s ρ_s e^{Σθ_j b̂_j} ψ_s^ref
/// with random magnitudes and angles over a random non-empty label subset.
pub fn random_label_pointor<R: Rng>(
    rng: &mut R,
    frame: &crate::points::PointFrame,
) -> Multivector {
    let sig = frame.sig();
    let k = frame.k();
    let planes: Vec<Multivector> = frame
        .cartan()
        .iter()
        .map(|b| {
            let lam = b.geometric_product(b).real_scalar_part();
            b * (1.0 / lam.abs().sqrt())
        })
        .collect();
    loop {
        let mut psi = Multivector::zero(sig);
        let mut any = false;
        for index in 0..1usize << k {
            if !rng.gen_bool(0.8) {
                continue;
            }
            any = true;
            let label = crate::points::LabelVector::from_index(k, index);
            let rho = rng.gen_range(0.2..2.0);
            let mut phase = Multivector::one(sig);
            for b in &planes {
                let theta = rng.gen_range(-3.0..3.0);
                phase = phase.geometric_product(&(b * theta).exp_bivector().expect("simple"));
            }
            let reference =
                crate::pointors::reference_state(frame, &label).expect("label length");
            psi = &psi + &(&phase.geometric_product(&reference) * rho);
        }
        if any {
            return psi;
        }
    }
}

/// Random unit bivector with b² = -1: the wedge of two orthonormalized
/// vectors spanning a definite plane.
pub fn random_rotation_plane<R: Rng>(rng: &mut R, sig: Signature) -> Multivector {
    loop {
        let u = random_unit_vector(rng, sig);
        let v = random_vector(rng, sig);
        // orthogonalize v against u with the metric
        let uv = (u.geometric_product(&v).real_scalar_part()
            + v.geometric_product(&u).real_scalar_part())
            / 2.0;
        let u2 = u.geometric_product(&u).real_scalar_part();
        let v_perp = &v - &(&u * (uv / u2));
        let n2 = v_perp.geometric_product(&v_perp).real_scalar_part();
        if n2.abs() < 0.05 {
            continue;
        }
        let v_unit = &v_perp * (1.0 / n2.abs().sqrt());
        let b = u.outer_product(&v_unit);
        let b2 = b.geometric_product(&b).real_scalar_part();
        if (b2 + 1.0).abs() < 1e-9 {
            return b;
        }
    }
}
