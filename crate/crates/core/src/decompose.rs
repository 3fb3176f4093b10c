//! Invariant decomposition of bivectors and versors into commuting simple
//! factors, geometric gauge transformations, rotor logarithm, and polar
//! decomposition.
//!
//! The split works at the matrix level: a bivector acts on vectors through
//! the commutator, a versor through conjugation. Real eigenvalue analysis of
//! that action (Schur eigenvalues plus SVD null spaces) yields the invariant
//! 2-planes, and each factor is reconstructed from its plane restriction.
//! Degenerate eigenvalues are grouped; any orthogonal pairing of the grouped
//! planes is valid and the result carries a `degenerate` flag.

use nalgebra::linalg::Schur;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::multivector::{Multivector, Parity};
use crate::algebra::sig::Signature;
use crate::error::GaError;

/// Clustering tolerance for eigenvalues of unit-versor actions.
const EIG_TOL: f64 = 1e-6;
/// Internal consistency tolerance for reconstruction checks.
const CHECK_TOL: f64 = 1e-7;

/// Classification of a simple bivector by the sign of its square.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorKind {
    /// λ > 0: generates a boost.
    Boost,
    /// λ = 0: null bivector, generates a translation (or null rotation).
    Translation,
    /// λ < 0: generates a rotation.
    Rotation,
}

/// A simple (2-blade) bivector together with its scalar square.
#[derive(Clone, Debug)]
pub struct SimpleFactor {
    pub bivector: Multivector,
    pub lambda: f64,
    pub kind: FactorKind,
}

impl SimpleFactor {
    fn classify(bivector: Multivector, lambda: f64) -> Self {
        let scale = 1f64.max(bivector.norm_inf() * bivector.norm_inf());
        let kind = if lambda > 1e-9 * scale {
            FactorKind::Boost
        } else if lambda < -1e-9 * scale {
            FactorKind::Rotation
        } else {
            FactorKind::Translation
        };
        Self {
            bivector,
            lambda,
            kind,
        }
    }
}

/// Result of splitting a bivector into commuting simple components.
#[derive(Clone, Debug)]
pub struct BivectorSplit {
    /// Simple commuting bivectors summing to the input, ordered by
    /// descending |λ|.
    pub factors: Vec<SimpleFactor>,
    /// Set when an eigenvalue was repeated and the plane pairing was an
    /// arbitrary orthogonal choice.
    pub degenerate: bool,
}

/// Invariant decomposition of a versor into commuting bireflections, plus
/// one residual reflection for odd reflection counts.
///
/// The reconstruction is `scale · (∏ factors) · residual`; each factor is a
/// versor-normalized bireflection and the order of the commuting parts is
/// immaterial.
#[derive(Clone, Debug)]
pub struct InvariantDecomposition {
    pub source: Multivector,
    pub scale: f64,
    pub factors: Vec<Multivector>,
    pub residual_reflection: Option<Multivector>,
    pub degenerate: bool,
}

impl InvariantDecomposition {
    /// Number of commuting simple parts (bireflections plus the residual).
    pub fn part_count(&self) -> usize {
        self.factors.len() + usize::from(self.residual_reflection.is_some())
    }

    /// Multiplies the parts back together.
    pub fn reconstruct(&self) -> Multivector {
        let mut out = Multivector::scalar(self.source.sig(), self.scale);
        for f in &self.factors {
            out = out.geometric_product(f);
        }
        if let Some(r) = &self.residual_reflection {
            out = out.geometric_product(r);
        }
        out
    }
}

/// A gauged reflection pair: the rotated vectors and a flag marking the
/// parallel (no gauge plane) case.
#[derive(Clone, Debug)]
pub struct GaugedPair {
    pub u: Multivector,
    pub v: Multivector,
    pub parallel: bool,
}

// ---------------------------------------------------------------------
// Metric helpers on coordinate vectors
// ---------------------------------------------------------------------

fn g_ip(sig: Signature, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (0..sig.dim()).map(|i| a[i] * b[i] * sig.metric(i)).sum()
}

/// Eigenvalues by bounded Schur iteration. Exactly degenerate spectra (the
/// ±1-heavy matrices of reflections and half-turns) can stall the QR shift
/// strategy; a tiny deterministic perturbation breaks the tie while moving
/// the eigenvalues far less than the clustering tolerance consumes.
fn robust_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex64>, GaError> {
    if let Some(s) = Schur::try_new(m.clone(), f64::EPSILON, 20_000) {
        return Ok(s.complex_eigenvalues().iter().copied().collect());
    }
    let n = m.nrows();
    let scale = m.amax().max(1e-300);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for k in 0..6 {
        let eps = scale * 1e-11 * 10f64.powi(k);
        let noise = DMatrix::<f64>::from_fn(n, n, |_, _| rng.gen_range(-eps..eps));
        if let Some(s) = Schur::try_new(m + noise, f64::EPSILON, 20_000) {
            return Ok(s.complex_eigenvalues().iter().copied().collect());
        }
    }
    Err(GaError::DecompositionFailed(
        "eigenvalue iteration did not converge".into(),
    ))
}

fn bounded_svd_vt(mat: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>), GaError> {
    let svd = mat
        .clone()
        .try_svd(false, true, f64::EPSILON, 20_000)
        .ok_or_else(|| {
            GaError::DecompositionFailed("singular value iteration did not converge".into())
        })?;
    Ok((svd.singular_values, svd.v_t.expect("requested")))
}

fn mv_of(sig: Signature, v: &DVector<f64>) -> Multivector {
    Multivector::from_vector_coords(sig, v.as_slice())
}

/// Null space of a small matrix: the `expected` right singular vectors with
/// the smallest singular values. A numerically zero matrix returns the
/// standard basis for determinism.
fn kernel_basis(mat: &DMatrix<f64>, expected: usize) -> Result<Vec<DVector<f64>>, GaError> {
    let n = mat.ncols();
    if mat.amax() < 1e-12 {
        return Ok((0..expected.min(n))
            .map(|i| DVector::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 }))
            .collect());
    }
    let (singular_values, v_t) = bounded_svd_vt(mat)?;
    let mut rows: Vec<(f64, usize)> = singular_values
        .iter()
        .copied()
        .enumerate()
        .map(|(i, s)| (s, i))
        .collect();
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    rows.truncate(expected);
    Ok(rows.iter().map(|&(_, i)| v_t.row(i).transpose()).collect())
}

/// Picks the combination of basis vectors with the largest metric square,
/// searching single vectors and pairwise sums/differences.
fn pick_non_null(sig: Signature, basis: &[DVector<f64>]) -> Option<DVector<f64>> {
    let mut best: Option<(f64, DVector<f64>)> = None;
    let mut consider = |v: DVector<f64>| {
        let e = v.norm_squared();
        if e < 1e-20 {
            return;
        }
        let score = g_ip(sig, &v, &v).abs() / e;
        if best.as_ref().map_or(true, |(s, _)| score > *s) {
            best = Some((score, v));
        }
    };
    for v in basis {
        consider(v.clone());
    }
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            consider(&basis[i] + &basis[j]);
            consider(&basis[i] - &basis[j]);
        }
    }
    match best {
        Some((score, v)) if score > 1e-6 => {
            let n = g_ip(sig, &v, &v).abs().sqrt();
            Some(v / n)
        }
        _ => None,
    }
}

/// One factor-carrying invariant plane: g-orthonormal basis vectors plus the
/// 2×2 restriction of the acting map in that basis.
struct Plane {
    x: DVector<f64>,
    y: DVector<f64>,
    a: f64,
    b: f64,
}

/// Applies the other clusters' annihilating polynomials to a vector: the
/// components outside the target eigenspace collapse while the target plane
/// is only rescaled, sharpening null-space vectors contaminated by nearby
/// eigenvalues.
fn refine_into_eigenspace(v: &DVector<f64>, others: &[DMatrix<f64>]) -> DVector<f64> {
    let mut out = v.clone();
    for m in others {
        out = m * &out;
        let n = out.norm();
        if n < 1e-250 {
            return v.clone();
        }
        out /= n;
    }
    out
}

/// Extracts `pairs` invariant planes from the null space of the plane
/// polynomial `m² - t·m + 1`, pairing x with its image. `others` holds the
/// remaining clusters' polynomials for the refinement pass.
fn extract_planes(
    sig: Signature,
    m: &DMatrix<f64>,
    t: f64,
    pairs: usize,
    others: &[DMatrix<f64>],
) -> Result<Vec<Plane>, GaError> {
    let n = m.ncols();
    let poly = m * m - m * t + DMatrix::<f64>::identity(n, n);
    let mut basis = kernel_basis(&poly, 2 * pairs)?;
    for v in basis.iter_mut() {
        *v = refine_into_eigenspace(v, others);
    }
    if std::env::var("GA_TRACE").is_ok() {
        eprintln!("TRACE extract_planes: t={t} pairs={pairs} n_others={}", others.len());
        for v in &basis {
            let pv = &poly * v;
            eprintln!("  basis |poly v| = {:.3e}", pv.norm());
        }
    }
    let mut planes = Vec::with_capacity(pairs);
    for _ in 0..pairs {
        let x = pick_non_null(sig, &basis).ok_or_else(|| {
            GaError::DecompositionFailed("no non-null direction in invariant plane".into())
        })?;
        let mx = m * &x;
        let gxx = g_ip(sig, &x, &x);
        let a = g_ip(sig, &mx, &x) / gxx;
        let mut y = &mx - &x * a;
        let gyy = g_ip(sig, &y, &y);
        if gyy.abs() < 1e-12 {
            return Err(GaError::DecompositionFailed(
                "invariant plane collapsed to a line".into(),
            ));
        }
        y /= gyy.abs().sqrt();
        let b = g_ip(sig, &mx, &y) / g_ip(sig, &y, &y);
        // deflate the remaining basis
        let gy = g_ip(sig, &y, &y);
        for v in basis.iter_mut() {
            let cx = g_ip(sig, v, &x) / gxx;
            let cy = g_ip(sig, v, &y) / gy;
            *v -= &x * cx + &y * cy;
        }
        basis.retain(|v| v.norm() > 1e-8);
        planes.push(Plane { x, y, a, b });
    }
    Ok(planes)
}

/// Builds the bireflection F = α + β x∧y whose conjugation restricted to the
/// plane sends x to a·x + b·y. Covers rotations, boosts, half-turns and
/// negative-norm (anti) factors through the sign structure of (a, σ₁σ₂).
fn solve_bireflection(sig: Signature, plane: &Plane) -> Result<Multivector, GaError> {
    let s1 = g_ip(sig, &plane.x, &plane.x).signum();
    let s2 = g_ip(sig, &plane.y, &plane.y).signum();
    let xm = mv_of(sig, &plane.x);
    let ym = mv_of(sig, &plane.y);
    let p = xm.geometric_product(&ym);

    let (alpha, beta) = if s1 * s2 > 0.0 {
        // definite plane: conjugation is a rotation by 2t
        let two_t = f64::atan2(-s1 * plane.b, plane.a);
        ((two_t / 2.0).cos(), (two_t / 2.0).sin())
    } else if plane.a >= 0.0 {
        // boost: a = cosh 2t
        let two_t = f64::asinh(-s1 * plane.b);
        ((two_t / 2.0).cosh(), (two_t / 2.0).sinh())
    } else {
        // negative-norm factor: a = -cosh 2t
        let two_t = f64::asinh(s1 * plane.b);
        ((two_t / 2.0).sinh(), (two_t / 2.0).cosh())
    };

    let f = &(&Multivector::scalar(sig, alpha) + &(&p * beta));
    // verify the plane restriction
    let image = f.sandwich(&xm)?;
    let expected = &(&xm * plane.a) + &(&ym * plane.b);
    if !image.approx_eq(&expected, CHECK_TOL) {
        return Err(GaError::DecompositionFailed(
            "factor does not reproduce its plane action".into(),
        ));
    }
    Ok(f.clone())
}

// ---------------------------------------------------------------------
// Bivector split
// ---------------------------------------------------------------------

/// Splits a pure bivector into commuting simple components (the Lie-algebra
/// level invariant decomposition). The sum of the returned bivectors equals
/// the input, pairwise commutators vanish, and each factor is a 2-blade.
pub fn bivector_split(b: &Multivector) -> Result<BivectorSplit, GaError> {
    b.expect_grade(2, 1e-9)?;
    let sig = b.sig();
    if sig.r() > 1 {
        return Err(GaError::UnsupportedSignature(
            "bivector split supports at most one degenerate dimension".into(),
        ));
    }

    // Peel the degenerate content: B = B_nd + e0 ∧ t.
    let b_nd = b.nondegenerate_part();
    let mut t_coords = DVector::<f64>::zeros(sig.dim());
    if sig.r() == 1 {
        for bit in 1..sig.dim() {
            t_coords[bit] = b.coeff(1 | (1 << bit)).re;
        }
    }

    let (mut raw, degenerate) = split_nondegenerate(&b_nd)?;

    if sig.r() == 1 && t_coords.norm() > 0.0 {
        let e0 = Multivector::from_term(sig, 1, 1.0.into());
        let mut t_rest = t_coords.clone();
        for (factor, plane) in raw.iter_mut() {
            // in-plane translation component attaches to this factor
            let cx = g_ip(sig, &t_coords, &plane.x) / g_ip(sig, &plane.x, &plane.x);
            let cy = g_ip(sig, &t_coords, &plane.y) / g_ip(sig, &plane.y, &plane.y);
            let t_k = &plane.x * cx + &plane.y * cy;
            if t_k.norm() > 1e-14 {
                let null_part = e0.outer_product(&mv_of(sig, &t_k));
                let merged = &factor.bivector + &null_part;
                *factor = SimpleFactor::classify(merged, factor.lambda);
                t_rest -= t_k;
            }
        }
        if t_rest.norm() > 1e-12 {
            let null_factor = e0.outer_product(&mv_of(sig, &t_rest));
            raw.push((SimpleFactor::classify(null_factor, 0.0), dummy_plane(sig)));
        }
    }

    let mut factors: Vec<SimpleFactor> = raw.into_iter().map(|(f, _)| f).collect();

    // residual check: whatever the planes did not capture must itself be a
    // commuting simple null bivector, or the spectrum was unsupported
    let mut sum = Multivector::zero(sig);
    for f in &factors {
        sum = &sum + &f.bivector;
    }
    let resid = b - &sum;
    if !resid.is_zero(1e-9 * 1f64.max(b.norm_inf())) {
        let wedge = resid.outer_product(&resid);
        let commutes = factors
            .iter()
            .all(|f| resid.commutator_product(&f.bivector).is_zero(CHECK_TOL));
        if wedge.is_zero(CHECK_TOL * 1f64.max(resid.norm_inf().powi(2))) && commutes {
            let lambda = resid.geometric_product(&resid).real_scalar_part();
            factors.push(SimpleFactor::classify(resid, lambda));
        } else {
            return Err(GaError::DecompositionFailed(
                "non-real eigenvalue structure; only Euclidean and Lorentzian \
                 signatures split over the reals"
                    .into(),
            ));
        }
    }

    factors.sort_by(|a, b| b.lambda.abs().total_cmp(&a.lambda.abs()));
    Ok(BivectorSplit { factors, degenerate })
}

fn dummy_plane(sig: Signature) -> Plane {
    Plane {
        x: DVector::zeros(sig.dim()),
        y: DVector::zeros(sig.dim()),
        a: 0.0,
        b: 0.0,
    }
}

/// Spectral split of a bivector with no degenerate components. Returns each
/// simple factor together with its invariant plane.
fn split_nondegenerate(b: &Multivector) -> Result<(Vec<(SimpleFactor, Plane)>, bool), GaError> {
    let sig = b.sig();
    let d = sig.dim();
    if b.is_zero(1e-14) {
        return Ok((Vec::new(), false));
    }

    // adjoint action w ↦ B × w on the vector space
    let mut adj = DMatrix::<f64>::zeros(d, d);
    for i in 0..d {
        let e_i = Multivector::from_term(sig, 1 << i, 1.0.into());
        let col = b.commutator_product(&e_i);
        adj.set_column(i, &col.grade1_coords());
    }

    let scale = adj.amax().max(1e-30);
    let eigs = robust_eigenvalues(&adj)?;

    // cluster eigenvalues: iθ pairs are rotations, ±φ pairs are boosts
    let mut rot: Vec<(f64, usize)> = Vec::new(); // (θ, multiplicity)
    let mut boost: Vec<(f64, usize)> = Vec::new(); // (φ, multiplicity)
    for e in eigs.iter() {
        if e.im > EIG_TOL * scale {
            cluster(&mut rot, e.im);
        } else if e.im.abs() <= EIG_TOL * scale && e.re > EIG_TOL * scale {
            cluster(&mut boost, e.re);
        }
    }

    // λ² values for every active cluster, rotations negative
    let mut active: Vec<(f64, f64, usize)> = Vec::new(); // (λ², rate, pairs)
    for &(theta, mult) in &rot {
        active.push((-theta * theta, theta, mult));
    }
    for &(phi, mult) in &boost {
        active.push((phi * phi, phi, mult));
    }

    // annihilating polynomials of the other clusters plus the kernel
    let adj_poly = |l2: f64| {
        let p = &adj * &adj - DMatrix::<f64>::identity(d, d) * l2;
        let n = p.amax().max(1.0);
        p / n
    };
    let kernel_poly = &adj / scale;

    let mut out = Vec::new();
    let mut degenerate = false;
    for (idx, &(l2, rate, mult)) in active.iter().enumerate() {
        degenerate |= mult > 1;
        // refine rotation targets only; see decompose_body
        let others: Vec<DMatrix<f64>> = if l2 < 0.0 {
            let mut o: Vec<DMatrix<f64>> = active
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != idx)
                .map(|(_, &(o2, _, _))| adj_poly(o2))
                .collect();
            o.push(kernel_poly.clone());
            o
        } else {
            Vec::new()
        };
        let planes = extract_adjoint_planes(sig, &adj, l2, rate, mult, &others)?;
        for plane in planes {
            let (factor, plane) = project_component(b, plane)?;
            out.push((factor, plane));
        }
    }

    Ok((out, degenerate))
}

fn cluster(groups: &mut Vec<(f64, usize)>, value: f64) {
    for (v, count) in groups.iter_mut() {
        if (*v - value).abs() <= EIG_TOL * 1f64.max(v.abs()) {
            *count += 1;
            *v = (*v * *count as f64 + value) / (*count as f64 + 1.0);
            return;
        }
    }
    groups.push((value, 1));
}

/// Invariant planes of the adjoint map for eigenvalue square `lambda2`
/// (negative for rotations, positive for boosts); `rate` is |eigenvalue|.
fn extract_adjoint_planes(
    sig: Signature,
    adj: &DMatrix<f64>,
    lambda2: f64,
    rate: f64,
    pairs: usize,
    others: &[DMatrix<f64>],
) -> Result<Vec<Plane>, GaError> {
    let n = adj.ncols();
    let poly = adj * adj - DMatrix::<f64>::identity(n, n) * lambda2;
    let mut basis = kernel_basis(&poly, 2 * pairs)?;
    for v in basis.iter_mut() {
        *v = refine_into_eigenspace(v, others);
    }
    let mut planes = Vec::with_capacity(pairs);
    for _ in 0..pairs {
        let x = pick_non_null(sig, &basis).ok_or_else(|| {
            GaError::DecompositionFailed("no non-null direction in invariant plane".into())
        })?;
        let mut y = adj * &x / rate;
        let gyy = g_ip(sig, &y, &y);
        if gyy.abs() < 1e-12 {
            return Err(GaError::DecompositionFailed(
                "invariant plane collapsed to a line".into(),
            ));
        }
        y /= gyy.abs().sqrt();
        let gxx = g_ip(sig, &x, &x);
        let gy = g_ip(sig, &y, &y);
        for v in basis.iter_mut() {
            let cx = g_ip(sig, v, &x) / gxx;
            let cy = g_ip(sig, v, &y) / gy;
            *v -= &x * cx + &y * cy;
        }
        basis.retain(|v| v.norm() > 1e-8);
        planes.push(Plane { x, y, a: 0.0, b: 0.0 });
    }
    Ok(planes)
}

/// Projects the bivector onto a plane's blade, producing the simple factor.
fn project_component(
    b: &Multivector,
    plane: Plane,
) -> Result<(SimpleFactor, Plane), GaError> {
    let sig = b.sig();
    let xm = mv_of(sig, &plane.x);
    let ym = mv_of(sig, &plane.y);
    let blade = xm.outer_product(&ym);
    let denom = blade.scalar_product(&blade.reverse()).re;
    if denom.abs() < 1e-12 {
        return Err(GaError::DecompositionFailed("null projection plane".into()));
    }
    let coeff = b.scalar_product(&blade.reverse()).re / denom;
    let component = &blade * coeff;
    let lambda = component.geometric_product(&component).real_scalar_part();
    Ok((SimpleFactor::classify(component, lambda), plane))
}

// ---------------------------------------------------------------------
// Versor decomposition
// ---------------------------------------------------------------------

/// Invariant decomposition of a versor (Theorem 1 shape): ⌊ℓ/2⌋ commuting
/// bireflections plus, for odd ℓ, one residual reflection that commutes with
/// every factor. Degenerate metrics peel the translation content off the
/// non-degenerate body first.
pub fn invariant_decompose(u: &Multivector) -> Result<InvariantDecomposition, GaError> {
    let sig = u.sig();
    match sig.r() {
        0 => decompose_body(u),
        1 => decompose_degenerate(u),
        _ => Err(GaError::UnsupportedSignature(
            "versor decomposition supports at most one degenerate dimension".into(),
        )),
    }
}

fn conjugation_matrix(sig: Signature, unit: &Multivector) -> Result<DMatrix<f64>, GaError> {
    let d = sig.dim();
    let mut m = DMatrix::<f64>::zeros(d, d);
    for i in 0..d {
        let e_i = Multivector::from_term(sig, 1 << i, 1.0.into());
        let img = unit.versor_transform(&e_i)?;
        img.expect_grade(1, CHECK_TOL)
            .map_err(|_| GaError::NotAVersor("conjugation does not preserve vectors".into()))?;
        m.set_column(i, &img.grade1_coords());
    }
    Ok(m)
}

/// Peels one hyperbolic factor: the plane spanned by the eigenvectors of
/// the largest real |λ| ≠ 1 pair. Shifted null spaces keep the extraction
/// well-conditioned regardless of the rapidity.
fn peel_hyperbolic(
    sig: Signature,
    v: &Multivector,
) -> Result<Option<Multivector>, GaError> {
    let d = sig.dim();
    let m = conjugation_matrix(sig, v)?;
    let eigs = robust_eigenvalues(&m)?;
    let mut lam: Option<f64> = None;
    for e in eigs.iter() {
        if e.im.abs() <= EIG_TOL && (e.re.abs() - 1.0).abs() > EIG_TOL && e.re.abs() > 1.0 {
            if lam.map_or(true, |best: f64| e.re.abs() > best.abs()) {
                lam = Some(e.re);
            }
        }
    }
    let Some(lam) = lam else { return Ok(None) };
    let t = lam + 1.0 / lam;

    // both null directions as DOMINANT eigenvectors: w₊ from M, w₋ from
    // M⁻¹ (where its eigenvalue is again λ). Shifting by the small
    // reciprocal eigenvalue instead would cost a factor e^{2φ} in accuracy.
    let id = DMatrix::<f64>::identity(d, d);
    let m_inv = conjugation_matrix(sig, &v.versor_inverse()?)?;
    let w_plus = kernel_basis(&(&m - &id * lam), 1)?
        .pop()
        .ok_or_else(|| GaError::DecompositionFailed("missing boost eigenvector".into()))?;
    let w_minus = kernel_basis(&(&m_inv - &id * lam), 1)?
        .pop()
        .ok_or_else(|| GaError::DecompositionFailed("missing boost eigenvector".into()))?;
    let cross = g_ip(sig, &w_plus, &w_minus);
    if cross.abs() < 1e-9 {
        return Err(GaError::DecompositionFailed(
            "degenerate hyperbolic eigenvector pair".into(),
        ));
    }
    let mut x = &w_plus + &w_minus;
    x /= g_ip(sig, &x, &x).abs().sqrt();
    let mx = &m * &x;
    let gxx = g_ip(sig, &x, &x);
    let a = g_ip(sig, &mx, &x) / gxx;
    let mut y = &mx - &x * a;
    let gyy = g_ip(sig, &y, &y);
    if gyy.abs() < 1e-12 {
        return Err(GaError::DecompositionFailed(
            "hyperbolic plane collapsed to a line".into(),
        ));
    }
    y /= gyy.abs().sqrt();
    let b = g_ip(sig, &mx, &y) / g_ip(sig, &y, &y);
    let plane = Plane { x, y, a, b };
    // the measured a must match the eigenvalue trace
    if (a - t / 2.0).abs() > 1e-6 * 1f64.max(t.abs()) {
        return Err(GaError::DecompositionFailed(
            "hyperbolic plane restriction is inconsistent".into(),
        ));
    }
    Ok(Some(solve_bireflection(sig, &plane)?))
}

/// Divides a hyperbolic factor out of a versor in unit-rapidity steps with
/// compensated products. A single division cancels e^{2φ}-sized terms down
/// to order one and loses φ-dependent precision; stepping keeps the error
/// at a rapidity-independent multiple of machine epsilon.
fn divide_out_hyperbolic(v: &Multivector, f: &Multivector) -> Result<Multivector, GaError> {
    let sig = v.sig();
    let alpha = f.real_scalar_part();
    let bv = f.grade_part(2);
    let beta2 = bv.geometric_product(&bv).real_scalar_part();
    if beta2 <= 0.0 {
        // not a hyperbolic plane after all; plain division
        return Ok(v.geometric_product_compensated(&f.versor_inverse()?));
    }
    let beta = beta2.sqrt();
    let plane = &bv * (1.0 / beta);
    let n = alpha * alpha - beta * beta;

    // boost: F = exp(T·P̂); anti-norm: F = exp(T·P̂)·P̂
    let (rapidity, anti) = if n > 0.0 {
        (f64::asinh(beta / n.sqrt()), false)
    } else {
        (f64::asinh(alpha / (-n).sqrt()), true)
    };
    let mut out = v.clone();
    if anti {
        out = out.geometric_product_compensated(&plane.versor_inverse()?);
    }
    let steps = rapidity.abs().ceil().max(1.0);
    let step = &(&Multivector::scalar(sig, (rapidity / steps).cosh())
        - &(&plane * (rapidity / steps).sinh()));
    for _ in 0..steps as usize {
        out = out.geometric_product_compensated(step);
    }
    Ok(out)
}

fn decompose_body(u: &Multivector) -> Result<InvariantDecomposition, GaError> {
    let sig = u.sig();
    let d = sig.dim();
    let norm = u.versor_scalar_norm()?;
    let unit = u * (1.0 / norm.abs().sqrt());
    let parity = unit
        .parity(1e-9)
        .ok_or_else(|| GaError::NotAVersor("mixed grade parity".into()))?;

    // hyperbolic factors scale the conjugation matrix by e^{2φ} and poison
    // every null-space extraction after them, so divide them out first;
    // what remains has its whole spectrum on the unit circle
    let mut factors = Vec::new();
    let mut remainder = unit.clone();
    while let Some(f) = peel_hyperbolic(sig, &remainder)? {
        remainder = divide_out_hyperbolic(&remainder, &f)?;
        factors.push(f);
        if factors.len() > d / 2 {
            return Err(GaError::DecompositionFailed(
                "hyperbolic peeling did not terminate".into(),
            ));
        }
    }

    let m = conjugation_matrix(sig, &remainder)?;
    let eigs = robust_eigenvalues(&m)?;
    let mut rot: Vec<(f64, usize)> = Vec::new(); // trace clusters for e^{±iθ}
    let mut hyp: Vec<(f64, usize)> = Vec::new(); // trace clusters for ±e^{±φ}
    let mut minus = 0usize;
    for e in eigs.iter() {
        if e.im > EIG_TOL {
            cluster(&mut rot, 2.0 * e.re);
        } else if e.im.abs() <= EIG_TOL {
            if (e.re + 1.0).abs() <= EIG_TOL {
                minus += 1;
            } else if (e.re - 1.0).abs() > EIG_TOL {
                let t = e.re + 1.0 / e.re;
                if e.re > 0.0 || e.re < 0.0 {
                    cluster_half(&mut hyp, t);
                }
            }
        }
    }

    // one annihilating polynomial per cluster (including the fixed space
    // and the -1 eigenspace), for cross-eigenspace refinement
    let identity = DMatrix::<f64>::identity(d, d);
    // (trace, pairs, is_rotation)
    let mut active: Vec<(f64, usize, bool)> = Vec::new();
    for &(t, mult) in &rot {
        active.push((t, mult, true));
    }
    for &(t, mult) in &hyp {
        if mult / 2 > 0 {
            active.push((t, mult / 2, false));
        }
    }
    let cluster_poly = |t: f64| {
        let p = &m * &m - &m * t + &identity;
        let n = p.amax().max(1.0);
        p / n
    };
    let minus_poly = (&m + &identity) / (m.amax() + 1.0);
    let fixed_poly = (&m - &identity) / (m.amax() + 1.0);
    let others_for = |idx: Option<usize>| -> Vec<DMatrix<f64>> {
        let mut out: Vec<DMatrix<f64>> = active
            .iter()
            .enumerate()
            .filter(|(j, _)| Some(*j) != idx)
            .map(|(_, &(t, _, _))| cluster_poly(t))
            .collect();
        if minus > 0 && idx.is_some() {
            out.push(minus_poly.clone());
        }
        out.push(fixed_poly.clone());
        out
    };

    let mut degenerate = false;

    for (idx, &(t, pairs, is_rotation)) in active.iter().enumerate() {
        degenerate |= pairs > 1;
        // polynomials act isotropically on definite (rotation) planes but
        // squash indefinite ones toward a null ray, so only rotation
        // targets are refined
        let others = if is_rotation {
            others_for(Some(idx))
        } else {
            Vec::new()
        };
        for plane in extract_planes(sig, &m, t, pairs, &others)? {
            factors.push(solve_bireflection(sig, &plane)?);
        }
    }

    // the -1 eigenspace: half-turn planes plus, for odd versors, the
    // residual reflection
    let mut residual = None;
    if minus > 0 {
        let mp = &m + &identity;
        // every cluster polynomial restricts to the scalar p(-1) here; drop
        // the ones that nearly annihilate the eigenspace itself
        let others: Vec<DMatrix<f64>> = active
            .iter()
            .filter(|&&(t, _, _)| (2.0 + t).abs() > 1e-3)
            .map(|&(t, _, _)| cluster_poly(t))
            .chain(std::iter::once(fixed_poly.clone()))
            .collect();
        let raw: Vec<DVector<f64>> = kernel_basis(&mp, minus)?
            .iter()
            .map(|v| refine_into_eigenspace(v, &others))
            .collect();
        let basis = g_orthonormalize(sig, raw)?;
        degenerate |= minus > 2 || (minus > 1 && parity == Parity::Odd);
        let mut it = basis.into_iter().peekable();
        while let Some(x) = it.next() {
            match it.next() {
                Some(y) => {
                    let plane = Plane { x, y, a: -1.0, b: 0.0 };
                    factors.push(solve_bireflection(sig, &plane)?);
                }
                None => {
                    residual = Some(mv_of(sig, &x));
                }
            }
        }
    }

    match (parity, &residual) {
        (Parity::Odd, None) | (Parity::Even, Some(_)) => {
            return Err(GaError::DecompositionFailed(
                "parity inconsistent with the -1 eigenspace".into(),
            ));
        }
        _ => {}
    }

    finish_decomposition(u, factors, residual, degenerate)
}

fn cluster_half(groups: &mut Vec<(f64, usize)>, t: f64) {
    // λ and 1/λ contribute the same trace, so each plane is counted twice
    for (v, count) in groups.iter_mut() {
        if (*v - t).abs() <= EIG_TOL * 1f64.max(v.abs()) {
            *count += 1;
            return;
        }
    }
    groups.push((t, 1));
}

fn g_orthonormalize(
    sig: Signature,
    raw: Vec<DVector<f64>>,
) -> Result<Vec<DVector<f64>>, GaError> {
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(raw.len());
    let mut pool = raw;
    while !pool.is_empty() {
        let x = pick_non_null(sig, &pool).ok_or_else(|| {
            GaError::DecompositionFailed("null direction in -1 eigenspace".into())
        })?;
        let gxx = g_ip(sig, &x, &x);
        for v in pool.iter_mut() {
            let c = g_ip(sig, v, &x) / gxx;
            *v -= &x * c;
        }
        pool.retain(|v| v.norm() > 1e-8);
        out.push(x);
    }
    Ok(out)
}

fn finish_decomposition(
    u: &Multivector,
    factors: Vec<Multivector>,
    residual: Option<Multivector>,
    degenerate: bool,
) -> Result<InvariantDecomposition, GaError> {
    let sig = u.sig();
    let mut parts = Multivector::one(sig);
    for f in &factors {
        parts = parts.geometric_product(f);
    }
    if let Some(r) = &residual {
        parts = parts.geometric_product(r);
    }
    // least-squares scale over the coefficient table; dividing u by the
    // parts instead would amplify their error by the squared factor norms
    let mut num = 0.0;
    let mut den = 0.0;
    for (mask, c) in parts.terms() {
        num += (u.coeff(mask) * c.conj()).re;
        den += c.norm_sqr();
    }
    if den == 0.0 {
        return Err(GaError::DecompositionFailed(
            "parts do not span the versor".into(),
        ));
    }
    let dec = InvariantDecomposition {
        source: u.clone(),
        scale: num / den,
        factors,
        residual_reflection: residual,
        degenerate,
    };
    if !dec.reconstruct().approx_eq(u, CHECK_TOL) {
        return Err(GaError::DecompositionFailed(
            "parts do not span the versor (reconstruction residual above tolerance)".into(),
        ));
    }
    Ok(dec)
}

/// Decomposition in Cl(p,q,1): split the non-degenerate body, then
/// distribute the translation part over the factors (in-plane components
/// displace their factor, the rest becomes a commuting translation factor).
fn decompose_degenerate(u: &Multivector) -> Result<InvariantDecomposition, GaError> {
    let sig = u.sig();
    let body = u.nondegenerate_part();
    let base = decompose_body(&body)?;

    let trans = u.geometric_product(&body.versor_inverse()?);
    // the translation versor must be 1 + e0∧t
    let t_biv = trans.grade_part(2);
    let check = &(&Multivector::one(sig) + &t_biv) - &trans;
    if !check.is_zero(CHECK_TOL * 1f64.max(trans.norm_inf()))
        || t_biv.nondegenerate_part().norm_inf() > CHECK_TOL
    {
        return Err(GaError::DecompositionFailed(
            "translation part is not a null bivector".into(),
        ));
    }
    let mut t = DVector::<f64>::zeros(sig.dim());
    for bit in 1..sig.dim() {
        t[bit] = t_biv.coeff(1 | (1 << bit)).re;
    }

    let e0 = Multivector::from_term(sig, 1, 1.0.into());
    let one = Multivector::one(sig);
    let mut t_rest = t.clone();

    let project_onto = |target: &Multivector, t: &DVector<f64>| -> DVector<f64> {
        // component of t inside the vector support of `target`'s plane
        let mut coords = DVector::<f64>::zeros(sig.dim());
        let b = target.grade_part(2).nondegenerate_part();
        if b.is_zero(1e-13) {
            return coords;
        }
        // plane projection via the blade: t_par = (t ⌟ b̂) b̂⁻¹
        let tm = mv_of(sig, t);
        let binv = match b.versor_inverse() {
            Ok(i) => i,
            Err(_) => return coords,
        };
        let proj = tm.left_contraction(&b).geometric_product(&binv);
        let proj = proj.grade_part(1);
        for bit in 0..sig.dim() {
            coords[bit] = proj.coeff(1 << bit).re;
        }
        coords
    };

    let mut factors = Vec::new();
    for f in &base.factors {
        let t_k = project_onto(f, &t);
        if t_k.norm() > 1e-13 {
            let shift = &one + &e0.outer_product(&mv_of(sig, &t_k));
            factors.push(shift.geometric_product(f));
            t_rest -= &t_k;
        } else {
            factors.push(f.clone());
        }
    }

    let mut residual = None;
    if let Some(r) = &base.residual_reflection {
        // the component of t along the mirror direction displaces it
        let rc = r.grade1_coords();
        let grr = g_ip(sig, &rc, &rc);
        let c = g_ip(sig, &t_rest, &rc) / grr;
        let t_r = &rc * c;
        if t_r.norm() > 1e-13 {
            let shift = &one + &e0.outer_product(&mv_of(sig, &t_r));
            residual = Some(shift.geometric_product(r));
            t_rest -= &t_r;
        } else {
            residual = Some(r.clone());
        }
    }

    if t_rest.norm() > 1e-13 {
        factors.push(&one + &e0.outer_product(&mv_of(sig, &t_rest)));
    }

    finish_decomposition(u, factors, residual, base.degenerate)
}

// ---------------------------------------------------------------------
// Rotor logarithm
// ---------------------------------------------------------------------

/// Principal logarithm of a rotor: decomposes into commuting simple factors
/// and takes atan2/atanh per plane, |θ| ≤ π. The -1 branch point (no plane
/// to absorb the sign) is rejected.
pub fn rotor_log(r: &Multivector) -> Result<Multivector, GaError> {
    let sig = r.sig();
    let norm = r.versor_scalar_norm()?;
    if (norm - 1.0).abs() > 1e-7 * 1f64.max(norm.abs()) {
        return Err(GaError::NotAVersor(format!(
            "rotor must satisfy RR̃ = 1, got {norm}"
        )));
    }
    if r.parity(1e-9) != Some(Parity::Even) {
        return Err(GaError::NotAVersor("rotor must be even".into()));
    }

    let dec = invariant_decompose(r)?;
    if dec.residual_reflection.is_some() {
        return Err(GaError::NotAVersor("odd reflection count".into()));
    }

    let mut pending_flip = dec.scale < 0.0;
    let mut log = Multivector::zero(sig);

    for f in &dec.factors {
        let mut alpha = f.real_scalar_part();
        let bv = f.grade_part(2);
        let lam = bv.geometric_product(&bv).real_scalar_part();
        let mag = lam.abs().sqrt();

        if lam < -1e-12 {
            // rotation plane; can also absorb a global sign flip
            let unit = &bv * (1.0 / mag);
            if pending_flip {
                alpha = -alpha;
                pending_flip = false;
                let theta = f64::atan2(-mag, alpha);
                log = &log + &(&unit * theta);
            } else {
                let theta = f64::atan2(mag, alpha);
                log = &log + &(&unit * theta);
            }
        } else if lam > 1e-12 {
            if alpha.abs() <= mag {
                return Err(GaError::BranchAmbiguity(
                    "light-like factor has no hyperbolic logarithm".into(),
                ));
            }
            if alpha < 0.0 {
                pending_flip = !pending_flip;
                alpha = -alpha;
            }
            let unit = &bv * (1.0 / mag);
            log = &log + &(&unit * f64::atanh(mag / alpha));
        } else {
            // translation factor: exp is exact at first order
            if alpha < 0.0 {
                pending_flip = !pending_flip;
                alpha = -alpha;
            }
            log = &log + &(&bv * (1.0 / alpha));
        }
    }

    if pending_flip {
        return Err(GaError::BranchAmbiguity(
            "logarithm of -1 has no preferred plane".into(),
        ));
    }
    Ok(log)
}

// ---------------------------------------------------------------------
// Geometric gauges
// ---------------------------------------------------------------------

/// Rotates the reflection pair (u, v) by angle `alpha` around their common
/// plane without changing the product vu. Parallel vectors have no gauge
/// plane and come back unchanged with the flag set.
pub fn gauge_pair(
    u: &Multivector,
    v: &Multivector,
    alpha: f64,
) -> Result<GaugedPair, GaError> {
    u.expect_grade(1, 1e-9)?;
    v.expect_grade(1, 1e-9)?;
    u.versor_scalar_norm()?;
    v.versor_scalar_norm()?;

    let b = v.geometric_product(u).grade_part(2);
    let scale = 1f64.max(u.norm_inf() * v.norm_inf());
    if b.norm_inf() <= 1e-9 * scale {
        return Ok(GaugedPair {
            u: u.clone(),
            v: v.clone(),
            parallel: true,
        });
    }
    let lam = b.geometric_product(&b).real_scalar_part();
    let unit = if lam.abs() > 1e-12 * scale * scale {
        &b * (1.0 / lam.abs().sqrt())
    } else {
        // null gauge plane: normalize by coefficient size
        &b * (1.0 / b.norm())
    };
    let g = (&unit * alpha).exp_bivector()?;
    Ok(GaugedPair {
        u: g.sandwich_rev(u),
        v: g.sandwich_rev(v),
        parallel: false,
    })
}

/// Rewrites a reflection factorization so the vectors group into the
/// invariant decomposition's commuting parts: the residual mirror first,
/// then one vector pair per simple factor, pairs from distinct factors
/// mutually orthogonal. The product is preserved.
pub fn orthogonalize_factorization(
    vs: &[Multivector],
) -> Result<Vec<Multivector>, GaError> {
    if vs.is_empty() {
        return Ok(Vec::new());
    }
    let sig = vs[0].sig();
    let mut u = Multivector::one(sig);
    for v in vs {
        v.expect_grade(1, 1e-9)?;
        v.versor_scalar_norm()?;
        u = u.geometric_product(v);
    }

    // a scalar product means the reflections cancel; nothing to orthogonalize
    if u.off_grade_residual(0) <= 1e-12 {
        return Ok(vs.to_vec());
    }

    let dec = invariant_decompose(&u)?;
    let mut out = Vec::new();
    if let Some(r) = &dec.residual_reflection {
        out.push(r.clone());
    }
    for f in &dec.factors {
        let (a, w) = split_bireflection(f)?;
        out.push(a);
        out.push(w);
    }
    if let Some(first) = out.first_mut() {
        *first = &*first * dec.scale;
    }

    let mut check = Multivector::one(sig);
    for v in &out {
        check = check.geometric_product(v);
    }
    if !check.approx_eq(&u, CHECK_TOL) {
        return Err(GaError::DecompositionFailed(
            "orthogonalized factorization does not reproduce the product".into(),
        ));
    }
    Ok(out)
}

/// Factors a bireflection F = a·w into two invertible reflections, with w a
/// unit vector in F's plane.
fn split_bireflection(f: &Multivector) -> Result<(Multivector, Multivector), GaError> {
    let sig = f.sig();
    let b = f.grade_part(2);
    if b.is_zero(1e-13) {
        return Err(GaError::DecompositionFailed(
            "scalar factor cannot be split into reflections".into(),
        ));
    }

    // candidate in-plane vectors: contractions of basis vectors into the
    // plane; a translation plane e0∧t only admits the direction t itself
    let mut candidates: Vec<Multivector> = Vec::new();
    let nd = b.nondegenerate_part();
    if nd.is_zero(1e-13) && sig.r() == 1 {
        let mut t = DVector::<f64>::zeros(sig.dim());
        for bit in 1..sig.dim() {
            t[bit] = b.coeff(1 | (1 << bit)).re;
        }
        candidates.push(mv_of(sig, &t));
    } else {
        for bit in 0..sig.dim() {
            let e_i = Multivector::from_term(sig, 1 << bit, 1.0.into());
            candidates.push(e_i.left_contraction(&b));
        }
        candidates.sort_by(|a, b| b.norm_inf().total_cmp(&a.norm_inf()));
    }

    for cand in candidates {
        let n2 = cand.geometric_product(&cand).real_scalar_part();
        if n2.abs() < 1e-10 * 1f64.max(cand.norm_inf().powi(2)) {
            continue;
        }
        let w = &cand * (1.0 / n2.abs().sqrt());
        let winv = w.versor_inverse()?;
        let a = f.geometric_product(&winv);
        if a.off_grade_residual(1) <= CHECK_TOL {
            return Ok((a.grade_part(1), w));
        }
    }
    Err(GaError::DecompositionFailed(
        "no invertible in-plane mirror found".into(),
    ))
}

// ---------------------------------------------------------------------
// Polar decomposition and the self-reverse square root
// ---------------------------------------------------------------------

/// Principal square root of a self-reverse element x₀ + x₄ whose grade-4
/// part squares to a scalar.
pub fn sqrt_self_reverse(x: &Multivector) -> Result<Multivector, GaError> {
    let sig = x.sig();
    let scale = 1f64.max(x.norm_inf());
    let x0 = x.scalar_part();
    if x0.im.abs() > 1e-10 * scale {
        return Err(GaError::NoPrincipalRoot);
    }
    let x4 = x.grade_part(4);
    let rest = &(x - &x4) - &Multivector::complex_scalar(sig, x0);
    if !rest.is_zero(1e-10 * scale) {
        return Err(GaError::NotPureGrade {
            expected: 4,
            residual: rest.norm_inf() / scale,
        });
    }

    if x4.is_zero(1e-14 * scale) {
        if x0.re <= 0.0 {
            return Err(GaError::NoPrincipalRoot);
        }
        return Ok(Multivector::scalar(sig, x0.re.sqrt()));
    }

    let lam = x4
        .geometric_product(&x4)
        .try_scalar(1e-9)
        .map_err(|_| GaError::NoPrincipalRoot)?
        .re;
    let disc = x0.re * x0.re - lam;
    if disc <= 0.0 {
        return Err(GaError::NoPrincipalRoot);
    }
    let alpha2 = (x0.re + disc.sqrt()) / 2.0;
    if alpha2 <= 0.0 {
        return Err(GaError::NoPrincipalRoot);
    }
    let alpha = alpha2.sqrt();
    let y = &Multivector::scalar(sig, alpha) + &(&x4 * (1.0 / (2.0 * alpha)));
    if !y.geometric_product(&y).approx_eq(x, 1e-9) {
        return Err(GaError::NoPrincipalRoot);
    }
    Ok(y)
}

/// Polar decomposition ψ = S·R of an even element whose symmetric norm has
/// grade support {0,4}: S self-reverse, R a unit rotor.
pub fn polar_decompose(psi: &Multivector) -> Result<(Multivector, Multivector), GaError> {
    if psi.parity(1e-9) != Some(Parity::Even) {
        return Err(GaError::NotAVersor("polar decomposition needs an even element".into()));
    }
    let x = psi.symmetric_norm();
    let s = sqrt_self_reverse(&x)?;

    // S⁻¹ through the grade-{0,4} conjugate
    let s0 = s.real_scalar_part();
    let s4 = s.grade_part(4);
    let denom = (s0 * s0) - s4.geometric_product(&s4).real_scalar_part();
    if denom.abs() < 1e-12 * 1f64.max(s.norm_inf().powi(2)) {
        return Err(GaError::NotInvertible { norm: denom.abs() });
    }
    let s_inv = &(&Multivector::scalar(psi.sig(), s0) - &s4) * (1.0 / denom);
    let r = s_inv.geometric_product(psi);

    let rn = r.versor_scalar_norm()?;
    if (rn - 1.0).abs() > 1e-7 {
        return Err(GaError::DecompositionFailed(
            "polar rotor is not unit-normalized".into(),
        ));
    }
    Ok((s, r))
}
