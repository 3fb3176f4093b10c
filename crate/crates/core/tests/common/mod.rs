//! Shared helpers for the integration suites.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Matrix exponential by scaling-and-squaring over a plain power series.
/// Independent of the algebra's closed-form exponentials.
pub fn expm(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = m.nrows();
    let norm: f64 = m.iter().map(|c| c.norm()).fold(0.0, f64::max) * n as f64;
    let s = norm.max(1.0).log2().ceil() as i32 + 1;
    let scaled = m / Complex64::new(2f64.powi(s), 0.0);

    let mut out = DMatrix::<Complex64>::identity(n, n);
    let mut term = DMatrix::<Complex64>::identity(n, n);
    for k in 1..32 {
        term = &term * &scaled / Complex64::new(k as f64, 0.0);
        out += &term;
    }
    for _ in 0..s {
        out = &out * &out;
    }
    out
}

pub fn cmat_distance(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    let scale = 1f64
        .max(a.iter().map(|c| c.norm()).fold(0.0, f64::max))
        .max(b.iter().map(|c| c.norm()).fold(0.0, f64::max));
    (a - b).iter().map(|c| c.norm()).fold(0.0, f64::max) / scale
}
