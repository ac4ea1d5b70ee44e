//! Matrix exponential by scaling and squaring with a Pade(13,13)
//! approximant (Higham 2005). Robust for non-Hermitian and near-defective
//! matrices, which is exactly the regime around a spectral singularity.

use ndarray::Array2;
use num_complex::Complex64;

use crate::linalg;

/// ||A/2^s||_1 must come below this for the order-13 approximant
/// (Higham 2005, Table 10.2).
const THETA_13: f64 = 5.371920351148152;

/// Pade(13,13) numerator coefficients b_0..b_13.
const B: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Compute exp(A) for a square complex matrix.
///
/// Panics if `a` is not square.
pub fn expm(a: &Array2<Complex64>) -> Array2<Complex64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    if n == 0 {
        return Array2::zeros((0, 0));
    }
    if n == 1 {
        let mut out = Array2::zeros((1, 1));
        out[[0, 0]] = a[[0, 0]].exp();
        return out;
    }

    let norm = linalg::one_norm(a);
    let squarings = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as u32
    } else {
        0
    };
    let scale = Complex64::new((0.5_f64).powi(squarings as i32), 0.0);
    let a_scaled = a * scale;

    let mut result = pade13(&a_scaled);
    for _ in 0..squarings {
        result = result.dot(&result);
    }
    result
}

fn pade13(a: &Array2<Complex64>) -> Array2<Complex64> {
    let n = a.nrows();
    let eye = linalg::identity(n);
    let a2 = a.dot(a);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);

    let c = |x: f64| Complex64::new(x, 0.0);

    // U = A [ A6 (b13 A6 + b11 A4 + b9 A2) + b7 A6 + b5 A4 + b3 A2 + b1 I ]
    let u_inner = &a6 * c(B[13]) + &a4 * c(B[11]) + &a2 * c(B[9]);
    let u_poly =
        a6.dot(&u_inner) + &a6 * c(B[7]) + &a4 * c(B[5]) + &a2 * c(B[3]) + &eye * c(B[1]);
    let u = a.dot(&u_poly);

    // V = A6 (b12 A6 + b10 A4 + b8 A2) + b6 A6 + b4 A4 + b2 A2 + b0 I
    let v_inner = &a6 * c(B[12]) + &a4 * c(B[10]) + &a2 * c(B[8]);
    let v = a6.dot(&v_inner) + &a6 * c(B[6]) + &a4 * c(B[4]) + &a2 * c(B[2]) + &eye * c(B[0]);

    // exp(A) ~ (V - U)^-1 (V + U)
    let num = &v + &u;
    let den = &v - &u;
    linalg::solve(&den, &num).expect("Pade denominator is nonsingular for ||A|| <= theta_13")
}
