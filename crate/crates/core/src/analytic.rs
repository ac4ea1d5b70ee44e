//! Closed-form reflection/transmission coefficients for both center kinds,
//! the lead dispersion relation, and the spectral-singularity locus.
//!
//! The coefficient expressions are evaluated exactly as written, term by
//! term, with no algebraic simplification, so that agreement with the
//! independent linear-system solver in `oracle` is a genuine cross-check.

use num_complex::Complex64;
use serde::Serialize;

use crate::lattice::{CenterSpec, CouplingKind};
use crate::{Error, Result};

/// A point (k, V, kappa, ...) counts as singular when the denominator
/// magnitude drops below this times (J^2 + kappa^2 + V^2). Near-singular
/// coefficients are numerically meaningless, so downstream consumers get
/// an explicit error instead of huge finite values.
pub const SINGULARITY_RTOL: f64 = 1e-9;

/// Complex reflection/transmission amplitudes at a single wave vector,
/// plus the intensities R = |r|^2 and T = |t|^2.
///
/// Reflection is reciprocal in magnitude (|r_left| = |r_right|) and the
/// transmission amplitude is shared between the two incidence directions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScatteringCoefficients {
    pub r_left: Complex64,
    pub r_right: Complex64,
    pub t: Complex64,
    /// R = |r_left|^2 = |r_right|^2.
    pub reflection: f64,
    /// T = |t|^2.
    pub transmission: f64,
    pub k: f64,
    /// E = -2 J cos k.
    pub energy: f64,
}

/// Lead dispersion relation E = -2 J cos k, defined on the open band
/// k in (0, pi).
pub fn dispersion(k: f64, j: f64) -> Result<f64> {
    if !k.is_finite() || k <= 0.0 || k >= std::f64::consts::PI {
        return Err(Error::OutsideBand { k });
    }
    Ok(-2.0 * j * k.cos())
}

/// Evaluate the closed-form scattering coefficients of the given center
/// at wave vector k.
///
/// Fails with `SpectralSingularity` when the common denominator vanishes
/// (R and T diverge there) and with `OutsideBand` for k outside (0, pi).
pub fn coefficients(spec: &CenterSpec, k: f64) -> Result<ScatteringCoefficients> {
    let energy = dispersion(k, spec.j)?;
    let (j, kappa, v) = (spec.j, spec.kappa, spec.v);
    let j2 = j * j;
    let kappa2 = kappa * kappa;
    let v2 = v * v;
    let cos_k = k.cos();
    let sin_k = k.sin();
    let e_ik = Complex64::cis(k);
    let e_2ik = Complex64::cis(2.0 * k);

    // Common denominator: 4J^2 cos^2 k + J^2 e^{2ik} +/- kappa^2 - V^2
    //                     + 4J^2 cos k e^{ik}
    // with +kappa^2 for the imaginary central coupling, -kappa^2 for the
    // real one.
    let signed_kappa2 = match spec.kind {
        CouplingKind::Imaginary => kappa2,
        CouplingKind::Real => -kappa2,
    };
    let denom = Complex64::new(4.0 * j2 * cos_k * cos_k + signed_kappa2 - v2, 0.0)
        + j2 * e_2ik
        + 4.0 * j2 * cos_k * e_ik;

    if denom.norm() <= SINGULARITY_RTOL * (j2 + kappa2 + v2) {
        return Err(Error::SpectralSingularity {
            spec: Some(*spec),
            k,
        });
    }

    // Reflection numerators share every term except the sign of 2iVJ sin k;
    // the kappa^2 term flips sign between the two center kinds.
    let base = match spec.kind {
        CouplingKind::Imaginary => -kappa2 + v2 - j2 - 8.0 * j2 * cos_k * cos_k,
        CouplingKind::Real => kappa2 + v2 - j2 - 8.0 * j2 * cos_k * cos_k,
    };
    let v_term = Complex64::new(0.0, 2.0 * v * j * sin_k);
    let r_left = (Complex64::new(base, 0.0) - v_term) / denom;
    let r_right = (Complex64::new(base, 0.0) + v_term) / denom;

    let t_num = match spec.kind {
        CouplingKind::Imaginary => Complex64::new(2.0 * kappa * j * sin_k, 0.0),
        CouplingKind::Real => Complex64::new(0.0, -2.0 * kappa * j * sin_k),
    };
    let t = t_num / denom;

    Ok(ScatteringCoefficients {
        r_left,
        r_right,
        t,
        reflection: r_left.norm_sqr(),
        transmission: t.norm_sqr(),
        k,
        energy,
    })
}

/// Whether the center parameters sit on the spectral-singularity locus
/// kappa^2 - V^2 = J^2 (imaginary coupling only; the unitary scattering
/// of the real coupling admits no singularity).
pub fn at_singularity(spec: &CenterSpec) -> bool {
    if spec.kind != CouplingKind::Imaginary {
        return false;
    }
    let scale = spec.j * spec.j + spec.kappa * spec.kappa + spec.v * spec.v;
    (spec.kappa * spec.kappa - spec.v * spec.v - spec.j * spec.j).abs() <= SINGULARITY_RTOL * scale
}

/// Location of the spectral singularity for a (J, V) family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingularityPoint {
    pub kappa: f64,
    pub k: f64,
}

/// The singularity sits at kappa = sqrt(V^2 + J^2), k = pi/2 for the
/// imaginary coupling; the real coupling has none.
pub fn singularity_locus(kind: CouplingKind, j: f64, v: f64) -> Option<SingularityPoint> {
    assert!(j > 0.0, "lead coupling J must be positive");
    match kind {
        CouplingKind::Imaginary => Some(SingularityPoint {
            kappa: (v * v + j * j).sqrt(),
            k: std::f64::consts::FRAC_PI_2,
        }),
        CouplingKind::Real => None,
    }
}

/// The two degenerate solutions at the singularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

/// Piecewise plane-wave solution at the spectral singularity: unit
/// amplitude on the left lead, amplitude (iV -/+ J)/kappa on the right
/// lead, with opposite wave vectors -/+ pi/2 and +/- pi/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularWavefunction {
    pub left_amplitude: Complex64,
    pub left_k: f64,
    pub right_amplitude: Complex64,
    pub right_k: f64,
}

/// The self-sustained emission / complete absorption states at the
/// singularity. `Plus` is the state with right-lead wave vector +pi/2 and
/// right amplitude (iV - J)/kappa; `Minus` mirrors the signs.
///
/// Fails unless the spec is an imaginary-coupling center on the
/// singularity locus.
pub fn singular_wavefunction(spec: &CenterSpec, branch: Branch) -> Result<SingularWavefunction> {
    if spec.kind != CouplingKind::Imaginary {
        return Err(Error::InvalidParameter(
            "singular wavefunctions exist only for the imaginary central coupling".into(),
        ));
    }
    if !at_singularity(spec) {
        return Err(Error::InvalidParameter(format!(
            "center is not on the singularity locus kappa^2 - V^2 = J^2 \
             (kappa = {}, V = {}, J = {})",
            spec.kappa, spec.v, spec.j
        )));
    }
    let half_pi = std::f64::consts::FRAC_PI_2;
    let iv = Complex64::new(0.0, spec.v);
    let j = Complex64::new(spec.j, 0.0);
    let kappa = Complex64::new(spec.kappa, 0.0);
    let (sign, right_amplitude) = match branch {
        Branch::Plus => (1.0, (iv - j) / kappa),
        Branch::Minus => (-1.0, (iv + j) / kappa),
    };
    Ok(SingularWavefunction {
        left_amplitude: Complex64::new(1.0, 0.0),
        left_k: -sign * half_pi,
        right_amplitude,
        right_k: sign * half_pi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    fn approx(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn dispersion_band_center_and_third() {
        assert!((dispersion(FRAC_PI_2, 1.0).unwrap() - 0.0).abs() < 1e-15);
        assert!((dispersion(FRAC_PI_3, 1.0).unwrap() - (-1.0)).abs() < 1e-15);
    }

    #[test]
    fn dispersion_rejects_band_edges() {
        assert_eq!(dispersion(0.0, 1.0), Err(Error::OutsideBand { k: 0.0 }));
        assert_eq!(dispersion(PI, 1.0), Err(Error::OutsideBand { k: PI }));
        assert!(dispersion(-0.3, 1.0).is_err());
        assert!(dispersion(3.5, 1.0).is_err());
    }

    #[test]
    fn dispersion_approaches_band_bottom() {
        let e = dispersion(1e-9, 2.0).unwrap();
        assert!((e - (-4.0)).abs() < 1e-12);
    }

    #[test]
    fn imaginary_kind_band_center_values() {
        // kappa = 3, V = 0, J = 1, k = pi/2: denominator = 8,
        // r = -10/8, t = 3/4, R - T = 1.
        let spec = CenterSpec::imaginary(3.0, 0.0, 1.0).unwrap();
        let co = coefficients(&spec, FRAC_PI_2).unwrap();
        assert!(approx(co.r_left, Complex64::new(-1.25, 0.0), 1e-14));
        assert!(approx(co.r_right, Complex64::new(-1.25, 0.0), 1e-14));
        assert!(approx(co.t, Complex64::new(0.75, 0.0), 1e-14));
        assert!((co.reflection - 1.5625).abs() < 1e-14);
        assert!((co.transmission - 0.5625).abs() < 1e-14);
        assert!((co.reflection - co.transmission - 1.0).abs() < 1e-14);
        assert!((co.energy - 0.0).abs() < 1e-15);
    }

    #[test]
    fn real_kind_band_center_values() {
        // kappa = 3, V = 0, J = 1, k = pi/2: denominator = -10,
        // r = -0.8, t = 0.6i, R + T = 1.
        let spec = CenterSpec::real(3.0, 0.0, 1.0).unwrap();
        let co = coefficients(&spec, FRAC_PI_2).unwrap();
        assert!(approx(co.r_left, Complex64::new(-0.8, 0.0), 1e-14));
        assert!(approx(co.t, Complex64::new(0.0, 0.6), 1e-14));
        assert!((co.reflection - 0.64).abs() < 1e-14);
        assert!((co.transmission - 0.36).abs() < 1e-14);
        assert!((co.reflection + co.transmission - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_kappa_blocks_transmission() {
        for kind in [CouplingKind::Imaginary, CouplingKind::Real] {
            let spec = CenterSpec::new(kind, 0.0, 0.7, 1.0).unwrap();
            let co = coefficients(&spec, 1.1).unwrap();
            assert_eq!(co.t, Complex64::new(0.0, 0.0));
            assert_eq!(co.transmission, 0.0);
        }
    }

    #[test]
    fn singular_point_raises_error() {
        let spec = CenterSpec::imaginary(2.0_f64.sqrt(), 1.0, 1.0).unwrap();
        let got = coefficients(&spec, FRAC_PI_2);
        assert!(matches!(got, Err(Error::SpectralSingularity { .. })));
    }

    #[test]
    fn locus_examples() {
        let p = singularity_locus(CouplingKind::Imaginary, 1.0, 1.0).unwrap();
        assert!((p.kappa - 2.0_f64.sqrt()).abs() < 1e-15);
        assert!((p.k - FRAC_PI_2).abs() < 1e-15);

        let p0 = singularity_locus(CouplingKind::Imaginary, 1.0, 0.0).unwrap();
        assert!((p0.kappa - 1.0).abs() < 1e-15);

        assert_eq!(singularity_locus(CouplingKind::Real, 1.0, 1.0), None);
    }

    #[test]
    fn singular_wavefunction_minus_branch() {
        let spec = CenterSpec::imaginary(2.0_f64.sqrt(), 1.0, 1.0).unwrap();
        let wf = singular_wavefunction(&spec, Branch::Minus).unwrap();
        let expect = Complex64::new(1.0, 1.0) / 2.0_f64.sqrt();
        assert!(approx(wf.right_amplitude, expect, 1e-15));
        assert!((wf.right_amplitude.norm_sqr() - 1.0).abs() < 1e-14);
        assert!((wf.left_k - FRAC_PI_2).abs() < 1e-15);
        assert!((wf.right_k + FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn singular_wavefunction_plus_branch() {
        let spec = CenterSpec::imaginary(1.0, 0.0, 1.0).unwrap();
        let wf = singular_wavefunction(&spec, Branch::Plus).unwrap();
        assert!(approx(wf.right_amplitude, Complex64::new(-1.0, 0.0), 1e-15));
        assert!((wf.left_k + FRAC_PI_2).abs() < 1e-15);
        assert!((wf.right_k - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn singular_wavefunction_rejects_off_locus_and_real_kind() {
        let off = CenterSpec::imaginary(3.0, 1.0, 1.0).unwrap();
        assert!(singular_wavefunction(&off, Branch::Plus).is_err());
        let re = CenterSpec::real(2.0_f64.sqrt(), 1.0, 1.0).unwrap();
        assert!(singular_wavefunction(&re, Branch::Plus).is_err());
    }

    #[test]
    fn emission_amplitudes_have_unit_magnitude_on_locus() {
        for v in [-2.0, -0.5, 0.0, 1.0, 3.0] {
            let locus = singularity_locus(CouplingKind::Imaginary, 1.0, v).unwrap();
            let spec = CenterSpec::imaginary(locus.kappa, v, 1.0).unwrap();
            for branch in [Branch::Plus, Branch::Minus] {
                let wf = singular_wavefunction(&spec, branch).unwrap();
                assert!((wf.right_amplitude.norm() - 1.0).abs() < 1e-14);
            }
        }
    }

    proptest! {
        #[test]
        fn conservation_laws_hold_off_singularity(
            k in 0.05..3.09f64,
            v in -2.0..2.0f64,
            kappa in 0.01..4.0f64,
        ) {
            for kind in [CouplingKind::Imaginary, CouplingKind::Real] {
                let spec = CenterSpec::new(kind, kappa, v, 1.0).unwrap();
                match coefficients(&spec, k) {
                    Ok(co) => {
                        let residual = kind.conservation_residual(
                            co.reflection,
                            co.transmission,
                        );
                        prop_assert!(
                            residual.abs() <= 1e-10,
                            "kind {:?}: residual {residual:e}",
                            kind
                        );
                    }
                    Err(Error::SpectralSingularity { .. }) => {}
                    Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
                }
            }
        }

        #[test]
        fn reflection_reciprocity_and_v_mirror(
            k in 0.05..3.09f64,
            v in -2.0..2.0f64,
            kappa in 0.01..4.0f64,
        ) {
            for kind in [CouplingKind::Imaginary, CouplingKind::Real] {
                let spec = CenterSpec::new(kind, kappa, v, 1.0).unwrap();
                let mirrored = CenterSpec::new(kind, kappa, -v, 1.0).unwrap();
                let (co, mi) = match (coefficients(&spec, k), coefficients(&mirrored, k)) {
                    (Ok(a), Ok(b)) => (a, b),
                    _ => continue,
                };
                // |r_L| = |r_R| and r_L(V) = r_R(-V).
                prop_assert!((co.r_left.norm() - co.r_right.norm()).abs() <= 1e-12);
                prop_assert!((co.r_left - mi.r_right).norm() <= 1e-12);
            }
        }

        #[test]
        fn imaginary_kind_reflection_at_least_one(
            k in 0.05..3.09f64,
            v in -2.0..2.0f64,
            kappa in 0.01..4.0f64,
        ) {
            let spec = CenterSpec::imaginary(kappa, v, 1.0).unwrap();
            if let Ok(co) = coefficients(&spec, k) {
                prop_assert!(co.reflection >= 1.0 - 1e-10);
            }
        }

        #[test]
        fn zero_potential_makes_reflections_equal(
            k in 0.05..3.09f64,
            kappa in 0.01..4.0f64,
        ) {
            let spec = CenterSpec::imaginary(kappa, 0.0, 1.0).unwrap();
            if let Ok(co) = coefficients(&spec, k) {
                prop_assert_eq!(co.r_left, co.r_right);
            }
        }
    }
}
