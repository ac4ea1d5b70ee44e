//! Hamiltonians for the four-site scattering center and the full finite
//! lattice, the parity/time-reversal operators, and the anti-PT symmetry
//! checks.
//!
//! The center couples to two uniform tight-binding leads with hopping -J.
//! Inside the center the outer bonds are iJ; the central bond between the
//! two middle sites is either i*kappa (imaginary coupling) or kappa (real
//! coupling), and the middle sites carry on-site potentials +V and -V.
//! Which of the two central couplings is chosen decides the parity of the
//! anti-PT symmetry and with it the scattering law (R - T = 1 vs R + T = 1).

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg;
use crate::{Error, Result};

/// Default tolerance for the symmetry checks. The constructions are exact
/// in double precision, so only rounding noise is expected.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Number of sites in the scattering center.
pub const CENTER_SITES: usize = 4;

/// Whether the bond between the two central sites is i*kappa or kappa.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplingKind {
    Imaginary,
    Real,
}

impl CouplingKind {
    /// Residual of the conservation law this coupling kind obeys:
    /// R - T - 1 for the imaginary (nonunitary) kind, R + T - 1 for the
    /// real (unitary) kind.
    pub fn conservation_residual(self, reflection: f64, transmission: f64) -> f64 {
        match self {
            CouplingKind::Imaginary => reflection - transmission - 1.0,
            CouplingKind::Real => reflection + transmission - 1.0,
        }
    }

    /// Human-readable form of the conservation law.
    pub fn conservation_law(self) -> &'static str {
        match self {
            CouplingKind::Imaginary => "R - T = 1",
            CouplingKind::Real => "R + T = 1",
        }
    }
}

/// Parameters of the four-site scattering center. All energies are in
/// units of the lead coupling J.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CenterSpec {
    pub kind: CouplingKind,
    /// Central coupling strength, kappa >= 0.
    pub kappa: f64,
    /// On-site potential on the middle sites (+V and -V).
    pub v: f64,
    /// Lead and center-lead coupling, J > 0.
    pub j: f64,
}

impl CenterSpec {
    pub fn new(kind: CouplingKind, kappa: f64, v: f64, j: f64) -> Result<Self> {
        if !(j > 0.0) || !j.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "lead coupling J must be positive and finite, got {j}"
            )));
        }
        if !(kappa >= 0.0) || !kappa.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "coupling strength kappa must be >= 0 and finite, got {kappa}"
            )));
        }
        if !v.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "on-site potential V must be finite, got {v}"
            )));
        }
        Ok(Self { kind, kappa, v, j })
    }

    pub fn imaginary(kappa: f64, v: f64, j: f64) -> Result<Self> {
        Self::new(CouplingKind::Imaginary, kappa, v, j)
    }

    pub fn real(kappa: f64, v: f64, j: f64) -> Result<Self> {
        Self::new(CouplingKind::Real, kappa, v, j)
    }
}

/// Site bookkeeping for the finite lattice: `left_len` lead sites, the
/// four center sites, then `right_len` lead sites.
///
/// Flat index i maps to the lead labels as
/// `-left_len ... -1` (left lead), the four center sites, then
/// `1 ... right_len` (right lead), so the full matrix is banded and
/// position axes are monotone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeLayout {
    n_sites: usize,
    left_len: usize,
    right_len: usize,
}

impl LatticeLayout {
    pub fn new(n_sites: usize, left_len: usize, right_len: usize) -> Result<Self> {
        if left_len == 0 || right_len == 0 {
            return Err(Error::InvalidParameter(
                "both leads must have at least one site".into(),
            ));
        }
        if left_len + CENTER_SITES + right_len != n_sites {
            return Err(Error::InvalidParameter(format!(
                "layout inconsistent: {left_len} + {CENTER_SITES} + {right_len} != {n_sites}"
            )));
        }
        Ok(Self {
            n_sites,
            left_len,
            right_len,
        })
    }

    /// Split `n_sites - 4` lead sites as evenly as possible, left lead
    /// getting the extra site when the remainder is odd.
    pub fn symmetric(n_sites: usize) -> Result<Self> {
        if n_sites < CENTER_SITES + 2 {
            return Err(Error::InvalidParameter(format!(
                "lattice needs at least {} sites, got {n_sites}",
                CENTER_SITES + 2
            )));
        }
        let leads = n_sites - CENTER_SITES;
        let right = leads / 2;
        Self::new(n_sites, leads - right, right)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn left_len(&self) -> usize {
        self.left_len
    }

    pub fn right_len(&self) -> usize {
        self.right_len
    }

    /// Flat index of the first center site.
    pub fn center_offset(&self) -> usize {
        self.left_len
    }

    /// Flat index range occupied by the four center sites.
    pub fn center_range(&self) -> std::ops::Range<usize> {
        self.left_len..self.left_len + CENTER_SITES
    }

    /// Flat index of a lead site given its label (negative = left lead,
    /// positive = right lead). None for 0 or labels beyond the leads.
    pub fn flat_index(&self, label: i64) -> Option<usize> {
        if label < 0 {
            let depth = (-label) as usize; // 1 = innermost left site
            if depth <= self.left_len {
                Some(self.left_len - depth)
            } else {
                None
            }
        } else if label > 0 {
            let depth = label as usize;
            if depth <= self.right_len {
                Some(self.left_len + CENTER_SITES + depth - 1)
            } else {
                None
            }
        } else {
            None
        }
    }

    /// Lead label of a flat index; None for the four center sites.
    pub fn lead_label(&self, flat: usize) -> Option<i64> {
        if flat < self.left_len {
            Some(flat as i64 - self.left_len as i64)
        } else if flat < self.left_len + CENTER_SITES {
            None
        } else if flat < self.n_sites {
            Some((flat - self.left_len - CENTER_SITES) as i64 + 1)
        } else {
            None
        }
    }
}

impl Default for LatticeLayout {
    /// The 100-site lattice: 48 + 4 + 48.
    fn default() -> Self {
        Self::symmetric(100).unwrap()
    }
}

/// 4x4 Hamiltonian of the scattering center.
///
/// Outer bonds are iJ, the central bond is i*kappa or kappa depending on
/// the coupling kind, and the diagonal is (0, V, -V, 0).
pub fn build_center(spec: &CenterSpec) -> Array2<Complex64> {
    let ij = Complex64::new(0.0, spec.j);
    let central = match spec.kind {
        CouplingKind::Imaginary => Complex64::new(0.0, spec.kappa),
        CouplingKind::Real => Complex64::new(spec.kappa, 0.0),
    };
    let v = Complex64::new(spec.v, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    ndarray::arr2(&[
        [zero, ij, zero, zero],
        [ij, v, central, zero],
        [zero, central, -v, ij],
        [zero, zero, ij, zero],
    ])
}

/// N x N Hamiltonian of the finite lattice: uniform -J bonds along both
/// leads and into the center, with the four-site center block embedded.
pub fn build_full_lattice(spec: &CenterSpec, layout: &LatticeLayout) -> Array2<Complex64> {
    let n = layout.n_sites();
    let mut h = Array2::zeros((n, n));
    let minus_j = Complex64::new(-spec.j, 0.0);

    let c0 = layout.center_offset();
    for i in 0..n - 1 {
        // Bonds internal to the center come from the center block below.
        if (c0..c0 + CENTER_SITES - 1).contains(&i) {
            continue;
        }
        h[[i, i + 1]] = minus_j;
        h[[i + 1, i]] = minus_j;
    }

    let center = build_center(spec);
    for a in 0..CENTER_SITES {
        for b in 0..CENTER_SITES {
            h[[c0 + a, c0 + b]] = center[[a, b]];
        }
    }
    h
}

/// Which parity operator: plain spatial inversion (even) or the
/// generalized signed inversion (odd).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// 4x4 parity operator. Even: anti-diagonal of ones. Odd: anti-diagonal
/// (+1, +1, -1, -1) top to bottom.
pub fn parity_operator(parity: Parity) -> Array2<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let mut p = Array2::zeros((CENTER_SITES, CENTER_SITES));
    for i in 0..CENTER_SITES {
        let sign = match parity {
            Parity::Even => one,
            Parity::Odd => {
                if i < CENTER_SITES / 2 {
                    one
                } else {
                    -one
                }
            }
        };
        p[[i, CENTER_SITES - 1 - i]] = sign;
    }
    p
}

/// Anti-PT symmetry test: (PT) H (PT)^-1 = -H, with T the complex
/// conjugation. True iff every entry of P conj(H) P^-1 + H has magnitude
/// at most `tol`.
pub fn check_anti_pt(h: &Array2<Complex64>, p: &Array2<Complex64>, tol: f64) -> Result<bool> {
    if h.nrows() != h.ncols() || p.nrows() != p.ncols() || h.nrows() != p.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "H is {}x{}, P is {}x{}",
            h.nrows(),
            h.ncols(),
            p.nrows(),
            p.ncols()
        )));
    }
    let p_inv = linalg::inverse(p)?;
    let h_conj = h.mapv(|z| z.conj());
    let transformed = p.dot(&h_conj).dot(&p_inv);
    let max_residual = transformed
        .iter()
        .zip(h.iter())
        .map(|(a, b)| (a + b).norm())
        .fold(0.0, f64::max);
    Ok(max_residual <= tol)
}

/// Sign s of (PT)^2 = P conj(P) = s I. For the real-entried parity
/// operators this is the sign in P^2 = +/-I.
pub fn pt_parity(p: &Array2<Complex64>) -> Result<i32> {
    let n = p.nrows();
    if p.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "parity operator must be square, got {}x{}",
            p.nrows(),
            p.ncols()
        )));
    }
    let squared = p.dot(&p.mapv(|z| z.conj()));
    let lead = squared[[0, 0]];
    let sign = if lead.re > 0.0 { 1 } else { -1 };
    let target = Complex64::new(sign as f64, 0.0);
    for i in 0..n {
        for j in 0..n {
            let expect = if i == j {
                target
            } else {
                Complex64::new(0.0, 0.0)
            };
            if (squared[[i, j]] - expect).norm() > SYMMETRY_TOL {
                return Err(Error::IndefiniteParity);
            }
        }
    }
    Ok(sign)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn center_matrix_imaginary_kind() {
        let spec = CenterSpec::imaginary(3.0, 1.0, 1.0).unwrap();
        let h = build_center(&spec);
        assert_eq!(h[[1, 2]], c(0.0, 3.0));
        assert_eq!(h[[2, 1]], c(0.0, 3.0));
        assert_eq!(h[[0, 1]], c(0.0, 1.0));
        assert_eq!(h[[1, 0]], c(0.0, 1.0));
        assert_eq!(h[[2, 3]], c(0.0, 1.0));
        assert_eq!(h[[1, 1]], c(1.0, 0.0));
        assert_eq!(h[[2, 2]], c(-1.0, 0.0));
        assert_eq!(h[[0, 0]], c(0.0, 0.0));
        assert_eq!(h[[3, 3]], c(0.0, 0.0));
        assert_eq!(h[[0, 2]], c(0.0, 0.0));
        assert_eq!(h[[0, 3]], c(0.0, 0.0));
    }

    #[test]
    fn center_matrix_real_kind() {
        let spec = CenterSpec::real(3.0, 1.0, 1.0).unwrap();
        let h = build_center(&spec);
        assert_eq!(h[[1, 2]], c(3.0, 0.0));
        assert_eq!(h[[2, 1]], c(3.0, 0.0));
        assert_eq!(h[[0, 1]], c(0.0, 1.0));
        assert_eq!(h[[1, 1]], c(1.0, 0.0));
        assert_eq!(h[[2, 2]], c(-1.0, 0.0));
    }

    #[test]
    fn center_matrix_zero_parameters() {
        let spec = CenterSpec::imaginary(0.0, 0.0, 1.0).unwrap();
        let h = build_center(&spec);
        let ij = c(0.0, 1.0);
        for i in 0..4 {
            for j in 0..4 {
                let expect = if (i, j) == (0, 1)
                    || (i, j) == (1, 0)
                    || (i, j) == (2, 3)
                    || (i, j) == (3, 2)
                {
                    ij
                } else {
                    c(0.0, 0.0)
                };
                assert_eq!(h[[i, j]], expect, "entry ({i}, {j})");
            }
        }
    }

    #[test]
    fn spec_validation_rejects_bad_parameters() {
        assert!(CenterSpec::imaginary(1.0, 0.0, 0.0).is_err());
        assert!(CenterSpec::imaginary(1.0, 0.0, -1.0).is_err());
        assert!(CenterSpec::imaginary(-0.5, 0.0, 1.0).is_err());
        assert!(CenterSpec::real(f64::NAN, 0.0, 1.0).is_err());
    }

    #[test]
    fn full_lattice_bond_count_and_values() {
        let spec = CenterSpec::imaginary(3.0, 1.0, 1.0).unwrap();
        let layout = LatticeLayout::default();
        let h = build_full_lattice(&spec, &layout);
        assert_eq!(h.nrows(), 100);

        let mut nonzero_bonds = 0;
        let mut lead_bonds = 0;
        for i in 0..99 {
            if h[[i, i + 1]] != c(0.0, 0.0) {
                nonzero_bonds += 1;
            }
            if h[[i, i + 1]] == c(-1.0, 0.0) {
                lead_bonds += 1;
            }
        }
        assert_eq!(nonzero_bonds, 99);
        assert_eq!(lead_bonds, 96);
        // Center-internal bonds: iJ, i*kappa, iJ.
        assert_eq!(h[[48, 49]], c(0.0, 1.0));
        assert_eq!(h[[49, 50]], c(0.0, 3.0));
        assert_eq!(h[[50, 51]], c(0.0, 1.0));
    }

    #[test]
    fn full_lattice_small_hand_assembly() {
        // 6 sites: 1 left lead site, the center, 1 right lead site.
        let spec = CenterSpec::real(2.0, 0.5, 1.0).unwrap();
        let layout = LatticeLayout::new(6, 1, 1).unwrap();
        let h = build_full_lattice(&spec, &layout);
        let z = c(0.0, 0.0);
        let mj = c(-1.0, 0.0);
        let ij = c(0.0, 1.0);
        let kap = c(2.0, 0.0);
        let expected = ndarray::arr2(&[
            [z, mj, z, z, z, z],
            [mj, z, ij, z, z, z],
            [z, ij, c(0.5, 0.0), kap, z, z],
            [z, z, kap, c(-0.5, 0.0), ij, z],
            [z, z, z, ij, z, mj],
            [z, z, z, z, mj, z],
        ]);
        assert_eq!(h, expected);
    }

    #[test]
    fn full_lattice_zero_kappa_disconnects_halves() {
        let spec = CenterSpec::imaginary(0.0, 1.0, 1.0).unwrap();
        let layout = LatticeLayout::default();
        let h = build_full_lattice(&spec, &layout);
        assert_eq!(h[[49, 50]], c(0.0, 0.0));
        assert_eq!(h[[50, 49]], c(0.0, 0.0));
    }

    #[test]
    fn full_lattice_center_block_matches_build_center() {
        let spec = CenterSpec::real(1.7, -0.3, 2.0).unwrap();
        let layout = LatticeLayout::new(12, 5, 3).unwrap();
        let h = build_full_lattice(&spec, &layout);
        let center = build_center(&spec);
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(h[[5 + a, 5 + b]], center[[a, b]]);
            }
        }
    }

    #[test]
    fn layout_rejects_inconsistent_sizes() {
        assert!(LatticeLayout::new(10, 4, 3).is_err());
        assert!(LatticeLayout::new(10, 0, 6).is_err());
        assert!(LatticeLayout::symmetric(5).is_err());
    }

    #[test]
    fn layout_label_round_trip() {
        let layout = LatticeLayout::default();
        assert_eq!(layout.flat_index(-48), Some(0));
        assert_eq!(layout.flat_index(-1), Some(47));
        assert_eq!(layout.flat_index(1), Some(52));
        assert_eq!(layout.flat_index(48), Some(99));
        assert_eq!(layout.flat_index(0), None);
        assert_eq!(layout.flat_index(-49), None);
        assert_eq!(layout.flat_index(49), None);

        assert_eq!(layout.lead_label(0), Some(-48));
        assert_eq!(layout.lead_label(47), Some(-1));
        assert_eq!(layout.lead_label(48), None);
        assert_eq!(layout.lead_label(51), None);
        assert_eq!(layout.lead_label(52), Some(1));
        assert_eq!(layout.lead_label(99), Some(48));

        for flat in 0..100 {
            if let Some(label) = layout.lead_label(flat) {
                assert_eq!(layout.flat_index(label), Some(flat));
            }
        }
    }

    #[test]
    fn parity_even_squares_to_identity() {
        let p = parity_operator(Parity::Even);
        let p2 = p.dot(&p);
        assert_eq!(p2, linalg::identity(4));
        assert_eq!(pt_parity(&p).unwrap(), 1);
    }

    #[test]
    fn parity_odd_squares_to_minus_identity() {
        let p = parity_operator(Parity::Odd);
        let p2 = p.dot(&p);
        assert_eq!(p2, -linalg::identity(4));
        assert_eq!(pt_parity(&p).unwrap(), -1);
    }

    #[test]
    fn parity_even_applied_twice_fixes_basis_vectors() {
        let p = parity_operator(Parity::Even);
        for i in 0..4 {
            let mut e = ndarray::Array1::<Complex64>::zeros(4);
            e[i] = c(1.0, 0.0);
            let back = p.dot(&p.dot(&e));
            assert_eq!(back, e);
        }
    }

    #[test]
    fn pt_parity_of_identity_is_plus_one() {
        assert_eq!(pt_parity(&linalg::identity(4)).unwrap(), 1);
    }

    #[test]
    fn pt_parity_rejects_non_involutions() {
        let mut m = linalg::identity(4);
        m[[0, 0]] = c(2.0, 0.0);
        assert_eq!(pt_parity(&m), Err(Error::IndefiniteParity));
    }

    #[test]
    fn anti_pt_pairings() {
        let im = CenterSpec::imaginary(2.0, 0.7, 1.0).unwrap();
        let re = CenterSpec::real(2.0, 0.7, 1.0).unwrap();
        let even = parity_operator(Parity::Even);
        let odd = parity_operator(Parity::Odd);

        assert!(check_anti_pt(&build_center(&im), &even, SYMMETRY_TOL).unwrap());
        assert!(check_anti_pt(&build_center(&re), &odd, SYMMETRY_TOL).unwrap());
        // The wrong pairing fails once kappa != 0.
        assert!(!check_anti_pt(&build_center(&re), &even, SYMMETRY_TOL).unwrap());
        assert!(!check_anti_pt(&build_center(&im), &odd, SYMMETRY_TOL).unwrap());
    }

    #[test]
    fn anti_pt_dimension_mismatch_is_an_error() {
        let h = build_center(&CenterSpec::imaginary(1.0, 0.0, 1.0).unwrap());
        let p = linalg::identity(3);
        assert!(matches!(
            check_anti_pt(&h, &p, SYMMETRY_TOL),
            Err(Error::DimensionMismatch(_))
        ));
    }

    proptest! {
        #[test]
        fn anti_pt_holds_for_matching_parity(
            kappa in 0.0..5.0f64,
            v in -3.0..3.0f64,
            j in 0.1..3.0f64,
        ) {
            let im = CenterSpec::imaginary(kappa, v, j).unwrap();
            let re = CenterSpec::real(kappa, v, j).unwrap();
            prop_assert!(check_anti_pt(
                &build_center(&im),
                &parity_operator(Parity::Even),
                SYMMETRY_TOL,
            ).unwrap());
            prop_assert!(check_anti_pt(
                &build_center(&re),
                &parity_operator(Parity::Odd),
                SYMMETRY_TOL,
            ).unwrap());
        }

        #[test]
        fn center_matrices_are_transpose_invariant(
            kappa in 0.0..5.0f64,
            v in -3.0..3.0f64,
            j in 0.1..3.0f64,
            imaginary in proptest::bool::ANY,
        ) {
            let kind = if imaginary { CouplingKind::Imaginary } else { CouplingKind::Real };
            let h = build_center(&CenterSpec::new(kind, kappa, v, j).unwrap());
            prop_assert_eq!(h.t().to_owned(), h);
        }
    }
}
