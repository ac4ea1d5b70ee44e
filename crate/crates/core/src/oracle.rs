//! Independent numerical scattering solver: an arbitrary finite center
//! attached to two uniform leads, solved by direct boundary matching.
//!
//! The plane-wave ansatz on the leads is substituted into the center-site
//! Schroedinger equations; eliminating the lead amplitudes at the two
//! innermost lead sites leaves an (n+2)-unknown dense linear system in
//! (r, psi_center(1..n), t). No closed forms enter anywhere, so this
//! module serves as the brute-force oracle for `analytic`.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::{self, ScatteringCoefficients};
use crate::lattice::{self, CenterSpec, CouplingKind};
use crate::linalg;
use crate::{Error, Result};

/// A linear system whose reciprocal condition number falls below this is
/// treated as a spectral singularity, matching the analytic module's
/// failure mode.
pub const SINGULAR_RCOND: f64 = 1e-12;

/// Incidence direction of the unit-amplitude plane wave.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    FromLeft,
    FromRight,
}

/// A finite center (any size n >= 1) embedded between two uniform leads
/// with coupling -J, probed at wave vector k.
#[derive(Debug, Clone)]
pub struct ScatteringProblem {
    pub center: Array2<Complex64>,
    pub j: f64,
    /// 0-based center site bonded to the left lead.
    pub attach_in: usize,
    /// 0-based center site bonded to the right lead.
    pub attach_out: usize,
    pub k: f64,
    pub direction: Direction,
}

impl ScatteringProblem {
    /// Problem with the default attachments: first site to the left lead,
    /// last site to the right lead.
    pub fn new(
        center: Array2<Complex64>,
        j: f64,
        k: f64,
        direction: Direction,
    ) -> Result<Self> {
        let n = center.nrows();
        if n == 0 || center.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "center must be square and nonempty, got {}x{}",
                center.nrows(),
                center.ncols()
            )));
        }
        if !(j > 0.0) || !j.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "lead coupling J must be positive and finite, got {j}"
            )));
        }
        Ok(Self {
            center,
            j,
            attach_in: 0,
            attach_out: n - 1,
            k,
            direction,
        })
    }

    /// Problem for one of the four-site center specs.
    pub fn for_spec(spec: &CenterSpec, k: f64, direction: Direction) -> Self {
        Self::new(lattice::build_center(spec), spec.j, k, direction)
            .expect("four-site center is always a valid problem")
    }

    /// Override the lead attachment sites (0-based).
    pub fn with_attachments(mut self, attach_in: usize, attach_out: usize) -> Result<Self> {
        let n = self.center.nrows();
        if attach_in >= n || attach_out >= n {
            return Err(Error::InvalidParameter(format!(
                "attachment sites ({attach_in}, {attach_out}) outside center of size {n}"
            )));
        }
        if attach_in == attach_out && n != 1 {
            return Err(Error::InvalidParameter(
                "attach_in must differ from attach_out unless the center has one site".into(),
            ));
        }
        self.attach_in = attach_in;
        self.attach_out = attach_out;
        Ok(self)
    }
}

/// Reflection and transmission amplitudes for one incidence direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolvedCoefficients {
    pub r: Complex64,
    pub t: Complex64,
    pub k: f64,
    pub energy: f64,
}

/// Solve the boundary-matched linear system for one incidence direction.
///
/// Unknowns x = (r, psi_c(0..n-1), t). The two boundary rows pin the
/// attachment-site amplitudes to the lead ansatz (psi_in = e^{-ik} + r e^{ik}
/// on the incidence side, psi_out = t e^{ik} on the far side); the n center
/// rows are (H_c - E) psi_c = J * (lead amplitudes at the innermost lead
/// sites), with E = -2 J cos k.
pub fn solve_scattering(problem: &ScatteringProblem) -> Result<SolvedCoefficients> {
    let n = problem.center.nrows();
    if problem.center.ncols() != n || n == 0 {
        return Err(Error::DimensionMismatch(format!(
            "center must be square and nonempty, got {}x{}",
            problem.center.nrows(),
            problem.center.ncols()
        )));
    }
    if problem.attach_in >= n
        || problem.attach_out >= n
        || (problem.attach_in == problem.attach_out && n != 1)
    {
        return Err(Error::InvalidParameter(format!(
            "invalid attachment sites ({}, {}) for center of size {n}",
            problem.attach_in, problem.attach_out
        )));
    }
    let energy = analytic::dispersion(problem.k, problem.j)?;

    let k = problem.k;
    let j = problem.j;
    let e_ik = Complex64::cis(k);
    let e_mik = Complex64::cis(-k);
    let e_2ik = Complex64::cis(2.0 * k);
    let e_m2ik = Complex64::cis(-2.0 * k);
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);

    // Incidence side attaches at `near`, outgoing side at `far`.
    let (near, far) = match problem.direction {
        Direction::FromLeft => (problem.attach_in, problem.attach_out),
        Direction::FromRight => (problem.attach_out, problem.attach_in),
    };

    let dim = n + 2;
    let mut a = Array2::<Complex64>::zeros((dim, dim));
    let mut b = Array1::<Complex64>::zeros(dim);

    // Row 0, incidence-side boundary: psi_c(near) - e^{ik} r = e^{-ik}.
    a[[0, 0]] = -e_ik;
    a[[0, 1 + near]] = one;
    b[0] = e_mik;

    // Rows 1..=n, center Schroedinger equations:
    //   sum_j (H_c[m, j] - E delta_mj) psi_c(j)
    //     - J * (incoming lead amplitude at the site bonded to m) = 0.
    // The innermost lead amplitudes follow from the ansatz:
    //   incidence side: e^{-2ik} + r e^{2ik}; outgoing side: t e^{2ik}.
    for m in 0..n {
        let row = 1 + m;
        for col in 0..n {
            let mut entry = problem.center[[m, col]];
            if m == col {
                entry -= Complex64::new(energy, 0.0);
            }
            a[[row, 1 + col]] = entry;
        }
        if m == near {
            a[[row, 0]] = -j * e_2ik; // r coupling through the incidence lead
            b[row] += Complex64::new(j, 0.0) * e_m2ik;
        }
        if m == far {
            a[[row, 1 + n]] = -j * e_2ik; // t coupling through the outgoing lead
        }
    }

    // Row n+1, outgoing-side boundary: psi_c(far) - e^{ik} t = 0.
    a[[dim - 1, 1 + far]] = one;
    a[[dim - 1, 1 + n]] = -e_ik;
    b[dim - 1] = zero;

    let rc = linalg::rcond(&a)?;
    if rc < SINGULAR_RCOND {
        return Err(Error::SpectralSingularity { spec: None, k });
    }
    let x = linalg::solve_vec(&a, &b)?;

    Ok(SolvedCoefficients {
        r: x[0],
        t: x[dim - 1],
        k,
        energy,
    })
}

/// Which solver backs a sweep table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepEngine {
    /// Closed-form coefficients.
    Analytic,
    /// Boundary-matched linear-system solves (both directions per point).
    Oracle,
}

/// One (k, V) grid point of a sweep. Singular points are flagged instead
/// of aborting the sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub k: f64,
    pub v: f64,
    pub coefficients: Option<ScatteringCoefficients>,
    pub singular: bool,
}

/// Dense table of coefficients over a (k, V) grid at fixed kind, kappa, J.
/// Rows are k-major, matching the grid iteration order.
pub fn sweep(
    kind: CouplingKind,
    kappa: f64,
    j: f64,
    k_grid: &[f64],
    v_grid: &[f64],
    engine: SweepEngine,
) -> Result<Vec<SweepRow>> {
    if k_grid.is_empty() || v_grid.is_empty() {
        return Err(Error::InvalidParameter("sweep grids must be nonempty".into()));
    }
    for &k in k_grid {
        if !k.is_finite() || k <= 0.0 || k >= std::f64::consts::PI {
            return Err(Error::OutsideBand { k });
        }
    }

    let mut rows = Vec::with_capacity(k_grid.len() * v_grid.len());
    for &k in k_grid {
        for &v in v_grid {
            let spec = CenterSpec::new(kind, kappa, v, j)?;
            let point = match engine {
                SweepEngine::Analytic => analytic::coefficients(&spec, k),
                SweepEngine::Oracle => oracle_coefficients(&spec, k),
            };
            match point {
                Ok(co) => rows.push(SweepRow {
                    k,
                    v,
                    coefficients: Some(co),
                    singular: false,
                }),
                Err(Error::SpectralSingularity { .. }) => rows.push(SweepRow {
                    k,
                    v,
                    coefficients: None,
                    singular: true,
                }),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(rows)
}

/// Assemble both-direction oracle solves into the shared coefficient
/// record (r_left, r_right, shared t).
fn oracle_coefficients(spec: &CenterSpec, k: f64) -> Result<ScatteringCoefficients> {
    let left = solve_scattering(&ScatteringProblem::for_spec(spec, k, Direction::FromLeft))?;
    let right = solve_scattering(&ScatteringProblem::for_spec(spec, k, Direction::FromRight))?;
    Ok(ScatteringCoefficients {
        r_left: left.r,
        r_right: right.r,
        t: left.t,
        reflection: left.r.norm_sqr(),
        transmission: left.t.norm_sqr(),
        k,
        energy: left.energy,
    })
}
