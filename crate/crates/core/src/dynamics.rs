//! Gaussian wave-packet construction, time evolution on the finite
//! lattice, intensity accounting, and the emission/absorption probes at
//! the spectral singularity.
//!
//! Evolution applies the exact matrix exponential exp(-i H dt) of the
//! dense lattice Hamiltonian, computed once per step size and reused
//! across steps. The Hamiltonian is non-Hermitian, so the evolution is
//! non-unitary and total intensity is not conserved in general.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use serde::Serialize;

use crate::analytic;
use crate::expm::expm;
use crate::lattice::{self, CenterSpec, CouplingKind, LatticeLayout};
use crate::{Error, Result};

/// Intensity at either end site above this flags the trace: the finite
/// leads reflect, so results past the first boundary return are invalid.
pub const BOUNDARY_LEAK_THRESHOLD: f64 = 1e-4;

/// Asymptotic reflection/transmission are read off once the center
/// intensity has dropped below this.
pub const CENTER_CLEAR_THRESHOLD: f64 = 1e-3;

/// The emission measurement window starts once the center intensity stays
/// within this relative band of its end-of-window value.
pub const EMISSION_PLATEAU_BAND: f64 = 0.05;

/// Minimum number of snapshots for a usable emission window.
pub const MIN_EMISSION_WINDOW: usize = 5;

/// A Gaussian excitation on one of the leads: amplitudes
/// exp(-(j - N_c)^2 / 2 sigma^2) * exp(i k_c j) over the lead labels j,
/// intensity-normalized. The carrier sign sets the propagation direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WavePacket {
    /// Packet center N_c in lead labeling (negative = left lead).
    pub center_label: i64,
    /// Width sigma > 0; the half width is 2 sqrt(ln 2) sigma.
    pub sigma: f64,
    /// Carrier wave vector k_c in (-pi, pi) excluding 0.
    pub carrier_k: f64,
}

impl WavePacket {
    pub fn new(center_label: i64, sigma: f64, carrier_k: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "packet width sigma must be positive and finite, got {sigma}"
            )));
        }
        if !carrier_k.is_finite()
            || carrier_k <= -std::f64::consts::PI
            || carrier_k >= std::f64::consts::PI
            || carrier_k == 0.0
        {
            return Err(Error::InvalidParameter(format!(
                "carrier wave vector must lie in (-pi, pi) and be nonzero, got {carrier_k}"
            )));
        }
        if center_label == 0 {
            return Err(Error::InvalidParameter(
                "packet center must be a lead label (nonzero)".into(),
            ));
        }
        Ok(Self {
            center_label,
            sigma,
            carrier_k,
        })
    }
}

/// Complex amplitude per flat lattice site at one time instant.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeState {
    pub amplitudes: Array1<Complex64>,
    /// Time in units of 1/J.
    pub time: f64,
}

impl LatticeState {
    pub fn n_sites(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn total_intensity(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn intensity_profile(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }
}

/// Check that the 4-sigma support of a packet stays on its lead: it must
/// not reach into the center region and may extend at most one site past
/// the outermost lead site (the tail beyond 4 sigma is below e^-8 in
/// amplitude).
fn validate_fit(packet: &WavePacket, layout: &LatticeLayout) -> Result<()> {
    let depth = packet.center_label.unsigned_abs() as f64;
    let reach = 4.0 * packet.sigma;
    let lead_len = if packet.center_label < 0 {
        layout.left_len()
    } else {
        layout.right_len()
    } as f64;
    if depth - reach < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "packet at N_c = {} with sigma = {} overlaps the scattering center",
            packet.center_label, packet.sigma
        )));
    }
    if depth + reach > lead_len + 1.0 {
        return Err(Error::InvalidParameter(format!(
            "packet at N_c = {} with sigma = {} overlaps the lattice boundary \
             (lead length {lead_len})",
            packet.center_label, packet.sigma
        )));
    }
    Ok(())
}

/// Build the normalized Gaussian packet on the lattice: the Gaussian
/// profile and carrier phase on every lead site, zero on the four center
/// sites, total intensity normalized to one.
pub fn gaussian_state(packet: &WavePacket, layout: &LatticeLayout) -> Result<LatticeState> {
    validate_fit(packet, layout)?;
    let n = layout.n_sites();
    let mut amplitudes = Array1::<Complex64>::zeros(n);
    let two_sigma_sq = 2.0 * packet.sigma * packet.sigma;
    for flat in 0..n {
        if let Some(label) = layout.lead_label(flat) {
            let d = (label - packet.center_label) as f64;
            let envelope = (-d * d / two_sigma_sq).exp();
            let phase = Complex64::cis(packet.carrier_k * label as f64);
            amplitudes[flat] = envelope * phase;
        }
    }
    let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
    if norm <= 0.0 {
        return Err(Error::InvalidParameter(
            "packet has no support on the lattice".into(),
        ));
    }
    let scale = Complex64::new(1.0 / norm.sqrt(), 0.0);
    amplitudes.mapv_inplace(|z| z * scale);
    Ok(LatticeState {
        amplitudes,
        time: 0.0,
    })
}

/// Group velocity dE/dk = 2 J sin k of the lead dispersion; the sign
/// gives the propagation direction.
pub fn group_velocity(k_c: f64, j: f64) -> f64 {
    2.0 * j * k_c.sin()
}

/// The one-step evolution operator exp(-i H dt), computed once and reused
/// across steps.
pub struct Propagator {
    u: Array2<Complex64>,
    dt: f64,
}

impl Propagator {
    pub fn new(h: &Array2<Complex64>, dt: f64) -> Result<Self> {
        if h.nrows() != h.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "Hamiltonian must be square, got {}x{}",
                h.nrows(),
                h.ncols()
            )));
        }
        if !(dt >= 0.0) || !dt.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "time step must be >= 0 and finite, got {dt}"
            )));
        }
        let generator = h * Complex64::new(0.0, -dt);
        Ok(Self {
            u: expm(&generator),
            dt,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advance the state by one step.
    pub fn apply(&self, state: &LatticeState) -> Result<LatticeState> {
        if state.n_sites() != self.u.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "state has {} sites, propagator is {}x{}",
                state.n_sites(),
                self.u.nrows(),
                self.u.ncols()
            )));
        }
        Ok(LatticeState {
            amplitudes: self.u.dot(&state.amplitudes),
            time: state.time + self.dt,
        })
    }
}

/// One-shot evolution by exp(-i H dt).
pub fn evolve(h: &Array2<Complex64>, state: &LatticeState, dt: f64) -> Result<LatticeState> {
    Propagator::new(h, dt)?.apply(state)
}

/// Time series of intensity profiles with left/center/right bookkeeping.
#[derive(Debug, Clone, Serialize)]
pub struct SimulationTrace {
    pub layout: LatticeLayout,
    pub times: Vec<f64>,
    /// |phi(t, j)|^2 per snapshot.
    pub profiles: Vec<Vec<f64>>,
    /// Summed intensity over the left-lead sites.
    pub i_left: Vec<f64>,
    /// Summed intensity over the four center sites.
    pub i_center: Vec<f64>,
    /// Summed intensity over the right-lead sites.
    pub i_right: Vec<f64>,
    /// First time either end site exceeded the leak threshold.
    pub boundary_leak_time: Option<f64>,
}

impl SimulationTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn total_intensity(&self, idx: usize) -> f64 {
        self.i_left[idx] + self.i_center[idx] + self.i_right[idx]
    }

    /// Last snapshot taken strictly before the first boundary leak
    /// (the final snapshot when the run never leaked).
    pub fn last_clean_index(&self) -> usize {
        match self.boundary_leak_time {
            None => self.len() - 1,
            Some(leak) => {
                let mut idx = 0;
                for (i, &t) in self.times.iter().enumerate() {
                    if t < leak {
                        idx = i;
                    }
                }
                idx
            }
        }
    }

    /// Snapshot at which the asymptotic reflection/transmission are read
    /// off: the last boundary-clean snapshot after the center-intensity
    /// peak with I_center below `CENTER_CLEAR_THRESHOLD`. None when the
    /// packet never scattered or never cleared the center in time.
    pub fn measurement_index(&self) -> Option<usize> {
        let clean_end = self.last_clean_index();
        let peak = self
            .i_center
            .iter()
            .take(clean_end + 1)
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)?;
        if peak == 0 {
            return None;
        }
        (peak..=clean_end)
            .rev()
            .find(|&i| self.i_center[i] < CENTER_CLEAR_THRESHOLD)
    }
}

/// Evolve an initial state under a fixed Hamiltonian, recording
/// `n_steps + 1` snapshots over [0, t_final]. A zero `t_final` or zero
/// `n_steps` produces the single initial snapshot.
pub fn run_sim(
    h: &Array2<Complex64>,
    initial: &LatticeState,
    layout: &LatticeLayout,
    t_final: f64,
    n_steps: usize,
) -> Result<SimulationTrace> {
    if h.nrows() != h.ncols() || h.nrows() != layout.n_sites() {
        return Err(Error::DimensionMismatch(format!(
            "Hamiltonian is {}x{}, layout has {} sites",
            h.nrows(),
            h.ncols(),
            layout.n_sites()
        )));
    }
    if initial.n_sites() != layout.n_sites() {
        return Err(Error::DimensionMismatch(format!(
            "state has {} sites, layout has {}",
            initial.n_sites(),
            layout.n_sites()
        )));
    }
    if !(t_final >= 0.0) || !t_final.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "t_final must be >= 0 and finite, got {t_final}"
        )));
    }

    let steps = if t_final == 0.0 { 0 } else { n_steps };
    let mut trace = SimulationTrace {
        layout: *layout,
        times: Vec::with_capacity(steps + 1),
        profiles: Vec::with_capacity(steps + 1),
        i_left: Vec::with_capacity(steps + 1),
        i_center: Vec::with_capacity(steps + 1),
        i_right: Vec::with_capacity(steps + 1),
        boundary_leak_time: None,
    };

    let mut state = initial.clone();
    record_snapshot(&mut trace, &state);
    if steps == 0 {
        return Ok(trace);
    }

    let propagator = Propagator::new(h, t_final / steps as f64)?;
    for _ in 0..steps {
        state = propagator.apply(&state)?;
        record_snapshot(&mut trace, &state);
    }
    Ok(trace)
}

fn record_snapshot(trace: &mut SimulationTrace, state: &LatticeState) {
    let layout = &trace.layout;
    let profile = state.intensity_profile();
    let center = layout.center_range();
    let i_left: f64 = profile[..center.start].iter().sum();
    let i_center: f64 = profile[center.clone()].iter().sum();
    let i_right: f64 = profile[center.end..].iter().sum();

    let n = profile.len();
    if trace.boundary_leak_time.is_none()
        && (profile[0] > BOUNDARY_LEAK_THRESHOLD || profile[n - 1] > BOUNDARY_LEAK_THRESHOLD)
    {
        trace.boundary_leak_time = Some(state.time);
    }

    trace.times.push(state.time);
    trace.profiles.push(profile);
    trace.i_left.push(i_left);
    trace.i_center.push(i_center);
    trace.i_right.push(i_right);
}

/// Inject a Gaussian packet against the given center and record the
/// scattering dynamics. At the end of a leak-free run, I_left
/// approximates the reflection R and I_right the transmission T of the
/// incident carrier.
pub fn run_scattering_sim(
    spec: &CenterSpec,
    packet: &WavePacket,
    layout: &LatticeLayout,
    t_final: f64,
    n_steps: usize,
) -> Result<SimulationTrace> {
    let h = lattice::build_full_lattice(spec, layout);
    let initial = gaussian_state(packet, layout)?;
    run_sim(&h, &initial, layout, t_final, n_steps)
}

/// The emission probe: a single Gaussian packet with carrier pi/2, the
/// state whose scattering at the spectral singularity drives linearly
/// growing reflected/transmitted intensities.
pub fn emission_initial_state(
    packet: &WavePacket,
    layout: &LatticeLayout,
) -> Result<LatticeState> {
    if (packet.carrier_k - std::f64::consts::FRAC_PI_2).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "emission probe needs carrier k_c = pi/2, got {}",
            packet.carrier_k
        )));
    }
    gaussian_state(packet, layout)
}

/// Superpose the packet with its mirror image (center -N_c, carrier
/// -k_c) scaled by `second_scale`. Each packet is unit-normalized before
/// combining; the result keeps its actual total intensity.
pub fn two_packet_state(
    packet: &WavePacket,
    layout: &LatticeLayout,
    second_scale: Complex64,
) -> Result<LatticeState> {
    let first = gaussian_state(packet, layout)?;
    let mirror = WavePacket::new(-packet.center_label, packet.sigma, -packet.carrier_k)?;
    let second = gaussian_state(&mirror, layout)?;
    Ok(LatticeState {
        amplitudes: first.amplitudes + second.amplitudes.mapv(|z| z * second_scale),
        time: 0.0,
    })
}

/// The absorption probe at the spectral singularity: counterpropagating
/// packets at +/-N_c with relative amplitude (iV + J)/kappa, the packet
/// version of the complete-absorption solution. Not renormalized.
pub fn absorption_initial_state(
    packet: &WavePacket,
    spec: &CenterSpec,
    layout: &LatticeLayout,
) -> Result<LatticeState> {
    if spec.kind != CouplingKind::Imaginary || !analytic::at_singularity(spec) {
        return Err(Error::InvalidParameter(format!(
            "absorption probe needs an imaginary-coupling center on the singularity \
             locus kappa^2 - V^2 = J^2 (kappa = {}, V = {}, J = {})",
            spec.kappa, spec.v, spec.j
        )));
    }
    if packet.center_label >= 0 {
        return Err(Error::InvalidParameter(format!(
            "absorption probe packet must start on the left lead (N_c < 0), got {}",
            packet.center_label
        )));
    }
    if (packet.carrier_k - std::f64::consts::FRAC_PI_2).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "absorption probe needs carrier k_c = pi/2, got {}",
            packet.carrier_k
        )));
    }
    let scale = (Complex64::new(0.0, spec.v) + spec.j) / spec.kappa;
    two_packet_state(packet, layout, scale)
}

/// Least-squares line fit with an aggregate quality measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// RMS residual divided by the mean magnitude of the data.
    pub relative_residual: f64,
}

/// Fit y = intercept + slope * x. None for fewer than two points or a
/// degenerate abscissa.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let nf = n as f64;
    let mean_x = xs.iter().sum::<f64>() / nf;
    let mean_y = ys.iter().sum::<f64>() / nf;
    let mut cov = 0.0;
    let mut var = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        cov += (x - mean_x) * (y - mean_y);
        var += (x - mean_x) * (x - mean_x);
    }
    if var == 0.0 {
        return None;
    }
    let slope = cov / var;
    let intercept = mean_y - slope * mean_x;
    let mut sq_sum = 0.0;
    let mut mag_sum = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let r = y - (intercept + slope * x);
        sq_sum += r * r;
        mag_sum += y.abs();
    }
    let mean_mag = mag_sum / nf;
    let rms = (sq_sum / nf).sqrt();
    let relative_residual = if mean_mag > 0.0 { rms / mean_mag } else { f64::INFINITY };
    Some(LinearFit {
        slope,
        intercept,
        relative_residual,
    })
}

/// Measurement window for the emission run: the suffix of boundary-clean
/// snapshots over which I_center stays within `EMISSION_PLATEAU_BAND` of
/// its value at the last clean snapshot (I_center saturated). None when
/// the plateau is shorter than `MIN_EMISSION_WINDOW` snapshots.
pub fn emission_window(trace: &SimulationTrace) -> Option<std::ops::Range<usize>> {
    if trace.is_empty() {
        return None;
    }
    let end = trace.last_clean_index();
    let plateau = trace.i_center[end];
    if plateau <= 0.0 {
        return None;
    }
    let mut start = end;
    while start > 0 {
        let prev = trace.i_center[start - 1];
        if (prev - plateau).abs() <= EMISSION_PLATEAU_BAND * plateau {
            start -= 1;
        } else {
            break;
        }
    }
    if end + 1 - start < MIN_EMISSION_WINDOW {
        return None;
    }
    Some(start..end + 1)
}

/// Intensity-weighted mean flat position of a profile.
pub fn centroid(profile: &[f64]) -> f64 {
    let total: f64 = profile.iter().sum();
    if total == 0.0 {
        return f64::NAN;
    }
    profile
        .iter()
        .enumerate()
        .map(|(i, &p)| i as f64 * p)
        .sum::<f64>()
        / total
}
