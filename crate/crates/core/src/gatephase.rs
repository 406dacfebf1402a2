//! Phase-space loops and geometric phase accounting.
//!
//! In a frame rotating with each field mode's detuning, a mode driven at
//! rate `chi` while detuned by `eta` follows the circular trajectory
//!
//! ```text
//! alpha(t) = (chi / eta) (e^{-i 2 pi eta t} - 1),
//! ```
//!
//! a loop through the origin of radius `|chi / eta|` traversed once per
//! `1 / |eta|` microseconds.  The accumulated phase per mode is
//!
//! ```text
//! phi(t) = (|chi| / eta)^2 (sin(2 pi eta t) - 2 pi eta t),
//! ```
//!
//! which splits into a dynamic part `2 phi` and a geometric part `-phi`
//! (minus the swept phase-space area).  Per logical basis state the three
//! mode contributions add; the state-dependence of `chi` then makes the
//! total a two-qubit entangling phase.  Everything in this module is exact
//! in the displaced-oscillator description; agreement with the underlying
//! multilevel dynamics is the business of [`crate::fullsim`].
//!
//! Times in us, rates and detunings in cyclic MHz, phases in rad.

use core::fmt;

use num_complex::Complex64;
// Float supplies powf/sqrt and friends when std is disabled.
#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;

use crate::model::{
    chi_table, derive_couplings, eta_values, ChiTable, EtaTriple, LogicalBasis, ModelError,
    SystemParams,
};

const TAU: f64 = core::f64::consts::TAU;
const PI: f64 = core::f64::consts::PI;

/// Default ceiling on the closure residual (worst-case leftover `|alpha|^2`
/// summed over modes) below which a candidate time counts as closed.
pub const DEFAULT_CLOSURE_TOL: f64 = 1e-6;

/// Default floor on the wrapped entangling phase below which a gate counts
/// as non-entangling.
pub const DEFAULT_ENTANGLE_TOL: f64 = 1e-6;

/// Self-check for [`phase_quadrature`]: doubling the Simpson grid must move
/// the result by less than this, in rad.
pub const QUADRATURE_DOUBLING_TOL: f64 = 1e-10;

/// Cap on the number of whole-cycle closure candidates [`find_closure`]
/// will enumerate before giving up on a pathologically long search window.
pub const MAX_CLOSURE_CANDIDATES: usize = 1_000_000;

/// Errors from phase evaluation and closure search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateError {
    Model(ModelError),
    /// Phase or trajectory evaluation at exactly zero mode detuning; the
    /// loop description degenerates (the trajectory is a straight line).
    ZeroDetuning,
    /// The Simpson self-check moved by more than
    /// [`QUADRATURE_DOUBLING_TOL`] when the grid was doubled.
    QuadratureNotConverged { change: f64, tol: f64 },
    /// No mode completes even one cycle within `t_max`.
    NoClosureCandidate { t_max: f64, shortest_cycle: f64 },
    /// The closure search window contains more whole-cycle candidates than
    /// [`MAX_CLOSURE_CANDIDATES`].
    ClosureSearchTooLarge { t_max: f64, candidates: usize },
}

impl From<ModelError> for GateError {
    fn from(err: ModelError) -> Self {
        GateError::Model(err)
    }
}

impl fmt::Display for GateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateError::Model(err) => write!(f, "{}", err),
            GateError::ZeroDetuning => {
                write!(f, "mode detuning is exactly zero; phase-space loop degenerates")
            }
            GateError::QuadratureNotConverged { change, tol } => write!(
                f,
                "quadrature self-check failed: doubling the grid moved the phase by {:e} rad (tolerance {:e})",
                change, tol,
            ),
            GateError::NoClosureCandidate { t_max, shortest_cycle } => write!(
                f,
                "no mode completes a cycle within {:e} us (shortest cycle {:e} us)",
                t_max, shortest_cycle,
            ),
            GateError::ClosureSearchTooLarge { t_max, candidates } => write!(
                f,
                "closure search up to {:e} us would enumerate {} candidates; raise the mode detunings or lower t_max",
                t_max, candidates,
            ),
        }
    }
}

impl core::error::Error for GateError {}

/// Wraps a phase into `(-pi, pi]`.
pub fn wrap_phase(phi: f64) -> f64 {
    let y = phi % TAU;
    if y > PI {
        y - TAU
    } else if y <= -PI {
        y + TAU
    } else {
        y
    }
}

/// `sin(x) / x`, continuous through zero.
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Displacement of a mode driven at `chi` and detuned by `eta`, after `t`:
/// `(chi / eta) (e^{-i 2 pi eta t} - 1)`.
pub fn trajectory_amplitude(chi: Complex64, eta: f64, t: f64) -> Result<Complex64, GateError> {
    if eta == 0.0 {
        return Err(GateError::ZeroDetuning);
    }
    let theta = TAU * eta * t;
    Ok(chi / eta * (Complex64::cis(-theta) - 1.0))
}

/// `|alpha(t)|`, evaluated in a form that stays finite as `eta -> 0`:
/// `2 pi |chi| t |sinc(pi eta t)|`.
pub fn trajectory_amplitude_abs(chi: Complex64, eta: f64, t: f64) -> f64 {
    (TAU * chi.norm() * t * sinc(PI * eta * t)).abs()
}

/// Phase accumulated by one mode up to `t`, split into its parts.
///
/// The parts satisfy `total = dynamic + geometric`, `dynamic = 2 total` and
/// `geometric = -total` at every time, not only at loop closure; the
/// geometric part is minus the swept area, and for a circular loop through
/// the origin the dynamic part is always twice that area with opposite
/// sign convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModePhases {
    pub total: f64,
    pub dynamic: f64,
    pub geometric: f64,
}

/// Closed-form mode phase:
/// `total = (|chi| / eta)^2 (sin theta - theta)` with `theta = 2 pi eta t`,
/// `dynamic = -2 (|chi| / eta)^2 (theta - sin theta)`,
/// `geometric = total - dynamic`.
pub fn phase_closed_form(chi: Complex64, eta: f64, t: f64) -> Result<ModePhases, GateError> {
    if eta == 0.0 {
        return Err(GateError::ZeroDetuning);
    }
    let theta = TAU * eta * t;
    let w = chi.norm_sqr() / (eta * eta);
    let total = w * (theta.sin() - theta);
    let dynamic = -2.0 * w * (theta - theta.sin());
    let geometric = total - dynamic;
    Ok(ModePhases { total, dynamic, geometric })
}

/// Total mode phase by composite Simpson quadrature of
/// `Im[alpha^* (d alpha / d tau)]`, with an automatic grid fine enough for
/// the built-in doubling check.  Cross-validates [`phase_closed_form`];
/// all production paths use the closed form.
pub fn phase_quadrature(chi: Complex64, eta: f64, t: f64) -> Result<f64, GateError> {
    let cycles = (eta * t).abs();
    // ~4096 subintervals per cycle keep the Simpson error a few orders
    // below the doubling tolerance for loop counts up to O(10).
    let n = (((cycles + 1.0) * 4096.0) as usize).clamp(8192, 1 << 22);
    phase_quadrature_with(chi, eta, t, n)
}

/// [`phase_quadrature`] with an explicit subinterval count (rounded up to
/// even); the doubling self-check still applies.
pub fn phase_quadrature_with(
    chi: Complex64,
    eta: f64,
    t: f64,
    subintervals: usize,
) -> Result<f64, GateError> {
    if eta == 0.0 {
        return Err(GateError::ZeroDetuning);
    }
    let n = subintervals.max(2).next_multiple_of(2);
    let coarse = simpson_phase(chi, eta, t, n);
    let fine = simpson_phase(chi, eta, t, 2 * n);
    let change = (fine - coarse).abs();
    if change > QUADRATURE_DOUBLING_TOL {
        return Err(GateError::QuadratureNotConverged { change, tol: QUADRATURE_DOUBLING_TOL });
    }
    Ok(fine)
}

/// `Im[alpha^* d alpha / d tau]` at `tau`, built from the trajectory and
/// its derivative `d alpha / d tau = -i 2 pi chi e^{-i 2 pi eta tau}`.
fn phase_integrand(chi: Complex64, eta: f64, tau: f64) -> f64 {
    let theta = TAU * eta * tau;
    let alpha = chi / eta * (Complex64::cis(-theta) - 1.0);
    let dalpha = Complex64::new(0.0, -TAU) * chi * Complex64::cis(-theta);
    (alpha.conj() * dalpha).im
}

/// Composite Simpson rule over `[0, t]` with `n` (even) subintervals.
/// Kahan-compensated summation; the doubling check sits at 1e-10 and the
/// plain sum of ~1e5 terms would contribute noise at a comparable level.
fn simpson_phase(chi: Complex64, eta: f64, t: f64, n: usize) -> f64 {
    let h = t / n as f64;
    let mut sum = phase_integrand(chi, eta, 0.0) + phase_integrand(chi, eta, t);
    let mut comp = 0.0;
    for i in 1..n {
        let weight = if i % 2 == 1 { 4.0 } else { 2.0 };
        let term = weight * phase_integrand(chi, eta, i as f64 * h);
        let y = term - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    sum * h / 3.0
}

/// Per-basis phase bookkeeping at a fixed time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseDecomposition {
    pub t: f64,
    /// Mode-resolved parts, indexed `[basis][mode]`.
    pub per_mode: [[ModePhases; 3]; 4],
    /// Summed over modes, indexed by basis.
    pub total: [f64; 4],
    pub dynamic: [f64; 4],
    pub geometric: [f64; 4],
}

/// Phase decomposition from explicit displacement rates and detunings.
pub fn phases_from_couplings(
    chi: &ChiTable,
    eta: &EtaTriple,
    t: f64,
) -> Result<PhaseDecomposition, GateError> {
    let zero = ModePhases { total: 0.0, dynamic: 0.0, geometric: 0.0 };
    let mut per_mode = [[zero; 3]; 4];
    let mut total = [0.0; 4];
    let mut dynamic = [0.0; 4];
    let mut geometric = [0.0; 4];
    for basis in LogicalBasis::ALL {
        let b = basis.index();
        for n in 0..3 {
            let p = phase_closed_form(chi.entry(basis, n), eta.mode(n), t)?;
            per_mode[b][n] = p;
            total[b] += p.total;
            dynamic[b] += p.dynamic;
            geometric[b] += p.geometric;
        }
    }
    Ok(PhaseDecomposition { t, per_mode, total, dynamic, geometric })
}

/// Phase decomposition derived from system parameters.
pub fn phases_at(params: &SystemParams, t: f64) -> Result<PhaseDecomposition, GateError> {
    let couplings = derive_couplings(params)?;
    let chi = chi_table(&couplings);
    let eta = eta_values(params)?;
    phases_from_couplings(&chi, &eta, t)
}

/// Worst case over basis states of the summed leftover displacement
/// population `sum_n |alpha_n(t)|^2`.  Zero exactly when every driven loop
/// has closed.
pub fn closure_residual(chi: &ChiTable, eta: &EtaTriple, t: f64) -> f64 {
    let mut worst = 0.0_f64;
    for basis in LogicalBasis::ALL {
        let mut sum = 0.0;
        for n in 0..3 {
            let a = trajectory_amplitude_abs(chi.entry(basis, n), eta.mode(n), t);
            sum += a * a;
        }
        worst = worst.max(sum);
    }
    worst
}

/// A loop-closure time and how well it closes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosureSolution {
    /// Closure time, us.
    pub t: f64,
    /// Whole cycles completed by each mode at `t` (nearest integer).
    pub loops: [u32; 3],
    /// [`closure_residual`] at `t`.
    pub residual: f64,
}

impl ClosureSolution {
    pub fn meets(&self, tol: f64) -> bool {
        self.residual <= tol
    }
}

/// Searches `(0, t_max]` for the earliest time at which all three driven
/// loops close to within `tol`, falling back to the best approximate
/// closure found.
///
/// Candidates are the whole-cycle times `l / |eta_n|` of each mode, each
/// locally refined by golden-section descent on [`closure_residual`] over
/// a quarter-cycle window of the fastest mode.  The first refined
/// candidate (in increasing time) meeting `tol` is returned immediately;
/// otherwise the candidate with the smallest residual wins, earlier times
/// breaking ties.  The returned solution may therefore have
/// `residual > tol`; check [`ClosureSolution::meets`].
pub fn find_closure(
    chi: &ChiTable,
    eta: &EtaTriple,
    t_max: f64,
    tol: f64,
) -> Result<ClosureSolution, GateError> {
    let mut shortest_cycle = f64::INFINITY;
    let mut fastest = 0.0_f64;
    for n in 0..3 {
        let abs = eta.mode(n).abs();
        if abs > 0.0 {
            shortest_cycle = shortest_cycle.min(1.0 / abs);
        }
        fastest = fastest.max(abs);
    }
    if !(t_max > 0.0) || shortest_cycle > t_max {
        return Err(GateError::NoClosureCandidate { t_max, shortest_cycle });
    }

    let mut candidates: Vec<f64> = Vec::new();
    for n in 0..3 {
        let abs = eta.mode(n).abs();
        if abs == 0.0 {
            continue;
        }
        let count = (t_max * abs * (1.0 + 1e-12)) as usize;
        if candidates.len() + count > MAX_CLOSURE_CANDIDATES {
            return Err(GateError::ClosureSearchTooLarge {
                t_max,
                candidates: candidates.len() + count,
            });
        }
        for l in 1..=count {
            candidates.push(l as f64 / abs);
        }
    }
    candidates.sort_by(|a, b| a.partial_cmp(b).expect("candidate times are finite"));
    candidates.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * *b);

    let residual_at = |t: f64| closure_residual(chi, eta, t);
    let window = 0.25 / fastest;
    let mut best: Option<ClosureSolution> = None;
    for &cand in &candidates {
        let lo = (cand - window).max(0.5 * shortest_cycle);
        let hi = (cand + window).min(t_max);
        let (mut t_ref, mut r_ref) = golden_min(&residual_at, lo, hi);
        let r_cand = residual_at(cand);
        if r_cand < r_ref {
            t_ref = cand;
            r_ref = r_cand;
        }
        let solution = ClosureSolution {
            t: t_ref,
            loops: loop_counts(eta, t_ref),
            residual: r_ref,
        };
        if solution.meets(tol) {
            return Ok(solution);
        }
        let better = match &best {
            None => true,
            Some(b) => r_ref < b.residual,
        };
        if better {
            best = Some(solution);
        }
    }
    Ok(best.expect("candidate list is non-empty"))
}

fn loop_counts(eta: &EtaTriple, t: f64) -> [u32; 3] {
    let mut loops = [0u32; 3];
    for n in 0..3 {
        loops[n] = (eta.mode(n).abs() * t).round() as u32;
    }
    loops
}

/// Golden-section minimization of `f` over `[a, b]`; returns the best
/// point and value.  Enough iterations to shrink the bracket by ~3e-13.
fn golden_min(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..80 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// The assembled diagonal gate at a fixed time.
///
/// Diagonal and unitary by construction: the four entries are pure phases,
/// and the residual displacements are reported separately rather than
/// folded into a non-unitary map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateResult {
    /// Gate time, us.
    pub t: f64,
    /// Accumulated phase per basis state, unwrapped.
    pub phases: [f64; 4],
    /// Same, wrapped to `(-pi, pi]`.
    pub phases_wrapped: [f64; 4],
    /// Local-phase invariant `gamma_00 + gamma_11 - gamma_01 - gamma_10`.
    pub entangling_phase: f64,
    /// Leftover `|alpha_n(t)|` per basis and mode.
    pub residual_amplitudes: [[f64; 3]; 4],
    /// `exp(-sum_n |alpha_n|^2 / 2)` per basis: overlap of the displaced
    /// field state with the vacuum, an upper bound on how faithfully this
    /// diagonal description applies.
    pub fidelity_proxy: [f64; 4],
}

/// Builds the gate at `t` from system parameters.
pub fn build_gate(params: &SystemParams, t: f64) -> Result<GateResult, GateError> {
    let couplings = derive_couplings(params)?;
    let chi = chi_table(&couplings);
    let eta = eta_values(params)?;
    build_gate_from_couplings(&chi, &eta, t)
}

/// Builds the gate at `t` from explicit displacement rates and detunings.
pub fn build_gate_from_couplings(
    chi: &ChiTable,
    eta: &EtaTriple,
    t: f64,
) -> Result<GateResult, GateError> {
    let decomposition = phases_from_couplings(chi, eta, t)?;
    let phases = decomposition.total;
    let mut phases_wrapped = [0.0; 4];
    let mut residual_amplitudes = [[0.0; 3]; 4];
    let mut fidelity_proxy = [0.0; 4];
    for basis in LogicalBasis::ALL {
        let b = basis.index();
        phases_wrapped[b] = wrap_phase(phases[b]);
        let mut pop = 0.0;
        for n in 0..3 {
            let a = trajectory_amplitude_abs(chi.entry(basis, n), eta.mode(n), t);
            residual_amplitudes[b][n] = a;
            pop += a * a;
        }
        fidelity_proxy[b] = (-0.5 * pop).exp();
    }
    let entangling_phase = phases[0] + phases[3] - phases[1] - phases[2];
    Ok(GateResult { t, phases, phases_wrapped, entangling_phase, residual_amplitudes, fidelity_proxy })
}

/// Whether the gate entangles: wrapped distance of the entangling phase
/// from the nearest multiple of `2 pi`, compared against `tol`.  Returns
/// `(entangling, distance)`.
pub fn entangling_measure(gate: &GateResult, tol: f64) -> (bool, f64) {
    let distance = wrap_phase(gate.entangling_phase).abs();
    (distance > tol, distance)
}

/// Photon-number statistics of one driven mode over `[0, t_span]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Occupation {
    /// Peak `|alpha|^2` over the span.
    pub max: f64,
    /// Time average of `|alpha|^2` over the span.
    pub mean: f64,
}

/// Occupation statistics for a single mode.  Infallible: both quantities
/// have closed forms for every `(chi, eta, t_span)`, including `eta = 0`.
///
/// `|alpha(t)|^2 = (2 pi |chi| t)^2 sinc^2(pi eta t)` rises monotonically
/// until the half cycle `t = 1 / (2 |eta|)`, where it peaks at
/// `(2 |chi / eta|)^2`; so the peak over the span is the analytic maximum
/// once the span covers a half cycle and the endpoint value otherwise.
/// The mean is `(2 pi |chi| t)^2 q(2 pi eta t)` with
/// `q(z) = 2 (1 - sinc z) / z^2`, `q(0) = 1/3`.
pub fn photon_occupation(chi: Complex64, eta: f64, t_span: f64) -> Occupation {
    let t = t_span.abs();
    let amp = chi.norm();
    let max = if eta != 0.0 && eta.abs() * t >= 0.5 {
        4.0 * amp * amp / (eta * eta)
    } else {
        let a = TAU * amp * t * sinc(PI * eta * t);
        a * a
    };
    let z = TAU * eta * t;
    let scale = TAU * amp * t;
    let q = if z.abs() < 1e-4 {
        (1.0 - z * z / 20.0) / 3.0
    } else {
        2.0 * (1.0 - sinc(z)) / (z * z)
    };
    Occupation { max, mean: scale * scale * q }
}

/// [`photon_occupation`] over the whole displacement table, indexed
/// `[basis][mode]`.
pub fn occupation_table(
    chi: &ChiTable,
    eta: &EtaTriple,
    t_span: f64,
) -> [[Occupation; 3]; 4] {
    let mut table = [[Occupation { max: 0.0, mean: 0.0 }; 3]; 4];
    for basis in LogicalBasis::ALL {
        for n in 0..3 {
            table[basis.index()][n] = photon_occupation(chi.entry(basis, n), eta.mode(n), t_span);
        }
    }
    table
}
