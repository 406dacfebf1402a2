//! Machine-readable output documents.
//!
//! Every command emits one document: the command name, the fully
//! resolved configuration (so any run can be reproduced byte-for-byte
//! from its own output), and a command-specific result.  Units ride in
//! the field names: `*_mhz` cyclic frequency, `*_us` microseconds,
//! `*_rad` radians.  Complex numbers appear as `[re, im]` pairs.

use serde::Serialize;

use geomgate_core::gatephase::{GateResult, Occupation, PhaseDecomposition};
use geomgate_core::model::{ChiTable, EffectiveCouplings, LogicalBasis, RegimeReport};
use geomgate_core::Complex64;

use crate::config::RunConfig;

#[derive(Debug, Clone, Serialize)]
pub struct Document<T> {
    pub command: &'static str,
    pub resolved_config: RunConfig,
    pub result: T,
}

/// Complex number serialized as `[re, im]`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Cx(pub f64, pub f64);

impl From<Complex64> for Cx {
    fn from(z: Complex64) -> Self {
        Cx(z.re, z.im)
    }
}

/// One value per logical basis state, keyed "00", "01", "10", "11".
#[derive(Debug, Clone, Serialize)]
pub struct PerBasis<T> {
    #[serde(rename = "00")]
    pub b00: T,
    #[serde(rename = "01")]
    pub b01: T,
    #[serde(rename = "10")]
    pub b10: T,
    #[serde(rename = "11")]
    pub b11: T,
}

impl<T> From<[T; 4]> for PerBasis<T> {
    fn from(v: [T; 4]) -> Self {
        let [b00, b01, b10, b11] = v;
        PerBasis { b00, b01, b10, b11 }
    }
}

impl<T> PerBasis<T> {
    pub fn build(mut f: impl FnMut(LogicalBasis) -> T) -> Self {
        PerBasis {
            b00: f(LogicalBasis::ZeroZero),
            b01: f(LogicalBasis::ZeroOne),
            b10: f(LogicalBasis::OneZero),
            b11: f(LogicalBasis::OneOne),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LambdaDoc {
    pub lambda0: Cx,
    pub lambda1: Cx,
    pub lambda2: Cx,
    pub lambda0_prime: Cx,
    pub lambda1_prime: Cx,
    pub lambda2_prime: Cx,
}

impl From<&EffectiveCouplings> for LambdaDoc {
    fn from(c: &EffectiveCouplings) -> Self {
        LambdaDoc {
            lambda0: c.lambda0.into(),
            lambda1: c.lambda1.into(),
            lambda2: c.lambda2.into(),
            lambda0_prime: c.lambda0p.into(),
            lambda1_prime: c.lambda1p.into(),
            lambda2_prime: c.lambda2p.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioDoc {
    pub name: String,
    pub value: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegimeDoc {
    pub threshold: f64,
    pub ratios: Vec<RatioDoc>,
    pub all_pass: bool,
}

impl From<&RegimeReport> for RegimeDoc {
    fn from(r: &RegimeReport) -> Self {
        RegimeDoc {
            threshold: r.threshold,
            ratios: r
                .ratios
                .iter()
                .map(|x| RatioDoc {
                    name: x.name.to_string(),
                    value: x.value,
                    pass: x.pass,
                })
                .collect(),
            all_pass: r.all_pass(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CouplingsResult {
    pub lambda_mhz: LambdaDoc,
    pub chi_mhz: PerBasis<[Cx; 3]>,
    pub eta_mhz: [f64; 3],
    pub regime: RegimeDoc,
}

pub fn chi_doc(chi: &ChiTable) -> PerBasis<[Cx; 3]> {
    PerBasis::build(|b| {
        let row = chi.row(b);
        [row[0].into(), row[1].into(), row[2].into()]
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PhaseParts {
    pub total: f64,
    pub dynamic: f64,
    pub geometric: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct OccupationDoc {
    pub max: f64,
    pub mean: f64,
}

impl From<Occupation> for OccupationDoc {
    fn from(o: Occupation) -> Self {
        OccupationDoc { max: o.max, mean: o.mean }
    }
}

/// Gate summary shared by `gate`, `closure`, and `reproduce-paper`.
#[derive(Debug, Clone, Serialize)]
pub struct GateDoc {
    pub time_us: f64,
    /// Accumulated total phase per basis state (unwrapped).
    pub phases_rad: PerBasis<f64>,
    pub phases_wrapped_rad: PerBasis<f64>,
    /// Total = dynamic + geometric split, summed over modes.
    pub phase_parts_rad: PerBasis<PhaseParts>,
    /// The same split per bosonic mode (c0, c1, c2).
    pub per_mode_rad: PerBasis<[PhaseParts; 3]>,
    pub entangling_phase_rad: f64,
    /// Wrapped distance of the entangling phase from the nearest multiple
    /// of 2 pi.
    pub entangling_distance_rad: f64,
    pub entangling: bool,
    pub entangle_tol_rad: f64,
    /// `|alpha_n(t)|` per basis and mode; zero iff the loop closes.
    pub residual_amplitude: PerBasis<[f64; 3]>,
    /// `exp(-1/2 sum_n |alpha_n|^2)`: overlap cost of leftover
    /// displacement.
    pub fidelity_proxy: PerBasis<f64>,
    /// Time-maximum and time-average of `|alpha_n|^2` per basis and mode
    /// over `[0, t]`.
    pub photon_occupation: PerBasis<[OccupationDoc; 3]>,
    /// Largest `photon_occupation.max` across bases and modes.
    pub max_photon_occupation: f64,
}

pub fn gate_doc(
    gate: &GateResult,
    decomposition: &PhaseDecomposition,
    occupations: &[[Occupation; 3]; 4],
    entangling: bool,
    entangling_distance: f64,
    entangle_tol: f64,
) -> GateDoc {
    let parts = |b: LogicalBasis| PhaseParts {
        total: decomposition.total[b.index()],
        dynamic: decomposition.dynamic[b.index()],
        geometric: decomposition.geometric[b.index()],
    };
    let max_occ = occupations
        .iter()
        .flat_map(|row| row.iter().map(|o| o.max))
        .fold(0.0_f64, f64::max);
    GateDoc {
        time_us: gate.t,
        phases_rad: PerBasis::from(gate.phases),
        phases_wrapped_rad: PerBasis::from(gate.phases_wrapped),
        phase_parts_rad: PerBasis::build(parts),
        per_mode_rad: PerBasis::build(|b| {
            let row = &decomposition.per_mode[b.index()];
            core::array::from_fn(|n| PhaseParts {
                total: row[n].total,
                dynamic: row[n].dynamic,
                geometric: row[n].geometric,
            })
        }),
        entangling_phase_rad: gate.entangling_phase,
        entangling_distance_rad: entangling_distance,
        entangling,
        entangle_tol_rad: entangle_tol,
        residual_amplitude: PerBasis::from(gate.residual_amplitudes),
        fidelity_proxy: PerBasis::from(gate.fidelity_proxy),
        photon_occupation: PerBasis::build(|b| {
            core::array::from_fn(|n| occupations[b.index()][n].into())
        }),
        max_photon_occupation: max_occ,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosureResult {
    pub t_max_us: f64,
    pub closure_tol: f64,
    /// Best common-return time found, us.
    pub t_us: f64,
    /// Rounded loop count per mode at that time.
    pub loops: [u32; 3],
    /// Worst-basis `sum_n |alpha_n|^2` at `t_us`.
    pub residual: f64,
    pub meets_tolerance: bool,
    pub gate: GateDoc,
}

#[derive(Debug, Clone, Serialize)]
pub struct BasisRunDoc {
    pub basis: &'static str,
    pub full_phase_rad: f64,
    pub effective_phase_rad: f64,
    pub abs_error_rad: f64,
    pub rel_error: f64,
    pub leakage: f64,
    pub max_excited_population: f64,
    pub norm_drift: f64,
    pub norm_ok: bool,
    pub accepted_steps: usize,
    pub rhs_evals: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingPointDoc {
    pub scale: f64,
    pub delta_cap0_mhz: f64,
    pub delta_cap1_mhz: f64,
    pub max_abs_error_rad: f64,
    pub max_rel_error: f64,
    pub max_leakage: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidateResult {
    pub time_us: f64,
    pub fock_cutoff: usize,
    pub integrator_accuracy: f64,
    pub runs: PerBasis<BasisRunDoc>,
    /// Re-run with the photon cutoff raised by one.
    pub cutoff_runs: PerBasis<BasisRunDoc>,
    pub cutoff_phase_shift_rad: PerBasis<f64>,
    pub residual_occupation: f64,
    pub max_abs_error_rad: f64,
    pub max_rel_error: f64,
    pub all_norm_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_scan: Option<Vec<ScalingPointDoc>>,
    /// Present when the scan was requested but aborted; the fields above
    /// still carry the completed base comparison.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_scan_error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepAxisDoc {
    pub key: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub axes: Vec<SweepAxisDoc>,
    /// Column names for `rows`; the trailing `error` column lives in
    /// `errors`.
    pub columns: Vec<String>,
    /// One row per grid point, last axis fastest; cells are null when the
    /// point failed.
    pub rows: Vec<Vec<Option<f64>>>,
    /// Per-row failure message, null for clean points.
    pub errors: Vec<Option<String>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PublishedValues {
    pub phases_rad: PerBasis<f64>,
    pub gate_time_us: f64,
    pub max_mean_photon_number: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionDoc {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReproduceResult {
    pub computed: GateDoc,
    pub published: PublishedValues,
    pub criteria: Vec<CriterionDoc>,
    pub pass: bool,
    /// Why the photon-occupation comparison is reported, not asserted.
    pub occupation_note: &'static str,
}
