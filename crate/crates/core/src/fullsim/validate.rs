//! Cross-validation of the dispersive effective model against the full
//! truncated-space integration.
//!
//! For each logical basis state the initial state is evolved under the
//! pre-elimination Hamiltonian and compared with the closed-form phase
//! prediction:
//!
//! - the acquired phase is `arg <psi(0)|psi(t)>`, valid while the state
//!   mostly returns to where it started (overlap above
//!   [`EXTRACTION_OVERLAP_FLOOR`]);
//! - `leakage = 1 - |<psi(0)|psi(t)>|^2` measures population left in
//!   excited atoms and cavity photons;
//! - the comparison error is the wrapped phase distance, reported both
//!   absolutely and relative to the effective prediction.
//!
//! Two systematic probes ship with the comparison.  Scaling the drive
//! detunings up (see [`delta_scaling_scan`]) pushes the system deeper
//! into the dispersive regime, so the model error must fall; this
//! separates adiabatic-elimination error from integrator error.  Raising
//! the Fock cutoff by one and re-running bounds the truncation error,
//! which must stay below the residual photon occupation for the cutoff
//! to be declared converged.

use num_complex::Complex64;

use alloc::vec::Vec;

use crate::gatephase::{closure_residual, phases_at, wrap_phase};
use crate::model::{chi_table, derive_couplings, eta_values, LogicalBasis, SystemParams};

use super::hamiltonian::Hamiltonian;
use super::integrate::evolve_monitored;
use super::space::{build_space, FockConfig, StateSpace};
use super::FullsimError;

/// Smallest return overlap for which a phase is still extracted.
pub const EXTRACTION_OVERLAP_FLOOR: f64 = 1e-6;

/// Returns `(phase, leakage)` of `evolved` relative to `reference`.
///
/// The phase is `arg <reference|evolved>` in `(-pi, pi]`; leakage is
/// `1 - |<reference|evolved>|^2` clamped at zero against rounding.
pub fn extract_phase_leakage(
    reference: &[Complex64],
    evolved: &[Complex64],
) -> Result<(f64, f64), FullsimError> {
    assert_eq!(reference.len(), evolved.len());
    let overlap: Complex64 = reference
        .iter()
        .zip(evolved.iter())
        .map(|(a, b)| a.conj() * b)
        .sum();
    let overlap_abs = overlap.norm();
    if overlap_abs < EXTRACTION_OVERLAP_FLOOR {
        return Err(FullsimError::DepopulatedState { overlap_abs });
    }
    let leakage = (1.0 - overlap_abs * overlap_abs).max(0.0);
    Ok((overlap.arg(), leakage))
}

/// Full-versus-effective comparison for one logical basis state.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisComparison {
    pub basis: LogicalBasis,
    /// Phase extracted from the full evolution, rad in `(-pi, pi]`.
    pub full_phase: f64,
    /// Effective-model total phase wrapped to `(-pi, pi]`.
    pub effective_phase: f64,
    /// Wrapped distance between the two phases, rad.
    pub abs_error: f64,
    /// `abs_error / max(|effective_phase|, 1e-15)`.
    pub rel_error: f64,
    pub leakage: f64,
    /// Largest excited-atom population seen at any accepted step.
    pub max_excited_population: f64,
    pub norm_drift: f64,
    /// Whether the drift stayed within the integrator's own bound.
    pub norm_ok: bool,
    pub accepted_steps: usize,
    pub rhs_evals: usize,
}

/// Comparison over all four basis states plus the systematic probes.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub n_max: usize,
    pub accuracy: f64,
    /// Evolution span, us.
    pub t: f64,
    pub runs: [BasisComparison; 4],
    /// Same comparison with the Fock cutoff raised by one.
    pub cutoff_runs: [BasisComparison; 4],
    /// Wrapped distance between the full phases at the two cutoffs.
    pub cutoff_phase_shift: [f64; 4],
    /// Worst-basis residual `sum_n |alpha_n|^2` of the effective model at
    /// `t`; the cutoff shifts should sit well below this scale.
    pub residual_occupation: f64,
    pub max_abs_error: f64,
    pub max_rel_error: f64,
    pub all_norm_ok: bool,
}

/// One point of the detuning-scaling probe.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingPoint {
    /// Factor applied to both drive detunings.
    pub scale: f64,
    pub delta_cap0: f64,
    pub delta_cap1: f64,
    pub max_abs_error: f64,
    pub max_rel_error: f64,
    pub max_leakage: f64,
}

fn compare_basis(
    h: &Hamiltonian,
    space: &StateSpace,
    basis: LogicalBasis,
    t: f64,
    accuracy: f64,
    effective_total: f64,
) -> Result<BasisComparison, FullsimError> {
    let psi0 = space.logical_state(basis);
    let mask = space.excited_mask();
    let mut max_excited = 0.0_f64;
    let out = evolve_monitored(h, &psi0, t, accuracy, |_, psi| {
        let mut p = 0.0;
        for (a, &hot) in psi.iter().zip(mask.iter()) {
            if hot {
                p += a.norm_sqr();
            }
        }
        if p > max_excited {
            max_excited = p;
        }
    })?;
    let (full_phase, leakage) = extract_phase_leakage(&psi0, &out.state)?;
    let effective_phase = wrap_phase(effective_total);
    let abs_error = wrap_phase(full_phase - effective_phase).abs();
    Ok(BasisComparison {
        basis,
        full_phase,
        effective_phase,
        abs_error,
        rel_error: abs_error / effective_phase.abs().max(1e-15),
        leakage,
        max_excited_population: max_excited,
        norm_drift: out.norm_drift,
        norm_ok: out.norm_drift <= out.drift_bound,
        accepted_steps: out.accepted_steps,
        rhs_evals: out.rhs_evals,
    })
}

fn compare_all(
    params: &SystemParams,
    t: f64,
    space: &StateSpace,
    accuracy: f64,
) -> Result<[BasisComparison; 4], FullsimError> {
    let phases = phases_at(params, t)?;
    let h = Hamiltonian::build(space, params);
    let mut runs = Vec::with_capacity(4);
    for basis in LogicalBasis::ALL {
        runs.push(compare_basis(
            &h,
            space,
            basis,
            t,
            accuracy,
            phases.total[basis.index()],
        )?);
    }
    Ok(runs.try_into().unwrap())
}

/// Runs the four-basis comparison at `config`'s cutoff and once more with
/// the cutoff raised by one.
pub fn validate_against_effective(
    params: &SystemParams,
    t: f64,
    config: &FockConfig,
    accuracy: f64,
) -> Result<ValidationReport, FullsimError> {
    let params = params.validated().map_err(crate::gatephase::GateError::Model)?;
    let space = build_space(config);
    let raised = build_space(&config.raised()?);
    let runs = compare_all(&params, t, &space, accuracy)?;
    let cutoff_runs = compare_all(&params, t, &raised, accuracy)?;

    let mut cutoff_phase_shift = [0.0_f64; 4];
    for i in 0..4 {
        cutoff_phase_shift[i] = wrap_phase(cutoff_runs[i].full_phase - runs[i].full_phase).abs();
    }
    let chi = chi_table(&derive_couplings(&params)?);
    let eta = eta_values(&params)?;
    let residual_occupation = closure_residual(&chi, &eta, t);

    let max_abs_error = runs.iter().map(|r| r.abs_error).fold(0.0, f64::max);
    let max_rel_error = runs.iter().map(|r| r.rel_error).fold(0.0, f64::max);
    let all_norm_ok = runs.iter().chain(cutoff_runs.iter()).all(|r| r.norm_ok);
    Ok(ValidationReport {
        n_max: space.n_max(),
        accuracy,
        t,
        runs,
        cutoff_runs,
        cutoff_phase_shift,
        residual_occupation,
        max_abs_error,
        max_rel_error,
        all_norm_ok,
    })
}

/// Re-runs the comparison with both drive detunings multiplied by each
/// entry of `scales`; deeper detuning must shrink the model error.
pub fn delta_scaling_scan(
    params: &SystemParams,
    t: f64,
    config: &FockConfig,
    accuracy: f64,
    scales: &[f64],
) -> Result<Vec<ScalingPoint>, FullsimError> {
    let space = build_space(config);
    let mut points = Vec::with_capacity(scales.len());
    for &scale in scales {
        let mut scaled = params.clone();
        scaled.delta0 = params.delta0 * scale;
        scaled.delta1 = params.delta1 * scale;
        let scaled = scaled.validated().map_err(crate::gatephase::GateError::Model)?;
        let runs = compare_all(&scaled, t, &space, accuracy)?;
        points.push(ScalingPoint {
            scale,
            delta_cap0: scaled.delta0,
            delta_cap1: scaled.delta1,
            max_abs_error: runs.iter().map(|r| r.abs_error).fold(0.0, f64::max),
            max_rel_error: runs.iter().map(|r| r.rel_error).fold(0.0, f64::max),
            max_leakage: runs.iter().map(|r| r.leakage).fold(0.0, f64::max),
        });
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    /// Weak-coupling point sized so a truncated run finishes quickly.
    fn desk_params() -> SystemParams {
        SystemParams {
            nu: 5.0,
            g0: re(2.0),
            g1: re(2.0),
            omega0: re(20.0),
            omega1: re(20.0),
            omega0p: re(20.0),
            omega1p: re(20.0),
            delta0: 250.0,
            delta1: 400.0,
            delta: 6.0,
        }
    }

    #[test]
    fn extraction_reads_phase_and_leakage() {
        let a = vec![re(1.0), re(0.0)];
        let (phase, leak) = extract_phase_leakage(&a, &a).unwrap();
        assert_eq!(phase, 0.0);
        assert_eq!(leak, 0.0);

        let rotated = vec![Complex64::from_polar(0.8, 0.3), re(0.6)];
        let (phase, leak) = extract_phase_leakage(&a, &rotated).unwrap();
        assert!((phase - 0.3).abs() < 1e-15);
        assert!((leak - 0.36).abs() < 1e-15);
    }

    #[test]
    fn extraction_rejects_depopulated_state() {
        let a = vec![re(1.0), re(0.0)];
        let b = vec![re(0.0), re(1.0)];
        match extract_phase_leakage(&a, &b) {
            Err(FullsimError::DepopulatedState { overlap_abs }) => {
                assert_eq!(overlap_abs, 0.0);
            }
            other => panic!("expected depopulation error, got {:?}", other),
        }
    }

    #[test]
    fn desk_point_reproduces_reference_solver() {
        // Frozen output of an independent sparse-matrix integration of the
        // same Hamiltonian (n_max = 1, t = 0.25): phases to 8 decimals.
        let report =
            validate_against_effective(&desk_params(), 0.25, &FockConfig::new(1).unwrap(), 1e-10)
                .unwrap();
        assert_eq!(report.n_max, 1);
        let expect_full = [0.002_808_48, 0.001_805_51, 0.001_805_51, 0.001_232_08];
        let expect_eff = [0.003_162_49, 0.001_969_49, 0.001_969_49, 0.001_227_86];
        for (run, (&full, &eff)) in report
            .runs
            .iter()
            .zip(expect_full.iter().zip(expect_eff.iter()))
        {
            assert!(
                (run.full_phase - full).abs() < 2e-8,
                "{}: full phase {} vs {}",
                run.basis.label(),
                run.full_phase,
                full,
            );
            assert!((run.effective_phase - eff).abs() < 5e-9);
            assert!(run.norm_ok);
            assert!(run.leakage > 1e-4 && run.leakage < 0.02);
            assert!(run.max_excited_population > 1e-5 && run.max_excited_population < 0.02);
        }
        // Swapping which cavity holds the control excitation cannot matter.
        assert!((report.runs[1].full_phase - report.runs[2].full_phase).abs() < 1e-9);
        assert!((report.runs[0].abs_error - 3.540e-4).abs() < 1e-7);
        assert!((report.runs[0].rel_error - 0.1119).abs() < 1e-3);
        assert!((report.runs[0].leakage - 1.244e-2).abs() < 1e-5);
        // Residual of the effective displacements at the same instant.
        assert!((report.residual_occupation - 0.012_533_314_006_8).abs() < 1e-9);
        // One extra photon level moves the phases by ~1e-5 at most, well
        // below the residual-occupation scale but clearly resolved.
        for (i, &shift) in report.cutoff_phase_shift.iter().enumerate() {
            assert!(shift < 1e-4, "basis {i} shift {shift:e}");
            assert!(shift > 1e-7, "basis {i} shift {shift:e}");
            assert!(shift < report.residual_occupation);
        }
        assert!(report.all_norm_ok);
        assert!((report.max_abs_error - 3.540e-4).abs() < 1e-7);
    }

    #[test]
    fn deeper_detuning_shrinks_model_error() {
        let points = delta_scaling_scan(
            &desk_params(),
            0.25,
            &FockConfig::new(1).unwrap(),
            1e-10,
            &[1.0, 2.0, 4.0],
        )
        .unwrap();
        assert_eq!(points.len(), 3);
        assert_eq!(points[1].delta_cap0, 500.0);
        assert_eq!(points[2].delta_cap1, 1600.0);
        for pair in points.windows(2) {
            assert!(
                pair[1].max_abs_error < pair[0].max_abs_error,
                "abs error did not fall: {:e} -> {:e}",
                pair[0].max_abs_error,
                pair[1].max_abs_error,
            );
            assert!(pair[1].max_rel_error < pair[0].max_rel_error);
            assert!(pair[1].max_leakage < pair[0].max_leakage);
        }
        // Margins are wide: each doubling cuts the error several-fold.
        assert!(points[0].max_abs_error > 4.0 * points[1].max_abs_error);
    }
}
