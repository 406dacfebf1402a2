//! The driven atom-field Hamiltonian as a fixed list of oscillating terms.
//!
//! In the frame rotating with the atomic transitions and the free field
//! modes, every coupling takes the form
//!
//! ```text
//! H(t) = sum_p [ coeff_p e^{i 2 pi f_p t} P_p + h.c. ]
//! ```
//!
//! with time-independent sparse patterns `P_p` and cyclic frequencies
//! `f_p` in MHz.  Per Raman pair `m` there are five terms:
//!
//! * the drive `Omega_m / 2` at `+Delta_m` and its Stark partner
//!   `Omega'_m / 2` at `-Delta_m`, both exciting `|m> -> |e>` on atoms
//!   `j1` and `k1`;
//! * the cavity leg `g_m` on all four atoms, split over the three field
//!   modes: `c0` at `Delta_m + delta` with weight `+sqrt2/2` for `j`-atoms
//!   and `-sqrt2/2` for `k`-atoms, and `c1`, `c2` at
//!   `Delta_m + delta -/+ sqrt2 nu` with weight `1/2` on every atom.
//!
//! Ten terms in total.  Every pattern flips an atom to `|e>` (and the
//! cavity patterns also remove a photon), so patterns are strictly
//! off-diagonal and the `+ h.c.` in [`Hamiltonian::apply`] cannot double
//! count.

use num_complex::Complex64;

use alloc::vec::Vec;

use crate::model::{SystemParams, SQRT_2};

use super::space::{SparseAction, StateSpace};

const TAU: f64 = core::f64::consts::TAU;

/// One oscillating coupling `coeff e^{i 2 pi freq t} pattern + h.c.`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianTerm {
    /// Coupling amplitude, cyclic MHz.
    pub coeff: Complex64,
    /// Oscillation frequency, cyclic MHz.
    pub freq: f64,
    /// The time-independent sparse pattern.
    pub pattern: SparseAction,
}

/// The assembled Hamiltonian on a truncated state space.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    dim: usize,
    terms: Vec<HamiltonianTerm>,
}

impl Hamiltonian {
    /// Assembles all coupling terms for `params` on `space`.  No parameter
    /// validation happens here; callers own that.
    pub fn build(space: &StateSpace, params: &SystemParams) -> Hamiltonian {
        let half = SQRT_2 / 2.0;
        let j_minus_k = [half, half, -half, -half];
        let quarter = [0.5; 4];
        let drive_atoms = [1.0, 0.0, 1.0, 0.0]; // j1 and k1 only
        let s = SQRT_2 * params.nu;

        let mut terms = Vec::with_capacity(8);
        let pairs = [
            (0u8, params.omega0, params.omega0p, params.g0, params.delta0),
            (1u8, params.omega1, params.omega1p, params.g1, params.delta1),
        ];
        for (level, omega, omega_p, g, delta_cap) in pairs {
            let drive = space.raman_pattern(level, drive_atoms, None);
            terms.push(HamiltonianTerm {
                coeff: omega_p / 2.0,
                freq: -delta_cap,
                pattern: drive.clone(),
            });
            terms.push(HamiltonianTerm { coeff: omega / 2.0, freq: delta_cap, pattern: drive });
            terms.push(HamiltonianTerm {
                coeff: g,
                freq: delta_cap + params.delta,
                pattern: space.raman_pattern(level, j_minus_k, Some(0)),
            });
            terms.push(HamiltonianTerm {
                coeff: g,
                freq: delta_cap + params.delta - s,
                pattern: space.raman_pattern(level, quarter, Some(1)),
            });
            terms.push(HamiltonianTerm {
                coeff: g,
                freq: delta_cap + params.delta + s,
                pattern: space.raman_pattern(level, quarter, Some(2)),
            });
        }
        Hamiltonian { dim: space.dim(), terms }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[HamiltonianTerm] {
        &self.terms
    }

    /// `out = H(t) psi`, in cyclic MHz.
    pub fn apply(&self, t: f64, psi: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(psi.len(), self.dim);
        debug_assert_eq!(out.len(), self.dim);
        for v in out.iter_mut() {
            *v = Complex64::new(0.0, 0.0);
        }
        for term in &self.terms {
            let z = term.coeff * Complex64::cis(TAU * term.freq * t);
            let zc = z.conj();
            for &(row, col, amp) in term.pattern.entries() {
                let (r, c) = (row as usize, col as usize);
                out[r] += z * amp * psi[c];
                out[c] += zc * amp * psi[r];
            }
        }
    }

    /// Schroedinger right-hand side `d psi / dt = -i 2 pi H(t) psi`; the
    /// `2 pi` converts cyclic MHz to angular rad/us.
    pub fn schroedinger_rhs(&self, t: f64, psi: &[Complex64], out: &mut [Complex64]) {
        self.apply(t, psi, out);
        for v in out.iter_mut() {
            *v = Complex64::new(TAU * v.im, -TAU * v.re);
        }
    }
}
