//! Basis layout of the truncated atom-field state space.
//!
//! Four three-level atoms in order `(j1, j2, k1, k2)` with levels
//! `0, 1, 2 = |0>, |1>, |e>`, then three field modes `(c0, c1, c2)` each
//! holding `0..=n_max` photons.  Atoms index slowly, modes quickly, both
//! lexicographic:
//!
//! ```text
//! index = atom_index * (n_max + 1)^3 + (n0 (n_max+1) + n1)(n_max+1) + n2
//! ```
//!
//! so the total dimension is `81 (n_max + 1)^3`.

use num_complex::Complex64;
// Float supplies powf/sqrt and friends when std is disabled.
#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec;
use alloc::vec::Vec;

use crate::model::LogicalBasis;

use super::FullsimError;

/// Atomic level index of `|e>`.
pub const EXCITED_LEVEL: u8 = 2;

const N_ATOMS: usize = 4;
const ATOM_DIM: usize = 81; // 3^4
const N_MODES: usize = 3;

/// Validated Fock-space configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockConfig {
    n_max: usize,
    dim_cap: usize,
}

impl FockConfig {
    /// Default ceiling on the state-space dimension; one complex amplitude
    /// per basis state plus integrator workspace lands around 250 MB here.
    pub const DEFAULT_DIM_CAP: usize = 1_000_000;

    /// A cutoff of `n_max` photons per mode under the default cap.
    pub fn new(n_max: usize) -> Result<Self, FullsimError> {
        Self::with_dim_cap(n_max, Self::DEFAULT_DIM_CAP)
    }

    /// [`FockConfig::new`] with an explicit dimension cap.
    pub fn with_dim_cap(n_max: usize, dim_cap: usize) -> Result<Self, FullsimError> {
        if n_max < 1 {
            return Err(FullsimError::InvalidCutoff { n_max });
        }
        let cap = dim_cap.min(u32::MAX as usize);
        let dim = n_max
            .checked_add(1)
            .and_then(|n| n.checked_pow(3))
            .and_then(|n| n.checked_mul(ATOM_DIM))
            .ok_or(FullsimError::DimensionCap { dim: usize::MAX, cap })?;
        if dim > cap {
            return Err(FullsimError::DimensionCap { dim, cap });
        }
        Ok(FockConfig { n_max, dim_cap })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Total dimension `81 (n_max + 1)^3`.
    pub fn dim(&self) -> usize {
        ATOM_DIM * (self.n_max + 1).pow(3)
    }

    /// The same configuration with one more photon per mode, for cutoff
    /// sensitivity checks.
    pub fn raised(&self) -> Result<Self, FullsimError> {
        Self::with_dim_cap(self.n_max + 1, self.dim_cap)
    }
}

/// Index arithmetic over the truncated basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StateSpace {
    n_max: usize,
    nph: usize,
    dim: usize,
}

/// Builds the state space for a validated configuration.
pub fn build_space(config: &FockConfig) -> StateSpace {
    let nph = config.n_max() + 1;
    StateSpace { n_max: config.n_max(), nph, dim: config.dim() }
}

impl StateSpace {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Basis index of atoms at `levels` with mode occupations `photons`.
    pub fn index_of(&self, levels: [u8; 4], photons: [usize; 3]) -> usize {
        debug_assert!(levels.iter().all(|&l| l < 3));
        debug_assert!(photons.iter().all(|&n| n <= self.n_max));
        let mut atom = 0usize;
        for &l in &levels {
            atom = atom * 3 + l as usize;
        }
        let mut field = 0usize;
        for &n in &photons {
            field = field * self.nph + n;
        }
        atom * self.nph.pow(3) + field
    }

    /// Inverse of [`StateSpace::index_of`].
    pub fn decode(&self, index: usize) -> ([u8; 4], [usize; 3]) {
        debug_assert!(index < self.dim);
        let field_dim = self.nph.pow(3);
        let mut atom = index / field_dim;
        let mut field = index % field_dim;
        let mut levels = [0u8; 4];
        for slot in levels.iter_mut().rev() {
            *slot = (atom % 3) as u8;
            atom /= 3;
        }
        let mut photons = [0usize; 3];
        for slot in photons.iter_mut().rev() {
            *slot = field % self.nph;
            field /= self.nph;
        }
        (levels, photons)
    }

    /// The vacuum-field product state encoding one logical basis state.
    pub fn logical_state(&self, basis: LogicalBasis) -> Vec<Complex64> {
        let mut psi = vec![Complex64::new(0.0, 0.0); self.dim];
        psi[self.index_of(basis.atom_levels(), [0, 0, 0])] = Complex64::new(1.0, 0.0);
        psi
    }

    /// Total population of basis states with at least one atom in `|e>`.
    pub fn excited_population(&self, psi: &[Complex64]) -> f64 {
        let mask = self.excited_mask();
        psi.iter()
            .zip(mask.iter())
            .filter(|(_, &m)| m)
            .map(|(a, _)| a.norm_sqr())
            .sum()
    }

    /// Marks basis states with at least one atom in `|e>`; precompute once
    /// when scanning populations along a trajectory.
    pub fn excited_mask(&self) -> Vec<bool> {
        let field_dim = self.nph.pow(3);
        let mut atom_excited = [false; ATOM_DIM];
        for (code, flag) in atom_excited.iter_mut().enumerate() {
            let mut a = code;
            for _ in 0..N_ATOMS {
                if a % 3 == EXCITED_LEVEL as usize {
                    *flag = true;
                }
                a /= 3;
            }
        }
        let mut mask = vec![false; self.dim];
        for (idx, m) in mask.iter_mut().enumerate() {
            *m = atom_excited[idx / field_dim];
        }
        mask
    }

    /// Mean photon number of one mode.
    pub fn mode_occupation(&self, psi: &[Complex64], mode: usize) -> f64 {
        let mut total = 0.0;
        for (idx, a) in psi.iter().enumerate() {
            let (_, photons) = self.decode(idx);
            total += photons[mode] as f64 * a.norm_sqr();
        }
        total
    }

    /// Population sitting exactly at the Fock cutoff of one mode; large
    /// values mean the truncation is biting.
    pub fn top_level_population(&self, psi: &[Complex64], mode: usize) -> f64 {
        let mut total = 0.0;
        for (idx, a) in psi.iter().enumerate() {
            let (_, photons) = self.decode(idx);
            if photons[mode] == self.n_max {
                total += a.norm_sqr();
            }
        }
        total
    }

    /// Annihilation action of one field mode: `sqrt(n) |n-1><n|`, zero
    /// above the cutoff by construction.
    pub fn mode_lowering(&self, mode: usize) -> SparseAction {
        assert!(mode < N_MODES);
        let mut entries = Vec::with_capacity(self.dim / self.nph * self.n_max);
        for idx in 0..self.dim {
            let (levels, mut photons) = self.decode(idx);
            let n = photons[mode];
            if n == 0 {
                continue;
            }
            photons[mode] = n - 1;
            entries.push((
                self.index_of(levels, photons) as u32,
                idx as u32,
                (n as f64).sqrt(),
            ));
        }
        SparseAction { dim: self.dim, entries }
    }

    /// Transition action `|e><from|` on one atom (0..=3, order
    /// `j1, j2, k1, k2`).
    pub fn atom_transition(&self, atom: usize, from_level: u8) -> SparseAction {
        assert!(atom < N_ATOMS && from_level < 3);
        let mut entries = Vec::with_capacity(self.dim / 3);
        for idx in 0..self.dim {
            let (mut levels, photons) = self.decode(idx);
            if levels[atom] != from_level {
                continue;
            }
            levels[atom] = EXCITED_LEVEL;
            entries.push((self.index_of(levels, photons) as u32, idx as u32, 1.0));
        }
        SparseAction { dim: self.dim, entries }
    }

    /// Combined pattern `sum_l w_l |e>_l<from|` times an optional mode
    /// annihilation, as one sparse action.  Atoms with zero weight are
    /// skipped.
    pub fn raman_pattern(
        &self,
        from_level: u8,
        weights: [f64; 4],
        mode: Option<usize>,
    ) -> SparseAction {
        assert!(from_level < 3);
        let mut entries = Vec::new();
        for idx in 0..self.dim {
            let (levels, photons) = self.decode(idx);
            if let Some(mode) = mode {
                if photons[mode] == 0 {
                    continue;
                }
            }
            for (atom, &w) in weights.iter().enumerate() {
                if w == 0.0 || levels[atom] != from_level {
                    continue;
                }
                let mut new_levels = levels;
                new_levels[atom] = EXCITED_LEVEL;
                let (amp, new_photons) = match mode {
                    Some(mode) => {
                        let mut p = photons;
                        p[mode] -= 1;
                        ((photons[mode] as f64).sqrt() * w, p)
                    }
                    None => (w, photons),
                };
                entries.push((self.index_of(new_levels, new_photons) as u32, idx as u32, amp));
            }
        }
        SparseAction { dim: self.dim, entries }
    }
}

/// A real sparse operator `sum amp |row><col|`, stored as triplets.  All
/// patterns in this simulation are strictly off diagonal (every entry
/// changes an atomic level), which the Hamiltonian's `+ h.c.` application
/// relies on.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseAction {
    dim: usize,
    entries: Vec<(u32, u32, f64)>,
}

impl SparseAction {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(u32, u32, f64)] {
        &self.entries
    }

    /// `y = O x`.
    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        for v in y.iter_mut() {
            *v = Complex64::new(0.0, 0.0);
        }
        for &(row, col, amp) in &self.entries {
            y[row as usize] += amp * x[col as usize];
        }
    }

    /// `y = O^dagger x`.
    pub fn apply_adjoint(&self, x: &[Complex64], y: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        for v in y.iter_mut() {
            *v = Complex64::new(0.0, 0.0);
        }
        for &(row, col, amp) in &self.entries {
            y[col as usize] += amp * x[row as usize];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_validation() {
        assert!(matches!(FockConfig::new(0), Err(FullsimError::InvalidCutoff { n_max: 0 })));
        let cfg = FockConfig::new(1).unwrap();
        assert_eq!(cfg.dim(), 648);
        assert_eq!(FockConfig::new(2).unwrap().dim(), 2187);
        assert_eq!(FockConfig::new(3).unwrap().dim(), 5184);
        assert_eq!(cfg.raised().unwrap().n_max(), 2);
    }

    #[test]
    fn dimension_cap_enforced() {
        match FockConfig::with_dim_cap(9, 1000) {
            Err(FullsimError::DimensionCap { dim: 81000, cap: 1000 }) => {}
            other => panic!("unexpected {:?}", other),
        }
        // The default cap admits n_max = 22 (81 * 23^3 = 985527) but not 23.
        assert!(FockConfig::new(22).is_ok());
        assert!(FockConfig::new(23).is_err());
    }

    #[test]
    fn index_round_trip() {
        let space = build_space(&FockConfig::new(2).unwrap());
        for idx in 0..space.dim() {
            let (levels, photons) = space.decode(idx);
            assert_eq!(space.index_of(levels, photons), idx);
        }
        // Modes index fastest, last mode fastest of all.
        let base = space.index_of([0, 0, 0, 0], [0, 0, 0]);
        assert_eq!(base, 0);
        assert_eq!(space.index_of([0, 0, 0, 0], [0, 0, 1]), 1);
        assert_eq!(space.index_of([0, 0, 0, 0], [0, 1, 0]), 3);
        assert_eq!(space.index_of([0, 0, 0, 0], [1, 0, 0]), 9);
        assert_eq!(space.index_of([0, 0, 0, 1], [0, 0, 0]), 27);
    }

    #[test]
    fn logical_states_are_unit_basis_vectors() {
        let space = build_space(&FockConfig::new(1).unwrap());
        for basis in LogicalBasis::ALL {
            let psi = space.logical_state(basis);
            let norm: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
            assert_eq!(norm, 1.0);
            assert_eq!(space.excited_population(&psi), 0.0);
            let idx = psi.iter().position(|a| a.norm() > 0.0).unwrap();
            let (levels, photons) = space.decode(idx);
            assert_eq!(levels, basis.atom_levels());
            assert_eq!(photons, [0, 0, 0]);
        }
    }

    #[test]
    fn ladder_matrix_elements() {
        let space = build_space(&FockConfig::new(3).unwrap());
        let a1 = space.mode_lowering(1);
        let mut x = vec![Complex64::new(0.0, 0.0); space.dim()];
        let mut y = vec![Complex64::new(0.0, 0.0); space.dim()];
        // a |n> = sqrt(n) |n-1>.
        for n in 1..=3usize {
            for v in x.iter_mut() {
                *v = Complex64::new(0.0, 0.0);
            }
            x[space.index_of([0, 1, 1, 0], [0, n, 2])] = Complex64::new(1.0, 0.0);
            a1.apply(&x, &mut y);
            let target = space.index_of([0, 1, 1, 0], [0, n - 1, 2]);
            assert!((y[target].re - (n as f64).sqrt()).abs() < 1e-15);
            assert_eq!(y.iter().filter(|v| v.norm() > 0.0).count(), 1);
        }
        // a^dagger |n_max> = 0 under truncation.
        for v in x.iter_mut() {
            *v = Complex64::new(0.0, 0.0);
        }
        x[space.index_of([0, 1, 1, 0], [0, 3, 0])] = Complex64::new(1.0, 0.0);
        a1.apply_adjoint(&x, &mut y);
        assert!(y.iter().all(|v| v.norm() == 0.0));
        // a^dagger |1> = sqrt(2) |2>.
        for v in x.iter_mut() {
            *v = Complex64::new(0.0, 0.0);
        }
        x[space.index_of([0, 1, 1, 0], [0, 1, 0])] = Complex64::new(1.0, 0.0);
        a1.apply_adjoint(&x, &mut y);
        let target = space.index_of([0, 1, 1, 0], [0, 2, 0]);
        assert!((y[target].re - 2.0_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn transition_action() {
        let space = build_space(&FockConfig::new(1).unwrap());
        let op = space.atom_transition(2, 1); // |e>_k1 <1|
        let mut x = vec![Complex64::new(0.0, 0.0); space.dim()];
        let mut y = vec![Complex64::new(0.0, 0.0); space.dim()];
        x[space.index_of([0, 1, 1, 0], [1, 0, 0])] = Complex64::new(0.0, 1.0);
        op.apply(&x, &mut y);
        let target = space.index_of([0, 1, 2, 0], [1, 0, 0]);
        assert_eq!(y[target], Complex64::new(0.0, 1.0));
        // Adjoint brings it back.
        let mut z = vec![Complex64::new(0.0, 0.0); space.dim()];
        op.apply_adjoint(&y, &mut z);
        assert_eq!(z, x);
        // Wrong source level: no action.
        for v in x.iter_mut() {
            *v = Complex64::new(0.0, 0.0);
        }
        x[space.index_of([0, 1, 0, 0], [1, 0, 0])] = Complex64::new(1.0, 0.0);
        op.apply(&x, &mut y);
        assert!(y.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn raman_pattern_composes_transition_and_lowering() {
        let space = build_space(&FockConfig::new(2).unwrap());
        let pattern = space.raman_pattern(0, [0.5, 0.5, -0.25, 0.0], Some(2));
        let mut x = vec![Complex64::new(0.0, 0.0); space.dim()];
        let mut y = vec![Complex64::new(0.0, 0.0); space.dim()];
        x[space.index_of([0, 0, 0, 0], [0, 0, 2])] = Complex64::new(1.0, 0.0);
        pattern.apply(&x, &mut y);
        let s2 = 2.0_f64.sqrt();
        assert!((y[space.index_of([2, 0, 0, 0], [0, 0, 1])].re - 0.5 * s2).abs() < 1e-15);
        assert!((y[space.index_of([0, 2, 0, 0], [0, 0, 1])].re - 0.5 * s2).abs() < 1e-15);
        assert!((y[space.index_of([0, 0, 2, 0], [0, 0, 1])].re + 0.25 * s2).abs() < 1e-15);
        // Atom k2 has zero weight; its transition is absent.
        assert_eq!(y[space.index_of([0, 0, 0, 2], [0, 0, 1])], Complex64::new(0.0, 0.0));
        assert_eq!(y.iter().filter(|v| v.norm() > 0.0).count(), 3);
    }

    #[test]
    fn excited_mask_matches_decode() {
        let space = build_space(&FockConfig::new(1).unwrap());
        let mask = space.excited_mask();
        for idx in 0..space.dim() {
            let (levels, _) = space.decode(idx);
            assert_eq!(mask[idx], levels.contains(&EXCITED_LEVEL));
        }
    }
}
