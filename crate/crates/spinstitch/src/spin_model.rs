//! Chain geometry, operator assembly, and phase-fixed ground states.
//!
//! The model is an open chain of N spins with X-X bonds of strength J,
//! a uniform transverse field B on every site, and one tunable X-X link
//! closing the ring between sites 1 and N:
//!
//! ```text
//! H(g) = J sum_{n=1..N-1} X_n X_{n+1}  +  B sum_{n=1..N} Z_n  +  g J X_1 X_N
//! ```
//!
//! Basis conventions live here and nowhere else. Site 1 is the leftmost
//! tensor factor, so it owns the most significant bit of the basis index.
//! Bit value 0 means spin up (Z = +1). A basis index is therefore the
//! binary word of down spins read from site 1 to site N.
//!
//! Everything is dense: at the sizes this crate targets (N <= 14) a full
//! Hermitian eigensolve costs milliseconds and removes a whole class of
//! iterative-solver failure modes.

use alloc::{vec, vec::Vec};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense storage grows as 4^N; 14 spins (dimension 16384) is the cap.
pub const MAX_SPINS: usize = 14;

/// How far the lowest two levels must sit apart, relative to the spectral
/// radius, before we treat the ground level as non-degenerate.
pub const DEGENERACY_TOLERANCE: f64 = 1e-9;

/// Static description of the chain. Construction validates once; every
/// function taking a `ChainConfig` can then assume a sane geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainConfig {
    pub n_spins: usize,
    /// Bond energy J shared by every X-X term, including the tunable link.
    pub coupling: f64,
    /// Transverse field B multiplying every Z term.
    pub field: f64,
    /// Relative coupling shift used to resolve an accidentally degenerate
    /// ground level; see [`ground_state`].
    pub degeneracy_offset: f64,
}

impl ChainConfig {
    /// Chain with unit bond energy and the default degeneracy offset 1e-8.
    pub fn new(n_spins: usize, field: f64) -> Result<Self> {
        Self::custom(n_spins, 1.0, field, 1e-8)
    }

    pub fn custom(
        n_spins: usize,
        coupling: f64,
        field: f64,
        degeneracy_offset: f64,
    ) -> Result<Self> {
        if n_spins < 3 {
            // With two spins the tunable 1-N link and the single
            // nearest-neighbour bond are the same pair of sites.
            return Err(Error::ChainTooSmall { n_spins });
        }
        if n_spins > MAX_SPINS {
            return Err(Error::ChainTooLarge { n_spins, max: MAX_SPINS });
        }
        if !(degeneracy_offset > 0.0 && degeneracy_offset <= 1e-4) {
            return Err(Error::OffsetOutOfRange { offset: degeneracy_offset });
        }
        if !coupling.is_finite() || !field.is_finite() {
            return Err(Error::NonFiniteParameter);
        }
        Ok(ChainConfig { n_spins, coupling, field, degeneracy_offset })
    }

    /// Hilbert-space dimension 2^N.
    pub fn dim(&self) -> usize {
        1 << self.n_spins
    }

    /// Bit owned by `site` (1-based, site 1 = most significant).
    pub(crate) fn site_bit(&self, site: usize) -> usize {
        1 << (self.n_spins - site)
    }

    /// XOR masks for the N-1 nearest-neighbour bonds.
    pub(crate) fn bond_masks(&self) -> Vec<usize> {
        (1..self.n_spins)
            .map(|n| self.site_bit(n) | self.site_bit(n + 1))
            .collect()
    }

    /// XOR mask for the tunable 1-N link.
    pub(crate) fn link_mask(&self) -> usize {
        self.site_bit(1) | self.site_bit(self.n_spins)
    }

    /// Diagonal of B * sum_n Z_n in the computational basis.
    pub(crate) fn z_diagonal(&self) -> Vec<f64> {
        let dim = self.dim();
        let mut diag = vec![0.0f64; dim];
        for (k, d) in diag.iter_mut().enumerate() {
            let mut z = 0.0;
            for site in 1..=self.n_spins {
                let bit = (k >> (self.n_spins - site)) & 1;
                z += 1.0 - 2.0 * bit as f64;
            }
            *d = self.field * z;
        }
        diag
    }

    /// Largest possible operator norm of H(g) for |g| <= `coupling_bound`:
    /// every Pauli string has unit norm, so the triangle inequality gives
    /// (N-1)|J| + N|B| + bound*|J|.
    pub fn hamiltonian_bound(&self, coupling_bound: f64) -> f64 {
        (self.n_spins - 1) as f64 * self.coupling.abs()
            + self.n_spins as f64 * self.field.abs()
            + coupling_bound * self.coupling.abs()
    }
}

/// Single-site Pauli axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Dense complex matrix wrapper for Hamiltonians and Pauli strings.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub entries: DMatrix<Complex64>,
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Largest entry of |H - H^dagger|; zero for an exactly Hermitian matrix.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.entries.nrows() {
            for j in i..self.entries.ncols() {
                let d = self.entries[(i, j)] - self.entries[(j, i)].conj();
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    /// Largest imaginary part over all entries.
    pub fn max_imag(&self) -> f64 {
        self.entries.iter().fold(0.0f64, |w, z| w.max(z.im.abs()))
    }

    pub fn apply(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        &self.entries * v
    }
}

/// Tensor product of single-site Pauli operators on the listed sites with
/// identity elsewhere. Every Pauli maps a basis state to exactly one basis
/// state, so the matrix is built column by column from bit arithmetic.
pub fn pauli_string(config: &ChainConfig, factors: &[(usize, Axis)]) -> Result<OperatorMatrix> {
    for (idx, &(site, _)) in factors.iter().enumerate() {
        if site < 1 || site > config.n_spins {
            return Err(Error::SiteOutOfRange { site, n_spins: config.n_spins });
        }
        if factors[..idx].iter().any(|&(s, _)| s == site) {
            return Err(Error::DuplicateSite { site });
        }
    }
    let dim = config.dim();
    let mut entries = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut row = col;
        let mut amp = Complex64::new(1.0, 0.0);
        // Factors act on distinct sites and therefore commute; each one
        // reads the untouched bit of the source state `col`.
        for &(site, axis) in factors {
            let bit = config.site_bit(site);
            let down = col & bit != 0;
            match axis {
                Axis::X => row ^= bit,
                Axis::Y => {
                    // Y|up> = i|down>, Y|down> = -i|up>
                    row ^= bit;
                    amp *= Complex64::new(0.0, if down { -1.0 } else { 1.0 });
                }
                Axis::Z => {
                    if down {
                        amp = -amp;
                    }
                }
            }
        }
        entries[(row, col)] += amp;
    }
    Ok(OperatorMatrix { entries })
}

/// H(g) = H0 + g V with H0 the bonds-plus-field part and V = J X_1 X_N.
pub fn build_hamiltonian(config: &ChainConfig, g: f64) -> OperatorMatrix {
    let dim = config.dim();
    let mut entries = DMatrix::zeros(dim, dim);
    for (k, z) in config.z_diagonal().into_iter().enumerate() {
        entries[(k, k)] = Complex64::new(z, 0.0);
    }
    let j = Complex64::new(config.coupling, 0.0);
    for mask in config.bond_masks() {
        for k in 0..dim {
            entries[(k ^ mask, k)] += j;
        }
    }
    let link = config.link_mask();
    let gj = j * g;
    for k in 0..dim {
        entries[(k ^ link, k)] += gj;
    }
    OperatorMatrix { entries }
}

/// Normalized state with a fixed global phase: the largest-magnitude
/// amplitude is real and non-negative, ties broken by lowest basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub amplitudes: DVector<Complex64>,
}

impl StateVector {
    /// Wraps amplitudes after checking the unit norm; does not touch the phase.
    pub fn from_amplitudes(amplitudes: DVector<Complex64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::StateNotNormalized { norm });
        }
        Ok(StateVector { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// <self|other>.
    pub fn overlap(&self, other: &StateVector) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn max_imag(&self) -> f64 {
        self.amplitudes.iter().fold(0.0f64, |w, z| w.max(z.im.abs()))
    }

    /// Rotates the global phase so the largest-magnitude amplitude becomes
    /// real and non-negative. First occurrence wins on exact magnitude ties.
    pub(crate) fn fix_phase(&mut self) {
        let mut best = 0usize;
        let mut best_mag = 0.0f64;
        for (k, z) in self.amplitudes.iter().enumerate() {
            let m = z.norm_sqr();
            if m > best_mag {
                best_mag = m;
                best = k;
            }
        }
        let pivot = self.amplitudes[best];
        let mag = pivot.norm();
        if mag > 0.0 {
            let phase = pivot / mag;
            // Multiplying by conj(phase) makes the pivot real positive.
            let rot = phase.conj();
            for z in self.amplitudes.iter_mut() {
                *z *= rot;
            }
        }
    }
}

/// Full eigensystem, ascending.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<StateVector>,
}

impl Spectrum {
    /// Spectral radius max|eigenvalue|, the scale for degeneracy decisions.
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0f64, |w, e| w.max(e.abs()))
    }

    pub fn ground_gap(&self) -> f64 {
        self.eigenvalues[1] - self.eigenvalues[0]
    }
}

/// Dense Hermitian eigensolve with eigenvalues sorted ascending and the
/// per-vector phase convention applied.
pub fn diagonalize(h: &OperatorMatrix) -> Result<Spectrum> {
    let defect = h.hermiticity_defect();
    if defect > 1e-10 {
        return Err(Error::NonHermitian { max_asym: defect });
    }
    let eig = nalgebra::SymmetricEigen::new(h.entries.clone());
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = Vec::with_capacity(n);
    for &k in &order {
        eigenvalues.push(eig.eigenvalues[k]);
        let mut v = StateVector { amplitudes: eig.eigenvectors.column(k).into_owned() };
        v.fix_phase();
        eigenvectors.push(v);
    }
    Ok(Spectrum { eigenvalues, eigenvectors })
}

fn resolved_ground(config: &ChainConfig, g: f64) -> Result<(StateVector, f64)> {
    let spectrum = diagonalize(&build_hamiltonian(config, g))?;
    let tolerance = DEGENERACY_TOLERANCE * spectrum.spectral_radius();
    if spectrum.ground_gap() >= tolerance {
        return Ok((spectrum.eigenvectors[0].clone(), spectrum.eigenvalues[0]));
    }
    // Degenerate ground level: nudge the link coupling toward the middle of
    // [0,1] so the endpoint states are approached from inside the interval,
    // and insist the nudge actually lifts the degeneracy.
    let nudged = if g < 0.5 { g + config.degeneracy_offset } else { g - config.degeneracy_offset };
    let spectrum = diagonalize(&build_hamiltonian(config, nudged))?;
    let gap = spectrum.ground_gap();
    if gap < tolerance {
        return Err(Error::DegeneracyPersists { gap, tolerance });
    }
    Ok((spectrum.eigenvectors[0].clone(), spectrum.eigenvalues[0]))
}

/// Ground state of H(g) with the global-phase convention applied. When the
/// ground level is degenerate within `DEGENERACY_TOLERANCE` of the spectral
/// radius, the state is taken at the offset coupling g +- degeneracy_offset
/// instead; if that still leaves a degenerate level, the call reports it
/// rather than guessing a direction inside the ground manifold.
///
/// For g = 1 exactly, the sign is additionally flipped when needed so the
/// overlap with the g = 0 ground state comes out non-negative. That keeps
/// the endpoint overlap f0 and every matrix element derived from it on one
/// consistent sign convention.
pub fn ground_state(config: &ChainConfig, g: f64) -> Result<StateVector> {
    let (mut state, _) = resolved_ground(config, g)?;
    if g == 1.0 {
        let (initial, _) = resolved_ground(config, 0.0)?;
        if state.overlap(&initial).re < 0.0 {
            for z in state.amplitudes.iter_mut() {
                *z = -*z;
            }
        }
    }
    Ok(state)
}

/// The two endpoint ground states of a control problem, sign-locked so
/// <target|initial> >= 0.
#[derive(Debug, Clone)]
pub struct GroundPair {
    /// Ground state of H(0), the state the evolution starts from.
    pub initial: StateVector,
    /// Ground state of H(1), the state the evolution aims for.
    pub target: StateVector,
    pub initial_energy: f64,
    pub target_energy: f64,
}

impl GroundPair {
    /// f0 = <target|initial>, real for the real Hamiltonians built here.
    pub fn endpoint_overlap(&self) -> f64 {
        self.target.overlap(&self.initial).re
    }
}

pub fn ground_pair(config: &ChainConfig) -> Result<GroundPair> {
    let (initial, initial_energy) = resolved_ground(config, 0.0)?;
    let (mut target, target_energy) = resolved_ground(config, 1.0)?;
    if target.overlap(&initial).re < 0.0 {
        for z in target.amplitudes.iter_mut() {
            *z = -*z;
        }
    }
    Ok(GroundPair { initial, target, initial_energy, target_energy })
}

/// Gap between the two lowest levels on a uniform g-grid over [0, 1].
/// The grid has `points` entries with g running from exactly 0 to exactly 1.
pub fn gap_sweep(config: &ChainConfig, points: usize) -> Result<Vec<(f64, f64)>> {
    if points < 2 {
        return Err(Error::GridTooSmall { points });
    }
    let mut out = Vec::with_capacity(points);
    for i in 0..points {
        let g = i as f64 / (points - 1) as f64;
        let spectrum = diagonalize(&build_hamiltonian(config, g))?;
        out.push((g, spectrum.ground_gap()));
    }
    Ok(out)
}
