//! Brute-force ground truth: dense Hamiltonian matrices and exact
//! exponentiation by Hermitian eigendecomposition.
//!
//! The supported interactions all have the antisymmetric form
//! H/ℏ = i·g·(T − T†), which is Hermitian by construction:
//!
//! * one-photon:   T = a·S₁₀,
//! * Raman:        T = c†·b·S₁₀,
//! * M-photon:     T = a^M·S₁₀,
//! * three-photon: T = a†·b·c (no atoms).
//!
//! Matrix elements are assembled from first-principles boson ladder rules
//! plus either per-atom s₁₀/s₀₁ sums (full product space) or the collective
//! sector rules — deliberately independent of the sparse operator appliers in
//! [`crate::closedform`], since those are exactly what this module exists to
//! check. Dimensions are guarded (default 4096) so full dense
//! eigendecomposition stays cheap and exact; there is no sparse or iterative
//! machinery here.
//!
//! Evolution refuses to run when the initial support could reach a mode
//! occupation beyond its cutoff, determined by walking the conserved
//! excitation sector, because a silently truncated ladder would fake
//! unitarity violations.

use crate::dicke::{self, DickeError};
use crate::hilbert::{
    AtomLabel, AtomRep, BasisLabel, HilbertError, ModeSpec, SpaceConfig, StateVector,
};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::collections::{HashMap, HashSet, VecDeque};
use std::ops::Range;
use thiserror::Error;

/// Default dimension guard for dense matrices.
pub const DEFAULT_DIM_LIMIT: usize = 4096;

/// Guard for embedding symmetric-sector states into the 2^N product space.
pub const MAX_EMBED_ATOMS: u32 = 12;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("invalid Hamiltonian specification: {0}")]
    InvalidSpec(String),
    #[error("dimension {dim} exceeds the dense guard {limit}")]
    DimensionOverGuard { dim: usize, limit: usize },
    #[error("state is not expressed in the operator's basis")]
    BasisMismatch,
    #[error("initial support can reach occupation beyond a cutoff (via {0}); enlarge the cutoffs")]
    LeakageRisk(String),
    #[error("eigendecomposition failed to reproduce the matrix (defect {0:.3e})")]
    EigenSelfCheckFailed(f64),
    #[error("embedding guard: {0} atoms exceeds the maximum of {max}", max = MAX_EMBED_ATOMS)]
    EmbedTooLarge(u32),
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error(transparent)]
    Dicke(#[from] DickeError),
}

/// Which interaction a Hamiltonian describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HamiltonianKind {
    OnePhoton,
    Raman,
    MPhoton(u32),
    ThreePhotonParametric,
}

/// Full description of one interaction Hamiltonian.
///
/// Mode order is positional: one-photon and M-photon use a single mode `a`;
/// Raman uses (c, b) with b the absorbed mode; the three-photon parametric
/// process uses (a, b, c) with a raised when b and c are lowered.
/// `active_atoms` optionally restricts the collective dipole sums to a
/// contiguous block of atoms (full product representation only), which is
/// how consecutive interactions with separate ensembles are modelled.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    pub kind: HamiltonianKind,
    pub coupling: f64,
    pub modes: Vec<ModeSpec>,
    pub n_atoms: u32,
    pub representation: AtomRep,
    pub active_atoms: Option<Range<u32>>,
}

impl HamiltonianSpec {
    pub fn one_photon(coupling: f64, cutoff: u32, n_atoms: u32) -> Self {
        Self {
            kind: HamiltonianKind::OnePhoton,
            coupling,
            modes: vec![ModeSpec::new("a", cutoff)],
            n_atoms,
            representation: AtomRep::SymmetricSector,
            active_atoms: None,
        }
    }

    pub fn raman(coupling: f64, cutoffs: [u32; 2], n_atoms: u32) -> Self {
        Self {
            kind: HamiltonianKind::Raman,
            coupling,
            modes: vec![ModeSpec::new("c", cutoffs[0]), ModeSpec::new("b", cutoffs[1])],
            n_atoms,
            representation: AtomRep::SymmetricSector,
            active_atoms: None,
        }
    }

    pub fn m_photon(m: u32, coupling: f64, cutoff: u32, n_atoms: u32) -> Self {
        Self {
            kind: HamiltonianKind::MPhoton(m),
            coupling,
            modes: vec![ModeSpec::new("a", cutoff)],
            n_atoms,
            representation: AtomRep::SymmetricSector,
            active_atoms: None,
        }
    }

    pub fn three_photon(coupling: f64, cutoffs: [u32; 3]) -> Self {
        Self {
            kind: HamiltonianKind::ThreePhotonParametric,
            coupling,
            modes: vec![
                ModeSpec::new("a", cutoffs[0]),
                ModeSpec::new("b", cutoffs[1]),
                ModeSpec::new("c", cutoffs[2]),
            ],
            n_atoms: 0,
            representation: AtomRep::SymmetricSector,
            active_atoms: None,
        }
    }

    pub fn with_representation(mut self, rep: AtomRep) -> Self {
        self.representation = rep;
        self
    }

    pub fn with_active_atoms(mut self, range: Range<u32>) -> Self {
        self.active_atoms = Some(range);
        self
    }

    /// The space this Hamiltonian acts on.
    pub fn space(&self) -> Result<SpaceConfig, OracleError> {
        self.validate()?;
        Ok(SpaceConfig::new(
            self.modes.clone(),
            self.n_atoms,
            self.representation,
        )?)
    }

    fn validate(&self) -> Result<(), OracleError> {
        let expected_modes = match self.kind {
            HamiltonianKind::OnePhoton => 1,
            HamiltonianKind::Raman => 2,
            HamiltonianKind::MPhoton(m) => {
                if m == 0 {
                    return Err(OracleError::InvalidSpec(
                        "M-photon absorption needs M >= 1".into(),
                    ));
                }
                1
            }
            HamiltonianKind::ThreePhotonParametric => {
                if self.n_atoms != 0 {
                    return Err(OracleError::InvalidSpec(
                        "three-photon parametric interaction has no atoms".into(),
                    ));
                }
                3
            }
        };
        if self.modes.len() != expected_modes {
            return Err(OracleError::InvalidSpec(format!(
                "{:?} needs {} mode(s), found {}",
                self.kind,
                expected_modes,
                self.modes.len()
            )));
        }
        if !self.coupling.is_finite() {
            return Err(OracleError::InvalidSpec("coupling must be finite".into()));
        }
        if let Some(range) = &self.active_atoms {
            if self.representation != AtomRep::FullProduct {
                return Err(OracleError::InvalidSpec(
                    "active_atoms requires the full product representation".into(),
                ));
            }
            if range.end > self.n_atoms || range.start >= range.end {
                return Err(OracleError::InvalidSpec(format!(
                    "active atom range {range:?} invalid for {} atoms",
                    self.n_atoms
                )));
            }
        }
        Ok(())
    }

    fn atom_range(&self) -> Range<u32> {
        self.active_atoms.clone().unwrap_or(0..self.n_atoms)
    }

    /// Applies the positive term T (or its adjoint) to one basis label.
    /// Returns the reachable (label, factor) pairs inside the cutoffs plus a
    /// flag marking that the term has nonzero weight beyond a mode cutoff.
    /// A cutoff hit does not count as a clip when another factor of the term
    /// annihilates the state anyway.
    fn term_action(&self, label: &BasisLabel, dagger: bool) -> (Vec<(BasisLabel, f64)>, bool) {
        let cutoffs: Vec<u32> = self.modes.iter().map(|m| m.cutoff).collect();

        // mode moves: (index, delta) with delta applied as written for T and
        // negated for T†; M-photon shifts one mode by M in a single step
        let moves: Vec<(usize, i64)> = match self.kind {
            HamiltonianKind::OnePhoton => vec![(0, -1)],
            HamiltonianKind::Raman => vec![(0, 1), (1, -1)],
            HamiltonianKind::MPhoton(m) => vec![(0, -(m as i64))],
            HamiltonianKind::ThreePhotonParametric => vec![(0, 1), (1, -1), (2, -1)],
        };

        let mut fock = label.fock.clone();
        let mut factor = 1.0f64;
        let mut clipped = false;
        for &(idx, delta) in &moves {
            let delta = if dagger { -delta } else { delta };
            let n = fock[idx] as i64;
            let target = n + delta;
            if target < 0 {
                // a^|delta| hits the vacuum: the whole term vanishes
                return (Vec::new(), false);
            }
            // √(n(n−1)···) for lowering, √((n+1)(n+2)···) for raising
            for k in 0..delta.abs() {
                factor *= if delta < 0 { (n - k) as f64 } else { (n + k + 1) as f64 };
            }
            if target > cutoffs[idx] as i64 {
                clipped = true;
            }
            fock[idx] = target.min(cutoffs[idx] as i64) as u32;
        }
        let factor = factor.sqrt();

        let with_atoms = !matches!(self.kind, HamiltonianKind::ThreePhotonParametric);
        let branches: Vec<(AtomLabel, f64)> = if with_atoms {
            self.atom_ladder(label.atoms, !dagger)
        } else {
            vec![(label.atoms, 1.0)]
        };
        if branches.is_empty() || factor == 0.0 {
            return (Vec::new(), false);
        }
        if clipped {
            return (Vec::new(), true);
        }
        let out = branches
            .into_iter()
            .map(|(atoms, amp)| (BasisLabel::new(fock.clone(), atoms), factor * amp))
            .collect();
        (out, false)
    }

    fn atom_ladder(&self, atoms: AtomLabel, raise: bool) -> Vec<(AtomLabel, f64)> {
        let mut out = Vec::new();
        match atoms {
            AtomLabel::Sector(m) => {
                let n = self.n_atoms;
                if raise {
                    if m < n {
                        out.push((AtomLabel::Sector(m + 1), (((m + 1) * (n - m)) as f64).sqrt()));
                    }
                } else if m > 0 {
                    out.push((AtomLabel::Sector(m - 1), ((m * (n - m + 1)) as f64).sqrt()));
                }
            }
            AtomLabel::Bits(bits) => {
                for k in self.atom_range() {
                    let excited = bits >> k & 1 == 1;
                    if raise != excited {
                        out.push((AtomLabel::Bits(bits ^ (1 << k)), 1.0));
                    }
                }
            }
        }
        out
    }
}

/// A Hermitian matrix over an explicitly enumerated basis.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    spec: HamiltonianSpec,
    config: SpaceConfig,
    basis: Vec<BasisLabel>,
    index: HashMap<BasisLabel, usize>,
    matrix: DMatrix<Complex64>,
}

impl DenseOperator {
    pub fn spec(&self) -> &HamiltonianSpec {
        &self.spec
    }

    pub fn config(&self) -> &SpaceConfig {
        &self.config
    }

    pub fn basis(&self) -> &[BasisLabel] {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// max |H − H†| over all elements.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Dense vector of `x` in this operator's basis order.
    pub fn to_dense(&self, x: &StateVector) -> Result<DVector<Complex64>, OracleError> {
        if x.config() != &self.config {
            return Err(OracleError::BasisMismatch);
        }
        let mut v = DVector::from_element(self.dim(), Complex64::default());
        for (label, amp) in x.iter() {
            v[self.index[label]] = *amp;
        }
        Ok(v)
    }

    /// Sparse state from a dense vector in this operator's basis order.
    pub fn from_dense(&self, v: &DVector<Complex64>) -> StateVector {
        let entries = v
            .iter()
            .enumerate()
            .map(|(i, amp)| (self.basis[i].clone(), *amp));
        StateVector::new(self.config.clone(), entries).expect("basis labels are valid by construction")
    }

    /// Eigendecomposes once for repeated evolutions. The decomposition is
    /// verified by reconstructing the matrix before it is trusted.
    pub fn eigen(&self) -> Result<EigenEvolver, OracleError> {
        let eig = self.matrix.clone().symmetric_eigen();
        let diag = DMatrix::from_diagonal(&eig.eigenvalues.map(|x| Complex64::new(x, 0.0)));
        let recon = &eig.eigenvectors * diag * eig.eigenvectors.adjoint();
        let mut defect = 0.0f64;
        let mut scale = 1.0f64;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                defect = defect.max((recon[(i, j)] - self.matrix[(i, j)]).norm());
                scale = scale.max(self.matrix[(i, j)].norm());
            }
        }
        if defect > 1e-11 * scale.max(1.0) {
            return Err(OracleError::EigenSelfCheckFailed(defect));
        }
        Ok(EigenEvolver {
            op: self.clone(),
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
        })
    }
}

/// Builds the Hamiltonian matrix H/ℏ = i·g·(T − T†) in the declared space,
/// under the default dimension guard.
pub fn build_hamiltonian(spec: &HamiltonianSpec) -> Result<DenseOperator, OracleError> {
    build_hamiltonian_with_limit(spec, DEFAULT_DIM_LIMIT)
}

/// Same as [`build_hamiltonian`] with an explicit dimension guard.
pub fn build_hamiltonian_with_limit(
    spec: &HamiltonianSpec,
    limit: usize,
) -> Result<DenseOperator, OracleError> {
    let config = spec.space()?;
    let dim = config.dim();
    if dim > limit {
        return Err(OracleError::DimensionOverGuard { dim, limit });
    }
    let basis = config.enumerate_basis();
    let index: HashMap<BasisLabel, usize> = basis
        .iter()
        .enumerate()
        .map(|(i, l)| (l.clone(), i))
        .collect();
    let mut matrix = DMatrix::from_element(dim, dim, Complex64::default());
    let ig = Complex64::new(0.0, spec.coupling);
    for (j, label) in basis.iter().enumerate() {
        let (targets, _) = spec.term_action(label, false);
        for (target, factor) in targets {
            matrix[(index[&target], j)] += ig * factor;
        }
        let (targets, _) = spec.term_action(label, true);
        for (target, factor) in targets {
            matrix[(index[&target], j)] -= ig * factor;
        }
    }
    Ok(DenseOperator {
        spec: spec.clone(),
        config,
        basis,
        index,
        matrix,
    })
}

/// Cached eigendecomposition of a [`DenseOperator`]; applies the evolution
/// phases e^{−iλt} in the eigenbasis.
pub struct EigenEvolver {
    op: DenseOperator,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<Complex64>,
}

impl EigenEvolver {
    pub fn operator(&self) -> &DenseOperator {
        &self.op
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn evolve(&self, x: &StateVector, t: f64) -> Result<StateVector, OracleError> {
        check_leakage_risk(&self.op.spec, x)?;
        let v = self.op.to_dense(x)?;
        let mut coords = self.eigenvectors.adjoint() * v;
        for (k, c) in coords.iter_mut().enumerate() {
            let phase = -self.eigenvalues[k] * t;
            *c *= Complex64::new(phase.cos(), phase.sin());
        }
        let out = &self.eigenvectors * coords;
        Ok(self.op.from_dense(&out))
    }
}

/// One-shot exact evolution: eigendecompose, apply phases, map back.
pub fn evolve_exact(h: &DenseOperator, x: &StateVector, t: f64) -> Result<StateVector, OracleError> {
    h.eigen()?.evolve(x, t)
}

/// Walks the conserved excitation sector reachable from the support of `x`
/// and errors if any step would push a mode occupation past its cutoff.
pub fn check_leakage_risk(spec: &HamiltonianSpec, x: &StateVector) -> Result<(), OracleError> {
    let mut seen: HashSet<BasisLabel> = HashSet::new();
    let mut frontier: VecDeque<BasisLabel> = VecDeque::new();
    for (label, _) in x.iter() {
        if seen.insert(label.clone()) {
            frontier.push_back(label.clone());
        }
    }
    while let Some(label) = frontier.pop_front() {
        for dagger in [false, true] {
            let (targets, clipped) = spec.term_action(&label, dagger);
            if clipped {
                return Err(OracleError::LeakageRisk(format!("{label:?}")));
            }
            for (target, _) in targets {
                if seen.insert(target.clone()) {
                    frontier.push_back(target);
                }
            }
        }
    }
    Ok(())
}

/// Max amplitude deviation between two states on the same configuration,
/// after aligning global phase on the largest-magnitude amplitude of `x`
/// (ties broken by basis order).
pub fn compare_states(x: &StateVector, y: &StateVector) -> Result<f64, OracleError> {
    if x.config() != y.config() {
        return Err(OracleError::BasisMismatch);
    }
    let mut reference: Option<(&BasisLabel, Complex64)> = None;
    for (label, amp) in x.iter() {
        if reference.map_or(true, |(_, best)| amp.norm_sqr() > best.norm_sqr()) {
            reference = Some((label, *amp));
        }
    }
    let phase = match reference {
        Some((label, ax)) => {
            let ay = y.amplitude(label);
            if ay.norm() == 0.0 || ax.norm() == 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                (ax / ax.norm()) * (ay / ay.norm()).conj()
            }
        }
        None => Complex64::new(1.0, 0.0),
    };
    let mut worst = 0.0f64;
    for (label, ax) in x.iter() {
        worst = worst.max((ax - phase * y.amplitude(label)).norm());
    }
    for (label, ay) in y.iter() {
        worst = worst.max((x.amplitude(label) - phase * ay).norm());
    }
    Ok(worst)
}

/// Linear extension of |m⟩̂ ↦ its 2^N product expansion on the atomic factor.
pub fn embed_symmetric(x: &StateVector) -> Result<StateVector, OracleError> {
    if x.config().atom_rep() != AtomRep::SymmetricSector {
        return Err(OracleError::BasisMismatch);
    }
    let n = x.config().n_atoms();
    if n > MAX_EMBED_ATOMS {
        return Err(OracleError::EmbedTooLarge(n));
    }
    let config = SpaceConfig::new(x.config().modes().to_vec(), n, AtomRep::FullProduct)?;
    let mut out = StateVector::zero(config);
    for (label, amp) in x.iter() {
        let AtomLabel::Sector(m) = label.atoms else {
            unreachable!()
        };
        let weight = 1.0 / (dicke::dicke_norm_sq(n, m)? as f64).sqrt();
        for bits in 0u64..1 << n {
            if bits.count_ones() == m {
                out.insert_raw(BasisLabel::bits(label.fock.clone(), bits), amp * weight);
            }
        }
    }
    out.prune();
    Ok(out)
}

/// Expectation values of the interaction's conserved excitation operators on
/// `x`: one-photon conserves n_a + m, Raman conserves n_b + m and n_b + n_c,
/// M-photon conserves n_a + M·m, and the three-photon process conserves
/// n_a + n_b and n_a + n_c.
pub fn conserved_expectations(spec: &HamiltonianSpec, x: &StateVector) -> Vec<f64> {
    let value = |label: &BasisLabel| -> Vec<f64> {
        let m = label.atoms.excitations() as f64;
        match spec.kind {
            HamiltonianKind::OnePhoton => vec![label.fock[0] as f64 + m],
            HamiltonianKind::Raman => vec![
                label.fock[1] as f64 + m,
                label.fock[1] as f64 + label.fock[0] as f64,
            ],
            HamiltonianKind::MPhoton(mp) => vec![label.fock[0] as f64 + mp as f64 * m],
            HamiltonianKind::ThreePhotonParametric => vec![
                label.fock[0] as f64 + label.fock[1] as f64,
                label.fock[0] as f64 + label.fock[2] as f64,
            ],
        }
    };
    let n_ops = value(&BasisLabel::sector(vec![0; spec.modes.len()], 0)).len();
    let mut acc = vec![0.0; n_ops];
    for (label, amp) in x.iter() {
        let w = amp.norm_sqr();
        for (slot, v) in acc.iter_mut().zip(value(label)) {
            *slot += w * v;
        }
    }
    acc
}
