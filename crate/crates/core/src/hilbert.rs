//! Sparse pure states over truncated boson modes and a collective atomic index.
//!
//! A [`SpaceConfig`] declares an ordered list of field modes (each a truncated
//! Fock ladder) together with an ensemble of `N` two-level atoms. The atomic
//! factor is carried either as a symmetric-sector excitation count
//! `m ∈ 0..=N` (dimension N+1) or as a full product-space bitstring
//! (dimension 2^N). Amplitudes are stored sparsely, keyed by [`BasisLabel`];
//! the few-excitation regime this library targets never populates more than a
//! handful of basis vectors.
//!
//! All values are immutable after construction and every operation is a pure
//! function returning a new state, so states can be shared freely across
//! threads.

use num_complex::Complex64;
use std::collections::BTreeMap;
use thiserror::Error;

/// Amplitudes with squared magnitude below this are dropped after arithmetic.
pub const PRUNE_EPS: f64 = 1e-14;

/// A state counts as normalized when |Σ|amp|² − 1| is below this.
pub const NORM_TOL: f64 = 1e-12;

/// Largest atom count accepted by any configuration (exact binomials and
/// u64 bitstrings both hold up to here).
pub const MAX_ATOMS: u32 = 60;

#[derive(Debug, Error, PartialEq)]
pub enum HilbertError {
    #[error("duplicate mode label `{0}` in configuration")]
    DuplicateMode(String),
    #[error("unknown mode `{0}`")]
    UnknownMode(String),
    #[error("atom count {0} exceeds the supported maximum of {max}", max = MAX_ATOMS)]
    TooManyAtoms(u32),
    #[error("label has {found} mode occupations, configuration has {expected} modes")]
    FockLengthMismatch { expected: usize, found: usize },
    #[error("occupation {occupation} exceeds cutoff {cutoff} on mode `{mode}`")]
    OccupationOutOfRange {
        mode: String,
        occupation: u32,
        cutoff: u32,
    },
    #[error("atomic excitation index m={m} exceeds atom count N={n}")]
    ExcitationOutOfRange { m: u32, n: u32 },
    #[error("atomic label kind does not match the configured representation")]
    RepresentationMismatch,
    #[error("bitstring uses atoms beyond the configured count {0}")]
    BitsOutOfRange(u32),
    #[error("duplicate basis label in state construction")]
    DuplicateLabel,
    #[error("states live on different configurations")]
    ConfigMismatch,
    #[error("cannot normalize the zero vector")]
    ZeroVector,
    #[error("operation requires a normalized state (Σ|amp|² = 1 within 1e-12)")]
    UnnormalizedInput,
}

/// One truncated boson mode: occupations run over `0..=cutoff`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModeSpec {
    pub label: String,
    pub cutoff: u32,
}

impl ModeSpec {
    pub fn new(label: impl Into<String>, cutoff: u32) -> Self {
        Self {
            label: label.into(),
            cutoff,
        }
    }
}

/// How the atomic factor is represented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AtomRep {
    /// Permutation-symmetric sector, basis `|m⟩̂` with m ∈ 0..=N (normalized).
    SymmetricSector,
    /// Full 2^N product space, basis labelled by bitstrings (bit k = atom k).
    FullProduct,
}

/// Declares the tensor-product space a state lives on.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpaceConfig {
    modes: Vec<ModeSpec>,
    n_atoms: u32,
    atom_rep: AtomRep,
}

impl SpaceConfig {
    pub fn new(modes: Vec<ModeSpec>, n_atoms: u32, atom_rep: AtomRep) -> Result<Self, HilbertError> {
        if n_atoms > MAX_ATOMS {
            return Err(HilbertError::TooManyAtoms(n_atoms));
        }
        for (i, m) in modes.iter().enumerate() {
            if modes[..i].iter().any(|other| other.label == m.label) {
                return Err(HilbertError::DuplicateMode(m.label.clone()));
            }
        }
        Ok(Self {
            modes,
            n_atoms,
            atom_rep,
        })
    }

    pub fn modes(&self) -> &[ModeSpec] {
        &self.modes
    }

    pub fn n_atoms(&self) -> u32 {
        self.n_atoms
    }

    pub fn atom_rep(&self) -> AtomRep {
        self.atom_rep
    }

    pub fn mode_index(&self, label: &str) -> Result<usize, HilbertError> {
        self.modes
            .iter()
            .position(|m| m.label == label)
            .ok_or_else(|| HilbertError::UnknownMode(label.to_string()))
    }

    /// Number of atomic basis states: N+1 in the symmetric sector, 2^N in the
    /// full product space.
    pub fn atom_dim(&self) -> usize {
        match self.atom_rep {
            AtomRep::SymmetricSector => self.n_atoms as usize + 1,
            AtomRep::FullProduct => 1usize << self.n_atoms,
        }
    }

    /// Total dimension of the enumerated space.
    pub fn dim(&self) -> usize {
        self.modes
            .iter()
            .map(|m| m.cutoff as usize + 1)
            .product::<usize>()
            * self.atom_dim()
    }

    /// Checks that a label conforms to this configuration.
    pub fn validate_label(&self, label: &BasisLabel) -> Result<(), HilbertError> {
        if label.fock.len() != self.modes.len() {
            return Err(HilbertError::FockLengthMismatch {
                expected: self.modes.len(),
                found: label.fock.len(),
            });
        }
        for (occ, mode) in label.fock.iter().zip(&self.modes) {
            if *occ > mode.cutoff {
                return Err(HilbertError::OccupationOutOfRange {
                    mode: mode.label.clone(),
                    occupation: *occ,
                    cutoff: mode.cutoff,
                });
            }
        }
        match (self.atom_rep, &label.atoms) {
            (AtomRep::SymmetricSector, AtomLabel::Sector(m)) => {
                if *m > self.n_atoms {
                    return Err(HilbertError::ExcitationOutOfRange {
                        m: *m,
                        n: self.n_atoms,
                    });
                }
            }
            (AtomRep::FullProduct, AtomLabel::Bits(b)) => {
                if self.n_atoms < 64 && *b >> self.n_atoms != 0 {
                    return Err(HilbertError::BitsOutOfRange(self.n_atoms));
                }
            }
            _ => return Err(HilbertError::RepresentationMismatch),
        }
        Ok(())
    }

    /// Enumerates the whole basis in ascending `BasisLabel` order.
    pub fn enumerate_basis(&self) -> Vec<BasisLabel> {
        let mut fock_axes: Vec<Vec<u32>> = Vec::new();
        for m in &self.modes {
            fock_axes.push((0..=m.cutoff).collect());
        }
        let mut out = Vec::with_capacity(self.dim());
        let mut fock = vec![0u32; self.modes.len()];
        loop {
            match self.atom_rep {
                AtomRep::SymmetricSector => {
                    for m in 0..=self.n_atoms {
                        out.push(BasisLabel::new(fock.clone(), AtomLabel::Sector(m)));
                    }
                }
                AtomRep::FullProduct => {
                    for b in 0..(1u64 << self.n_atoms) {
                        out.push(BasisLabel::new(fock.clone(), AtomLabel::Bits(b)));
                    }
                }
            }
            // odometer over fock occupations, last mode fastest
            let mut k = self.modes.len();
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                if fock[k] < self.modes[k].cutoff {
                    fock[k] += 1;
                    for f in fock[k + 1..].iter_mut() {
                        *f = 0;
                    }
                    break;
                } else if k == 0 {
                    return out;
                }
            }
        }
    }
}

/// Atomic part of a basis label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AtomLabel {
    /// Symmetric-sector excitation count.
    Sector(u32),
    /// Product-space bitmask; bit k set means atom k is excited.
    Bits(u64),
}

impl AtomLabel {
    pub fn excitations(&self) -> u32 {
        match self {
            AtomLabel::Sector(m) => *m,
            AtomLabel::Bits(b) => b.count_ones(),
        }
    }
}

/// One basis vector: per-mode photon occupations plus the atomic label.
///
/// Ordering is lexicographic in (fock, atoms), which fixes the canonical
/// amplitude order used by the serialization layer.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisLabel {
    pub fock: Vec<u32>,
    pub atoms: AtomLabel,
}

impl BasisLabel {
    pub fn new(fock: Vec<u32>, atoms: AtomLabel) -> Self {
        Self { fock, atoms }
    }

    /// Convenience constructor for symmetric-sector labels.
    pub fn sector(fock: Vec<u32>, m: u32) -> Self {
        Self::new(fock, AtomLabel::Sector(m))
    }

    /// Convenience constructor for product-space labels.
    pub fn bits(fock: Vec<u32>, bits: u64) -> Self {
        Self::new(fock, AtomLabel::Bits(bits))
    }

    /// Bitstring rendered with atom 0 first, e.g. mask 0b001 over 3 atoms
    /// prints as "100".
    pub fn bits_string(&self, n_atoms: u32) -> Option<String> {
        match self.atoms {
            AtomLabel::Bits(b) => {
                Some((0..n_atoms).map(|k| if b >> k & 1 == 1 { '1' } else { '0' }).collect())
            }
            AtomLabel::Sector(_) => None,
        }
    }
}

/// Which way a boson ladder operator acts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BosonKind {
    /// Annihilation: |n⟩ → √n |n−1⟩.
    Lower,
    /// Creation: |n⟩ → √(n+1) |n+1⟩.
    Raise,
}

/// A sparse pure state: map from basis labels to complex amplitudes.
///
/// Not automatically normalized. `leaked` records that a raising operator
/// pushed weight past a mode cutoff at some point in this value's history;
/// the lost component is dropped but the flag survives all subsequent
/// arithmetic so downstream checks can reject under-dimensioned
/// configurations instead of silently faking unitarity violations.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    config: SpaceConfig,
    amps: BTreeMap<BasisLabel, Complex64>,
    leaked: bool,
}

impl StateVector {
    /// Builds a state with exactly the given amplitudes. Labels must be valid
    /// for the configuration and pairwise distinct. No normalization is
    /// applied.
    pub fn new(
        config: SpaceConfig,
        entries: impl IntoIterator<Item = (BasisLabel, Complex64)>,
    ) -> Result<Self, HilbertError> {
        let mut amps = BTreeMap::new();
        for (label, amp) in entries {
            config.validate_label(&label)?;
            if amps.insert(label, amp).is_some() {
                return Err(HilbertError::DuplicateLabel);
            }
        }
        let mut st = Self {
            config,
            amps,
            leaked: false,
        };
        st.prune();
        Ok(st)
    }

    /// The zero vector on `config`.
    pub fn zero(config: SpaceConfig) -> Self {
        Self {
            config,
            amps: BTreeMap::new(),
            leaked: false,
        }
    }

    /// A single basis vector with amplitude 1.
    pub fn basis_state(config: SpaceConfig, label: BasisLabel) -> Result<Self, HilbertError> {
        Self::new(config, [(label, Complex64::new(1.0, 0.0))])
    }

    pub fn config(&self) -> &SpaceConfig {
        &self.config
    }

    pub fn leaked(&self) -> bool {
        self.leaked
    }

    /// Amplitude on `label`, zero if absent.
    pub fn amplitude(&self, label: &BasisLabel) -> Complex64 {
        self.amps.get(label).copied().unwrap_or_default()
    }

    /// Iterate stored (label, amplitude) pairs in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (&BasisLabel, &Complex64)> {
        self.amps.iter()
    }

    /// Number of stored amplitudes.
    pub fn support_len(&self) -> usize {
        self.amps.len()
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sq() - 1.0).abs() <= NORM_TOL
    }

    /// Rescales to unit norm. Errors on the zero vector.
    pub fn normalize(&self) -> Result<StateVector, HilbertError> {
        let n = self.norm();
        if n == 0.0 {
            return Err(HilbertError::ZeroVector);
        }
        Ok(self.scale(Complex64::new(1.0 / n, 0.0)))
    }

    /// Multiplies every amplitude by `factor`.
    pub fn scale(&self, factor: Complex64) -> StateVector {
        let mut out = self.clone();
        for a in out.amps.values_mut() {
            *a *= factor;
        }
        out.prune();
        out
    }

    /// `self + factor · other`. Configurations must match.
    pub fn add_scaled(&self, factor: Complex64, other: &StateVector) -> Result<StateVector, HilbertError> {
        if self.config != other.config {
            return Err(HilbertError::ConfigMismatch);
        }
        let mut out = self.clone();
        out.leaked |= other.leaked;
        for (label, amp) in &other.amps {
            *out.amps.entry(label.clone()).or_default() += factor * amp;
        }
        out.prune();
        Ok(out)
    }

    pub(crate) fn set_leaked(&mut self) {
        self.leaked = true;
    }

    pub(crate) fn insert_raw(&mut self, label: BasisLabel, amp: Complex64) {
        *self.amps.entry(label).or_default() += amp;
    }

    pub(crate) fn prune(&mut self) {
        self.amps.retain(|_, a| a.norm_sqr() > PRUNE_EPS * PRUNE_EPS);
    }
}

/// Hermitian inner product ⟨x|y⟩, conjugate-linear in `x`.
pub fn inner(x: &StateVector, y: &StateVector) -> Result<Complex64, HilbertError> {
    if x.config != y.config {
        return Err(HilbertError::ConfigMismatch);
    }
    let (small, big, conj_small) = if x.amps.len() <= y.amps.len() {
        (x, y, true)
    } else {
        (y, x, false)
    };
    let mut acc = Complex64::default();
    for (label, amp) in &small.amps {
        let other = big.amplitude(label);
        acc += if conj_small {
            amp.conj() * other
        } else {
            other.conj() * amp
        };
    }
    Ok(acc)
}

/// |⟨x|y⟩|² for normalized x, y.
pub fn fidelity(x: &StateVector, y: &StateVector) -> Result<f64, HilbertError> {
    if !x.is_normalized() || !y.is_normalized() {
        return Err(HilbertError::UnnormalizedInput);
    }
    Ok(inner(x, y)?.norm_sqr())
}

/// Applies a boson ladder operator on the named mode.
///
/// Lowering maps |n⟩ → √n |n−1⟩ (the n=0 component vanishes); raising maps
/// |n⟩ → √(n+1) |n+1⟩. Raising a component already at the cutoff drops it
/// and marks the result as leaked.
pub fn apply_boson(x: &StateVector, mode: &str, kind: BosonKind) -> Result<StateVector, HilbertError> {
    let idx = x.config.mode_index(mode)?;
    let cutoff = x.config.modes[idx].cutoff;
    let mut out = StateVector::zero(x.config.clone());
    out.leaked = x.leaked;
    for (label, amp) in &x.amps {
        let n = label.fock[idx];
        match kind {
            BosonKind::Lower => {
                if n > 0 {
                    let mut fock = label.fock.clone();
                    fock[idx] = n - 1;
                    out.insert_raw(
                        BasisLabel::new(fock, label.atoms),
                        amp * (n as f64).sqrt(),
                    );
                }
            }
            BosonKind::Raise => {
                if n < cutoff {
                    let mut fock = label.fock.clone();
                    fock[idx] = n + 1;
                    out.insert_raw(
                        BasisLabel::new(fock, label.atoms),
                        amp * ((n + 1) as f64).sqrt(),
                    );
                } else {
                    out.set_leaked();
                }
            }
        }
    }
    out.prune();
    Ok(out)
}
