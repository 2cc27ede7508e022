//! Application protocols built on the closed-form evolutions: W-state
//! preparation and disentanglement, Dicke ladder steps, optical qubit
//! storage and retrieval, the two-ensemble cascade, and the atomic chain.
//!
//! Every protocol is a pure orchestration of closed-form rotations; results
//! carry the final state, the interaction schedule, the fidelity against the
//! protocol's analytic target and, where meaningful, a success probability.
//! Reversed steps (disentanglement, retrieval) negate the rotation sense —
//! equivalent to running the interaction with t → −t — so schedule durations
//! stay non-negative.

use crate::closedform::{evolve_one_photon, evolve_raman, CouplingParams, EvolveError};
use crate::dicke::DickeError;
use crate::hilbert::{
    fidelity, AtomLabel, AtomRep, BasisLabel, HilbertError, ModeSpec, SpaceConfig, StateVector,
    NORM_TOL,
};
use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ProtocolError {
    #[error("parameter `{0}` must be positive and finite")]
    NonPositiveParam(&'static str),
    #[error("parameter `{0}` must be finite")]
    NonFiniteParam(&'static str),
    #[error("qubit amplitudes must satisfy |α|² + |β|² = 1 within 1e-12")]
    UnnormalizedQubit,
    #[error("direction must be +1 or -1, got {0}")]
    InvalidDirection(i32),
    #[error("ladder target m={m}{direction:+} leaves the range 0..={n}")]
    TargetOutOfRange { m: u32, direction: i32, n: u32 },
    #[error("atomic chain must contain at least one ensemble")]
    EmptyChain,
    #[error("ensemble sizes must all be at least 1")]
    EmptyEnsemble,
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error(transparent)]
    Dicke(#[from] DickeError),
    #[error(transparent)]
    Evolve(#[from] EvolveError),
}

/// One interaction window: which interaction acted on which ensembles, for
/// how long.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleStep {
    pub interaction: String,
    pub targets: Vec<String>,
    pub duration: f64,
}

/// Ordered interaction windows; durations are non-negative.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Schedule {
    pub steps: Vec<ScheduleStep>,
}

impl Schedule {
    fn single(interaction: &str, target: &str, duration: f64) -> Self {
        let mut s = Self::default();
        s.push(interaction, target, duration);
        s
    }

    fn push(&mut self, interaction: &str, target: &str, duration: f64) {
        self.steps.push(ScheduleStep {
            interaction: interaction.into(),
            targets: vec![target.into()],
            duration,
        });
    }

    pub fn total_time(&self) -> f64 {
        self.steps.iter().map(|s| s.duration).sum()
    }
}

/// A row of atomic ensembles sharing one light field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnsembleChain {
    sizes: Vec<u32>,
}

impl EnsembleChain {
    pub fn new(sizes: Vec<u32>) -> Result<Self, ProtocolError> {
        if sizes.is_empty() {
            return Err(ProtocolError::EmptyChain);
        }
        if sizes.iter().any(|&s| s == 0) {
            return Err(ProtocolError::EmptyEnsemble);
        }
        Ok(Self { sizes })
    }

    pub fn sizes(&self) -> &[u32] {
        &self.sizes
    }

    /// Total atom count N′ = N₁ + … + N_ν.
    pub fn total(&self) -> u32 {
        self.sizes.iter().sum()
    }

    /// Contiguous atom index ranges of the ensembles.
    pub fn blocks(&self) -> Vec<std::ops::Range<u32>> {
        let mut out = Vec::with_capacity(self.sizes.len());
        let mut start = 0;
        for &s in &self.sizes {
            out.push(start..start + s);
            start += s;
        }
        out
    }
}

/// Outcome of a protocol run.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolResult {
    pub protocol: String,
    pub final_state: StateVector,
    pub schedule: Schedule,
    /// Overlap-squared with the protocol's analytic target state.
    pub fidelity: f64,
    pub success_probability: Option<f64>,
}

fn check_positive(value: f64, name: &'static str) -> Result<(), ProtocolError> {
    if !(value.is_finite() && value > 0.0) {
        return Err(ProtocolError::NonPositiveParam(name));
    }
    Ok(())
}

fn check_qubit(alpha: Complex64, beta: Complex64) -> Result<(), ProtocolError> {
    if (alpha.norm_sqr() + beta.norm_sqr() - 1.0).abs() > NORM_TOL {
        return Err(ProtocolError::UnnormalizedQubit);
    }
    Ok(())
}

fn one_photon_space(n_atoms: u32) -> Result<SpaceConfig, ProtocolError> {
    Ok(SpaceConfig::new(
        vec![ModeSpec::new("a", 1)],
        n_atoms,
        AtomRep::SymmetricSector,
    )?)
}

fn raman_space(n_atoms: u32) -> Result<SpaceConfig, ProtocolError> {
    Ok(SpaceConfig::new(
        vec![ModeSpec::new("c", 1), ModeSpec::new("b", 1)],
        n_atoms,
        AtomRep::SymmetricSector,
    )?)
}

fn rotate_unnormalized(c: Complex64, e: Complex64, theta: f64) -> (Complex64, Complex64) {
    (
        c * theta.cos() - e * theta.sin(),
        c * theta.sin() + e * theta.cos(),
    )
}

/// Deposits one photon into an atomic ensemble as a W state (or, with
/// `disentangle`, extracts it back out of the W state).
///
/// The pulse area is a quarter period of the collectively enhanced Rabi
/// frequency, t* = π / (2 g √N). Disentanglement runs the same window with
/// the rotation sense negated, sending |0⟩⊗|1⟩̂ back to |1⟩⊗|0⟩̂ exactly.
pub fn prepare_w(n_atoms: u32, g: f64, disentangle: bool) -> Result<ProtocolResult, ProtocolError> {
    if n_atoms == 0 {
        return Err(ProtocolError::NonPositiveParam("n_atoms"));
    }
    check_positive(g, "coupling")?;
    let t_star = FRAC_PI_2 / (g * (n_atoms as f64).sqrt());
    let sign = if disentangle { -1.0 } else { 1.0 };
    let params = CouplingParams::new(sign * g, t_star)?;

    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::default();
    let (c0_in, c1_in) = if disentangle { (zero, one) } else { (one, zero) };
    let (c0, c1) = evolve_one_photon(c0_in, c1_in, n_atoms, &params)?;

    let config = one_photon_space(n_atoms)?;
    let final_state = StateVector::new(
        config.clone(),
        [
            (BasisLabel::sector(vec![1], 0), c0),
            (BasisLabel::sector(vec![0], 1), c1),
        ],
    )?;
    let target_label = if disentangle {
        BasisLabel::sector(vec![1], 0)
    } else {
        BasisLabel::sector(vec![0], 1)
    };
    let target = StateVector::basis_state(config, target_label)?;
    let fid = fidelity(&final_state, &target)?;
    Ok(ProtocolResult {
        protocol: if disentangle { "disentangle" } else { "prepare_w" }.into(),
        final_state,
        schedule: Schedule::single(
            if disentangle { "one_photon_reverse" } else { "one_photon" },
            "ensemble_1",
            t_star,
        ),
        fidelity: fid,
        success_probability: None,
    })
}

/// Climbs (or descends) the Dicke ladder by one step through the Raman
/// channel: |m⟩̂ → |m±1⟩̂, converting a photon between the two modes.
///
/// With no explicit duration the pulse area is π/2 and the transfer is
/// deterministic; for a general duration the success probability is sin² of
/// the pair angle.
pub fn ladder_step(
    m: u32,
    n_atoms: u32,
    f: f64,
    direction: i32,
    duration: Option<f64>,
) -> Result<ProtocolResult, ProtocolError> {
    if direction != 1 && direction != -1 {
        return Err(ProtocolError::InvalidDirection(direction));
    }
    check_positive(f, "coupling")?;
    let target_m = m as i64 + direction as i64;
    if target_m < 0 || target_m > n_atoms as i64 {
        return Err(ProtocolError::TargetOutOfRange {
            m,
            direction,
            n: n_atoms,
        });
    }
    let target_m = target_m as u32;
    // frequency of the touched invariant pair, in units of f
    let pair_freq = if direction == 1 {
        (((m + 1) * (n_atoms - m)) as f64).sqrt()
    } else {
        ((m * (n_atoms - m + 1)) as f64).sqrt()
    };
    let t = match duration {
        Some(t) if t.is_finite() && t >= 0.0 => t,
        Some(_) => return Err(ProtocolError::NonPositiveParam("time")),
        None => FRAC_PI_2 / (f * pair_freq),
    };
    let params = CouplingParams::new(f, t)?;

    let config = raman_space(n_atoms)?;
    let (input_fock, output_fock) = if direction == 1 {
        (vec![0, 1], vec![1, 0])
    } else {
        (vec![1, 0], vec![0, 1])
    };
    let input = StateVector::basis_state(config.clone(), BasisLabel::sector(input_fock, m))?;
    let final_state = evolve_raman(&input, &params)?;
    let target_label = BasisLabel::sector(output_fock, target_m);
    let prob = final_state.amplitude(&target_label).norm_sqr();
    let target = StateVector::basis_state(config, target_label)?;
    let fid = fidelity(&final_state, &target)?;
    Ok(ProtocolResult {
        protocol: "ladder_step".into(),
        final_state,
        schedule: Schedule::single("raman", "ensemble_1", t),
        fidelity: fid,
        success_probability: Some(prob),
    })
}

/// Swaps an optical qubit α|1⟩ + β|0⟩ onto the ensemble: after a quarter
/// period the light factors out as |0⟩ and the atoms hold α|1⟩̂ + β|0⟩̂.
/// The β component is dark (the vacuum-ground product is stationary), which
/// is what makes the storage exact.
pub fn store_qubit(
    alpha: Complex64,
    beta: Complex64,
    n_atoms: u32,
    g: f64,
) -> Result<ProtocolResult, ProtocolError> {
    check_qubit(alpha, beta)?;
    if n_atoms == 0 {
        return Err(ProtocolError::NonPositiveParam("n_atoms"));
    }
    check_positive(g, "coupling")?;
    let t_star = FRAC_PI_2 / (g * (n_atoms as f64).sqrt());
    let config = one_photon_space(n_atoms)?;

    let theta = g * t_star * (n_atoms as f64).sqrt();
    let (c0, c1) = rotate_unnormalized(alpha, Complex64::default(), theta);
    let final_state = StateVector::new(
        config.clone(),
        [
            (BasisLabel::sector(vec![1], 0), c0),
            (BasisLabel::sector(vec![0], 1), c1),
            (BasisLabel::sector(vec![0], 0), beta),
        ],
    )?;
    let target = StateVector::new(
        config,
        [
            (BasisLabel::sector(vec![0], 1), alpha),
            (BasisLabel::sector(vec![0], 0), beta),
        ],
    )?;
    let fid = fidelity(&final_state, &target)?;
    Ok(ProtocolResult {
        protocol: "store_qubit".into(),
        final_state,
        schedule: Schedule::single("one_photon", "ensemble_1", t_star),
        fidelity: fid,
        success_probability: None,
    })
}

/// Stores and immediately retrieves an optical qubit; the retrieval window
/// runs with negated rotation sense. The reported fidelity is between the
/// retrieved state and the original input.
pub fn store_qubit_roundtrip(
    alpha: Complex64,
    beta: Complex64,
    n_atoms: u32,
    g: f64,
) -> Result<ProtocolResult, ProtocolError> {
    let stored = store_qubit(alpha, beta, n_atoms, g)?;
    let t_star = stored.schedule.steps[0].duration;
    let theta = -g * t_star * (n_atoms as f64).sqrt();

    let config = one_photon_space(n_atoms)?;
    let photon = BasisLabel::sector(vec![1], 0);
    let w = BasisLabel::sector(vec![0], 1);
    let dark = BasisLabel::sector(vec![0], 0);
    let (c0, c1) = rotate_unnormalized(
        stored.final_state.amplitude(&photon),
        stored.final_state.amplitude(&w),
        theta,
    );
    let final_state = StateVector::new(
        config.clone(),
        [
            (photon.clone(), c0),
            (w, c1),
            (dark.clone(), stored.final_state.amplitude(&dark)),
        ],
    )?;
    let original = StateVector::new(config, [(photon, alpha), (dark, beta)])?;
    let fid = fidelity(&final_state, &original)?;
    let mut schedule = stored.schedule;
    schedule.push("one_photon_reverse", "ensemble_1", t_star);
    Ok(ProtocolResult {
        protocol: "store_qubit_roundtrip".into(),
        final_state,
        schedule,
        fidelity: fid,
        success_probability: None,
    })
}

/// Stores an entangled single-photon state of two modes, α|01⟩ + β|10⟩,
/// in the ensemble through the Raman channel. At θ₀ = π/2 the α branch has
/// rotated onto |10⟩⊗|1⟩̂ while the β branch never moves (its pair angle is
/// identically zero at m = 0), so the light factors out as |10⟩.
pub fn store_entangled_pair(
    alpha: Complex64,
    beta: Complex64,
    n_atoms: u32,
    f: f64,
) -> Result<ProtocolResult, ProtocolError> {
    check_qubit(alpha, beta)?;
    if n_atoms == 0 {
        return Err(ProtocolError::NonPositiveParam("n_atoms"));
    }
    check_positive(f, "coupling")?;
    let t_star = FRAC_PI_2 / (f * (n_atoms as f64).sqrt());
    let params = CouplingParams::new(f, t_star)?;
    let config = raman_space(n_atoms)?;
    let input = StateVector::new(
        config.clone(),
        [
            (BasisLabel::sector(vec![0, 1], 0), alpha),
            (BasisLabel::sector(vec![1, 0], 0), beta),
        ],
    )?;
    let final_state = evolve_raman(&input, &params)?;
    let target = StateVector::new(
        config,
        [
            (BasisLabel::sector(vec![1, 0], 1), alpha),
            (BasisLabel::sector(vec![1, 0], 0), beta),
        ],
    )?;
    let fid = fidelity(&final_state, &target)?;
    Ok(ProtocolResult {
        protocol: "store_entangled_pair".into(),
        final_state,
        schedule: Schedule::single("raman", "ensemble_1", t_star),
        fidelity: fid,
        success_probability: None,
    })
}

/// Roundtrip counterpart of [`store_entangled_pair`].
pub fn store_entangled_pair_roundtrip(
    alpha: Complex64,
    beta: Complex64,
    n_atoms: u32,
    f: f64,
) -> Result<ProtocolResult, ProtocolError> {
    let stored = store_entangled_pair(alpha, beta, n_atoms, f)?;
    let t_star = stored.schedule.steps[0].duration;
    let params = CouplingParams::new(-f, t_star)?;
    let final_state = evolve_raman(&stored.final_state, &params)?;
    let config = raman_space(n_atoms)?;
    let original = StateVector::new(
        config,
        [
            (BasisLabel::sector(vec![0, 1], 0), alpha),
            (BasisLabel::sector(vec![1, 0], 0), beta),
        ],
    )?;
    let fid = fidelity(&final_state, &original)?;
    let mut schedule = stored.schedule;
    schedule.push("raman_reverse", "ensemble_1", t_star);
    Ok(ProtocolResult {
        protocol: "store_entangled_pair_roundtrip".into(),
        final_state,
        schedule,
        fidelity: fid,
        success_probability: None,
    })
}

/// Consecutive one-photon interaction of a single photon with two separate
/// ensembles, leaving a three-partite W-class state with amplitudes
/// (c₁c₂, s₁, c₁s₂) on (photon, ensemble-1 W, ensemble-2 W), where
/// θᵢ = gᵢ·tᵢ·√Nᵢ.
///
/// The final state lives in the full product space of N₁+N₂ atoms so the
/// two ensembles stay distinguishable; it is sparse (1 + N₁ + N₂
/// amplitudes), so large ensembles cost nothing.
pub fn cascade(
    n1: u32,
    n2: u32,
    g1: f64,
    g2: f64,
    t1: f64,
    t2: f64,
) -> Result<ProtocolResult, ProtocolError> {
    for (v, name) in [(n1, "n1"), (n2, "n2")] {
        if v == 0 {
            return Err(ProtocolError::NonPositiveParam(name));
        }
    }
    check_positive(g1, "g1")?;
    check_positive(g2, "g2")?;
    for (v, name) in [(t1, "t1"), (t2, "t2")] {
        if !v.is_finite() || v < 0.0 {
            return Err(ProtocolError::NonPositiveParam(name));
        }
    }
    let total = n1 + n2;
    let config = SpaceConfig::new(vec![ModeSpec::new("a", 1)], total, AtomRep::FullProduct)?;
    let chain = EnsembleChain::new(vec![n1, n2])?;
    let blocks = chain.blocks();

    let mut state = StateVector::basis_state(config.clone(), BasisLabel::bits(vec![1], 0))?;
    let theta1 = g1 * t1 * (n1 as f64).sqrt();
    let theta2 = g2 * t2 * (n2 as f64).sqrt();
    state = rotate_photon_with_block(&state, blocks[0].clone(), theta1);
    state = rotate_photon_with_block(&state, blocks[1].clone(), theta2);

    // predicted amplitude structure in the collective basis
    let (c1v, s1v) = (theta1.cos(), theta1.sin());
    let (c2v, s2v) = (theta2.cos(), theta2.sin());
    let mut target = StateVector::zero(config);
    target.insert_raw(BasisLabel::bits(vec![1], 0), Complex64::new(c1v * c2v, 0.0));
    for k in blocks[0].clone() {
        target.insert_raw(
            BasisLabel::bits(vec![0], 1 << k),
            Complex64::new(s1v / (n1 as f64).sqrt(), 0.0),
        );
    }
    for k in blocks[1].clone() {
        target.insert_raw(
            BasisLabel::bits(vec![0], 1 << k),
            Complex64::new(c1v * s2v / (n2 as f64).sqrt(), 0.0),
        );
    }
    target.prune();
    let fid = fidelity(&state, &target)?;

    let mut schedule = Schedule::single("one_photon", "ensemble_1", t1);
    schedule.push("one_photon", "ensemble_2", t2);
    Ok(ProtocolResult {
        protocol: "cascade".into(),
        final_state: state,
        schedule,
        fidelity: fid,
        success_probability: None,
    })
}

/// One-photon closed-form rotation between the all-ground photon component
/// and the W state of one atom block, on a sparse full-product state.
///
/// Valid when the support is contained in {|1⟩⊗ground} ∪ {|0⟩⊗single
/// excitation}: single-excitation combinations orthogonal to the block W
/// are dark (their per-atom lowering amplitudes cancel), so only the
/// collective pair rotates and everything else passes through.
fn rotate_photon_with_block(
    state: &StateVector,
    block: std::ops::Range<u32>,
    theta: f64,
) -> StateVector {
    let photon = BasisLabel::bits(vec![1], 0);
    let root = ((block.end - block.start) as f64).sqrt();

    let x = state.amplitude(&photon);
    let mut w = Complex64::default();
    for k in block.clone() {
        w += state.amplitude(&BasisLabel::bits(vec![0], 1 << k)) / root;
    }
    let (x2, w2) = rotate_unnormalized(x, w, theta);

    let mut out = state.clone();
    out.insert_raw(photon, x2 - x);
    for k in block {
        out.insert_raw(BasisLabel::bits(vec![0], 1 << k), (w2 - w) / root);
    }
    out.prune();
    out
}

/// Illuminates a row of ensembles with the entangled two-mode field
/// α|01⟩ + β|10⟩. The summed collective dipole makes the whole chain act as
/// one ensemble of N′ atoms: the α branch rotates at θ₀ = f·t·√N′ onto the
/// chain W state (ensemble x excited with weight √(N_x/N′)), while the β
/// branch is stationary.
pub fn chain_evolution(
    chain: &EnsembleChain,
    alpha: Complex64,
    beta: Complex64,
    f: f64,
    t: f64,
) -> Result<ProtocolResult, ProtocolError> {
    check_qubit(alpha, beta)?;
    check_positive(f, "coupling")?;
    if !t.is_finite() {
        return Err(ProtocolError::NonFiniteParam("time"));
    }
    let total = chain.total();
    let config = raman_space(total)?;
    let input = StateVector::new(
        config.clone(),
        [
            (BasisLabel::sector(vec![0, 1], 0), alpha),
            (BasisLabel::sector(vec![1, 0], 0), beta),
        ],
    )?;
    let params = CouplingParams::new(f, t)?;
    let final_state = evolve_raman(&input, &params)?;

    let theta0 = f * t * (total as f64).sqrt();
    let target = StateVector::new(
        config,
        [
            (BasisLabel::sector(vec![0, 1], 0), alpha * theta0.cos()),
            (BasisLabel::sector(vec![1, 0], 1), alpha * theta0.sin()),
            (BasisLabel::sector(vec![1, 0], 0), beta),
        ],
    )?;
    let fid = fidelity(&final_state, &target)?;
    Ok(ProtocolResult {
        protocol: "chain".into(),
        final_state,
        schedule: Schedule::single("raman", "chain", t),
        fidelity: fid,
        success_probability: None,
    })
}

/// Expected excitation count of each ensemble in the chain.
///
/// Symmetric-sector states share excitations uniformly, so ensemble x holds
/// m·N_x/N′ of the total; full-product states are summed per block exactly.
pub fn ensemble_excitation_probabilities(
    chain: &EnsembleChain,
    state: &StateVector,
) -> Result<Vec<f64>, ProtocolError> {
    let total = chain.total();
    if state.config().n_atoms() != total {
        return Err(ProtocolError::Hilbert(HilbertError::ConfigMismatch));
    }
    let mut out = vec![0.0; chain.sizes().len()];
    match state.config().atom_rep() {
        AtomRep::SymmetricSector => {
            let mut mean_m = 0.0;
            for (label, amp) in state.iter() {
                mean_m += amp.norm_sqr() * label.atoms.excitations() as f64;
            }
            for (slot, &size) in out.iter_mut().zip(chain.sizes()) {
                *slot = mean_m * size as f64 / total as f64;
            }
        }
        AtomRep::FullProduct => {
            let masks: Vec<u64> = chain
                .blocks()
                .into_iter()
                .map(|b| ((1u64 << b.end) - 1) ^ ((1u64 << b.start) - 1))
                .collect();
            for (label, amp) in state.iter() {
                let AtomLabel::Bits(bits) = label.atoms else {
                    unreachable!()
                };
                let w = amp.norm_sqr();
                for (slot, mask) in out.iter_mut().zip(&masks) {
                    *slot += w * (bits & mask).count_ones() as f64;
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{build_hamiltonian, compare_states, evolve_exact, HamiltonianSpec};
    use std::f64::consts::PI;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    const ONE: Complex64 = Complex64::new(1.0, 0.0);
    const ZERO: Complex64 = Complex64::new(0.0, 0.0);

    #[test]
    fn prepare_w_quarter_period_and_fidelity() {
        let single = prepare_w(1, 1.0, false).unwrap();
        assert!((single.schedule.steps[0].duration - PI / 2.0).abs() < 1e-15);
        assert!((single.fidelity - 1.0).abs() < 1e-12);

        let four = prepare_w(4, 1.0, false).unwrap();
        assert!((four.schedule.steps[0].duration - PI / 4.0).abs() < 1e-15);
        assert!((four.fidelity - 1.0).abs() < 1e-12);
        assert!(
            (four.final_state.amplitude(&BasisLabel::sector(vec![0], 1)).re - 1.0).abs() < 1e-12
        );
    }

    #[test]
    fn prepare_then_disentangle_restores_photon() {
        for n in [1u32, 2, 4, 9] {
            let w = prepare_w(n, 1.0, false).unwrap();
            assert!((w.fidelity - 1.0).abs() < 1e-12);
            // disentangle starts from |0⟩⊗|1⟩̂, exactly prepare_w's output
            let undone = prepare_w(n, 1.0, true).unwrap();
            let photon = undone.final_state.amplitude(&BasisLabel::sector(vec![1], 0));
            assert!((photon.re - 1.0).abs() < 1e-12);
            assert!((undone.fidelity - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn prepare_w_rejects_bad_params() {
        assert!(matches!(
            prepare_w(0, 1.0, false),
            Err(ProtocolError::NonPositiveParam("n_atoms"))
        ));
        assert!(matches!(
            prepare_w(3, 0.0, false),
            Err(ProtocolError::NonPositiveParam("coupling"))
        ));
    }

    #[test]
    fn ladder_step_up_is_deterministic() {
        for n in [1u32, 3, 5] {
            let result = ladder_step(0, n, 1.0, 1, None).unwrap();
            assert!((result.success_probability.unwrap() - 1.0).abs() < 1e-12);
            assert!((result.fidelity - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ladder_step_range_and_direction_errors() {
        assert!(matches!(
            ladder_step(0, 3, 1.0, -1, None),
            Err(ProtocolError::TargetOutOfRange { .. })
        ));
        assert!(matches!(
            ladder_step(3, 3, 1.0, 1, None),
            Err(ProtocolError::TargetOutOfRange { .. })
        ));
        assert!(matches!(
            ladder_step(1, 3, 1.0, 2, None),
            Err(ProtocolError::InvalidDirection(2))
        ));
    }

    #[test]
    fn ladder_step_partial_area_probability() {
        // θ₁ = 2·f·t = π/4 for N=3, m=1
        let t = PI / 8.0;
        let result = ladder_step(1, 3, 1.0, 1, Some(t)).unwrap();
        assert!((result.success_probability.unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ladder_step_down_transfers_with_phase() {
        let result = ladder_step(2, 4, 1.0, -1, None).unwrap();
        assert!((result.success_probability.unwrap() - 1.0).abs() < 1e-12);
        let amp = result.final_state.amplitude(&BasisLabel::sector(vec![0, 1], 1));
        // output is −|01⟩⊗|1⟩̂; the fidelity ignores the phase
        assert!((amp.re + 1.0).abs() < 1e-12);
        assert!((result.fidelity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn store_qubit_special_cases() {
        // α=1 reduces to W preparation
        let w = store_qubit(ONE, ZERO, 4, 1.0).unwrap();
        assert!((w.fidelity - 1.0).abs() < 1e-12);

        // β=1 is dark: nothing evolves
        let dark = store_qubit(ZERO, ONE, 4, 1.0).unwrap();
        assert!((dark.fidelity - 1.0).abs() < 1e-12);
        assert!(
            (dark.final_state.amplitude(&BasisLabel::sector(vec![0], 0)).re - 1.0).abs() < 1e-12
        );

        // balanced superposition lands on (|1⟩̂ + |0⟩̂)/√2
        let half = 1.0 / 2f64.sqrt();
        let balanced = store_qubit(c64(half, 0.0), c64(half, 0.0), 4, 1.0).unwrap();
        assert!((balanced.fidelity - 1.0).abs() < 1e-12);
        let w_amp = balanced.final_state.amplitude(&BasisLabel::sector(vec![0], 1));
        let g_amp = balanced.final_state.amplitude(&BasisLabel::sector(vec![0], 0));
        assert!((w_amp.re - half).abs() < 1e-12);
        assert!((g_amp.re - half).abs() < 1e-12);
        // the light factor is exactly |0⟩: the residual photon amplitude
        // cos(π/2)·α is below the pruning floor
        assert_eq!(
            balanced.final_state.amplitude(&BasisLabel::sector(vec![1], 0)),
            ZERO
        );
    }

    #[test]
    fn store_qubit_rejects_unnormalized() {
        assert!(matches!(
            store_qubit(ONE, ONE, 2, 1.0),
            Err(ProtocolError::UnnormalizedQubit)
        ));
    }

    #[test]
    fn store_qubit_roundtrip_restores_input() {
        let result = store_qubit_roundtrip(c64(0.6, 0.0), c64(0.0, 0.8), 4, 1.0).unwrap();
        assert!((result.fidelity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn store_entangled_pair_branches() {
        let n = 3u32;
        let all_alpha = store_entangled_pair(ONE, ZERO, n, 1.0).unwrap();
        assert!((all_alpha.fidelity - 1.0).abs() < 1e-12);
        assert!(
            (all_alpha.final_state.amplitude(&BasisLabel::sector(vec![1, 0], 1)).re - 1.0).abs()
                < 1e-12
        );

        let all_beta = store_entangled_pair(ZERO, ONE, n, 1.0).unwrap();
        assert!((all_beta.fidelity - 1.0).abs() < 1e-12);
        assert!(
            (all_beta.final_state.amplitude(&BasisLabel::sector(vec![1, 0], 0)).re - 1.0).abs()
                < 1e-12
        );

        let roundtrip =
            store_entangled_pair_roundtrip(c64(0.6, 0.0), c64(0.0, 0.8), n, 1.0).unwrap();
        assert!((roundtrip.fidelity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn store_entangled_pair_light_purity() {
        // at θ₀ = π/2 the light factors out (purity 1); at π/4 it stays
        // entangled with the atoms. Cross-checked through the full product
        // oracle rather than the closed form.
        let n = 2u32;
        let f = 1.0;
        let spec = HamiltonianSpec::raman(f, [1, 1], n).with_representation(AtomRep::FullProduct);
        let op = build_hamiltonian(&spec).unwrap();
        let half = 1.0 / 2f64.sqrt();
        let input = StateVector::new(
            op.config().clone(),
            [
                (BasisLabel::bits(vec![0, 1], 0), c64(half, 0.0)),
                (BasisLabel::bits(vec![1, 0], 0), c64(half, 0.0)),
            ],
        )
        .unwrap();
        let purity = |state: &StateVector| -> f64 {
            let focks = [[0u32, 0], [0, 1], [1, 0], [1, 1]];
            let mut tr2 = 0.0;
            for fi in &focks {
                for fj in &focks {
                    let mut rho_ij = Complex64::default();
                    for bits in 0u64..1 << n {
                        let a = state.amplitude(&BasisLabel::bits(fi.to_vec(), bits));
                        let b = state.amplitude(&BasisLabel::bits(fj.to_vec(), bits));
                        rho_ij += a * b.conj();
                    }
                    tr2 += rho_ij.norm_sqr();
                }
            }
            tr2
        };

        let quarter = FRAC_PI_2 / (f * (n as f64).sqrt());
        let factorized = evolve_exact(&op, &input, quarter).unwrap();
        assert!((purity(&factorized) - 1.0).abs() < 1e-10);

        let entangled = evolve_exact(&op, &input, quarter / 2.0).unwrap();
        assert!(purity(&entangled) < 1.0 - 1e-3);
    }

    #[test]
    fn cascade_full_transfer_to_first_ensemble() {
        let n1 = 2u32;
        let t1 = FRAC_PI_2 / (n1 as f64).sqrt();
        let t2 = FRAC_PI_2 / 2f64.sqrt();
        let result = cascade(n1, 2, 1.0, 1.0, t1, t2).unwrap();
        assert!((result.fidelity - 1.0).abs() < 1e-12);
        // photon fully deposited in ensemble 1; ensemble 2 untouched
        let amp = result.final_state.amplitude(&BasisLabel::bits(vec![0], 0b01));
        assert!((amp.re - 1.0 / 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(
            result.final_state.amplitude(&BasisLabel::bits(vec![0], 0b0100)),
            ZERO
        );
    }

    #[test]
    fn cascade_identity_at_zero_times() {
        let result = cascade(2, 3, 1.0, 1.0, 0.0, 0.0).unwrap();
        let photon = result.final_state.amplitude(&BasisLabel::bits(vec![1], 0));
        assert!((photon.re - 1.0).abs() < 1e-15);
        assert_eq!(result.final_state.support_len(), 1);
    }

    #[test]
    fn cascade_uniform_three_partite_weights() {
        // θ₁ = arcsin(1/√3), θ₂ = π/2 gives amplitudes (0, 1/√3, √(2/3))
        let (n1, n2) = (2u32, 2u32);
        let theta1 = (1.0 / 3f64.sqrt()).asin();
        let t1 = theta1 / (n1 as f64).sqrt();
        let t2 = FRAC_PI_2 / (n2 as f64).sqrt();
        let result = cascade(n1, n2, 1.0, 1.0, t1, t2).unwrap();
        assert!((result.fidelity - 1.0).abs() < 1e-12);

        let photon = result.final_state.amplitude(&BasisLabel::bits(vec![1], 0));
        assert!(photon.norm() < 1e-12);
        let w1 = result.final_state.amplitude(&BasisLabel::bits(vec![0], 0b01));
        assert!((w1.re - (1.0 / 3f64.sqrt()) / 2f64.sqrt()).abs() < 1e-12);
        let w2 = result.final_state.amplitude(&BasisLabel::bits(vec![0], 0b0100));
        assert!((w2.re - (2f64 / 3.0).sqrt() / 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn cascade_first_amplitude_ignores_second_window() {
        let (t1, g) = (0.37, 1.0);
        let base = cascade(2, 2, g, g, t1, 0.21).unwrap();
        let other = cascade(2, 2, g, g, t1, 1.9).unwrap();
        let lbl = BasisLabel::bits(vec![0], 0b01);
        assert!(
            (base.final_state.amplitude(&lbl) - other.final_state.amplitude(&lbl)).norm() < 1e-13
        );
    }

    #[test]
    fn cascade_matches_sequential_oracle() {
        let (n1, n2) = (2u32, 2u32);
        let (g1, g2) = (1.0, 0.8);
        let (t1, t2) = (0.47, 0.93);
        let result = cascade(n1, n2, g1, g2, t1, t2).unwrap();

        let total = n1 + n2;
        let step1 = HamiltonianSpec::one_photon(g1, 1, total)
            .with_representation(AtomRep::FullProduct)
            .with_active_atoms(0..n1);
        let step2 = HamiltonianSpec::one_photon(g2, 1, total)
            .with_representation(AtomRep::FullProduct)
            .with_active_atoms(n1..total);
        let op1 = build_hamiltonian(&step1).unwrap();
        let op2 = build_hamiltonian(&step2).unwrap();
        let initial =
            StateVector::basis_state(op1.config().clone(), BasisLabel::bits(vec![1], 0)).unwrap();
        let mid = evolve_exact(&op1, &initial, t1).unwrap();
        let end = evolve_exact(&op2, &mid, t2).unwrap();
        assert!(compare_states(&end, &result.final_state).unwrap() < 1e-10);
    }

    #[test]
    fn chain_single_ensemble_reduces_to_pair_storage() {
        let chain = EnsembleChain::new(vec![3]).unwrap();
        let t = FRAC_PI_2 / 3f64.sqrt();
        let result = chain_evolution(&chain, ONE, ZERO, 1.0, t).unwrap();
        let stored = store_entangled_pair(ONE, ZERO, 3, 1.0).unwrap();
        assert!(compare_states(&result.final_state, &stored.final_state).unwrap() < 1e-12);
    }

    #[test]
    fn chain_of_single_atoms_is_multipartite_w() {
        let chain = EnsembleChain::new(vec![1, 1, 1]).unwrap();
        let t = FRAC_PI_2 / 3f64.sqrt();
        let result = chain_evolution(&chain, ONE, ZERO, 1.0, t).unwrap();
        assert!((result.fidelity - 1.0).abs() < 1e-12);
        let probs = ensemble_excitation_probabilities(&chain, &result.final_state).unwrap();
        for p in probs {
            assert!((p - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn chain_unbalanced_sizes_weight_excitation() {
        let chain = EnsembleChain::new(vec![1, 3]).unwrap();
        let t = FRAC_PI_2 / 2.0;
        let result = chain_evolution(&chain, ONE, ZERO, 1.0, t).unwrap();
        let probs = ensemble_excitation_probabilities(&chain, &result.final_state).unwrap();
        assert!((probs[0] - 0.25).abs() < 1e-12);
        assert!((probs[1] - 0.75).abs() < 1e-12);
    }

    #[test]
    fn chain_beta_branch_is_stationary() {
        let chain = EnsembleChain::new(vec![2, 2]).unwrap();
        let result = chain_evolution(&chain, ZERO, ONE, 1.0, 1.3).unwrap();
        assert!((result.fidelity - 1.0).abs() < 1e-12);
        assert!(
            (result.final_state.amplitude(&BasisLabel::sector(vec![1, 0], 0)).re - 1.0).abs()
                < 1e-12
        );
    }

    #[test]
    fn chain_rejects_bad_shapes() {
        assert!(matches!(EnsembleChain::new(vec![]), Err(ProtocolError::EmptyChain)));
        assert!(matches!(
            EnsembleChain::new(vec![2, 0]),
            Err(ProtocolError::EmptyEnsemble)
        ));
    }
}
