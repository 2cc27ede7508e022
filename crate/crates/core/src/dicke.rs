//! Symmetric Dicke sector algebra.
//!
//! The collective states |m;N⟩ (all configurations of N two-level atoms with
//! exactly m excited, summed with unit coefficients) have squared norm
//! C(N,m). Everything in this crate works in the *normalized* basis
//! |m⟩̂ = |m;N⟩ / √C(N,m), where the collective ladder operators act as
//!
//!   S₁₀ |m⟩̂ = √((m+1)(N−m)) |m+1⟩̂,
//!   S₀₁ |m⟩̂ = √(m(N−m+1))   |m−1⟩̂,
//!
//! so unitarity checks are plain Σ|amp|² = 1. Conversion to the full 2^N
//! product space ([`expand_to_product`], [`project_to_sector`]) and the
//! per-atom ladder sums ([`apply_s10_full`], [`apply_s01_full`]) give an
//! independent route against which the sector rules are tested.

use crate::hilbert::{
    AtomLabel, AtomRep, BasisLabel, HilbertError, SpaceConfig, StateVector, MAX_ATOMS,
};
use num_complex::Complex64;
use thiserror::Error;

/// Guard for 2^N enumeration in [`expand_to_product`].
pub const MAX_EXPAND_ATOMS: u32 = 20;

#[derive(Debug, Error, PartialEq)]
pub enum DickeError {
    #[error("excitation count m={m} out of range for N={n} atoms")]
    ExcitationOutOfRange { m: u32, n: u32 },
    #[error("atom count {0} exceeds the exact-arithmetic guard of {max}", max = MAX_ATOMS)]
    TooManyAtoms(u32),
    #[error("atom count {0} exceeds the 2^N enumeration guard of {max}", max = MAX_EXPAND_ATOMS)]
    ExpansionTooLarge(u32),
    #[error("state is in the full product representation; use expand_to_product/project_to_sector to convert")]
    NotSymmetricSector,
    #[error("state is not in the full product representation")]
    NotFullProduct,
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
}

/// Squared norm ⟨m;N|m;N⟩ of the unnormalized Dicke state: the binomial
/// coefficient C(N,m), computed in exact integer arithmetic.
pub fn dicke_norm_sq(n: u32, m: u32) -> Result<u128, DickeError> {
    if m > n {
        return Err(DickeError::ExcitationOutOfRange { m, n });
    }
    if n > MAX_ATOMS {
        return Err(DickeError::TooManyAtoms(n));
    }
    let m = m.min(n - m) as u128;
    let n = n as u128;
    let mut c: u128 = 1;
    for i in 1..=m {
        // stays integral at every step: c is C(n-m+i-1, i-1) times (n-m+i)
        c = c * (n - m + i) / i;
    }
    Ok(c)
}

fn require_sector(x: &StateVector) -> Result<(), DickeError> {
    match x.config().atom_rep() {
        AtomRep::SymmetricSector => Ok(()),
        AtomRep::FullProduct => Err(DickeError::NotSymmetricSector),
    }
}

/// Collective raising operator S₁₀ in the normalized sector basis:
/// |m⟩̂ → √((m+1)(N−m)) |m+1⟩̂. The m=N component is annihilated.
pub fn apply_s10(x: &StateVector) -> Result<StateVector, DickeError> {
    require_sector(x)?;
    let n = x.config().n_atoms();
    let mut out = StateVector::zero(x.config().clone());
    for (label, amp) in x.iter() {
        let AtomLabel::Sector(m) = label.atoms else {
            unreachable!()
        };
        if m < n {
            let factor = (((m + 1) * (n - m)) as f64).sqrt();
            out.insert_raw(
                BasisLabel::sector(label.fock.clone(), m + 1),
                amp * factor,
            );
        }
    }
    out.prune();
    Ok(out)
}

/// Collective lowering operator S₀₁ in the normalized sector basis:
/// |m⟩̂ → √(m(N−m+1)) |m−1⟩̂. The m=0 component is annihilated.
pub fn apply_s01(x: &StateVector) -> Result<StateVector, DickeError> {
    require_sector(x)?;
    let n = x.config().n_atoms();
    let mut out = StateVector::zero(x.config().clone());
    for (label, amp) in x.iter() {
        let AtomLabel::Sector(m) = label.atoms else {
            unreachable!()
        };
        if m > 0 {
            let factor = ((m * (n - m + 1)) as f64).sqrt();
            out.insert_raw(
                BasisLabel::sector(label.fock.clone(), m - 1),
                amp * factor,
            );
        }
    }
    out.prune();
    Ok(out)
}

/// Per-atom sum Σₖ s₁₀(k) on a full-product state. Independent of the
/// collective sector rules; used to cross-check them.
pub fn apply_s10_full(x: &StateVector) -> Result<StateVector, DickeError> {
    apply_full_ladder(x, true)
}

/// Per-atom sum Σₖ s₀₁(k) on a full-product state.
pub fn apply_s01_full(x: &StateVector) -> Result<StateVector, DickeError> {
    apply_full_ladder(x, false)
}

fn apply_full_ladder(x: &StateVector, raise: bool) -> Result<StateVector, DickeError> {
    if x.config().atom_rep() != AtomRep::FullProduct {
        return Err(DickeError::NotFullProduct);
    }
    let n = x.config().n_atoms();
    let mut out = StateVector::zero(x.config().clone());
    for (label, amp) in x.iter() {
        let AtomLabel::Bits(bits) = label.atoms else {
            unreachable!()
        };
        for k in 0..n {
            let excited = bits >> k & 1 == 1;
            if raise != excited {
                out.insert_raw(
                    BasisLabel::bits(label.fock.clone(), bits ^ (1 << k)),
                    *amp,
                );
            }
        }
    }
    out.prune();
    Ok(out)
}

/// The normalized Dicke state |m⟩̂ written out in the 2^N product space:
/// amplitude 1/√C(N,m) on every weight-m bitstring.
pub fn expand_to_product(m: u32, n: u32) -> Result<StateVector, DickeError> {
    if m > n {
        return Err(DickeError::ExcitationOutOfRange { m, n });
    }
    if n > MAX_EXPAND_ATOMS {
        return Err(DickeError::ExpansionTooLarge(n));
    }
    let config = SpaceConfig::new(vec![], n, AtomRep::FullProduct)?;
    let amp = Complex64::new(1.0 / (dicke_norm_sq(n, m)? as f64).sqrt(), 0.0);
    let entries = (0u64..1 << n)
        .filter(|b| b.count_ones() == m)
        .map(|b| (BasisLabel::bits(vec![], b), amp));
    Ok(StateVector::new(config, entries)?)
}

/// Projects a full-product state onto the symmetric sector.
///
/// Returns the sector-basis overlap coefficients together with the norm of
/// the component lying outside the symmetric subspace. Any field modes pass
/// through untouched.
///
/// The residual is accumulated label-by-label as ‖x − P x‖ rather than via
/// ‖x‖² − ‖Px‖², which would lose everything to cancellation when the
/// residual is near zero.
pub fn project_to_sector(x: &StateVector) -> Result<(StateVector, f64), DickeError> {
    if x.config().atom_rep() != AtomRep::FullProduct {
        return Err(DickeError::NotFullProduct);
    }
    let n = x.config().n_atoms();
    let sector_config = SpaceConfig::new(
        x.config().modes().to_vec(),
        n,
        AtomRep::SymmetricSector,
    )?;
    let mut out = StateVector::zero(sector_config);
    for (label, amp) in x.iter() {
        let AtomLabel::Bits(bits) = label.atoms else {
            unreachable!()
        };
        let m = bits.count_ones();
        let weight = 1.0 / (dicke_norm_sq(n, m)? as f64).sqrt();
        out.insert_raw(BasisLabel::sector(label.fock.clone(), m), amp * weight);
    }

    // ‖x − Px‖²: inside the support compare amplitudes directly; outside it
    // Px still has uniform weight overlap/√C on the remaining bitstrings of
    // each (fock, m) group.
    let mut residual_sq = 0.0;
    let mut group_support: std::collections::BTreeMap<(Vec<u32>, u32), u64> =
        std::collections::BTreeMap::new();
    for (label, amp) in x.iter() {
        let AtomLabel::Bits(bits) = label.atoms else {
            unreachable!()
        };
        let m = bits.count_ones();
        let c = dicke_norm_sq(n, m)? as f64;
        let projected = out.amplitude(&BasisLabel::sector(label.fock.clone(), m)) / c.sqrt();
        residual_sq += (amp - projected).norm_sqr();
        *group_support.entry((label.fock.clone(), m)).or_default() += 1;
    }
    for ((fock, m), count) in group_support {
        let c = dicke_norm_sq(n, m)? as f64;
        let overlap = out.amplitude(&BasisLabel::sector(fock, m));
        residual_sq += overlap.norm_sqr() / c * (c - count as f64).max(0.0);
    }
    out.prune();
    Ok((out, residual_sq.sqrt()))
}
