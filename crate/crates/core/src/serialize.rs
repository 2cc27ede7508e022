//! JSON schemas shared with the command-line front end.
//!
//! Floats are rendered with 17 significant digits (`{:.16e}`), which
//! round-trips every f64 exactly and keeps file outputs byte-stable for
//! golden tests. Amplitudes are emitted in the canonical lexicographic
//! (fock, atom) order the sparse states already maintain.

use crate::hilbert::{AtomLabel, AtomRep, BasisLabel, HilbertError, ModeSpec, SpaceConfig, StateVector};
use crate::protocols::ProtocolResult;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::io;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SerializeError {
    #[error("unknown atom representation `{0}` (expected \"symmetric\" or \"full\")")]
    UnknownRepresentation(String),
    #[error("amplitude entry needs exactly one of `m` (symmetric) or `bits` (full)")]
    AmbiguousAtomField,
    #[error("bits string `{0}` must consist of 0s and 1s, one per atom")]
    BadBitsString(String),
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

/// `serde_json` formatter writing every float with 17 significant digits.
struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Serializes any value as compact JSON with the canonical float format.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String, SerializeError> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ModeJson {
    pub label: String,
    pub cutoff: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AmplitudeJson {
    pub fock: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bits: Option<String>,
    pub re: f64,
    pub im: f64,
}

/// The on-disk state schema.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct StateJson {
    pub modes: Vec<ModeJson>,
    pub n_atoms: u32,
    pub atom_representation: String,
    pub amplitudes: Vec<AmplitudeJson>,
}

impl StateJson {
    pub fn from_state(state: &StateVector) -> Self {
        let config = state.config();
        let n = config.n_atoms();
        let amplitudes = state
            .iter()
            .map(|(label, amp)| {
                let (m, bits) = match label.atoms {
                    AtomLabel::Sector(m) => (Some(m), None),
                    AtomLabel::Bits(_) => (None, label.bits_string(n)),
                };
                AmplitudeJson {
                    fock: label.fock.clone(),
                    m,
                    bits,
                    re: amp.re,
                    im: amp.im,
                }
            })
            .collect();
        Self {
            modes: config
                .modes()
                .iter()
                .map(|m| ModeJson {
                    label: m.label.clone(),
                    cutoff: m.cutoff,
                })
                .collect(),
            n_atoms: n,
            atom_representation: match config.atom_rep() {
                AtomRep::SymmetricSector => "symmetric".into(),
                AtomRep::FullProduct => "full".into(),
            },
            amplitudes,
        }
    }

    pub fn into_state(self) -> Result<StateVector, SerializeError> {
        let rep = match self.atom_representation.as_str() {
            "symmetric" => AtomRep::SymmetricSector,
            "full" => AtomRep::FullProduct,
            other => return Err(SerializeError::UnknownRepresentation(other.to_string())),
        };
        let config = SpaceConfig::new(
            self.modes
                .into_iter()
                .map(|m| ModeSpec::new(m.label, m.cutoff))
                .collect(),
            self.n_atoms,
            rep,
        )?;
        let mut entries = Vec::with_capacity(self.amplitudes.len());
        for entry in self.amplitudes {
            let atoms = match (rep, entry.m, &entry.bits) {
                (AtomRep::SymmetricSector, Some(m), None) => AtomLabel::Sector(m),
                (AtomRep::FullProduct, None, Some(bits)) => {
                    AtomLabel::Bits(parse_bits(bits, self.n_atoms)?)
                }
                _ => return Err(SerializeError::AmbiguousAtomField),
            };
            entries.push((
                BasisLabel::new(entry.fock, atoms),
                Complex64::new(entry.re, entry.im),
            ));
        }
        Ok(StateVector::new(config, entries)?)
    }
}

fn parse_bits(s: &str, n_atoms: u32) -> Result<u64, SerializeError> {
    if s.len() != n_atoms as usize {
        return Err(SerializeError::BadBitsString(s.to_string()));
    }
    let mut bits = 0u64;
    for (k, ch) in s.chars().enumerate() {
        match ch {
            '1' => bits |= 1 << k,
            '0' => {}
            _ => return Err(SerializeError::BadBitsString(s.to_string())),
        }
    }
    Ok(bits)
}

/// Reads a state from its JSON text.
pub fn state_from_json(text: &str) -> Result<StateVector, SerializeError> {
    let file: StateJson = serde_json::from_str(text)?;
    file.into_state()
}

/// Writes a state as canonical JSON text.
pub fn state_to_json(state: &StateVector) -> Result<String, SerializeError> {
    to_canonical_json(&StateJson::from_state(state))
}

/// One verification case in the report consumed by the CLI.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CaseReport {
    pub case: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub notes: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ScheduleStepJson {
    pub step: usize,
    pub duration: f64,
}

/// The on-disk protocol result schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProtocolResultJson {
    pub protocol: String,
    pub params: serde_json::Value,
    pub schedule: Vec<ScheduleStepJson>,
    pub fidelity: f64,
    pub success_probability: Option<f64>,
    pub final_state: StateJson,
}

impl ProtocolResultJson {
    pub fn from_result(result: &ProtocolResult, params: serde_json::Value) -> Self {
        Self {
            protocol: result.protocol.clone(),
            params,
            schedule: result
                .schedule
                .steps
                .iter()
                .enumerate()
                .map(|(i, s)| ScheduleStepJson {
                    step: i + 1,
                    duration: s.duration,
                })
                .collect(),
            fidelity: result.fidelity,
            success_probability: result.success_probability,
            final_state: StateJson::from_state(&result.final_state),
        }
    }
}
