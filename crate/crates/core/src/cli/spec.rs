//! JSON sequence specifications.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::distmodel::{discretize, make_atomic, ComponentDistribution, ContinuousFamilySpec};
use crate::error::{Error, Result};
use crate::rearrange::{detect_flags, IndependentSequence, LevyConstants, SequenceFlags};

/// One entry of `variables`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum VariableSpec {
    /// `(value, probability)` pairs.
    Atomic { atoms: Vec<(f64, f64)> },
    /// A discretized continuous law.
    Family(ContinuousFamilySpec),
    /// `count` independent copies of `variable`.
    IidBlock {
        count: usize,
        #[serde(alias = "inner")]
        variable: Box<VariableSpec>,
    },
}

impl VariableSpec {
    fn expand(&self, out: &mut Vec<ComponentDistribution>) -> Result<()> {
        match self {
            VariableSpec::Atomic { atoms } => out.push(make_atomic(atoms.iter().copied())?),
            VariableSpec::Family(spec) => out.push(discretize(spec)?),
            VariableSpec::IidBlock { count, variable } => {
                let mut inner = Vec::new();
                variable.expand(&mut inner)?;
                for _ in 0..*count {
                    out.extend_from_slice(&inner);
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub variables: Vec<VariableSpec>,
    #[serde(default)]
    pub flags: SequenceFlags,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levy_constants: Option<LevyConstants>,
}

impl SpecFile {
    pub fn from_json(text: &str) -> Result<SpecFile> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    /// Builds the sequence. Declared flags must hold; detected flags are added.
    pub fn to_sequence(&self) -> Result<IndependentSequence> {
        let mut comps = Vec::new();
        for v in &self.variables {
            v.expand(&mut comps)?;
        }
        IndependentSequence::new(comps.clone(), self.flags)?;
        let flags = self.flags.union(detect_flags(&comps));
        let seq = IndependentSequence::new(comps, flags)?;
        match self.levy_constants {
            Some(levy) => seq.with_levy_constants(levy),
            None => Ok(seq),
        }
    }

    /// Atomic description of a sequence; runs of identical components become iid blocks.
    pub fn from_sequence(seq: &IndependentSequence) -> SpecFile {
        let variables = seq
            .runs()
            .iter()
            .map(|&(start, len)| {
                let atomic = VariableSpec::Atomic {
                    atoms: seq.components()[start].atoms().iter().map(|a| (a.value, a.prob)).collect(),
                };
                if len == 1 {
                    atomic
                } else {
                    VariableSpec::IidBlock { count: len, variable: Box::new(atomic) }
                }
            })
            .collect();
        let flags = seq.flags();
        let levy = seq.levy_constants();
        SpecFile {
            variables,
            flags,
            levy_constants: if levy == LevyConstants::for_flags(flags) { None } else { levy },
        }
    }
}

/// Reads and validates a spec file.
pub fn parse_spec(path: impl AsRef<Path>) -> Result<IndependentSequence> {
    read_spec(path)?.to_sequence()
}

pub fn read_spec(path: impl AsRef<Path>) -> Result<SpecFile> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    SpecFile::from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rademacher_spec() {
        let s = SpecFile::from_json(
            r#"{"variables":[{"type":"atomic","atoms":[[1,0.5],[-1,0.5]]}],"flags":{"symmetric":true}}"#,
        )
        .unwrap();
        let seq = s.to_sequence().unwrap();
        assert_eq!(seq.len(), 1);
        assert_eq!(seq.components()[0], ComponentDistribution::rademacher());
        assert_eq!(seq.levy_constants(), Some(LevyConstants::SYMMETRIC));
    }

    #[test]
    fn iid_block_expands_and_detects_flags() {
        let s = SpecFile::from_json(
            r#"{"variables":[{"type":"iid-block","count":100,"variable":{"type":"atomic","atoms":[[1,0.5],[-1,0.5]]}}]}"#,
        )
        .unwrap();
        let seq = s.to_sequence().unwrap();
        assert_eq!(seq.len(), 100);
        assert!(seq.flags().iid && seq.flags().symmetric && !seq.flags().positive);
    }

    #[test]
    fn declared_flag_mismatch() {
        let s = SpecFile::from_json(r#"{"variables":[{"type":"atomic","atoms":[[1,1.0]]}],"flags":{"symmetric":true}}"#)
            .unwrap();
        assert!(matches!(s.to_sequence(), Err(Error::FlagMismatch(_))));
    }

    #[test]
    fn empty_and_malformed() {
        let s = SpecFile::from_json(r#"{"variables":[]}"#).unwrap();
        assert!(matches!(s.to_sequence(), Err(Error::EmptySequence)));
        assert!(matches!(SpecFile::from_json("{"), Err(Error::Parse(_))));
        assert!(matches!(SpecFile::from_json(r#"{"variables":[], "flag": {}}"#), Err(Error::Parse(_))));
    }

    #[test]
    fn family_defaults_and_override() {
        let s = SpecFile::from_json(
            r#"{"variables":[{"type":"family","family":"exponential","params":[1.0]}],
                "levy_constants":{"c1":5,"c2":4}}"#,
        )
        .unwrap();
        let seq = s.to_sequence().unwrap();
        assert!(seq.flags().positive);
        assert_eq!(seq.levy_constants(), Some(LevyConstants::IID_ALT));
        let back = SpecFile::from_sequence(&seq).to_sequence().unwrap();
        assert_eq!(back, seq);
    }
}
