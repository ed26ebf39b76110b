//! JSON documents exchanged with the outside world: decision inputs and
//! certificates. All documents carry `"schema": "arbor/1"`.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::descent::{Certificate, Outcome, TraceStep, MAX_TUPLE};
use crate::error::{ArborError, Result};
use crate::exact::{Mat2, Prime};
use crate::isometry::Word;

pub const SCHEMA: &str = "arbor/1";

fn default_schema() -> String {
    SCHEMA.to_string()
}

/// `{"p": 7, "generators": [[["129/49","-178/49"],["6/49","31/147"]], …]}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecideInput {
    #[serde(default = "default_schema")]
    pub schema: String,
    pub p: Prime,
    pub generators: Vec<Mat2>,
}

impl DecideInput {
    pub fn new(p: Prime, generators: Vec<Mat2>) -> Self {
        DecideInput {
            schema: default_schema(),
            p,
            generators,
        }
    }
}

/// Parses JSON, reporting the failing field path and position.
pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        ArborError::Input {
            path,
            message: inner.to_string(),
        }
    })
}

fn check_schema(schema: &str) -> Result<()> {
    if schema != SCHEMA {
        return Err(ArborError::Input {
            path: "schema".into(),
            message: format!("unsupported schema {schema:?}, expected {SCHEMA:?}"),
        });
    }
    Ok(())
}

/// Parses and validates a decision input: known schema, prime `p`, between
/// 1 and [`MAX_TUPLE`] generators, all of determinant 1.
pub fn parse_input(text: &str) -> Result<DecideInput> {
    let input: DecideInput = parse_json(text)?;
    check_schema(&input.schema)?;
    if input.generators.is_empty() || input.generators.len() > MAX_TUPLE {
        return Err(ArborError::Input {
            path: "generators".into(),
            message: format!(
                "expected between 1 and {MAX_TUPLE} generators, got {}",
                input.generators.len()
            ),
        });
    }
    for (i, g) in input.generators.iter().enumerate() {
        let det = g.det();
        if !det.is_one() {
            return Err(ArborError::Input {
                path: format!("generators[{i}]"),
                message: format!("determinant is {det}, expected 1"),
            });
        }
    }
    Ok(input)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResultKind {
    FreeDiscrete,
    NotFreeDiscrete,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TupleEntry {
    pub matrix: Mat2,
    pub word: Word,
}

/// Wire form of a [`Certificate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateJson {
    pub schema: String,
    pub result: ResultKind,
    pub p: Prime,
    pub generators: Vec<Mat2>,
    #[serde(rename = "initial_L")]
    pub initial_l: u64,
    pub witness_word: Option<Word>,
    pub witness_matrix: Option<Mat2>,
    /// 1-based slot of the witness in the tuple it was found in.
    pub witness_index: Option<usize>,
    pub final_tuple: Option<Vec<TupleEntry>>,
    pub trace: Vec<TraceStep>,
    /// Set for free results on more than three generators, whose ping-pong
    /// property is not guaranteed by minimality alone.
    pub conditional: bool,
}

impl From<&Certificate> for CertificateJson {
    fn from(c: &Certificate) -> Self {
        let mut out = CertificateJson {
            schema: default_schema(),
            result: ResultKind::FreeDiscrete,
            p: c.p,
            generators: c.generators.clone(),
            initial_l: c.initial_l,
            witness_word: None,
            witness_matrix: None,
            witness_index: None,
            final_tuple: None,
            trace: c.trace.clone(),
            conditional: c.is_conditional(),
        };
        match &c.outcome {
            Outcome::FreeDiscrete { final_tuple } => {
                out.final_tuple = Some(
                    final_tuple
                        .elements()
                        .iter()
                        .map(|e| TupleEntry {
                            matrix: e.isometry.matrix().clone(),
                            word: e.word.clone(),
                        })
                        .collect(),
                );
            }
            Outcome::NotFreeDiscrete { witness, index } => {
                out.result = ResultKind::NotFreeDiscrete;
                out.witness_word = Some(witness.word.clone());
                out.witness_matrix = Some(witness.isometry.matrix().clone());
                out.witness_index = Some(index + 1);
            }
        }
        out
    }
}

pub fn parse_certificate(text: &str) -> Result<CertificateJson> {
    let cert: CertificateJson = parse_json(text)?;
    check_schema(&cert.schema)?;
    Ok(cert)
}
