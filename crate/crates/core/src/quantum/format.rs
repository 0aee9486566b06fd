//! Protocol files: JSON with complex entries as `[re, im]` pairs.

use serde::{Deserialize, Serialize};

use super::{CCProtocol, Protocol, QCProtocol};
use crate::error::{Error, Result};
use crate::matrix::{c, CMatrix};

type JsonMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolFile {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(rename = "dimA")]
    pub dim_a: usize,
    #[serde(rename = "dimB")]
    pub dim_b: usize,
    pub state: JsonMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alice: Option<Vec<Vec<JsonMatrix>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus: Option<Vec<Vec<JsonMatrix>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub readout: Option<Vec<JsonMatrix>>,
    pub bob: Vec<Vec<JsonMatrix>>,
}

fn to_json(m: &CMatrix) -> JsonMatrix {
    m.to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

fn from_json(m: &JsonMatrix) -> Result<CMatrix> {
    let rows: Vec<Vec<_>> = m
        .iter()
        .map(|r| r.iter().map(|&[a, b]| c(a, b)).collect())
        .collect();
    CMatrix::from_rows(&rows).map_err(|e| Error::Parse(e.to_string()))
}

fn list_to_json(l: &[CMatrix]) -> Vec<JsonMatrix> {
    l.iter().map(to_json).collect()
}

fn list_from_json(l: &[JsonMatrix]) -> Result<Vec<CMatrix>> {
    l.iter().map(from_json).collect()
}

fn nested_from_json(l: &[Vec<JsonMatrix>]) -> Result<Vec<Vec<CMatrix>>> {
    l.iter().map(|v| list_from_json(v)).collect()
}

impl From<&Protocol> for ProtocolFile {
    fn from(p: &Protocol) -> Self {
        match p {
            Protocol::Cc(p) => ProtocolFile {
                kind: "cc".into(),
                dim_a: p.dim_a,
                dim_b: p.dim_b,
                state: to_json(&p.state),
                alice: Some(p.alice.iter().map(|v| list_to_json(v)).collect()),
                kraus: None,
                readout: None,
                bob: p.bob.iter().map(|v| list_to_json(v)).collect(),
            },
            Protocol::Qc(p) => ProtocolFile {
                kind: "qc".into(),
                dim_a: p.dim_a,
                dim_b: p.dim_b,
                state: to_json(&p.state),
                alice: None,
                kraus: Some(p.kraus.iter().map(|v| list_to_json(v)).collect()),
                readout: Some(list_to_json(&p.readout)),
                bob: p.bob.iter().map(|v| list_to_json(v)).collect(),
            },
        }
    }
}

impl ProtocolFile {
    pub fn into_protocol(&self) -> Result<Protocol> {
        let missing = |f: &str| Error::Parse(format!("`{}` protocol without `{f}`", self.kind));
        let state = from_json(&self.state)?;
        let bob = nested_from_json(&self.bob)?;
        let p = match self.kind.as_str() {
            "cc" => Protocol::Cc(CCProtocol {
                dim_a: self.dim_a,
                dim_b: self.dim_b,
                state,
                alice: nested_from_json(self.alice.as_ref().ok_or_else(|| missing("alice"))?)?,
                bob,
            }),
            "qc" => Protocol::Qc(QCProtocol {
                dim_a: self.dim_a,
                dim_b: self.dim_b,
                state,
                kraus: nested_from_json(self.kraus.as_ref().ok_or_else(|| missing("kraus"))?)?,
                readout: list_from_json(self.readout.as_ref().ok_or_else(|| missing("readout"))?)?,
                bob,
            }),
            other => return Err(Error::Parse(format!("unknown protocol type `{other}`"))),
        };
        p.validate()?;
        Ok(p)
    }
}

impl Protocol {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&ProtocolFile::from(self)).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Protocol> {
        serde_json::from_str::<ProtocolFile>(text)?.into_protocol()
    }
}
