//! JSON artifacts: spaces, vectors and matrices as canonical records, tagged by kind.

use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

use crate::families::{FamilyError, Matrix, MatrixRecord, Vector, VectorRecord};
use crate::pcr::Carrier;
use crate::spaces::{SpaceError, SpaceRecord, SpaceRepr};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("expected a {expected} artifact, found {found}")]
    Kind { expected: &'static str, found: &'static str },
    #[error("carrier mismatch: expected {expected}, file holds {found}")]
    Carrier { expected: String, found: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Artifact {
    Space(SpaceRecord),
    Vector(VectorRecord),
    Matrix(MatrixRecord),
}

impl Artifact {
    fn kind(&self) -> &'static str {
        match self {
            Artifact::Space(_) => "space",
            Artifact::Vector(_) => "vector",
            Artifact::Matrix(_) => "matrix",
        }
    }

    fn carrier(&self) -> Carrier {
        match self {
            Artifact::Space(s) => s.model.carrier(),
            Artifact::Vector(v) => v.carrier,
            Artifact::Matrix(m) => m.carrier,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("artifact serializes")
    }

    pub fn from_json(s: &str) -> Result<Artifact, IoError> {
        Ok(serde_json::from_str(s)?)
    }

    /// Reject an artifact over a different carrier than the caller works in.
    pub fn expect_carrier(self, c: Carrier) -> Result<Artifact, IoError> {
        if self.carrier() != c {
            return Err(IoError::Carrier { expected: c.tag().into(), found: self.carrier().tag().into() });
        }
        Ok(self)
    }
}

pub fn write(path: &Path, a: &Artifact) -> Result<(), IoError> {
    std::fs::write(path, a.to_json())?;
    Ok(())
}

pub fn read(path: &Path) -> Result<Artifact, IoError> {
    Artifact::from_json(&std::fs::read_to_string(path)?)
}

pub fn save_space(path: &Path, s: &SpaceRepr) -> Result<(), IoError> {
    write(path, &Artifact::Space(s.to_record()))
}

pub fn save_vector(path: &Path, v: &Vector) -> Result<(), IoError> {
    write(path, &Artifact::Vector(v.to_record()))
}

pub fn save_matrix(path: &Path, m: &Matrix) -> Result<(), IoError> {
    write(path, &Artifact::Matrix(m.to_record()))
}

pub fn load_space(path: &Path, c: Carrier) -> Result<SpaceRepr, IoError> {
    match read(path)?.expect_carrier(c)? {
        Artifact::Space(r) => Ok(SpaceRepr::from_record(&r)?),
        other => Err(IoError::Kind { expected: "space", found: other.kind() }),
    }
}

pub fn load_vector(path: &Path, c: Carrier) -> Result<Vector, IoError> {
    match read(path)?.expect_carrier(c)? {
        Artifact::Vector(r) => Ok(Vector::from_record(&r)?),
        other => Err(IoError::Kind { expected: "vector", found: other.kind() }),
    }
}

pub fn load_matrix(path: &Path, c: Carrier) -> Result<Matrix, IoError> {
    match read(path)?.expect_carrier(c)? {
        Artifact::Matrix(r) => Ok(Matrix::from_record(&r)?),
        other => Err(IoError::Kind { expected: "matrix", found: other.kind() }),
    }
}
