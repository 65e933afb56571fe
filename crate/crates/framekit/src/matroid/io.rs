//! Matroid file format: a JSON document with `ground` and `circuits`.
//!
//! The writer sorts every circuit's elements lexicographically and the
//! circuit list itself lexicographically, so serialization is byte-stable.

use serde::{Deserialize, Serialize};

use super::{Matroid, MatroidError};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatroidDoc {
    pub ground: Vec<String>,
    pub circuits: Vec<Vec<String>>,
}

impl Matroid {
    pub fn to_doc(&self) -> MatroidDoc {
        let mut circuits = self.named_circuits();
        for c in &mut circuits {
            c.sort();
        }
        circuits.sort();
        MatroidDoc {
            ground: self.ground().to_vec(),
            circuits,
        }
    }

    pub fn from_doc(doc: &MatroidDoc) -> Result<Self, MatroidError> {
        Matroid::from_circuits(doc.ground.clone(), doc.circuits.clone())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("matroid docs serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, MatroidError> {
        let doc: MatroidDoc =
            serde_json::from_str(text).map_err(|e| MatroidError::Parse(e.to_string()))?;
        Matroid::from_doc(&doc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::uniform;

    #[test]
    fn json_roundtrip_is_byte_stable() {
        let m = uniform(2, 4);
        let j1 = m.to_json();
        let back = Matroid::from_json(&j1).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_json(), j1);
    }

    #[test]
    fn parse_failure_is_reported() {
        assert!(Matroid::from_json("{not json").is_err());
    }
}
