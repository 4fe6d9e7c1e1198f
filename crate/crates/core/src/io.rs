//! Set files.
//!
//! A set file is either a bare JSON list of elements or an object with an
//! `elements` list and optional `family`, `params` and `seed`. An element
//! is a factored rational `{"sign": 1, "factors": {"2": 3}}` or an integer
//! `{"int": "360"}`, factored on ingestion. `{"int": "0"}` is accepted as
//! an unfactored zero.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rug::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factored::{factor, FactoredRational};
use crate::prime::DEFAULT_FACTOR_BOUND;
use crate::rational::ExactRational;
use crate::set::FiniteSet;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementJson {
    Int {
        int: String,
    },
    Factored(FactoredRational),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub elements: Vec<ElementJson>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AnySetFile {
    Object(SetFile),
    List(Vec<ElementJson>),
}

/// A parsed set plus the metadata it was stored with.
#[derive(Clone, Debug)]
pub struct LoadedSet {
    pub set: FiniteSet,
    pub family: Option<String>,
    pub params: Option<String>,
    pub seed: Option<u64>,
}

fn element_value(e: &ElementJson, bound: u64) -> Result<Option<FactoredRational>> {
    match e {
        ElementJson::Factored(f) => Ok(Some(f.clone())),
        ElementJson::Int { int } => {
            let n: Integer = int
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("not an integer: {int:?}")))?;
            if n == 0 {
                Ok(None)
            } else {
                Ok(Some(factor(&ExactRational::from_integer(n), bound)?))
            }
        }
    }
}

/// Builds the set; any zero element drops the attached factorizations.
pub fn set_from_elements(elements: &[ElementJson], bound: u64) -> Result<FiniteSet> {
    let values = elements
        .iter()
        .map(|e| element_value(e, bound))
        .collect::<Result<Vec<_>>>()?;
    if values.iter().any(Option::is_none) {
        Ok(FiniteSet::from_values(values.into_iter().map(|v| match v {
            Some(f) => f.to_exact(),
            None => ExactRational::zero(),
        })))
    } else {
        Ok(FiniteSet::from_factored(values.into_iter().flatten()))
    }
}

pub fn read_set<R: Read>(reader: R, bound: u64) -> Result<LoadedSet> {
    let any: AnySetFile = serde_json::from_reader(reader)?;
    let file = match any {
        AnySetFile::Object(f) => f,
        AnySetFile::List(elements) => SetFile {
            family: None,
            params: None,
            seed: None,
            elements,
        },
    };
    Ok(LoadedSet {
        set: set_from_elements(&file.elements, bound)?,
        family: file.family,
        params: file.params,
        seed: file.seed,
    })
}

pub fn read_set_file(path: &Path) -> Result<LoadedSet> {
    read_set(BufReader::new(File::open(path)?), DEFAULT_FACTOR_BOUND)
}

/// Canonical elements in ascending value order; factored wherever possible.
pub fn elements_json(set: &FiniteSet) -> Result<Vec<ElementJson>> {
    match set.factorizations() {
        Some(f) => Ok(f.iter().cloned().map(ElementJson::Factored).collect()),
        None => set
            .iter()
            .map(|x| {
                if x.is_zero() {
                    Ok(ElementJson::Int { int: "0".into() })
                } else {
                    Ok(ElementJson::Factored(factor(x, DEFAULT_FACTOR_BOUND)?))
                }
            })
            .collect(),
    }
}

pub fn write_set<W: Write>(
    set: &FiniteSet,
    family: Option<&str>,
    params: Option<&str>,
    seed: Option<u64>,
    mut out: W,
) -> Result<()> {
    let file = SetFile {
        family: family.map(str::to_string),
        params: params.map(str::to_string),
        seed,
        elements: elements_json(set)?,
    };
    serde_json::to_writer_pretty(&mut out, &file)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn write_set_file(
    path: &Path,
    set: &FiniteSet,
    family: Option<&str>,
    params: Option<&str>,
    seed: Option<u64>,
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_set(set, family, params, seed, &mut w)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_mixed_elements() {
        let text = r#"{"family":"explicit","elements":[{"int":"360"},{"sign":-1,"factors":{"2":-1}}]}"#;
        let loaded = read_set(text.as_bytes(), 1000).unwrap();
        assert_eq!(loaded.family.as_deref(), Some("explicit"));
        let set = loaded.set;
        assert_eq!(set.elements(), &["-1/2".parse().unwrap(), ExactRational::from(360)]);
        assert_eq!(set.max_omega().unwrap(), 3);
    }

    #[test]
    fn bare_list_and_zero() {
        let loaded = read_set(r#"[{"int":"0"},{"int":"5"}]"#.as_bytes(), 100).unwrap();
        assert!(loaded.set.contains_zero());
        assert!(loaded.set.factorizations().is_none());
        assert!(read_set(r#"[{"int":"abc"}]"#.as_bytes(), 100).is_err());
        assert!(matches!(
            read_set(r#"[{"int":"1000003"}]"#.as_bytes(), 100),
            Err(Error::UnfactoredResidue { .. })
        ));
    }

    #[test]
    fn canonical_round_trip() {
        let set = FiniteSet::from_integers([12, -3, 5]).with_factorizations(100).unwrap();
        let mut buf = Vec::new();
        write_set(&set, Some("explicit"), None, Some(3), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains(r#""factors": {"#));
        let back = read_set(text.as_bytes(), 100).unwrap();
        assert_eq!(back.set, set);
        assert_eq!(back.seed, Some(3));
    }
}
