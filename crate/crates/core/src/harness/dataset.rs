//! Dataset ingestion.
//!
//! `triple_jsonl`: one JSON object per line,
//! `{"id": .., "nl": .., "fol": .., "ontology": {..} | "path/to/ontology.json"}`.
//!
//! `folio_like`: one story per line,
//! `{"story_id": .., "ontology": {..} | "path", "premises": [{"nl": .., "fol": ..}, ..]}`,
//! flattened into instances `<story_id>-<i>` (1-based) sharing the story's ontology.
//!
//! Ontology paths are relative to the dataset file. Records whose formula
//! contains XOR are dropped and counted.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::fol::{parse_formula, FolError, Instance, Ontology};

use super::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetFormat {
    #[default]
    TripleJsonl,
    FolioLike,
}

impl std::str::FromStr for DatasetFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('-', "_").as_str() {
            "triple_jsonl" | "jsonl" => Ok(DatasetFormat::TripleJsonl),
            "folio_like" | "folio" => Ok(DatasetFormat::FolioLike),
            other => Err(format!("unknown dataset format `{other}`")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub instances: Vec<Instance>,
    /// Records dropped because their formula contains XOR.
    pub dropped_xor: usize,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OntologyRef {
    Path(String),
    Inline(Box<Ontology>),
}

#[derive(Deserialize)]
struct TripleRecord {
    id: serde_json::Value,
    nl: String,
    fol: String,
    ontology: OntologyRef,
}

#[derive(Deserialize)]
struct Premise {
    nl: String,
    fol: String,
}

#[derive(Deserialize)]
struct StoryRecord {
    story_id: serde_json::Value,
    ontology: OntologyRef,
    premises: Vec<Premise>,
}

struct Loader {
    base: PathBuf,
    cache: HashMap<PathBuf, Arc<Ontology>>,
}

impl Loader {
    fn resolve(&mut self, r: OntologyRef, record: &str) -> Result<Arc<Ontology>, HarnessError> {
        match r {
            OntologyRef::Inline(o) => Ok(Arc::new(*o)),
            OntologyRef::Path(p) => {
                let path = self.base.join(p);
                if let Some(o) = self.cache.get(&path) {
                    return Ok(o.clone());
                }
                let o = Arc::new(Ontology::load(&path).map_err(|source| HarnessError::OntologyMismatch {
                    record: record.to_string(),
                    source,
                })?);
                self.cache.insert(path, o.clone());
                Ok(o)
            }
        }
    }
}

fn id_string(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Builds one instance; `Ok(None)` if the formula uses XOR.
fn make_instance(id: String, nl: String, fol: &str, ontology: Arc<Ontology>) -> Result<Option<Instance>, HarnessError> {
    let formula = match parse_formula(fol, ontology.signature()) {
        Ok(f) => f,
        Err(FolError::XorNotAllowed { .. }) => return Ok(None),
        Err(source @ FolError::Syntax { .. }) => return Err(HarnessError::ParseFailure { record: id, source }),
        Err(source) => return Err(HarnessError::OntologyMismatch { record: id, source }),
    };
    Instance::new(id.clone(), nl, formula, ontology)
        .map(Some)
        .map_err(|source| HarnessError::OntologyMismatch { record: id, source })
}

pub fn ingest_dataset(path: impl AsRef<Path>, format: DatasetFormat) -> Result<Dataset, HarnessError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    ingest_str(&text, format, &base)
}

/// Ingests dataset text; ontology paths resolve against `base`.
pub fn ingest_str(text: &str, format: DatasetFormat, base: &Path) -> Result<Dataset, HarnessError> {
    let mut loader = Loader {
        base: base.to_path_buf(),
        cache: HashMap::new(),
    };
    let mut instances = Vec::new();
    let mut dropped_xor = 0;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let bad_json = |e: serde_json::Error| HarnessError::BadRecord {
            line: lineno + 1,
            message: e.to_string(),
        };
        let mut push = |inst: Option<Instance>| match inst {
            Some(i) => instances.push(i),
            None => dropped_xor += 1,
        };
        match format {
            DatasetFormat::TripleJsonl => {
                let r: TripleRecord = serde_json::from_str(line).map_err(bad_json)?;
                let id = id_string(&r.id);
                let ontology = loader.resolve(r.ontology, &id)?;
                push(make_instance(id, r.nl, &r.fol, ontology)?);
            }
            DatasetFormat::FolioLike => {
                let r: StoryRecord = serde_json::from_str(line).map_err(bad_json)?;
                let story = id_string(&r.story_id);
                let ontology = loader.resolve(r.ontology, &story)?;
                for (i, p) in r.premises.into_iter().enumerate() {
                    push(make_instance(format!("{story}-{}", i + 1), p.nl, &p.fol, ontology.clone())?);
                }
            }
        }
    }
    if dropped_xor > 0 {
        log::info!("dropped {dropped_xor} record(s) containing XOR");
    }
    Ok(Dataset { instances, dropped_xor })
}

#[derive(Serialize)]
struct TripleOut<'a> {
    id: &'a str,
    nl: &'a str,
    fol: String,
    ontology: &'a Ontology,
}

/// Serializes instances as `triple_jsonl` with inline ontologies.
pub fn to_triple_jsonl(instances: &[Instance]) -> String {
    let mut out = String::new();
    for i in instances {
        let rec = TripleOut {
            id: &i.id,
            nl: &i.utterance,
            fol: i.formula.to_string(),
            ontology: &i.ontology,
        };
        out.push_str(&serde_json::to_string(&rec).expect("records serialize"));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONTO: &str = concat!(
        r#"{"predicates": {"P": {"arity": 1, "positive": "x1 is p", "negative": "x1 is not p"}, "#,
        r#""Q": {"arity": 1, "positive": "x1 is q", "negative": "x1 is not q"}}, "constants": {"a": "Ann"}}"#
    );

    #[test]
    fn triples_drop_xor() {
        let text = [
            format!(r#"{{"id": "1", "nl": "Ann is p.", "fol": "P(a)", "ontology": {ONTO}}}"#),
            format!(r#"{{"id": 2, "nl": "Exactly one.", "fol": "P(a) ⊕ Q(a)", "ontology": {ONTO}}}"#),
            format!(r#"{{"id": "3", "nl": "All p are q.", "fol": "∀x (P(x) → Q(x))", "ontology": {ONTO}}}"#),
        ]
        .join("\n");
        let d = ingest_str(&text, DatasetFormat::TripleJsonl, Path::new(".")).unwrap();
        assert_eq!(d.instances.len(), 2);
        assert_eq!(d.dropped_xor, 1);
        assert_eq!(d.instances[1].id, "3");
    }

    #[test]
    fn stories_share_ontology() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("o.json"), ONTO).unwrap();
        let premises: Vec<String> = (0..5).map(|_| r#"{"nl": "n", "fol": "P(a)"}"#.to_string()).collect();
        let text = format!(r#"{{"story_id": 8, "ontology": "o.json", "premises": [{}]}}"#, premises.join(","));
        let file = dir.path().join("d.jsonl");
        std::fs::write(&file, text).unwrap();
        let d = ingest_dataset(&file, DatasetFormat::FolioLike).unwrap();
        assert_eq!(d.instances.len(), 5);
        assert_eq!(d.instances[4].id, "8-5");
        assert!(d.instances.iter().all(|i| Arc::ptr_eq(&i.ontology, &d.instances[0].ontology)));
    }

    #[test]
    fn malformed_formula_names_record() {
        let text = format!(r#"{{"id": "bad", "nl": "", "fol": "P(a) ∧", "ontology": {ONTO}}}"#);
        match ingest_str(&text, DatasetFormat::TripleJsonl, Path::new(".")) {
            Err(HarnessError::ParseFailure { record, .. }) => assert_eq!(record, "bad"),
            other => panic!("{other:?}"),
        }
        let text = format!(r#"{{"id": "unk", "nl": "", "fol": "R(a)", "ontology": {ONTO}}}"#);
        assert!(matches!(
            ingest_str(&text, DatasetFormat::TripleJsonl, Path::new(".")),
            Err(HarnessError::OntologyMismatch { .. })
        ));
    }

    #[test]
    fn round_trip() {
        let text = format!(r#"{{"id": "1", "nl": "Ann is p.", "fol": "P(a) ∧ ¬Q(a)", "ontology": {ONTO}}}"#);
        let d = ingest_str(&text, DatasetFormat::TripleJsonl, Path::new(".")).unwrap();
        let again = ingest_str(&to_triple_jsonl(&d.instances), DatasetFormat::TripleJsonl, Path::new(".")).unwrap();
        assert_eq!(again.instances, d.instances);
    }
}
