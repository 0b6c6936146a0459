use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::detector::Label;
use crate::error::{Error, Result};

/// One line of a manifest: an EMB1 file with its label and grouping keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<Label>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub language: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
}

impl ManifestRecord {
    pub fn meta(&self) -> BTreeMap<String, String> {
        [
            ("language", &self.language),
            ("generator", &self.generator),
            ("domain", &self.domain),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
        .collect()
    }
}

/// Reads a JSON-lines manifest. Relative paths are resolved against the
/// manifest's directory. Blank lines and lines starting with `#` are skipped.
pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestRecord>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or_else(|| Path::new(""));
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut rec: ManifestRecord = serde_json::from_str(line).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            reason: e.to_string(),
        })?;
        if rec.path.is_relative() {
            rec.path = base.join(&rec.path);
        }
        records.push(rec);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_resolves() {
        let dir = tempfile::tempdir().unwrap();
        let m = dir.path().join("m.jsonl");
        fs::write(
            &m,
            "{\"path\":\"a.emb\",\"label\":\"human\",\"language\":\"en\"}\n\n# note\n\
             {\"path\":\"/abs/b.emb\",\"label\":\"generated\",\"generator\":\"gpt2\",\"domain\":\"wiki\"}\n",
        )
        .unwrap();
        let recs = read_manifest(&m).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].path, dir.path().join("a.emb"));
        assert_eq!(recs[0].label, Some(Label::Human));
        assert_eq!(recs[1].path, PathBuf::from("/abs/b.emb"));
        assert_eq!(recs[1].meta().len(), 2);
    }

    #[test]
    fn bad_label_names_line() {
        let dir = tempfile::tempdir().unwrap();
        let m = dir.path().join("m.jsonl");
        fs::write(&m, "{\"path\":\"a.emb\",\"label\":\"human\"}\n{\"path\":\"b\",\"label\":\"robot\"}\n").unwrap();
        match read_manifest(&m).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            e => panic!("{e}"),
        }
    }
}
