//! Lexical resource files: lemma map, emotion lexicon, concreteness norms,
//! optional translation map.
//!
//! All files are UTF-8 with one entry per line. Fields are tab-separated;
//! comma-separated lines are accepted too for single-word keys. Lines
//! starting with `#` are skipped. Multi-word entries ("computer science")
//! are atomic keys.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::ingest::normalize;

/// The eight lexicon emotions, in canonical column order.
pub const EMOTION_COLUMNS: usize = 8;

#[derive(Debug, Clone, Default)]
pub struct LexicalResources {
    /// surface form -> lemma
    pub lemma_map: BTreeMap<String, String>,
    /// lemma -> bitmask over the 8 emotions, canonical order
    pub emotion_lexicon: BTreeMap<String, u8>,
    /// lemma -> concreteness score on the 1..5 norm scale
    pub concreteness_norms: BTreeMap<String, f64>,
    /// source word -> display word, for plots
    pub translation_map: BTreeMap<String, String>,
}

#[derive(Debug, Clone)]
pub struct ResourceWarning {
    pub file: String,
    pub line: usize,
    pub message: String,
}

impl LexicalResources {
    /// Maps a (normalized) surface form to its lemma; unknown forms are
    /// their own lemma.
    pub fn lemma<'a>(&'a self, word: &'a str) -> &'a str {
        self.lemma_map.get(word).map(String::as_str).unwrap_or(word)
    }

    pub fn display<'a>(&'a self, word: &'a str) -> &'a str {
        self.translation_map
            .get(word)
            .map(String::as_str)
            .unwrap_or(word)
    }
}

/// Loads all lexical resources. Duplicate keys resolve last-wins and are
/// reported as warnings.
pub fn load_resources(
    lemma_path: &Path,
    emotion_path: &Path,
    concreteness_path: &Path,
    translation_path: Option<&Path>,
) -> Result<(LexicalResources, Vec<ResourceWarning>)> {
    let mut res = LexicalResources::default();
    let mut warnings = Vec::new();

    load_pairs(lemma_path, &mut res.lemma_map, &mut warnings)?;
    load_emotions(emotion_path, &mut res.emotion_lexicon, &mut warnings)?;
    load_norms(concreteness_path, &mut res.concreteness_norms, &mut warnings)?;
    if let Some(path) = translation_path {
        load_pairs(path, &mut res.translation_map, &mut warnings)?;
    }
    Ok((res, warnings))
}

fn split_fields(line: &str) -> Vec<&str> {
    if line.contains('\t') {
        line.split('\t').map(str::trim).collect()
    } else {
        line.split(',').map(str::trim).collect()
    }
}

fn warn_duplicate(
    warnings: &mut Vec<ResourceWarning>,
    path: &Path,
    line: usize,
    key: &str,
) {
    warnings.push(ResourceWarning {
        file: path.display().to_string(),
        line,
        message: format!("duplicate entry `{key}`, keeping the later one"),
    });
}

fn load_pairs(
    path: &Path,
    map: &mut BTreeMap<String, String>,
    warnings: &mut Vec<ResourceWarning>,
) -> Result<()> {
    for (no, line) in fs::read_to_string(path)?.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields = split_fields(line);
        if fields.len() != 2 || fields[0].is_empty() || fields[1].is_empty() {
            return Err(Error::BadResourceRow {
                path: path.to_path_buf(),
                line: no + 1,
                msg: format!("expected two fields, got {}", fields.len()),
            });
        }
        let key = normalize(fields[0]);
        if map.insert(key.clone(), normalize(fields[1])).is_some() {
            warn_duplicate(warnings, path, no + 1, &key);
        }
    }
    Ok(())
}

fn load_emotions(
    path: &Path,
    map: &mut BTreeMap<String, u8>,
    warnings: &mut Vec<ResourceWarning>,
) -> Result<()> {
    for (no, line) in fs::read_to_string(path)?.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields = split_fields(line);
        if fields.len() != EMOTION_COLUMNS + 1 {
            return Err(Error::BadFlagRow {
                got: fields.len().saturating_sub(1),
                path: path.to_path_buf(),
                line: no + 1,
            });
        }
        let mut mask: u8 = 0;
        for (bit, raw) in fields[1..].iter().enumerate() {
            match *raw {
                "0" => {}
                "1" => mask |= 1 << bit,
                _ => {
                    return Err(Error::BadFlagRow {
                        got: fields.len() - 1,
                        path: path.to_path_buf(),
                        line: no + 1,
                    })
                }
            }
        }
        let key = normalize(fields[0]);
        if map.insert(key.clone(), mask).is_some() {
            warn_duplicate(warnings, path, no + 1, &key);
        }
    }
    Ok(())
}

fn load_norms(
    path: &Path,
    map: &mut BTreeMap<String, f64>,
    warnings: &mut Vec<ResourceWarning>,
) -> Result<()> {
    for (no, line) in fs::read_to_string(path)?.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields = split_fields(line);
        if fields.len() != 2 {
            return Err(Error::BadResourceRow {
                path: path.to_path_buf(),
                line: no + 1,
                msg: format!("expected word and score, got {} fields", fields.len()),
            });
        }
        let score: f64 = fields[1].parse().map_err(|_| Error::BadResourceRow {
            path: path.to_path_buf(),
            line: no + 1,
            msg: format!("score `{}` is not a number", fields[1]),
        })?;
        if !score.is_finite() || !(1.0..=5.0).contains(&score) {
            return Err(Error::BadScore {
                score,
                path: path.to_path_buf(),
                line: no + 1,
            });
        }
        let key = normalize(fields[0]);
        if map.insert(key.clone(), score).is_some() {
            warn_duplicate(warnings, path, no + 1, &key);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn emotion_row_maps_flags() {
        let lemmas = file("matematiche\tmatematica\n");
        let emotions = file("gioia,1,0,0,0,0,0,0,1\n");
        let norms = file("casa\t4.9\n");
        let (res, warnings) =
            load_resources(lemmas.path(), emotions.path(), norms.path(), None).unwrap();
        assert!(warnings.is_empty());
        // joy is bit 0, anticipation bit 7
        assert_eq!(res.emotion_lexicon["gioia"], 0b1000_0001);
        assert_eq!(res.lemma("matematiche"), "matematica");
        assert_eq!(res.lemma("sconosciuta"), "sconosciuta");
    }

    #[test]
    fn out_of_scale_score_rejected() {
        let lemmas = file("");
        let emotions = file("");
        let norms = file("idea\t7.2\n");
        let err = load_resources(lemmas.path(), emotions.path(), norms.path(), None).unwrap_err();
        assert!(matches!(err, Error::BadScore { score, .. } if score == 7.2));
    }

    #[test]
    fn bad_flag_row_rejected() {
        let lemmas = file("");
        let emotions = file("gioia,1,0,1\n");
        let norms = file("");
        let err = load_resources(lemmas.path(), emotions.path(), norms.path(), None).unwrap_err();
        assert!(matches!(err, Error::BadFlagRow { got: 3, .. }));
    }

    #[test]
    fn duplicates_resolve_last_wins_with_warning() {
        let lemmas = file("forme\tforma\nforme\tformare\n");
        let emotions = file("");
        let norms = file("");
        let (res, warnings) =
            load_resources(lemmas.path(), emotions.path(), norms.path(), None).unwrap();
        assert_eq!(res.lemma("forme"), "formare");
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn multiword_keys_are_atomic() {
        let lemmas = file("");
        let emotions = file("");
        let norms = file("computer science\t3.5\nidea\t1.5\n");
        let translations = file("informatica\tcomputer science\n");
        let (res, _) = load_resources(
            lemmas.path(),
            emotions.path(),
            norms.path(),
            Some(translations.path()),
        )
        .unwrap();
        assert_eq!(res.concreteness_norms["computer science"], 3.5);
        assert_eq!(res.display("informatica"), "computer science");
    }
}
