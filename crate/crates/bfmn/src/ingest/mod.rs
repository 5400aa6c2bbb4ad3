//! Raw study-file ingestion: association/valence CSVs, MAS-IT scores,
//! participant cleaning and anxiety subgrouping.

mod resources;

pub use resources::{load_resources, LexicalResources, ResourceWarning};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sample tag decoded from a participant id prefix.
///
/// Ids follow the `gpt_oss_<sample>_<NNN>` / `<sample>_<NNN>` convention;
/// the trailing numeric index is stripped and an optional `gpt_oss_` prefix
/// marks simulated participants.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GroupTag {
    pub gpt: bool,
    pub sample: String,
}

impl GroupTag {
    pub fn parse(participant_id: &str) -> GroupTag {
        let id = participant_id.trim().to_lowercase();
        let (gpt, rest) = match id.strip_prefix("gpt_oss_") {
            Some(r) => (true, r),
            None => match id.strip_prefix("gpt_") {
                Some(r) => (true, r),
                None => (false, id.as_str()),
            },
        };
        // strip one trailing _<digits> participant index, if present
        let sample = match rest.rfind('_') {
            Some(pos) if rest[pos + 1..].chars().all(|c| c.is_ascii_digit())
                && !rest[pos + 1..].is_empty() =>
            {
                &rest[..pos]
            }
            _ => rest,
        };
        GroupTag {
            gpt,
            sample: sample.to_string(),
        }
    }
}

impl fmt::Display for GroupTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.gpt {
            write!(f, "gpt_{}", self.sample)
        } else {
            write!(f, "{}", self.sample)
        }
    }
}

/// One participant's cue row: up to three associations plus the valence
/// ratings given for the cue and the produced responses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssociationRecord {
    pub participant_id: String,
    pub group_tag: GroupTag,
    pub cue: String,
    pub responses: Vec<String>,
    /// word -> rating in 1..=5; keys are the cue and given responses only
    pub valences: BTreeMap<String, u8>,
}

impl AssociationRecord {
    /// Every (cue, response) pair of this row, self-pairs included.
    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.responses.iter().map(move |r| (self.cue.as_str(), r.as_str()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MasItScore {
    pub participant_id: String,
    pub item_scores: Vec<u8>,
    pub total: u32,
    pub factor_scores: BTreeMap<String, u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subgroup {
    LowAnxiety,
    HighAnxiety,
    Excluded,
    Unsplit,
}

impl fmt::Display for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Subgroup::LowAnxiety => "low",
            Subgroup::HighAnxiety => "high",
            Subgroup::Excluded => "excluded",
            Subgroup::Unsplit => "unsplit",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupAssignment {
    pub participant_id: String,
    pub subgroup: Subgroup,
}

/// Normalizes a word: lowercase, trimmed, internal whitespace collapsed to
/// single spaces. Accents and apostrophes are kept; n-grams stay one token.
pub fn normalize(word: &str) -> String {
    word.split_whitespace()
        .map(|w| w.to_lowercase())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Column names expected in an association CSV. Override via config when a
/// dataset uses different headers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ColumnSpec {
    pub participant_id: String,
    pub cue: String,
    pub responses: Vec<String>,
    pub valence_cue: String,
    pub valence_responses: Vec<String>,
}

impl Default for ColumnSpec {
    fn default() -> Self {
        ColumnSpec {
            participant_id: "participant_id".into(),
            cue: "cue".into(),
            responses: vec!["response_1".into(), "response_2".into(), "response_3".into()],
            valence_cue: "valence_cue".into(),
            valence_responses: vec![
                "valence_r1".into(),
                "valence_r2".into(),
                "valence_r3".into(),
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticKind {
    BadRating,
    DuplicateParticipantRow,
    OrphanRating,
}

/// Row-level parse problem. `BadRating` and `DuplicateParticipantRow`
/// reject the row; `OrphanRating` drops just the offending cell.
#[derive(Debug, Clone, Serialize)]
pub struct Diagnostic {
    pub line: usize,
    pub participant_id: String,
    pub kind: DiagnosticKind,
    pub message: String,
}

#[derive(Debug, Default)]
pub struct ParsedAssociations {
    pub records: Vec<AssociationRecord>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Parses an association CSV (UTF-8, comma-separated, header row).
///
/// Empty cells mean "missing". Rows with ratings outside 1..=5 or repeating
/// a (participant, cue) pair are rejected and reported in `diagnostics`.
pub fn parse_associations(path: &Path, spec: &ColumnSpec) -> Result<ParsedAssociations> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(path)?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };

    let idx_pid = col(&spec.participant_id)?;
    let idx_cue = col(&spec.cue)?;
    let idx_resp: Vec<usize> = spec
        .responses
        .iter()
        .map(|c| col(c))
        .collect::<Result<_>>()?;
    let idx_vcue = col(&spec.valence_cue)?;
    let idx_vresp: Vec<usize> = spec
        .valence_responses
        .iter()
        .map(|c| col(c))
        .collect::<Result<_>>()?;

    let mut out = ParsedAssociations::default();
    let mut seen: BTreeSet<(String, String)> = BTreeSet::new();

    for (row_no, row) in reader.records().enumerate() {
        let row = row?;
        let line = row_no + 2; // 1-based, after header
        let cell = |i: usize| row.get(i).unwrap_or("").trim();

        let participant_id = cell(idx_pid).to_string();
        let cue = normalize(cell(idx_cue));
        if participant_id.is_empty() || cue.is_empty() {
            continue;
        }

        if !seen.insert((participant_id.clone(), cue.clone())) {
            out.diagnostics.push(Diagnostic {
                line,
                participant_id,
                kind: DiagnosticKind::DuplicateParticipantRow,
                message: format!("cue `{cue}` repeated for this participant"),
            });
            continue;
        }

        let parse_rating = |raw: &str| -> std::result::Result<Option<u8>, String> {
            if raw.is_empty() {
                return Ok(None);
            }
            match raw.parse::<f64>() {
                Ok(v) if v.fract() == 0.0 && (1.0..=5.0).contains(&v) => Ok(Some(v as u8)),
                _ => Err(format!("rating `{raw}` outside 1..5")),
            }
        };

        let mut responses = Vec::new();
        let mut valences = BTreeMap::new();
        let mut bad: Option<String> = None;
        let mut orphans: Vec<String> = Vec::new();

        match parse_rating(cell(idx_vcue)) {
            Ok(Some(v)) => {
                valences.insert(cue.clone(), v);
            }
            Ok(None) => {}
            Err(msg) => bad = Some(msg),
        }

        for (slot, &ri) in idx_resp.iter().enumerate() {
            let word = normalize(cell(ri));
            let raw_rating = idx_vresp.get(slot).map(|&vi| cell(vi)).unwrap_or("");
            if word.is_empty() {
                if !raw_rating.is_empty() {
                    orphans.push(format!(
                        "rating `{raw_rating}` given for empty response slot {}",
                        slot + 1
                    ));
                }
                continue;
            }
            // kept verbatim, self-pairs included; the graph build drops those
            responses.push(word.clone());
            match parse_rating(raw_rating) {
                Ok(Some(v)) => {
                    valences.insert(word.clone(), v);
                }
                Ok(None) => {}
                Err(msg) => {
                    bad = Some(msg);
                    break;
                }
            }
        }

        if let Some(message) = bad {
            out.diagnostics.push(Diagnostic {
                line,
                participant_id,
                kind: DiagnosticKind::BadRating,
                message,
            });
            continue;
        }
        for message in orphans {
            out.diagnostics.push(Diagnostic {
                line,
                participant_id: participant_id.clone(),
                kind: DiagnosticKind::OrphanRating,
                message,
            });
        }

        let group_tag = GroupTag::parse(&participant_id);
        out.records.push(AssociationRecord {
            participant_id,
            group_tag,
            cue,
            responses,
            valences,
        });
    }
    Ok(out)
}

/// Parses a MAS-IT CSV: `participant_id` plus one column per item, in
/// header order. `factors` optionally maps factor names to 1-based item
/// indices to produce per-factor sums.
pub fn parse_mas_it(
    path: &Path,
    factors: Option<&BTreeMap<String, Vec<usize>>>,
) -> Result<Vec<MasItScore>> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let idx_pid = headers
        .iter()
        .position(|h| h.trim() == "participant_id")
        .ok_or_else(|| Error::MissingColumn("participant_id".into()))?;
    let item_cols: Vec<usize> = (0..headers.len()).filter(|&i| i != idx_pid).collect();
    if item_cols.is_empty() {
        return Err(Error::MissingColumn("item_*".into()));
    }

    let mut scores = Vec::new();
    for (row_no, row) in reader.records().enumerate() {
        let row = row?;
        let participant_id = row.get(idx_pid).unwrap_or("").trim().to_string();
        if participant_id.is_empty() {
            continue;
        }
        let mut item_scores = Vec::with_capacity(item_cols.len());
        for &i in &item_cols {
            let raw = row.get(i).unwrap_or("").trim();
            let v: u8 = raw.parse().map_err(|_| {
                Error::Data(format!(
                    "{}:{}: item value `{raw}` is not an integer",
                    path.display(),
                    row_no + 2
                ))
            })?;
            if !(1..=5).contains(&v) {
                return Err(Error::Data(format!(
                    "{}:{}: item value {v} outside 1..5",
                    path.display(),
                    row_no + 2
                )));
            }
            item_scores.push(v);
        }
        let total = item_scores.iter().map(|&v| v as u32).sum();
        let mut factor_scores = BTreeMap::new();
        if let Some(map) = factors {
            for (name, items) in map {
                let sum: u32 = items
                    .iter()
                    .filter_map(|&i| item_scores.get(i.wrapping_sub(1)))
                    .map(|&v| v as u32)
                    .sum();
                factor_scores.insert(name.clone(), sum);
            }
        }
        scores.push(MasItScore {
            participant_id,
            item_scores,
            total,
            factor_scores,
        });
    }
    Ok(scores)
}

/// A participant removed by the missing-data rule, with the numbers that
/// triggered the removal.
#[derive(Debug, Clone, Serialize)]
pub struct DroppedParticipant {
    pub participant_id: String,
    pub missing_cells: usize,
    pub expected_cells: usize,
    pub records: Vec<AssociationRecord>,
}

#[derive(Debug, Default)]
pub struct CleanOutcome {
    pub kept: Vec<AssociationRecord>,
    pub dropped: Vec<DroppedParticipant>,
}

/// Drops participants with at least 1/3 of their response cells missing.
///
/// Expected cells are 3 per cue; cues with no row at all count as three
/// missing responses. The 1/3 boundary itself is dropped.
pub fn clean_participants(records: Vec<AssociationRecord>, cue_set_size: usize) -> CleanOutcome {
    assert!(cue_set_size > 0, "cue_set_size must be positive");
    let expected_cells = 3 * cue_set_size;

    let mut per_participant: BTreeMap<String, Vec<AssociationRecord>> = BTreeMap::new();
    for r in records {
        per_participant
            .entry(r.participant_id.clone())
            .or_default()
            .push(r);
    }

    let mut outcome = CleanOutcome::default();
    for (participant_id, recs) in per_participant {
        let given: usize = recs.iter().map(|r| r.responses.len()).sum();
        let missing_cells = expected_cells.saturating_sub(given);
        if 3 * missing_cells >= expected_cells {
            outcome.dropped.push(DroppedParticipant {
                participant_id,
                missing_cells,
                expected_cells,
                records: recs,
            });
        } else {
            outcome.kept.extend(recs);
        }
    }
    outcome
}

/// Splits participants at the within-sample median total: strictly below is
/// low anxiety, strictly above is high, exactly at the median is excluded.
///
/// For even-sized samples the median is the midpoint of the two central
/// values; comparisons use doubled integer totals so no rounding occurs.
pub fn assign_subgroups(scores: &[MasItScore]) -> Vec<GroupAssignment> {
    assert!(!scores.is_empty(), "scores must be non-empty");
    let mut totals: Vec<u32> = scores.iter().map(|s| s.total).collect();
    totals.sort_unstable();
    let n = totals.len();
    let median_x2: u64 = if n % 2 == 1 {
        2 * totals[n / 2] as u64
    } else {
        totals[n / 2 - 1] as u64 + totals[n / 2] as u64
    };

    scores
        .iter()
        .map(|s| {
            let t2 = 2 * s.total as u64;
            let subgroup = match t2.cmp(&median_x2) {
                std::cmp::Ordering::Less => Subgroup::LowAnxiety,
                std::cmp::Ordering::Equal => Subgroup::Excluded,
                std::cmp::Ordering::Greater => Subgroup::HighAnxiety,
            };
            GroupAssignment {
                participant_id: s.participant_id.clone(),
                subgroup,
            }
        })
        .collect()
}

/// Counts every (cue, response) instance as an unordered pair, before any
/// deduplication. Kept outside the graph, which stays unweighted; the
/// renderer uses these counts for its minimum-frequency filter.
pub fn edge_frequency_table(
    records: &[AssociationRecord],
) -> BTreeMap<(String, String), u64> {
    let mut table = BTreeMap::new();
    for record in records {
        for (a, b) in record.pairs() {
            let key = if a <= b {
                (a.to_string(), b.to_string())
            } else {
                (b.to_string(), a.to_string())
            };
            *table.entry(key).or_insert(0) += 1;
        }
    }
    table
}
