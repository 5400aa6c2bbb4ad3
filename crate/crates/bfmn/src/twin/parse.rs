//! Parsing of structured model replies into association records.
//!
//! The model is asked to answer each cue with a JSON object:
//! `{"associazioni": ["w1", "w2", "w3"], "valenze": {"<word>": 1-5}}`.
//! Replies may wrap the object in prose or code fences; the first balanced
//! JSON object found is parsed.

use std::collections::BTreeMap;

use crate::ingest::{normalize, AssociationRecord, GroupTag};

pub const MAX_RESPONSES: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedCue {
    pub responses: Vec<String>,
    pub valences: BTreeMap<String, u8>,
    pub warnings: Vec<String>,
}

/// Maps a rating cell to the 1..5 scale: integers, numeric strings, or
/// Likert words in Italian and English. `None` means unmappable (the word
/// stays unrated).
pub fn likert_value(raw: &serde_json::Value) -> Option<u8> {
    match raw {
        serde_json::Value::Number(n) => {
            let v = n.as_f64()?;
            if v.fract() == 0.0 && (1.0..=5.0).contains(&v) {
                Some(v as u8)
            } else {
                None
            }
        }
        serde_json::Value::String(s) => {
            let s = normalize(s);
            if let Ok(v) = s.parse::<f64>() {
                return if v.fract() == 0.0 && (1.0..=5.0).contains(&v) {
                    Some(v as u8)
                } else {
                    None
                };
            }
            match s.as_str() {
                "molto negativo" | "molto negativa" | "very negative" => Some(1),
                "negativo" | "negativa" | "negative" => Some(2),
                "neutro" | "neutra" | "neutrale" | "neutral" => Some(3),
                "positivo" | "positiva" | "positive" => Some(4),
                "molto positivo" | "molto positiva" | "very positive" => Some(5),
                _ => None,
            }
        }
        _ => None,
    }
}

fn first_json_object(text: &str) -> Option<&str> {
    let start = text.find('{')?;
    let mut depth = 0usize;
    let mut in_string = false;
    let mut escaped = false;
    for (i, c) in text[start..].char_indices() {
        if in_string {
            if escaped {
                escaped = false;
            } else if c == '\\' {
                escaped = true;
            } else if c == '"' {
                in_string = false;
            }
            continue;
        }
        match c {
            '"' => in_string = true,
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth == 0 {
                    return Some(&text[start..start + i + 1]);
                }
            }
            _ => {}
        }
    }
    None
}

/// Parses one model reply for `cue`. Errors mean the reply is structurally
/// malformed and worth a retry; recoverable oddities (extra associations,
/// word ratings, ratings for unknown words) are handled with warnings.
pub fn parse_reply(cue: &str, reply: &str) -> Result<ParsedCue, String> {
    let object = first_json_object(reply).ok_or("no JSON object in reply")?;
    let value: serde_json::Value =
        serde_json::from_str(object).map_err(|e| format!("invalid JSON: {e}"))?;

    let assoc = value
        .get("associazioni")
        .or_else(|| value.get("associations"))
        .ok_or("missing `associazioni` field")?
        .as_array()
        .ok_or("`associazioni` is not an array")?;

    let cue = normalize(cue);
    let mut warnings = Vec::new();
    let mut responses: Vec<String> = Vec::new();
    for item in assoc {
        let word = match item.as_str() {
            Some(w) => normalize(w),
            None => {
                warnings.push(format!("non-string association `{item}` skipped"));
                continue;
            }
        };
        if word.is_empty() {
            continue;
        }
        responses.push(word);
    }
    if responses.len() > MAX_RESPONSES {
        warnings.push(format!(
            "reply gave {} associations, keeping the first {MAX_RESPONSES}",
            responses.len()
        ));
        responses.truncate(MAX_RESPONSES);
    }

    let mut valences = BTreeMap::new();
    if let Some(map) = value
        .get("valenze")
        .or_else(|| value.get("valences"))
        .and_then(|v| v.as_object())
    {
        for (word, raw) in map {
            let word = normalize(word);
            if word != cue && !responses.contains(&word) {
                warnings.push(format!("rating for unknown word `{word}` dropped"));
                continue;
            }
            match likert_value(raw) {
                Some(v) => {
                    valences.insert(word, v);
                }
                None => warnings.push(format!(
                    "rating `{raw}` for `{word}` not mappable, left unrated"
                )),
            }
        }
    }

    Ok(ParsedCue {
        responses,
        valences,
        warnings,
    })
}

/// Builds a validated association record out of a parsed cue reply.
pub fn record_from_reply(participant_id: &str, cue: &str, parsed: &ParsedCue) -> AssociationRecord {
    AssociationRecord {
        participant_id: participant_id.to_string(),
        group_tag: GroupTag::parse(participant_id),
        cue: normalize(cue),
        responses: parsed.responses.clone(),
        valences: parsed.valences.clone(),
    }
}
