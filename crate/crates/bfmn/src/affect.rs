//! Plutchik emotion profiles for word sets, with significance from
//! resampled lexicon nulls.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::LexicalResources;
use crate::sampling::{rng_for, sub_seed, IndexSampler};
use crate::stats::{mean, sample_std};

/// |z| at or above this is significant (two-sided, 5%).
pub const EMOTION_Z_CRIT: f64 = 1.96;

pub const DEFAULT_N_NULL: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Emotion {
    Joy,
    Trust,
    Fear,
    Surprise,
    Sadness,
    Disgust,
    Anger,
    Anticipation,
}

/// Canonical order; matches the flag columns of the emotion lexicon file.
pub const EMOTIONS: [Emotion; 8] = [
    Emotion::Joy,
    Emotion::Trust,
    Emotion::Fear,
    Emotion::Surprise,
    Emotion::Sadness,
    Emotion::Disgust,
    Emotion::Anger,
    Emotion::Anticipation,
];

impl Emotion {
    pub fn name(self) -> &'static str {
        match self {
            Emotion::Joy => "joy",
            Emotion::Trust => "trust",
            Emotion::Fear => "fear",
            Emotion::Surprise => "surprise",
            Emotion::Sadness => "sadness",
            Emotion::Disgust => "disgust",
            Emotion::Anger => "anger",
            Emotion::Anticipation => "anticipation",
        }
    }

    pub fn index(self) -> usize {
        EMOTIONS.iter().position(|&e| e == self).unwrap()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmotionProfile {
    /// observed counts per emotion, canonical order
    pub counts: [u32; 8],
    pub z: [f64; 8],
    pub significant: [bool; 8],
    /// number of lemmas the nulls were sized to
    pub sample_size: usize,
}

impl EmotionProfile {
    pub fn count(&self, e: Emotion) -> u32 {
        self.counts[e.index()]
    }

    pub fn z_score(&self, e: Emotion) -> f64 {
        self.z[e.index()]
    }

    pub fn is_significant(&self, e: Emotion) -> bool {
        self.significant[e.index()]
    }

    /// JSON-friendly view: emotion -> {count, z, significant}.
    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for e in EMOTIONS {
            let i = e.index();
            map.insert(
                e.name().to_string(),
                serde_json::json!({
                    "count": self.counts[i],
                    "z": self.z[i],
                    "significant": self.significant[i],
                }),
            );
        }
        let mut root = serde_json::Map::new();
        root.insert("emotions".into(), serde_json::Value::Object(map));
        root.insert("sample_size".into(), serde_json::json!(self.sample_size));
        serde_json::Value::Object(root)
    }
}

fn lemmas_of(words: &BTreeSet<String>, lex: &LexicalResources) -> BTreeSet<String> {
    words.iter().map(|w| lex.lemma(w).to_string()).collect()
}

fn counts_for_masks(masks: &[u8]) -> [u32; 8] {
    let mut counts = [0u32; 8];
    for &mask in masks {
        for (bit, c) in counts.iter_mut().enumerate() {
            if mask & (1 << bit) != 0 {
                *c += 1;
            }
        }
    }
    counts
}

/// Observed emotion counts for a word set: words are lemmatized, then each
/// lemma contributes one count to every emotion it is tagged with.
pub fn emotion_counts(words: &BTreeSet<String>, lex: &LexicalResources) -> [u32; 8] {
    let masks: Vec<u8> = lemmas_of(words, lex)
        .iter()
        .filter_map(|l| lex.emotion_lexicon.get(l).copied())
        .collect();
    counts_for_masks(&masks)
}

/// Emotion profile of a word set against a resampled null.
///
/// The null draws `n_null` uniform samples, each of the observed set's
/// size, without replacement from the lexicon vocabulary; z is the observed
/// count standardized by the null mean and standard deviation (z = 0 when
/// the null does not vary). With `include_unmatched`, lemmas missing from
/// the lexicon still count toward the sample size and dilute the profile;
/// disabling it sizes the null to matched lemmas only.
pub fn emotion_zscores(
    words: &BTreeSet<String>,
    lex: &LexicalResources,
    n_null: usize,
    seed: u64,
    include_unmatched: bool,
) -> Result<EmotionProfile> {
    let lemmas = lemmas_of(words, lex);
    let matched: Vec<&String> = lemmas
        .iter()
        .filter(|l| lex.emotion_lexicon.contains_key(*l))
        .collect();
    let sample_size = if include_unmatched {
        lemmas.len()
    } else {
        matched.len()
    };

    let vocab: Vec<u8> = lex.emotion_lexicon.values().copied().collect();
    if sample_size > vocab.len() {
        return Err(Error::SampleTooLarge {
            requested: sample_size,
            available: vocab.len(),
        });
    }

    let obs_masks: Vec<u8> = matched
        .iter()
        .map(|l| lex.emotion_lexicon[*l])
        .collect();
    let counts = counts_for_masks(&obs_masks);

    let mut profile = EmotionProfile {
        counts,
        z: [0.0; 8],
        significant: [false; 8],
        sample_size,
    };
    if sample_size == 0 || n_null == 0 {
        return Ok(profile);
    }

    let mut sampler = IndexSampler::new(vocab.len());
    let mut draw = Vec::with_capacity(sample_size);
    let mut null_counts = vec![[0u32; 8]; n_null];
    for (i, slot) in null_counts.iter_mut().enumerate() {
        let mut rng = rng_for(sub_seed(seed, i as u64));
        sampler.draw(&mut rng, sample_size, &mut draw);
        let mut c = [0u32; 8];
        for &idx in &draw {
            let mask = vocab[idx as usize];
            for (bit, slot_c) in c.iter_mut().enumerate() {
                if mask & (1 << bit) != 0 {
                    *slot_c += 1;
                }
            }
        }
        *slot = c;
    }

    let mut per_emotion = vec![0.0f64; n_null];
    for e in 0..8 {
        for (i, c) in null_counts.iter().enumerate() {
            per_emotion[i] = c[e] as f64;
        }
        let mu = mean(&per_emotion);
        let sd = sample_std(&per_emotion);
        let z = if sd == 0.0 {
            0.0
        } else {
            (counts[e] as f64 - mu) / sd
        };
        profile.z[e] = z;
        profile.significant[e] = z.abs() >= EMOTION_Z_CRIT;
    }
    Ok(profile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn lexicon(entries: &[(&str, u8)]) -> LexicalResources {
        let mut lex = LexicalResources::default();
        for (w, m) in entries {
            lex.emotion_lexicon.insert(w.to_string(), *m);
        }
        lex
    }

    fn set(words: &[&str]) -> BTreeSet<String> {
        words.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn counts_follow_lexicon_tags() {
        // joy = bit 0, anticipation = bit 7
        let lex = lexicon(&[("gioia", 0b1000_0001)]);
        let counts = emotion_counts(&set(&["gioia"]), &lex);
        assert_eq!(counts[Emotion::Joy.index()], 1);
        assert_eq!(counts[Emotion::Anticipation.index()], 1);
        assert_eq!(counts.iter().sum::<u32>(), 2);
    }

    #[test]
    fn empty_set_counts_zero() {
        let lex = lexicon(&[("a", 0xff)]);
        assert_eq!(emotion_counts(&set(&[]), &lex), [0; 8]);
    }

    #[test]
    fn fear_counted_per_tagged_word() {
        let fear = 1u8 << Emotion::Fear.index();
        let mut entries: Vec<(String, u8)> = (0..3).map(|i| (format!("f{i}"), fear)).collect();
        entries.extend((0..7).map(|i| (format!("n{i}"), 0u8)));
        let refs: Vec<(&str, u8)> = entries.iter().map(|(w, m)| (w.as_str(), *m)).collect();
        let lex = lexicon(&refs);
        let words: Vec<&str> = entries.iter().map(|(w, _)| w.as_str()).collect();
        let counts = emotion_counts(&set(&words), &lex);
        assert_eq!(counts[Emotion::Fear.index()], 3);
    }

    #[test]
    fn lemmatization_happens_before_lookup() {
        let mut lex = lexicon(&[("gioia", 1)]);
        lex.lemma_map.insert("gioie".into(), "gioia".into());
        let counts = emotion_counts(&set(&["gioie"]), &lex);
        assert_eq!(counts[Emotion::Joy.index()], 1);
    }

    fn random_lexicon(n: usize, seed: u64) -> LexicalResources {
        let mut rng = crate::sampling::rng_for(seed);
        let mut lex = LexicalResources::default();
        for i in 0..n {
            let mut mask = 0u8;
            for bit in 0..8 {
                if rng.random_bool(0.15) {
                    mask |= 1 << bit;
                }
            }
            lex.emotion_lexicon.insert(format!("w{i:04}"), mask);
        }
        lex
    }

    #[test]
    fn zscores_deterministic_for_seed() {
        let lex = random_lexicon(300, 1);
        let words = set(&["w0001", "w0002", "w0003", "w0010", "w0020"]);
        let a = emotion_zscores(&words, &lex, 200, 9, true).unwrap();
        let b = emotion_zscores(&words, &lex, 200, 9, true).unwrap();
        assert_eq!(a, b);
        let c = emotion_zscores(&words, &lex, 200, 10, true).unwrap();
        assert!(a.z != c.z);
    }

    #[test]
    fn sample_larger_than_vocabulary_errors() {
        let lex = lexicon(&[("a", 1), ("b", 2)]);
        let err = emotion_zscores(&set(&["a", "b", "c"]), &lex, 10, 0, true).unwrap_err();
        assert!(matches!(err, Error::SampleTooLarge { .. }));
        // matched-only sizing tolerates the unknown word
        assert!(emotion_zscores(&set(&["a", "b", "c"]), &lex, 10, 0, false).is_ok());
    }

    #[test]
    fn z_stable_across_seeds_with_large_null() {
        // stddev of each emotion's z across seeds stays below 0.15 at
        // n_null = 1000 and |words| >= 10
        let lex = random_lexicon(400, 2);
        let words: BTreeSet<String> = (0..15).map(|i| format!("w{:04}", i * 7)).collect();
        let mut per_seed: Vec<[f64; 8]> = Vec::new();
        for seed in 0..12 {
            per_seed.push(emotion_zscores(&words, &lex, 1000, seed, true).unwrap().z);
        }
        for e in 0..8 {
            let zs: Vec<f64> = per_seed.iter().map(|z| z[e]).collect();
            assert!(
                crate::stats::sample_std(&zs) < 0.15,
                "emotion {e} z spread too wide: {zs:?}"
            );
        }
    }

    #[test]
    fn profile_json_shape() {
        let lex = lexicon(&[("a", 1), ("b", 0), ("c", 0), ("d", 0)]);
        let p = emotion_zscores(&set(&["a"]), &lex, 50, 3, true).unwrap();
        let v = p.to_json();
        assert!(v["emotions"]["joy"]["count"].is_number());
        assert!(v["emotions"]["anticipation"]["significant"].is_boolean());
        assert_eq!(v["sample_size"], 1);
    }
}
