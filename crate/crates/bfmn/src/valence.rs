//! Word valence categorization: each word's ratings are tested against the
//! pooled ratings of every other word in the group with a two-tailed
//! Kruskal-Wallis test, then labelled positive/neutral/negative.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::AssociationRecord;
use crate::stats::{chi_square_sf, midranks};

pub const DEFAULT_ALPHA: f64 = 0.1;

/// Minimum number of ratings a word needs before it can be tested.
pub const MIN_RATINGS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Valence {
    Positive,
    Neutral,
    Negative,
}

impl Valence {
    pub fn mirrored(self) -> Valence {
        match self {
            Valence::Positive => Valence::Negative,
            Valence::Negative => Valence::Positive,
            Valence::Neutral => Valence::Neutral,
        }
    }
}

impl fmt::Display for Valence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Valence::Positive => "positive",
            Valence::Neutral => "neutral",
            Valence::Negative => "negative",
        };
        write!(f, "{s}")
    }
}

/// All ratings a word received within one group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValenceSample {
    pub word: String,
    pub ratings: Vec<u8>,
}

/// Group-level label for one word, with the test evidence behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValenceLabel {
    pub word: String,
    pub label: Valence,
    /// absent when the word had fewer than [`MIN_RATINGS`] ratings
    pub p_value: Option<f64>,
    /// mean rating, absent for unrated words
    pub mean: Option<f64>,
    pub n_ratings: usize,
    /// appearances as cue or response in the group's records
    pub occurrences: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KwTest {
    pub h: f64,
    pub p: f64,
}

/// Two-group Kruskal-Wallis test on midranks with the standard tie
/// correction; p from the chi-square survival function with df = 1.
///
/// When all pooled values are identical the statistic is degenerate and
/// the test returns H = 0, p = 1 by convention.
pub fn kruskal_wallis(group_a: &[f64], group_b: &[f64]) -> Result<KwTest> {
    if group_a.is_empty() || group_b.is_empty() || group_a.len() + group_b.len() < 3 {
        return Err(Error::DegenerateInput);
    }
    let n_a = group_a.len() as f64;
    let n_b = group_b.len() as f64;
    let n = n_a + n_b;

    let mut pooled = Vec::with_capacity(group_a.len() + group_b.len());
    pooled.extend_from_slice(group_a);
    pooled.extend_from_slice(group_b);
    let (ranks, tie_term) = midranks(&pooled);

    let correction = 1.0 - tie_term / (n * n * n - n);
    if correction <= 0.0 {
        // single tie group spanning everything: all values identical
        return Ok(KwTest { h: 0.0, p: 1.0 });
    }

    let r_a: f64 = ranks[..group_a.len()].iter().sum();
    let r_b: f64 = ranks[group_a.len()..].iter().sum();
    let h_uncorrected =
        12.0 / (n * (n + 1.0)) * (r_a * r_a / n_a + r_b * r_b / n_b) - 3.0 * (n + 1.0);
    let h = (h_uncorrected / correction).max(0.0);
    Ok(KwTest {
        h,
        p: chi_square_sf(h, 1.0),
    })
}

/// Likert histogram over ratings 1..=5.
pub type LikertCounts = [u64; 5];

pub fn histogram(ratings: &[u8]) -> LikertCounts {
    let mut counts = [0u64; 5];
    for &r in ratings {
        debug_assert!((1..=5).contains(&r));
        counts[(r - 1) as usize] += 1;
    }
    counts
}

fn hist_n(counts: &LikertCounts) -> u64 {
    counts.iter().sum()
}

fn hist_sum(counts: &LikertCounts) -> u64 {
    counts
        .iter()
        .enumerate()
        .map(|(i, &c)| (i as u64 + 1) * c)
        .sum()
}

/// Same test as [`kruskal_wallis`] computed directly from Likert
/// histograms, O(1) per call. Used by [`categorize_group`], where the
/// baseline histogram is the pooled total minus the word's own counts.
pub fn kruskal_wallis_likert(a: &LikertCounts, b: &LikertCounts) -> Result<KwTest> {
    let n_a = hist_n(a) as f64;
    let n_b = hist_n(b) as f64;
    if n_a == 0.0 || n_b == 0.0 || n_a + n_b < 3.0 {
        return Err(Error::DegenerateInput);
    }
    let n = n_a + n_b;

    let mut tie_term = 0.0;
    let mut below = 0.0;
    let mut r_a = 0.0;
    let mut r_b = 0.0;
    for v in 0..5 {
        let pooled = (a[v] + b[v]) as f64;
        if pooled == 0.0 {
            continue;
        }
        let midrank = below + (pooled + 1.0) / 2.0;
        r_a += a[v] as f64 * midrank;
        r_b += b[v] as f64 * midrank;
        tie_term += pooled * pooled * pooled - pooled;
        below += pooled;
    }

    let correction = 1.0 - tie_term / (n * n * n - n);
    if correction <= 0.0 {
        return Ok(KwTest { h: 0.0, p: 1.0 });
    }
    let h_uncorrected =
        12.0 / (n * (n + 1.0)) * (r_a * r_a / n_a + r_b * r_b / n_b) - 3.0 * (n + 1.0);
    let h = (h_uncorrected / correction).max(0.0);
    Ok(KwTest {
        h,
        p: chi_square_sf(h, 1.0),
    })
}

/// Labels one word against the pooled baseline of all other ratings.
///
/// Fewer than [`MIN_RATINGS`] ratings: neutral, no p-value. Significant at
/// `alpha`: negative when the word's mean is below the baseline mean,
/// positive when above, neutral on exact equality.
pub fn categorize_word(sample: &ValenceSample, baseline: &[u8], alpha: f64) -> ValenceLabel {
    let n_ratings = sample.ratings.len();
    let mean = if n_ratings > 0 {
        Some(sample.ratings.iter().map(|&r| r as f64).sum::<f64>() / n_ratings as f64)
    } else {
        None
    };
    let mut label = ValenceLabel {
        word: sample.word.clone(),
        label: Valence::Neutral,
        p_value: None,
        mean,
        n_ratings,
        occurrences: 0,
    };
    if n_ratings < MIN_RATINGS || baseline.is_empty() {
        return label;
    }
    let word_hist = histogram(&sample.ratings);
    let base_hist = histogram(baseline);
    match kruskal_wallis_likert(&word_hist, &base_hist) {
        Ok(test) => {
            label.p_value = Some(test.p);
            if test.p < alpha {
                let mean_word = mean.unwrap();
                let mean_base = hist_sum(&base_hist) as f64 / hist_n(&base_hist) as f64;
                label.label = if mean_word < mean_base {
                    Valence::Negative
                } else if mean_word > mean_base {
                    Valence::Positive
                } else {
                    Valence::Neutral
                };
            }
        }
        Err(_) => {
            // degenerate comparison falls back to neutral
        }
    }
    label
}

/// Labels every word appearing in the given records (as cue or response).
///
/// The baseline for each word is the pooled ratings of all *other* words,
/// derived from the group total by subtraction. Two-sided logic: a label is
/// assigned only when p < `alpha`, with direction from the mean.
pub fn categorize_group(
    records: &[AssociationRecord],
    alpha: f64,
) -> BTreeMap<String, ValenceLabel> {
    let mut ratings: BTreeMap<&str, Vec<u8>> = BTreeMap::new();
    let mut occurrences: BTreeMap<&str, usize> = BTreeMap::new();
    for record in records {
        *occurrences.entry(record.cue.as_str()).or_insert(0) += 1;
        for r in &record.responses {
            *occurrences.entry(r.as_str()).or_insert(0) += 1;
        }
        for (word, &rating) in &record.valences {
            ratings.entry(word.as_str()).or_default().push(rating);
        }
    }

    let mut total = [0u64; 5];
    for rs in ratings.values() {
        for &r in rs {
            total[(r - 1) as usize] += 1;
        }
    }
    let total_n = hist_n(&total);
    let total_sum = hist_sum(&total);

    let mut labels = BTreeMap::new();
    for &word in occurrences.keys() {
        let word_ratings = ratings.get(word).map(Vec::as_slice).unwrap_or(&[]);
        let n_ratings = word_ratings.len();
        let mean = if n_ratings > 0 {
            Some(word_ratings.iter().map(|&r| r as f64).sum::<f64>() / n_ratings as f64)
        } else {
            None
        };
        let mut label = ValenceLabel {
            word: word.to_string(),
            label: Valence::Neutral,
            p_value: None,
            mean,
            n_ratings,
            occurrences: occurrences[word],
        };

        if n_ratings >= MIN_RATINGS {
            let word_hist = histogram(word_ratings);
            let mut base_hist = [0u64; 5];
            for v in 0..5 {
                base_hist[v] = total[v] - word_hist[v];
            }
            let base_n = total_n - hist_n(&word_hist);
            if base_n > 0 {
                if let Ok(test) = kruskal_wallis_likert(&word_hist, &base_hist) {
                    label.p_value = Some(test.p);
                    if test.p < alpha {
                        let mean_word = mean.unwrap();
                        let mean_base =
                            (total_sum - hist_sum(&word_hist)) as f64 / base_n as f64;
                        label.label = if mean_word < mean_base {
                            Valence::Negative
                        } else if mean_word > mean_base {
                            Valence::Positive
                        } else {
                            Valence::Neutral
                        };
                    }
                }
            }
        }
        labels.insert(word.to_string(), label);
    }
    labels
}

/// Per-group valence audit table: word, label, p, mean, n. Tab-separated,
/// one row per word, sorted by word.
pub fn valence_table(labels: &BTreeMap<String, ValenceLabel>) -> String {
    let mut out = String::from("word\tlabel\tp\tmean\tn\n");
    for label in labels.values() {
        let p = label.p_value.map(|p| format!("{p}")).unwrap_or_default();
        let mean = label.mean.map(|m| format!("{m}")).unwrap_or_default();
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            label.word, label.label, p, mean, label.n_ratings
        ));
    }
    out
}
