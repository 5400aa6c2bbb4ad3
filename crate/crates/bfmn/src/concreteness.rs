//! Frame concreteness against resampled null baselines: z-test plus
//! Cohen's d and Cliff's delta effect sizes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::SemanticFrame;
use crate::ingest::LexicalResources;
use crate::sampling::{rng_for, sub_seed, IndexSampler};
use crate::stats::{mean, pooled_std, sample_std};
use crate::valence::{Valence, ValenceLabel};

/// Two-sided 10% significance threshold on |z|.
pub const CONCRETENESS_Z_CRIT: f64 = 1.6449;

pub const DEFAULT_N_SAMPLES: usize = 300;

/// Member coverage below this fraction flags the result as low-coverage.
pub const LOW_COVERAGE_THRESHOLD: f64 = 0.5;

/// Majority-vote propagation of surface-form valence labels onto lemmas,
/// weighted by occurrence counts; ties go to neutral.
pub fn lemma_valence_propagate(
    labels: &BTreeMap<String, ValenceLabel>,
    lemma_map: &BTreeMap<String, String>,
) -> BTreeMap<String, Valence> {
    let mut votes: BTreeMap<&str, [usize; 3]> = BTreeMap::new();
    for (word, label) in labels {
        let lemma = lemma_map.get(word).map(String::as_str).unwrap_or(word);
        let weight = label.occurrences.max(1);
        let slot = match label.label {
            Valence::Positive => 0,
            Valence::Neutral => 1,
            Valence::Negative => 2,
        };
        votes.entry(lemma).or_insert([0; 3])[slot] += weight;
    }
    votes
        .into_iter()
        .map(|(lemma, v)| {
            let top = v[0].max(v[1]).max(v[2]);
            let winners = v.iter().filter(|&&c| c == top).count();
            let label = if winners > 1 {
                Valence::Neutral
            } else if v[0] == top {
                Valence::Positive
            } else if v[1] == top {
                Valence::Neutral
            } else {
                Valence::Negative
            };
            (lemma.to_string(), label)
        })
        .collect()
}

/// Concreteness scores of a frame's members (target excluded), after
/// lemmatization and atomic lookup of multi-word units.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameScores {
    /// one score per distinct matched lemma, in lemma order
    pub scores: Vec<f64>,
    /// distinct lemmas the members map onto
    pub lemmas: usize,
    /// lemmas that matched the norms
    pub matched: usize,
}

impl FrameScores {
    pub fn coverage(&self) -> f64 {
        if self.lemmas == 0 {
            0.0
        } else {
            self.matched as f64 / self.lemmas as f64
        }
    }
}

pub fn frame_concreteness(frame: &SemanticFrame, lex: &LexicalResources) -> Result<FrameScores> {
    let lemmas: std::collections::BTreeSet<String> = frame
        .members
        .iter()
        .map(|w| lex.lemma(w).to_string())
        .collect();
    let scores: Vec<f64> = lemmas
        .iter()
        .filter_map(|l| lex.concreteness_norms.get(l).copied())
        .collect();
    if scores.is_empty() {
        return Err(Error::EmptyAfterLookup);
    }
    Ok(FrameScores {
        matched: scores.len(),
        lemmas: lemmas.len(),
        scores,
    })
}

/// Null baseline for frames of size `k`: per-sample mean concreteness of
/// uniform word lists drawn without replacement from the norms.
#[derive(Debug, Clone, PartialEq)]
pub struct NullDistribution {
    pub mean: f64,
    pub std: f64,
    pub sample_means: Vec<f64>,
    /// every score drawn across all samples, pooled
    pub pooled_scores: Vec<f64>,
}

pub fn null_distribution(
    k: usize,
    norms: &BTreeMap<String, f64>,
    n_samples: usize,
    seed: u64,
) -> Result<NullDistribution> {
    if k == 0 || k > norms.len() {
        return Err(Error::KTooLarge {
            k,
            available: norms.len(),
        });
    }
    let values: Vec<f64> = norms.values().copied().collect();
    let mut sampler = IndexSampler::new(values.len());
    let mut draw = Vec::with_capacity(k);
    let mut scores = Vec::with_capacity(k);
    let mut sample_means = Vec::with_capacity(n_samples);
    let mut pooled_scores = Vec::with_capacity(n_samples * k);
    for i in 0..n_samples {
        let mut rng = rng_for(sub_seed(seed, i as u64));
        sampler.draw(&mut rng, k, &mut draw);
        scores.clear();
        scores.extend(draw.iter().map(|&idx| values[idx as usize]));
        // summing in sorted order makes equal multisets produce identical
        // means, so a full-population draw has exactly zero variance
        scores.sort_by(f64::total_cmp);
        pooled_scores.extend_from_slice(&scores);
        let sum: f64 = scores.iter().sum();
        sample_means.push(sum / k as f64);
    }
    Ok(NullDistribution {
        mean: mean(&sample_means),
        std: sample_std(&sample_means),
        sample_means,
        pooled_scores,
    })
}

/// Signed Cliff's delta of `xs` against `ys`:
/// P(x > y) - P(x < y), computed by sorting `ys` and binary-searching each
/// `x`. Exactly equal to the full pairwise count.
pub fn cliffs_delta(xs: &[f64], ys: &[f64]) -> f64 {
    if xs.is_empty() || ys.is_empty() {
        return 0.0;
    }
    let mut sorted = ys.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut dominance: i64 = 0;
    for &x in xs {
        let below = sorted.partition_point(|&y| y < x);
        let not_above = sorted.partition_point(|&y| y <= x);
        let wins = below as i64;
        let losses = (sorted.len() - not_above) as i64;
        dominance += wins - losses;
    }
    dominance as f64 / (xs.len() as f64 * ys.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcretenessResult {
    pub group: String,
    pub keyword: String,
    /// matched lemma count; the size the null lists are drawn at
    pub k: usize,
    pub mean_frame: f64,
    pub mean_null: f64,
    pub std_null: f64,
    pub z: f64,
    /// |mean difference| / pooled std of frame and null word scores
    pub cohens_d: f64,
    /// |P(frame > null) - P(frame < null)| over all score pairs
    pub cliffs_delta: f64,
    pub significant: bool,
    /// set when the null had zero variance; z is reported as 0 and the
    /// row is never significant
    pub degenerate_null: bool,
    /// fraction of member lemmas found in the norms
    pub coverage: f64,
    pub low_coverage: bool,
}

/// Runs the full frame-vs-null concreteness comparison.
pub fn concreteness_test(
    group: &str,
    frame: &SemanticFrame,
    lex: &LexicalResources,
    n_samples: usize,
    seed: u64,
    z_crit: f64,
) -> Result<ConcretenessResult> {
    let frame_scores = frame_concreteness(frame, lex)?;
    let k = frame_scores.scores.len();
    let null = null_distribution(k, &lex.concreteness_norms, n_samples, seed)?;

    let mean_frame = mean(&frame_scores.scores);
    let degenerate_null = null.std == 0.0;
    let z = if degenerate_null {
        0.0
    } else {
        (mean_frame - null.mean) / null.std
    };
    let sp = pooled_std(&frame_scores.scores, &null.pooled_scores);
    let cohens_d = if sp == 0.0 {
        0.0
    } else {
        (mean_frame - null.mean).abs() / sp
    };
    let cliffs = cliffs_delta(&frame_scores.scores, &null.pooled_scores).abs();

    let coverage = frame_scores.coverage();
    Ok(ConcretenessResult {
        group: group.to_string(),
        keyword: frame.target.clone(),
        k,
        mean_frame,
        mean_null: null.mean,
        std_null: null.std,
        z,
        cohens_d,
        cliffs_delta: cliffs,
        significant: !degenerate_null && z.abs() > z_crit,
        degenerate_null,
        coverage,
        low_coverage: coverage < LOW_COVERAGE_THRESHOLD,
    })
}

/// Tab-separated report, one row per result, ordered by decreasing mean
/// difference.
pub fn concreteness_report(results: &[ConcretenessResult]) -> String {
    let mut rows: Vec<&ConcretenessResult> = results.iter().collect();
    rows.sort_by(|a, b| {
        let da = a.mean_frame - a.mean_null;
        let db = b.mean_frame - b.mean_null;
        db.total_cmp(&da)
            .then_with(|| a.group.cmp(&b.group))
            .then_with(|| a.keyword.cmp(&b.keyword))
    });
    let mut out = String::from("group\tkeyword\tk\tmean_diff\tZ\tcohens_d\tmean_frame\tcliffs_delta\n");
    for r in rows {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            r.group,
            r.keyword,
            r.k,
            r.mean_frame - r.mean_null,
            r.z,
            r.cohens_d,
            r.mean_frame,
            r.cliffs_delta
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn label(word: &str, v: Valence, occurrences: usize) -> (String, ValenceLabel) {
        (
            word.to_string(),
            ValenceLabel {
                word: word.to_string(),
                label: v,
                p_value: None,
                mean: None,
                n_ratings: 0,
                occurrences,
            },
        )
    }

    #[test]
    fn majority_vote_propagates() {
        let labels: BTreeMap<String, ValenceLabel> = [
            label("corse", Valence::Positive, 1),
            label("corsa", Valence::Positive, 1),
            label("correre", Valence::Negative, 1),
        ]
        .into_iter()
        .collect();
        let lemma_map: BTreeMap<String, String> = [
            ("corse".to_string(), "correre".to_string()),
            ("corsa".to_string(), "correre".to_string()),
        ]
        .into_iter()
        .collect();
        let out = lemma_valence_propagate(&labels, &lemma_map);
        assert_eq!(out["correre"], Valence::Positive);
    }

    #[test]
    fn tie_votes_go_neutral() {
        let labels: BTreeMap<String, ValenceLabel> = [
            label("a", Valence::Positive, 2),
            label("b", Valence::Negative, 2),
        ]
        .into_iter()
        .collect();
        let lemma_map: BTreeMap<String, String> = [
            ("a".to_string(), "x".to_string()),
            ("b".to_string(), "x".to_string()),
        ]
        .into_iter()
        .collect();
        assert_eq!(lemma_valence_propagate(&labels, &lemma_map)["x"], Valence::Neutral);
    }

    #[test]
    fn single_form_keeps_its_label() {
        let labels: BTreeMap<String, ValenceLabel> =
            [label("sole", Valence::Positive, 3)].into_iter().collect();
        let out = lemma_valence_propagate(&labels, &BTreeMap::new());
        assert_eq!(out["sole"], Valence::Positive);
    }

    fn frame(target: &str, members: &[&str]) -> SemanticFrame {
        SemanticFrame {
            target: target.to_string(),
            target_valence: Valence::Neutral,
            members: members.iter().map(|s| s.to_string()).collect(),
            member_valences: members
                .iter()
                .map(|s| (s.to_string(), Valence::Neutral))
                .collect(),
            induced_edges: BTreeSet::new(),
        }
    }

    fn lex_with_norms(norms: &[(&str, f64)]) -> LexicalResources {
        let mut lex = LexicalResources::default();
        for (w, s) in norms {
            lex.concreteness_norms.insert(w.to_string(), *s);
        }
        lex
    }

    #[test]
    fn frame_scores_look_up_members_not_target() {
        let lex = lex_with_norms(&[("casa", 5.0), ("idea", 1.5), ("tema", 3.0)]);
        let f = frame("tema", &["casa", "idea"]);
        let scores = frame_concreteness(&f, &lex).unwrap();
        assert_eq!(scores.scores, vec![5.0, 1.5]);
        assert!((mean(&scores.scores) - 3.25).abs() < 1e-12);
    }

    #[test]
    fn multiword_member_matched_atomically() {
        let lex = lex_with_norms(&[("computer science", 3.5)]);
        let f = frame("t", &["computer science"]);
        let scores = frame_concreteness(&f, &lex).unwrap();
        assert_eq!(scores.scores, vec![3.5]);
    }

    #[test]
    fn unmatched_members_reported_in_coverage() {
        let lex = lex_with_norms(&[("casa", 5.0)]);
        let f = frame("t", &["casa", "qqq", "zzz"]);
        let scores = frame_concreteness(&f, &lex).unwrap();
        assert_eq!(scores.matched, 1);
        assert_eq!(scores.lemmas, 3);
        assert!(scores.coverage() < 0.5);
        let empty = frame("t", &["qqq"]);
        assert!(matches!(
            frame_concreteness(&empty, &lex),
            Err(Error::EmptyAfterLookup)
        ));
    }

    fn norms_n(n: usize) -> BTreeMap<String, f64> {
        (0..n)
            .map(|i| (format!("w{i:04}"), 1.0 + 4.0 * (i as f64) / (n - 1) as f64))
            .collect()
    }

    #[test]
    fn full_population_draw_has_zero_variance() {
        let norms = norms_n(20);
        let null = null_distribution(20, &norms, 50, 1).unwrap();
        assert_eq!(null.std, 0.0);
        assert!(null.sample_means.iter().all(|&m| (m - null.mean).abs() < 1e-12));
    }

    #[test]
    fn k_one_converges_to_population_mean() {
        let norms = norms_n(200);
        let population_mean = mean(&norms.values().copied().collect::<Vec<_>>());
        let null = null_distribution(1, &norms, 3000, 2).unwrap();
        assert!((null.mean - population_mean).abs() < 0.1);
    }

    #[test]
    fn null_is_reproducible_and_k_checked() {
        let norms = norms_n(50);
        let a = null_distribution(7, &norms, 300, 42).unwrap();
        let b = null_distribution(7, &norms, 300, 42).unwrap();
        assert_eq!(a, b);
        assert!(matches!(
            null_distribution(51, &norms, 10, 0),
            Err(Error::KTooLarge { .. })
        ));
    }

    #[test]
    fn cliffs_delta_matches_bruteforce() {
        use rand::Rng;
        let mut rng = crate::sampling::rng_for(77);
        for _ in 0..40 {
            let nx = rng.random_range(1..30);
            let ny = rng.random_range(1..60);
            let xs: Vec<f64> = (0..nx).map(|_| rng.random_range(0..10) as f64 / 2.0).collect();
            let ys: Vec<f64> = (0..ny).map(|_| rng.random_range(0..10) as f64 / 2.0).collect();
            let mut dom = 0i64;
            for &x in &xs {
                for &y in &ys {
                    dom += if x > y {
                        1
                    } else if x < y {
                        -1
                    } else {
                        0
                    };
                }
            }
            let brute = dom as f64 / (nx * ny) as f64;
            assert_eq!(cliffs_delta(&xs, &ys), brute);
        }
    }

    #[test]
    fn reflecting_scores_flips_z_exactly() {
        let norms = norms_n(100);
        let lex = LexicalResources {
            concreteness_norms: norms.clone(),
            ..Default::default()
        };
        let members: Vec<String> = (0..9).map(|i| format!("w{:04}", i * 11)).collect();
        let member_refs: Vec<&str> = members.iter().map(String::as_str).collect();
        let f = frame("t", &member_refs);
        let r = concreteness_test("g", &f, &lex, 300, 5, CONCRETENESS_Z_CRIT).unwrap();

        let reflected = LexicalResources {
            concreteness_norms: norms.iter().map(|(w, s)| (w.clone(), 6.0 - s)).collect(),
            ..Default::default()
        };
        let r2 = concreteness_test("g", &f, &reflected, 300, 5, CONCRETENESS_Z_CRIT).unwrap();
        assert!((r.z + r2.z).abs() < 1e-9, "{} vs {}", r.z, r2.z);
        assert!((r.cohens_d - r2.cohens_d).abs() < 1e-9);
        assert!((r.cliffs_delta - r2.cliffs_delta).abs() < 1e-9);
    }

    #[test]
    fn significance_is_thresholded_on_z() {
        let norms = norms_n(300);
        let lex = LexicalResources {
            concreteness_norms: norms,
            ..Default::default()
        };
        // members drawn from the very top of the scale: strongly concrete
        let members: Vec<String> = (290..299).map(|i| format!("w{i:04}")).collect();
        let member_refs: Vec<&str> = members.iter().map(String::as_str).collect();
        let r = concreteness_test(
            "g",
            &frame("t", &member_refs),
            &lex,
            300,
            9,
            CONCRETENESS_Z_CRIT,
        )
        .unwrap();
        assert!(r.z > CONCRETENESS_Z_CRIT);
        assert!(r.significant);
        assert_eq!(r.significant, r.z.abs() > CONCRETENESS_Z_CRIT);
    }

    #[test]
    fn report_is_sorted_by_mean_diff() {
        let mk = |group: &str, kw: &str, diff: f64| ConcretenessResult {
            group: group.into(),
            keyword: kw.into(),
            k: 5,
            mean_frame: 3.0 + diff,
            mean_null: 3.0,
            std_null: 0.1,
            z: diff / 0.1,
            cohens_d: diff.abs(),
            cliffs_delta: 0.2,
            significant: false,
            degenerate_null: false,
            coverage: 1.0,
            low_coverage: false,
        };
        let report = concreteness_report(&[mk("a", "x", -0.2), mk("b", "y", 0.5), mk("c", "z", 0.1)]);
        let lines: Vec<&str> = report.lines().collect();
        assert_eq!(
            lines[0],
            "group\tkeyword\tk\tmean_diff\tZ\tcohens_d\tmean_frame\tcliffs_delta"
        );
        assert!(lines[1].starts_with("b\ty"));
        assert!(lines[2].starts_with("c\tz"));
        assert!(lines[3].starts_with("a\tx"));
    }
}
