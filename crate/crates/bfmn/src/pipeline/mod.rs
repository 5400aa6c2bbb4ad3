//! Config-driven orchestration of the full pipeline; the thin `bfmn`
//! binary dispatches straight into these functions.

mod config;

pub use config::{load_cue_set, Cleaning, Params, Paths, ResourcePaths, RunConfig, TwinConfig, ValenceMode};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::affect::{emotion_zscores, EmotionProfile};
use crate::concreteness::{concreteness_report, concreteness_test, ConcretenessResult};
use crate::error::{Error, Result};
use crate::frames::{aura, extract_frame, frame_features, jaccard, Aura, SemanticFrame};
use crate::graph::{
    build_bfmn, edge_list_tsv, network_features, node_list_tsv, Bfmn, NetworkFeatures,
};
use crate::ingest::{
    assign_subgroups, clean_participants, edge_frequency_table, load_resources,
    parse_associations, parse_mas_it, AssociationRecord, Diagnostic, DroppedParticipant,
    GroupAssignment, LexicalResources, Subgroup,
};
use crate::render::{render_flower_svg, render_frame_svg, render_jaccard_bars, RenderSpec};
use crate::sampling::sub_seed;
use crate::stats::fnv1a64;
use crate::twin::{
    run_mas_it, run_twin, sample_profile, ChatClient, Education, PromptLanguage, RequestLog,
    TwinRun,
};
use crate::valence::{categorize_group, valence_table, Valence, ValenceLabel};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Analysis group selector: a sample tag with an optional anxiety
/// subgroup, written `psychology:high` or just `experts`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupKey {
    pub tag: String,
    pub subgroup: Option<Subgroup>,
}

impl std::str::FromStr for GroupKey {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None => Ok(GroupKey {
                tag: s.trim().to_lowercase(),
                subgroup: None,
            }),
            Some((tag, sub)) => {
                let subgroup = match sub.trim().to_lowercase().as_str() {
                    "low" | "low_anxiety" => Subgroup::LowAnxiety,
                    "high" | "high_anxiety" => Subgroup::HighAnxiety,
                    other => {
                        return Err(Error::Config(format!(
                            "unknown subgroup `{other}` (expected `low` or `high`)"
                        )))
                    }
                };
                Ok(GroupKey {
                    tag: tag.trim().to_lowercase(),
                    subgroup: Some(subgroup),
                })
            }
        }
    }
}

impl fmt::Display for GroupKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.subgroup {
            None => write!(f, "{}", self.tag),
            Some(Subgroup::LowAnxiety) => write!(f, "{}:low", self.tag),
            Some(Subgroup::HighAnxiety) => write!(f, "{}:high", self.tag),
            Some(s) => write!(f, "{}:{s}", self.tag),
        }
    }
}

/// Parsed, cleaned and subgrouped study data.
#[derive(Debug, Default)]
pub struct Dataset {
    pub records: Vec<AssociationRecord>,
    pub diagnostics: Vec<Diagnostic>,
    pub dropped: Vec<DroppedParticipant>,
    /// sample tag -> participant -> subgroup (only for samples with
    /// questionnaire data)
    pub assignments: BTreeMap<String, BTreeMap<String, Subgroup>>,
}

impl Dataset {
    pub fn sample_tags(&self) -> BTreeSet<String> {
        self.records
            .iter()
            .map(|r| r.group_tag.to_string())
            .collect()
    }
}

pub fn load_dataset(config: &RunConfig) -> Result<Dataset> {
    if config.paths.associations.is_empty() {
        return Err(Error::Config(
            "no association files configured (paths.associations)".into(),
        ));
    }
    let mut all_records = Vec::new();
    let mut diagnostics = Vec::new();
    for path in &config.paths.associations {
        let parsed = parse_associations(path, &config.columns)?;
        all_records.extend(parsed.records);
        diagnostics.extend(parsed.diagnostics);
    }
    if all_records.is_empty() {
        return Err(Error::Data("association files contain no usable rows".into()));
    }

    // clean per sample: the expected cue count is sample-specific
    let mut by_sample: BTreeMap<String, Vec<AssociationRecord>> = BTreeMap::new();
    for r in all_records {
        by_sample.entry(r.group_tag.to_string()).or_default().push(r);
    }
    let mut records = Vec::new();
    let mut dropped = Vec::new();
    let mut kept_ids: BTreeSet<String> = BTreeSet::new();
    for (tag, sample_records) in by_sample {
        let cue_set_size = config
            .cleaning
            .per_sample
            .get(&tag)
            .copied()
            .or(config.cleaning.cue_set_size)
            .unwrap_or_else(|| {
                let mut per_participant: BTreeMap<&str, usize> = BTreeMap::new();
                for r in &sample_records {
                    *per_participant.entry(r.participant_id.as_str()).or_insert(0) += 1;
                }
                per_participant.values().copied().max().unwrap_or(1)
            });
        let outcome = clean_participants(sample_records, cue_set_size);
        kept_ids.extend(outcome.kept.iter().map(|r| r.participant_id.clone()));
        records.extend(outcome.kept);
        dropped.extend(outcome.dropped);
    }

    // median splits happen within each sample, over participants that
    // survived cleaning
    let mut assignments = BTreeMap::new();
    if let Some(mas_path) = &config.paths.mas_it {
        let factors = if config.mas_factors.is_empty() {
            None
        } else {
            Some(&config.mas_factors)
        };
        let scores = parse_mas_it(mas_path, factors)?;
        let mut by_sample: BTreeMap<String, Vec<_>> = BTreeMap::new();
        for s in scores {
            if kept_ids.contains(&s.participant_id) {
                let tag = crate::ingest::GroupTag::parse(&s.participant_id).to_string();
                by_sample.entry(tag).or_default().push(s);
            }
        }
        for (tag, sample_scores) in by_sample {
            let assigned: BTreeMap<String, Subgroup> = assign_subgroups(&sample_scores)
                .into_iter()
                .map(|GroupAssignment { participant_id, subgroup }| (participant_id, subgroup))
                .collect();
            assignments.insert(tag, assigned);
        }
    }

    Ok(Dataset {
        records,
        diagnostics,
        dropped,
        assignments,
    })
}

/// Everything needed to analyze one group: its records, word labels,
/// graph, and raw pair frequencies.
#[derive(Debug)]
pub struct GroupContext {
    pub key: GroupKey,
    pub records: Vec<AssociationRecord>,
    pub labels: BTreeMap<String, ValenceLabel>,
    pub graph: Bfmn,
    pub freq: BTreeMap<(String, String), u64>,
    pub warnings: Vec<String>,
}

pub fn group_context(
    config: &RunConfig,
    dataset: &Dataset,
    key: &GroupKey,
) -> Result<GroupContext> {
    let in_group = |r: &AssociationRecord| -> bool {
        if r.group_tag.to_string() != key.tag {
            return false;
        }
        match key.subgroup {
            None => true,
            Some(wanted) => dataset
                .assignments
                .get(&key.tag)
                .and_then(|m| m.get(&r.participant_id))
                .map(|&s| s == wanted)
                .unwrap_or(false),
        }
    };
    let records: Vec<AssociationRecord> =
        dataset.records.iter().filter(|r| in_group(r)).cloned().collect();
    if records.is_empty() {
        let mut available: Vec<String> = dataset.sample_tags().into_iter().collect();
        for (tag, assigned) in &dataset.assignments {
            if assigned.values().any(|&s| s == Subgroup::LowAnxiety) {
                available.push(format!("{tag}:low"));
                available.push(format!("{tag}:high"));
            }
        }
        available.sort();
        return Err(Error::UnknownGroup(format!(
            "{key} (available: {})",
            available.join(", ")
        )));
    }

    let labels = match config.params.valence_mode {
        ValenceMode::Group => categorize_group(&records, config.params.alpha_valence),
        ValenceMode::Pooled => categorize_group(&dataset.records, config.params.alpha_valence),
    };
    let (graph, warnings) = build_bfmn(key.to_string(), &records, &labels);
    let freq = edge_frequency_table(&records);
    Ok(GroupContext {
        key: key.clone(),
        records,
        labels,
        graph,
        freq,
        warnings,
    })
}

fn load_resources_opt(config: &RunConfig) -> Result<Option<LexicalResources>> {
    match (
        &config.resources.lemma_map,
        &config.resources.emotion_lexicon,
        &config.resources.concreteness_norms,
    ) {
        (Some(lemma), Some(emotion), Some(norms)) => {
            let (res, _warnings) = load_resources(
                lemma,
                emotion,
                norms,
                config.resources.translations.as_deref(),
            )?;
            Ok(Some(res))
        }
        (None, None, None) => Ok(None),
        _ => Err(Error::Config(
            "resources must configure lemma_map, emotion_lexicon and concreteness_norms together"
                .into(),
        )),
    }
}

fn require_resources(config: &RunConfig) -> Result<LexicalResources> {
    load_resources_opt(config)?.ok_or_else(|| {
        Error::Config("this command needs the [resources] paths configured".into())
    })
}

// ---------------------------------------------------------------------------
// ingest

#[derive(Debug, Serialize)]
pub struct SampleReport {
    pub participants_kept: usize,
    pub participants_dropped: usize,
    pub records: usize,
    pub subgroups: Option<SubgroupCounts>,
}

#[derive(Debug, Serialize, PartialEq, Eq)]
pub struct SubgroupCounts {
    pub low: usize,
    pub high: usize,
    pub excluded: usize,
}

#[derive(Debug, Serialize)]
pub struct IngestReport {
    pub samples: BTreeMap<String, SampleReport>,
    pub dropped: Vec<DroppedSummary>,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Serialize)]
pub struct DroppedSummary {
    pub participant_id: String,
    pub missing_cells: usize,
    pub expected_cells: usize,
}

/// Parses, cleans and subgroups the configured dataset, writing
/// `ingest_report.json` into the output directory.
pub fn cmd_ingest(config: &RunConfig) -> Result<IngestReport> {
    let dataset = load_dataset(config)?;

    let mut samples: BTreeMap<String, SampleReport> = BTreeMap::new();
    let mut kept_per_sample: BTreeMap<String, BTreeSet<&str>> = BTreeMap::new();
    for r in &dataset.records {
        kept_per_sample
            .entry(r.group_tag.to_string())
            .or_default()
            .insert(&r.participant_id);
    }
    let mut dropped_per_sample: BTreeMap<String, usize> = BTreeMap::new();
    for d in &dataset.dropped {
        let tag = crate::ingest::GroupTag::parse(&d.participant_id).to_string();
        *dropped_per_sample.entry(tag).or_default() += 1;
    }
    for (tag, kept) in &kept_per_sample {
        let subgroups = dataset.assignments.get(tag).map(|assigned| {
            let count = |wanted: Subgroup| assigned.values().filter(|&&s| s == wanted).count();
            SubgroupCounts {
                low: count(Subgroup::LowAnxiety),
                high: count(Subgroup::HighAnxiety),
                excluded: count(Subgroup::Excluded),
            }
        });
        samples.insert(
            tag.clone(),
            SampleReport {
                participants_kept: kept.len(),
                participants_dropped: dropped_per_sample.get(tag).copied().unwrap_or(0),
                records: dataset
                    .records
                    .iter()
                    .filter(|r| &r.group_tag.to_string() == tag)
                    .count(),
                subgroups,
            },
        );
    }

    let report = IngestReport {
        samples,
        dropped: dataset
            .dropped
            .iter()
            .map(|d| DroppedSummary {
                participant_id: d.participant_id.clone(),
                missing_cells: d.missing_cells,
                expected_cells: d.expected_cells,
            })
            .collect(),
        diagnostics: dataset.diagnostics.clone(),
    };

    std::fs::create_dir_all(&config.paths.output_dir)?;
    write_json(
        &config.paths.output_dir.join("ingest_report.json"),
        &serde_json::to_value(&report)?,
    )?;
    Ok(report)
}

// ---------------------------------------------------------------------------
// analyze

#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub tool_version: String,
    pub config_hash: String,
    pub seed: u64,
    pub group: String,
    pub targets: Vec<String>,
    pub skipped_targets: Vec<String>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EdgeEntry {
    pub a: String,
    pub b: String,
    pub count: u64,
}

/// Per-target report: everything the renderer and downstream consumers
/// need, self-contained.
#[derive(Debug, Serialize, Deserialize)]
pub struct FrameReport {
    pub group: String,
    pub target: String,
    pub target_valence: Valence,
    pub member_count: usize,
    pub node_count: usize,
    pub members: BTreeMap<String, Valence>,
    pub aura: Aura,
    pub features: NetworkFeatures,
    pub edges: Vec<EdgeEntry>,
    pub emotions: Option<EmotionProfile>,
    pub concreteness: Option<ConcretenessResult>,
}

pub struct AnalyzeOutcome {
    pub bundle_dir: PathBuf,
    pub analyzed: Vec<String>,
    pub skipped: Vec<String>,
}

fn frame_to_report(
    context: &GroupContext,
    frame: &SemanticFrame,
    emotions: Option<EmotionProfile>,
    concreteness: Option<ConcretenessResult>,
) -> FrameReport {
    let edges = frame
        .induced_edges
        .iter()
        .map(|(a, b)| EdgeEntry {
            a: a.clone(),
            b: b.clone(),
            count: context.freq.get(&(a.clone(), b.clone())).copied().unwrap_or(1),
        })
        .collect();
    FrameReport {
        group: context.key.to_string(),
        target: frame.target.clone(),
        target_valence: frame.target_valence,
        member_count: frame.member_count(),
        node_count: frame.node_count(),
        members: frame.member_valences.clone(),
        aura: aura(frame),
        features: frame_features(frame),
        edges,
        emotions,
        concreteness,
    }
}

/// Full analysis bundle for one group and a list of target words: valence
/// table, whole-network features, per-target frame reports (aura,
/// structure, emotions, concreteness), the Jaccard matrix over targets,
/// and a manifest binding config hash and seed.
///
/// Two runs with identical config, data and seed produce byte-identical
/// bundles. Targets missing from the group vocabulary are skipped and
/// listed in the manifest.
pub fn cmd_analyze(
    config: &RunConfig,
    group: &GroupKey,
    targets: &[String],
    seed: u64,
    bundle_dir: Option<PathBuf>,
) -> Result<AnalyzeOutcome> {
    let dataset = load_dataset(config)?;
    let context = group_context(config, &dataset, group)?;
    let resources = load_resources_opt(config)?;

    let bundle_dir = bundle_dir
        .unwrap_or_else(|| config.paths.output_dir.join(format!("analysis_{}", slug(&group.to_string()))));
    std::fs::create_dir_all(bundle_dir.join("frames"))?;

    let mut manifest = Manifest {
        tool_version: TOOL_VERSION.to_string(),
        config_hash: config.hash(),
        seed,
        group: group.to_string(),
        targets: targets.iter().map(|t| crate::ingest::normalize(t)).collect(),
        skipped_targets: Vec::new(),
        warnings: context.warnings.clone(),
    };

    // whole network
    let features = network_features(&context.graph, config.params.hub_fraction_network)?;
    write_json(
        &bundle_dir.join("network_features.json"),
        &serde_json::to_value(&features)?,
    )?;
    write_text(
        &bundle_dir.join("valence_table.tsv"),
        &valence_table(&context.labels),
    )?;
    write_text(&bundle_dir.join("graph_edges.tsv"), &edge_list_tsv(&context.graph))?;
    write_text(&bundle_dir.join("graph_nodes.tsv"), &node_list_tsv(&context.graph))?;

    // frames
    let mut frames: Vec<(String, SemanticFrame)> = Vec::new();
    for target in &manifest.targets {
        if context.graph.contains(target) {
            let frame = extract_frame(&context.graph, target)?;
            frames.push((target.clone(), frame));
        } else {
            manifest.skipped_targets.push(target.clone());
        }
    }

    let mut concreteness_rows = Vec::new();
    for (target, frame) in &frames {
        let emotions = match &resources {
            Some(res) if !frame.is_empty() => Some(emotion_zscores(
                &frame.members,
                res,
                config.params.n_null_emotion,
                sub_seed(seed, fnv1a64(format!("emotion:{target}").as_bytes())),
                config.params.emotion_include_unmatched,
            )?),
            _ => None,
        };
        let concreteness = match &resources {
            Some(res) if !frame.is_empty() => {
                match concreteness_test(
                    &context.key.to_string(),
                    frame,
                    res,
                    config.params.n_null_concreteness,
                    sub_seed(seed, fnv1a64(format!("concreteness:{target}").as_bytes())),
                    config.params.concreteness_z_crit(),
                ) {
                    Ok(result) => {
                        concreteness_rows.push(result.clone());
                        Some(result)
                    }
                    Err(Error::EmptyAfterLookup) => {
                        manifest
                            .warnings
                            .push(format!("{target}: no member matched the concreteness norms"));
                        None
                    }
                    Err(e) => return Err(e),
                }
            }
            _ => None,
        };
        let report = frame_to_report(&context, frame, emotions, concreteness);
        write_json(
            &bundle_dir.join("frames").join(format!("{}.json", slug(target))),
            &serde_json::to_value(&report)?,
        )?;
    }
    write_text(
        &bundle_dir.join("concreteness.tsv"),
        &concreteness_report(&concreteness_rows),
    )?;

    // pairwise frame overlap
    let mut jaccard_tsv = String::from("target");
    for (t, _) in &frames {
        jaccard_tsv.push('\t');
        jaccard_tsv.push_str(t);
    }
    jaccard_tsv.push('\n');
    for (ta, fa) in &frames {
        jaccard_tsv.push_str(ta);
        for (_, fb) in &frames {
            jaccard_tsv.push_str(&format!("\t{}", jaccard(fa, fb)));
        }
        jaccard_tsv.push('\n');
    }
    write_text(&bundle_dir.join("jaccard.tsv"), &jaccard_tsv)?;

    manifest.warnings.sort();
    write_json(&bundle_dir.join("manifest.json"), &serde_json::to_value(&manifest)?)?;

    Ok(AnalyzeOutcome {
        bundle_dir,
        analyzed: frames.into_iter().map(|(t, _)| t).collect(),
        skipped: manifest.skipped_targets,
    })
}

// ---------------------------------------------------------------------------
// render

pub struct RenderOutcome {
    pub svg_dir: PathBuf,
    pub files: Vec<PathBuf>,
}

/// Renders every frame in an analysis bundle (circular diagram plus
/// emotional flower when profiled) and the bundle's Jaccard bar chart.
pub fn cmd_render(config: &RunConfig, bundle_dir: &Path, log_scale: bool) -> Result<RenderOutcome> {
    let manifest_path = bundle_dir.join("manifest.json");
    if !manifest_path.exists() {
        return Err(Error::MissingReport(bundle_dir.to_path_buf()));
    }
    let resources = load_resources_opt(config)?;
    let mut spec = RenderSpec {
        min_edge_frequency: config.params.min_edge_frequency,
        ..RenderSpec::default()
    };
    if let Some(res) = &resources {
        spec.translation_map = res.translation_map.clone();
    }

    let svg_dir = bundle_dir.join("svg");
    std::fs::create_dir_all(&svg_dir)?;
    let mut files = Vec::new();

    let mut frame_paths: Vec<PathBuf> = std::fs::read_dir(bundle_dir.join("frames"))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    frame_paths.sort();
    for path in frame_paths {
        let report: FrameReport = serde_json::from_str(&std::fs::read_to_string(&path)?)?;
        let frame = SemanticFrame {
            target: report.target.clone(),
            target_valence: report.target_valence,
            members: report.members.keys().cloned().collect(),
            member_valences: report.members.clone(),
            induced_edges: report
                .edges
                .iter()
                .map(|e| (e.a.clone(), e.b.clone()))
                .collect(),
        };
        let freq: BTreeMap<(String, String), u64> = report
            .edges
            .iter()
            .map(|e| ((e.a.clone(), e.b.clone()), e.count))
            .collect();
        if !frame.is_empty() {
            let svg = render_frame_svg(&frame, &spec, &freq)?;
            let out = svg_dir.join(format!("frame_{}.svg", slug(&report.target)));
            write_text(&out, &svg)?;
            files.push(out);
        }
        if let Some(profile) = &report.emotions {
            let title = spec.display(&report.target).to_string();
            let svg = render_flower_svg(profile, &title);
            let out = svg_dir.join(format!("flower_{}.svg", slug(&report.target)));
            write_text(&out, &svg)?;
            files.push(out);
        }
    }

    // overlap chart from the bundle's jaccard matrix
    let jaccard_path = bundle_dir.join("jaccard.tsv");
    if jaccard_path.exists() {
        let text = std::fs::read_to_string(&jaccard_path)?;
        let mut values = BTreeMap::new();
        let mut lines = text.lines();
        let header: Vec<&str> = lines.next().unwrap_or("").split('\t').skip(1).collect();
        for line in lines {
            let mut cells = line.split('\t');
            let row = cells.next().unwrap_or("");
            for (col, cell) in header.iter().zip(cells) {
                if row < *col {
                    if let Ok(v) = cell.parse::<f64>() {
                        values.insert(format!("{row} ~ {col}"), v);
                    }
                }
            }
        }
        if !values.is_empty() {
            let out = svg_dir.join("jaccard_bars.svg");
            write_text(&out, &render_jaccard_bars(&values, log_scale))?;
            files.push(out);
        }
    }

    Ok(RenderOutcome { svg_dir, files })
}

// ---------------------------------------------------------------------------
// focused reports

pub fn cmd_features(config: &RunConfig, group: &GroupKey) -> Result<NetworkFeatures> {
    let dataset = load_dataset(config)?;
    let context = group_context(config, &dataset, group)?;
    network_features(&context.graph, config.params.hub_fraction_network)
}

pub fn cmd_jaccard(
    config: &RunConfig,
    group: &GroupKey,
    targets: &[String],
) -> Result<BTreeMap<(String, String), f64>> {
    let dataset = load_dataset(config)?;
    let context = group_context(config, &dataset, group)?;
    let mut frames = Vec::new();
    for t in targets {
        let t = crate::ingest::normalize(t);
        if context.graph.contains(&t) {
            frames.push((t.clone(), extract_frame(&context.graph, &t)?));
        }
    }
    let mut out = BTreeMap::new();
    for (i, (ta, fa)) in frames.iter().enumerate() {
        for (tb, fb) in frames.iter().skip(i + 1) {
            let key = if ta < tb {
                (ta.clone(), tb.clone())
            } else {
                (tb.clone(), ta.clone())
            };
            out.insert(key, jaccard(fa, fb));
        }
    }
    Ok(out)
}

pub fn cmd_concreteness(
    config: &RunConfig,
    group: &GroupKey,
    targets: &[String],
    seed: u64,
) -> Result<Vec<ConcretenessResult>> {
    let dataset = load_dataset(config)?;
    let context = group_context(config, &dataset, group)?;
    let resources = require_resources(config)?;
    let mut rows = Vec::new();
    for t in targets {
        let t = crate::ingest::normalize(t);
        if !context.graph.contains(&t) {
            continue;
        }
        let frame = extract_frame(&context.graph, &t)?;
        if frame.is_empty() {
            continue;
        }
        match concreteness_test(
            &context.key.to_string(),
            &frame,
            &resources,
            config.params.n_null_concreteness,
            sub_seed(seed, fnv1a64(format!("concreteness:{t}").as_bytes())),
            config.params.concreteness_z_crit(),
        ) {
            Ok(r) => rows.push(r),
            Err(Error::EmptyAfterLookup) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(rows)
}

pub fn cmd_emotions(
    config: &RunConfig,
    group: &GroupKey,
    targets: &[String],
    seed: u64,
) -> Result<BTreeMap<String, EmotionProfile>> {
    let dataset = load_dataset(config)?;
    let context = group_context(config, &dataset, group)?;
    let resources = require_resources(config)?;
    let mut out = BTreeMap::new();
    for t in targets {
        let t = crate::ingest::normalize(t);
        if !context.graph.contains(&t) {
            continue;
        }
        let frame = extract_frame(&context.graph, &t)?;
        if frame.is_empty() {
            continue;
        }
        let profile = emotion_zscores(
            &frame.members,
            &resources,
            config.params.n_null_emotion,
            sub_seed(seed, fnv1a64(format!("emotion:{t}").as_bytes())),
            config.params.emotion_include_unmatched,
        )?;
        out.insert(t, profile);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// simulate

pub struct SimulateOutcome {
    pub csv_path: PathBuf,
    pub mas_csv_path: Option<PathBuf>,
    pub participants: usize,
    pub warnings: Vec<String>,
}

/// Generates `n_twins` synthetic participants for an education target and
/// writes them in the ingestion CSV schema. Interrupted runs resume from
/// the request log without re-issuing completed requests.
pub fn cmd_simulate(
    config: &RunConfig,
    n_twins: usize,
    education: Education,
    seed: u64,
    out_path: Option<PathBuf>,
) -> Result<SimulateOutcome> {
    let cue_path = config.twin.cue_set.as_ref().ok_or_else(|| {
        Error::Config("twin.cue_set must point to a cue list file".into())
    })?;
    let cues = load_cue_set(cue_path)?;
    let language: PromptLanguage = config.twin.language.parse()?;
    let client = Arc::new(ChatClient::new(config.twin.endpoint.clone())?);
    let log_path = config
        .twin
        .request_log
        .clone()
        .unwrap_or_else(|| config.paths.output_dir.join("twin_requests.jsonl"));
    let log = RequestLog::open(&log_path)?;

    let group = education.group_name().to_string();
    let runtime = tokio::runtime::Runtime::new().map_err(Error::Io)?;
    let mut runs: Vec<TwinRun> = Vec::with_capacity(n_twins);
    for i in 0..n_twins {
        let profile = sample_profile(sub_seed(seed, i as u64), education);
        let participant_id = format!("gpt_oss_{group}_{:03}", i + 1);
        let assignment = crate::twin::TwinAssignment {
            profile,
            participant_id: participant_id.clone(),
            group: group.clone(),
            cue_set_id: config.twin.cue_set_id.clone(),
        };
        let mut run = runtime.block_on(run_twin(
            Arc::clone(&client),
            Arc::clone(&log),
            assignment,
            cues.clone(),
            language,
        ))?;
        if config.twin.mas_items > 0 {
            run.mas_it = runtime.block_on(run_mas_it(
                &client,
                &log,
                &profile,
                &participant_id,
                config.twin.mas_items,
                language,
            ))?;
        }
        runs.push(run);
    }

    std::fs::create_dir_all(&config.paths.output_dir)?;
    let csv_path = out_path
        .unwrap_or_else(|| config.paths.output_dir.join(format!("twins_{group}.csv")));
    write_twin_csv(&csv_path, &runs, config)?;
    let mas_csv_path = if config.twin.mas_items > 0 {
        let path = csv_path.with_file_name(format!("twins_{group}_mas_it.csv"));
        write_twin_mas_csv(&path, &runs, config.twin.mas_items)?;
        Some(path)
    } else {
        None
    };

    Ok(SimulateOutcome {
        csv_path,
        mas_csv_path,
        participants: runs.len(),
        warnings: runs.into_iter().flat_map(|r| r.warnings).collect(),
    })
}

pub fn write_twin_csv(path: &Path, runs: &[TwinRun], config: &RunConfig) -> Result<()> {
    let columns = &config.columns;
    let mut writer = csv::Writer::from_path(path)?;
    let mut header = vec![columns.participant_id.clone(), columns.cue.clone()];
    header.extend(columns.responses.iter().cloned());
    header.push(columns.valence_cue.clone());
    header.extend(columns.valence_responses.iter().cloned());
    writer.write_record(&header)?;

    for run in runs {
        for record in &run.records {
            let mut row = vec![record.participant_id.clone(), record.cue.clone()];
            for i in 0..columns.responses.len() {
                row.push(record.responses.get(i).cloned().unwrap_or_default());
            }
            let rating = |word: &str| -> String {
                record
                    .valences
                    .get(word)
                    .map(|v| v.to_string())
                    .unwrap_or_default()
            };
            row.push(rating(&record.cue));
            for i in 0..columns.valence_responses.len() {
                row.push(
                    record
                        .responses
                        .get(i)
                        .map(|w| rating(w))
                        .unwrap_or_default(),
                );
            }
            writer.write_record(&row)?;
        }
    }
    writer.flush()?;
    Ok(())
}

fn write_twin_mas_csv(path: &Path, runs: &[TwinRun], n_items: usize) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    let mut header = vec!["participant_id".to_string()];
    header.extend((1..=n_items).map(|i| format!("item_{i:02}")));
    writer.write_record(&header)?;
    for run in runs {
        if let Some(mas) = &run.mas_it {
            let mut row = vec![run.participant_id.clone()];
            row.extend(mas.item_scores.iter().map(|v| v.to_string()));
            writer.write_record(&row)?;
        }
    }
    writer.flush()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// helpers

pub fn slug(text: &str) -> String {
    text.chars()
        .map(|c| {
            if c.is_alphanumeric() {
                c.to_lowercase().next().unwrap_or('_')
            } else {
                '_'
            }
        })
        .collect()
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text.as_bytes())?;
    Ok(())
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    /// Writes a small two-sample study (psychology + gpt counterpart) with
    /// questionnaire data and lexical resources into `dir`.
    pub(crate) fn fixture_config(dir: &Path) -> RunConfig {
        let data = dir.join("data");
        fs::create_dir_all(data.join("resources")).unwrap();

        let mut assoc = String::from(
            "participant_id,cue,response_1,response_2,response_3,\
             valence_cue,valence_r1,valence_r2,valence_r3\n",
        );
        // psychology_001..004 lean anxious, 005..008 lean relaxed, 009 at
        // the questionnaire median
        for i in 1..=9u32 {
            let pid = format!("psychology_{i:03}");
            if i <= 4 {
                assoc.push_str(&format!("{pid},matematica,numeri,ansia,esame,2,3,1,1\n"));
                assoc.push_str(&format!("{pid},ansia,paura,esame,stress,1,1,1,1\n"));
            } else {
                assoc.push_str(&format!("{pid},matematica,numeri,logica,studio,3,3,3,4\n"));
                assoc.push_str(&format!("{pid},ansia,paura,stress,studio,1,1,2,4\n"));
            }
            assoc.push_str(&format!("{pid},scienza,scoperta,futuro,ricerca,5,5,5,4\n"));
            assoc.push_str(&format!("{pid},scuola,compiti,amici,noia,3,2,5,2\n"));
        }
        for i in 1..=4u32 {
            let pid = format!("gpt_oss_psychology_{i:03}");
            assoc.push_str(&format!("{pid},matematica,equazione,numeri,teoria,3,3,3,2\n"));
            assoc.push_str(&format!("{pid},ansia,stress,paura,,1,2,1,\n"));
            assoc.push_str(&format!("{pid},scienza,teoria,scoperta,futuro,4,3,4,4\n"));
            assoc.push_str(&format!("{pid},scuola,compiti,voti,noia,3,3,3,2\n"));
        }
        fs::write(data.join("associations.csv"), assoc).unwrap();

        let mut mas = String::from("participant_id,item_01,item_02,item_03,item_04\n");
        // sorted totals [4..=12] have median 8: 001..004 high, 005..008
        // low, 009 excluded at the median
        let totals = [9u32, 10, 11, 12, 4, 5, 6, 7, 8];
        for (i, total) in totals.iter().enumerate() {
            let base = total / 4;
            let rem = total % 4;
            let items: Vec<u32> = (0..4).map(|j| base + u32::from((j as u32) < rem)).collect();
            mas.push_str(&format!(
                "psychology_{:03},{},{},{},{}\n",
                i + 1,
                items[0],
                items[1],
                items[2],
                items[3]
            ));
        }
        for i in 1..=4u32 {
            mas.push_str(&format!("gpt_oss_psychology_{i:03},{},2,2,2\n", i));
        }
        fs::write(data.join("mas_it.csv"), mas).unwrap();

        fs::write(
            data.join("resources/lemma_map.tsv"),
            "numeri\tnumero\ncompiti\tcompito\nvoti\tvoto\n",
        )
        .unwrap();
        let mut emotions = String::new();
        // joy trust fear surprise sadness disgust anger anticipation
        emotions.push_str("paura\t0\t0\t1\t0\t0\t0\t0\t0\n");
        emotions.push_str("ansia\t0\t0\t1\t0\t1\t0\t0\t0\n");
        emotions.push_str("stress\t0\t0\t1\t0\t0\t0\t1\t0\n");
        emotions.push_str("scoperta\t1\t0\t0\t1\t0\t0\t0\t1\n");
        emotions.push_str("amici\t1\t1\t0\t0\t0\t0\t0\t0\n");
        emotions.push_str("noia\t0\t0\t0\t0\t1\t0\t0\t0\n");
        emotions.push_str("futuro\t0\t0\t0\t0\t0\t0\t0\t1\n");
        for i in 0..40 {
            let mask: [u8; 8] = [
                u8::from(i % 5 == 0),
                u8::from(i % 7 == 1),
                u8::from(i % 6 == 2),
                u8::from(i % 9 == 3),
                u8::from(i % 8 == 4),
                u8::from(i % 11 == 5),
                u8::from(i % 10 == 6),
                u8::from(i % 4 == 3),
            ];
            emotions.push_str(&format!(
                "filler{i:02}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                mask[0], mask[1], mask[2], mask[3], mask[4], mask[5], mask[6], mask[7]
            ));
        }
        fs::write(data.join("resources/emotion_lexicon.tsv"), emotions).unwrap();

        let mut norms = String::new();
        for (w, s) in [
            ("numero", 3.9),
            ("esame", 4.0),
            ("paura", 1.8),
            ("stress", 2.0),
            ("scoperta", 2.5),
            ("futuro", 1.5),
            ("ricerca", 2.8),
            ("compito", 4.2),
            ("amici", 4.5),
            ("noia", 1.6),
            ("logica", 1.9),
            ("studio", 3.0),
            ("matematica", 2.2),
            ("equazione", 2.1),
            ("teoria", 1.4),
            ("voto", 3.8),
        ] {
            norms.push_str(&format!("{w}\t{s}\n"));
        }
        for i in 0..60 {
            norms.push_str(&format!("norm{i:02}\t{}\n", 1.0 + (i as f64 % 41.0) / 10.0));
        }
        fs::write(data.join("resources/concreteness_norms.tsv"), norms).unwrap();
        fs::write(
            data.join("resources/translations.tsv"),
            "matematica\tmathematics\nansia\tanxiety\nscienza\tscience\n",
        )
        .unwrap();

        let mut config = RunConfig::default();
        config.paths.associations = vec![data.join("associations.csv")];
        config.paths.mas_it = Some(data.join("mas_it.csv"));
        config.paths.output_dir = dir.join("out");
        config.resources.lemma_map = Some(data.join("resources/lemma_map.tsv"));
        config.resources.emotion_lexicon = Some(data.join("resources/emotion_lexicon.tsv"));
        config.resources.concreteness_norms =
            Some(data.join("resources/concreteness_norms.tsv"));
        config.resources.translations = Some(data.join("resources/translations.tsv"));
        config.params.n_null_emotion = 200;
        config.params.n_null_concreteness = 100;
        config
    }

    fn read_tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
        let mut out = BTreeMap::new();
        let mut stack = vec![dir.to_path_buf()];
        while let Some(d) = stack.pop() {
            for entry in fs::read_dir(&d).unwrap() {
                let path = entry.unwrap().path();
                if path.is_dir() {
                    stack.push(path);
                } else {
                    let rel = path.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                    out.insert(rel, fs::read(&path).unwrap());
                }
            }
        }
        out
    }

    #[test]
    fn group_key_round_trip() {
        let k: GroupKey = "Psychology:HIGH".parse().unwrap();
        assert_eq!(k.tag, "psychology");
        assert_eq!(k.subgroup, Some(Subgroup::HighAnxiety));
        assert_eq!(k.to_string(), "psychology:high");
        let k: GroupKey = "experts".parse().unwrap();
        assert_eq!(k.to_string(), "experts");
        assert!("x:middle".parse::<GroupKey>().is_err());
    }

    #[test]
    fn ingest_reports_counts_and_subgroups() {
        let dir = tempfile::tempdir().unwrap();
        let config = fixture_config(dir.path());
        let report = cmd_ingest(&config).unwrap();
        let psy = &report.samples["psychology"];
        assert_eq!(psy.participants_kept, 9);
        assert_eq!(psy.participants_dropped, 0);
        let sub = psy.subgroups.as_ref().unwrap();
        assert_eq!((sub.low, sub.high, sub.excluded), (4, 4, 1));
        assert!(report.samples.contains_key("gpt_psychology"));
        assert!(config.paths.output_dir.join("ingest_report.json").exists());
    }

    #[test]
    fn unknown_group_lists_available() {
        let dir = tempfile::tempdir().unwrap();
        let config = fixture_config(dir.path());
        let dataset = load_dataset(&config).unwrap();
        let err = group_context(&config, &dataset, &"martians".parse().unwrap()).unwrap_err();
        match err {
            Error::UnknownGroup(msg) => {
                assert!(msg.contains("psychology"));
                assert!(msg.contains("psychology:low"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn subgroup_selection_filters_participants() {
        let dir = tempfile::tempdir().unwrap();
        let config = fixture_config(dir.path());
        let dataset = load_dataset(&config).unwrap();
        let high = group_context(&config, &dataset, &"psychology:high".parse().unwrap()).unwrap();
        let ids: BTreeSet<&str> = high
            .records
            .iter()
            .map(|r| r.participant_id.as_str())
            .collect();
        assert_eq!(
            ids,
            ["psychology_001", "psychology_002", "psychology_003", "psychology_004"]
                .into_iter()
                .collect()
        );
    }

    #[test]
    fn analyze_bundle_is_byte_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let config = fixture_config(dir.path());
        let group: GroupKey = "psychology".parse().unwrap();
        let targets = vec!["matematica".to_string(), "ansia".to_string(), "marte".to_string()];
        let a = cmd_analyze(&config, &group, &targets, 42, Some(dir.path().join("b1"))).unwrap();
        let b = cmd_analyze(&config, &group, &targets, 42, Some(dir.path().join("b2"))).unwrap();
        assert_eq!(a.skipped, vec!["marte".to_string()]);
        assert_eq!(a.analyzed, vec!["matematica".to_string(), "ansia".to_string()]);
        let t1 = read_tree(&a.bundle_dir);
        let t2 = read_tree(&b.bundle_dir);
        assert_eq!(
            t1.keys().collect::<Vec<_>>(),
            t2.keys().collect::<Vec<_>>()
        );
        for (name, bytes) in &t1 {
            assert_eq!(Some(bytes), t2.get(name), "file {name} differs");
        }
        // a different seed must change resampled outputs
        let c = cmd_analyze(&config, &group, &targets, 43, Some(dir.path().join("b3"))).unwrap();
        let t3 = read_tree(&c.bundle_dir);
        assert_ne!(t1["frames/matematica.json"], t3["frames/matematica.json"]);
    }

    #[test]
    fn analyze_bundle_contents() {
        let dir = tempfile::tempdir().unwrap();
        let config = fixture_config(dir.path());
        let group: GroupKey = "psychology:high".parse().unwrap();
        let out = cmd_analyze(
            &config,
            &group,
            &["matematica".to_string(), "ansia".to_string()],
            7,
            None,
        )
        .unwrap();
        let manifest: Manifest = serde_json::from_str(
            &fs::read_to_string(out.bundle_dir.join("manifest.json")).unwrap(),
        )
        .unwrap();
        assert_eq!(manifest.group, "psychology:high");
        assert_eq!(manifest.seed, 7);
        assert!(!manifest.config_hash.is_empty());
        let frame: FrameReport = serde_json::from_str(
            &fs::read_to_string(out.bundle_dir.join("frames/matematica.json")).unwrap(),
        )
        .unwrap();
        assert!(frame.members.contains_key("ansia"));
        assert!(frame.emotions.is_some());
        assert!(frame.concreteness.is_some());
        let jaccard_tsv = fs::read_to_string(out.bundle_dir.join("jaccard.tsv")).unwrap();
        assert!(jaccard_tsv.starts_with("target\tmatematica\tansia"));
    }

    #[test]
    fn render_is_byte_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let config = fixture_config(dir.path());
        let group: GroupKey = "psychology".parse().unwrap();
        let out = cmd_analyze(
            &config,
            &group,
            &["matematica".to_string(), "scienza".to_string()],
            3,
            None,
        )
        .unwrap();
        let r1 = cmd_render(&config, &out.bundle_dir, true).unwrap();
        let files1: BTreeMap<String, Vec<u8>> = r1
            .files
            .iter()
            .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(p).unwrap()))
            .collect();
        let r2 = cmd_render(&config, &out.bundle_dir, true).unwrap();
        for p in &r2.files {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            assert_eq!(files1[&name], fs::read(p).unwrap(), "{name} changed");
        }
        assert!(files1.keys().any(|n| n.starts_with("frame_")));
        assert!(files1.keys().any(|n| n.starts_with("flower_")));
        assert!(files1.contains_key("jaccard_bars.svg"));
        // frame labels use the translation map
        let frame_svg =
            String::from_utf8(files1["frame_matematica.svg"].clone()).unwrap();
        assert!(frame_svg.contains("mathematics"));
    }

    #[test]
    fn render_without_bundle_errors() {
        let dir = tempfile::tempdir().unwrap();
        let config = fixture_config(dir.path());
        assert!(matches!(
            cmd_render(&config, &dir.path().join("nope"), false),
            Err(Error::MissingReport(_))
        ));
    }

    #[test]
    fn focused_commands_agree_with_bundle() {
        let dir = tempfile::tempdir().unwrap();
        let config = fixture_config(dir.path());
        let group: GroupKey = "psychology".parse().unwrap();
        let features = cmd_features(&config, &group).unwrap();
        assert!(features.n_nodes > 5);
        let overlaps = cmd_jaccard(
            &config,
            &group,
            &["matematica".into(), "ansia".into()],
        )
        .unwrap();
        let j = overlaps[&("ansia".to_string(), "matematica".to_string())];
        assert!((0.0..=1.0).contains(&j));
        // esame and paura are shared neighbours in the anxious half
        assert!(j > 0.0);
        let rows = cmd_concreteness(&config, &group, &["matematica".into()], 5).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].keyword, "matematica");
        let emotions = cmd_emotions(&config, &group, &["ansia".into()], 5).unwrap();
        assert!(emotions["ansia"].count(crate::affect::Emotion::Fear) >= 2);
    }

    #[test]
    fn twin_csv_round_trips_through_ingestion() {
        use crate::twin::{Gender, Socioeconomic, TwinProfile, TwinRun};
        let dir = tempfile::tempdir().unwrap();
        let config = fixture_config(dir.path());
        let profile = TwinProfile {
            gender: Gender::Female,
            age: 20,
            education: Education::BscPsychology,
            year: 2,
            socioeconomic: Socioeconomic::Medium,
        };
        let record = crate::ingest::AssociationRecord {
            participant_id: "gpt_oss_psychology_001".into(),
            group_tag: crate::ingest::GroupTag::parse("gpt_oss_psychology_001"),
            cue: "matematica".into(),
            responses: vec!["numeri".into(), "ansia".into()],
            valences: [("matematica".to_string(), 3u8), ("ansia".to_string(), 1u8)]
                .into_iter()
                .collect(),
        };
        let run = TwinRun {
            participant_id: "gpt_oss_psychology_001".into(),
            group: "psychology".into(),
            profile,
            cue_set_id: "set_3".into(),
            model_id: "test".into(),
            raw_responses: BTreeMap::new(),
            records: vec![record.clone()],
            mas_it: None,
            warnings: Vec::new(),
        };
        let path = dir.path().join("twins.csv");
        write_twin_csv(&path, &[run], &config).unwrap();
        let parsed = parse_associations(&path, &config.columns).unwrap();
        assert_eq!(parsed.records.len(), 1);
        assert_eq!(parsed.records[0], record);
    }
}
