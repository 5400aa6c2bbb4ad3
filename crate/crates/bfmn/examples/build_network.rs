//! Build a group-level forma mentis network from the bundled sample study:
//! parse the association CSV, drop participants with too much missing
//! data, split by questionnaire median, and aggregate the edges.
//!
//! ```bash
//! cargo run -p bfmn --example build_network
//! ```

use std::path::Path;

use bfmn::graph::build_bfmn;
use bfmn::ingest::{
    assign_subgroups, clean_participants, parse_associations, parse_mas_it, ColumnSpec, Subgroup,
};
use bfmn::valence::categorize_group;

fn main() -> bfmn::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data");

    let parsed = parse_associations(&data.join("associations.csv"), &ColumnSpec::default())?;
    println!(
        "parsed {} rows ({} diagnostics)",
        parsed.records.len(),
        parsed.diagnostics.len()
    );

    // 8 cues x 3 responses expected per participant
    let cleaned = clean_participants(parsed.records, 8);
    for d in &cleaned.dropped {
        println!(
            "dropped {}: {}/{} cells missing",
            d.participant_id, d.missing_cells, d.expected_cells
        );
    }

    let scores = parse_mas_it(&data.join("mas_it.csv"), None)?;
    let human_scores: Vec<_> = scores
        .into_iter()
        .filter(|s| {
            !s.participant_id.starts_with("gpt")
                && cleaned.kept.iter().any(|r| r.participant_id == s.participant_id)
        })
        .collect();
    let assignments = assign_subgroups(&human_scores);
    let high: Vec<&str> = assignments
        .iter()
        .filter(|a| a.subgroup == Subgroup::HighAnxiety)
        .map(|a| a.participant_id.as_str())
        .collect();
    println!(
        "median split: {} high anxiety, {} low, {} excluded",
        high.len(),
        assignments.iter().filter(|a| a.subgroup == Subgroup::LowAnxiety).count(),
        assignments.iter().filter(|a| a.subgroup == Subgroup::Excluded).count(),
    );

    // high-anxiety subgroup network
    let records: Vec<_> = cleaned
        .kept
        .iter()
        .filter(|r| high.contains(&r.participant_id.as_str()))
        .cloned()
        .collect();
    let labels = categorize_group(&records, 0.1);
    let (graph, warnings) = build_bfmn("psychology:high", &records, &labels);
    println!(
        "high-anxiety BFMN: {} nodes, {} edges ({} label warnings)",
        graph.node_count(),
        graph.edge_count(),
        warnings.len()
    );
    for word in ["matematica", "ansia"] {
        println!(
            "  {word}: degree {}, valence {}",
            graph.degree(word).unwrap_or(0),
            graph.valence(word).map(|v| v.to_string()).unwrap_or_default()
        );
    }
    Ok(())
}
