//! Frame concreteness against resampled baselines: the frame's mean norm
//! score is compared to 300 random word lists of the same size, giving a
//! z-score plus Cohen's d and Cliff's delta effect sizes.
//!
//! ```bash
//! cargo run -p bfmn --example concreteness_nulls
//! ```

use std::path::Path;

use bfmn::concreteness::{
    concreteness_report, concreteness_test, frame_concreteness, null_distribution,
    CONCRETENESS_Z_CRIT,
};
use bfmn::frames::extract_frame;
use bfmn::ingest::load_resources;
use bfmn::pipeline::{group_context, load_dataset, GroupKey, RunConfig};

fn main() -> bfmn::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data");
    let config = RunConfig::load(&data.join("config.toml"))?;
    let (resources, _) = load_resources(
        &data.join("resources/lemma_map.tsv"),
        &data.join("resources/emotion_lexicon.tsv"),
        &data.join("resources/concreteness_norms.tsv"),
        None,
    )?;
    let dataset = load_dataset(&config)?;

    // the raw ingredients for one frame
    let key: GroupKey = "psychology:high".parse()?;
    let context = group_context(&config, &dataset, &key)?;
    let frame = extract_frame(&context.graph, "matematica")?;
    let scores = frame_concreteness(&frame, &resources)?;
    println!(
        "mathematics frame: {} members -> {} matched lemmas (coverage {:.0}%)",
        frame.member_count(),
        scores.matched,
        100.0 * scores.coverage()
    );
    let null = null_distribution(scores.scores.len(), &resources.concreteness_norms, 300, 7)?;
    println!(
        "null of k = {}: mean {:.3}, std {:.3} over 300 sampled lists",
        scores.scores.len(),
        null.mean,
        null.std
    );

    // the full test for several group/keyword pairs
    let mut rows = Vec::new();
    for group in ["psychology:high", "psychology:low", "gpt_psychology"] {
        let key: GroupKey = group.parse()?;
        let context = group_context(&config, &dataset, &key)?;
        for target in ["matematica", "scienza", "scuola"] {
            if !context.graph.contains(target) {
                continue;
            }
            let frame = extract_frame(&context.graph, target)?;
            if frame.is_empty() {
                continue;
            }
            rows.push(concreteness_test(
                group,
                &frame,
                &resources,
                300,
                7,
                CONCRETENESS_Z_CRIT,
            )?);
        }
    }
    println!("\n{}", concreteness_report(&rows));
    println!("(|Z| > {CONCRETENESS_Z_CRIT} is significant at the two-sided 10% level)");
    Ok(())
}
