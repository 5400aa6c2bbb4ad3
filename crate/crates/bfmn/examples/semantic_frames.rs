//! Semantic frames and valence auras: extract the neighbourhood of a
//! target word, read off its aura, and measure frame overlap between
//! mathematics and anxiety across anxiety subgroups.
//!
//! ```bash
//! cargo run -p bfmn --example semantic_frames
//! ```

use std::path::Path;

use bfmn::frames::{aura, extract_frame, jaccard};
use bfmn::pipeline::{group_context, load_dataset, GroupKey, RunConfig};

fn main() -> bfmn::Result<()> {
    let config = RunConfig::load(
        &Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/config.toml"),
    )?;
    let dataset = load_dataset(&config)?;

    for group in ["psychology:high", "psychology:low", "gpt_psychology"] {
        let key: GroupKey = group.parse()?;
        let context = group_context(&config, &dataset, &key)?;

        let frame_math = extract_frame(&context.graph, "matematica")?;
        let frame_anx = extract_frame(&context.graph, "ansia")?;
        let a = aura(&frame_math);
        println!(
            "{group}: mathematics frame has {} members \
             (aura {} / +{} ={} -{}), J(math, anxiety) = {:.3}",
            frame_math.member_count(),
            a.polarity,
            a.positive,
            a.neutral,
            a.negative,
            jaccard(&frame_math, &frame_anx),
        );
    }

    // auras can diverge from the target's own label
    let key: GroupKey = "psychology:high".parse()?;
    let context = group_context(&config, &load_dataset(&config)?, &key)?;
    let frame = extract_frame(&context.graph, "scuola")?;
    let a = aura(&frame);
    println!(
        "\nhigh-anxiety `scuola`: own label {}, aura {} (members: {})",
        context.graph.valence("scuola").unwrap(),
        a.polarity,
        frame
            .members
            .iter()
            .take(8)
            .cloned()
            .collect::<Vec<_>>()
            .join(", "),
    );
    Ok(())
}
