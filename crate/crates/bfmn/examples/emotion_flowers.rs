//! Plutchik emotion profiles with resampled-null significance, and the
//! emotional-flower SVG built from them. Petals of significant emotions
//! are filled; the rest stay as outlines.
//!
//! ```bash
//! cargo run -p bfmn --example emotion_flowers
//! ```

use std::path::Path;

use bfmn::affect::{emotion_counts, emotion_zscores, EMOTIONS};
use bfmn::frames::extract_frame;
use bfmn::ingest::load_resources;
use bfmn::pipeline::{group_context, load_dataset, GroupKey, RunConfig};
use bfmn::render::render_flower_svg;

fn main() -> bfmn::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data");
    let config = RunConfig::load(&data.join("config.toml"))?;
    let (resources, _) = load_resources(
        &data.join("resources/lemma_map.tsv"),
        &data.join("resources/emotion_lexicon.tsv"),
        &data.join("resources/concreteness_norms.tsv"),
        Some(&data.join("resources/translations.tsv")),
    )?;

    let dataset = load_dataset(&config)?;
    let key: GroupKey = "psychology:high".parse()?;
    let context = group_context(&config, &dataset, &key)?;
    let frame = extract_frame(&context.graph, "ansia")?;

    let counts = emotion_counts(&frame.members, &resources);
    println!("anxiety frame, raw emotion counts ({} members):", frame.member_count());
    for e in EMOTIONS {
        println!("  {:<13} {}", e.name(), counts[e.index()]);
    }

    let profile = emotion_zscores(&frame.members, &resources, 1000, 42, true)?;
    println!("\nz-scores against 1000 null word lists (seed 42):");
    for e in EMOTIONS {
        println!(
            "  {:<13} z = {:>6.2}{}",
            e.name(),
            profile.z_score(e),
            if profile.is_significant(e) { "  *" } else { "" }
        );
    }

    let svg = render_flower_svg(&profile, "anxiety");
    let out = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../target/sample_out/flower_ansia.svg");
    std::fs::create_dir_all(out.parent().unwrap())?;
    std::fs::write(&out, svg)?;
    println!("\nflower written to {}", out.display());
    Ok(())
}
