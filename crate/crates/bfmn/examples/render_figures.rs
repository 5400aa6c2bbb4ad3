//! End-to-end figure pipeline: run a full analysis bundle for one group
//! and render every figure (circular frames, emotional flowers, Jaccard
//! bars) from it. Both steps are byte-deterministic given the seed.
//!
//! ```bash
//! cargo run -p bfmn --example render_figures
//! ```

use std::path::Path;

use bfmn::pipeline::{cmd_analyze, cmd_render, GroupKey, RunConfig};

fn main() -> bfmn::Result<()> {
    let config = RunConfig::load(
        &Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/config.toml"),
    )?;
    let group: GroupKey = "psychology:high".parse()?;
    let targets: Vec<String> = ["matematica", "statistica", "scienza", "scuola", "ansia"]
        .into_iter()
        .map(String::from)
        .collect();

    let outcome = cmd_analyze(&config, &group, &targets, 42, None)?;
    println!(
        "bundle: {} ({} targets analyzed, {} skipped)",
        outcome.bundle_dir.display(),
        outcome.analyzed.len(),
        outcome.skipped.len()
    );

    let rendered = cmd_render(&config, &outcome.bundle_dir, true)?;
    for file in &rendered.files {
        println!("  {}", file.display());
    }
    println!("figures: {}", rendered.files.len());
    Ok(())
}
