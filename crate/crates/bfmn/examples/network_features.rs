//! Structural descriptors of a whole BFMN and of single frames: node and
//! edge counts, mean clustering, average shortest path, diameter, and
//! degree hubs (top 1% of the full network, top 5% of a frame).
//!
//! ```bash
//! cargo run -p bfmn --example network_features
//! ```

use std::path::Path;

use bfmn::frames::{extract_frame, frame_features};
use bfmn::graph::{clustering_coefficient, closeness_centrality, network_features};
use bfmn::pipeline::{group_context, load_dataset, GroupKey, RunConfig};

fn main() -> bfmn::Result<()> {
    let config = RunConfig::load(
        &Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/config.toml"),
    )?;
    let dataset = load_dataset(&config)?;
    let key: GroupKey = "psychology".parse()?;
    let context = group_context(&config, &dataset, &key)?;

    let f = network_features(&context.graph, 0.01)?;
    println!("psychology network:");
    println!("  nodes {}  edges {}", f.n_nodes, f.n_edges);
    println!(
        "  mean clustering {:.4}  avg path {:.3}  diameter {} (largest component: {} nodes)",
        f.clustering, f.avg_shortest_path, f.diameter, f.lcc_nodes
    );
    println!("  hubs (top 1% by degree):");
    for (word, degree) in &f.hubs {
        println!("    {word} ({degree})");
    }

    let frame = extract_frame(&context.graph, "matematica")?;
    let ff = frame_features(&frame);
    println!("\nmathematics frame ({} nodes incl. target):", ff.n_nodes);
    println!(
        "  edges {}  clustering {:.3}  avg path {:.3}  hubs: {}",
        ff.n_edges,
        ff.clustering,
        ff.avg_shortest_path,
        ff.hubs
            .iter()
            .map(|(w, d)| format!("{w} ({d})"))
            .collect::<Vec<_>>()
            .join(", "),
    );

    println!(
        "\nnode-level: clustering(matematica) = {:.4}, closeness(matematica) = {:.4}",
        clustering_coefficient(&context.graph, "matematica")?,
        closeness_centrality(&context.graph, "matematica")?,
    );
    Ok(())
}
