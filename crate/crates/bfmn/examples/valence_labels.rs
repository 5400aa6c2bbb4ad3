//! Word valence categorization: every word's ratings are tested against
//! the pooled ratings of all other words (two-tailed Kruskal-Wallis,
//! alpha = 0.1) and labelled positive, neutral or negative.
//!
//! ```bash
//! cargo run -p bfmn --example valence_labels
//! ```

use std::path::Path;

use bfmn::ingest::{parse_associations, ColumnSpec};
use bfmn::valence::{categorize_group, kruskal_wallis, valence_table, Valence};

fn main() -> bfmn::Result<()> {
    // the test itself, on a toy comparison
    let test = kruskal_wallis(&[1.0, 1.0, 1.0, 2.0], &[4.0, 5.0, 4.0, 5.0, 3.0])?;
    println!("toy KW: H = {:.4}, p = {:.6}", test.h, test.p);

    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data");
    let parsed = parse_associations(&data.join("associations.csv"), &ColumnSpec::default())?;
    let human: Vec<_> = parsed
        .records
        .into_iter()
        .filter(|r| !r.group_tag.gpt)
        .collect();

    let labels = categorize_group(&human, 0.1);
    let count = |v: Valence| labels.values().filter(|l| l.label == v).count();
    println!(
        "{} words labelled: {} positive, {} neutral, {} negative",
        labels.len(),
        count(Valence::Positive),
        count(Valence::Neutral),
        count(Valence::Negative),
    );

    println!("\nnon-neutral labels:");
    for label in labels.values().filter(|l| l.label != Valence::Neutral) {
        println!(
            "  {:<14} {:<9} p = {:.4}  mean = {:.2}  n = {}",
            label.word,
            label.label.to_string(),
            label.p_value.unwrap_or(f64::NAN),
            label.mean.unwrap_or(f64::NAN),
            label.n_ratings
        );
    }

    // audit table (word, label, p, mean, n), same layout the CLI emits
    let table = valence_table(&labels);
    println!("\nvalence table: {} rows", table.lines().count() - 1);
    Ok(())
}
