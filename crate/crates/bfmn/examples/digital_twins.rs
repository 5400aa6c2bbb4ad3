//! Digital-twin participants without any network access: demographic
//! profile sampling, gendered persona prompts in Italian and English, and
//! parsing of structured model replies into association records.
//!
//! To actually generate data against an endpoint, configure `[twin]` in a
//! run config and use `bfmn simulate` (needs an API key in the
//! environment).
//!
//! ```bash
//! cargo run -p bfmn --example digital_twins
//! ```

use bfmn::twin::{
    likert_value, parse_reply, record_from_reply, render_prompt, sample_profile, Education,
    PromptLanguage,
};

fn main() -> bfmn::Result<()> {
    // profiles are sampled uniformly inside documented ranges
    for (seed, education) in [
        (1u64, Education::HighschoolFinalYear),
        (2, Education::BscPsychology),
        (3, Education::BscPhysics),
    ] {
        let profile = sample_profile(seed, education);
        println!("{profile:?}");
        println!("  it: {}", render_prompt(&profile, PromptLanguage::It));
        println!("  en: {}\n", render_prompt(&profile, PromptLanguage::En));
    }

    // the reply parser handles well-formed output...
    let reply = r#"{"associazioni": ["numeri", "ansia", "logica"],
                    "valenze": {"matematica": 3, "numeri": 3, "ansia": 1, "logica": 4}}"#;
    let parsed = parse_reply("matematica", reply).expect("well-formed");
    let record = record_from_reply("gpt_oss_psychology_001", "matematica", &parsed);
    println!("well-formed reply -> {} responses, {} ratings", record.responses.len(), record.valences.len());

    // ...over-long association lists...
    let parsed = parse_reply(
        "scuola",
        r#"{"associazioni": ["compiti", "voti", "amici", "noia", "esami"], "valenze": {}}"#,
    )
    .expect("parsable");
    println!(
        "over-long reply  -> kept {:?} with warning: {}",
        parsed.responses, parsed.warnings[0]
    );

    // ...word-Likert ratings...
    println!(
        "word ratings     -> \"molto positivo\" = {:?}, \"neutro\" = {:?}, \"boh\" = {:?}",
        likert_value(&serde_json::json!("molto positivo")),
        likert_value(&serde_json::json!("neutro")),
        likert_value(&serde_json::json!("boh")),
    );

    // ...and flags malformed replies for retry
    let err = parse_reply("fisica", "Mi dispiace, non posso aiutarti.").unwrap_err();
    println!("malformed reply  -> retryable error: {err}");
    Ok(())
}
