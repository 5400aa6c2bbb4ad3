//! Digital-twin participants: demographic profile sampling, persona prompt
//! rendering, chat-endpoint querying, and reply parsing into association
//! records.

mod client;
mod parse;
mod prompt;

pub use client::{
    run_mas_it, run_twin, ChatClient, EndpointConfig, RequestLog, RequestLogEntry, TwinAssignment,
};
pub use parse::{likert_value, parse_reply, record_from_reply, ParsedCue};
pub use prompt::{render_prompt, PromptLanguage};

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{AssociationRecord, MasItScore};
use crate::sampling::{rng_for, sub_seed};
use crate::stats::fnv1a64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gender {
    Male,
    Female,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Education {
    HighschoolFinalYear,
    BscPsychology,
    BscPhysics,
}

impl Education {
    /// Group segment used in synthetic participant ids.
    pub fn group_name(self) -> &'static str {
        match self {
            Education::HighschoolFinalYear => "highschool",
            Education::BscPsychology => "psychology",
            Education::BscPhysics => "physics",
        }
    }
}

impl std::str::FromStr for Education {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_lowercase().as_str() {
            "highschool" | "high_school" | "highschool_final_year" => {
                Ok(Education::HighschoolFinalYear)
            }
            "psychology" | "bsc_psychology" => Ok(Education::BscPsychology),
            "physics" | "bsc_physics" => Ok(Education::BscPhysics),
            other => Err(Error::Config(format!("unknown education target `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Socioeconomic {
    Low,
    MediumLow,
    Medium,
    MediumHigh,
    High,
}

pub const SOCIOECONOMIC_BANDS: [Socioeconomic; 5] = [
    Socioeconomic::Low,
    Socioeconomic::MediumLow,
    Socioeconomic::Medium,
    Socioeconomic::MediumHigh,
    Socioeconomic::High,
];

/// Demographic persona for one synthetic participant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwinProfile {
    pub gender: Gender,
    /// 18..=19 for final-year high schoolers, 18..=25 for undergraduates
    pub age: u8,
    pub education: Education,
    /// 1..=3 for BSc students; 5 (final year) for high schoolers
    pub year: u8,
    pub socioeconomic: Socioeconomic,
}

impl TwinProfile {
    /// Stable fingerprint used for request-log idempotency.
    pub fn fingerprint(&self) -> u64 {
        let canon = format!(
            "{:?}|{}|{:?}|{}|{:?}",
            self.gender, self.age, self.education, self.year, self.socioeconomic
        );
        fnv1a64(canon.as_bytes())
    }
}

/// Uniformly samples a profile for the given education target.
///
/// Attribute order is fixed (gender, age, year, socioeconomic) so a seed
/// always yields the same profile. High schoolers are sampled at 18-19 in
/// their final (fifth) year; undergraduates at 18-25 in years 1-3.
pub fn sample_profile(seed: u64, education: Education) -> TwinProfile {
    let mut rng = rng_for(seed);
    let gender = if rng.random_range(0..2u8) == 0 {
        Gender::Male
    } else {
        Gender::Female
    };
    let (age, year) = match education {
        Education::HighschoolFinalYear => (rng.random_range(18..=19u8), 5),
        Education::BscPsychology | Education::BscPhysics => {
            (rng.random_range(18..=25u8), rng.random_range(1..=3u8))
        }
    };
    let socioeconomic = SOCIOECONOMIC_BANDS[rng.random_range(0..5usize)];
    TwinProfile {
        gender,
        age,
        education,
        year,
        socioeconomic,
    }
}

/// One simulated participant's full run.
#[derive(Debug, Clone, Serialize)]
pub struct TwinRun {
    pub participant_id: String,
    pub group: String,
    pub profile: TwinProfile,
    pub cue_set_id: String,
    pub model_id: String,
    /// cue -> raw reply text, as returned by the endpoint
    pub raw_responses: BTreeMap<String, String>,
    pub records: Vec<AssociationRecord>,
    pub mas_it: Option<MasItScore>,
    pub warnings: Vec<String>,
}

/// Subsamples twins per group, without replacement, down to the human
/// group sizes. Groups absent from `human_counts` pass through untouched.
pub fn match_group_sizes(
    twins: Vec<TwinRun>,
    human_counts: &BTreeMap<String, usize>,
    seed: u64,
) -> Result<Vec<TwinRun>> {
    let mut by_group: BTreeMap<String, Vec<TwinRun>> = BTreeMap::new();
    for t in twins {
        by_group.entry(t.group.clone()).or_default().push(t);
    }
    let mut out = Vec::new();
    for (group_idx, (group, mut members)) in by_group.into_iter().enumerate() {
        match human_counts.get(&group) {
            None => out.append(&mut members),
            Some(&target) => {
                if target > members.len() {
                    return Err(Error::InsufficientTwins {
                        group,
                        needed: target,
                        available: members.len(),
                    });
                }
                let mut sampler = crate::sampling::IndexSampler::new(members.len());
                let mut rng = rng_for(sub_seed(seed, group_idx as u64));
                let mut picked = Vec::new();
                sampler.draw(&mut rng, target, &mut picked);
                picked.sort_unstable();
                // drain in reverse so indices stay valid
                for &i in picked.iter().rev() {
                    out.push(members.swap_remove(i as usize));
                }
            }
        }
    }
    out.sort_by(|a, b| a.participant_id.cmp(&b.participant_id));
    Ok(out)
}
