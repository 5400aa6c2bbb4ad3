//! Persona prompt rendering with gendered Italian morphology.

use super::{Education, Gender, Socioeconomic, TwinProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PromptLanguage {
    It,
    En,
}

impl std::str::FromStr for PromptLanguage {
    type Err = crate::error::Error;
    fn from_str(s: &str) -> crate::error::Result<Self> {
        match s.to_lowercase().as_str() {
            "it" | "italian" => Ok(PromptLanguage::It),
            "en" | "english" => Ok(PromptLanguage::En),
            other => Err(crate::error::Error::Config(format!(
                "unknown prompt language `{other}`"
            ))),
        }
    }
}

fn year_word_it(year: u8) -> &'static str {
    match year {
        1 => "primo",
        2 => "secondo",
        3 => "terzo",
        5 => "quinto",
        _ => "primo",
    }
}

fn year_word_en(year: u8) -> &'static str {
    match year {
        1 => "first",
        2 => "second",
        3 => "third",
        5 => "fifth",
        _ => "first",
    }
}

fn education_it(e: Education) -> &'static str {
    match e {
        Education::HighschoolFinalYear => "scuola superiore",
        Education::BscPsychology => "laurea triennale in psicologia",
        Education::BscPhysics => "laurea triennale in fisica",
    }
}

fn education_en(e: Education) -> &'static str {
    match e {
        Education::HighschoolFinalYear => "high school",
        Education::BscPsychology => "a BSc in Psychology",
        Education::BscPhysics => "a BSc in Physics",
    }
}

fn socioeconomic_it(s: Socioeconomic) -> &'static str {
    match s {
        Socioeconomic::Low => "basse",
        Socioeconomic::MediumLow => "medio-basse",
        Socioeconomic::Medium => "medie",
        Socioeconomic::MediumHigh => "medio-alte",
        Socioeconomic::High => "alte",
    }
}

fn socioeconomic_en(s: Socioeconomic) -> &'static str {
    match s {
        Socioeconomic::Low => "low",
        Socioeconomic::MediumLow => "medium-low",
        Socioeconomic::Medium => "medium",
        Socioeconomic::MediumHigh => "medium-high",
        Socioeconomic::High => "high",
    }
}

/// Renders the personification prompt for a profile. Pure and byte-stable:
/// the same (profile, language) always yields the same string, and two
/// profiles differing only in gender differ only in gender morphemes.
pub fn render_prompt(profile: &TwinProfile, language: PromptLanguage) -> String {
    match language {
        PromptLanguage::It => {
            let (subject, o_a) = match profile.gender {
                Gender::Male => ("uno studente italiano", "o"),
                Gender::Female => ("una studentessa italiana", "a"),
            };
            format!(
                "Sei {subject} di {age} anni. Sei iscritt{o_a} al {year} anno di {education}. \
                 Sei cresciut{o_a} e vivi in condizioni socio-economiche {socio}. Pertanto, \
                 ricorda che le risposte da fornire nel compito devono essere originali, \
                 creative e coerenti con le tue caratteristiche uniche.",
                age = profile.age,
                year = year_word_it(profile.year),
                education = education_it(profile.education),
                socio = socioeconomic_it(profile.socioeconomic),
            )
        }
        PromptLanguage::En => format!(
            "You are a student of Italian nationality, aged {age}. You are enrolled in the \
             {year} year of {education}. You grew up and live in {socio} socio-economic \
             conditions. Therefore, remember that the responses you provide in the task \
             should be original, creative, and consistent with your unique characteristics.",
            age = profile.age,
            year = year_word_en(profile.year),
            education = education_en(profile.education),
            socio = socioeconomic_en(profile.socioeconomic),
        ),
    }
}
