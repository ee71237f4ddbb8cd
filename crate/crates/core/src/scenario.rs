//! Built-in cover stories.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flavor {
    Mental,
    NonMental,
}

#[derive(Debug, PartialEq, Eq)]
pub struct Scenario {
    pub id: &'static str,
    pub cover_story: &'static str,
    pub proposal_names: [&'static str; 3],
    pub attribute_names: &'static [&'static str],
    pub flavor: Flavor,
}

impl Scenario {
    pub fn proposal_name(&self, p: crate::model::Proposal) -> &'static str {
        self.proposal_names[p.index()]
    }

    pub fn attribute_name(&self, a: crate::model::Attribute) -> &'static str {
        self.attribute_names[a.index()]
    }
}

const PROPOSALS: [&str; 3] = ["A", "B", "C"];

pub static SCENARIOS: &[Scenario] = &[
    Scenario {
        id: "llm",
        cover_story: "Large language models (LLMs) could transform education, scientific discovery, and more. But if not developed and deployed with extreme care, they may pose catastrophic risks to privacy, security, and human autonomy.",
        proposal_names: PROPOSALS,
        attribute_names: &["safety and control", "development speed", "public trust"],
        flavor: Flavor::Mental,
    },
    Scenario {
        id: "moon",
        cover_story: "The stakes on the Moon have grown significantly in recent years. Lunar resources and technologies could determine the balance of power on Earth. But unrestrained development risks turning the Moon into a conflict zone and ecological disaster. We must now decide on a development policy that will shape the future of lunar settlements.",
        proposal_names: PROPOSALS,
        attribute_names: &[
            "scientific advancement",
            "commercial opportunities",
            "preservation of the lunar environment",
        ],
        flavor: Flavor::Mental,
    },
    Scenario {
        id: "ocean",
        cover_story: "Recent technological advancements have made ocean energy more viable, attracting attention from environmental groups, energy companies, and coastal communities. We must now choose a development policy that will shape the future of the country's energy landscape. Their decision will have significant impacts.",
        proposal_names: PROPOSALS,
        attribute_names: &["energy production", "marine ecosystems", "coastal economies"],
        flavor: Flavor::Mental,
    },
    Scenario {
        id: "education",
        cover_story: "Rapid technological advancements and changing workforce needs have sparked a nationwide debate on the effectiveness of the current education system. Student test results are slipping, teachers are leaving the profession, and employers warn of a skills mismatch between graduates and workforce needs.",
        proposal_names: PROPOSALS,
        attribute_names: &["student achievement", "teacher satisfaction", "economic competitiveness"],
        flavor: Flavor::Mental,
    },
    Scenario {
        id: "lunch",
        cover_story: "A school is deciding whether to refrain from serving meat in the lunchroom. This decision will also save the school a lot of money.",
        proposal_names: PROPOSALS,
        attribute_names: &["cost to school", "student choice", "animal suffering"],
        flavor: Flavor::Mental,
    },
    Scenario {
        id: "metals",
        cover_story: "You are a scientist running experiments that both produce and use different rare metals. You want to keep the levels of these metals sufficiently high or low in order to run future experiments. Here each experiment is a different *choice* and the metals it uses or produces are the *attributes*. Unfortunately, to run an experiment, you must first get approval from your employer's automated screening system.",
        proposal_names: PROPOSALS,
        attribute_names: &["cesium", "molybdenum", "selenium"],
        flavor: Flavor::NonMental,
    },
    // Placeholder labels for two-attribute configurations.
    Scenario {
        id: "abstract2",
        cover_story: "An abstract two-attribute game.",
        proposal_names: PROPOSALS,
        attribute_names: &["x", "y"],
        flavor: Flavor::Mental,
    },
];

pub fn get(id: &str) -> Option<&'static Scenario> {
    SCENARIOS.iter().find(|s| s.id == id)
}

/// The mental three-attribute scenarios used for critical trials.
pub fn mental() -> impl Iterator<Item = &'static Scenario> {
    SCENARIOS
        .iter()
        .filter(|s| s.flavor == Flavor::Mental && s.attribute_names.len() == 3)
}

pub fn non_mental() -> impl Iterator<Item = &'static Scenario> {
    SCENARIOS.iter().filter(|s| s.flavor == Flavor::NonMental)
}
