//! Session configuration as accepted by `create_session`.

use mindgames_core::llm::ModelEndpoint;
use mindgames_core::model::{Condition, Instance};
use mindgames_core::persuaders::{DrawSchedule, PersuaderKind, Variant};
use mindgames_core::protocol::{ClassifierBinding, MessageMode, ValidationOptions};
use serde::{Deserialize, Serialize};

/// Which instance a session plays.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InstanceSelector {
    /// An instance from the server's pool, by id.
    Id { id: String },
    /// A pool instance picked by seed, or by session order when absent.
    Sampled {
        #[serde(default)]
        seed: Option<u64>,
    },
    Inline { instance: Box<Instance> },
}

impl Default for InstanceSelector {
    fn default() -> Self {
        InstanceSelector::Sampled { seed: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomSettings {
    pub draws: usize,
    #[serde(default)]
    pub schedule: DrawSchedule,
    #[serde(default)]
    pub seed: u64,
}

impl Default for RandomSettings {
    fn default() -> Self {
        RandomSettings { draws: 6, schedule: DrawSchedule::default(), seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    #[serde(default)]
    pub instance: InstanceSelector,
    /// Move the selected instance onto this cover story.
    #[serde(default)]
    pub scenario: Option<String>,
    pub condition: Condition,
    #[serde(default)]
    pub variant: Variant,
    pub persuader: PersuaderKind,
    #[serde(default)]
    pub classifier: ClassifierBinding,
    /// Defaults to the ten-character minimum for human persuaders and no
    /// length check otherwise.
    #[serde(default)]
    pub validation: Option<ValidationOptions>,
    #[serde(default)]
    pub random: RandomSettings,
    /// Endpoint for server-driven model persuaders; falls back to the
    /// environment.
    #[serde(default)]
    pub model: Option<ModelEndpoint>,
}

impl SessionConfig {
    pub fn new(condition: Condition, variant: Variant, persuader: PersuaderKind) -> Self {
        SessionConfig {
            instance: InstanceSelector::default(),
            scenario: None,
            condition,
            variant,
            persuader,
            classifier: ClassifierBinding::Template,
            validation: None,
            random: RandomSettings::default(),
            model: None,
        }
    }

    pub fn with_instance(mut self, selector: InstanceSelector) -> Self {
        self.instance = selector;
        self
    }

    pub fn mode(&self) -> MessageMode {
        self.variant.mode()
    }

    pub fn validation_options(&self) -> ValidationOptions {
        self.validation.unwrap_or(match self.persuader {
            PersuaderKind::Human => ValidationOptions::human(),
            _ => ValidationOptions::default(),
        })
    }

    /// Checks that do not depend on the chosen instance.
    pub fn check(&self) -> Result<(), String> {
        match self.persuader {
            PersuaderKind::Human if self.mode() != MessageMode::Natural => {
                Err(format!("human persuaders cannot play the {} variant", self.variant))
            }
            PersuaderKind::Bruteforce if self.condition != Condition::Revealed => {
                Err("the bruteforce persuader needs the revealed condition".into())
            }
            PersuaderKind::Replay => Err("replay persuaders are not available as sessions".into()),
            _ => Ok(()),
        }
    }
}
