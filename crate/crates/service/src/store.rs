//! Sessions, their visible state and transcript storage.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use mindgames_core::game::{GameError, GameOptions, GameTranscript, Outcome, Referee, SubmitResult, TurnRecord};
use mindgames_core::llm::ModelEndpoint;
use mindgames_core::model::{Condition, Instance};
use mindgames_core::persuaders::prompts::{assemble_prompt, Audience};
use mindgames_core::persuaders::{
    BruteforcePersuader, ModelPersuader, Persuader, PersuaderError, PersuaderKind, RandomBaseline, ScriptedPerfect,
    SilentPersuader, Variant,
};
use mindgames_core::protocol::{Classifier, DialogueMessage, MessageMode, PersuaderMessage, Rejection};
use mindgames_core::records::{self, Appender, RecordError};
use mindgames_core::view::{render_view_for_state, PersuaderView};
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use tokio::sync::broadcast;
use uuid::Uuid;

use crate::client::{build_classifier, HttpCompletionClient};
use crate::config::{InstanceSelector, SessionConfig};

pub const TRANSCRIPT_FILE: &str = "transcripts.ndjson";

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("unknown session {0}")]
    UnknownSession(Uuid),
    #[error("bad config: {0}")]
    BadConfig(String),
    #[error("the session is finished")]
    SessionFinished,
    #[error("another message is in flight for this session")]
    Busy,
    #[error("message rejected: {0}")]
    ValidationRejected(Rejection),
    #[error("{0}")]
    NotSupported(String),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("storage: {0}")]
    Storage(#[from] RecordError),
}

/// What the persuader's client gets to see. Never carries the target's
/// value function or knowledge in the hidden condition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionState {
    pub id: Uuid,
    /// Completed persuader turns.
    pub turn: usize,
    pub num_turns: usize,
    pub condition: Condition,
    pub variant: Variant,
    pub mode: MessageMode,
    pub persuader: PersuaderKind,
    pub view: PersuaderView,
    /// Game instructions and variant addendum as shown to a human.
    pub instructions: String,
    pub dialogue: Vec<DialogueMessage>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pending_rejections: Vec<Rejection>,
    pub finished: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome: Option<Outcome>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MessagePayload {
    pub text: String,
    /// Stored in the transcript, never shown to the other side.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain_of_thought: Option<String>,
}

impl MessagePayload {
    pub fn text(text: impl Into<String>) -> Self {
        MessagePayload { text: text.into(), chain_of_thought: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PostReply {
    pub reply: String,
    pub state: SessionState,
}

/// Pushed to stream subscribers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SessionEvent {
    Snapshot { state: SessionState },
    Turn { turn: usize, message: String, reply: String, state: SessionState },
    Rejected { rejection: Rejection },
    Finished { outcome: Outcome },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExportFilter {
    #[serde(default)]
    pub condition: Option<Condition>,
    #[serde(default)]
    pub variant: Option<Variant>,
    #[serde(default)]
    pub persuader: Option<PersuaderKind>,
}

impl ExportFilter {
    pub fn matches(&self, t: &GameTranscript) -> bool {
        self.condition.is_none_or(|c| c == t.condition)
            && self.variant.is_none_or(|v| v == t.variant)
            && self.persuader.is_none_or(|p| p == t.persuader)
    }
}

struct Inner {
    referee: Referee,
    persuader: Option<Box<dyn Persuader>>,
}

pub struct Session {
    id: Uuid,
    config: SessionConfig,
    classifier: Arc<dyn Classifier>,
    in_flight: AtomicBool,
    inner: Arc<tokio::sync::Mutex<Inner>>,
    events: broadcast::Sender<SessionEvent>,
}

struct FlightGuard<'a>(&'a AtomicBool);

impl Drop for FlightGuard<'_> {
    fn drop(&mut self) {
        self.0.store(false, Ordering::Release);
    }
}

impl Session {
    pub fn id(&self) -> Uuid {
        self.id
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn subscribe(&self) -> broadcast::Receiver<SessionEvent> {
        self.events.subscribe()
    }

    fn begin(&self) -> Result<FlightGuard<'_>, ServiceError> {
        self.in_flight
            .compare_exchange(false, true, Ordering::AcqRel, Ordering::Acquire)
            .map_err(|_| ServiceError::Busy)?;
        Ok(FlightGuard(&self.in_flight))
    }

    fn snapshot(id: Uuid, kind: PersuaderKind, r: &Referee) -> SessionState {
        let inst = r.instance();
        SessionState {
            id,
            turn: r.turns().len(),
            num_turns: r.options().num_turns,
            condition: r.condition(),
            variant: r.variant(),
            mode: r.mode(),
            persuader: kind,
            view: render_view_for_state(inst, r.condition(), r.state()),
            instructions: assemble_prompt(inst, r.condition(), r.variant(), &[], r.state(), Audience::Human)
                .unwrap_or_default(),
            dialogue: r.dialogue(),
            pending_rejections: r.pending_rejections().iter().map(|a| a.rejection.clone()).collect(),
            finished: r.is_finished(),
            outcome: r.outcome(),
        }
    }

    pub async fn state(&self) -> SessionState {
        let inner = self.inner.lock().await;
        Self::snapshot(self.id, self.config.persuader, &inner.referee)
    }

    /// The full record, including ground truth. Only served once finished.
    pub async fn transcript(&self) -> GameTranscript {
        self.inner.lock().await.referee.transcript(self.config.persuader)
    }
}

struct Played {
    accepted: Vec<TurnRecord>,
    rejected: Vec<Rejection>,
    state: SessionState,
    transcript: Option<GameTranscript>,
}

pub struct SessionStore {
    sessions: RwLock<HashMap<Uuid, Arc<Session>>>,
    pool: Vec<Instance>,
    options: GameOptions,
    storage_dir: Option<PathBuf>,
    appender: Option<Mutex<Appender>>,
    finished: Mutex<Vec<GameTranscript>>,
    created: AtomicU64,
}

impl SessionStore {
    /// `pool` backs id and sampled instance selection. With a storage
    /// directory, finished games are appended to its transcript file.
    pub fn new(pool: Vec<Instance>, storage_dir: Option<&Path>) -> Result<Self, ServiceError> {
        let appender = match storage_dir {
            Some(dir) => {
                std::fs::create_dir_all(dir).map_err(RecordError::from)?;
                Some(Mutex::new(Appender::open(&dir.join(TRANSCRIPT_FILE), records::TRANSCRIPTS)?))
            }
            None => None,
        };
        Ok(SessionStore {
            sessions: RwLock::new(HashMap::new()),
            pool,
            options: GameOptions::default(),
            storage_dir: storage_dir.map(Path::to_path_buf),
            appender,
            finished: Mutex::new(Vec::new()),
            created: AtomicU64::new(0),
        })
    }

    pub fn with_options(mut self, options: GameOptions) -> Self {
        self.options = options;
        self
    }

    pub fn pool(&self) -> &[Instance] {
        &self.pool
    }

    fn select(&self, config: &SessionConfig) -> Result<Instance, ServiceError> {
        let base = match &config.instance {
            InstanceSelector::Inline { instance } => (**instance).clone(),
            InstanceSelector::Id { id } => self
                .pool
                .iter()
                .find(|i| &i.id == id)
                .cloned()
                .ok_or_else(|| ServiceError::BadConfig(format!("no instance with id `{id}`")))?,
            InstanceSelector::Sampled { seed } => {
                if self.pool.is_empty() {
                    return Err(ServiceError::BadConfig("the instance pool is empty".into()));
                }
                let k = match seed {
                    Some(s) => rand::rngs::StdRng::seed_from_u64(*s).random_range(0..self.pool.len()),
                    None => self.created.load(Ordering::Relaxed) as usize % self.pool.len(),
                };
                self.pool[k].clone()
            }
        };
        match &config.scenario {
            Some(s) => base.with_scenario(s).map_err(|e| ServiceError::BadConfig(e.to_string())),
            None => Ok(base),
        }
    }

    fn persuader_for(config: &SessionConfig) -> Option<Box<dyn Persuader>> {
        match config.persuader {
            PersuaderKind::Random => Some(Box::new(RandomBaseline::new(
                config.random.draws,
                config.random.schedule,
                config.random.seed,
            ))),
            PersuaderKind::ScriptedPerfect => Some(Box::new(ScriptedPerfect)),
            PersuaderKind::Bruteforce => Some(Box::new(BruteforcePersuader)),
            PersuaderKind::Silent => Some(Box::new(SilentPersuader)),
            PersuaderKind::Model => config
                .model
                .clone()
                .or_else(ModelEndpoint::from_env)
                .map(|e| Box::new(ModelPersuader::new(Arc::new(HttpCompletionClient::new(e)))) as Box<dyn Persuader>),
            PersuaderKind::Human | PersuaderKind::Replay => None,
        }
    }

    pub fn create_session(&self, config: SessionConfig) -> Result<Uuid, ServiceError> {
        config.check().map_err(ServiceError::BadConfig)?;
        let instance = self.select(&config)?;
        let options = GameOptions { validation: config.validation_options(), ..self.options };
        let referee = Referee::new(instance, config.condition, config.variant, options)
            .map_err(|e| ServiceError::BadConfig(e.to_string()))?;
        let id = Uuid::new_v4();
        let session = Session {
            id,
            classifier: build_classifier(&config.classifier),
            in_flight: AtomicBool::new(false),
            inner: Arc::new(tokio::sync::Mutex::new(Inner { referee, persuader: Self::persuader_for(&config) })),
            events: broadcast::channel(64).0,
            config,
        };
        self.created.fetch_add(1, Ordering::Relaxed);
        self.sessions.write().expect("session map").insert(id, Arc::new(session));
        Ok(id)
    }

    pub fn session(&self, id: Uuid) -> Result<Arc<Session>, ServiceError> {
        self.sessions.read().expect("session map").get(&id).cloned().ok_or(ServiceError::UnknownSession(id))
    }

    pub async fn get_session_state(&self, id: Uuid) -> Result<SessionState, ServiceError> {
        Ok(self.session(id)?.state().await)
    }

    /// Submit a persuader message. A rejected message leaves the turn open.
    pub async fn post_message(&self, id: Uuid, payload: MessagePayload) -> Result<PostReply, ServiceError> {
        let session = self.session(id)?;
        let _flight = session.begin()?;
        let inner = session.inner.clone().lock_owned().await;
        let classifier = session.classifier.clone();
        let kind = session.config.persuader;
        let played = tokio::task::spawn_blocking(move || {
            let mut inner = inner;
            if inner.referee.is_finished() {
                return Err(ServiceError::SessionFinished);
            }
            let message = PersuaderMessage {
                text: payload.text,
                chain_of_thought: payload.chain_of_thought,
                ..Default::default()
            };
            let result = inner.referee.submit(message, classifier.as_ref())?;
            let (accepted, rejected) = match result {
                SubmitResult::Accepted(r) => (vec![*r], vec![]),
                SubmitResult::Rejected(r) => (vec![], vec![r]),
            };
            Ok(Self::played(id, kind, &inner.referee, accepted, rejected))
        })
        .await
        .expect("session task panicked")?;
        self.publish(&session, &played)?;
        match (played.accepted.last(), played.rejected.first()) {
            (Some(t), _) => Ok(PostReply { reply: t.reply_text.clone(), state: played.state }),
            (None, Some(r)) => Err(ServiceError::ValidationRejected(r.clone())),
            (None, None) => unreachable!("a submission is accepted or rejected"),
        }
    }

    /// Let a server-side persuader play one turn, re-prompting after
    /// rejections up to the retry budget.
    pub async fn step(&self, id: Uuid) -> Result<PostReply, ServiceError> {
        let session = self.session(id)?;
        let _flight = session.begin()?;
        let inner = session.inner.clone().lock_owned().await;
        let classifier = session.classifier.clone();
        let kind = session.config.persuader;
        let played = tokio::task::spawn_blocking(move || {
            let mut inner = inner;
            let Inner { referee, persuader } = &mut *inner;
            let persuader = persuader
                .as_mut()
                .ok_or_else(|| ServiceError::NotSupported(format!("{kind} sessions are not driven by the server")))?;
            if referee.is_finished() {
                return Err(ServiceError::SessionFinished);
            }
            let mut rejected = Vec::new();
            let record = loop {
                let msg = persuader
                    .next_message(&referee.context())
                    .map_err(|e: PersuaderError| GameError::SessionAborted(e))?;
                match referee.submit(msg, classifier.as_ref())? {
                    SubmitResult::Accepted(r) => break *r,
                    SubmitResult::Rejected(r) => {
                        persuader.on_rejection(&r);
                        rejected.push(r);
                        if rejected.len() > referee.options().retry_budget {
                            break referee.submit_forced_empty()?;
                        }
                    }
                }
            };
            Ok(Self::played(id, kind, referee, vec![record], rejected))
        })
        .await
        .expect("session task panicked")?;
        self.publish(&session, &played)?;
        let t = played.accepted.last().expect("step plays a turn");
        Ok(PostReply { reply: t.reply_text.clone(), state: played.state })
    }

    fn played(
        id: Uuid,
        kind: PersuaderKind,
        referee: &Referee,
        accepted: Vec<TurnRecord>,
        rejected: Vec<Rejection>,
    ) -> Played {
        let transcript = (referee.is_finished() && !accepted.is_empty()).then(|| referee.transcript(kind));
        Played { accepted, rejected, state: Session::snapshot(id, kind, referee), transcript }
    }

    fn publish(&self, session: &Session, played: &Played) -> Result<(), ServiceError> {
        // Send errors only mean nobody is listening.
        for r in &played.rejected {
            let _ = session.events.send(SessionEvent::Rejected { rejection: r.clone() });
        }
        for t in &played.accepted {
            let _ = session.events.send(SessionEvent::Turn {
                turn: t.turn,
                message: t.message.text.clone(),
                reply: t.reply_text.clone(),
                state: played.state.clone(),
            });
        }
        if let Some(t) = &played.transcript {
            if let Some(a) = &self.appender {
                a.lock().expect("appender").append(t)?;
            }
            self.finished.lock().expect("finished games").push(t.clone());
            if let Some(outcome) = t.outcome {
                let _ = session.events.send(SessionEvent::Finished { outcome });
            }
        }
        Ok(())
    }

    /// Finished games matching `filter`. Reads the transcript file when the
    /// store has one, so games from earlier runs are included.
    pub fn export_transcripts(&self, filter: &ExportFilter) -> Result<Vec<GameTranscript>, ServiceError> {
        let all = match &self.storage_dir {
            Some(dir) => {
                let _hold = self.appender.as_ref().map(|a| a.lock().expect("appender"));
                records::load_transcripts(&dir.join(TRANSCRIPT_FILE))?
            }
            None => self.finished.lock().expect("finished games").clone(),
        };
        Ok(all.into_iter().filter(|t| filter.matches(t)).collect())
    }

    pub fn export_ndjson(&self, filter: &ExportFilter) -> Result<Vec<u8>, ServiceError> {
        let games = self.export_transcripts(filter)?;
        let mut out = Vec::new();
        records::write_ndjson(&mut out, records::TRANSCRIPTS, &games)?;
        Ok(out)
    }
}
