//! Collaboration rooms: an append-only chat log and a shared draft with
//! optimistic versioning.
//!
//! Each room is persisted under `<data_dir>/rooms/<room_id>/` as an
//! `events.jsonl` log plus a periodic `snapshot.json`. Replaying the log
//! after a restart reproduces the same sequence numbers and draft versions.

use std::collections::{BTreeSet, HashMap};
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use tokio::sync::watch;

/// Events between snapshots.
const SNAPSHOT_EVERY: u64 = 64;
const MAX_ROOM_ID_LEN: usize = 64;

#[derive(Debug, thiserror::Error)]
pub enum CollabError {
    #[error("invalid room id {0:?}")]
    InvalidRoomId(String),
    #[error("{0} must not be empty")]
    Empty(&'static str),
    #[error("room storage {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("room log {path} line {line}: {reason}")]
    Corrupt { path: PathBuf, line: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, CollabError>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub seq: u64,
    pub author: String,
    pub text: String,
    pub ts: DateTime<Utc>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Draft {
    pub text: String,
    pub version: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub updated_by: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub updated_at: Option<DateTime<Utc>>,
}

/// Result of a compare-and-set draft write. A conflict carries the current
/// draft so the client can merge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DraftOutcome {
    Accepted { version: u64, text: String },
    Conflict { version: u64, text: String },
}

impl DraftOutcome {
    pub fn is_accepted(&self) -> bool {
        matches!(self, DraftOutcome::Accepted { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Event {
    Message(Message),
    Draft {
        version: u64,
        text: String,
        author: String,
        ts: DateTime<Utc>,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoomState {
    pub room_id: String,
    pub members: BTreeSet<String>,
    pub messages: Vec<Message>,
    pub draft: Draft,
}

impl RoomState {
    fn apply(&mut self, event: Event) {
        match event {
            Event::Message(m) => {
                self.members.insert(m.author.clone());
                self.messages.push(m);
            }
            Event::Draft { version, text, author, ts } => {
                self.members.insert(author.clone());
                self.draft = Draft { text, version, updated_by: Some(author), updated_at: Some(ts) };
            }
        }
    }

    fn next_seq(&self) -> u64 {
        self.messages.last().map_or(1, |m| m.seq + 1)
    }
}

/// Overview returned by room listings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoomInfo {
    pub room_id: String,
    pub members: BTreeSet<String>,
    pub message_count: usize,
    pub draft_version: u64,
}

#[derive(Debug, Serialize, Deserialize)]
struct Snapshot {
    events: u64,
    state: RoomState,
}

struct Log {
    dir: PathBuf,
    file: Option<File>,
    events: u64,
}

impl Log {
    fn append(&mut self, event: &Event) -> Result<()> {
        let path = self.dir.join("events.jsonl");
        let io = |source| CollabError::Io { path: path.clone(), source };
        if self.file.is_none() {
            fs::create_dir_all(&self.dir).map_err(io)?;
            self.file = Some(OpenOptions::new().create(true).append(true).open(&path).map_err(io)?);
        }
        let mut line = serde_json::to_vec(event).expect("event serializes");
        line.push(b'\n');
        let file = self.file.as_mut().expect("opened above");
        file.write_all(&line).and_then(|_| file.sync_data()).map_err(io)?;
        self.events += 1;
        Ok(())
    }

    /// Called after the event is applied, so a snapshot never covers
    /// unlogged state.
    fn maybe_snapshot(&self, state: &RoomState) -> Result<()> {
        if self.events % SNAPSHOT_EVERY != 0 {
            return Ok(());
        }
        let snap = Snapshot { events: self.events, state: state.clone() };
        let tmp = self.dir.join("snapshot.json.tmp");
        let dst = self.dir.join("snapshot.json");
        fs::write(&tmp, serde_json::to_vec(&snap).expect("snapshot serializes"))
            .and_then(|_| fs::rename(&tmp, &dst))
            .map_err(|source| CollabError::Io { path: dst, source })
    }
}

/// Logs then applies one event.
fn commit(state: &mut RoomState, log: &mut Option<Log>, event: Event) -> Result<()> {
    if let Some(log) = log.as_mut() {
        log.append(&event)?;
    }
    state.apply(event);
    if let Some(log) = log {
        log.maybe_snapshot(state)?;
    }
    Ok(())
}

struct Room {
    state: Mutex<(RoomState, Option<Log>)>,
    seq_tx: watch::Sender<u64>,
}

/// Thread-safe room registry. Writes to a room are serialized by that
/// room's lock; rooms do not contend with each other.
pub struct RoomStore {
    dir: Option<PathBuf>,
    rooms: Mutex<HashMap<String, Arc<Room>>>,
}

pub fn validate_room_id(room_id: &str) -> Result<()> {
    let ok = !room_id.is_empty()
        && room_id.len() <= MAX_ROOM_ID_LEN
        && room_id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_');
    if ok {
        Ok(())
    } else {
        Err(CollabError::InvalidRoomId(room_id.to_string()))
    }
}

fn replay(dir: &Path, room_id: &str) -> Result<(RoomState, u64)> {
    let mut state = RoomState { room_id: room_id.to_string(), ..RoomState::default() };
    let mut skip = 0;
    if let Ok(bytes) = fs::read(dir.join("snapshot.json")) {
        match serde_json::from_slice::<Snapshot>(&bytes) {
            Ok(s) => {
                state = s.state;
                skip = s.events;
            }
            Err(e) => log::warn!("ignoring unreadable snapshot in {}: {e}", dir.display()),
        }
    }
    let path = dir.join("events.jsonl");
    let content = match fs::read(&path) {
        Ok(c) => c,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok((state, 0)),
        Err(source) => return Err(CollabError::Io { path, source }),
    };
    let mut events = 0;
    let mut offset = 0;
    for (i, line) in content.split_inclusive(|&b| b == b'\n').enumerate() {
        if !line.ends_with(b"\n") {
            // A torn final line from a crash mid-write is cut off so the
            // next append starts on a fresh line.
            log::warn!("truncating incomplete final event in {}", path.display());
            OpenOptions::new()
                .write(true)
                .open(&path)
                .and_then(|f| f.set_len(offset as u64))
                .map_err(|source| CollabError::Io { path: path.clone(), source })?;
            break;
        }
        let event: Event = serde_json::from_slice(line)
            .map_err(|e| CollabError::Corrupt { path: path.clone(), line: i + 1, reason: e.to_string() })?;
        offset += line.len();
        events += 1;
        if events > skip {
            state.apply(event);
        }
    }
    if events < skip {
        return Err(CollabError::Corrupt {
            path,
            line: events as usize,
            reason: format!("snapshot covers {skip} events but log has {events}"),
        });
    }
    Ok((state, events))
}

impl RoomStore {
    pub fn in_memory() -> Self {
        Self { dir: None, rooms: Mutex::new(HashMap::new()) }
    }

    /// Rooms live under `<data_dir>/rooms`.
    pub fn open(data_dir: impl AsRef<Path>) -> Self {
        Self { dir: Some(data_dir.as_ref().join("rooms")), rooms: Mutex::new(HashMap::new()) }
    }

    fn room(&self, room_id: &str) -> Result<Arc<Room>> {
        validate_room_id(room_id)?;
        let mut rooms = self.rooms.lock().expect("room registry poisoned");
        if let Some(r) = rooms.get(room_id) {
            return Ok(r.clone());
        }
        let (state, log) = match &self.dir {
            Some(dir) => {
                let dir = dir.join(room_id);
                let (state, events) = replay(&dir, room_id)?;
                (state, Some(Log { dir, file: None, events }))
            }
            None => (RoomState { room_id: room_id.to_string(), ..RoomState::default() }, None),
        };
        let (seq_tx, _) = watch::channel(state.next_seq() - 1);
        let room = Arc::new(Room { state: Mutex::new((state, log)), seq_tx });
        rooms.insert(room_id.to_string(), room.clone());
        Ok(room)
    }

    /// Appends a message; the room is created on first use.
    pub fn post_message(&self, room_id: &str, author: &str, text: &str) -> Result<Message> {
        if text.trim().is_empty() {
            return Err(CollabError::Empty("text"));
        }
        if author.trim().is_empty() {
            return Err(CollabError::Empty("author"));
        }
        let room = self.room(room_id)?;
        let msg = {
            let mut guard = room.state.lock().expect("room poisoned");
            let (state, log) = &mut *guard;
            let msg = Message {
                seq: state.next_seq(),
                author: author.to_string(),
                text: text.to_string(),
                ts: Utc::now(),
            };
            commit(state, log, Event::Message(msg.clone()))?;
            msg
        };
        room.seq_tx.send_replace(msg.seq);
        Ok(msg)
    }

    /// Messages with `seq > after`, in order.
    pub fn messages(&self, room_id: &str, after: u64) -> Result<Vec<Message>> {
        let room = self.room(room_id)?;
        let guard = room.state.lock().expect("room poisoned");
        Ok(guard.0.messages.iter().filter(|m| m.seq > after).cloned().collect())
    }

    /// Long-poll: returns as soon as a message with `seq > after` exists, or
    /// an empty list after `timeout`.
    pub async fn wait_messages(&self, room_id: &str, after: u64, timeout: Duration) -> Result<Vec<Message>> {
        let room = self.room(room_id)?;
        let mut rx = room.seq_tx.subscribe();
        let _ = tokio::time::timeout(timeout, rx.wait_for(|&seq| seq > after)).await;
        self.messages(room_id, after)
    }

    pub fn draft(&self, room_id: &str) -> Result<Draft> {
        let room = self.room(room_id)?;
        let guard = room.state.lock().expect("room poisoned");
        Ok(guard.0.draft.clone())
    }

    /// Compare-and-set: accepted iff `base_version` is the current version.
    pub fn update_draft(&self, room_id: &str, author: &str, base_version: u64, text: &str) -> Result<DraftOutcome> {
        if author.trim().is_empty() {
            return Err(CollabError::Empty("author"));
        }
        let room = self.room(room_id)?;
        let mut guard = room.state.lock().expect("room poisoned");
        let (state, log) = &mut *guard;
        if state.draft.version != base_version {
            return Ok(DraftOutcome::Conflict { version: state.draft.version, text: state.draft.text.clone() });
        }
        let event = Event::Draft {
            version: base_version + 1,
            text: text.to_string(),
            author: author.to_string(),
            ts: Utc::now(),
        };
        commit(state, log, event)?;
        Ok(DraftOutcome::Accepted { version: state.draft.version, text: state.draft.text.clone() })
    }

    pub fn info(&self, room_id: &str) -> Result<RoomInfo> {
        let room = self.room(room_id)?;
        let guard = room.state.lock().expect("room poisoned");
        let s = &guard.0;
        Ok(RoomInfo {
            room_id: s.room_id.clone(),
            members: s.members.clone(),
            message_count: s.messages.len(),
            draft_version: s.draft.version,
        })
    }
}
