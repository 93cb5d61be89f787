//! Corpus ingestion and the segment, tag, detect, select chain over many messages.

use std::collections::BTreeSet;
use std::fs;
use std::io::BufRead;
use std::path::Path;

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::detect::{detect_events_with, ArgumentSlots, AskFramingEvent, ContextTag, DetectConfig, Trigger};
use crate::lexicon::{Category, ClassId, Kind, Lexicon};
use crate::morphvar::{Provenance, VariantTable};
use crate::textseg::{Analyzer, ClauseId, ContextFlags, Message, RuleAnalyzer};
use crate::topask::{select_top_for, TopSelection};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: duplicate message id {id}")]
    DuplicateId { line: usize, id: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub message_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subject: Option<String>,
    #[serde(default)]
    pub body: String,
}

impl CorpusRecord {
    /// Subject and body joined by a blank line.
    pub fn text(&self) -> String {
        match self.subject.as_deref().filter(|s| !s.trim().is_empty()) {
            Some(subject) => format!("{subject}\n\n{}", self.body),
            None => self.body.clone(),
        }
    }
}

/// Records that parsed, plus one error per skipped line.
#[derive(Debug, Default)]
pub struct CorpusLoad {
    pub records: Vec<CorpusRecord>,
    pub skipped: Vec<CorpusError>,
}

pub fn load_corpus_jsonl<R: BufRead>(src: R) -> Result<CorpusLoad, std::io::Error> {
    let mut out = CorpusLoad::default();
    let mut seen = BTreeSet::new();
    for (idx, raw) in src.lines().enumerate() {
        let line = idx + 1;
        let raw = raw?;
        if raw.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<CorpusRecord>(&raw) {
            Ok(rec) if rec.message_id.is_empty() => out.skipped.push(CorpusError::Malformed {
                line,
                reason: "empty message_id".into(),
            }),
            Ok(rec) if !seen.insert(rec.message_id.clone()) => out.skipped.push(CorpusError::DuplicateId {
                line,
                id: rec.message_id,
            }),
            Ok(rec) => out.records.push(rec),
            Err(e) => out.skipped.push(CorpusError::Malformed {
                line,
                reason: e.to_string(),
            }),
        }
    }
    Ok(out)
}

/// One message per regular file, named by file stem, in file-name order.
pub fn load_corpus_dir(dir: &Path) -> Result<CorpusLoad, CorpusError> {
    let io = |source| CorpusError::Io {
        path: dir.display().to_string(),
        source,
    };
    let mut paths: Vec<_> = fs::read_dir(dir)
        .map_err(io)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()
        .map_err(io)?;
    paths.retain(|p| p.is_file());
    paths.sort();
    let mut out = CorpusLoad::default();
    for path in paths {
        let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let body = fs::read_to_string(&path).map_err(|source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        })?;
        out.records.push(CorpusRecord {
            message_id: id,
            subject: None,
            body,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MessageResult {
    pub message: Message,
    pub events: Vec<AskFramingEvent>,
    pub selection: TopSelection,
}

pub struct Pipeline<'a> {
    lexicon: &'a Lexicon,
    variants: &'a VariantTable,
    analyzer: Box<dyn Analyzer + 'a>,
    config: DetectConfig,
}

impl<'a> Pipeline<'a> {
    pub fn new(lexicon: &'a Lexicon, variants: &'a VariantTable) -> Self {
        Pipeline {
            lexicon,
            variants,
            analyzer: Box::new(RuleAnalyzer::new(variants.clone())),
            config: DetectConfig::default(),
        }
    }

    pub fn with_config(mut self, config: DetectConfig) -> Self {
        self.config = config;
        self
    }

    pub fn with_analyzer(mut self, analyzer: Box<dyn Analyzer + 'a>) -> Self {
        self.analyzer = analyzer;
        self
    }

    pub fn lexicon(&self) -> &Lexicon {
        self.lexicon
    }

    pub fn run_message(&self, record: &CorpusRecord) -> MessageResult {
        let message = self.analyzer.analyze(&record.message_id, &record.text(), self.lexicon);
        let events: Vec<AskFramingEvent> = message
            .clauses
            .iter()
            .flat_map(|c| detect_events_with(c, self.lexicon, self.variants, &self.config))
            .collect();
        let selection = select_top_for(record.message_id.clone(), &events);
        MessageResult {
            message,
            events,
            selection,
        }
    }

    pub fn run_corpus_seq(&self, records: &[CorpusRecord]) -> Vec<MessageResult> {
        records.iter().map(|r| self.run_message(r)).collect()
    }

    /// Results come back in input order.
    #[cfg(feature = "parallel")]
    pub fn run_corpus_par(&self, records: &[CorpusRecord]) -> Vec<MessageResult> {
        records.par_iter().map(|r| self.run_message(r)).collect()
    }

    pub fn run_corpus(&self, records: &[CorpusRecord]) -> Vec<MessageResult> {
        #[cfg(feature = "parallel")]
        {
            self.run_corpus_par(records)
        }
        #[cfg(not(feature = "parallel"))]
        {
            self.run_corpus_seq(records)
        }
    }
}

/// Flat output row: one per event, then a `top_ask` and a `top_framing` row per message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionRecord {
    pub message_id: String,
    pub kind: String,
    pub clause_ordinal: Option<usize>,
    pub clause_text: Option<String>,
    pub category: Option<Category>,
    pub trigger_surface: Option<String>,
    pub trigger_lemma: Option<String>,
    pub class_id: Option<String>,
    pub object: Option<String>,
    pub target: Option<String>,
    pub context: Option<ContextTag>,
    pub confidence: Option<f64>,
    pub provenance: Option<Provenance>,
    #[serde(default)]
    pub tokens: Option<(usize, usize)>,
    #[serde(default)]
    pub clause_flags: Option<ContextFlags>,
}

pub const TOP_ASK: &str = "top_ask";
pub const TOP_FRAMING: &str = "top_framing";

impl DetectionRecord {
    fn from_event(kind: &str, event: Option<&AskFramingEvent>, message_id: &str, result: &MessageResult) -> Self {
        let clause_text = |e: &AskFramingEvent| {
            result
                .message
                .clauses
                .get(e.clause_id.ordinal)
                .map(|c| c.text.clone())
        };
        DetectionRecord {
            message_id: message_id.to_string(),
            kind: kind.to_string(),
            clause_ordinal: event.map(|e| e.clause_id.ordinal),
            clause_text: event.and_then(clause_text),
            category: event.map(|e| e.category),
            trigger_surface: event.map(|e| e.trigger.surface.clone()),
            trigger_lemma: event.map(|e| e.trigger.lemma.clone()),
            class_id: event.map(|e| e.trigger.class_id.as_str().to_string()),
            object: event.and_then(|e| e.slots.object.clone()),
            target: event.and_then(|e| e.slots.target.clone()),
            context: event.and_then(|e| e.slots.context),
            confidence: event.map(|e| e.confidence),
            provenance: event.map(|e| e.provenance),
            tokens: event.map(|e| e.trigger.tokens),
            clause_flags: event.map(|e| e.clause_flags),
        }
    }

    /// Rebuild the event this row describes.
    pub fn to_event(&self) -> Option<AskFramingEvent> {
        let category = self.category?;
        Some(AskFramingEvent {
            clause_id: ClauseId {
                message_id: self.message_id.clone(),
                ordinal: self.clause_ordinal.unwrap_or(0),
            },
            category,
            trigger: Trigger {
                surface: self.trigger_surface.clone().unwrap_or_default(),
                lemma: self.trigger_lemma.clone().unwrap_or_default(),
                class_id: ClassId::new(self.class_id.clone().unwrap_or_default()),
                tokens: self.tokens.unwrap_or((0, 0)),
            },
            slots: ArgumentSlots {
                ask_type: category,
                context: self.context,
                target: self.target.clone(),
                object: self.object.clone(),
            },
            confidence: self.confidence.unwrap_or(0.0),
            provenance: self.provenance.unwrap_or(Provenance::DirectVerb),
            clause_flags: self.clause_flags.unwrap_or_default(),
        })
    }
}

pub fn detection_records(result: &MessageResult) -> Vec<DetectionRecord> {
    let id = &result.message.message_id;
    let mut out: Vec<DetectionRecord> = result
        .events
        .iter()
        .map(|e| {
            let kind = match e.kind() {
                Kind::Ask => "ask",
                Kind::Framing => "framing",
            };
            DetectionRecord::from_event(kind, Some(e), id, result)
        })
        .collect();
    out.push(DetectionRecord::from_event(TOP_ASK, result.selection.top_ask.as_ref(), id, result));
    out.push(DetectionRecord::from_event(TOP_FRAMING, result.selection.top_framing.as_ref(), id, result));
    out
}

/// Group `top_ask`/`top_framing` rows back into per-message selections, in first-seen order.
pub fn selections_from_records(records: &[DetectionRecord]) -> Vec<TopSelection> {
    let mut out: Vec<TopSelection> = Vec::new();
    for rec in records {
        let pos = match out.iter().position(|s| s.message_id == rec.message_id) {
            Some(p) => p,
            None => {
                out.push(TopSelection::empty(rec.message_id.clone()));
                out.len() - 1
            }
        };
        match rec.kind.as_str() {
            TOP_ASK => out[pos].top_ask = rec.to_event(),
            TOP_FRAMING => out[pos].top_framing = rec.to_event(),
            _ => {}
        }
    }
    out
}
