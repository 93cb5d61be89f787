//! Template-based response planning from a top selection.

use std::io::BufRead;
use std::str::FromStr;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::detect::{AskFramingEvent, ContextTag};
use crate::lexicon::{Category, Kind};
use crate::topask::TopSelection;

#[derive(Debug, Error)]
pub enum TemplateError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: duplicate template id {id}")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: template {id} uses {{{placeholder}}} which its conditions do not guarantee")]
    Unguaranteed { line: usize, id: String, placeholder: String },
    #[error("no universal fallback template (ask *, framing *, band *, no required slots)")]
    MissingFallback,
    #[error("empty template file")]
    Empty,
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Band {
    High,
    Mid,
    Low,
}

impl Band {
    pub fn as_str(self) -> &'static str {
        match self {
            Band::High => "high",
            Band::Mid => "mid",
            Band::Low => "low",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bands {
    pub high: f64,
    pub mid: f64,
}

impl Default for Bands {
    fn default() -> Self {
        Bands { high: 0.7, mid: 0.4 }
    }
}

impl Bands {
    pub fn band(&self, confidence: f64) -> Band {
        if confidence >= self.high {
            Band::High
        } else if confidence >= self.mid {
            Band::Mid
        } else {
            Band::Low
        }
    }
}

/// Joint confidence of the selection: product over the present top events.
pub fn selection_confidence(sel: &TopSelection) -> f64 {
    let present: Vec<f64> = [&sel.top_ask, &sel.top_framing]
        .into_iter()
        .flatten()
        .map(|e| e.confidence)
        .collect();
    if present.is_empty() {
        0.0
    } else {
        present.iter().product()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CategoryPattern {
    Any,
    Absent,
    Is(Category),
}

impl CategoryPattern {
    fn matches(self, event: Option<&AskFramingEvent>) -> bool {
        match self {
            CategoryPattern::Any => true,
            CategoryPattern::Absent => event.is_none(),
            CategoryPattern::Is(c) => event.is_some_and(|e| e.category == c),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotRequirement {
    Trigger,
    Object,
    Target,
    Context,
    ContextIs(ContextTag),
    FramingTrigger,
    FramingObject,
}

impl FromStr for SlotRequirement {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "trigger" => SlotRequirement::Trigger,
            "object" => SlotRequirement::Object,
            "target" => SlotRequirement::Target,
            "context" => SlotRequirement::Context,
            "framing_trigger" => SlotRequirement::FramingTrigger,
            "framing_object" => SlotRequirement::FramingObject,
            _ => match s.strip_prefix("context=") {
                Some(tag) => SlotRequirement::ContextIs(parse_context(tag)?),
                None => return Err(format!("unknown slot requirement {s:?}")),
            },
        })
    }
}

fn parse_context(tag: &str) -> Result<ContextTag, String> {
    [
        ContextTag::Financial,
        ContextTag::Credential,
        ContextTag::LinkClick,
        ContextTag::Contact,
        ContextTag::Generic,
    ]
    .into_iter()
    .find(|c| c.as_str() == tag)
    .ok_or_else(|| format!("unknown context tag {tag:?}"))
}

impl SlotRequirement {
    fn holds(self, sel: &TopSelection) -> bool {
        let ask = sel.top_ask.as_ref();
        let framing = sel.top_framing.as_ref();
        match self {
            SlotRequirement::Trigger => ask.is_some(),
            SlotRequirement::Object => ask.is_some_and(|e| e.slots.object.is_some()),
            SlotRequirement::Target => ask.is_some_and(|e| e.slots.target.is_some()),
            SlotRequirement::Context => {
                ask.is_some_and(|e| e.slots.context.is_some_and(|c| c != ContextTag::Generic))
            }
            SlotRequirement::ContextIs(tag) => ask.is_some_and(|e| e.slots.context == Some(tag)),
            SlotRequirement::FramingTrigger => framing.is_some(),
            SlotRequirement::FramingObject => framing.is_some_and(|e| e.slots.object.is_some()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResponseTemplate {
    pub id: String,
    pub ask: CategoryPattern,
    pub framing: CategoryPattern,
    pub band: Option<Band>,
    pub required: Vec<SlotRequirement>,
    pub text: String,
}

static PLACEHOLDER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\{(\w+)\}").expect("placeholder pattern"));

const PLACEHOLDERS: &[&str] = &["trigger", "object", "target", "framing_trigger", "framing_object"];

impl ResponseTemplate {
    pub fn applies(&self, sel: &TopSelection, band: Band) -> bool {
        self.ask.matches(sel.top_ask.as_ref())
            && self.framing.matches(sel.top_framing.as_ref())
            && self.band.is_none_or(|b| b == band)
            && self.required.iter().all(|r| r.holds(sel))
    }

    pub fn is_universal(&self) -> bool {
        self.ask == CategoryPattern::Any
            && self.framing == CategoryPattern::Any
            && self.band.is_none()
            && self.required.is_empty()
    }

    fn guarantees(&self, placeholder: &str) -> bool {
        let req = |r: SlotRequirement| self.required.contains(&r);
        match placeholder {
            "trigger" => matches!(self.ask, CategoryPattern::Is(_)) || req(SlotRequirement::Trigger),
            "object" => req(SlotRequirement::Object),
            "target" => req(SlotRequirement::Target),
            "framing_trigger" => {
                matches!(self.framing, CategoryPattern::Is(_)) || req(SlotRequirement::FramingTrigger)
            }
            "framing_object" => req(SlotRequirement::FramingObject),
            _ => false,
        }
    }

    pub fn render(&self, sel: &TopSelection) -> String {
        PLACEHOLDER
            .replace_all(&self.text, |caps: &regex::Captures| {
                let ask = sel.top_ask.as_ref();
                let framing = sel.top_framing.as_ref();
                let value = match &caps[1] {
                    "trigger" => ask.map(|e| e.trigger.lemma.clone()),
                    "object" => ask.and_then(|e| e.slots.object.clone()),
                    "target" => ask.and_then(|e| e.slots.target.clone()),
                    "framing_trigger" => framing.map(|e| e.trigger.lemma.clone()),
                    "framing_object" => framing.and_then(|e| e.slots.object.clone()),
                    _ => None,
                };
                value.unwrap_or_default()
            })
            .into_owned()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemplateSet {
    templates: Vec<ResponseTemplate>,
    pub bands: Bands,
}

impl TemplateSet {
    pub fn new(templates: Vec<ResponseTemplate>) -> Result<Self, TemplateError> {
        if templates.is_empty() {
            return Err(TemplateError::Empty);
        }
        if !templates.iter().any(ResponseTemplate::is_universal) {
            return Err(TemplateError::MissingFallback);
        }
        Ok(TemplateSet {
            templates,
            bands: Bands::default(),
        })
    }

    pub fn with_bands(mut self, bands: Bands) -> Self {
        self.bands = bands;
        self
    }

    pub fn templates(&self) -> &[ResponseTemplate] {
        &self.templates
    }

    pub fn len(&self) -> usize {
        self.templates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }
}

fn parse_pattern(field: &str, kind: Kind, line: usize) -> Result<CategoryPattern, TemplateError> {
    match field {
        "*" => Ok(CategoryPattern::Any),
        "-" => Ok(CategoryPattern::Absent),
        other => {
            let cat: Category = other.parse().map_err(|_| TemplateError::Malformed {
                line,
                reason: format!("unknown category {other:?}"),
            })?;
            if cat.kind() != kind {
                return Err(TemplateError::Malformed {
                    line,
                    reason: format!("{other} is not a {kind:?} category"),
                });
            }
            Ok(CategoryPattern::Is(cat))
        }
    }
}

/// Pipe-separated rows: `id | ask | framing | band | required | text`.
pub fn load_templates<R: BufRead>(src: R) -> Result<TemplateSet, TemplateError> {
    let mut templates: Vec<ResponseTemplate> = Vec::new();
    for (idx, raw) in src.lines().enumerate() {
        let line = idx + 1;
        let raw = raw?;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.splitn(6, '|').map(str::trim).collect();
        if fields.len() != 6 {
            return Err(TemplateError::Malformed {
                line,
                reason: format!("expected 6 fields, found {}", fields.len()),
            });
        }
        let id = fields[0].to_string();
        if id.is_empty() {
            return Err(TemplateError::Malformed {
                line,
                reason: "empty template id".into(),
            });
        }
        if templates.iter().any(|t| t.id == id) {
            return Err(TemplateError::DuplicateId { line, id });
        }
        let band = match fields[3] {
            "*" => None,
            "high" => Some(Band::High),
            "mid" => Some(Band::Mid),
            "low" => Some(Band::Low),
            other => {
                return Err(TemplateError::Malformed {
                    line,
                    reason: format!("unknown band {other:?}"),
                })
            }
        };
        let required = match fields[4] {
            "-" | "" => Vec::new(),
            list => list
                .split(',')
                .map(|s| s.trim().parse())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|reason| TemplateError::Malformed { line, reason })?,
        };
        let template = ResponseTemplate {
            id,
            ask: parse_pattern(fields[1], Kind::Ask, line)?,
            framing: parse_pattern(fields[2], Kind::Framing, line)?,
            band,
            required,
            text: fields[5].to_string(),
        };
        for caps in PLACEHOLDER.captures_iter(&template.text) {
            let name = &caps[1];
            if !PLACEHOLDERS.contains(&name) || !template.guarantees(name) {
                return Err(TemplateError::Unguaranteed {
                    line,
                    id: template.id.clone(),
                    placeholder: name.to_string(),
                });
            }
        }
        templates.push(template);
    }
    TemplateSet::new(templates)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rationale {
    pub ask: Option<Category>,
    pub ask_trigger: Option<String>,
    pub framing: Option<Category>,
    pub framing_trigger: Option<String>,
    pub band: Band,
    pub confidence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponsePlan {
    pub message_id: String,
    pub template_id: String,
    pub rendered_text: String,
    pub rationale: Rationale,
}

pub fn generate_response(sel: &TopSelection, templates: &TemplateSet) -> ResponsePlan {
    let confidence = selection_confidence(sel);
    let band = templates.bands.band(confidence);
    let template = templates
        .templates
        .iter()
        .find(|t| t.applies(sel, band))
        .expect("template set always holds a universal fallback");
    ResponsePlan {
        message_id: sel.message_id.clone(),
        template_id: template.id.clone(),
        rendered_text: template.render(sel),
        rationale: Rationale {
            ask: sel.top_ask.as_ref().map(|e| e.category),
            ask_trigger: sel.top_ask.as_ref().map(|e| e.trigger.lemma.clone()),
            framing: sel.top_framing.as_ref().map(|e| e.category),
            framing_trigger: sel.top_framing.as_ref().map(|e| e.trigger.lemma.clone()),
            band,
            confidence,
        },
    }
}
