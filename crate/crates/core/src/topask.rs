//! Top ask and top framing selection by argument-slot fill.

use std::cmp::Ordering;

use serde::Serialize;

use crate::detect::AskFramingEvent;
use crate::lexicon::Kind;

/// Score bonus lifting framings tied to the demanded action (conditional,
/// avoidance, negation or deadline in the same clause) above any other framing.
pub const COMPLIANCE_LINK_BONUS: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedEvent {
    pub event: AskFramingEvent,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopSelection {
    pub message_id: String,
    pub top_ask: Option<AskFramingEvent>,
    pub top_framing: Option<AskFramingEvent>,
    pub ranking: Vec<RankedEvent>,
}

impl TopSelection {
    pub fn empty(message_id: impl Into<String>) -> Self {
        TopSelection {
            message_id: message_id.into(),
            top_ask: None,
            top_framing: None,
            ranking: Vec::new(),
        }
    }
}

/// Filled optional slots plus confidence as a fractional tie-spreader.
pub fn score(event: &AskFramingEvent) -> f64 {
    let base = event.slots.filled() as f64 + event.confidence;
    if event.kind() == Kind::Framing && event.clause_flags.any() {
        base + COMPLIANCE_LINK_BONUS
    } else {
        base
    }
}

fn rank(a: &RankedEvent, b: &RankedEvent) -> Ordering {
    let (x, y) = (&a.event, &b.event);
    b.score
        .total_cmp(&a.score)
        .then(y.confidence.total_cmp(&x.confidence))
        .then(x.clause_id.ordinal.cmp(&y.clause_id.ordinal))
        .then(x.trigger.tokens.cmp(&y.trigger.tokens))
        .then(x.category.cmp(&y.category))
        .then(x.trigger.lemma.cmp(&y.trigger.lemma))
}

pub fn select_top(events: &[AskFramingEvent]) -> TopSelection {
    let message_id = events.first().map(|e| e.clause_id.message_id.clone()).unwrap_or_default();
    select_top_for(message_id, events)
}

pub fn select_top_for(message_id: impl Into<String>, events: &[AskFramingEvent]) -> TopSelection {
    let mut ranking: Vec<RankedEvent> = events
        .iter()
        .map(|e| RankedEvent {
            score: score(e),
            event: e.clone(),
        })
        .collect();
    ranking.sort_by(rank);
    let best = |kind: Kind| ranking.iter().find(|r| r.event.kind() == kind).map(|r| r.event.clone());
    TopSelection {
        message_id: message_id.into(),
        top_ask: best(Kind::Ask),
        top_framing: best(Kind::Framing),
        ranking,
    }
}
