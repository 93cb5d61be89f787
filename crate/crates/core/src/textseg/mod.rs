//! Tokenized clauses with lightweight POS guesses, mood and context flags.

mod tokenize;
pub mod words;

use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::lexicon::{Category, Lexicon};
use crate::morphvar::{inflect, PartOfSpeech, VariantTable};
use tokenize::{tokenize, RawTok, TokKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pos {
    Verb,
    Noun,
    Adj,
    Adv,
    Pron,
    Det,
    Prep,
    Conj,
    Num,
    Url,
    Money,
    Percent,
    Email,
    Punct,
    Other,
}

impl Pos {
    pub fn is_entity(self) -> bool {
        matches!(self, Pos::Url | Pos::Email | Pos::Money | Pos::Percent)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Token {
    pub text: String,
    pub lower: String,
    pub pos: Pos,
    /// Byte offsets into the clause text.
    pub span: (usize, usize),
}

impl Token {
    /// Alphabetic token that is not an entity or punctuation.
    pub fn is_word(&self) -> bool {
        !self.pos.is_entity()
            && !matches!(self.pos, Pos::Num | Pos::Punct)
            && self.text.chars().next().is_some_and(char::is_alphabetic)
    }

    /// Lowercase text with typographic apostrophes folded.
    pub fn key(&self) -> String {
        self.lower.replace('’', "'")
    }

    fn is_terminator(&self) -> bool {
        self.pos == Pos::Punct && self.text.chars().all(|c| matches!(c, '.' | '!' | '?'))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mood {
    Imperative,
    Interrogative,
    Declarative,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ContextFlags {
    pub negated: bool,
    pub avoidance_scope: bool,
    pub conditional: bool,
    pub deadline: bool,
}

impl ContextFlags {
    pub fn any(self) -> bool {
        self.negated || self.avoidance_scope || self.conditional || self.deadline
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClauseId {
    pub message_id: String,
    pub ordinal: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Clause {
    pub id: ClauseId,
    pub text: String,
    pub tokens: Vec<Token>,
    pub mood: Mood,
    pub flags: ContextFlags,
}

impl Clause {
    pub fn words(&self) -> impl Iterator<Item = (usize, &Token)> + '_ {
        self.tokens.iter().enumerate().filter(|(_, t)| t.is_word())
    }

    pub fn span_text(&self, from: usize, to: usize) -> &str {
        &self.text[self.tokens[from].span.0..self.tokens[to].span.1]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Message {
    pub message_id: String,
    pub raw_text: String,
    pub clauses: Vec<Clause>,
}

/// Front end producing tagged clauses; the rule analyzer is the default.
pub trait Analyzer: Send + Sync {
    fn segment(&self, message_id: &str, raw_text: &str) -> Message;
    fn tag(&self, clause: Clause, lexicon: &Lexicon) -> Clause;

    fn analyze(&self, message_id: &str, raw_text: &str, lexicon: &Lexicon) -> Message {
        let mut msg = self.segment(message_id, raw_text);
        msg.clauses = msg.clauses.into_iter().map(|c| self.tag(c, lexicon)).collect();
        msg
    }
}

/// Closed-class word lists plus a word-variant table for verb spotting.
#[derive(Debug, Clone)]
pub struct RuleAnalyzer {
    variants: VariantTable,
}

impl RuleAnalyzer {
    pub fn new(variants: VariantTable) -> Self {
        RuleAnalyzer { variants }
    }

    pub fn variants(&self) -> &VariantTable {
        &self.variants
    }
}

impl Analyzer for RuleAnalyzer {
    fn segment(&self, message_id: &str, raw_text: &str) -> Message {
        segment_with(message_id, raw_text, &self.variants)
    }

    fn tag(&self, clause: Clause, lexicon: &Lexicon) -> Clause {
        tag(clause, lexicon, &self.variants)
    }
}

/// Segment with the bundled variant table.
pub fn segment(message_id: &str, raw_text: &str) -> Message {
    segment_with(message_id, raw_text, crate::bundled::variants())
}

pub fn segment_with(message_id: &str, raw_text: &str, variants: &VariantTable) -> Message {
    let toks: Vec<Token> = tokenize(raw_text).into_iter().map(|t| initial_token(raw_text, t)).collect();

    let mut sentences: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for i in 0..toks.len() {
        if i > start && raw_text[toks[i - 1].span.1..toks[i].span.0].contains('\n') {
            sentences.push((start, i));
            start = i;
        }
        if toks[i].is_terminator() && !abbreviation_stop(&toks, i) {
            sentences.push((start, i + 1));
            start = i + 1;
        }
    }
    if start < toks.len() {
        sentences.push((start, toks.len()));
    }

    // fragments without words (a bare link, an address in brackets) join the previous sentence
    let mut merged: Vec<(usize, usize)> = Vec::new();
    for (s, e) in sentences {
        let wordless = !toks[s..e].iter().any(Token::is_word);
        match merged.last_mut() {
            Some(prev) if wordless => prev.1 = e,
            _ => merged.push((s, e)),
        }
    }

    let mut ranges = Vec::new();
    for (s, e) in merged {
        split_coordination(&toks, s, e, variants, &mut ranges);
    }

    let clauses = ranges
        .into_iter()
        .enumerate()
        .map(|(ordinal, (s, e))| {
            let base = toks[s].span.0;
            let text = raw_text[base..toks[e - 1].span.1].to_string();
            let tokens = toks[s..e]
                .iter()
                .map(|t| Token {
                    span: (t.span.0 - base, t.span.1 - base),
                    ..t.clone()
                })
                .collect();
            Clause {
                id: ClauseId {
                    message_id: message_id.to_string(),
                    ordinal,
                },
                text,
                tokens,
                mood: Mood::Declarative,
                flags: ContextFlags::default(),
            }
        })
        .collect();
    Message {
        message_id: message_id.to_string(),
        raw_text: raw_text.to_string(),
        clauses,
    }
}

fn initial_token(text: &str, t: RawTok) -> Token {
    let surface = &text[t.start..t.end];
    let lower = surface.to_lowercase();
    let pos = match t.kind {
        TokKind::Url => Pos::Url,
        TokKind::Email => Pos::Email,
        TokKind::Money => Pos::Money,
        TokKind::Percent => Pos::Percent,
        TokKind::Num => Pos::Num,
        TokKind::Terminator | TokKind::Punct => Pos::Punct,
        TokKind::Word => words::closed_class(&lower.replace('’', "'")).unwrap_or(Pos::Other),
    };
    Token {
        text: surface.to_string(),
        lower,
        pos,
        span: (t.start, t.end),
    }
}

fn abbreviation_stop(toks: &[Token], i: usize) -> bool {
    toks[i].text == "."
        && i > 0
        && toks[i - 1].span.1 == toks[i].span.0
        && words::ABBREVIATIONS.contains(&toks[i - 1].key().as_str())
}

/// Word that can head a clause regardless of lexicon: closed-class verbs and table verbs.
fn candidate_verb(toks: &[Token], i: usize, variants: &VariantTable) -> bool {
    let t = &toks[i];
    if !t.is_word() {
        return false;
    }
    let key = t.key();
    if words::is_auxiliary(&key) {
        return true;
    }
    let nominal = i > 0 && words::is_determiner(&toks[i - 1].key());
    !nominal && t.pos == Pos::Other && variants.is_verb_form(&key)
}

fn split_coordination(
    toks: &[Token],
    start: usize,
    end: usize,
    variants: &VariantTable,
    out: &mut Vec<(usize, usize)>,
) {
    let mut s = start;
    for i in start + 1..end {
        if !matches!(toks[i].key().as_str(), "or" | "and") {
            continue;
        }
        let left = (s..i).any(|j| candidate_verb(toks, j, variants));
        let right = (i + 1..end).any(|j| candidate_verb(toks, j, variants));
        if left && right {
            out.push((s, i));
            s = i;
        }
    }
    out.push((s, end));
}

static DEADLINE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(?ix)
        \b(?:by|before|until|till)\s+(?:
            \d{1,2}(?::\d{2})?\s?(?:am|pm)\b | noon | midnight | tonight | tomorrow | today
            | end\s+of\s+(?:the\s+)?(?:day|week|month)
            | (?:this\s+|next\s+)?(?:monday|tuesday|wednesday|thursday|friday|saturday|sunday)
        )
        | \bwithin\s+(?:\d+|one|two|three|twelve|twenty-four|forty-eight|a\s+few)\s+(?:minutes?|hours?|days?)\b
        | \b(?:asap|immediately|right\s+away|urgently|expires?\s+(?:today|tonight|soon))\b",
    )
    .expect("deadline pattern compiles")
});

/// Annotate tokens, set mood and context flags.
pub fn tag(mut clause: Clause, lexicon: &Lexicon, variants: &VariantTable) -> Clause {
    let n = clause.tokens.len();
    for i in 0..n {
        let key = clause.tokens[i].key();
        if !clause.tokens[i].is_word() {
            continue;
        }
        if words::is_demonstrative(&key) {
            let next_nounish = clause
                .tokens
                .get(i + 1)
                .is_some_and(|t| t.is_word() && matches!(t.pos, Pos::Other | Pos::Noun | Pos::Adj));
            clause.tokens[i].pos = if next_nounish { Pos::Det } else { Pos::Pron };
            continue;
        }
        if clause.tokens[i].pos != Pos::Other {
            continue;
        }
        let nominal = i > 0 && words::is_determiner(&clause.tokens[i - 1].key());
        let in_lexicon = inflect::base_forms(&key).iter().any(|b| lexicon.contains(b))
            || variants.resolve(&key).iter().any(|c| lexicon.contains(&c.lemma));
        clause.tokens[i].pos = if in_lexicon || variants.is_verb_form(&key) {
            if nominal && !inflect::is_participle(&key) {
                Pos::Noun
            } else {
                Pos::Verb
            }
        } else if words::is_adverb(&key, variants) {
            Pos::Adv
        } else if variants.has_pos(&key, PartOfSpeech::Adj) {
            Pos::Adj
        } else if variants.has_pos(&key, PartOfSpeech::Noun) || nominal {
            Pos::Noun
        } else {
            Pos::Other
        };
    }
    clause.mood = mood(&clause, lexicon, variants);
    clause.flags = flags(&clause, lexicon);
    clause
}

fn mood(clause: &Clause, lexicon: &Lexicon, variants: &VariantTable) -> Mood {
    if clause.tokens.iter().any(|t| t.is_terminator() && t.text.contains('?')) {
        return Mood::Interrogative;
    }
    let mut words = clause
        .tokens
        .iter()
        .filter(|t| t.is_word())
        .skip_while(|t| words::is_skippable_lead(&t.key()) || t.pos == Pos::Adv);
    let Some(first) = words.next() else {
        return Mood::Declarative;
    };
    let key = first.key();
    let second = words.next().map(Token::key);
    if words::is_wh_word(&key) && second.is_some() {
        return Mood::Interrogative;
    }
    if words::is_auxiliary(&key) && second.as_deref().is_some_and(words::is_question_subject) {
        return Mood::Interrogative;
    }
    let known_base = lexicon.contains(&key)
        || variants.has_pos(&key, PartOfSpeech::Verb)
        || !lexicon.multiword_starting_with(&key).is_empty()
        || words::IMPERATIVE_STARTERS.contains(&key.as_str());
    if known_base && !words::is_subject_pronoun(&key) {
        Mood::Imperative
    } else {
        Mood::Declarative
    }
}

fn flags(clause: &Clause, lexicon: &Lexicon) -> ContextFlags {
    let keys: Vec<String> = clause.tokens.iter().filter(|t| t.is_word()).map(Token::key).collect();
    let negation_at = keys.iter().position(|k| words::is_negation(k));
    let lose_after = |from: usize| {
        keys[from + 1..].iter().any(|k| {
            inflect::base_forms(k)
                .iter()
                .any(|b| lexicon.members(Category::Lose).contains(b))
        })
    };
    let avoidance = keys.iter().any(|k| {
        inflect::base_forms(k)
            .iter()
            .any(|b| matches!(b.as_str(), "avoid" | "prevent" | "avert"))
    }) || negation_at.is_some_and(lose_after);
    let conditional = keys.first().is_some_and(|k| k == "or")
        || keys.iter().any(|k| matches!(k.as_str(), "if" | "unless" | "otherwise"))
        || keys.windows(2).any(|w| w[0] == "or" && w[1] == "else");
    ContextFlags {
        negated: negation_at.is_some(),
        avoidance_scope: avoidance,
        conditional,
        deadline: DEADLINE.is_match(&clause.text),
    }
}
