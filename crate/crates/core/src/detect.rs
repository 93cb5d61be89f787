//! Per-clause ask/framing event detection.

use serde::{Deserialize, Serialize};

use crate::lexicon::{Category, CategorySet, ClassId, Kind, Lexicon};
use crate::morphvar::{inflect, PartOfSpeech, Provenance, VariantTable};
use crate::textseg::{words, Clause, ClauseId, ContextFlags, Mood, Pos, Token};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContextTag {
    Financial,
    Credential,
    LinkClick,
    Contact,
    Generic,
}

impl ContextTag {
    pub fn as_str(self) -> &'static str {
        match self {
            ContextTag::Financial => "financial",
            ContextTag::Credential => "credential",
            ContextTag::LinkClick => "link_click",
            ContextTag::Contact => "contact",
            ContextTag::Generic => "generic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArgumentSlots {
    pub ask_type: Category,
    pub context: Option<ContextTag>,
    pub target: Option<String>,
    pub object: Option<String>,
}

impl ArgumentSlots {
    /// Optional slots carrying information; a generic context does not count.
    pub fn filled(&self) -> usize {
        usize::from(self.context.is_some_and(|c| c != ContextTag::Generic))
            + usize::from(self.target.is_some())
            + usize::from(self.object.is_some())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trigger {
    pub surface: String,
    pub lemma: String,
    pub class_id: ClassId,
    /// Token range in the clause, end exclusive.
    pub tokens: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AskFramingEvent {
    pub clause_id: ClauseId,
    pub category: Category,
    pub trigger: Trigger,
    pub slots: ArgumentSlots,
    pub confidence: f64,
    pub provenance: Provenance,
    #[serde(skip)]
    pub clause_flags: ContextFlags,
}

impl AskFramingEvent {
    pub fn kind(&self) -> Kind {
        self.category.kind()
    }
}

/// Which triggers may reach the lexicon through the word-variant table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantScope {
    Off,
    AsksOnly,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DetectConfig {
    pub variant_scope: VariantScope,
    pub suffix_fallback: bool,
}

impl Default for DetectConfig {
    fn default() -> Self {
        DetectConfig {
            variant_scope: VariantScope::All,
            suffix_fallback: true,
        }
    }
}

impl DetectConfig {
    /// Lexicon-only matching: no variant mapping and no suffix guesses.
    pub fn direct_only() -> Self {
        DetectConfig {
            variant_scope: VariantScope::Off,
            suffix_fallback: false,
        }
    }
}

pub fn base_confidence(p: Provenance) -> f64 {
    match p {
        Provenance::DirectVerb => 1.0,
        Provenance::VariantMapped => 0.9,
        Provenance::SuffixFallback => 0.6,
    }
}

const OPTIONAL_SLOTS: f64 = 3.0;
const AMBIGUITY_PENALTY: f64 = 0.5;

pub fn confidence(provenance: Provenance, slots: &ArgumentSlots, survivors: usize) -> f64 {
    let fill = (1.0 + slots.filled() as f64) / (1.0 + OPTIONAL_SLOTS);
    let penalty = if survivors > 1 { AMBIGUITY_PENALTY } else { 1.0 };
    base_confidence(provenance) * fill * penalty
}

pub fn detect_events(clause: &Clause, lexicon: &Lexicon, variants: &VariantTable) -> Vec<AskFramingEvent> {
    detect_events_with(clause, lexicon, variants, &DetectConfig::default())
}

pub fn detect_events_with(
    clause: &Clause,
    lexicon: &Lexicon,
    variants: &VariantTable,
    config: &DetectConfig,
) -> Vec<AskFramingEvent> {
    let mut events = Vec::new();
    let toks = &clause.tokens;
    let mut i = 0;
    while i < toks.len() {
        if !can_trigger(toks, i) {
            i += 1;
            continue;
        }
        let hit = match_multiword(toks, i, lexicon)
            .map(|(lemma, end)| (lemma, end, Provenance::DirectVerb))
            .or_else(|| {
                resolve_token(toks, i, lexicon, variants, config).map(|(lemma, p)| (lemma, i + 1, p))
            });
        let Some((lemma, end, provenance)) = hit else {
            i += 1;
            continue;
        };
        let mut candidates = lexicon.categories_of(&lemma);
        if provenance == Provenance::VariantMapped && config.variant_scope == VariantScope::AsksOnly {
            candidates = candidates.of_kind(Kind::Ask);
        }
        if !addressed_to_reader(clause, i) {
            candidates = candidates.of_kind(Kind::Framing);
        }
        if candidates.is_empty() {
            i = end;
            continue;
        }
        let survivors = disambiguate(&lemma, candidates, clause, i);
        for category in survivors.iter() {
            let class_id = lexicon
                .class_for(&lemma, category)
                .cloned()
                .expect("surviving category comes from the lexicon");
            let slots = extract_arguments(clause, (i, end), category);
            events.push(AskFramingEvent {
                clause_id: clause.id.clone(),
                category,
                trigger: Trigger {
                    surface: clause.span_text(i, end - 1).to_string(),
                    lemma: lemma.clone(),
                    class_id,
                    tokens: (i, end),
                },
                confidence: confidence(provenance, &slots, survivors.len()),
                slots,
                provenance,
                clause_flags: clause.flags,
            });
        }
        i = end;
    }
    events
}

fn can_trigger(toks: &[Token], i: usize) -> bool {
    let t = &toks[i];
    if !t.is_word() || matches!(t.pos, Pos::Pron | Pos::Det | Pos::Prep | Pos::Conj | Pos::Adv) {
        return false;
    }
    let key = t.key();
    if words::is_politeness(&key) {
        return false;
    }
    if matches!(key.as_str(), "do" | "does" | "did") {
        // auxiliary do: "did you", "do not"
        return !toks.get(i + 1).is_some_and(|n| {
            let k = n.key();
            words::is_subject_pronoun(&k) || words::is_negation(&k) || k == "n't"
        });
    }
    !words::is_auxiliary(&key)
}

fn match_multiword(toks: &[Token], i: usize, lexicon: &Lexicon) -> Option<(String, usize)> {
    for head in inflect::base_forms(&toks[i].key()) {
        for lemma in lexicon.multiword_starting_with(&head) {
            let rest: Vec<&str> = lemma.split(' ').skip(1).collect();
            let matches = rest.iter().enumerate().all(|(k, part)| {
                toks.get(i + 1 + k).is_some_and(|t| t.is_word() && t.key() == *part)
            });
            if matches {
                return Some((lemma.clone(), i + 1 + rest.len()));
            }
        }
    }
    None
}

fn resolve_token(
    toks: &[Token],
    i: usize,
    lexicon: &Lexicon,
    variants: &VariantTable,
    config: &DetectConfig,
) -> Option<(String, Provenance)> {
    let key = toks[i].key();
    let nominal = i > 0 && words::is_determiner(&toks[i - 1].key()) && !inflect::is_participle(&key);
    if !nominal {
        if let Some(base) = inflect::base_forms(&key).into_iter().find(|b| lexicon.contains(b)) {
            return Some((base, Provenance::DirectVerb));
        }
    }
    if config.variant_scope != VariantScope::Off {
        let noun_form = inflect::base_forms(&key)
            .iter()
            .any(|b| variants.has_pos(b, PartOfSpeech::Noun));
        if !nominal || noun_form {
            if let Some(c) = variants.resolve(&key).into_iter().find(|c| lexicon.contains(&c.lemma)) {
                return Some((c.lemma, Provenance::VariantMapped));
            }
        }
    }
    if config.suffix_fallback && !nominal {
        return variants
            .normalize(&key)
            .into_iter()
            .find(|c| c.provenance == Provenance::SuffixFallback && lexicon.contains(&c.lemma))
            .map(|c| (c.lemma, Provenance::SuffixFallback));
    }
    None
}

/// Narrow a multi-category trigger using mood and context flags; never returns an empty set.
///
/// Rules, first non-empty result wins:
/// 1. imperative outside an avoidance scope keeps ask categories;
/// 2. avoidance, negation or a conditional threat keeps LOSE;
/// 3. a participle with no personal subject (passive or reduced clause) keeps framings;
/// 4. a declarative with a second-person subject before the trigger keeps GAIN;
/// 5. an interrogative keeps ask categories;
/// 6. otherwise all candidates stay.
pub fn disambiguate(_lemma: &str, candidates: CategorySet, clause: &Clause, trigger: usize) -> CategorySet {
    if candidates.len() <= 1 {
        return candidates;
    }
    let asks = candidates.of_kind(Kind::Ask);
    let framings = candidates.of_kind(Kind::Framing);
    let only = |c: Category| candidates.intersection(CategorySet::single(c));
    let flags = clause.flags;

    let rules = [
        (clause.mood == Mood::Imperative && !flags.avoidance_scope, asks),
        (flags.avoidance_scope || flags.negated || flags.conditional, only(Category::Lose)),
        (patient_oriented(clause, trigger), framings),
        (
            clause.mood == Mood::Declarative && second_person_before(clause, trigger),
            only(Category::Gain),
        ),
        (clause.mood == Mood::Interrogative, asks),
    ];
    rules
        .into_iter()
        .find(|(applies, kept)| *applies && !kept.is_empty())
        .map(|(_, kept)| kept)
        .unwrap_or(candidates)
}

fn preceding_words(clause: &Clause, trigger: usize, n: usize) -> impl Iterator<Item = String> + '_ {
    clause.tokens[..trigger.min(clause.tokens.len())]
        .iter()
        .rev()
        .filter(|t| t.is_word())
        .take(n)
        .map(Token::key)
}

fn patient_oriented(clause: &Clause, trigger: usize) -> bool {
    let Some(tok) = clause.tokens.get(trigger) else {
        return false;
    };
    if clause.mood == Mood::Imperative || !inflect::is_participle(&tok.key()) {
        return false;
    }
    !preceding_words(clause, trigger, 3).any(|k| words::is_subject_pronoun(&k) || is_contracted_subject(&k))
}

/// False when the trigger reports the sender's own action or a passive state
/// rather than eliciting one: a first-person subject with no "you" in between,
/// or a participle right after a form of "be". First-person desideratives
/// ("I need", "we want") are requests and stay.
pub fn addressed_to_reader(clause: &Clause, trigger: usize) -> bool {
    if clause.mood == Mood::Imperative {
        return true;
    }
    let before: Vec<String> = clause.tokens[..trigger.min(clause.tokens.len())]
        .iter()
        .filter(|t| t.is_word())
        .map(Token::key)
        .collect();
    let Some(tok) = clause.tokens.get(trigger) else {
        return true;
    };
    let passive = inflect::is_participle(&tok.key())
        && before
            .iter()
            .rev()
            .find(|k| !words::is_negation(k) && !matches!(k.as_str(), "also" | "already" | "just" | "now" | "not"))
            .is_some_and(|k| matches!(k.as_str(), "be" | "is" | "are" | "was" | "were" | "been" | "being" | "am"));
    if passive {
        return false;
    }
    if inflect::base_forms(&tok.key()).iter().any(|b| DESIDERATIVES.contains(&b.as_str())) {
        return true;
    }
    for k in before.iter().rev() {
        if SECOND_PERSON.contains(&k.as_str()) {
            return true;
        }
        if FIRST_PERSON_SUBJECTS.contains(&k.as_str()) {
            return false;
        }
    }
    true
}

const DESIDERATIVES: &[&str] = &["need", "want", "require", "expect", "wish"];
const SECOND_PERSON: &[&str] = &["you", "you've", "you're", "you'll", "you'd", "u", "your"];
const FIRST_PERSON_SUBJECTS: &[&str] = &["i", "we", "i'm", "we're", "i'll", "we'll", "i've", "we've", "i'd", "we'd"];

fn is_contracted_subject(key: &str) -> bool {
    key.split_once('\'')
        .is_some_and(|(head, _)| words::is_subject_pronoun(head))
}

fn second_person_before(clause: &Clause, trigger: usize) -> bool {
    clause.tokens[..trigger.min(clause.tokens.len())]
        .iter()
        .any(|t| matches!(t.key().as_str(), "you" | "you've" | "you're" | "you'll" | "you'd" | "u"))
}

const FINANCIAL: &[&str] = &[
    "money", "cash", "fee", "payment", "debt", "credit", "refund", "bank", "fund", "dollar",
    "prize", "price", "discount", "coupon", "invoice", "balance", "wallet", "bitcoin", "btc",
    "loan", "saving", "savings", "deposit", "wire", "gift", "reward", "rebate", "tax", "salary",
    "cheque", "donation", "winnings", "lottery", "jackpot", "inheritance", "compensation",
    "investment", "profit", "earnings", "income", "cost", "cheap", "free", "euro", "payout",
];

const CREDENTIAL: &[&str] = &[
    "password", "account", "login", "username", "credential", "credentials", "pin", "ssn",
    "passcode", "otp", "identity", "sign-in", "log-in",
];

/// Fill object, target and context slots around the trigger token range.
pub fn extract_arguments(clause: &Clause, trigger: (usize, usize), category: Category) -> ArgumentSlots {
    let toks = &clause.tokens;
    let (start, end) = (trigger.0, trigger.1.min(toks.len()));
    ArgumentSlots {
        ask_type: category,
        context: Some(context_of(clause)),
        target: target_of(toks, start, end),
        object: object_of(clause, end),
    }
}

fn object_of(clause: &Clause, end: usize) -> Option<String> {
    let post = &clause.tokens[end..];
    for kind in [Pos::Url, Pos::Email, Pos::Money, Pos::Percent] {
        if let Some(t) = post.iter().find(|t| t.pos == kind) {
            return Some(t.text.clone());
        }
    }
    let mut j = end;
    while j < clause.tokens.len() {
        let t = &clause.tokens[j];
        let key = t.key();
        match t.pos {
            Pos::Noun | Pos::Other | Pos::Adj => {
                let mut k = j;
                while clause
                    .tokens
                    .get(k + 1)
                    .is_some_and(|n| matches!(n.pos, Pos::Noun | Pos::Other | Pos::Adj))
                {
                    k += 1;
                }
                return Some(clause.span_text(j, k).to_string());
            }
            Pos::Pron if words::is_demonstrative(&key) || key == "it" => return Some(t.text.clone()),
            Pos::Det | Pos::Prep | Pos::Adv | Pos::Pron | Pos::Num => j += 1,
            Pos::Punct if !t.text.contains(['.', '!', '?']) => j += 1,
            _ => return None,
        }
    }
    None
}

fn target_of(toks: &[Token], start: usize, end: usize) -> Option<String> {
    let is_target = |t: &Token| matches!(t.key().as_str(), "you" | "me" | "us");
    if let Some(t) = toks[end..].iter().find(|t| t.is_word()).filter(|t| is_target(t)) {
        return Some(t.text.clone());
    }
    toks[..start]
        .iter()
        .rev()
        .filter(|t| t.is_word())
        .take(3)
        .find(|t| is_target(t))
        .map(|t| t.text.clone())
}

fn context_of(clause: &Clause) -> ContextTag {
    let has = |p: Pos| clause.tokens.iter().any(|t| t.pos == p);
    let vocab = |list: &[&str]| {
        clause
            .tokens
            .iter()
            .filter(|t| t.is_word())
            .any(|t| inflect::base_forms(&t.key()).iter().any(|b| list.contains(&b.as_str())))
    };
    if has(Pos::Money) || has(Pos::Percent) || vocab(FINANCIAL) {
        ContextTag::Financial
    } else if has(Pos::Url) {
        ContextTag::LinkClick
    } else if vocab(CREDENTIAL) {
        ContextTag::Credential
    } else if has(Pos::Email) {
        ContextTag::Contact
    } else {
        ContextTag::Generic
    }
}
