//! Closed-class word lists used by the rule analyzer.

use crate::morphvar::VariantTable;

use super::Pos;

pub const ABBREVIATIONS: &[&str] = &[
    "mr", "mrs", "ms", "dr", "st", "jr", "sr", "prof", "vs", "etc", "inc", "ltd", "co", "e", "g",
    "i", "e.g", "i.e", "approx", "dept", "fig",
];

const PRONOUNS: &[&str] = &[
    "i", "me", "you", "he", "him", "she", "it", "we", "us", "they", "them", "myself", "yourself",
    "yourselves", "himself", "herself", "itself", "ourselves", "themselves", "someone", "anyone",
    "everyone", "somebody", "anybody", "everybody", "something", "anything", "everything",
    "nothing", "nobody", "who", "whom", "whose", "what", "which", "mine", "yours", "ours",
    "theirs", "i'm", "you're", "we're", "they're", "it's", "that's", "there's", "i've",
    "you've", "we've", "they've", "i'll", "you'll", "we'll", "they'll", "i'd", "you'd",
    "we'd", "he's", "she's", "let's",
];

const DETERMINERS: &[&str] = &[
    "a", "an", "the", "this", "that", "these", "those", "my", "your", "our", "their", "his",
    "her", "its", "some", "any", "no", "every", "each", "all", "both", "another", "other",
    "such", "several", "many", "few", "more", "most", "much", "either", "neither",
];

const PREPOSITIONS: &[&str] = &[
    "to", "of", "in", "on", "at", "by", "for", "with", "from", "into", "onto", "about", "over",
    "under", "after", "before", "during", "within", "without", "through", "via", "per", "until",
    "till", "upon", "between", "across", "below", "above", "behind", "near", "than", "around",
    "against", "among", "towards", "toward", "beside", "beyond", "since", "out", "off",
];

const AUXILIARIES: &[&str] = &[
    "be", "am", "is", "are", "was", "were", "been", "being", "have", "has", "had", "having",
    "do", "does", "did", "will", "would", "shall", "should", "can", "could", "may", "might",
    "must", "won't", "can't", "cannot", "don't", "doesn't", "didn't", "isn't", "aren't",
    "wasn't", "weren't", "haven't", "hasn't", "hadn't", "shouldn't", "wouldn't", "couldn't",
    "mustn't", "dont", "cant", "wont", "didnt", "doesnt", "isnt",
];

const ADVERBS: &[&str] = &[
    "not", "never", "now", "just", "also", "only", "very", "really", "here", "there", "today",
    "tomorrow", "tonight", "asap", "soon", "again", "already", "still", "always", "even",
    "too", "once", "then", "please", "kindly", "ever", "instead", "almost", "quite", "rather",
    "yet", "away", "back", "together", "below", "above", "ahead", "maybe", "perhaps", "well",
];

const CONJUNCTIONS: &[&str] = &[
    "and", "or", "but", "so", "nor", "if", "unless", "because", "while", "although", "though",
    "whether", "otherwise", "whereas", "as",
];

const NEGATIONS: &[&str] = &[
    "not", "no", "never", "don't", "doesn't", "didn't", "won't", "can't", "cannot", "isn't",
    "aren't", "wasn't", "weren't", "haven't", "hasn't", "hadn't", "shouldn't", "wouldn't",
    "couldn't", "mustn't", "dont", "cant", "wont", "didnt", "doesnt", "isnt",
];

const WH_WORDS: &[&str] = &["what", "why", "how", "when", "where", "who", "which", "whom", "whose"];

const SUBJECT_PRONOUNS: &[&str] = &["i", "you", "we", "they", "he", "she", "it"];

const LY_NOT_ADVERBS: &[&str] = &[
    "apply", "reply", "supply", "comply", "imply", "rely", "multiply", "ally", "rally", "tally",
    "bully", "family", "fly", "belly", "jelly", "holly", "silly", "lily", "italy", "july",
];

/// Closed-class verbs allowed to open an imperative even when no lexicon knows them.
pub const IMPERATIVE_STARTERS: &[&str] = &[
    "do", "don't", "dont", "be", "avoid", "let", "make", "keep", "stay", "go", "come", "help",
    "use", "see", "find", "take", "never",
];

pub(crate) fn closed_class(key: &str) -> Option<Pos> {
    if DETERMINERS.contains(&key) {
        Some(Pos::Det)
    } else if PRONOUNS.contains(&key) {
        Some(Pos::Pron)
    } else if PREPOSITIONS.contains(&key) {
        Some(Pos::Prep)
    } else if AUXILIARIES.contains(&key) {
        Some(Pos::Verb)
    } else if ADVERBS.contains(&key) {
        Some(Pos::Adv)
    } else if CONJUNCTIONS.contains(&key) {
        Some(Pos::Conj)
    } else {
        None
    }
}

pub fn is_determiner(key: &str) -> bool {
    DETERMINERS.contains(&key)
}

pub fn is_demonstrative(key: &str) -> bool {
    matches!(key, "this" | "that" | "these" | "those")
}

pub fn is_auxiliary(key: &str) -> bool {
    AUXILIARIES.contains(&key)
}

pub fn is_conjunction(key: &str) -> bool {
    CONJUNCTIONS.contains(&key)
}

pub fn is_negation(key: &str) -> bool {
    NEGATIONS.contains(&key)
}

pub fn is_preposition(key: &str) -> bool {
    PREPOSITIONS.contains(&key)
}

pub fn is_pronoun(key: &str) -> bool {
    PRONOUNS.contains(&key)
}

pub fn is_wh_word(key: &str) -> bool {
    WH_WORDS.contains(&key)
}

pub fn is_subject_pronoun(key: &str) -> bool {
    SUBJECT_PRONOUNS.contains(&key)
}

pub fn is_politeness(key: &str) -> bool {
    matches!(key, "please" | "kindly" | "pls" | "plz")
}

/// Word that may follow a clause-initial auxiliary in a question.
pub fn is_question_subject(key: &str) -> bool {
    SUBJECT_PRONOUNS.contains(&key)
        || matches!(key, "there" | "your" | "my" | "our" | "their" | "his" | "her" | "its" | "the")
}

/// Words skipped when looking for the head of a clause.
pub fn is_skippable_lead(key: &str) -> bool {
    is_politeness(key)
        || matches!(
            key,
            "and" | "or" | "but" | "so" | "then" | "also" | "just" | "now" | "simply" | "therefore"
                | "meanwhile" | "additionally" | "finally" | "first" | "next"
        )
}

pub fn is_adverb(key: &str, variants: &VariantTable) -> bool {
    if ADVERBS.contains(&key) {
        return true;
    }
    key.len() > 4
        && key.ends_with("ly")
        && !LY_NOT_ADVERBS.contains(&key)
        && variants.lookup(key).next().is_none()
}
