//! Seed lexica, variant table, templates and the mini evaluation corpus shipped with the crate.

use std::sync::LazyLock;

use crate::lexicon::{load_ledger, load_lexicon, AdaptationLedger, Lexicon, LexiconFormat};
use crate::morphvar::{load_variants, VariantTable};
use crate::respond::{load_templates, TemplateSet};

pub const STYLUS_SEED: &str = include_str!("../data/stylus_seed.lex");
pub const LCS_PLUS_SEED: &str = include_str!("../data/lcs_plus_seed.lex");
pub const LCS_PLUS_LEDGER: &str = include_str!("../data/lcs_plus.ledger");
pub const THESAURUS_SEED: &str = include_str!("../data/thesaurus_seed.txt");
pub const VARIANTS: &str = include_str!("../data/variants.txt");
pub const TEMPLATES: &str = include_str!("../data/templates.txt");
pub const MINI_CORPUS: &str = include_str!("../data/corpus/mini_corpus.jsonl");
pub const MINI_GT: &str = include_str!("../data/corpus/mini_gt.jsonl");
pub const EXAMPLES_CORPUS: &str = include_str!("../data/corpus/examples.jsonl");

static STYLUS: LazyLock<Lexicon> = LazyLock::new(|| {
    load_lexicon(STYLUS_SEED.as_bytes(), LexiconFormat::Normalized).expect("bundled stylus seed is valid")
});
static LCS_PLUS: LazyLock<Lexicon> = LazyLock::new(|| {
    load_lexicon(LCS_PLUS_SEED.as_bytes(), LexiconFormat::Normalized).expect("bundled lcs+ seed is valid")
});
static THESAURUS: LazyLock<Lexicon> = LazyLock::new(|| {
    load_lexicon(THESAURUS_SEED.as_bytes(), LexiconFormat::FlatList).expect("bundled thesaurus seed is valid")
});
static VARIANT_TABLE: LazyLock<VariantTable> =
    LazyLock::new(|| load_variants(VARIANTS.as_bytes()).expect("bundled variant table is valid"));
static TEMPLATE_SET: LazyLock<TemplateSet> =
    LazyLock::new(|| load_templates(TEMPLATES.as_bytes()).expect("bundled templates are valid"));

pub fn stylus() -> &'static Lexicon {
    &STYLUS
}

pub fn lcs_plus() -> &'static Lexicon {
    &LCS_PLUS
}

pub fn thesaurus() -> &'static Lexicon {
    &THESAURUS
}

/// The three seed lexica in baseline-to-adapted order.
pub fn lexica() -> Vec<Lexicon> {
    vec![thesaurus().clone(), stylus().clone(), lcs_plus().clone()]
}

pub fn lcs_plus_ledger() -> AdaptationLedger {
    load_ledger(LCS_PLUS_LEDGER.as_bytes()).expect("bundled ledger is valid")
}

pub fn variants() -> &'static VariantTable {
    &VARIANT_TABLE
}

pub fn templates() -> &'static TemplateSet {
    &TEMPLATE_SET
}
