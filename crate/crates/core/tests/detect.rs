use std::collections::BTreeSet;

use askframe::bundled;
use askframe::detect::{detect_events_with, disambiguate, AskFramingEvent, DetectConfig};
use askframe::lexicon::{load_lexicon, CategorySet, Category, Lexicon, LexiconFormat};
use askframe::pipeline::load_corpus_jsonl;
use askframe::textseg::{Analyzer, Message, RuleAnalyzer};
use proptest::prelude::*;

fn corpus_texts() -> Vec<(String, String)> {
    load_corpus_jsonl(bundled::MINI_CORPUS.as_bytes())
        .unwrap()
        .records
        .into_iter()
        .map(|r| (r.message_id.clone(), r.text()))
        .collect()
}

fn analyze(lex: &Lexicon) -> Vec<Message> {
    let a = RuleAnalyzer::new(bundled::variants().clone());
    corpus_texts().iter().map(|(id, t)| a.analyze(id, t, lex)).collect()
}

fn events(msgs: &[Message], lex: &Lexicon, config: &DetectConfig) -> Vec<AskFramingEvent> {
    msgs.iter()
        .flat_map(|m| m.clauses.iter())
        .flat_map(|c| detect_events_with(c, lex, bundled::variants(), config))
        .collect()
}

#[test]
fn events_come_from_the_lexicon() {
    for lex in bundled::lexica() {
        let msgs = analyze(&lex);
        let evs = events(&msgs, &lex, &DetectConfig::default());
        assert!(!evs.is_empty());
        for e in evs {
            assert!(
                lex.entry_categories(&e.trigger.lemma, &e.trigger.class_id).contains(e.category),
                "{}: {} {:?} not in lexicon",
                lex.name(),
                e.trigger.lemma,
                e.category
            );
            assert!(e.confidence > 0.0 && e.confidence <= 1.0);
            assert!(e.trigger.tokens.0 < e.trigger.tokens.1);
        }
    }
}

#[test]
fn detection_is_deterministic() {
    let lex = bundled::lcs_plus();
    let msgs = analyze(lex);
    let a = events(&msgs, lex, &DetectConfig::default());
    let b = events(&msgs, lex, &DetectConfig::default());
    assert_eq!(a, b);
}

#[test]
fn disambiguation_keeps_something_on_corpus() {
    let lex = bundled::lcs_plus();
    for m in analyze(lex) {
        for c in &m.clauses {
            for (i, t) in c.words() {
                let cands = lex.categories_of(&t.key());
                if cands.is_empty() {
                    continue;
                }
                let kept = disambiguate(&t.key(), cands, c, i);
                assert!(!kept.is_empty());
                assert_eq!(kept.intersection(cands), kept);
            }
        }
    }
}

fn subset(lex: &Lexicon, keep: &[bool]) -> Lexicon {
    let lemmas: Vec<String> = lex
        .triples()
        .into_iter()
        .map(|t| t.2)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .filter(|l| !l.contains(' '))
        .collect();
    let kept: BTreeSet<&String> = lemmas.iter().enumerate().filter(|(i, _)| keep[i % keep.len()]).map(|(_, l)| l).collect();
    let mut text = String::from("# lexicon: subset\n");
    for (c, id, l) in lex.triples() {
        if kept.contains(&l) {
            let label = lex.class(&id).map(|k| k.name.clone()).unwrap_or_default();
            text.push_str(&format!("{c}\t{}\t{label}\t{l}\n", id.as_str()));
        }
    }
    load_lexicon(text.as_bytes(), LexiconFormat::Normalized).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn disambiguation_never_empties(mask in 1u8..16, text in "(you|we|please|do not|if|click|send|lose|win|get|paid|the|link|money|\\.|\\?| )*") {
        let lex = bundled::lcs_plus();
        let cands: CategorySet = Category::ALL.iter().copied().enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .fold(CategorySet::default(), |mut s, (_, c)| { s.insert(c); s });
        let a = RuleAnalyzer::new(bundled::variants().clone());
        let msg = a.analyze("m", &text, lex);
        for c in &msg.clauses {
            for i in 0..c.tokens.len() {
                let kept = disambiguate("x", cands, c, i);
                prop_assert!(!kept.is_empty());
                prop_assert_eq!(kept.intersection(cands), kept);
            }
        }
    }

    /// Dropping single-word lemmas never creates a trigger where the full lexicon had none.
    #[test]
    fn smaller_lexicon_finds_nothing_new(keep in prop::collection::vec(any::<bool>(), 1..12).prop_filter("keeps a lemma", |k| k.iter().any(|b| *b))) {
        let full = bundled::lcs_plus();
        let small = subset(full, &keep);
        let config = DetectConfig::direct_only();
        let msgs = analyze(full);
        let covered: BTreeSet<(String, usize, usize)> = events(&msgs, full, &config)
            .iter()
            .flat_map(|e| (e.trigger.tokens.0..e.trigger.tokens.1).map(move |k| (e.clause_id.message_id.clone(), e.clause_id.ordinal, k)))
            .collect();
        for e in events(&msgs, &small, &config) {
            let key = (e.clause_id.message_id.clone(), e.clause_id.ordinal, e.trigger.tokens.0);
            prop_assert!(covered.contains(&key), "{:?} {}", key, e.trigger.lemma);
        }
    }
}
