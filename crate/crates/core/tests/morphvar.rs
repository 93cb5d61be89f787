use std::collections::BTreeSet;

use askframe::bundled;
use askframe::morphvar::{load_variants, normalize, PartOfSpeech, Provenance, VariantTable};
use proptest::prelude::*;

fn table_forms(t: &VariantTable) -> Vec<String> {
    let forms: BTreeSet<String> = t
        .clusters()
        .iter()
        .flat_map(|c| c.members.iter().map(|(f, _)| f.clone()))
        .collect();
    forms.into_iter().collect()
}

#[test]
fn every_table_form_is_idempotent() {
    let t = bundled::variants();
    for form in table_forms(t) {
        for v in normalize(t, &form) {
            assert!(normalize(t, &v).contains(&v), "{form} -> {v} not stable");
        }
    }
}

#[test]
fn known_nominalizations() {
    let t = bundled::variants();
    assert_eq!(normalize(t, "reference"), BTreeSet::from(["refer".to_string()]));
    assert_eq!(normalize(t, "winner"), BTreeSet::from(["win".to_string()]));
    let c = t.normalize("payment");
    assert_eq!(c[0].lemma, "pay");
    assert_eq!(c[0].provenance, Provenance::VariantMapped);
}

#[test]
fn serialized_table_reloads() {
    let t = bundled::variants();
    let again = load_variants(t.serialize().as_bytes()).unwrap();
    assert_eq!(again.len(), t.len());
    for form in table_forms(t).iter().take(300) {
        assert_eq!(again.resolve(form), t.resolve(form));
    }
}

proptest! {
    #[test]
    fn fallback_is_idempotent(word in "[a-z]{3,14}") {
        let t = bundled::variants();
        for v in normalize(t, &word) {
            prop_assert!(normalize(t, &v).contains(&v), "{} -> {}", word, v);
        }
    }

    #[test]
    fn fallback_is_bounded(word in "[a-z]{1,14}(ation|ment|er|ing|ed|s)") {
        let cands = bundled::variants().normalize(&word);
        prop_assert!(cands.len() <= 2);
    }

    #[test]
    fn adding_clusters_keeps_known_results(split in 1usize..600, extra in 1usize..30) {
        let full = bundled::variants();
        let split = split.min(full.len() - 1);
        let mut small = VariantTable::new();
        for c in &full.clusters()[..split] {
            small.add_cluster(c.members.clone()).unwrap();
        }
        let before: Vec<(String, BTreeSet<String>)> = table_forms(&small)
            .into_iter()
            .map(|f| {
                let r = normalize(&small, &f);
                (f, r)
            })
            .collect();
        for c in full.clusters()[split..].iter().take(extra) {
            small.add_cluster(c.members.clone()).unwrap();
        }
        for (form, old) in before {
            let new = normalize(&small, &form);
            prop_assert!(old.is_subset(&new), "{}: {:?} -> {:?}", form, old, new);
        }
    }
}

#[test]
fn conflicting_cluster_leaves_table_unchanged() {
    let mut t = VariantTable::new();
    t.add_cluster(vec![("pay".into(), PartOfSpeech::Verb), ("payment".into(), PartOfSpeech::Noun)])
        .unwrap();
    let err = t.add_cluster(vec![("repay".into(), PartOfSpeech::Verb), ("payment".into(), PartOfSpeech::Noun)]);
    assert!(err.is_err());
    assert_eq!(t.len(), 1);
    assert!(t.resolve("repay").is_empty());
}
