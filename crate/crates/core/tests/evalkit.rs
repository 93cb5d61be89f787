use askframe::bundled;
use askframe::evalkit::{
    chi_square_sf_1df, compare_lexica, exact_binomial_p, load_ground_truth, mcnemar, mcnemar_counts, score_condition,
    EvalError, EvalOptions, GoldLabel, GroundTruth, GroundTruthRecord, MatchMode, OutputType, SystemLabel,
    SystemMessage,
};
use askframe::lexicon::{Category, Kind};
use askframe::pipeline::load_corpus_jsonl;
use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

#[test]
fn exact_and_chi_square_agree_on_large_counts() {
    let chi = ChiSquared::new(1.0).unwrap();
    for n in 25u64..=100 {
        for b in 0..=n {
            let c = n - b;
            let d = (b.abs_diff(c) as f64 - 1.0).max(0.0);
            let stat = d * d / n as f64;
            let approx = chi_square_sf_1df(stat);
            assert!((approx - chi.sf(stat)).abs() < 1e-9, "sf({stat})");
            let exact = exact_binomial_p(b, c);
            assert!((approx - exact).abs() < 0.02, "b={b} c={c}: {approx} vs {exact}");
            assert_eq!(mcnemar_counts(b, c).p_value, approx);
        }
    }
}

proptest! {
    #[test]
    fn mcnemar_is_symmetric(pairs in prop::collection::vec(any::<(bool, bool)>(), 0..200)) {
        let (a, b): (Vec<bool>, Vec<bool>) = pairs.into_iter().unzip();
        let x = mcnemar(&a, &b).unwrap();
        let y = mcnemar(&b, &a).unwrap();
        prop_assert_eq!((x.b, x.c), (y.c, y.b));
        prop_assert_eq!(x.p_value, y.p_value);
        prop_assert!((0.0..=1.0).contains(&x.p_value));
    }
}

#[test]
fn unequal_vectors_are_rejected() {
    assert!(matches!(mcnemar(&[true], &[]), Err(EvalError::LengthMismatch { a: 1, b: 0 })));
}

const CATS: [Category; 4] = [Category::Perform, Category::Give, Category::Lose, Category::Gain];

fn arb_case() -> impl Strategy<Value = (Vec<SystemMessage>, GroundTruth)> {
    let clause = (prop::collection::vec(0..4usize, 0..3), prop::collection::vec(0..4usize, 0..3));
    prop::collection::vec(prop::collection::vec(clause, 1..5), 1..6).prop_map(|msgs| {
        let mut system = Vec::new();
        let mut records = Vec::new();
        for (m, clauses) in msgs.into_iter().enumerate() {
            let id = format!("m{m}");
            let mut labels = Vec::new();
            for (ord, (sys, gold)) in clauses.into_iter().enumerate() {
                labels.push(
                    sys.into_iter()
                        .map(|c| SystemLabel { kind: CATS[c].kind(), category: CATS[c], trigger: "x".into() })
                        .collect(),
                );
                records.push(GroundTruthRecord {
                    message_id: id.clone(),
                    clause_ordinal: ord,
                    clause_text: None,
                    labels: gold
                        .into_iter()
                        .map(|c| GoldLabel { kind: CATS[c].kind(), category: CATS[c], trigger: "x".into() })
                        .collect(),
                    top_ask: false,
                });
            }
            system.push(SystemMessage {
                message_id: id,
                clause_texts: vec![String::new(); labels.len()],
                labels,
                top_ask: None,
            });
        }
        (system, GroundTruth::from_records(records).unwrap())
    })
}

proptest! {
    #[test]
    fn counts_conserve_labels((system, gt) in arb_case()) {
        for (output, kind) in [(OutputType::Ask, Kind::Ask), (OutputType::Framing, Kind::Framing)] {
            let c = score_condition(&system, &gt, output, MatchMode::Category).unwrap();
            let sys_total: u64 = system.iter().flat_map(|m| m.labels.iter().flatten()).filter(|l| l.kind == kind).count() as u64;
            let gold_total: u64 = gt.records().flat_map(|r| r.labels.iter()).filter(|l| l.kind == kind).count() as u64;
            prop_assert_eq!(c.tp + c.fp, sys_total);
            prop_assert_eq!(c.tp + c.fn_, gold_total);
            let empty = system.iter().flat_map(|m| {
                let gt = &gt;
                m.labels.iter().enumerate().map(move |(o, l)| {
                    let rec = &gt.clauses(&m.message_id).unwrap()[&o];
                    !l.iter().any(|x| x.kind == kind) && !rec.labels.iter().any(|x| x.kind == kind)
                })
            }).filter(|b| *b).count() as u64;
            prop_assert_eq!(c.tn, empty);
        }
        let top = score_condition(&system, &gt, OutputType::TopAsk, MatchMode::Category).unwrap();
        prop_assert_eq!(top.tn, system.len() as u64);
    }
}

#[test]
fn duplicate_lexicon_never_differs() {
    let corpus = load_corpus_jsonl(bundled::MINI_CORPUS.as_bytes()).unwrap().records;
    let gt = load_ground_truth(bundled::MINI_GT.as_bytes()).unwrap();
    let lex = bundled::lcs_plus().clone();
    let report = compare_lexica(&corpus, &gt, &[lex.clone(), lex], bundled::variants(), &EvalOptions::default()).unwrap();
    assert_eq!(report.pairwise.len(), 3);
    for p in &report.pairwise {
        assert_eq!((p.result.b, p.result.c), (0, 0));
        assert_eq!(p.result.p_value, 1.0);
        assert!(!p.significant);
    }
    assert_eq!(report.reports[0], report.reports[1]);
}

#[test]
fn single_lexicon_comparison_is_refused() {
    let gt = GroundTruth::default();
    let r = compare_lexica(&[], &gt, &[bundled::stylus().clone()], bundled::variants(), &EvalOptions::default());
    assert!(matches!(r, Err(EvalError::TooFewLexica(1))));
}

#[test]
fn ground_truth_rejects_duplicates_and_double_top_asks() {
    let dup = r#"{"message_id":"a","clause_ordinal":0}
{"message_id":"a","clause_ordinal":0}"#;
    assert!(matches!(load_ground_truth(dup.as_bytes()), Err(EvalError::DuplicateRecord { line: 2, .. })));
    let two = r#"{"message_id":"a","clause_ordinal":0,"top_ask":true,"labels":[{"kind":"ask","category":"PERFORM","trigger":"click"}]}
{"message_id":"a","clause_ordinal":1,"top_ask":true,"labels":[{"kind":"ask","category":"GIVE","trigger":"pay"}]}"#;
    assert!(matches!(load_ground_truth(two.as_bytes()), Err(EvalError::MultipleTopAsks { .. })));
}
