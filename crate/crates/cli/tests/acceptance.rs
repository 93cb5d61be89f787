//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use askframe::bundled;
use askframe::detect::{detect_events_with, AskFramingEvent, DetectConfig, VariantScope};
use askframe::evalkit::{
    compare_lexica, exact_binomial_p, load_ground_truth, mcnemar, mcnemar_counts, prf, score_condition,
    ConfusionCounts, EvalOptions, GoldLabel, GroundTruth, GroundTruthRecord, MatchMode, McNemarMethod, OutputType,
    SystemLabel, SystemMessage,
};
use askframe::lexicon::{diff_lexica, load_lexicon, Category, Kind, LexiconFormat};
use askframe::morphvar::Provenance;
use askframe::pipeline::{load_corpus_jsonl, DetectionRecord};
use askframe::respond::generate_response;
use askframe::textseg::{segment, tag};
use askframe::topask::TopSelection;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

type Verdict = Result<String, String>;

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(rel)
}

fn askframe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_askframe"))
        .args(args)
        .output()
        .expect("askframe binary runs")
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn detect_rows(args: &[&str]) -> Result<(Vec<DetectionRecord>, Duration), String> {
    let start = Instant::now();
    let out = askframe(args);
    let elapsed = start.elapsed();
    ensure(
        out.status.success(),
        format!("detect exited {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)),
    )?;
    let rows = String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(serde_json::from_str)
        .collect::<Result<Vec<DetectionRecord>, _>>()
        .map_err(|e| format!("unparsable detect output: {e}"))?;
    Ok((rows, elapsed))
}

fn example_golden() -> Verdict {
    let corpus = data("corpus/examples.jsonl");
    let lexicon = data("lcs_plus_seed.lex");
    let (rows, elapsed) = detect_rows(&["detect", "--lexicon", lexicon.to_str().unwrap(), corpus.to_str().unwrap()])?;
    let expected = [
        ("m01", "top_ask", Category::Perform, "contact", "contact", Some("jw11@example.com")),
        ("m01", "top_framing", Category::Gain, "won", "win", Some("1.7Eu")),
        ("m02", "top_ask", Category::Give, "send", "send", Some("money")),
        ("m02", "top_framing", Category::Lose, "lose", "lose", Some("money")),
        ("m03", "top_ask", Category::Perform, "paste", "paste", Some("http://example.com/claim")),
        ("m03", "top_framing", Category::Gain, "get", "get", Some("20%")),
    ];
    for (id, kind, cat, surface, lemma, object) in expected {
        let row = rows
            .iter()
            .find(|r| r.message_id == id && r.kind == kind)
            .ok_or(format!("{id}: no {kind} row"))?;
        let got = (
            row.category,
            row.trigger_surface.as_deref().map(str::to_lowercase),
            row.trigger_lemma.as_deref(),
            row.object.as_deref(),
        );
        ensure(
            got == (Some(cat), Some(surface.to_string()), Some(lemma), object),
            format!("{id} {kind}: expected {cat}/{surface}({object:?}), got {got:?}"),
        )?;
    }
    ensure(elapsed < Duration::from_secs(1), format!("took {elapsed:?}"))?;
    Ok(format!("3 messages, 6 top rows exact, {} ms", elapsed.as_millis()))
}

fn adaptation_arithmetic() -> Verdict {
    let out = askframe(&[
        "lexicon",
        "diff",
        data("stylus_seed.lex").to_str().unwrap(),
        data("lcs_plus_seed.lex").to_str().unwrap(),
    ]);
    ensure(out.status.success(), "lexicon diff failed")?;
    let text = String::from_utf8_lossy(&out.stdout);
    for line in ["PERFORM: 6 deleted, 44 added", "LOSE: 174 deleted, 11 added", "GIVE: unchanged", "GAIN: unchanged"] {
        ensure(text.lines().any(|l| l.trim() == line), format!("missing line {line:?}"))?;
    }
    let stylus = load_lexicon(bundled::STYLUS_SEED.as_bytes(), LexiconFormat::Normalized).map_err(|e| e.to_string())?;
    let lcs = load_lexicon(bundled::LCS_PLUS_SEED.as_bytes(), LexiconFormat::Normalized).map_err(|e| e.to_string())?;
    let diff = diff_lexica(&stylus, &lcs);
    let deleted_by_class = |c: Category| -> BTreeMap<String, usize> {
        diff.category(c)
            .classes
            .iter()
            .filter(|(_, d)| !d.deleted.is_empty())
            .map(|(id, d)| (id.as_str().to_string(), d.deleted.len()))
            .collect()
    };
    let expect = |pairs: &[(&str, usize)]| -> BTreeMap<String, usize> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    };
    ensure(
        deleted_by_class(Category::Perform) == expect(&[("10.2", 5), ("30.2", 1)]),
        format!("PERFORM deletions {:?}", deleted_by_class(Category::Perform)),
    )?;
    ensure(
        deleted_by_class(Category::Lose)
            == expect(&[("29.2", 16), ("29.7", 5), ("29.8", 35), ("31.1", 91), ("31.2", 26), ("31.3", 1)]),
        format!("LOSE deletions {:?}", deleted_by_class(Category::Lose)),
    )?;
    let counts = |c: Category| (diff.category(c).deleted, diff.category(c).added);
    ensure(counts(Category::Perform) == (6, 44), format!("PERFORM {:?}", counts(Category::Perform)))?;
    ensure(counts(Category::Lose) == (174, 11), format!("LOSE {:?}", counts(Category::Lose)))?;
    ensure(counts(Category::Give) == (0, 0) && counts(Category::Gain) == (0, 0), "GIVE/GAIN changed")?;
    Ok("PERFORM 5+1=6 del/44 add, LOSE 16+5+35+91+26+1=174 del/11 add".into())
}

fn clause_events(text: &str, config: &DetectConfig) -> Vec<AskFramingEvent> {
    let msg = segment("q", text);
    msg.clauses
        .into_iter()
        .flat_map(|c| {
            let c = tag(c, bundled::lcs_plus(), bundled::variants());
            detect_events_with(&c, bundled::lcs_plus(), bundled::variants(), config)
        })
        .collect()
}

fn variant_mapping() -> Verdict {
    let text = "you can reference your gift card";
    let on = clause_events(text, &DetectConfig::default());
    let hit = on
        .iter()
        .find(|e| e.category == Category::Perform && e.trigger.lemma == "refer")
        .ok_or(format!("no PERFORM/refer event: {on:?}"))?;
    ensure(hit.provenance == Provenance::VariantMapped, format!("provenance {:?}", hit.provenance))?;
    let off = DetectConfig {
        variant_scope: VariantScope::Off,
        ..DetectConfig::default()
    };
    let without = clause_events(text, &off);
    ensure(without.is_empty(), format!("variant mapping off still detects {without:?}"))?;
    ensure(clause_events(text, &DetectConfig::direct_only()).is_empty(), "direct-only detects")?;
    Ok("reference -> refer (variant_mapped); no event with mapping off".into())
}

fn disambiguation_pair() -> Verdict {
    let cats = |t: &str| {
        clause_events(t, &DetectConfig::default())
            .iter()
            .map(|e| e.category)
            .collect::<Vec<_>>()
    };
    let redeem = cats("Redeem coupon below");
    ensure(redeem == [Category::Perform], format!("redeem: {redeem:?}"))?;
    let read = cats("Read carefully to avoid losing account access");
    ensure(read == [Category::Lose], format!("avoid losing: {read:?}"))?;
    Ok("PERFORM only / LOSE only".into())
}

fn responses() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let det = dir.path().join("det.jsonl");
    let out = askframe(&[
        "detect",
        "--out",
        det.to_str().unwrap(),
        data("corpus/examples.jsonl").to_str().unwrap(),
    ]);
    ensure(out.status.success(), "detect failed")?;
    let out = askframe(&["respond", det.to_str().unwrap()]);
    ensure(out.status.success(), "respond failed")?;
    let texts: Vec<String> = String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).map(|v| v["rendered_text"].as_str().unwrap_or("").to_string()))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let expected = [
        "I will contact asap.",
        "I would respond, but I need more info.",
        "Thanks, need more info before I paste link",
    ];
    ensure(texts == expected, format!("got {texts:?}"))?;
    let clarify = generate_response(&TopSelection::empty("x"), bundled::templates());
    ensure(
        clarify.rendered_text.contains("please clarify"),
        format!("empty selection: {:?}", clarify.rendered_text),
    )?;
    Ok("3 verbatim responses + clarification".into())
}

const CATS: [Category; 4] = [Category::Perform, Category::Give, Category::Lose, Category::Gain];

fn random_instance(rng: &mut ChaCha8Rng) -> (Vec<SystemMessage>, GroundTruth) {
    let triggers = ["pay", "click", "lose"];
    let n_msgs = rng.gen_range(1..=3);
    let mut clauses_left = 6usize;
    let mut system = Vec::new();
    let mut records = Vec::new();
    for m in 0..n_msgs {
        let id = format!("m{m}");
        let n = rng.gen_range(1..=clauses_left.saturating_sub(n_msgs - m - 1).max(1));
        clauses_left = clauses_left.saturating_sub(n);
        let mut labels = Vec::new();
        let mut gold_top: Option<usize> = None;
        for ord in 0..n {
            let pick = |rng: &mut ChaCha8Rng| {
                (0..rng.gen_range(0..=2))
                    .map(|_| {
                        let c = CATS[rng.gen_range(0..4)];
                        (c.kind(), c, triggers[rng.gen_range(0..3)].to_string())
                    })
                    .collect::<Vec<_>>()
            };
            let sys = pick(rng);
            let gold = pick(rng);
            let has_gold_ask = gold.iter().any(|l| l.0 == Kind::Ask);
            let top = has_gold_ask && gold_top.is_none() && rng.gen_bool(0.6);
            if top {
                gold_top = Some(ord);
            }
            records.push(GroundTruthRecord {
                message_id: id.clone(),
                clause_ordinal: ord,
                clause_text: None,
                labels: gold
                    .into_iter()
                    .map(|(kind, category, trigger)| GoldLabel { kind, category, trigger })
                    .collect(),
                top_ask: top,
            });
            labels.push(
                sys.into_iter()
                    .map(|(kind, category, trigger)| SystemLabel { kind, category, trigger })
                    .collect::<Vec<_>>(),
            );
        }
        let sys_asks: Vec<(usize, SystemLabel)> = labels
            .iter()
            .enumerate()
            .flat_map(|(o, ls)| ls.iter().filter(|l| l.kind == Kind::Ask).map(move |l| (o, l.clone())))
            .collect();
        let top_ask = if sys_asks.is_empty() || rng.gen_bool(0.2) {
            None
        } else {
            Some(sys_asks[rng.gen_range(0..sys_asks.len())].clone())
        };
        system.push(SystemMessage {
            message_id: id,
            clause_texts: vec![String::new(); n],
            labels,
            top_ask,
        });
    }
    (system, GroundTruth::from_records(records).expect("generated GT is valid"))
}

/// Maximum matching by trying every assignment of system labels to gold labels.
fn brute_force_matches(sys: &[(Category, String)], gold: &[(Category, String)], strict: bool) -> u64 {
    fn go(i: usize, sys: &[(Category, String)], gold: &[(Category, String)], used: &mut Vec<bool>, strict: bool) -> u64 {
        if i == sys.len() {
            return 0;
        }
        let mut best = go(i + 1, sys, gold, used, strict);
        for j in 0..gold.len() {
            let ok = sys[i].0 == gold[j].0 && (!strict || sys[i].1 == gold[j].1);
            if !used[j] && ok {
                used[j] = true;
                best = best.max(1 + go(i + 1, sys, gold, used, strict));
                used[j] = false;
            }
        }
        best
    }
    go(0, sys, gold, &mut vec![false; gold.len()], strict)
}

fn oracle_counts(system: &[SystemMessage], gt: &GroundTruth, output: OutputType, strict: bool) -> ConfusionCounts {
    let mut c = ConfusionCounts::default();
    for m in system {
        let clauses = gt.clauses(&m.message_id).unwrap();
        if output == OutputType::TopAsk {
            let gold = clauses.values().find(|r| r.top_ask).map(|r| {
                let l = r.labels.iter().find(|l| l.kind == Kind::Ask).unwrap();
                (r.clause_ordinal, l.category, l.trigger.clone())
            });
            let sys = m.top_ask.as_ref().map(|(o, l)| (*o, l.category, l.trigger.clone()));
            match (sys, gold) {
                (None, None) => c.tn += 1,
                (Some(_), None) => c.fp += 1,
                (None, Some(_)) => c.fn_ += 1,
                (Some(s), Some(g)) => {
                    if s.0 == g.0 && s.1 == g.1 && (!strict || s.2 == g.2) {
                        c.tp += 1
                    } else {
                        c.fp += 1;
                        c.fn_ += 1;
                    }
                }
            }
            continue;
        }
        let kind = if output == OutputType::Ask { Kind::Ask } else { Kind::Framing };
        for (ord, labels) in m.labels.iter().enumerate() {
            let sys: Vec<_> = labels.iter().filter(|l| l.kind == kind).map(|l| (l.category, l.trigger.clone())).collect();
            let gold: Vec<_> = clauses[&ord]
                .labels
                .iter()
                .filter(|l| l.kind == kind)
                .map(|l| (l.category, l.trigger.clone()))
                .collect();
            if sys.is_empty() && gold.is_empty() {
                c.tn += 1;
                continue;
            }
            let matched = brute_force_matches(&sys, &gold, strict);
            c.tp += matched;
            c.fp += sys.len() as u64 - matched;
            c.fn_ += gold.len() as u64 - matched;
        }
    }
    c
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn metrics_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let instances = 2000;
    let mut checks = 0;
    for _ in 0..instances {
        let (system, gt) = random_instance(&mut rng);
        for output in OutputType::ALL {
            for (mode, strict) in [(MatchMode::Category, false), (MatchMode::CategoryAndTrigger, true)] {
                let got = score_condition(&system, &gt, output, mode).map_err(|e| e.to_string())?;
                let want = oracle_counts(&system, &gt, output, strict);
                ensure(got == want, format!("{output:?} {mode:?}: {got:?} vs oracle {want:?}"))?;
                let p = prf(got);
                if got.tp + got.fp > 0 {
                    ensure(rel_close(p.precision, got.tp as f64 / (got.tp + got.fp) as f64, 1e-12), "precision")?;
                }
                if got.tp + got.fn_ > 0 {
                    ensure(rel_close(p.recall, got.tp as f64 / (got.tp + got.fn_) as f64, 1e-12), "recall")?;
                }
                if p.precision + p.recall > 0.0 {
                    let hm = 2.0 * p.precision * p.recall / (p.precision + p.recall);
                    ensure(rel_close(p.f1, hm, 1e-12), format!("F {} vs {hm}", p.f1))?;
                    ensure(p.f1 <= p.precision.max(p.recall) + 1e-15, "F above max(P, R)")?;
                } else {
                    ensure(p.f1 == 0.0, "F nonzero with P+R=0")?;
                }
                checks += 1;
            }
        }
    }
    Ok(format!("{instances} instances, {checks} condition checks"))
}

fn binom_tail_exact(b: u64, c: u64) -> f64 {
    let n = b + c;
    let k = b.min(c);
    let mut coef: u128 = 1;
    let mut sum: u128 = 0;
    for i in 0..=k {
        if i > 0 {
            coef = coef * (n - i + 1) as u128 / i as u128;
        }
        sum += coef;
    }
    (2.0 * sum as f64 / (1u128 << n) as f64).min(1.0)
}

fn mcnemar_correctness() -> Verdict {
    let mut exact_cases = 0;
    let mut worst_exact = 0f64;
    for n in 0..=24u64 {
        for b in 0..=n {
            let c = n - b;
            let r = mcnemar_counts(b, c);
            ensure(r.method == McNemarMethod::ExactBinomial, format!("b={b} c={c} not exact"))?;
            let diff = (r.p_value - binom_tail_exact(b, c)).abs();
            worst_exact = worst_exact.max(diff);
            ensure(diff <= 1e-12, format!("exact b={b} c={c}: {} vs {}", r.p_value, binom_tail_exact(b, c)))?;
            ensure(r.p_value == exact_binomial_p(c, b), "exact p not symmetric")?;
            exact_cases += 1;
        }
    }
    let chi = ChiSquared::new(1.0).map_err(|e| e.to_string())?;
    let mut chi_cases = 0;
    let mut worst_chi = 0f64;
    for n in 25..=200u64 {
        for b in 0..=n {
            let c = n - b;
            let r = mcnemar_counts(b, c);
            ensure(r.method == McNemarMethod::ChiSquareCc, format!("b={b} c={c} not chi-square"))?;
            let d = (b.abs_diff(c) as f64 - 1.0).max(0.0);
            ensure(rel_close(r.statistic, d * d / n as f64, 1e-15) || r.statistic == 0.0, "statistic")?;
            let want = chi.sf(r.statistic);
            let diff = (r.p_value - want).abs();
            worst_chi = worst_chi.max(diff);
            ensure(diff <= 1e-9, format!("chi b={b} c={c}: {} vs {want}", r.p_value))?;
            ensure(mcnemar_counts(c, b).p_value == r.p_value, "chi p not symmetric")?;
            chi_cases += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let len = rng.gen_range(1..120);
        let a: Vec<bool> = (0..len).map(|_| rng.gen()).collect();
        let b: Vec<bool> = (0..len).map(|_| rng.gen()).collect();
        let (x, y) = (mcnemar(&a, &b).unwrap(), mcnemar(&b, &a).unwrap());
        ensure((x.b, x.c) == (y.c, y.b) && x.p_value == y.p_value, "vector swap")?;
        ensure(mcnemar(&a, &a).unwrap().p_value == 1.0, "identical vectors p != 1")?;
    }
    Ok(format!(
        "{exact_cases} exact cases (max err {worst_exact:.1e}), {chi_cases} chi-square cases (max err {worst_chi:.1e})"
    ))
}

fn results_ordering() -> Verdict {
    let start = Instant::now();
    let corpus = load_corpus_jsonl(bundled::MINI_CORPUS.as_bytes()).map_err(|e| e.to_string())?;
    ensure(corpus.skipped.is_empty(), "mini corpus has malformed lines")?;
    let gt = load_ground_truth(bundled::MINI_GT.as_bytes()).map_err(|e| e.to_string())?;
    let neither = gt.records().filter(|r| r.labels.is_empty()).count() as f64 / gt.clause_count() as f64;
    ensure(gt.message_count() >= 12, format!("{} messages", gt.message_count()))?;
    ensure(gt.clause_count() >= 60, format!("{} clauses", gt.clause_count()))?;
    ensure((0.75..=0.85).contains(&neither), format!("neither share {neither:.3}"))?;
    let report = compare_lexica(&corpus.records, &gt, &bundled::lexica(), bundled::variants(), &EvalOptions::default())
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let get = |name: &str, o: OutputType| {
        report
            .reports
            .iter()
            .find(|r| r.lexicon == name)
            .map(|r| r.condition(o).prf)
            .expect("lexicon reported")
    };
    for o in [OutputType::Ask, OutputType::TopAsk] {
        let (t, s, l) = (get("thesaurus", o).f1, get("stylus", o).f1, get("lcs_plus", o).f1);
        ensure(l >= s && s >= t, format!("{o:?} F: lcs_plus {l:.3}, stylus {s:.3}, thesaurus {t:.3}"))?;
    }
    let (sf, lf) = (get("stylus", OutputType::Framing), get("lcs_plus", OutputType::Framing));
    ensure(sf.recall >= lf.recall, format!("framing R stylus {:.3} < lcs_plus {:.3}", sf.recall, lf.recall))?;
    ensure(lf.precision > sf.precision, format!("framing P lcs_plus {:.3} <= stylus {:.3}", lf.precision, sf.precision))?;
    ensure(elapsed < Duration::from_secs(5), format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} msgs/{} clauses ({:.0}% neither); Ask F {:.3}>={:.3}>={:.3}; TopAsk F {:.3}>={:.3}>={:.3}; Framing R {:.3}>={:.3}, P {:.3}>{:.3}; {} ms",
        gt.message_count(),
        gt.clause_count(),
        neither * 100.0,
        get("lcs_plus", OutputType::Ask).f1,
        get("stylus", OutputType::Ask).f1,
        get("thesaurus", OutputType::Ask).f1,
        get("lcs_plus", OutputType::TopAsk).f1,
        get("stylus", OutputType::TopAsk).f1,
        get("thesaurus", OutputType::TopAsk).f1,
        sf.recall,
        lf.recall,
        lf.precision,
        sf.precision,
        elapsed.as_millis()
    ))
}

fn end_to_end(dir: &Path, tag: &str) -> Result<Vec<Vec<u8>>, String> {
    let corpus = data("corpus/mini_corpus.jsonl");
    let gt = data("corpus/mini_gt.jsonl");
    let det = dir.join(format!("det-{tag}.jsonl"));
    let resp = dir.join(format!("resp-{tag}.jsonl"));
    let report = dir.join(format!("report-{tag}.json"));
    let steps: [Vec<&str>; 3] = [
        vec!["detect", "--out", det.to_str().unwrap(), corpus.to_str().unwrap()],
        vec!["respond", "--out", resp.to_str().unwrap(), det.to_str().unwrap()],
        vec!["eval", "--out", report.to_str().unwrap(), corpus.to_str().unwrap(), gt.to_str().unwrap()],
    ];
    for args in &steps {
        let out = askframe(args);
        ensure(out.status.success(), format!("{} exited {:?}", args[0], out.status.code()))?;
    }
    [det, resp, report.clone(), report.with_extension("txt")]
        .iter()
        .map(|p| std::fs::read(p).map_err(|e| e.to_string()))
        .collect()
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let first = end_to_end(dir.path(), "a")?;
    let second = end_to_end(dir.path(), "b")?;
    ensure(first == second, "outputs differ between runs")?;
    let bytes: usize = first.iter().map(Vec::len).sum();
    Ok(format!("detect/respond/eval outputs byte-identical ({bytes} bytes)"))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("example golden outputs", example_golden),
        ("adaptation arithmetic", adaptation_arithmetic),
        ("variant mapping", variant_mapping),
        ("disambiguation pair", disambiguation_pair),
        ("responses", responses),
        ("metrics oracle", metrics_oracle),
        ("mcnemar correctness", mcnemar_correctness),
        ("results ordering on mini corpus", results_ordering),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}. {name}: {why}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
