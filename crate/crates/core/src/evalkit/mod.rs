//! Clause-level scoring against ground truth, P/R/F and paired significance tests between lexica.

mod mcnemar;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::BufRead;

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use mcnemar::{
    chi_square_sf_1df, exact_binomial_p, gamma_q, ln_gamma, mcnemar, mcnemar_counts, McNemarMethod,
    McNemarResult, EXACT_BELOW,
};

use crate::detect::DetectConfig;
use crate::lexicon::{Category, Kind, Lexicon};
use crate::morphvar::VariantTable;
use crate::pipeline::{CorpusRecord, MessageResult, Pipeline};

pub const DEFAULT_ALPHA: f64 = 0.02;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("ground truth line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("ground truth line {line}: duplicate record for {message_id}#{ordinal}")]
    DuplicateRecord { line: usize, message_id: String, ordinal: usize },
    #[error("ground truth: more than one top ask in message {message_id}")]
    MultipleTopAsks { message_id: String },
    #[error("ground truth references unknown message {message_id}")]
    UnknownMessage { message_id: String },
    #[error("misaligned ground truth at clause {message_id}#{ordinal}: {reason}")]
    Misaligned { message_id: String, ordinal: usize, reason: String },
    #[error("decision vectors differ in length ({a} vs {b})")]
    LengthMismatch { a: usize, b: usize },
    #[error("comparison needs at least two lexica, got {0}")]
    TooFewLexica(usize),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldLabel {
    pub kind: Kind,
    pub category: Category,
    pub trigger: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruthRecord {
    pub message_id: String,
    pub clause_ordinal: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clause_text: Option<String>,
    #[serde(default)]
    pub labels: Vec<GoldLabel>,
    /// Marks the first ask label of this clause as the message's top ask.
    #[serde(default)]
    pub top_ask: bool,
}

impl GroundTruthRecord {
    pub fn top_ask_label(&self) -> Option<&GoldLabel> {
        self.top_ask.then(|| self.labels.iter().find(|l| l.kind == Kind::Ask)).flatten()
    }
}

/// Records by message (file order) and clause ordinal.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GroundTruth {
    messages: Vec<(String, BTreeMap<usize, GroundTruthRecord>)>,
}

impl GroundTruth {
    pub fn from_records(records: Vec<GroundTruthRecord>) -> Result<Self, EvalError> {
        let mut gt = GroundTruth::default();
        for (idx, rec) in records.into_iter().enumerate() {
            gt.insert(idx + 1, rec)?;
        }
        gt.check_top_asks()?;
        Ok(gt)
    }

    fn insert(&mut self, line: usize, rec: GroundTruthRecord) -> Result<(), EvalError> {
        if let Some(bad) = rec.labels.iter().find(|l| l.category.kind() != l.kind) {
            return Err(EvalError::Malformed {
                line,
                reason: format!("label {} is not of kind {:?}", bad.category, bad.kind),
            });
        }
        if rec.top_ask && rec.top_ask_label().is_none() {
            return Err(EvalError::Malformed {
                line,
                reason: "top_ask set on a clause without an ask label".into(),
            });
        }
        let pos = match self.messages.iter().position(|(id, _)| *id == rec.message_id) {
            Some(p) => p,
            None => {
                self.messages.push((rec.message_id.clone(), BTreeMap::new()));
                self.messages.len() - 1
            }
        };
        let clauses = &mut self.messages[pos].1;
        if clauses.contains_key(&rec.clause_ordinal) {
            return Err(EvalError::DuplicateRecord {
                line,
                message_id: rec.message_id,
                ordinal: rec.clause_ordinal,
            });
        }
        clauses.insert(rec.clause_ordinal, rec);
        Ok(())
    }

    fn check_top_asks(&self) -> Result<(), EvalError> {
        for (id, clauses) in &self.messages {
            if clauses.values().filter(|r| r.top_ask).count() > 1 {
                return Err(EvalError::MultipleTopAsks { message_id: id.clone() });
            }
        }
        Ok(())
    }

    pub fn message_ids(&self) -> impl Iterator<Item = &str> {
        self.messages.iter().map(|(id, _)| id.as_str())
    }

    pub fn clauses(&self, message_id: &str) -> Option<&BTreeMap<usize, GroundTruthRecord>> {
        self.messages.iter().find(|(id, _)| id == message_id).map(|(_, c)| c)
    }

    pub fn clause_count(&self) -> usize {
        self.messages.iter().map(|(_, c)| c.len()).sum()
    }

    pub fn message_count(&self) -> usize {
        self.messages.len()
    }

    pub fn records(&self) -> impl Iterator<Item = &GroundTruthRecord> {
        self.messages.iter().flat_map(|(_, c)| c.values())
    }

    fn top_ask(&self, message_id: &str) -> Option<(usize, &GoldLabel)> {
        self.clauses(message_id)?
            .values()
            .find_map(|r| r.top_ask_label().map(|l| (r.clause_ordinal, l)))
    }
}

pub fn load_ground_truth<R: BufRead>(src: R) -> Result<GroundTruth, EvalError> {
    let mut gt = GroundTruth::default();
    for (idx, raw) in src.lines().enumerate() {
        let line = idx + 1;
        let raw = raw?;
        if raw.trim().is_empty() {
            continue;
        }
        let rec: GroundTruthRecord = serde_json::from_str(&raw).map_err(|e| EvalError::Malformed {
            line,
            reason: e.to_string(),
        })?;
        gt.insert(line, rec)?;
    }
    gt.check_top_asks()?;
    Ok(gt)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemLabel {
    pub kind: Kind,
    pub category: Category,
    pub trigger: String,
}

/// What scoring needs from one processed message.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemMessage {
    pub message_id: String,
    pub clause_texts: Vec<String>,
    /// Labels per clause ordinal.
    pub labels: Vec<Vec<SystemLabel>>,
    pub top_ask: Option<(usize, SystemLabel)>,
}

impl From<&MessageResult> for SystemMessage {
    fn from(r: &MessageResult) -> Self {
        let mut labels = vec![Vec::new(); r.message.clauses.len()];
        for e in &r.events {
            labels[e.clause_id.ordinal].push(SystemLabel {
                kind: e.kind(),
                category: e.category,
                trigger: e.trigger.lemma.clone(),
            });
        }
        SystemMessage {
            message_id: r.message.message_id.clone(),
            clause_texts: r.message.clauses.iter().map(|c| c.text.clone()).collect(),
            labels,
            top_ask: r.selection.top_ask.as_ref().map(|e| {
                (
                    e.clause_id.ordinal,
                    SystemLabel {
                        kind: Kind::Ask,
                        category: e.category,
                        trigger: e.trigger.lemma.clone(),
                    },
                )
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputType {
    Ask,
    Framing,
    TopAsk,
}

impl OutputType {
    pub const ALL: [OutputType; 3] = [OutputType::Ask, OutputType::Framing, OutputType::TopAsk];

    pub fn as_str(self) -> &'static str {
        match self {
            OutputType::Ask => "Ask",
            OutputType::Framing => "Framing",
            OutputType::TopAsk => "TopAsk",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchMode {
    #[default]
    Category,
    CategoryAndTrigger,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionCounts {
    pub fn decisions(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

impl std::ops::AddAssign for ConfusionCounts {
    fn add_assign(&mut self, o: Self) {
        self.tp += o.tp;
        self.fp += o.fp;
        self.fn_ += o.fn_;
        self.tn += o.tn;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Set when tp + fp = 0 and precision is reported as 0 by convention.
    pub precision_undefined: bool,
    /// Set when tp + fn = 0 and recall is reported as 0 by convention.
    pub recall_undefined: bool,
}

impl Prf {
    pub fn is_degenerate(&self) -> bool {
        self.precision_undefined || self.recall_undefined
    }
}

pub fn prf(c: ConfusionCounts) -> Prf {
    let ratio = |num: u64, den: u64| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let precision = ratio(c.tp, c.tp + c.fp);
    let recall = ratio(c.tp, c.tp + c.fn_);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Prf {
        precision,
        recall,
        f1,
        precision_undefined: c.tp + c.fp == 0,
        recall_undefined: c.tp + c.fn_ == 0,
    }
}

fn key<'a>(mode: MatchMode, category: Category, trigger: &'a str) -> (Category, &'a str) {
    match mode {
        MatchMode::Category => (category, ""),
        MatchMode::CategoryAndTrigger => (category, trigger),
    }
}

/// Multiset matching of two key lists: (matched, unmatched system, unmatched gold).
fn match_keys<K: Ord>(mut system: Vec<K>, mut gold: Vec<K>) -> (u64, u64, u64) {
    system.sort();
    gold.sort();
    let (mut i, mut j, mut matched) = (0, 0, 0);
    while i < system.len() && j < gold.len() {
        match system[i].cmp(&gold[j]) {
            std::cmp::Ordering::Equal => {
                matched += 1;
                i += 1;
                j += 1;
            }
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
        }
    }
    (matched, system.len() as u64 - matched, gold.len() as u64 - matched)
}

fn normalize_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Every message and clause on one side has a counterpart on the other.
pub fn check_alignment(system: &[SystemMessage], gt: &GroundTruth) -> Result<(), EvalError> {
    let by_id: BTreeMap<&str, &SystemMessage> = system.iter().map(|m| (m.message_id.as_str(), m)).collect();
    if let Some(id) = gt.message_ids().find(|id| !by_id.contains_key(id)) {
        return Err(EvalError::UnknownMessage { message_id: id.into() });
    }
    for msg in system {
        let misaligned = |ordinal: usize, reason: String| EvalError::Misaligned {
            message_id: msg.message_id.clone(),
            ordinal,
            reason,
        };
        let clauses = gt
            .clauses(&msg.message_id)
            .ok_or_else(|| misaligned(0, "message has no ground truth".into()))?;
        for (ordinal, text) in msg.clause_texts.iter().enumerate() {
            let rec = clauses
                .get(&ordinal)
                .ok_or_else(|| misaligned(ordinal, "clause has no ground truth record".into()))?;
            if let Some(gold) = &rec.clause_text {
                if normalize_ws(gold) != normalize_ws(text) {
                    return Err(misaligned(ordinal, format!("segmented as {text:?}, ground truth has {gold:?}")));
                }
            }
        }
        if let Some((&ordinal, _)) = clauses.range(msg.clause_texts.len()..).next() {
            return Err(misaligned(ordinal, "ground truth clause beyond segmentation".into()));
        }
    }
    Ok(())
}

fn clause_units<'a>(
    system: &'a [SystemMessage],
    gt: &'a GroundTruth,
) -> impl Iterator<Item = (&'a [SystemLabel], &'a GroundTruthRecord)> + 'a {
    system.iter().flat_map(move |m| {
        let clauses = gt.clauses(&m.message_id);
        m.labels
            .iter()
            .enumerate()
            .filter_map(move |(ord, labels)| clauses.and_then(|c| c.get(&ord)).map(|r| (labels.as_slice(), r)))
    })
}

fn kind_keys<'a>(
    labels: &'a [SystemLabel],
    rec: &'a GroundTruthRecord,
    kind: Kind,
    mode: MatchMode,
) -> (Vec<(Category, &'a str)>, Vec<(Category, &'a str)>) {
    let sys = labels
        .iter()
        .filter(|l| l.kind == kind)
        .map(|l| key(mode, l.category, &l.trigger))
        .collect();
    let gold = rec
        .labels
        .iter()
        .filter(|l| l.kind == kind)
        .map(|l| key(mode, l.category, &l.trigger))
        .collect();
    (sys, gold)
}

fn top_ask_outcome(m: &SystemMessage, gt: &GroundTruth, mode: MatchMode) -> ConfusionCounts {
    let gold = gt.top_ask(&m.message_id);
    let sys = m.top_ask.as_ref();
    let mut c = ConfusionCounts::default();
    match (sys, gold) {
        (None, None) => c.tn = 1,
        (Some(_), None) => c.fp = 1,
        (None, Some(_)) => c.fn_ = 1,
        (Some((so, sl)), Some((go, gl))) => {
            if so == &go && key(mode, sl.category, &sl.trigger) == key(mode, gl.category, &gl.trigger) {
                c.tp = 1;
            } else {
                c.fp = 1;
                c.fn_ = 1;
            }
        }
    }
    c
}

pub fn score_condition(
    system: &[SystemMessage],
    gt: &GroundTruth,
    output: OutputType,
    mode: MatchMode,
) -> Result<ConfusionCounts, EvalError> {
    check_alignment(system, gt)?;
    let mut total = ConfusionCounts::default();
    match output {
        OutputType::Ask | OutputType::Framing => {
            let kind = if output == OutputType::Ask { Kind::Ask } else { Kind::Framing };
            for (labels, rec) in clause_units(system, gt) {
                let (sys, gold) = kind_keys(labels, rec, kind, mode);
                if sys.is_empty() && gold.is_empty() {
                    total.tn += 1;
                    continue;
                }
                let (tp, fp, fn_) = match_keys(sys, gold);
                total += ConfusionCounts { tp, fp, fn_, tn: 0 };
            }
        }
        OutputType::TopAsk => {
            for m in system {
                total += top_ask_outcome(m, gt, mode);
            }
        }
    }
    Ok(total)
}

/// Per-decision correctness: one entry per clause (per message for TopAsk).
pub fn decision_vector(
    system: &[SystemMessage],
    gt: &GroundTruth,
    output: OutputType,
    mode: MatchMode,
) -> Result<Vec<bool>, EvalError> {
    check_alignment(system, gt)?;
    Ok(match output {
        OutputType::Ask | OutputType::Framing => {
            let kind = if output == OutputType::Ask { Kind::Ask } else { Kind::Framing };
            clause_units(system, gt)
                .map(|(labels, rec)| {
                    let (mut sys, mut gold) = kind_keys(labels, rec, kind, mode);
                    sys.sort();
                    gold.sort();
                    sys == gold
                })
                .collect()
        }
        OutputType::TopAsk => system
            .iter()
            .map(|m| {
                let c = top_ask_outcome(m, gt, mode);
                c.tp + c.tn == 1
            })
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub output: OutputType,
    pub counts: ConfusionCounts,
    pub prf: Prf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub lexicon: String,
    pub message_count: usize,
    pub clause_count: usize,
    pub conditions: Vec<ConditionReport>,
}

impl EvalReport {
    pub fn condition(&self, output: OutputType) -> &ConditionReport {
        self.conditions
            .iter()
            .find(|c| c.output == output)
            .expect("every report holds all output types")
    }
}

pub fn evaluate(
    lexicon_name: &str,
    system: &[SystemMessage],
    gt: &GroundTruth,
    mode: MatchMode,
) -> Result<EvalReport, EvalError> {
    let conditions = OutputType::ALL
        .iter()
        .map(|&output| {
            let counts = score_condition(system, gt, output, mode)?;
            Ok(ConditionReport {
                output,
                counts,
                prf: prf(counts),
            })
        })
        .collect::<Result<_, EvalError>>()?;
    Ok(EvalReport {
        lexicon: lexicon_name.to_string(),
        message_count: system.len(),
        clause_count: system.iter().map(|m| m.clause_texts.len()).sum(),
        conditions,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    pub match_mode: MatchMode,
    pub alpha: f64,
    #[serde(skip)]
    pub detect: DetectConfig,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            match_mode: MatchMode::Category,
            alpha: DEFAULT_ALPHA,
            detect: DetectConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseTest {
    pub a: String,
    pub b: String,
    pub output: OutputType,
    pub result: McNemarResult,
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub alpha: f64,
    pub match_mode: MatchMode,
    pub reports: Vec<EvalReport>,
    pub pairwise: Vec<PairwiseTest>,
}

struct LexiconRun {
    report: EvalReport,
    decisions: Vec<Vec<bool>>,
}

fn run_lexicon(
    corpus: &[CorpusRecord],
    gt: &GroundTruth,
    lexicon: &Lexicon,
    variants: &VariantTable,
    options: &EvalOptions,
) -> Result<LexiconRun, EvalError> {
    let results = Pipeline::new(lexicon, variants).with_config(options.detect).run_corpus(corpus);
    let system: Vec<SystemMessage> = results.iter().map(SystemMessage::from).collect();
    let report = evaluate(lexicon.name(), &system, gt, options.match_mode)?;
    let decisions = OutputType::ALL
        .iter()
        .map(|&o| decision_vector(&system, gt, o, options.match_mode))
        .collect::<Result<_, _>>()?;
    Ok(LexiconRun { report, decisions })
}

/// Full pipeline per lexicon over the same corpus, then McNemar for every pair and output type.
pub fn compare_lexica(
    corpus: &[CorpusRecord],
    gt: &GroundTruth,
    lexica: &[Lexicon],
    variants: &VariantTable,
    options: &EvalOptions,
) -> Result<ComparisonReport, EvalError> {
    if lexica.len() < 2 {
        return Err(EvalError::TooFewLexica(lexica.len()));
    }
    #[cfg(feature = "parallel")]
    let runs: Vec<LexiconRun> = lexica
        .par_iter()
        .map(|l| run_lexicon(corpus, gt, l, variants, options))
        .collect::<Result<_, _>>()?;
    #[cfg(not(feature = "parallel"))]
    let runs: Vec<LexiconRun> = lexica
        .iter()
        .map(|l| run_lexicon(corpus, gt, l, variants, options))
        .collect::<Result<_, _>>()?;

    let mut pairwise = Vec::new();
    for i in 0..runs.len() {
        for j in i + 1..runs.len() {
            for (k, &output) in OutputType::ALL.iter().enumerate() {
                let result = mcnemar(&runs[i].decisions[k], &runs[j].decisions[k])?;
                pairwise.push(PairwiseTest {
                    a: runs[i].report.lexicon.clone(),
                    b: runs[j].report.lexicon.clone(),
                    output,
                    significant: result.p_value < options.alpha,
                    result,
                });
            }
        }
    }
    Ok(ComparisonReport {
        alpha: options.alpha,
        match_mode: options.match_mode,
        reports: runs.into_iter().map(|r| r.report).collect(),
        pairwise,
    })
}

impl ComparisonReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Aligned plain-text tables: P/R/F per lexicon and condition, then the pairwise tests.
    pub fn render_table(&self) -> String {
        let width = self
            .reports
            .iter()
            .map(|r| r.lexicon.len())
            .chain(self.pairwise.iter().map(|p| p.a.len().max(p.b.len())))
            .max()
            .unwrap_or(0)
            .max(7);
        let mut out = String::new();
        let _ = write!(out, "{:width$}", "");
        for o in OutputType::ALL {
            let _ = write!(out, " | {:^20}", o.as_str());
        }
        out.push('\n');
        let _ = write!(out, "{:width$}", "Lexicon");
        for _ in OutputType::ALL {
            let _ = write!(out, " | {:>6} {:>6} {:>6}", "P", "R", "F");
        }
        out.push('\n');
        let mut degenerate = false;
        for r in &self.reports {
            let _ = write!(out, "{:width$}", r.lexicon);
            for c in &r.conditions {
                let mark = |undefined: bool| if undefined { "*" } else { " " };
                degenerate |= c.prf.is_degenerate();
                let _ = write!(
                    out,
                    " | {:>5.3}{}{:>5.3}{}{:>6.3}",
                    c.prf.precision,
                    mark(c.prf.precision_undefined),
                    c.prf.recall,
                    mark(c.prf.recall_undefined),
                    c.prf.f1
                );
            }
            out.push('\n');
        }
        if degenerate {
            out.push_str("* zero denominator, reported as 0\n");
        }
        if let Some(r) = self.reports.first() {
            let _ = writeln!(out, "{} messages, {} clauses", r.message_count, r.clause_count);
        }
        out.push('\n');
        let _ = writeln!(
            out,
            "{:width$}  {:width$}  {:8} {:>4} {:>4} {:>9} {:>10}  {:14} {}",
            "A",
            "B",
            "output",
            "b",
            "c",
            "statistic",
            "p",
            "method",
            format_args!("p<{}", self.alpha)
        );
        for p in &self.pairwise {
            let method = match p.result.method {
                McNemarMethod::ChiSquareCc => "chi_square_cc",
                McNemarMethod::ExactBinomial => "exact_binomial",
            };
            let _ = writeln!(
                out,
                "{:width$}  {:width$}  {:8} {:>4} {:>4} {:>9.3} {:>10.3e}  {:14} {}",
                p.a,
                p.b,
                p.output.as_str(),
                p.result.b,
                p.result.c,
                p.result.statistic,
                p.result.p_value,
                method,
                if p.significant { "yes" } else { "no" }
            );
        }
        out
    }
}
