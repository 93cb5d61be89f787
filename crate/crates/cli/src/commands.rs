use std::fs::{self, File};
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};

use askframe::bundled;
use askframe::evalkit::{compare_lexica, evaluate, load_ground_truth, ComparisonReport, EvalOptions, MatchMode, SystemMessage};
use askframe::lexicon::{apply_ledger, diff_lexica, load_ledger, load_lexicon_named, Lexicon, LexiconFormat};
use askframe::morphvar::{load_variants, VariantTable};
use askframe::pipeline::{
    detection_records, load_corpus_dir, load_corpus_jsonl, selections_from_records, CorpusLoad, DetectionRecord,
    Pipeline,
};
use askframe::respond::{generate_response, load_templates, TemplateSet};

use crate::config::RunConfig;
use crate::{Cli, CliError, Outcome};

/// Config file values with command-line flags applied on top.
pub struct Settings {
    pub config: RunConfig,
    pub lexicons: Vec<PathBuf>,
    pub format: Option<LexiconFormat>,
    pub out: Option<PathBuf>,
    pub alpha: f64,
    pub match_mode: MatchMode,
}

impl Settings {
    pub fn resolve(cli: &Cli) -> Result<Self, CliError> {
        let config = match &cli.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let format = cli
            .format
            .as_deref()
            .or(config.lexicon_format.as_deref())
            .map(|f| f.parse::<LexiconFormat>().map_err(|_| CliError::Config(format!("unknown lexicon format {f:?}"))))
            .transpose()?;
        let alpha = cli.alpha.unwrap_or(config.alpha);
        if !(0.0..=1.0).contains(&alpha) {
            return Err(CliError::Config(format!("alpha {alpha} outside [0, 1]")));
        }
        Ok(Settings {
            lexicons: if cli.lexicons.is_empty() { config.lexicons.clone() } else { cli.lexicons.clone() },
            format,
            out: cli.out.clone().or_else(|| config.out.clone()),
            alpha,
            match_mode: if cli.strict_trigger_match { MatchMode::CategoryAndTrigger } else { config.match_mode },
            config,
        })
    }

    fn lexicon_format(&self, path: &Path) -> LexiconFormat {
        self.format.unwrap_or_else(|| match path.extension().and_then(|e| e.to_str()) {
            Some("txt" | "flat") => LexiconFormat::FlatList,
            _ => LexiconFormat::Normalized,
        })
    }

    fn load_lexicon(&self, path: &Path) -> Result<Lexicon, CliError> {
        let file = File::open(path).map_err(|e| CliError::io(path, e))?;
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "lexicon".into());
        load_lexicon_named(BufReader::new(file), self.lexicon_format(path), &name).map_err(|e| CliError::format(path, e))
    }

    fn variants(&self) -> Result<VariantTable, CliError> {
        match &self.config.variants {
            Some(p) => {
                let file = File::open(p).map_err(|e| CliError::io(p, e))?;
                load_variants(BufReader::new(file)).map_err(|e| CliError::format(p, e))
            }
            None => Ok(bundled::variants().clone()),
        }
    }

    fn templates(&self) -> Result<TemplateSet, CliError> {
        let set = match &self.config.templates {
            Some(p) => {
                let file = File::open(p).map_err(|e| CliError::io(p, e))?;
                load_templates(BufReader::new(file)).map_err(|e| CliError::format(p, e))?
            }
            None => bundled::templates().clone(),
        };
        Ok(set.with_bands(self.config.bands))
    }

    fn emit(&self, content: &str) -> Result<(), CliError> {
        match &self.out {
            Some(p) => fs::write(p, content).map_err(|e| CliError::io(p, e)),
            None => io::stdout()
                .lock()
                .write_all(content.as_bytes())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e)),
        }
    }
}

fn load_corpus(path: &Path) -> Result<CorpusLoad, CliError> {
    let load = if path.is_dir() {
        load_corpus_dir(path).map_err(|e| CliError::format(path, e))?
    } else {
        let file = File::open(path).map_err(|e| CliError::io(path, e))?;
        load_corpus_jsonl(BufReader::new(file)).map_err(|e| CliError::io(path, e))?
    };
    for err in &load.skipped {
        eprintln!("{}: {err}; record skipped", path.display());
    }
    Ok(load)
}

fn jsonl<T: serde::Serialize>(rows: impl IntoIterator<Item = T>) -> String {
    rows.into_iter()
        .map(|r| serde_json::to_string(&r).expect("row serializes") + "\n")
        .collect()
}

pub fn detect(s: &Settings, corpus: &Path) -> Result<Outcome, CliError> {
    let lexicon = match s.lexicons.as_slice() {
        [] => bundled::lcs_plus().clone(),
        [one] => s.load_lexicon(one)?,
        _ => return Err(CliError::Config("detect takes a single --lexicon".into())),
    };
    let variants = s.variants()?;
    let load = load_corpus(corpus)?;
    let pipeline = Pipeline::new(&lexicon, &variants).with_config(s.config.detect_config());
    let results = pipeline.run_corpus(&load.records);
    s.emit(&jsonl(results.iter().flat_map(detection_records)))?;
    Ok(Outcome {
        skipped: load.skipped.len(),
    })
}

pub fn respond(s: &Settings, detections: &Path) -> Result<Outcome, CliError> {
    let templates = s.templates()?;
    let text = fs::read_to_string(detections).map_err(|e| CliError::io(detections, e))?;
    let mut rows = Vec::new();
    let mut skipped = 0;
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<DetectionRecord>(line) {
            Ok(r) => rows.push(r),
            Err(e) => {
                eprintln!("{}: line {}: {e}; record skipped", detections.display(), idx + 1);
                skipped += 1;
            }
        }
    }
    let plans = selections_from_records(&rows)
        .iter()
        .map(|sel| generate_response(sel, &templates))
        .collect::<Vec<_>>();
    s.emit(&jsonl(plans))?;
    Ok(Outcome { skipped })
}

pub fn eval(s: &Settings, corpus: &Path, gt_path: &Path) -> Result<Outcome, CliError> {
    let gt_file = File::open(gt_path).map_err(|e| CliError::io(gt_path, e))?;
    let gt = load_ground_truth(BufReader::new(gt_file)).map_err(|e| CliError::format(gt_path, e))?;
    let lexica = if s.lexicons.is_empty() {
        bundled::lexica()
    } else {
        s.lexicons.iter().map(|p| s.load_lexicon(p)).collect::<Result<_, _>>()?
    };
    let variants = s.variants()?;
    let load = load_corpus(corpus)?;
    let options = EvalOptions {
        match_mode: s.match_mode,
        alpha: s.alpha,
        detect: s.config.detect_config(),
    };
    let report = if lexica.len() == 1 {
        let results = Pipeline::new(&lexica[0], &variants).with_config(options.detect).run_corpus(&load.records);
        let system: Vec<SystemMessage> = results.iter().map(SystemMessage::from).collect();
        ComparisonReport {
            alpha: options.alpha,
            match_mode: options.match_mode,
            reports: vec![evaluate(lexica[0].name(), &system, &gt, options.match_mode).map_err(|e| CliError::format(gt_path, e))?],
            pairwise: Vec::new(),
        }
    } else {
        compare_lexica(&load.records, &gt, &lexica, &variants, &options).map_err(|e| CliError::format(gt_path, e))?
    };
    let table = report.render_table();
    match &s.out {
        Some(p) => {
            fs::write(p, report.to_json() + "\n").map_err(|e| CliError::io(p, e))?;
            let txt = p.with_extension("txt");
            fs::write(&txt, &table).map_err(|e| CliError::io(&txt, e))?;
            print!("{table}");
        }
        None => print!("{table}"),
    }
    Ok(Outcome {
        skipped: load.skipped.len(),
    })
}

pub fn lexicon_diff(s: &Settings, a: &Path, b: &Path) -> Result<Outcome, CliError> {
    let diff = diff_lexica(&s.load_lexicon(a)?, &s.load_lexicon(b)?);
    s.emit(&diff.render())?;
    Ok(Outcome { skipped: 0 })
}

pub fn lexicon_apply(s: &Settings, base: &Path, ledger_path: &Path) -> Result<Outcome, CliError> {
    let base_lex = s.load_lexicon(base)?;
    let file = File::open(ledger_path).map_err(|e| CliError::io(ledger_path, e))?;
    let ledger = load_ledger(BufReader::new(file)).map_err(|e| CliError::format(ledger_path, e))?;
    let adapted = apply_ledger(&base_lex, &ledger).map_err(|e| CliError::format(ledger_path, e))?;
    s.emit(&adapted.serialize())?;
    Ok(Outcome { skipped: 0 })
}

pub fn lexicon_validate(s: &Settings, file: &Path) -> Result<Outcome, CliError> {
    let lex = s.load_lexicon(file)?;
    s.emit(&format!(
        "{}: ok, {} entries in {} classes\n",
        lex.name(),
        lex.len(),
        lex.classes().count()
    ))?;
    Ok(Outcome { skipped: 0 })
}
