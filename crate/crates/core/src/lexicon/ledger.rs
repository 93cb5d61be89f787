use std::collections::BTreeMap;
use std::io::BufRead;

use serde::Serialize;

use super::{normalize_lemma, Category, CategorySet, ClassId, Lexicon, LexiconError, SemanticClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EditAction {
    Add,
    Delete,
}

impl EditAction {
    fn token(self) -> &'static str {
        match self {
            EditAction::Add => "add",
            EditAction::Delete => "del",
        }
    }

    fn flipped(self) -> Self {
        match self {
            EditAction::Add => EditAction::Delete,
            EditAction::Delete => EditAction::Add,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Edit {
    pub action: EditAction,
    pub lemma: String,
    pub class_id: ClassId,
    pub categories: CategorySet,
}

impl Edit {
    pub fn new(action: EditAction, lemma: &str, class_id: impl Into<ClassId>, categories: CategorySet) -> Self {
        Edit {
            action,
            lemma: normalize_lemma(lemma),
            class_id: class_id.into(),
            categories,
        }
    }
}

/// Ordered add/delete edits turning a named base lexicon into a derived one.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AdaptationLedger {
    pub base_lexicon_name: String,
    /// Name of the resulting lexicon; the base name is kept when absent.
    pub target_name: Option<String>,
    /// Classes introduced by this ledger, with their display names.
    pub declared_classes: BTreeMap<ClassId, String>,
    pub edits: Vec<Edit>,
}

impl AdaptationLedger {
    pub fn new(base_lexicon_name: impl Into<String>) -> Self {
        AdaptationLedger {
            base_lexicon_name: base_lexicon_name.into(),
            ..Default::default()
        }
    }

    /// Edits reversed with add and delete swapped.
    pub fn inverse(&self) -> Self {
        let (base, target) = match &self.target_name {
            Some(t) => (t.clone(), Some(self.base_lexicon_name.clone())),
            None => (self.base_lexicon_name.clone(), None),
        };
        AdaptationLedger {
            base_lexicon_name: base,
            target_name: target,
            declared_classes: self.declared_classes.clone(),
            edits: self
                .edits
                .iter()
                .rev()
                .map(|e| Edit {
                    action: e.action.flipped(),
                    ..e.clone()
                })
                .collect(),
        }
    }

    pub fn serialize(&self) -> String {
        let mut out = format!("# base: {}\n", self.base_lexicon_name);
        if let Some(t) = &self.target_name {
            out.push_str(&format!("# target: {t}\n"));
        }
        for (id, name) in &self.declared_classes {
            out.push_str(&format!("class\t{id}\t{name}\n"));
        }
        for e in &self.edits {
            for c in e.categories.iter() {
                out.push_str(&format!("{}\t{c}\t{}\t{}\n", e.action.token(), e.class_id, e.lemma));
            }
        }
        out
    }
}

pub fn load_ledger<R: BufRead>(src: R) -> Result<AdaptationLedger, LexiconError> {
    let mut ledger = AdaptationLedger::default();
    let mut base = None;
    for (idx, line) in src.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| LexiconError::Malformed {
            line: line_no,
            reason: format!("unreadable line ({e})"),
            content: String::new(),
        })?;
        let line = line.trim_end_matches('\r');
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(name) = comment.strip_prefix("base:") {
                base.get_or_insert_with(|| name.trim().to_string());
            } else if let Some(name) = comment.strip_prefix("target:") {
                ledger.target_name.get_or_insert_with(|| name.trim().to_string());
            }
            continue;
        }
        let malformed = |reason: &str| LexiconError::Malformed {
            line: line_no,
            reason: reason.to_string(),
            content: line.to_string(),
        };
        let fields: Vec<&str> = line.split('\t').collect();
        if fields[0] == "class" {
            let [_, id, name] = fields.as_slice() else {
                return Err(malformed("class directive needs id and name"));
            };
            ledger.declared_classes.insert(ClassId::new(*id), name.trim().to_string());
            continue;
        }
        let [action, cat, class_id, lemma] = fields.as_slice() else {
            return Err(malformed("expected action, category, class id and lemma"));
        };
        let action = match action.trim() {
            "add" => EditAction::Add,
            "del" | "delete" => EditAction::Delete,
            _ => return Err(malformed("action must be add or del")),
        };
        let category: Category = cat.parse().map_err(|_| LexiconError::UnknownCategory {
            line: line_no,
            token: cat.trim().to_string(),
        })?;
        let lemma = normalize_lemma(lemma);
        let class_id = ClassId::new(*class_id);
        if lemma.is_empty() || class_id.as_str().is_empty() {
            return Err(malformed("empty lemma or class id"));
        }
        match ledger.edits.last_mut() {
            Some(prev)
                if prev.action == action
                    && prev.lemma == lemma
                    && prev.class_id == class_id
                    && !prev.categories.contains(category) =>
            {
                prev.categories.insert(category);
            }
            _ => ledger.edits.push(Edit {
                action,
                lemma,
                class_id,
                categories: CategorySet::single(category),
            }),
        }
    }
    ledger.base_lexicon_name = base.ok_or(LexiconError::Malformed {
        line: 0,
        reason: "missing \"# base: <name>\" header".into(),
        content: String::new(),
    })?;
    Ok(ledger)
}

/// Apply `ledger` to `base`, returning a new lexicon; `base` is untouched.
pub fn apply_ledger(base: &Lexicon, ledger: &AdaptationLedger) -> Result<Lexicon, LexiconError> {
    if ledger.base_lexicon_name != base.name() {
        return Err(LexiconError::BaseMismatch {
            expected: ledger.base_lexicon_name.clone(),
            found: base.name().to_string(),
        });
    }
    let (classes, entries) = base.parts();
    let mut classes = classes.clone();
    let mut entries = entries.clone();

    for (i, edit) in ledger.edits.iter().enumerate() {
        let index = i + 1;
        let key = (edit.lemma.clone(), edit.class_id.clone());
        match edit.action {
            EditAction::Delete => {
                let cats = entries.get(&key).copied().unwrap_or_default();
                for c in edit.categories.iter() {
                    if !cats.contains(c) {
                        return Err(LexiconError::DeleteAbsent {
                            index,
                            lemma: edit.lemma.clone(),
                            class_id: edit.class_id.to_string(),
                            category: c,
                        });
                    }
                }
                let remaining = cats.difference(edit.categories);
                if remaining.is_empty() {
                    entries.remove(&key);
                } else {
                    entries.insert(key, remaining);
                }
            }
            EditAction::Add => {
                if !classes.contains_key(&edit.class_id) {
                    let Some(name) = ledger.declared_classes.get(&edit.class_id) else {
                        return Err(LexiconError::UnknownClass {
                            index,
                            class_id: edit.class_id.to_string(),
                        });
                    };
                    classes.insert(
                        edit.class_id.clone(),
                        SemanticClass {
                            id: edit.class_id.clone(),
                            name: name.clone(),
                            categories: edit.categories,
                        },
                    );
                }
                let cats = entries.entry(key).or_default();
                for c in edit.categories.iter() {
                    if !cats.insert(c) {
                        return Err(LexiconError::AddDuplicate {
                            index,
                            lemma: edit.lemma.clone(),
                            class_id: edit.class_id.to_string(),
                            category: c,
                        });
                    }
                }
            }
        }
    }
    let name = ledger.target_name.clone().unwrap_or_else(|| base.name().to_string());
    Ok(Lexicon::from_parts(name, classes, entries))
}
