use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use super::{Category, ClassId, Lexicon};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ClassDiff {
    pub name: String,
    pub added: BTreeSet<String>,
    pub deleted: BTreeSet<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CategoryDiff {
    pub added: usize,
    pub deleted: usize,
    pub classes: BTreeMap<ClassId, ClassDiff>,
}

impl CategoryDiff {
    pub fn is_unchanged(&self) -> bool {
        self.added == 0 && self.deleted == 0
    }
}

/// Per-category, per-class added/deleted lemma sets between two lexica.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LexiconDiff {
    pub from: String,
    pub to: String,
    pub categories: BTreeMap<Category, CategoryDiff>,
}

impl LexiconDiff {
    pub fn category(&self, c: Category) -> &CategoryDiff {
        &self.categories[&c]
    }

    pub fn total_changes(&self) -> usize {
        self.categories.values().map(|d| d.added + d.deleted).sum()
    }

    /// Aligned plain-text report.
    pub fn render(&self) -> String {
        let mut out = format!("diff {} -> {}\n", self.from, self.to);
        for (cat, d) in &self.categories {
            if d.is_unchanged() {
                let _ = writeln!(out, "{cat}: unchanged");
                continue;
            }
            let _ = writeln!(out, "{cat}: {} deleted, {} added", d.deleted, d.added);
            for (id, cd) in &d.classes {
                let mut parts = Vec::new();
                if !cd.deleted.is_empty() {
                    parts.push(format!("{} deleted ({})", cd.deleted.len(), preview(&cd.deleted)));
                }
                if !cd.added.is_empty() {
                    parts.push(format!("{} added ({})", cd.added.len(), preview(&cd.added)));
                }
                let _ = writeln!(out, "  {id:<8} {:<28} {}", cd.name, parts.join(", "));
            }
        }
        out
    }
}

fn preview(set: &BTreeSet<String>) -> String {
    const SHOWN: usize = 4;
    let mut items: Vec<&str> = set.iter().take(SHOWN).map(String::as_str).collect();
    if set.len() > SHOWN {
        items.push("...");
    }
    items.join(", ")
}

/// Compare two lexica over (lemma, class, category) triples.
pub fn diff_lexica(a: &Lexicon, b: &Lexicon) -> LexiconDiff {
    let ta: BTreeSet<_> = a.triples().into_iter().collect();
    let tb: BTreeSet<_> = b.triples().into_iter().collect();
    let mut categories: BTreeMap<Category, CategoryDiff> =
        Category::ALL.iter().map(|c| (*c, CategoryDiff::default())).collect();

    let class_name = |id: &ClassId| {
        b.class(id)
            .or_else(|| a.class(id))
            .map(|c| c.name.clone())
            .unwrap_or_default()
    };
    for (cat, class_id, lemma) in tb.difference(&ta) {
        let d = categories.get_mut(cat).expect("all categories present");
        d.added += 1;
        d.classes
            .entry(class_id.clone())
            .or_insert_with(|| ClassDiff {
                name: class_name(class_id),
                ..Default::default()
            })
            .added
            .insert(lemma.clone());
    }
    for (cat, class_id, lemma) in ta.difference(&tb) {
        let d = categories.get_mut(cat).expect("all categories present");
        d.deleted += 1;
        d.classes
            .entry(class_id.clone())
            .or_insert_with(|| ClassDiff {
                name: class_name(class_id),
                ..Default::default()
            })
            .deleted
            .insert(lemma.clone());
    }
    LexiconDiff {
        from: a.name().to_string(),
        to: b.name().to_string(),
        categories,
    }
}
