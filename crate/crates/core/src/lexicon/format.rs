use std::collections::BTreeMap;
use std::io::BufRead;
use std::str::FromStr;

use super::{normalize_lemma, Category, CategorySet, ClassId, Lexicon, LexiconError, SemanticClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LexiconFormat {
    /// `CATEGORY<TAB>class_id<TAB>class_name<TAB>lemma`
    Normalized,
    /// `[CATEGORY]` or `[CATEGORY class_id class name]` headers, one lemma per line.
    FlatList,
}

impl FromStr for LexiconFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "normalized" | "lex" => Ok(LexiconFormat::Normalized),
            "flatlist" | "flat" => Ok(LexiconFormat::FlatList),
            other => Err(format!("unknown lexicon format {other:?}")),
        }
    }
}

/// Load a lexicon, naming it from a `# lexicon: <name>` header or "lexicon".
pub fn load_lexicon<R: BufRead>(src: R, format: LexiconFormat) -> Result<Lexicon, LexiconError> {
    load_lexicon_named(src, format, "lexicon")
}

/// Like [`load_lexicon`] with an explicit name used when the header is absent.
pub fn load_lexicon_named<R: BufRead>(
    src: R,
    format: LexiconFormat,
    fallback_name: &str,
) -> Result<Lexicon, LexiconError> {
    let mut builder = Builder::default();
    let mut section: Option<(Category, ClassId, String)> = None;

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
            if let Some(name) = comment.trim().strip_prefix("lexicon:") {
                builder.name.get_or_insert_with(|| name.trim().to_string());
            }
            continue;
        }
        match format {
            LexiconFormat::Normalized => {
                let fields: Vec<&str> = line.split('\t').collect();
                let (cat, class_id, class_name, lemma) = match fields.as_slice() {
                    [c, id, name, lemma] => (*c, *id, *name, *lemma),
                    [c, id, lemma] => (*c, *id, "", *lemma),
                    _ => {
                        return Err(malformed(line_no, "expected 4 tab-separated fields", line));
                    }
                };
                let category = parse_category(line_no, cat)?;
                builder.add(line_no, line, category, class_id, class_name, lemma)?;
            }
            LexiconFormat::FlatList => {
                if let Some(header) = trimmed.strip_prefix('[') {
                    let header = header
                        .strip_suffix(']')
                        .ok_or_else(|| malformed(line_no, "unterminated section header", line))?;
                    let mut parts = header.split_whitespace();
                    let cat = parts
                        .next()
                        .ok_or_else(|| malformed(line_no, "empty section header", line))?;
                    let category = parse_category(line_no, cat)?;
                    let section_info = match parts.next() {
                        Some(id) => (category, ClassId::new(id), parts.collect::<Vec<_>>().join(" ")),
                        None => (
                            category,
                            ClassId::flat(category),
                            format!("{} list", category.as_str()),
                        ),
                    };
                    section = Some(section_info);
                    continue;
                }
                let Some((category, class_id, class_name)) = &section else {
                    return Err(malformed(line_no, "lemma before any [CATEGORY] header", line));
                };
                builder.add(line_no, line, *category, class_id.as_str(), class_name, trimmed)?;
            }
        }
    }
    builder.finish(fallback_name)
}

fn malformed(line: usize, reason: &str, content: &str) -> LexiconError {
    LexiconError::Malformed {
        line,
        reason: reason.to_string(),
        content: content.to_string(),
    }
}

fn parse_category(line: usize, token: &str) -> Result<Category, LexiconError> {
    token.parse().map_err(|_| LexiconError::UnknownCategory {
        line,
        token: token.trim().to_string(),
    })
}

#[derive(Default)]
struct Builder {
    name: Option<String>,
    classes: BTreeMap<ClassId, SemanticClass>,
    entries: BTreeMap<(String, ClassId), CategorySet>,
}

impl Builder {
    fn add(
        &mut self,
        line_no: usize,
        line: &str,
        category: Category,
        class_id: &str,
        class_name: &str,
        lemma: &str,
    ) -> Result<(), LexiconError> {
        let class_id = ClassId::new(class_id);
        if class_id.as_str().is_empty() {
            return Err(malformed(line_no, "empty class id", line));
        }
        let lemma = normalize_lemma(lemma);
        if lemma.is_empty() {
            return Err(malformed(line_no, "empty lemma", line));
        }
        let class_name = class_name.trim();
        let class = self
            .classes
            .entry(class_id.clone())
            .or_insert_with(|| SemanticClass {
                id: class_id.clone(),
                name: class_name.to_string(),
                categories: CategorySet::empty(),
            });
        if class.name.is_empty() {
            class.name = class_name.to_string();
        } else if !class_name.is_empty() && class.name != class_name {
            return Err(LexiconError::ClassNameConflict {
                line: line_no,
                class_id: class_id.to_string(),
                first: class.name.clone(),
                second: class_name.to_string(),
            });
        }
        let cats = self.entries.entry((lemma.clone(), class_id.clone())).or_default();
        if !cats.insert(category) {
            return Err(LexiconError::Duplicate {
                line: line_no,
                lemma,
                class_id: class_id.to_string(),
                category,
            });
        }
        Ok(())
    }

    fn finish(self, fallback_name: &str) -> Result<Lexicon, LexiconError> {
        if self.entries.is_empty() {
            return Err(LexiconError::Empty);
        }
        let name = self.name.unwrap_or_else(|| fallback_name.to_string());
        Ok(Lexicon::from_parts(name, self.classes, self.entries))
    }
}
