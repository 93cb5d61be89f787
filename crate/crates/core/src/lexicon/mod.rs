//! Class-organized verb lexica aligned to the four ask/framing categories.

mod diff;
mod format;
mod ledger;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use diff::{diff_lexica, CategoryDiff, ClassDiff, LexiconDiff};
pub use format::{load_lexicon, load_lexicon_named, LexiconFormat};
pub use ledger::{apply_ledger, load_ledger, AdaptationLedger, Edit, EditAction};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum LexiconError {
    #[error("line {line}: {reason}: {content:?}")]
    Malformed {
        line: usize,
        reason: String,
        content: String,
    },
    #[error("line {line}: duplicate entry ({lemma}, {class_id}) for {category}")]
    Duplicate {
        line: usize,
        lemma: String,
        class_id: String,
        category: Category,
    },
    #[error("line {line}: unknown category {token:?}")]
    UnknownCategory { line: usize, token: String },
    #[error("line {line}: class {class_id} named both {first:?} and {second:?}")]
    ClassNameConflict {
        line: usize,
        class_id: String,
        first: String,
        second: String,
    },
    #[error("empty lexicon")]
    Empty,
    #[error("ledger targets lexicon {expected:?} but base is {found:?}")]
    BaseMismatch { expected: String, found: String },
    #[error("edit {index}: cannot delete absent ({lemma}, {class_id}) {category}")]
    DeleteAbsent {
        index: usize,
        lemma: String,
        class_id: String,
        category: Category,
    },
    #[error("edit {index}: ({lemma}, {class_id}) already has {category}")]
    AddDuplicate {
        index: usize,
        lemma: String,
        class_id: String,
        category: Category,
    },
    #[error("edit {index}: class {class_id} is neither in the base nor declared")]
    UnknownClass { index: usize, class_id: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Category {
    Perform,
    Give,
    Lose,
    Gain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Ask,
    Framing,
}

impl Category {
    pub const ALL: [Category; 4] = [
        Category::Perform,
        Category::Give,
        Category::Lose,
        Category::Gain,
    ];

    pub fn kind(self) -> Kind {
        match self {
            Category::Perform | Category::Give => Kind::Ask,
            Category::Lose | Category::Gain => Kind::Framing,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Perform => "PERFORM",
            Category::Give => "GIVE",
            Category::Lose => "LOSE",
            Category::Gain => "GAIN",
        }
    }

    fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "PERFORM" => Ok(Category::Perform),
            "GIVE" => Ok(Category::Give),
            "LOSE" => Ok(Category::Lose),
            "GAIN" => Ok(Category::Gain),
            _ => Err(s.to_string()),
        }
    }
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Ask => "ask",
            Kind::Framing => "framing",
        }
    }

    pub fn categories(self) -> CategorySet {
        Category::ALL.into_iter().filter(|c| c.kind() == self).collect()
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Small bitset over [`Category`], iterated in canonical order.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CategorySet(u8);

impl CategorySet {
    pub const fn empty() -> Self {
        CategorySet(0)
    }

    pub fn single(c: Category) -> Self {
        CategorySet(c.bit())
    }

    pub fn insert(&mut self, c: Category) -> bool {
        let had = self.contains(c);
        self.0 |= c.bit();
        !had
    }

    pub fn remove(&mut self, c: Category) -> bool {
        let had = self.contains(c);
        self.0 &= !c.bit();
        had
    }

    pub fn contains(self, c: Category) -> bool {
        self.0 & c.bit() != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn union(self, other: Self) -> Self {
        CategorySet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        CategorySet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        CategorySet(self.0 & !other.0)
    }

    pub fn of_kind(self, kind: Kind) -> Self {
        self.intersection(kind.categories())
    }

    pub fn iter(self) -> impl Iterator<Item = Category> {
        Category::ALL.into_iter().filter(move |c| self.contains(*c))
    }

    pub fn first(self) -> Option<Category> {
        self.iter().next()
    }
}

impl FromIterator<Category> for CategorySet {
    fn from_iter<I: IntoIterator<Item = Category>>(iter: I) -> Self {
        let mut set = CategorySet::empty();
        for c in iter {
            set.insert(c);
        }
        set
    }
}

impl fmt::Debug for CategorySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for CategorySet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

/// Dotted class identifier ("10.2", "13.5.1"), ordered segment by segment.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClassId(String);

impl ClassId {
    pub fn new(id: impl Into<String>) -> Self {
        ClassId(id.into().trim().to_string())
    }

    pub fn flat(category: Category) -> Self {
        ClassId(format!("flat.{}", category.as_str()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl Ord for ClassId {
    fn cmp(&self, other: &Self) -> Ordering {
        // the empty id sorts first so it can serve as a range floor
        match (self.0.is_empty(), other.0.is_empty()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        let mut a = self.0.split('.');
        let mut b = other.0.split('.');
        loop {
            match (a.next(), b.next()) {
                (None, None) => return self.0.cmp(&other.0),
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some(x), Some(y)) => {
                    let ord = match (x.parse::<u64>(), y.parse::<u64>()) {
                        (Ok(p), Ok(q)) => p.cmp(&q),
                        (Ok(_), Err(_)) => Ordering::Less,
                        (Err(_), Ok(_)) => Ordering::Greater,
                        (Err(_), Err(_)) => x.cmp(y),
                    };
                    if ord != Ordering::Equal {
                        return ord;
                    }
                }
            }
        }
    }
}

impl PartialOrd for ClassId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ClassId {
    fn from(s: &str) -> Self {
        ClassId::new(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SemanticClass {
    pub id: ClassId,
    pub name: String,
    pub categories: CategorySet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerbEntry {
    pub lemma: String,
    pub class_id: ClassId,
    pub categories: CategorySet,
}

/// Lowercase, trim and collapse internal whitespace.
pub fn normalize_lemma(raw: &str) -> String {
    raw.split_whitespace()
        .map(|w| w.to_lowercase())
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug, Clone)]
pub struct Lexicon {
    name: String,
    classes: BTreeMap<ClassId, SemanticClass>,
    entries: BTreeMap<(String, ClassId), CategorySet>,
    category_index: [BTreeSet<String>; 4],
    multiword: BTreeMap<String, Vec<String>>,
}

impl PartialEq for Lexicon {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.entries == other.entries
            && self.populated_classes().eq(other.populated_classes())
    }
}

impl Eq for Lexicon {}

impl Lexicon {
    pub(crate) fn from_parts(
        name: String,
        classes: BTreeMap<ClassId, SemanticClass>,
        entries: BTreeMap<(String, ClassId), CategorySet>,
    ) -> Self {
        let mut lex = Lexicon {
            name,
            classes,
            entries,
            category_index: Default::default(),
            multiword: BTreeMap::new(),
        };
        lex.rebuild();
        lex
    }

    fn rebuild(&mut self) {
        let mut per_class: BTreeMap<&ClassId, CategorySet> = BTreeMap::new();
        let mut index: [BTreeSet<String>; 4] = Default::default();
        let mut multiword: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for ((lemma, class_id), cats) in &self.entries {
            let slot = per_class.entry(class_id).or_default();
            *slot = slot.union(*cats);
            for c in cats.iter() {
                index[c as usize].insert(lemma.clone());
            }
            if let Some((head, _)) = lemma.split_once(' ') {
                let list = multiword.entry(head.to_string()).or_default();
                if !list.contains(lemma) {
                    list.push(lemma.clone());
                }
            }
        }
        for (id, cats) in per_class {
            if let Some(class) = self.classes.get_mut(id) {
                class.categories = cats;
            }
        }
        for list in multiword.values_mut() {
            list.sort_by(|a, b| b.split(' ').count().cmp(&a.split(' ').count()).then(a.cmp(b)));
        }
        self.category_index = index;
        self.multiword = multiword;
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Number of (lemma, class) entries.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = VerbEntry> + '_ {
        self.entries.iter().map(|((lemma, class_id), cats)| VerbEntry {
            lemma: lemma.clone(),
            class_id: class_id.clone(),
            categories: *cats,
        })
    }

    /// Every (lemma, class, category) triple, sorted by category, class, lemma.
    pub fn triples(&self) -> Vec<(Category, ClassId, String)> {
        let mut out: Vec<_> = self
            .entries
            .iter()
            .flat_map(|((lemma, class_id), cats)| {
                cats.iter().map(move |c| (c, class_id.clone(), lemma.clone()))
            })
            .collect();
        out.sort();
        out
    }

    /// Classes that currently hold at least one entry.
    pub fn classes(&self) -> impl Iterator<Item = &SemanticClass> + '_ {
        self.populated_classes()
    }

    fn populated_classes(&self) -> impl Iterator<Item = &SemanticClass> + '_ {
        let used: BTreeSet<&ClassId> = self.entries.keys().map(|(_, c)| c).collect();
        self.classes.values().filter(move |c| used.contains(&c.id))
    }

    pub fn class(&self, id: &ClassId) -> Option<&SemanticClass> {
        self.classes.get(id)
    }

    pub fn members(&self, category: Category) -> &BTreeSet<String> {
        &self.category_index[category as usize]
    }

    pub fn contains(&self, lemma: &str) -> bool {
        self.category_index.iter().any(|s| s.contains(lemma))
    }

    pub fn entry_categories(&self, lemma: &str, class_id: &ClassId) -> CategorySet {
        self.entries
            .get(&(lemma.to_string(), class_id.clone()))
            .copied()
            .unwrap_or_default()
    }

    /// Every (class, category) pairing for `lemma`.
    pub fn lookup(&self, lemma: &str) -> BTreeSet<(ClassId, Category)> {
        let lemma = normalize_lemma(lemma);
        self.entries_for(&lemma)
            .flat_map(|(class_id, cats)| cats.iter().map(move |c| (class_id.clone(), c)))
            .collect()
    }

    /// Union of categories over all classes holding `lemma`.
    pub fn categories_of(&self, lemma: &str) -> CategorySet {
        self.entries_for(lemma).fold(CategorySet::empty(), |acc, (_, c)| acc.union(c))
    }

    /// First class (by class id order) in which `lemma` carries `category`.
    pub fn class_for(&self, lemma: &str, category: Category) -> Option<&ClassId> {
        self.entries_for(lemma)
            .find(|(_, cats)| cats.contains(category))
            .map(|(class_id, _)| class_id)
    }

    fn entries_for<'a>(&'a self, lemma: &str) -> impl Iterator<Item = (&'a ClassId, CategorySet)> + 'a {
        let key = lemma.to_string();
        self.entries
            .range((key.clone(), ClassId(String::new()))..)
            .take_while(move |((l, _), _)| *l == key)
            .map(|((_, class_id), cats)| (class_id, *cats))
    }

    /// Multiword lemmas whose first word is `head`, longest first.
    pub fn multiword_starting_with(&self, head: &str) -> &[String] {
        self.multiword.get(head).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Normalized text form; stable under load/serialize round trips.
    pub fn serialize(&self) -> String {
        let mut out = format!("# lexicon: {}\n", self.name);
        for (category, class_id, lemma) in self.triples() {
            let name = self.classes.get(&class_id).map(|c| c.name.as_str()).unwrap_or("");
            out.push_str(&format!("{category}\t{class_id}\t{name}\t{lemma}\n"));
        }
        out
    }

    pub(crate) fn parts(
        &self,
    ) -> (
        &BTreeMap<ClassId, SemanticClass>,
        &BTreeMap<(String, ClassId), CategorySet>,
    ) {
        (&self.classes, &self.entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Lexicon {
        let src = "GIVE\t13.2\tContribute Verbs\tdonate\n\
                   PERFORM\t10.5\tSteal Verbs\tredeem\n\
                   LOSE\t10.5\tSteal Verbs\tredeem\n\
                   PERFORM\t13.5.2\tObtain Verbs\trecover\n\
                   GAIN\t13.5.2\tObtain Verbs\trecover\n\
                   PERFORM\t30.2\tSight Verbs\tsign up\n";
        load_lexicon(src.as_bytes(), LexiconFormat::Normalized).unwrap()
    }

    #[test]
    fn kinds_split_two_and_two() {
        let asks = Category::ALL.iter().filter(|c| c.kind() == Kind::Ask).count();
        assert_eq!(asks, 2);
        assert_eq!(Kind::Framing.categories().len(), 2);
        assert_eq!(Category::Give.kind(), Kind::Ask);
        assert_eq!(Category::Lose.kind(), Kind::Framing);
    }

    #[test]
    fn class_ids_sort_numerically() {
        let mut ids: Vec<ClassId> = ["31.10", "9.1", "31.2", "13.5.1", "13.5", "flat.GIVE"]
            .into_iter()
            .map(ClassId::from)
            .collect();
        ids.sort();
        let got: Vec<&str> = ids.iter().map(ClassId::as_str).collect();
        assert_eq!(got, ["9.1", "13.5", "13.5.1", "31.2", "31.10", "flat.GIVE"]);
    }

    #[test]
    fn lookup_returns_each_pairing() {
        let lex = tiny();
        let got = lex.lookup("redeem");
        assert_eq!(got.len(), 2);
        assert!(got.contains(&(ClassId::from("10.5"), Category::Lose)));
        assert_eq!(
            lex.lookup("donate"),
            BTreeSet::from([(ClassId::from("13.2"), Category::Give)])
        );
        assert!(lex.lookup("zzzz-not-a-verb").is_empty());
    }

    #[test]
    fn multi_category_entry_is_stored_once() {
        let lex = tiny();
        assert_eq!(lex.len(), 4);
        let class = lex.class(&ClassId::from("13.5.2")).unwrap();
        assert_eq!(class.categories.len(), 2);
    }

    #[test]
    fn index_and_multiword() {
        let lex = tiny();
        assert!(lex.members(Category::Perform).contains("sign up"));
        assert_eq!(lex.multiword_starting_with("sign"), ["sign up".to_string()]);
        assert_eq!(lex.class_for("recover", Category::Gain), Some(&ClassId::from("13.5.2")));
    }

    #[test]
    fn set_operations() {
        let mut s = CategorySet::single(Category::Lose);
        s.insert(Category::Perform);
        assert_eq!(s.iter().collect::<Vec<_>>(), [Category::Perform, Category::Lose]);
        assert_eq!(s.of_kind(Kind::Framing), CategorySet::single(Category::Lose));
        assert!(s.remove(Category::Lose));
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn lemma_normalization() {
        assert_eq!(normalize_lemma("  Sign   UP "), "sign up");
    }
}
