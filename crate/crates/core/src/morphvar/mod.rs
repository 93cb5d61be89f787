//! Cross part-of-speech word-variant clusters mapping surface forms to verb lemmas.

pub mod inflect;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum VariantError {
    #[error("line {line}: malformed token {token:?}")]
    Malformed { line: usize, token: String },
    #[error("line {line}: cluster has no :V member")]
    NoVerb { line: usize },
    #[error("line {line}: cluster has more than one :V member")]
    MultipleVerbs { line: usize },
    #[error("line {line}: {form}:{pos} already belongs to another cluster")]
    Conflict {
        line: usize,
        form: String,
        pos: PartOfSpeech,
    },
    #[error("unreadable input: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PartOfSpeech {
    Noun,
    Verb,
    Adj,
    Adv,
}

impl PartOfSpeech {
    pub fn tag(self) -> &'static str {
        match self {
            PartOfSpeech::Noun => "N",
            PartOfSpeech::Verb => "V",
            PartOfSpeech::Adj => "ADJ",
            PartOfSpeech::Adv => "ADV",
        }
    }

    fn parse(tag: &str) -> Option<Self> {
        match tag {
            "N" => Some(PartOfSpeech::Noun),
            "V" => Some(PartOfSpeech::Verb),
            "ADJ" | "AJ" => Some(PartOfSpeech::Adj),
            "ADV" | "AV" => Some(PartOfSpeech::Adv),
            _ => None,
        }
    }
}

impl fmt::Display for PartOfSpeech {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// How a surface form reached its verb lemma.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    DirectVerb,
    VariantMapped,
    SuffixFallback,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::DirectVerb => "direct_verb",
            Provenance::VariantMapped => "variant_mapped",
            Provenance::SuffixFallback => "suffix_fallback",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub lemma: String,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariantCluster {
    pub id: usize,
    pub members: Vec<(String, PartOfSpeech)>,
    pub canonical_verb: String,
}

impl VariantCluster {
    pub fn pos_of(&self, form: &str) -> impl Iterator<Item = PartOfSpeech> + '_ {
        let form = form.to_string();
        self.members.iter().filter(move |(f, _)| *f == form).map(|(_, p)| *p)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VariantTable {
    clusters: Vec<VariantCluster>,
    form_index: BTreeMap<String, BTreeSet<usize>>,
}

impl VariantTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn clusters(&self) -> &[VariantCluster] {
        &self.clusters
    }

    /// Add a cluster; the table is unchanged on error.
    pub fn add_cluster(&mut self, members: Vec<(String, PartOfSpeech)>) -> Result<usize, VariantError> {
        self.add_cluster_at(0, members)
    }

    fn add_cluster_at(&mut self, line: usize, members: Vec<(String, PartOfSpeech)>) -> Result<usize, VariantError> {
        let members: Vec<(String, PartOfSpeech)> = members
            .into_iter()
            .map(|(f, p)| (f.trim().to_lowercase(), p))
            .collect();
        let verbs: Vec<&String> = members
            .iter()
            .filter(|(_, p)| *p == PartOfSpeech::Verb)
            .map(|(f, _)| f)
            .collect();
        let canonical_verb = match verbs.as_slice() {
            [] => return Err(VariantError::NoVerb { line }),
            [v] => (*v).clone(),
            _ => return Err(VariantError::MultipleVerbs { line }),
        };
        for (i, (form, pos)) in members.iter().enumerate() {
            if form.is_empty() || form.contains(char::is_whitespace) {
                return Err(VariantError::Malformed {
                    line,
                    token: format!("{form}:{pos}"),
                });
            }
            let repeated = members[..i].iter().any(|(f, p)| f == form && p == pos);
            if repeated || self.lookup(form).any(|(_, p)| p == *pos) {
                return Err(VariantError::Conflict {
                    line,
                    form: form.clone(),
                    pos: *pos,
                });
            }
        }
        let id = self.clusters.len();
        for (form, _) in &members {
            self.form_index.entry(form.clone()).or_default().insert(id);
        }
        self.clusters.push(VariantCluster {
            id,
            members,
            canonical_verb,
        });
        Ok(id)
    }

    /// Every (cluster, pos) in which `form` appears, form taken as given.
    pub fn lookup<'a>(&'a self, form: &str) -> impl Iterator<Item = (&'a VariantCluster, PartOfSpeech)> + 'a {
        let ids = self.form_index.get(form).cloned().unwrap_or_default();
        let form = form.to_string();
        ids.into_iter().flat_map(move |id| {
            let cluster = &self.clusters[id];
            cluster
                .pos_of(&form)
                .collect::<Vec<_>>()
                .into_iter()
                .map(move |p| (cluster, p))
        })
    }

    pub fn has_pos(&self, form: &str, pos: PartOfSpeech) -> bool {
        self.lookup(&form.to_lowercase()).any(|(_, p)| p == pos)
    }

    /// True when `form` or one of its inflectional bases is a verb member.
    pub fn is_verb_form(&self, form: &str) -> bool {
        inflect::base_forms(form)
            .iter()
            .any(|b| self.has_pos(b, PartOfSpeech::Verb))
    }

    /// Table-only resolution: inflectional bases first, then cluster membership.
    pub fn resolve(&self, surface: &str) -> Vec<Candidate> {
        for base in inflect::base_forms(surface.trim()) {
            let mut found: Vec<Candidate> = Vec::new();
            for (cluster, pos) in self.lookup(&base) {
                let provenance = if pos == PartOfSpeech::Verb && base == cluster.canonical_verb {
                    Provenance::DirectVerb
                } else {
                    Provenance::VariantMapped
                };
                match found.iter_mut().find(|c| c.lemma == cluster.canonical_verb) {
                    Some(c) => c.provenance = c.provenance.min(provenance),
                    None => found.push(Candidate {
                        lemma: cluster.canonical_verb.clone(),
                        provenance,
                    }),
                }
            }
            if !found.is_empty() {
                found.sort_by(|a, b| a.provenance.cmp(&b.provenance).then(a.lemma.cmp(&b.lemma)));
                return found;
            }
        }
        Vec::new()
    }

    /// Candidate verb lemmas for a surface form of any part of speech.
    ///
    /// Unknown forms fall back to suffix stripping, marked [`Provenance::SuffixFallback`].
    pub fn normalize(&self, surface: &str) -> Vec<Candidate> {
        let form = surface.trim().to_lowercase();
        let known = self.resolve(&form);
        if !known.is_empty() {
            return known;
        }
        let mut out: Vec<(String, bool)> = Vec::new();
        self.reduce(&form, &mut out);
        // guesses the table confirms win over bare stripped stems
        if out.iter().any(|(_, known)| *known) {
            out.retain(|(_, known)| *known);
        }
        out.into_iter()
            .take(MAX_FALLBACK)
            .map(|(lemma, _)| Candidate {
                lemma,
                provenance: Provenance::SuffixFallback,
            })
            .collect()
    }

    fn reduce(&self, form: &str, out: &mut Vec<(String, bool)>) {
        let resolved = self.resolve(form);
        if !resolved.is_empty() {
            for c in resolved {
                if !out.iter().any(|(o, _)| *o == c.lemma) {
                    out.push((c.lemma, true));
                }
            }
            return;
        }
        match strip_suffix(form) {
            Some(stems) => {
                for s in stems {
                    self.reduce(&s, out);
                }
            }
            None => {
                if !out.iter().any(|(o, _)| o == form) {
                    out.push((form.to_string(), false));
                }
            }
        }
    }

    pub fn serialize(&self) -> String {
        let mut out = String::from("# word-variant clusters\n");
        for c in &self.clusters {
            let tokens: Vec<String> = c.members.iter().map(|(f, p)| format!("{f}:{p}")).collect();
            out.push_str(&tokens.join(" "));
            out.push('\n');
        }
        out
    }
}

const MAX_FALLBACK: usize = 2;
const MIN_STEM: usize = 3;

fn strip_suffix(form: &str) -> Option<Vec<String>> {
    if !form.is_ascii() {
        return None;
    }
    let stem_of = |suffix: &str| form.strip_suffix(suffix).filter(|s| s.len() >= MIN_STEM);
    if let Some(stem) = stem_of("tion") {
        return Some(vec![format!("{stem}te"), format!("{stem}t")]);
    }
    if let Some(stem) = stem_of("ment") {
        return Some(vec![stem.to_string()]);
    }
    for suffix in ["ing", "ed"] {
        if let Some(stem) = stem_of(suffix) {
            let b = stem.as_bytes();
            let doubled = b[b.len() - 1] == b[b.len() - 2] && !b"aeiouls".contains(&b[b.len() - 1]);
            return Some(if doubled {
                vec![stem[..stem.len() - 1].to_string(), stem.to_string()]
            } else {
                vec![stem.to_string(), format!("{stem}e")]
            });
        }
    }
    if let Some(stem) = stem_of("s") {
        if !stem.ends_with(['s', 'u', 'i']) {
            return Some(vec![stem.to_string()]);
        }
    }
    None
}

/// Candidate verb lemmas for `surface` as a plain set.
pub fn normalize(table: &VariantTable, surface: &str) -> BTreeSet<String> {
    table.normalize(surface).into_iter().map(|c| c.lemma).collect()
}

pub fn load_variants<R: BufRead>(src: R) -> Result<VariantTable, VariantError> {
    let mut table = VariantTable::new();
    for (idx, line) in src.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| VariantError::Io(e.to_string()))?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut members = Vec::new();
        for token in content.split_whitespace() {
            let parsed = token
                .rsplit_once(':')
                .and_then(|(form, tag)| Some((form, PartOfSpeech::parse(&tag.to_ascii_uppercase())?)))
                .filter(|(form, _)| !form.is_empty());
            let Some((form, pos)) = parsed else {
                return Err(VariantError::Malformed {
                    line: line_no,
                    token: token.to_string(),
                });
            };
            members.push((form.to_string(), pos));
        }
        table.add_cluster_at(line_no, members)?;
    }
    Ok(table)
}
