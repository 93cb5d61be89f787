//! Inflectional base forms for English verbs (won -> win, losing -> lose).

use std::collections::HashMap;
use std::sync::LazyLock;

static IRREGULAR: LazyLock<HashMap<&'static str, &'static str>> = LazyLock::new(|| {
    [
        ("am", "be"), ("is", "be"), ("are", "be"), ("was", "be"), ("were", "be"), ("been", "be"),
        ("has", "have"), ("had", "have"), ("does", "do"), ("did", "do"), ("done", "do"),
        ("won", "win"), ("sent", "send"), ("lost", "lose"), ("got", "get"), ("gotten", "get"),
        ("found", "find"), ("brought", "bring"), ("bought", "buy"), ("told", "tell"),
        ("left", "leave"), ("felt", "feel"), ("made", "make"), ("paid", "pay"), ("gave", "give"),
        ("given", "give"), ("took", "take"), ("taken", "take"), ("beaten", "beat"),
        ("stuck", "stick"), ("kept", "keep"), ("held", "hold"), ("sold", "sell"),
        ("stole", "steal"), ("stolen", "steal"), ("forgot", "forget"), ("forgotten", "forget"),
        ("forgave", "forgive"), ("forgiven", "forgive"), ("froze", "freeze"), ("frozen", "freeze"),
        ("hid", "hide"), ("hidden", "hide"), ("broke", "break"), ("broken", "break"),
        ("shook", "shake"), ("shaken", "shake"), ("struck", "strike"), ("stricken", "strike"),
        ("knew", "know"), ("known", "know"), ("saw", "see"), ("seen", "see"), ("went", "go"),
        ("gone", "go"), ("came", "come"), ("ran", "run"), ("began", "begin"), ("begun", "begin"),
        ("wrote", "write"), ("written", "write"), ("chose", "choose"), ("chosen", "choose"),
        ("spent", "spend"), ("lent", "lend"), ("meant", "mean"), ("met", "meet"), ("led", "lead"),
        ("fed", "feed"), ("fled", "flee"), ("bled", "bleed"), ("dealt", "deal"), ("drew", "draw"),
        ("drawn", "draw"), ("threw", "throw"), ("thrown", "throw"), ("grew", "grow"),
        ("grown", "grow"), ("flew", "fly"), ("flown", "fly"), ("blew", "blow"), ("wore", "wear"),
        ("worn", "wear"), ("tore", "tear"), ("torn", "tear"), ("swore", "swear"), ("woke", "wake"),
        ("rode", "ride"), ("rose", "rise"), ("risen", "rise"), ("drove", "drive"),
        ("driven", "drive"), ("spoke", "speak"), ("spoken", "speak"), ("fell", "fall"),
        ("fallen", "fall"), ("caught", "catch"), ("taught", "teach"), ("thought", "think"),
        ("sought", "seek"), ("fought", "fight"), ("slept", "sleep"), ("swept", "sweep"),
        ("wept", "weep"), ("crept", "creep"), ("bound", "bind"), ("hung", "hang"),
        ("shot", "shoot"), ("sat", "sit"), ("stood", "stand"), ("understood", "understand"),
        ("said", "say"), ("laid", "lay"), ("bit", "bite"), ("bitten", "bite"), ("slid", "slide"),
        ("sank", "sink"), ("sunk", "sink"), ("sprang", "spring"), ("sprung", "spring"),
        ("stung", "sting"), ("swung", "swing"), ("clung", "cling"), ("flung", "fling"),
        ("overcame", "overcome"), ("withdrew", "withdraw"), ("withdrawn", "withdraw"),
        ("undertook", "undertake"), ("undertaken", "undertake"), ("mistook", "mistake"),
        ("mistaken", "mistake"), ("forbade", "forbid"), ("forbidden", "forbid"),
        ("overtook", "overtake"), ("overtaken", "overtake"), ("upheld", "uphold"),
        ("withheld", "withhold"), ("misled", "mislead"), ("foresaw", "foresee"),
        ("foreseen", "foresee"), ("awoke", "awake"), ("awoken", "awake"),
    ]
    .into_iter()
    .collect()
});

const VOWELS: &[u8] = b"aeiou";

fn doubled_final(stem: &str) -> bool {
    let b = stem.as_bytes();
    b.len() >= 2
        && b[b.len() - 1] == b[b.len() - 2]
        && b[b.len() - 1].is_ascii_alphabetic()
        && !VOWELS.contains(&b[b.len() - 1])
        && !matches!(b[b.len() - 1], b'l' | b's' | b'f' | b'z')
}

fn push(out: &mut Vec<String>, s: String) {
    if s.len() >= 2 && !out.contains(&s) {
        out.push(s);
    }
}

/// Candidate base forms of `word`, the word itself first.
pub fn base_forms(word: &str) -> Vec<String> {
    let w = word.to_lowercase();
    let mut out = vec![w.clone()];
    if let Some(base) = IRREGULAR.get(w.as_str()) {
        push(&mut out, base.to_string());
        return out;
    }
    if !w.is_ascii() || w.len() < 4 {
        return out;
    }
    if let Some(stem) = w.strip_suffix("ies") {
        push(&mut out, format!("{stem}y"));
    } else if let Some(stem) = w.strip_suffix("es") {
        if ["s", "x", "z", "ch", "sh", "o"].iter().any(|s| stem.ends_with(s)) {
            push(&mut out, stem.to_string());
            push(&mut out, format!("{stem}e"));
        } else {
            push(&mut out, format!("{stem}e"));
            push(&mut out, stem.to_string());
        }
    } else if let Some(stem) = w.strip_suffix('s') {
        if !stem.ends_with('s') && !stem.ends_with('u') && !stem.ends_with('i') {
            push(&mut out, stem.to_string());
        }
    }
    if let Some(stem) = w.strip_suffix("ied") {
        push(&mut out, format!("{stem}y"));
    } else if let Some(stem) = w.strip_suffix("ed") {
        regular_stems(&mut out, stem);
    }
    if let Some(stem) = w.strip_suffix("ing") {
        regular_stems(&mut out, stem);
    }
    out
}

fn regular_stems(out: &mut Vec<String>, stem: &str) {
    if stem.len() < 2 {
        return;
    }
    if doubled_final(stem) {
        push(out, stem[..stem.len() - 1].to_string());
        push(out, stem.to_string());
    } else {
        push(out, stem.to_string());
        push(out, format!("{stem}e"));
    }
}

/// True for forms that look like participles (-ed, -en, -ing or an irregular past form).
pub fn is_participle(word: &str) -> bool {
    let w = word.to_lowercase();
    if IRREGULAR.get(w.as_str()).is_some_and(|b| *b != "be" && *b != "have" && *b != "do")
        && !matches!(w.as_str(), "has" | "does" | "is" | "are" | "am")
    {
        return true;
    }
    w.len() > 4 && (w.ends_with("ed") || w.ends_with("ing"))
}

/// True for -ing forms.
pub fn is_gerund(word: &str) -> bool {
    let w = word.to_lowercase();
    w.len() > 4 && w.ends_with("ing")
}
