use std::sync::LazyLock;

use regex::Regex;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum TokKind {
    Url,
    Email,
    Money,
    Percent,
    Num,
    Word,
    Terminator,
    Punct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct RawTok {
    pub kind: TokKind,
    pub start: usize,
    pub end: usize,
}

const KINDS: [TokKind; 9] = [
    TokKind::Url,
    TokKind::Email,
    TokKind::Money,
    TokKind::Money,
    TokKind::Percent,
    TokKind::Num,
    TokKind::Word,
    TokKind::Terminator,
    TokKind::Punct,
];

static TOKEN: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r#"(?x)
        ((?i:https?://|www\.)[^\s<>"'()\[\]{}]+)
        |([A-Za-z0-9._%+\-]+@[A-Za-z0-9\-]+(?:\.[A-Za-z0-9\-]+)+)
        |([$€£]\s?\d+(?:,\d{3})*(?:\.\d+)?(?:[KkMmBb]\b)?)
        |(\d+(?:,\d{3})*(?:\.\d+)?\s?(?:[KkMm]\s?)?(?:Eu|EUR|USD|GBP|BTC|dollars?|euros?|bucks)\b)
        |(\d+(?:\.\d+)?\s?%)
        |(\d{1,2}(?::\d{2})?\s?(?i:am|pm)\b|\d+(?:[.,:/]\d+)*(?i:st|nd|rd|th)?)
        |(\p{L}+(?:['’]\p{L}+)*(?:-\p{L}+)*)
        |([.!?]+)
        |(\S)
        "#,
    )
    .expect("token pattern compiles")
});

/// Split `text` into tokens covering every non-whitespace character.
pub(crate) fn tokenize(text: &str) -> Vec<RawTok> {
    let mut out = Vec::new();
    for caps in TOKEN.captures_iter(text) {
        let (idx, m) = caps
            .iter()
            .enumerate()
            .skip(1)
            .find_map(|(i, m)| m.map(|m| (i, m)))
            .expect("one group matches");
        let kind = KINDS[idx - 1];
        let (start, mut end) = (m.start(), m.end());
        if kind == TokKind::Url {
            // trailing sentence punctuation is not part of the link
            let trimmed = m.as_str().trim_end_matches(['.', ',', ';', ':', '!', '?']);
            end = start + trimmed.len();
            out.push(RawTok { kind, start, end });
            for tok in tokenize(&text[end..m.end()]) {
                out.push(RawTok {
                    kind: tok.kind,
                    start: end + tok.start,
                    end: end + tok.end,
                });
            }
            continue;
        }
        out.push(RawTok { kind, start, end });
    }
    out
}
