//! Text normalization and sentence segmentation.
//!
//! Cleaning keeps letters, digits, whitespace, apostrophes, and the
//! sentence punctuation `.!?,` — everything detectors and segmentation
//! depend on. Other ASCII characters are stripped in place; a word
//! carrying anything outside ASCII (emoji, mojibake, decoration) is
//! dropped whole rather than half-salvaged.

use regex::Regex;

/// Map common typographic characters onto their ASCII equivalents before
/// the whitelist pass so curly quotes don't take whole words with them.
fn normalize_typography(raw: &str) -> String {
    raw.chars()
        .map(|ch| match ch {
            '\u{2019}' | '\u{2018}' | '\u{02BC}' | '`' => '\'',
            '\u{201C}' | '\u{201D}' | '\u{201E}' => '"',
            '\u{2013}' | '\u{2014}' | '\u{2015}' | '\u{2026}' => ' ',
            '\u{00A0}' | '\u{2009}' | '\u{200A}' | '\u{2002}' | '\u{2003}' => ' ',
            other => other,
        })
        .collect()
}

fn keep_char(ch: char) -> bool {
    ch.is_ascii_alphanumeric() || matches!(ch, '\'' | '.' | '!' | '?' | ',')
}

/// Whitelist cleaner. Line structure is preserved (tweet files are
/// one-per-line); within a line, runs of whitespace collapse to single
/// spaces. Idempotent: cleaning already-clean text is the identity.
pub fn clean_text(raw: &str) -> String {
    let normalized = normalize_typography(raw);
    let mut lines: Vec<String> = Vec::new();
    for line in normalized.lines() {
        let mut words: Vec<String> = Vec::new();
        for word in line.split_whitespace() {
            if word.chars().any(|ch| !ch.is_ascii()) {
                continue;
            }
            let kept: String = word.chars().filter(|&ch| keep_char(ch)).collect();
            if !kept.is_empty() {
                words.push(kept);
            }
        }
        lines.push(words.join(" "));
    }
    lines.join("\n")
}

/// Remove transcript annotations (pause marks, redaction slashes, stage
/// directions) before cleaning. The pattern list is configuration; this
/// just applies it in order.
pub fn strip_annotations(raw: &str, patterns: &[Regex]) -> String {
    let mut text = raw.to_string();
    for re in patterns {
        text = re.replace_all(&text, " ").into_owned();
    }
    text
}

/// Default annotation patterns for interview-style transcripts.
pub fn default_annotation_patterns() -> Vec<String> {
    vec![
        r"\(pause\s*[0-9.]*\)".to_string(),
        r"\([^()]{0,80}\)".to_string(),
        r"/RD[^/]{0,80}/".to_string(),
        r"<[^<>]{0,80}>".to_string(),
        r"\[[^\[\]]{0,80}\]".to_string(),
    ]
}

/// Compile an annotation pattern list, surfacing the offending pattern on
/// failure.
pub fn compile_patterns(patterns: &[String]) -> Result<Vec<Regex>, regex::Error> {
    patterns.iter().map(|p| Regex::new(p)).collect()
}

/// Split `text` into sentence substrings. Boundaries are newlines and runs
/// of terminal punctuation `.!?` (the run stays with its sentence).
/// Commas never split. Pieces without any alphanumeric content are
/// discarded, so no empty sentence is ever produced.
pub fn split_sentences(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut start = 0usize;
    let mut i = 0usize;
    while i < bytes.len() {
        match bytes[i] {
            b'\n' => {
                push_sentence(text, start, i, &mut out);
                start = i + 1;
                i += 1;
            }
            b'.' | b'!' | b'?' => {
                let mut j = i + 1;
                while j < bytes.len() && matches!(bytes[j], b'.' | b'!' | b'?') {
                    j += 1;
                }
                push_sentence(text, start, j, &mut out);
                start = j;
                i = j;
            }
            _ => i += 1,
        }
    }
    push_sentence(text, start, bytes.len(), &mut out);
    out
}

fn push_sentence<'a>(text: &'a str, start: usize, end: usize, out: &mut Vec<&'a str>) {
    if start >= end {
        return;
    }
    let piece = text[start..end].trim();
    if piece.chars().any(|ch| ch.is_ascii_alphanumeric()) {
        out.push(piece);
    }
}
