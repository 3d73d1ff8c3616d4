//! Wikitext to plain text.
//!
//! The cleaner removes markup rather than rendering it: templates, tables, references and
//! media links are dropped wholesale, wikilinks and external links collapse to their visible
//! label. Passes are repeated until the output stops changing, so `clean(clean(x)) == clean(x)`.

use std::sync::LazyLock;

use regex::Regex;

use crate::error::Warnings;

pub const MAX_TEMPLATE_DEPTH: usize = 32;
const MAX_PASSES: usize = 8;

static REF_SELF_CLOSING: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)<ref\b[^>]*/\s*>").unwrap());
static REF_PAIRED: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?is)<ref\b[^>]*>.*?</ref\s*>").unwrap());
static HTML_TAG: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"</?[A-Za-z][A-Za-z0-9]*(?:\s[^<>]*)?/?>").unwrap());
static WIKILINK: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\[\[([^\[\]|]*)(?:\|([^\[\]]*))?\]\]").unwrap());
static EXTERNAL_LINK: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\[(?:https?:|ftp:)?//[^\s\[\]]+(?:[ \t]+([^\[\]]*))?\]").unwrap());
static EMPHASIS: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"'{2,}").unwrap());

/// Namespaces whose `[[...]]` links carry no inline text.
const MEDIA_PREFIXES: &[&str] = &["file", "image", "category"];

/// Clean a wikitext fragment, discarding warnings.
pub fn clean_markup(fragment: &str) -> String {
    clean_markup_counted(fragment, &mut Warnings::new())
}

/// Clean a wikitext fragment, counting unclosed constructs into `warnings`.
pub fn clean_markup_counted(fragment: &str, warnings: &mut Warnings) -> String {
    let mut current = clean_pass(fragment, warnings);
    // Later passes only pick up constructs uncovered by an earlier removal; their
    // warnings would double count, so they go nowhere.
    let mut scratch = Warnings::new();
    for _ in 1..MAX_PASSES {
        let next = clean_pass(&current, &mut scratch);
        if next == current {
            break;
        }
        current = next;
    }
    current
}

fn clean_pass(input: &str, warnings: &mut Warnings) -> String {
    let text = strip_comments(input, warnings);
    let text = REF_SELF_CLOSING.replace_all(&text, "");
    let text = REF_PAIRED.replace_all(&text, "");
    let text = strip_templates(&text, warnings);
    let text = strip_tables(&text, warnings);
    let text = strip_media_links(&text, warnings);
    let text = HTML_TAG.replace_all(&text, "");
    let text = WIKILINK.replace_all(&text, |caps: &regex::Captures<'_>| {
        let target = caps[1].trim().trim_start_matches(':').trim();
        match caps.get(2).map(|m| m.as_str().trim()) {
            Some(label) if !label.is_empty() => label.to_owned(),
            _ => target.to_owned(),
        }
    });
    let text = EXTERNAL_LINK.replace_all(&text, |caps: &regex::Captures<'_>| {
        caps.get(1).map(|m| m.as_str().trim().to_owned()).unwrap_or_default()
    });
    let text = EMPHASIS.replace_all(&text, "");
    collapse_whitespace(&text)
}

pub(crate) fn strip_comments(input: &str, warnings: &mut Warnings) -> String {
    let mut out = String::with_capacity(input.len());
    let mut rest = input;
    while let Some(start) = rest.find("<!--") {
        out.push_str(&rest[..start]);
        match rest[start + 4..].find("-->") {
            Some(end) => rest = &rest[start + 4 + end + 3..],
            None => {
                warnings.bump("unclosed_comment");
                return out;
            }
        }
    }
    out.push_str(rest);
    out
}

/// Byte offset just past the span opened at `start`, or `None` when the opener never closes
/// or nests deeper than `max_depth`.
fn balanced_end(bytes: &[u8], start: usize, open: &[u8], close: &[u8], max_depth: usize) -> Option<usize> {
    let mut depth = 0usize;
    let mut j = start;
    while j < bytes.len() {
        if bytes[j..].starts_with(open) {
            depth += 1;
            if depth > max_depth {
                return None;
            }
            j += open.len();
        } else if depth > 0 && bytes[j..].starts_with(close) {
            depth -= 1;
            j += close.len();
            if depth == 0 {
                return Some(j);
            }
        } else {
            j += 1;
        }
    }
    None
}

/// Removes balanced `open ... close` spans whose opener satisfies `select`, nested ones
/// included. An opener that never closes drops everything to the end of the input.
fn strip_spans(
    input: &str,
    open: &str,
    close: &str,
    warnings: &mut Warnings,
    reason: &str,
    select: impl Fn(&str, usize) -> bool,
) -> String {
    let bytes = input.as_bytes();
    let mut out = String::with_capacity(input.len());
    let mut copied_to = 0;
    let mut i = 0;
    while i < bytes.len() {
        if !bytes[i..].starts_with(open.as_bytes()) || !select(input, i) {
            i += 1;
            continue;
        }
        out.push_str(&input[copied_to..i]);
        match balanced_end(bytes, i, open.as_bytes(), close.as_bytes(), MAX_TEMPLATE_DEPTH) {
            Some(end) => {
                i = end;
                copied_to = end;
            }
            None => {
                warnings.bump(reason);
                return out;
            }
        }
    }
    out.push_str(&input[copied_to..]);
    out
}

fn strip_templates(input: &str, warnings: &mut Warnings) -> String {
    strip_spans(input, "{{", "}}", warnings, "unclosed_template", |_, _| true)
}

fn strip_tables(input: &str, warnings: &mut Warnings) -> String {
    strip_spans(input, "{|", "|}", warnings, "unclosed_table", |_, _| true)
}

fn is_media_link_at(input: &str, at: usize) -> bool {
    let after = input[at + 2..].trim_start();
    let Some(colon) = after.find(':') else {
        return false;
    };
    let prefix = after[..colon].trim();
    MEDIA_PREFIXES.iter().any(|p| prefix.eq_ignore_ascii_case(p))
}

/// Drops `[[File:...]]`, `[[Image:...]]` and `[[Category:...]]`, captions included.
fn strip_media_links(input: &str, warnings: &mut Warnings) -> String {
    strip_spans(input, "[[", "]]", warnings, "unclosed_media_link", is_media_link_at)
}

/// Collapses horizontal whitespace to single spaces and drops blank lines.
pub fn collapse_whitespace(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for line in text.lines() {
        let mut first = true;
        for word in line.split_whitespace() {
            if first {
                if !out.is_empty() {
                    out.push('\n');
                }
                first = false;
            } else {
                out.push(' ');
            }
            out.push_str(word);
        }
    }
    out
}
