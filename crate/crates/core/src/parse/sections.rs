use std::collections::HashSet;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::markup::{clean_markup_counted, strip_comments};
use crate::error::Warnings;

static HEADING: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^(={1,6})[ \t]*(.+?)[ \t]*(={1,6})[ \t]*$").unwrap());
static LINK_TARGET: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\[\[([^\[\]|]*)(?:\|[^\[\]]*)?\]\]").unwrap());
static DISAMBIG: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)\{\{\s*disambig").unwrap());

/// Headings whose sections are citation apparatus rather than article content.
pub const NON_CONTENT_HEADINGS: &[&str] =
    &["references", "external links", "further reading", "notes", "bibliography", "sources"];

pub const SEE_ALSO_HEADING: &str = "see also";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    pub level: u8,
    pub heading: String,
    pub body: String,
}

/// Split wikitext at heading lines without cleaning the bodies.
///
/// Comments are removed first so commented-out headings do not split. Headings are cleaned;
/// a heading that cleans to nothing is dropped and its body joins the preceding section.
pub fn split_sections(wikitext: &str, warnings: &mut Warnings) -> (String, Vec<Section>) {
    let text = strip_comments(wikitext, warnings);
    let mut lead = String::new();
    let mut sections: Vec<Section> = Vec::new();
    for line in text.lines() {
        if let Some(caps) = HEADING.captures(line) {
            let (left, right) = (caps[1].len(), caps[3].len());
            if left != right {
                warnings.bump("unbalanced_heading");
            }
            let heading = clean_markup_counted(&caps[2], warnings).replace('\n', " ");
            if heading.is_empty() {
                warnings.bump("empty_heading");
                continue;
            }
            sections.push(Section { level: left.min(right) as u8, heading, body: String::new() });
            continue;
        }
        let target = match sections.last_mut() {
            Some(s) => &mut s.body,
            None => &mut lead,
        };
        target.push_str(line);
        target.push('\n');
    }
    (lead, sections)
}

/// Split wikitext into its lead text and sections, cleaning everything.
pub fn segment_sections(wikitext: &str) -> (String, Vec<Section>) {
    segment_sections_counted(wikitext, &mut Warnings::new())
}

pub fn segment_sections_counted(wikitext: &str, warnings: &mut Warnings) -> (String, Vec<Section>) {
    let (lead, raw) = split_sections(wikitext, warnings);
    let sections = raw.into_iter().map(|s| Section { body: clean_markup_counted(&s.body, warnings), ..s }).collect();
    (clean_markup_counted(&lead, warnings), sections)
}

/// Canonical form of a page title as used for link resolution.
pub fn normalize_title(raw: &str) -> String {
    let no_fragment = raw.split('#').next().unwrap_or("");
    let spaced = no_fragment.replace('_', " ");
    let collapsed = spaced.split_whitespace().collect::<Vec<_>>().join(" ");
    let mut chars = collapsed.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

pub fn is_see_also(heading: &str) -> bool {
    heading.trim().eq_ignore_ascii_case(SEE_ALSO_HEADING)
}

pub fn is_non_content(heading: &str) -> bool {
    let h = heading.trim();
    NON_CONTENT_HEADINGS.iter().any(|n| h.eq_ignore_ascii_case(n))
}

/// Link targets of the See Also section, normalized and deduplicated in first-seen order.
///
/// `sections` must carry raw (uncleaned) bodies, as produced by [`split_sections`].
pub fn extract_see_also(sections: &[Section]) -> Vec<String> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for section in sections.iter().filter(|s| is_see_also(&s.heading)) {
        for caps in LINK_TARGET.captures_iter(&section.body) {
            let title = normalize_title(caps[1].trim().trim_start_matches(':'));
            if !title.is_empty() && seen.insert(title.clone()) {
                out.push(title);
            }
        }
    }
    out
}

pub fn is_disambiguation(wikitext: &str) -> bool {
    DISAMBIG.is_match(wikitext)
}

/// Everything downstream needs from one content article.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedArticle {
    pub page_id: u64,
    pub title: String,
    pub abstract_text: String,
    /// Content sections only, cleaned.
    pub sections: Vec<Section>,
    pub see_also: Vec<String>,
}

/// Segment and clean one article, extracting See Also targets and dropping non-content
/// sections together with their subsections.
pub fn parse_article(page_id: u64, title: &str, wikitext: &str, warnings: &mut Warnings) -> ParsedArticle {
    let (lead, raw) = split_sections(wikitext, warnings);
    let see_also = extract_see_also(&raw);
    let mut sections = Vec::with_capacity(raw.len());
    let mut dropping_below: Option<u8> = None;
    for s in raw {
        if let Some(level) = dropping_below {
            if s.level > level {
                continue;
            }
            dropping_below = None;
        }
        if is_non_content(&s.heading) {
            dropping_below = Some(s.level);
            continue;
        }
        let body = clean_markup_counted(&s.body, warnings);
        sections.push(Section { body, ..s });
    }
    ParsedArticle {
        page_id,
        title: title.trim().to_owned(),
        abstract_text: clean_markup_counted(&lead, warnings),
        sections,
        see_also,
    }
}
