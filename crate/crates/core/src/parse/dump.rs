//! Streaming reader for MediaWiki `pages-articles` XML and the line-delimited fixture format.

use std::io::BufRead;

use quick_xml::events::Event;
use quick_xml::Reader;
use serde::Deserialize;

use crate::error::{Error, Result, Warnings};

/// One `<page>` of a dump, text untouched.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawArticle {
    pub page_id: u64,
    pub title: String,
    pub wikitext: String,
    pub is_redirect: bool,
    pub namespace: i64,
}

pub fn has_redirect_marker(wikitext: &str) -> bool {
    let head = wikitext.trim_start();
    head.len() >= 9 && head.as_bytes()[..9].eq_ignore_ascii_case(b"#redirect")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Title,
    Ns,
    Id,
    Text,
}

#[derive(Default)]
struct PageBuilder {
    title: Option<String>,
    ns: Option<String>,
    id: Option<String>,
    text: Option<String>,
    redirect_target: bool,
}

/// Pull-based iterator over the pages of a dump.
///
/// Only one page is held in memory at a time. Pages without a `<text>` element are skipped
/// and counted under `missing_text`.
pub struct ArticleStream<R: BufRead> {
    reader: Reader<R>,
    buf: Vec<u8>,
    warnings: Warnings,
    done: bool,
}

impl<R: BufRead> ArticleStream<R> {
    pub fn new(source: R) -> Self {
        let mut reader = Reader::from_reader(source);
        reader.config_mut().trim_text(false);
        Self { reader, buf: Vec::with_capacity(64 * 1024), warnings: Warnings::new(), done: false }
    }

    pub fn warnings(&self) -> &Warnings {
        &self.warnings
    }

    fn xml_error(&self, message: impl ToString) -> Error {
        xml_error(&self.reader, message)
    }

    fn next_page(&mut self) -> Result<Option<RawArticle>> {
        let mut page: Option<PageBuilder> = None;
        // Element nesting below <page>, used so that <id> inside <revision> or
        // <contributor> is not mistaken for the page id.
        let mut path: Vec<Vec<u8>> = Vec::new();
        let mut field: Option<Field> = None;
        loop {
            self.buf.clear();
            let event = self.reader.read_event_into(&mut self.buf);
            let event = match event {
                Ok(ev) => ev,
                Err(e) => return Err(Error::Xml { offset: self.reader.error_position(), message: e.to_string() }),
            };
            match event {
                Event::Start(e) => {
                    let name = e.local_name().as_ref().to_vec();
                    if name == b"page" {
                        page = Some(PageBuilder::default());
                        path.clear();
                        continue;
                    }
                    if let Some(p) = page.as_mut() {
                        field = match (path.as_slice(), name.as_slice()) {
                            ([], b"title") => Some(Field::Title),
                            ([], b"ns") => Some(Field::Ns),
                            ([], b"id") => Some(Field::Id),
                            ([rev], b"text") if rev == b"revision" => {
                                p.text.get_or_insert_with(String::new);
                                Some(Field::Text)
                            }
                            _ => None,
                        };
                        if name == b"redirect" && path.is_empty() {
                            p.redirect_target = true;
                        }
                        path.push(name);
                    }
                }
                Event::Empty(e) => {
                    if let Some(p) = page.as_mut() {
                        let name = e.local_name();
                        match (path.as_slice(), name.as_ref()) {
                            ([], b"redirect") => p.redirect_target = true,
                            ([rev], b"text") if rev == b"revision" => {
                                p.text.get_or_insert_with(String::new);
                            }
                            _ => {}
                        }
                    }
                }
                Event::Text(t) => {
                    if let (Some(p), Some(f)) = (page.as_mut(), field) {
                        let text = t.unescape().map_err(|e| xml_error(&self.reader, e))?;
                        append(p, f, &text);
                    }
                }
                Event::CData(t) => {
                    if let (Some(p), Some(f)) = (page.as_mut(), field) {
                        let raw = t.into_inner();
                        let text = std::str::from_utf8(&raw).map_err(|e| xml_error(&self.reader, e))?;
                        append(p, f, text);
                    }
                }
                Event::End(e) => {
                    if page.is_none() {
                        continue;
                    }
                    if e.local_name().as_ref() == b"page" && path.is_empty() {
                        let built = page.take().expect("checked above");
                        match self.finish(built)? {
                            Some(article) => return Ok(Some(article)),
                            None => continue,
                        }
                    }
                    path.pop();
                    field = None;
                }
                Event::Eof => {
                    if page.is_some() {
                        return Err(self.xml_error("unexpected end of input inside <page>"));
                    }
                    return Ok(None);
                }
                _ => {}
            }
        }
    }

    fn finish(&mut self, page: PageBuilder) -> Result<Option<RawArticle>> {
        let Some(wikitext) = page.text else {
            self.warnings.bump("missing_text");
            return Ok(None);
        };
        let title = page.title.unwrap_or_default().trim().to_owned();
        if title.is_empty() {
            self.warnings.bump("missing_title");
            return Ok(None);
        }
        let page_id = match page.id.as_deref().map(str::trim).map(str::parse::<u64>) {
            Some(Ok(id)) => id,
            _ => {
                self.warnings.bump("bad_page_id");
                return Ok(None);
            }
        };
        let namespace = page.ns.as_deref().map(str::trim).and_then(|s| s.parse().ok()).unwrap_or(0);
        let is_redirect = page.redirect_target || has_redirect_marker(&wikitext);
        Ok(Some(RawArticle { page_id, title, wikitext, is_redirect, namespace }))
    }
}

fn xml_error<R>(reader: &Reader<R>, message: impl ToString) -> Error {
    Error::Xml { offset: reader.buffer_position(), message: message.to_string() }
}

fn append(page: &mut PageBuilder, field: Field, text: &str) {
    let slot = match field {
        Field::Title => &mut page.title,
        Field::Ns => &mut page.ns,
        Field::Id => &mut page.id,
        Field::Text => &mut page.text,
    };
    slot.get_or_insert_with(String::new).push_str(text);
}

impl<R: BufRead> Iterator for ArticleStream<R> {
    type Item = Result<RawArticle>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match self.next_page() {
            Ok(Some(a)) => Some(Ok(a)),
            Ok(None) => {
                self.done = true;
                None
            }
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}

/// Stream the pages of a MediaWiki XML dump.
pub fn stream_articles<R: BufRead>(dump_source: R) -> ArticleStream<R> {
    ArticleStream::new(dump_source)
}

#[derive(Deserialize)]
struct FixtureRecord {
    #[serde(default)]
    id: Option<u64>,
    title: String,
    wikitext: String,
    #[serde(default)]
    ns: Option<i64>,
}

/// Reader for line-delimited `{"title": ..., "wikitext": ...}` records.
///
/// `id` and `ns` are optional; the page id defaults to the 1-based line number and the
/// namespace to 0. Blank lines are ignored.
pub struct FixtureStream<R: BufRead> {
    lines: std::io::Lines<R>,
    line_no: usize,
    warnings: Warnings,
}

impl<R: BufRead> FixtureStream<R> {
    pub fn new(source: R) -> Self {
        Self { lines: source.lines(), line_no: 0, warnings: Warnings::new() }
    }

    pub fn warnings(&self) -> &Warnings {
        &self.warnings
    }
}

impl<R: BufRead> Iterator for FixtureStream<R> {
    type Item = Result<RawArticle>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = match self.lines.next()? {
                Ok(l) => l,
                Err(e) => return Some(Err(e.into())),
            };
            self.line_no += 1;
            if line.trim().is_empty() {
                continue;
            }
            let record: FixtureRecord = match serde_json::from_str(&line) {
                Ok(r) => r,
                Err(e) => return Some(Err(Error::Fixture { line: self.line_no, message: e.to_string() })),
            };
            let title = record.title.trim().to_owned();
            if title.is_empty() {
                self.warnings.bump("missing_title");
                continue;
            }
            let is_redirect = has_redirect_marker(&record.wikitext);
            return Some(Ok(RawArticle {
                page_id: record.id.unwrap_or(self.line_no as u64),
                title,
                wikitext: record.wikitext,
                is_redirect,
                namespace: record.ns.unwrap_or(0),
            }));
        }
    }
}
