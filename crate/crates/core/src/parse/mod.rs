//! Dump reading, section segmentation and markup cleaning.

pub mod dump;
pub mod markup;
pub mod sections;

pub use dump::{stream_articles, ArticleStream, FixtureStream, RawArticle};
pub use markup::{clean_markup, clean_markup_counted};
pub use sections::{
    extract_see_also, is_disambiguation, normalize_title, parse_article, segment_sections, split_sections,
    ParsedArticle, Section,
};
