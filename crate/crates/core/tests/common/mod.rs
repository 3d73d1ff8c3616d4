#![allow(dead_code)]

pub mod oracle;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use wikiforge::parse::{self, stream_articles, ParsedArticle, RawArticle};
use wikiforge::sag::{Sag, SagBuilder};
use wikiforge::wst::{build_wst, Wst};
use wikiforge::Warnings;

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn energy_dump() -> PathBuf {
    fixtures().join("energy_dump.xml")
}

pub fn wiki(name: &str) -> String {
    let path = fixtures().join("wiki").join(format!("{name}.wiki"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn parse_wiki(name: &str, title: &str, id: u64) -> (ParsedArticle, Wst) {
    let parsed = parse::parse_article(id, title, &wiki(name), &mut Warnings::new());
    let tree = build_wst(id, title, &parsed.abstract_text, &parsed.sections);
    (parsed, tree)
}

/// A heading tree drawn by hand from a fixture: titles in preorder and each node's parent.
pub struct ExpectedTree {
    pub fixture: &'static str,
    pub title: &'static str,
    pub titles: &'static [&'static str],
    pub parents: &'static [Option<usize>],
    pub depths: &'static [usize],
}

impl ExpectedTree {
    pub fn path(&self, mut node: usize) -> Vec<&'static str> {
        let mut out = vec![self.titles[node]];
        while let Some(p) = self.parents[node] {
            out.push(self.titles[p]);
            node = p;
        }
        out.reverse();
        out
    }
}

pub const TREES: &[ExpectedTree] = &[
    ExpectedTree {
        fixture: "solar_power",
        title: "Solar power",
        titles: &[
            "Solar power",
            "Technologies",
            "Photovoltaic cells",
            "Concentrated solar power",
            "Hybrid systems",
            "Development and deployment",
            "Early days",
            "Current status",
            "Economics",
            "See also",
        ],
        parents: &[None, Some(0), Some(1), Some(1), Some(1), Some(0), Some(5), Some(5), Some(0), Some(0)],
        depths: &[1, 2, 3, 3, 3, 2, 3, 3, 2, 2],
    },
    ExpectedTree {
        fixture: "wind_power",
        title: "Wind power",
        titles: &[
            "Wind power",
            "History",
            "Early turbines",
            "Modern era",
            "Wind farms",
            "Offshore",
            "Onshore",
            "See also",
        ],
        parents: &[None, Some(0), Some(1), Some(1), Some(0), Some(4), Some(4), Some(0)],
        depths: &[1, 2, 3, 3, 2, 3, 3, 2],
    },
    ExpectedTree {
        fixture: "hydroelectricity",
        title: "Hydroelectricity",
        titles: &["Hydroelectricity"],
        parents: &[None],
        depths: &[1],
    },
    ExpectedTree {
        fixture: "renewable_energy",
        title: "Renewable energy",
        titles: &["Renewable energy", "Types", "Solar", "Wind", "Bioenergy", "Policy", "See also"],
        parents: &[None, Some(0), Some(1), Some(1), Some(1), Some(0), Some(0)],
        depths: &[1, 2, 3, 3, 3, 2, 2],
    },
    ExpectedTree {
        fixture: "tidal_power",
        title: "Tidal power",
        titles: &[
            "Tidal power",
            "Generation methods",
            "Tidal stream generator",
            "Axial turbines",
            "Crossflow turbines",
            "Tidal barrage",
            "Environmental concerns",
        ],
        parents: &[None, Some(0), Some(1), Some(2), Some(2), Some(1), Some(0)],
        depths: &[1, 2, 3, 4, 4, 3, 2],
    },
];

/// Compares a built tree against its drawing; returns a description of the first mismatch.
pub fn check_tree(expected: &ExpectedTree, tree: &Wst) -> Result<(), String> {
    if tree.len() != expected.titles.len() {
        return Err(format!("{}: {} nodes, expected {}", expected.fixture, tree.len(), expected.titles.len()));
    }
    if tree.parent_array() != expected.parents {
        return Err(format!("{}: parents {:?}", expected.fixture, tree.parent_array()));
    }
    for (i, node) in tree.nodes().iter().enumerate() {
        if node.node_id != i || node.title != expected.titles[i] || node.depth != expected.depths[i] {
            return Err(format!("{}: node {i} is {:?} at depth {}", expected.fixture, node.title, node.depth));
        }
        let path = tree.path_titles(i).map_err(|e| e.to_string())?;
        if path != expected.path(i) {
            return Err(format!("{}: path of {i} is {path:?}", expected.fixture));
        }
    }
    Ok(())
}

/// Cleaner fragments with their hand-cleaned output.
pub const CLEAN_GOLDEN: &[(&str, &str)] = &[
    ("See [[Apple|apples]] {{cn}} today", "See apples today"),
    ("a<ref>x</ref>b", "ab"),
    (
        "The {{convert|5|km|{{abbr|mi|miles}}}} river{{efn|Named {{lang|la|Fluvius}} by {{who}}}} flows [[north]].",
        "The river flows north.",
    ),
    ("Energy<ref name=\"a\"/> is conserved<ref name=\"b\">{{cite book|title=X}}</ref>.", "Energy is conserved."),
    ("Line one<!-- hidden [[link]] -->\n\n\n<small>Line</small> <br/>two", "Line one\nLine two"),
    ("{| class=\"wikitable\"\n|-\n| a || {{flag|b}}\n|}\nAfter the table.", "After the table."),
    ("[[File:Map.png|thumb|Map of [[Europe]]]]Europe is a continent.[[Category:Continents]]", "Europe is a continent."),
    ("Visit [https://example.org the site] or [http://bare.example.com].", "Visit the site or ."),
    (
        "'''Bold''' and ''italic'' and [[Category theory|categories]] [[:Category:Foo]]",
        "Bold and italic and categories Category:Foo",
    ),
    ("Kept text {{Infobox\n| name = x\n more", "Kept text"),
];

/// Content articles of the energy dump after the same filtering the pipeline applies.
pub struct FixtureCorpus {
    pub articles: Vec<(RawArticle, ParsedArticle, Wst)>,
    pub sag: Sag,
    pub texts: BTreeMap<u64, String>,
    pub warnings: Warnings,
}

pub fn energy_corpus() -> FixtureCorpus {
    let reader = BufReader::new(File::open(energy_dump()).unwrap());
    let mut warnings = Warnings::new();
    let mut articles = Vec::new();
    let mut builder = SagBuilder::new();
    let mut texts = BTreeMap::new();
    for raw in stream_articles(reader) {
        let raw = raw.unwrap();
        if raw.namespace != 0 || parse::is_disambiguation(&raw.wikitext) {
            continue;
        }
        if raw.is_redirect {
            let start = raw.wikitext.find("[[").unwrap() + 2;
            let end = start + raw.wikitext[start..].find("]]").unwrap();
            builder.add_alias(parse::normalize_title(&raw.title), parse::normalize_title(&raw.wikitext[start..end]));
            continue;
        }
        let parsed = parse::parse_article(raw.page_id, &raw.title, &raw.wikitext, &mut warnings);
        let tree = build_wst(raw.page_id, &raw.title, &parsed.abstract_text, &parsed.sections);
        builder.add_article(raw.page_id, &raw.title, parsed.see_also.clone());
        texts.insert(raw.page_id, tree.subtree_text(0).unwrap());
        articles.push((raw, parsed, tree));
    }
    let sag = builder.build(&mut warnings);
    FixtureCorpus { articles, sag, texts, warnings }
}

/// Sentence of `n` distinct-ish words tagged with `tag`.
pub fn filler(tag: &str, n: usize) -> String {
    let words = ["alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta", "iota", "kappa", "lambda"];
    let mut s = String::new();
    for i in 0..n {
        if i > 0 {
            s.push(' ');
        }
        if i == 0 {
            s.push_str(tag);
        } else {
            s.push_str(words[i % words.len()]);
        }
    }
    s
}

pub fn page_xml(id: u64, title: &str, text: &str) -> String {
    let escaped = text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;");
    format!(
        "  <page>\n    <title>{title}</title>\n    <ns>0</ns>\n    <id>{id}</id>\n    <revision>\n      <id>{}</id>\n      <text xml:space=\"preserve\">{escaped}</text>\n    </revision>\n  </page>\n",
        id + 100_000
    )
}

pub const DUMP_HEAD: &str =
    "<mediawiki xml:lang=\"en\">\n  <siteinfo>\n    <sitename>Synthetic</sitename>\n  </siteinfo>\n";
pub const DUMP_TAIL: &str = "</mediawiki>\n";

/// Wikitext with three contentful top-level sections of two contentful subsections each, so
/// every article yields four sibling groups.
pub fn structured_article(i: usize) -> String {
    let mut s = format!("{}\n", filler(&format!("lead{i}"), 14));
    for a in 0..3 {
        let _ = writeln!(s, "== Part {a} ==\n{}", filler(&format!("part{i}x{a}"), 12));
        for b in 0..2 {
            let _ = writeln!(s, "=== Piece {a}.{b} ===\n{}", filler(&format!("piece{i}x{a}x{b}"), 12));
        }
    }
    s
}

pub fn structured_dump(articles: usize) -> String {
    let mut xml = String::from(DUMP_HEAD);
    for i in 0..articles {
        xml.push_str(&page_xml(i as u64 + 1, &format!("Article {i}"), &structured_article(i)));
    }
    xml.push_str(DUMP_TAIL);
    xml
}

/// Writes a synthetic dump of at least `target_bytes` whose largest page is `big_page_bytes`
/// long. Returns the byte size of the largest `<page>` element written.
pub fn write_large_dump(path: &Path, target_bytes: usize, big_page_bytes: usize) -> std::io::Result<usize> {
    let mut out = std::io::BufWriter::new(File::create(path)?);
    out.write_all(DUMP_HEAD.as_bytes())?;
    let mut written = DUMP_HEAD.len();
    let mut largest = 0;
    let mut id = 1u64;
    while written < target_bytes {
        let paragraphs = if id == 500 { big_page_bytes / 90 } else { 4 + (id as usize * 7919) % 60 };
        let mut text = filler(&format!("Lead{id}"), 20);
        for p in 0..paragraphs {
            if p % 8 == 0 {
                let _ = write!(text, "\n== Section {p} ==\n");
            }
            let _ = write!(text, "\n{} [[Link {p}|label]] {{{{cite|x={p}}}}} & more", filler("Para", 9));
        }
        let page = page_xml(id, &format!("Page {id}"), &text);
        largest = largest.max(page.len());
        written += page.len();
        out.write_all(page.as_bytes())?;
        id += 1;
    }
    out.write_all(DUMP_TAIL.as_bytes())?;
    out.flush()?;
    Ok(largest)
}

/// Hand-computed (query, mrr@10, ndcg@10) for `fixtures/metrics/{run,qrels}.trec`.
pub const METRIC_TABLE: &[(&str, f64, f64)] = &[
    // grades 0,1,2: DCG = 1/log2(3) + 3/2, IDCG = 3 + 1/log2(3)
    ("q1", 0.5, 0.586_882_671_435_72),
    ("q2", 1.0, 1.0),
    ("q3", 0.0, 0.0),
    ("q4", 1.0 / 3.0, 0.5),
    ("q5", 0.0, 0.0),
    // a and b tie, a first; grades 0,3,0; IDCG over judged grades 3,1,0
    ("q6", 0.5, 0.578_764_111_009_300_1),
];

pub fn metric_fixtures() -> (Vec<wikiforge::metrics::Ranking>, wikiforge::metrics::Qrels) {
    let dir = fixtures().join("metrics");
    let run = std::fs::read_to_string(dir.join("run.trec")).unwrap();
    let qrels = std::fs::read_to_string(dir.join("qrels.trec")).unwrap();
    (wikiforge::metrics::parse_run_file(&run).unwrap(), wikiforge::metrics::parse_qrels(&qrels).unwrap())
}
