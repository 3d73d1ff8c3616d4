//! Corpus-wide directed graph of See Also links.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use rand::seq::index;
use rand::Rng;

use crate::error::{Result, Warnings};

/// Input record for graph construction: an article and its normalized See Also targets.
#[derive(Debug, Clone)]
pub struct SagInput<'a> {
    pub article_id: u64,
    pub title: &'a str,
    pub see_also: &'a [String],
}

#[derive(Debug, Clone, Default)]
pub struct Sag {
    /// Sorted vertex ids.
    vertices: Vec<u64>,
    title_index: HashMap<String, u64>,
    out: BTreeMap<u64, Vec<u64>>,
    incoming: BTreeMap<u64, Vec<u64>>,
    symmetric: bool,
}

#[derive(Debug, Default)]
pub struct SagBuilder {
    titles: Vec<(u64, String)>,
    links: Vec<(u64, Vec<String>)>,
    aliases: HashMap<String, String>,
    symmetric: bool,
}

impl SagBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Treat adjacency as undirected when answering neighbor queries.
    pub fn symmetric(mut self, yes: bool) -> Self {
        self.symmetric = yes;
        self
    }

    pub fn add_article(&mut self, article_id: u64, title: &str, see_also: Vec<String>) {
        self.titles.push((article_id, title.to_owned()));
        self.links.push((article_id, see_also));
    }

    /// Register a redirect: links to `from` resolve to whatever `to` resolves to.
    pub fn add_alias(&mut self, from: String, to: String) {
        self.aliases.entry(from).or_insert(to);
    }

    pub fn build(self, warnings: &mut Warnings) -> Sag {
        let mut title_index = HashMap::with_capacity(self.titles.len());
        let mut vertices = Vec::with_capacity(self.titles.len());
        for (id, title) in self.titles {
            if title_index.contains_key(&title) {
                warnings.bump("duplicate_title");
                continue;
            }
            title_index.insert(title, id);
            vertices.push(id);
        }
        vertices.sort_unstable();
        vertices.dedup();

        let resolve = |target: &str| -> Option<u64> {
            if let Some(&id) = title_index.get(target) {
                return Some(id);
            }
            self.aliases.get(target).and_then(|t| title_index.get(t)).copied()
        };

        let mut edges: BTreeMap<u64, BTreeSet<u64>> = BTreeMap::new();
        for (source, targets) in &self.links {
            // Later duplicates of a title are not vertices and contribute no edges.
            if vertices.binary_search(source).is_err() {
                continue;
            }
            for target in targets {
                match resolve(target) {
                    Some(t) if t == *source => warnings.bump("see_also_self_link"),
                    Some(t) => {
                        if !edges.entry(*source).or_default().insert(t) {
                            warnings.bump("see_also_duplicate_edge");
                        }
                    }
                    None => warnings.bump("see_also_unresolved"),
                }
            }
        }

        let mut out: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        let mut incoming: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        for (source, targets) in edges {
            for &t in &targets {
                incoming.entry(t).or_default().push(source);
            }
            out.insert(source, targets.into_iter().collect());
        }
        Sag { vertices, title_index, out, incoming, symmetric: self.symmetric }
    }
}

impl Sag {
    pub fn build<'a>(articles: impl IntoIterator<Item = SagInput<'a>>, warnings: &mut Warnings) -> Sag {
        let mut b = SagBuilder::new();
        for a in articles {
            b.add_article(a.article_id, a.title, a.see_also.to_vec());
        }
        b.build(warnings)
    }

    pub fn vertices(&self) -> &[u64] {
        &self.vertices
    }

    pub fn contains(&self, id: u64) -> bool {
        self.vertices.binary_search(&id).is_ok()
    }

    pub fn lookup(&self, title: &str) -> Option<u64> {
        self.title_index.get(title).copied()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn edge_count(&self) -> usize {
        self.out.values().map(Vec::len).sum()
    }

    /// Directed edges in ascending (source, target) order.
    pub fn edges(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.out.iter().flat_map(|(&s, ts)| ts.iter().map(move |&t| (s, t)))
    }

    fn check(&self, id: u64) -> Result<()> {
        if self.contains(id) {
            Ok(())
        } else {
            Err(crate::error::Error::UnknownArticle(id))
        }
    }

    /// Articles listed in `id`'s See Also section, ascending. In symmetric mode, articles
    /// that list `id` are included too.
    pub fn out_neighbors(&self, id: u64) -> Result<Vec<u64>> {
        self.check(id)?;
        let out = self.out.get(&id).map(Vec::as_slice).unwrap_or_default();
        if !self.symmetric {
            return Ok(out.to_vec());
        }
        let inc = self.incoming.get(&id).map(Vec::as_slice).unwrap_or_default();
        let merged: BTreeSet<u64> = out.iter().chain(inc).copied().collect();
        Ok(merged.into_iter().collect())
    }

    /// Up to `k` distinct vertices drawn uniformly without replacement from those that are
    /// neither `id` nor one of its neighbors, in draw order.
    pub fn sample_non_neighbors<R: Rng + ?Sized>(&self, id: u64, k: usize, rng: &mut R) -> Result<Vec<u64>> {
        let excluded: BTreeSet<u64> = self.out_neighbors(id)?.into_iter().chain(std::iter::once(id)).collect();
        let pool_size = self.vertices.len() - excluded.len();
        let k = k.min(pool_size);
        if k == 0 {
            return Ok(Vec::new());
        }
        if pool_size >= 2 * k && self.vertices.len() > 64 {
            // Rejection sampling over the full vertex list keeps large graphs O(k).
            let mut picked = Vec::with_capacity(k);
            let mut chosen = BTreeSet::new();
            while picked.len() < k {
                let v = self.vertices[rng.random_range(0..self.vertices.len())];
                if !excluded.contains(&v) && chosen.insert(v) {
                    picked.push(v);
                }
            }
            return Ok(picked);
        }
        let pool: Vec<u64> = self.vertices.iter().copied().filter(|v| !excluded.contains(v)).collect();
        Ok(index::sample(rng, pool.len(), k).into_iter().map(|i| pool[i]).collect())
    }

    /// `source<TAB>target` per edge, sorted.
    pub fn edge_list(&self) -> String {
        let mut s = String::new();
        for (a, b) in self.edges() {
            let _ = writeln!(s, "{a}\t{b}");
        }
        s
    }
}
