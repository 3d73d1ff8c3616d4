//! Brute-force enumeration of every instance a sampler is allowed to emit.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use wikiforge::sag::Sag;
use wikiforge::samplers::{truncate_words, word_count, Provenance, PseudoInstance, SamplerConfig, Task};
use wikiforge::wst::Wst;

pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

pub fn permutations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if !cur.contains(&i) {
                cur.push(i);
                go(n, k, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(n, k, &mut Vec::new(), &mut out);
    out
}

/// (query, positive, negatives) with negatives in emission order.
pub type Key = (String, String, Vec<String>);

fn key(inst: &PseudoInstance) -> Key {
    (inst.query.clone(), inst.positive.clone(), inst.negatives.clone())
}

fn dedup_against(positive: &str, texts: impl IntoIterator<Item = String>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for t in texts {
        if !t.trim().is_empty() && t != positive && !out.contains(&t) {
            out.push(t);
        }
    }
    out
}

fn path_query(tree: &Wst, node: usize, cfg: &SamplerConfig) -> String {
    truncate_words(&tree.path_titles(node).unwrap().join(" "), cfg.max_query_words).to_owned()
}

fn doc(text: &str, cap: usize) -> String {
    truncate_words(text, cap).to_owned()
}

/// Every valid sibling-ranking group of one tree, plus the (parent, positive) pairs.
pub fn srr_universe(tree: &Wst, cfg: &SamplerConfig) -> (HashSet<Key>, BTreeSet<(usize, usize)>) {
    let mut keys = HashSet::new();
    let mut pairs = BTreeSet::new();
    for parent in tree.nodes() {
        let q: Vec<usize> = parent
            .children
            .iter()
            .copied()
            .filter(|&c| word_count(&tree.nodes()[c].content) >= cfg.min_content_words)
            .collect();
        if q.len() < 2 {
            continue;
        }
        for &d in &q {
            let others: Vec<usize> = q.iter().copied().filter(|&c| c != d).collect();
            let positive = doc(&tree.nodes()[d].content, cfg.max_doc_words);
            let take = others.len().min(cfg.srr_max_negatives);
            for combo in combinations(others.len(), take) {
                let texts = combo.iter().map(|&i| doc(&tree.nodes()[others[i]].content, cfg.max_doc_words));
                let negatives = dedup_against(&positive, texts);
                if !negatives.is_empty() {
                    keys.insert((path_query(tree, d, cfg), positive.clone(), negatives));
                    pairs.insert((parent.node_id, d));
                }
            }
        }
    }
    (keys, pairs)
}

pub struct RwiUniverse {
    /// Positive node → (positive query, document, allowed negative queries).
    pub by_positive: BTreeMap<usize, (String, String, HashSet<String>)>,
}

pub fn rwi_universe(tree: &Wst, cfg: &SamplerConfig) -> RwiUniverse {
    let mut by_positive = BTreeMap::new();
    let non_root: Vec<usize> = (1..tree.len()).collect();
    if non_root.len() < cfg.rwi_num_negatives + 2 {
        return RwiUniverse { by_positive };
    }
    for &d in &non_root {
        if word_count(&tree.nodes()[d].content) < cfg.min_content_words {
            continue;
        }
        let path = tree.path(d).unwrap();
        let pool: Vec<usize> = non_root.iter().copied().filter(|n| !path.contains(n)).collect();
        let segments = path.len() - 1;
        let positive_query = path_query(tree, d, cfg);
        let mut allowed = HashSet::new();
        for perm in permutations(pool.len(), segments) {
            let mut q = tree.title().to_owned();
            for i in perm {
                q.push(' ');
                q.push_str(&tree.nodes()[pool[i]].title);
            }
            let q = truncate_words(&q, cfg.max_query_words).to_owned();
            if q != positive_query {
                allowed.insert(q);
            }
        }
        if allowed.len() >= cfg.rwi_num_negatives {
            by_positive.insert(d, (positive_query, doc(&tree.nodes()[d].content, cfg.max_doc_words), allowed));
        }
    }
    RwiUniverse { by_positive }
}

pub fn ati_universe(tree: &Wst, cfg: &SamplerConfig) -> HashSet<Key> {
    let mut keys = HashSet::new();
    let root = tree.root();
    if word_count(&root.content) < cfg.min_content_words {
        return keys;
    }
    let sections: Vec<String> = root
        .children
        .iter()
        .map(|&c| tree.subtree_text(c).unwrap())
        .filter(|t| word_count(t) >= cfg.min_content_words)
        .collect();
    let positive = doc(&root.content, cfg.max_doc_words);
    let query = truncate_words(&root.title, cfg.max_query_words).to_owned();
    for combo in combinations(sections.len(), sections.len().min(cfg.ati_max_negatives)) {
        let negatives = dedup_against(&positive, combo.iter().map(|&i| doc(&sections[i], cfg.max_doc_words)));
        if !negatives.is_empty() {
            keys.insert((query.clone(), positive.clone(), negatives));
        }
    }
    keys
}

/// LTM groups keyed with negatives sorted, since negatives are drawn in random order.
pub fn ltm_universe(sag: &Sag, texts: &BTreeMap<u64, String>, cfg: &SamplerConfig) -> HashSet<Key> {
    let cap = cfg.ltm_max_doc_words;
    let mut keys = HashSet::new();
    for &v in sag.vertices() {
        let neighbors = sag.out_neighbors(v).unwrap();
        let query = doc(&texts[&v], cap);
        let pool: Vec<u64> = sag.vertices().iter().copied().filter(|u| *u != v && !neighbors.contains(u)).collect();
        for &nb in &neighbors {
            if word_count(&texts[&nb]) < cfg.min_content_words || query.is_empty() {
                continue;
            }
            let positive = doc(&texts[&nb], cap);
            for combo in combinations(pool.len(), pool.len().min(cfg.ltm_num_negatives)) {
                let mut negatives = dedup_against(&positive, combo.iter().map(|&i| doc(&texts[&pool[i]], cap)));
                negatives.sort();
                if !negatives.is_empty() {
                    keys.insert((query.clone(), positive.clone(), negatives));
                }
            }
        }
    }
    keys
}

/// Checks the invariants every instance must hold regardless of task.
pub fn check_common(inst: &PseudoInstance, cfg: &SamplerConfig) -> Result<(), String> {
    inst.validate()?;
    let (q_cap, d_cap) = match inst.task {
        Task::Ltm => (cfg.ltm_max_doc_words, cfg.ltm_max_doc_words),
        _ => (cfg.max_query_words, cfg.max_doc_words),
    };
    if word_count(&inst.query) > q_cap {
        return Err(format!("query over {q_cap} words"));
    }
    let doc_sides: Vec<&String> = match inst.task {
        Task::Rwi => vec![&inst.positive],
        _ => std::iter::once(&inst.positive).chain(&inst.negatives).collect(),
    };
    if doc_sides.iter().any(|d| word_count(d) > d_cap) {
        return Err(format!("document over {d_cap} words"));
    }
    if inst.task == Task::Rwi && inst.negatives.iter().any(|q| word_count(q) > q_cap) {
        return Err(format!("negative query over {q_cap} words"));
    }
    Ok(())
}

pub fn check_srr(inst: &PseudoInstance, universe: &HashSet<Key>) -> Result<(), String> {
    if universe.contains(&key(inst)) {
        Ok(())
    } else {
        Err(format!("srr group outside the universe: {:?}", inst.provenance))
    }
}

pub fn check_ati(inst: &PseudoInstance, universe: &HashSet<Key>) -> Result<(), String> {
    if universe.contains(&key(inst)) {
        Ok(())
    } else {
        Err("ati group outside the universe".into())
    }
}

pub fn check_rwi(inst: &PseudoInstance, tree: &Wst, universe: &RwiUniverse, cfg: &SamplerConfig) -> Result<(), String> {
    let Provenance::Nodes { node_ids, negative_node_ids: Some(neg_nodes) } = &inst.provenance else {
        return Err("rwi provenance shape".into());
    };
    let Some((query, document, allowed)) = universe.by_positive.get(&node_ids[0]) else {
        return Err(format!("rwi positive {} not a candidate", node_ids[0]));
    };
    if *query != inst.query || *document != inst.positive {
        return Err("rwi query or document mismatch".into());
    }
    if inst.negatives.len() != cfg.rwi_num_negatives {
        return Err("rwi negative count".into());
    }
    if let Some(bad) = inst.negatives.iter().find(|q| !allowed.contains(*q)) {
        return Err(format!("rwi negative {bad:?} not allowed"));
    }
    let path = tree.path(node_ids[0]).unwrap();
    for (nodes, q) in neg_nodes.iter().zip(&inst.negatives) {
        if nodes.iter().any(|n| path.contains(n)) {
            return Err("rwi negative uses a path node".into());
        }
        let mut rebuilt = tree.title().to_owned();
        for &n in nodes {
            rebuilt.push(' ');
            rebuilt.push_str(&tree.nodes()[n].title);
        }
        if truncate_words(&rebuilt, cfg.max_query_words) != q {
            return Err("rwi provenance does not spell the negative".into());
        }
    }
    Ok(())
}

pub fn check_ltm(inst: &PseudoInstance, sag: &Sag, universe: &HashSet<Key>) -> Result<(), String> {
    let Provenance::Neighbors { neighbor_id, negative_ids } = &inst.provenance else {
        return Err("ltm provenance shape".into());
    };
    let neighbors = sag.out_neighbors(inst.article_id).map_err(|e| e.to_string())?;
    if !neighbors.contains(neighbor_id) {
        return Err("ltm positive is not a neighbor".into());
    }
    if negative_ids.iter().any(|n| neighbors.contains(n) || *n == inst.article_id) {
        return Err("ltm negative is a neighbor or the article itself".into());
    }
    let mut k = key(inst);
    k.2.sort();
    if universe.contains(&k) {
        Ok(())
    } else {
        Err("ltm group outside the universe".into())
    }
}

/// Runs every sampler on every fixture article under `seeds` seeds and checks each emitted
/// group against the enumerated universe. Also requires every candidate positive to be
/// reached under some seed. Returns the number of groups checked per task.
pub fn check_fixture_universe(cfg: &SamplerConfig, seeds: u64) -> Result<BTreeMap<Task, usize>, String> {
    use wikiforge::samplers::{article_rng, sample_ati, sample_ltm, sample_rwi, sample_srr};

    let c = super::energy_corpus();
    let ltm = ltm_universe(&c.sag, &c.texts, cfg);
    let mut ltm_positives = BTreeSet::new();
    let mut emitted: BTreeMap<Task, usize> = BTreeMap::new();
    for (raw, _, t) in &c.articles {
        let id = raw.page_id;
        let (srr, srr_pairs) = srr_universe(t, cfg);
        let rwi = rwi_universe(t, cfg);
        let ati = ati_universe(t, cfg);
        let mut seen_pairs = BTreeSet::new();
        let mut seen_rwi = BTreeSet::new();
        for seed in 0..seeds {
            let mut batch = sample_srr(t, cfg, &mut article_rng(seed, id, Task::Srr));
            batch.extend(sample_rwi(t, cfg, &mut article_rng(seed, id, Task::Rwi)));
            batch.extend(sample_ati(t, cfg, &mut article_rng(seed, id, Task::Ati)));
            let mut w = wikiforge::Warnings::new();
            let rng = &mut article_rng(seed, id, Task::Ltm);
            batch.extend(sample_ltm(&c.sag, &c.texts, id, cfg, rng, &mut w).map_err(|e| e.to_string())?);
            for inst in batch {
                check_common(&inst, cfg).map_err(|e| format!("{} in {}: {e}", inst.task, raw.title))?;
                match (&inst.task, &inst.provenance) {
                    (Task::Srr, Provenance::Nodes { node_ids, .. }) => {
                        check_srr(&inst, &srr)?;
                        seen_pairs.insert((t.parent_array()[node_ids[0]].unwrap_or(0), node_ids[0]));
                    }
                    (Task::Rwi, Provenance::Nodes { node_ids, .. }) => {
                        check_rwi(&inst, t, &rwi, cfg)?;
                        seen_rwi.insert(node_ids[0]);
                    }
                    (Task::Ati, _) => check_ati(&inst, &ati)?,
                    (Task::Ltm, Provenance::Neighbors { neighbor_id, .. }) => {
                        check_ltm(&inst, &c.sag, &ltm)?;
                        ltm_positives.insert((id, *neighbor_id));
                    }
                    _ => return Err(format!("{} provenance shape", inst.task)),
                }
                *emitted.entry(inst.task).or_default() += 1;
            }
        }
        if seen_pairs != srr_pairs {
            return Err(format!("srr positives unreachable in {}", raw.title));
        }
        if seen_rwi.iter().ne(rwi.by_positive.keys()) {
            return Err(format!("rwi positives unreachable in {}", raw.title));
        }
    }
    if ltm_positives != c.sag.edges().collect() {
        return Err("ltm positives do not cover the graph edges".into());
    }
    if Task::ALL.iter().any(|t| !emitted.contains_key(t)) {
        return Err(format!("some task emitted nothing: {emitted:?}"));
    }
    Ok(emitted)
}
