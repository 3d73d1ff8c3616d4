use rand::seq::index;
use rand::Rng;

use super::{truncate_words, word_count, Provenance, PseudoInstance, SamplerConfig, Task};
use crate::wst::{NodeId, Wst, ROOT};

const MAX_ATTEMPTS: usize = 20;

/// At most one group per article. A contentful non-root node is the fixed document, its
/// heading path is the positive query, and each negative query is the article title
/// followed by the subtitles of `depth - 1` random nodes off that path.
///
/// Returns `None` when the article has fewer than `rwi_num_negatives + 2` non-root nodes or
/// when enough distinct negative queries cannot be assembled.
pub fn sample_rwi<R: Rng + ?Sized>(wst: &Wst, cfg: &SamplerConfig, rng: &mut R) -> Option<PseudoInstance> {
    let non_root: Vec<NodeId> = (1..wst.len()).collect();
    if non_root.len() < cfg.rwi_num_negatives + 2 {
        return None;
    }
    let candidates: Vec<NodeId> =
        non_root.iter().copied().filter(|&n| word_count(&wst.nodes()[n].content) >= cfg.min_content_words).collect();
    if candidates.is_empty() {
        return None;
    }
    let chosen = candidates[rng.random_range(0..candidates.len())];
    let path = wst.path(chosen).expect("chosen from the tree");
    let segments = path.len() - 1;
    let pool: Vec<NodeId> = non_root.iter().copied().filter(|n| !path.contains(n)).collect();
    if pool.len() < segments {
        return None;
    }

    let title = wst.nodes()[ROOT].title.as_str();
    let positive_query = {
        let titles = wst.path_titles(chosen).expect("chosen from the tree");
        truncate_words(&titles.join(" "), cfg.max_query_words).to_owned()
    };

    let mut negatives: Vec<String> = Vec::with_capacity(cfg.rwi_num_negatives);
    let mut negative_nodes: Vec<Vec<NodeId>> = Vec::with_capacity(cfg.rwi_num_negatives);
    for _ in 0..cfg.rwi_num_negatives {
        let mut found = false;
        for _ in 0..MAX_ATTEMPTS {
            let nodes: Vec<NodeId> = index::sample(rng, pool.len(), segments).into_iter().map(|i| pool[i]).collect();
            let mut query = String::from(title);
            for &n in &nodes {
                query.push(' ');
                query.push_str(&wst.nodes()[n].title);
            }
            let query = truncate_words(&query, cfg.max_query_words);
            if query != positive_query && !negatives.iter().any(|q| q == query) {
                negatives.push(query.to_owned());
                negative_nodes.push(nodes);
                found = true;
                break;
            }
        }
        if !found {
            return None;
        }
    }

    Some(PseudoInstance {
        task: Task::Rwi,
        article_id: wst.article_id,
        query: positive_query,
        positive: truncate_words(&wst.nodes()[chosen].content, cfg.max_doc_words).to_owned(),
        negatives,
        provenance: Provenance::Nodes { node_ids: vec![chosen], negative_node_ids: Some(negative_nodes) },
    })
}
