use rand::Rng;

use super::{capped_subset, truncate_words, word_count, NegativeSet, Provenance, PseudoInstance, SamplerConfig, Task};
use crate::wst::{NodeId, Wst};

/// One group per internal node with at least two contentful children: a random child is
/// the positive, its heading path the query, and the remaining contentful siblings the
/// negatives.
pub fn sample_srr<R: Rng + ?Sized>(wst: &Wst, cfg: &SamplerConfig, rng: &mut R) -> Vec<PseudoInstance> {
    let mut out = Vec::new();
    for parent in wst.nodes().iter().filter(|n| !n.children.is_empty()) {
        let qualifying: Vec<NodeId> = parent
            .children
            .iter()
            .copied()
            .filter(|&c| word_count(&wst.nodes()[c].content) >= cfg.min_content_words)
            .collect();
        if qualifying.len() < 2 {
            continue;
        }
        let pick = rng.random_range(0..qualifying.len());
        let chosen = qualifying[pick];
        let siblings: Vec<NodeId> = qualifying.iter().copied().filter(|&c| c != chosen).collect();
        let siblings = capped_subset(&siblings, cfg.srr_max_negatives, rng);

        let titles = wst.path_titles(chosen).expect("child of an existing node");
        let query = truncate_words(&titles.join(" "), cfg.max_query_words).to_owned();
        let positive = truncate_words(&wst.nodes()[chosen].content, cfg.max_doc_words).to_owned();
        let mut negatives = NegativeSet::new(&positive);
        for s in siblings {
            negatives.offer(truncate_words(&wst.nodes()[s].content, cfg.max_doc_words), s);
        }
        if negatives.len() == 0 {
            continue;
        }
        let (negatives, ids) = negatives.into_parts();
        let mut node_ids = vec![chosen];
        node_ids.extend(ids);
        out.push(PseudoInstance {
            task: Task::Srr,
            article_id: wst.article_id,
            query,
            positive,
            negatives,
            provenance: Provenance::Nodes { node_ids, negative_node_ids: None },
        });
    }
    out
}
