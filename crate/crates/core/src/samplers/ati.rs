use rand::Rng;

use super::{capped_subset, truncate_words, word_count, NegativeSet, Provenance, PseudoInstance, SamplerConfig, Task};
use crate::wst::{NodeId, Wst, ROOT};

/// Title as query, lead text as positive, and the full text of each contentful top-level
/// section as a negative.
pub fn sample_ati<R: Rng + ?Sized>(wst: &Wst, cfg: &SamplerConfig, rng: &mut R) -> Option<PseudoInstance> {
    let root = wst.root();
    if word_count(&root.content) < cfg.min_content_words {
        return None;
    }
    let sections: Vec<(NodeId, String)> = root
        .children
        .iter()
        .map(|&c| (c, wst.subtree_text(c).expect("child of root")))
        .filter(|(_, text)| word_count(text) >= cfg.min_content_words)
        .collect();
    if sections.is_empty() {
        return None;
    }
    let kept = capped_subset(&(0..sections.len()).collect::<Vec<_>>(), cfg.ati_max_negatives, rng);

    let positive = truncate_words(&root.content, cfg.max_doc_words).to_owned();
    let mut negatives = NegativeSet::new(&positive);
    for i in kept {
        let (id, text) = &sections[i];
        negatives.offer(truncate_words(text, cfg.max_doc_words), *id);
    }
    if negatives.len() == 0 {
        return None;
    }
    let (negatives, ids) = negatives.into_parts();
    let mut node_ids = vec![ROOT];
    node_ids.extend(ids);
    Some(PseudoInstance {
        task: Task::Ati,
        article_id: wst.article_id,
        query: truncate_words(&root.title, cfg.max_query_words).to_owned(),
        positive,
        negatives,
        provenance: Provenance::Nodes { node_ids, negative_node_ids: None },
    })
}
