use rand::Rng;

use super::{truncate_words, word_count, CorpusText, NegativeSet, Provenance, PseudoInstance, SamplerConfig, Task};
use crate::error::{Result, Warnings};
use crate::sag::Sag;

/// One group per contentful See Also neighbor of `article_id`: the article's own text is the
/// query, the neighbor's text the positive, and random non-neighbors the negatives.
pub fn sample_ltm<C, R>(
    sag: &Sag,
    corpus: &C,
    article_id: u64,
    cfg: &SamplerConfig,
    rng: &mut R,
    warnings: &mut Warnings,
) -> Result<Vec<PseudoInstance>>
where
    C: CorpusText + ?Sized,
    R: Rng + ?Sized,
{
    let neighbors = sag.out_neighbors(article_id)?;
    if neighbors.is_empty() {
        return Ok(Vec::new());
    }
    let Some(own) = corpus.text(article_id)? else {
        warnings.bump("ltm_missing_text");
        return Ok(Vec::new());
    };
    let query = truncate_words(&own, cfg.ltm_max_doc_words).to_owned();
    if query.is_empty() {
        return Ok(Vec::new());
    }

    let mut out = Vec::new();
    for neighbor in neighbors {
        let Some(text) = corpus.text(neighbor)? else {
            warnings.bump("ltm_missing_text");
            continue;
        };
        if word_count(&text) < cfg.min_content_words {
            continue;
        }
        let positive = truncate_words(&text, cfg.ltm_max_doc_words).to_owned();
        let sampled = sag.sample_non_neighbors(article_id, cfg.ltm_num_negatives, rng)?;
        if sampled.is_empty() {
            // The pool does not depend on the neighbor, so no later neighbor can do better.
            break;
        }
        let mut negatives = NegativeSet::new(&positive);
        for id in sampled {
            match corpus.text(id)? {
                Some(t) => {
                    negatives.offer(truncate_words(&t, cfg.ltm_max_doc_words), id);
                }
                None => warnings.bump("ltm_missing_text"),
            }
        }
        if negatives.len() == 0 {
            continue;
        }
        let (negatives, negative_ids) = negatives.into_parts();
        out.push(PseudoInstance {
            task: Task::Ltm,
            article_id,
            query: query.clone(),
            positive,
            negatives,
            provenance: Provenance::Neighbors { neighbor_id: neighbor, negative_ids },
        });
    }
    Ok(out)
}
