use crate::model::{Chain, Mention, NerSpan};
use crate::npc::names::Honorifics;
use crate::resolver::gazetteer::{Gazetteer, Gender};
use crate::resolver::similarity::name_similarity_with;

/// A named mention: the derived noun-phrase span and the entity span that
/// heads it.
#[derive(Debug, Clone, PartialEq)]
pub struct NameMention {
    pub mention: Mention,
    pub ner: NerSpan,
    /// Surface string of the entity span.
    pub text: String,
}

impl NameMention {
    fn token_count(&self, honorifics: &Honorifics) -> usize {
        let tokens: Vec<&str> = self.text.split_whitespace().collect();
        honorifics.strip(&tokens).len()
    }
}

/// Index of the longest name among `members` (by token count without
/// honorifics; the earliest wins ties).
pub fn longest(names: &[NameMention], members: &[usize], honorifics: &Honorifics) -> usize {
    let mut best = members[0];
    for &k in &members[1..] {
        if names[k].token_count(honorifics) > names[best].token_count(honorifics) {
            best = k;
        }
    }
    best
}

/// Agglomerative name clustering. Starts from one cluster per name (in
/// document order) and merges cluster `j` into an earlier cluster `i` when
/// the longest name of `i` is more similar than `threshold` to any name of
/// `j`, until no pair merges. Clusters come back in first-occurrence order,
/// members in document order.
pub fn cluster_names(names: &[NameMention], threshold: f64, honorifics: &Honorifics) -> Vec<Vec<usize>> {
    let mut clusters: Vec<Vec<usize>> = (0..names.len()).map(|i| vec![i]).collect();
    loop {
        let mut merged_any = false;
        let mut i = 0;
        while i < clusters.len() {
            let mut j = i + 1;
            while j < clusters.len() {
                let anchor = &names[longest(names, &clusters[i], honorifics)].text;
                let similar = clusters[j]
                    .iter()
                    .any(|&k| name_similarity_with(anchor, &names[k].text, honorifics) > threshold);
                if similar {
                    let moved = clusters.remove(j);
                    clusters[i].extend(moved);
                    clusters[i].sort_unstable();
                    merged_any = true;
                    // the anchor may have changed; rescan the later clusters
                    j = i + 1;
                } else {
                    j += 1;
                }
            }
            i += 1;
        }
        if !merged_any {
            break;
        }
    }
    clusters
}

/// Chains over the derived spans, numbered from 0 in cluster order.
pub fn clusters_to_chains(names: &[NameMention], clusters: &[Vec<usize>]) -> Vec<Chain> {
    clusters
        .iter()
        .enumerate()
        .map(|(id, members)| Chain::new(id as u64, members.iter().map(|&k| names[k].mention)))
        .collect()
}

/// Gender of the first token of the cluster's longest name.
pub fn chain_gender(names: &[NameMention], members: &[usize], gazetteer: &Gazetteer, honorifics: &Honorifics) -> Gender {
    if members.is_empty() {
        return Gender::Unisex;
    }
    let name = &names[longest(names, members, honorifics)].text;
    let tokens: Vec<&str> = name.split_whitespace().collect();
    honorifics
        .strip(&tokens)
        .first()
        .map_or(Gender::Unisex, |first| gazetteer.gender(first))
}
