use std::collections::BTreeSet;

use num_rational::Ratio;
use proptest::prelude::*;

use npc_coref::metrics::assignment::max_weight_assignment;
use npc_coref::metrics::{ceaf_similarities, metric_counts, score_document, CeafVariant, Metric};
use npc_coref::npc::{
    chains_not_found, filter_chains, match_entity, npc_f1, Honorifics, NpcEntity,
};
use npc_coref::resolver::name_similarity;
use npc_coref::{emit_conll, parse_conll, Chain, Document, EntityType, Mention, NerSpan, Token};

/// Chains from per-slot labels: slot `i` is the mention `[i, i+1)` and
/// belongs to chain `labels[i]` when that is `Some`.
fn chains_from_labels(labels: &[Option<u8>]) -> Vec<Chain> {
    let ids: BTreeSet<u8> = labels.iter().flatten().copied().collect();
    ids.into_iter()
        .map(|id| {
            Chain::new(
                id as u64,
                labels
                    .iter()
                    .enumerate()
                    .filter(|(_, l)| **l == Some(id))
                    .map(|(i, _)| Mention::new(i, i + 1)),
            )
        })
        .collect()
}

fn partition_pair(max_slots: usize, max_chains: u8) -> impl Strategy<Value = (Vec<Chain>, Vec<Chain>)> {
    (1..=max_slots).prop_flat_map(move |n| {
        let label = proptest::option::weighted(0.8, 0..max_chains);
        (
            proptest::collection::vec(label.clone(), n),
            proptest::collection::vec(label, n),
        )
            .prop_map(|(g, s)| (chains_from_labels(&g), chains_from_labels(&s)))
    })
}

fn ratio_similarity(variant: CeafVariant, k: &Chain, r: &Chain) -> Ratio<i64> {
    let shared = k.mentions.intersection(&r.mentions).count() as i64;
    match variant {
        CeafVariant::Mention => Ratio::from_integer(shared),
        CeafVariant::Entity => Ratio::new(2 * shared, (k.len() + r.len()) as i64),
    }
}

/// Maximum total similarity over all one-to-one alignments, exactly.
fn brute_force(sims: &[Vec<Ratio<i64>>]) -> Ratio<i64> {
    fn go(sims: &[Vec<Ratio<i64>>], row: usize, used: &mut Vec<bool>) -> Ratio<i64> {
        if row == sims.len() {
            return Ratio::from_integer(0);
        }
        // leaving the row unassigned is always allowed
        let mut best = go(sims, row + 1, used);
        for j in 0..used.len() {
            if !used[j] {
                used[j] = true;
                best = best.max(sims[row][j] + go(sims, row + 1, used));
                used[j] = false;
            }
        }
        best
    }
    let cols = sims.first().map_or(0, Vec::len);
    go(sims, 0, &mut vec![false; cols])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn ceaf_assignment_is_optimal((gold, sys) in partition_pair(20, 7)) {
        for variant in [CeafVariant::Mention, CeafVariant::Entity] {
            let exact: Vec<Vec<Ratio<i64>>> = gold
                .iter()
                .map(|k| sys.iter().map(|r| ratio_similarity(variant, k, r)).collect())
                .collect();
            let alignment = max_weight_assignment(&ceaf_similarities(&gold, &sys, variant));
            let chosen: Ratio<i64> = alignment
                .iter()
                .enumerate()
                .filter_map(|(i, j)| j.map(|j| exact[i][j]))
                .sum();
            let used: Vec<usize> = alignment.iter().flatten().copied().collect();
            let distinct: BTreeSet<usize> = used.iter().copied().collect();
            prop_assert_eq!(used.len(), distinct.len());
            prop_assert_eq!(chosen, brute_force(&exact));
        }
    }

    #[test]
    fn scores_are_bounded_and_dual((gold, sys) in partition_pair(20, 6)) {
        let forward = score_document(&gold, &sys);
        let backward = score_document(&sys, &gold);
        for metric in Metric::ALL {
            let (f, b) = (forward.get(metric), backward.get(metric));
            for x in [f.recall, f.precision, f.f1] {
                prop_assert!((0.0..=1.0 + 1e-12).contains(&x));
            }
            prop_assert!((f.recall - b.precision).abs() < 1e-9, "{}", metric.name());
            prop_assert!((f.precision - b.recall).abs() < 1e-9, "{}", metric.name());
            prop_assert_eq!(f.recall_absent, b.precision_absent);
        }
    }

    #[test]
    fn identity_scores_one((gold, _) in partition_pair(20, 6)) {
        prop_assume!(!gold.is_empty());
        let report = score_document(&gold, &gold);
        let all_plural = gold.iter().all(|c| c.len() >= 2);
        for metric in Metric::ALL {
            if metric == Metric::Muc && !all_plural {
                continue;
            }
            let s = report.get(metric);
            prop_assert!((s.recall - 1.0).abs() < 1e-12 && (s.precision - 1.0).abs() < 1e-12, "{}", metric.name());
            prop_assert!((s.f1 - 1.0).abs() < 1e-12);
        }
        prop_assert!(all_plural || report.muc.f1 <= 1.0);
    }

    #[test]
    fn removing_a_correct_mention_never_raises_recall((gold, sys) in partition_pair(16, 5), pick in any::<prop::sample::Index>()) {
        let gold_mentions: BTreeSet<Mention> = gold.iter().flat_map(|c| c.mentions.iter().copied()).collect();
        let correct: Vec<(usize, Mention)> = sys
            .iter()
            .enumerate()
            .flat_map(|(i, c)| c.mentions.iter().filter(|m| gold_mentions.contains(m)).map(move |m| (i, *m)))
            .collect();
        prop_assume!(!correct.is_empty());
        let (chain, mention) = correct[pick.index(correct.len())];
        let mut reduced = sys.clone();
        reduced[chain].mentions.remove(&mention);
        reduced.retain(|c| !c.mentions.is_empty());
        // A gold singleton's self-link counts as resolved when the mention is a
        // singleton on the system side, so for LEA removing a mention can
        // complete one. The property only holds without gold singletons.
        let lea = gold.iter().all(|c| c.len() >= 2);
        for metric in [Metric::BCubed, Metric::CeafM, Metric::Lea] {
            if metric == Metric::Lea && !lea {
                continue;
            }
            let before = metric_counts(metric, &gold, &sys).score().recall;
            let after = metric_counts(metric, &gold, &reduced).score().recall;
            prop_assert!(after <= before + 1e-12, "{}: {before} -> {after}", metric.name());
        }
    }
}

// ---- CoNLL round trip ----

fn random_document() -> impl Strategy<Value = Document> {
    let sentence_lengths = proptest::collection::vec(1usize..8, 1..6);
    sentence_lengths.prop_flat_map(|lengths| {
        let n: usize = lengths.iter().sum();
        let words = proptest::collection::vec("[A-Za-z]{1,6}|[.,]", n);
        // (chain, start, len) proposals; overlapping ones within a chain are dropped
        let spans = proptest::collection::vec((0u64..5, 0..n, 1usize..4), 0..12);
        (Just(lengths), words, spans, 0u32..3)
    })
    .prop_map(|(lengths, words, spans, part)| {
        let mut tokens = Vec::new();
        for (s, len) in lengths.iter().enumerate() {
            for _ in 0..*len {
                let text = words[tokens.len()].clone();
                tokens.push(Token::new(text, s));
            }
        }
        let n = tokens.len();
        let mut chains: Vec<Chain> = Vec::new();
        for (id, start, len) in spans {
            let m = Mention::new(start, (start + len).min(n));
            match chains.iter_mut().find(|c| c.id == id) {
                Some(c) => {
                    if c.mentions.iter().all(|o| !o.overlaps(&m)) {
                        c.mentions.insert(m);
                    }
                }
                None => chains.push(Chain::new(id, [m])),
            }
        }
        chains.sort_by_key(|c| c.id);
        let mut doc = Document::new(format!("doc{part}"), tokens);
        doc.part = part;
        doc.chains = chains;
        doc
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn conll_round_trip(docs in proptest::collection::vec(random_document(), 1..3)) {
        let text = emit_conll(&docs);
        let back = parse_conll(&text).unwrap();
        prop_assert_eq!(back.len(), docs.len());
        for (a, b) in docs.iter().zip(&back) {
            prop_assert_eq!(&a.doc_id, &b.doc_id);
            prop_assert_eq!(a.part, b.part);
            let ta: Vec<(&str, usize)> = a.tokens.iter().map(|t| (t.text.as_str(), t.sentence)).collect();
            let tb: Vec<(&str, usize)> = b.tokens.iter().map(|t| (t.text.as_str(), t.sentence)).collect();
            prop_assert_eq!(ta, tb);
            prop_assert_eq!(&a.chains, &b.chains);
            for c in &b.chains {
                for m in &c.mentions {
                    prop_assert!(m.start < m.end && m.end <= b.len());
                }
            }
        }
        prop_assert_eq!(emit_conll(&back), text);
    }
}

// ---- NPC filtering and metrics ----

/// One token per slot; slots listed in `names` are single-token PER names
/// with the given surface form, all others are "he".
fn npc_document(names: &[(usize, &str)], slots: usize, chains: Vec<Chain>) -> Document {
    let tokens = (0..slots)
        .map(|i| {
            let text = names.iter().find(|(s, _)| *s == i).map_or("he", |(_, t)| t);
            let mut t = Token::new(text, 0);
            t.pos = if text == "he" { "PRP".into() } else { "NNP".into() };
            t
        })
        .collect();
    let mut doc = Document::new("npc", tokens);
    doc.ner = names.iter().map(|&(s, _)| NerSpan::new(EntityType::Per, s, s + 1)).collect();
    doc.chains = chains;
    doc
}

const SURNAMES: [&str; 4] = ["Doe", "Roe", "Smith", "Curzio"];

fn npc_case() -> impl Strategy<Value = (Document, Vec<Chain>)> {
    (4usize..16).prop_flat_map(|n| {
        (
            proptest::collection::vec(proptest::option::weighted(0.3, 0..SURNAMES.len()), n),
            proptest::collection::vec(proptest::option::weighted(0.85, 0u8..4), n),
            proptest::collection::vec(proptest::option::weighted(0.85, 0u8..4), n),
        )
    })
    .prop_map(|(names, g, s)| {
        let names: Vec<(usize, &str)> = names
            .iter()
            .enumerate()
            .filter_map(|(i, k)| k.map(|k| (i, SURNAMES[k])))
            .collect();
        let doc = npc_document(&names, g.len(), chains_from_labels(&g));
        (doc, chains_from_labels(&s))
    })
}

fn entities(doc: &Document, chains: &[Chain]) -> Vec<NpcEntity> {
    filter_chains(doc, chains, &EntityType::Per, &Honorifics::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn filtering_is_a_subset_and_idempotent((doc, sys) in npc_case()) {
        let once = entities(&doc, &sys);
        for e in &once {
            prop_assert!(sys.contains(&e.chain));
            prop_assert!(!e.name_variants.is_empty());
            prop_assert!(e.mention_types.values().any(|t| *t == npc_coref::MentionType::Name));
        }
        let kept: Vec<Chain> = once.iter().map(|e| e.chain.clone()).collect();
        let twice = entities(&doc, &kept);
        prop_assert_eq!(twice.len(), once.len());
    }

    #[test]
    fn npc_metric_invariants((doc, sys) in npc_case()) {
        let gold = entities(&doc, &doc.chains);
        let sys = entities(&doc, &sys);
        prop_assume!(!gold.is_empty());
        let f1 = npc_f1(&gold, &sys).unwrap();
        prop_assert!((0.0..=1.0).contains(&f1));
        if chains_not_found(&gold, &sys) == Some(100.0) {
            prop_assert_eq!(f1, 0.0);
        }
        prop_assert_eq!(npc_f1(&gold, &gold), Some(1.0));
        for g in &gold {
            let m = match_entity(g, &sys);
            // exhaustive scan over name-sharing candidates
            let best = sys
                .iter()
                .filter(|s| s.name_variants.intersects(&g.name_variants))
                .map(|s| {
                    let shared = g.chain.mentions.intersection(&s.chain.mentions).count() as f64;
                    2.0 * shared / (g.chain.len() + s.chain.len()) as f64
                })
                .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a.max(x))));
            match best {
                None => prop_assert!(m.predicted_id.is_none() && m.f1 == 0.0),
                Some(b) => prop_assert!((m.f1 - b).abs() < 1e-12),
            }
            if let Some(id) = m.predicted_id {
                let p = sys.iter().find(|s| s.id() == id).unwrap();
                prop_assert!(p.name_variants.intersects(&g.name_variants));
                // restricting to the gold chain never lowers precision
                let restricted = Chain::new(id, p.chain.mentions.intersection(&g.chain.mentions).copied());
                if !restricted.mentions.is_empty() {
                    let shared = restricted.len() as f64;
                    prop_assert!(shared / restricted.len() as f64 >= m.precision - 1e-12);
                }
            }
        }
    }

    #[test]
    fn similarity_is_symmetric_and_bounded(a in "[A-Z][a-z]{0,5}( [A-Z]\\.| [A-Z][a-z]{1,6}){0,2}", b in "[A-Z][a-z]{0,5}( [A-Z]\\.| [A-Z][a-z]{1,6}){0,2}") {
        let (ab, ba) = (name_similarity(&a, &b), name_similarity(&b, &a));
        prop_assert_eq!(ab, ba);
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert_eq!(name_similarity(&a, &a), 1.0);
    }
}
