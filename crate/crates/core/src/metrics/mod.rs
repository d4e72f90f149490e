//! Standard coreference metrics: MUC, B³, CEAFm, CEAFe and LEA.
//!
//! Every metric is computed as four sums (recall numerator/denominator,
//! precision numerator/denominator) so that corpus scores can be
//! micro-averaged by adding the sums of each document before dividing.
//! Mentions present on only one side contribute zero; no singletons are
//! synthesized for them.

pub mod assignment;

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::model::{Chain, Mention};
use assignment::max_weight_assignment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Metric {
    Muc,
    BCubed,
    CeafM,
    CeafE,
    Lea,
}

impl Metric {
    pub const ALL: [Metric; 5] = [Metric::Muc, Metric::BCubed, Metric::CeafM, Metric::CeafE, Metric::Lea];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Muc => "MUC",
            Metric::BCubed => "B3",
            Metric::CeafM => "CEAFm",
            Metric::CeafE => "CEAFe",
            Metric::Lea => "LEA",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Recall/precision sums for one metric.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Counts {
    pub recall_num: f64,
    pub recall_den: f64,
    pub precision_num: f64,
    pub precision_den: f64,
}

impl Counts {
    pub fn add(&mut self, other: &Counts) {
        self.recall_num += other.recall_num;
        self.recall_den += other.recall_den;
        self.precision_num += other.precision_num;
        self.precision_den += other.precision_den;
    }

    /// The same sums with gold and system roles exchanged.
    pub fn swapped(self) -> Counts {
        Counts {
            recall_num: self.precision_num,
            recall_den: self.precision_den,
            precision_num: self.recall_num,
            precision_den: self.recall_den,
        }
    }

    pub fn score(&self) -> MetricScore {
        MetricScore::from_ratios(
            (self.recall_den > 0.0).then(|| self.recall_num / self.recall_den),
            (self.precision_den > 0.0).then(|| self.precision_num / self.precision_den),
        )
    }
}

/// A 0/0 component is reported as 0.0 with its `*_absent` flag set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricScore {
    pub recall: f64,
    pub precision: f64,
    pub f1: f64,
    pub recall_absent: bool,
    pub precision_absent: bool,
}

impl MetricScore {
    pub fn from_ratios(recall: Option<f64>, precision: Option<f64>) -> Self {
        let (r, p) = (recall.unwrap_or(0.0), precision.unwrap_or(0.0));
        let f1 = if r + p > 0.0 { 2.0 * r * p / (r + p) } else { 0.0 };
        MetricScore {
            recall: r,
            precision: p,
            f1,
            recall_absent: recall.is_none(),
            precision_absent: precision.is_none(),
        }
    }
}

/// Mention → index of the chain containing it.
fn index(chains: &[Chain]) -> HashMap<Mention, usize> {
    let mut map = HashMap::new();
    for (i, chain) in chains.iter().enumerate() {
        for &m in &chain.mentions {
            map.entry(m).or_insert(i);
        }
    }
    map
}

/// Sizes of the intersections of `key` with each chain of the other side,
/// plus the number of `key` mentions found in no chain.
fn partition(key: &Chain, other: &HashMap<Mention, usize>) -> (HashMap<usize, usize>, usize) {
    let mut parts = HashMap::new();
    let mut twinless = 0;
    for m in &key.mentions {
        match other.get(m) {
            Some(&j) => *parts.entry(j).or_insert(0) += 1,
            None => twinless += 1,
        }
    }
    (parts, twinless)
}

fn one_sided(keys: &[Chain], responses: &[Chain], f: impl Fn(&Chain, &HashMap<usize, usize>, usize, &[Chain]) -> (f64, f64)) -> (f64, f64) {
    let resp_index = index(responses);
    keys.iter().fold((0.0, 0.0), |(num, den), k| {
        let (parts, twinless) = partition(k, &resp_index);
        let (n, d) = f(k, &parts, twinless, responses);
        (num + n, den + d)
    })
}

fn both_sides(gold: &[Chain], sys: &[Chain], f: impl Fn(&Chain, &HashMap<usize, usize>, usize, &[Chain]) -> (f64, f64) + Copy) -> Counts {
    let (recall_num, recall_den) = one_sided(gold, sys, f);
    let (precision_num, precision_den) = one_sided(sys, gold, f);
    Counts {
        recall_num,
        recall_den,
        precision_num,
        precision_den,
    }
}

pub fn muc_counts(gold: &[Chain], sys: &[Chain]) -> Counts {
    both_sides(gold, sys, |k, parts, twinless, _| {
        let size = k.len() as f64;
        let pieces = (parts.len() + twinless) as f64;
        (size - pieces, size - 1.0)
    })
}

pub fn bcubed_counts(gold: &[Chain], sys: &[Chain]) -> Counts {
    both_sides(gold, sys, |k, parts, _, _| {
        let size = k.len() as f64;
        let num: f64 = parts.values().map(|&c| (c * c) as f64).sum::<f64>() / size;
        (num, size)
    })
}

pub fn lea_counts(gold: &[Chain], sys: &[Chain]) -> Counts {
    both_sides(gold, sys, |k, parts, _, responses| {
        let size = k.len();
        let resolved = if size == 1 {
            let m = k.mentions.iter().next().expect("non-empty chain");
            let self_link = responses.iter().any(|r| r.len() == 1 && r.contains(m));
            if self_link {
                1.0
            } else {
                0.0
            }
        } else {
            let links = (size * (size - 1) / 2) as f64;
            parts.values().map(|&c| (c * c.saturating_sub(1) / 2) as f64).sum::<f64>() / links
        };
        (size as f64 * resolved, size as f64)
    })
}

/// Which similarity CEAF aligns on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CeafVariant {
    /// φ3 = |K ∩ R|
    Mention,
    /// φ4 = 2|K ∩ R| / (|K| + |R|)
    Entity,
}

fn ceaf_similarity(variant: CeafVariant, k: &Chain, r: &Chain, shared: usize) -> f64 {
    match variant {
        CeafVariant::Mention => shared as f64,
        CeafVariant::Entity => 2.0 * shared as f64 / (k.len() + r.len()) as f64,
    }
}

/// Similarity matrix (gold rows × sys columns).
pub fn ceaf_similarities(gold: &[Chain], sys: &[Chain], variant: CeafVariant) -> Vec<Vec<f64>> {
    let sys_index = index(sys);
    gold.iter()
        .map(|k| {
            let (parts, _) = partition(k, &sys_index);
            sys.iter()
                .enumerate()
                .map(|(j, r)| ceaf_similarity(variant, k, r, parts.get(&j).copied().unwrap_or(0)))
                .collect()
        })
        .collect()
}

/// Optimal gold→sys alignment for CEAF.
pub fn ceaf_alignment(gold: &[Chain], sys: &[Chain], variant: CeafVariant) -> Vec<Option<usize>> {
    max_weight_assignment(&ceaf_similarities(gold, sys, variant))
}

pub fn ceaf_counts(gold: &[Chain], sys: &[Chain], variant: CeafVariant) -> Counts {
    let sims = ceaf_similarities(gold, sys, variant);
    let alignment = max_weight_assignment(&sims);
    let total = assignment::assignment_total(&sims, &alignment);
    let self_total = |chains: &[Chain]| -> f64 {
        match variant {
            CeafVariant::Mention => chains.iter().map(|c| c.len() as f64).sum(),
            CeafVariant::Entity => chains.len() as f64,
        }
    };
    Counts {
        recall_num: total,
        recall_den: self_total(gold),
        precision_num: total,
        precision_den: self_total(sys),
    }
}

pub fn metric_counts(metric: Metric, gold: &[Chain], sys: &[Chain]) -> Counts {
    match metric {
        Metric::Muc => muc_counts(gold, sys),
        Metric::BCubed => bcubed_counts(gold, sys),
        Metric::CeafM => ceaf_counts(gold, sys, CeafVariant::Mention),
        Metric::CeafE => ceaf_counts(gold, sys, CeafVariant::Entity),
        Metric::Lea => lea_counts(gold, sys),
    }
}

pub fn score_muc(gold: &[Chain], sys: &[Chain]) -> MetricScore {
    muc_counts(gold, sys).score()
}

pub fn score_bcubed(gold: &[Chain], sys: &[Chain]) -> MetricScore {
    bcubed_counts(gold, sys).score()
}

pub fn score_ceaf(gold: &[Chain], sys: &[Chain], variant: CeafVariant) -> MetricScore {
    ceaf_counts(gold, sys, variant).score()
}

pub fn score_lea(gold: &[Chain], sys: &[Chain]) -> MetricScore {
    lea_counts(gold, sys).score()
}

/// All five metrics plus the CoNLL average.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScoreReport {
    pub muc: MetricScore,
    pub bcubed: MetricScore,
    pub ceafm: MetricScore,
    pub ceafe: MetricScore,
    pub lea: MetricScore,
    pub conll_avg: f64,
}

impl ScoreReport {
    pub fn get(&self, metric: Metric) -> &MetricScore {
        match metric {
            Metric::Muc => &self.muc,
            Metric::BCubed => &self.bcubed,
            Metric::CeafM => &self.ceafm,
            Metric::CeafE => &self.ceafe,
            Metric::Lea => &self.lea,
        }
    }

    pub fn to_table(&self) -> String {
        let mut out = format!("{:<8}{:>9}{:>9}{:>9}\n", "metric", "R", "P", "F1");
        for metric in Metric::ALL {
            let s = self.get(metric);
            let flag = match (s.recall_absent, s.precision_absent) {
                (false, false) => "",
                (true, false) => "  (recall absent)",
                (false, true) => "  (precision absent)",
                (true, true) => "  (absent)",
            };
            out.push_str(&format!(
                "{:<8}{:>9.4}{:>9.4}{:>9.4}{flag}\n",
                metric.name(),
                s.recall,
                s.precision,
                s.f1
            ));
        }
        out.push_str(&format!("{:<8}{:>27.4}\n", "CoNLL", self.conll_avg));
        out
    }
}

/// Mean of the MUC, B³ and CEAFe F1 scores.
pub fn conll_average(report: &ScoreReport) -> f64 {
    (report.muc.f1 + report.bcubed.f1 + report.ceafe.f1) / 3.0
}

/// Accumulates per-document sums into corpus (micro-averaged) scores.
#[derive(Debug, Clone, Default)]
pub struct Scorer {
    counts: [Counts; 5],
    documents: usize,
}

impl Scorer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_document(&mut self, gold: &[Chain], sys: &[Chain]) -> ScoreReport {
        let mut doc = Scorer::new();
        for (i, metric) in Metric::ALL.into_iter().enumerate() {
            doc.counts[i] = metric_counts(metric, gold, sys);
            self.counts[i].add(&doc.counts[i]);
        }
        self.documents += 1;
        doc.documents = 1;
        doc.report()
    }

    pub fn documents(&self) -> usize {
        self.documents
    }

    pub fn counts(&self, metric: Metric) -> Counts {
        self.counts[metric as usize]
    }

    pub fn report(&self) -> ScoreReport {
        let mut report = ScoreReport {
            muc: self.counts[0].score(),
            bcubed: self.counts[1].score(),
            ceafm: self.counts[2].score(),
            ceafe: self.counts[3].score(),
            lea: self.counts[4].score(),
            conll_avg: 0.0,
        };
        report.conll_avg = conll_average(&report);
        report
    }
}

/// Scores one document.
pub fn score_document(gold: &[Chain], sys: &[Chain]) -> ScoreReport {
    Scorer::new().add_document(gold, sys)
}
