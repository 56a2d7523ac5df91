//! Enhanced graph scores and in-degree statistics.
//!
//! * EUAS matches edges on (head, dep);
//! * EULAS on (head, dep, relation before the first `:`);
//! * ELAS on (head, dep, full label).
//!
//! Each is an F1 over edge multisets aggregated across sentences; matches
//! within a class of equal keys are counted up to the smaller class size.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::Serialize;
use thiserror::Error;

use crate::conllu::Sentence;
use crate::graph::{EudEdge, EudGraph};
use crate::label::base_relation;

#[derive(Debug, Error, Eq, PartialEq)]
pub enum ScoreError {
    #[error("gold has {gold} sentences, prediction has {pred}")]
    SentenceCount { gold: usize, pred: usize },
    #[error("sentence {sent_id}: gold has {gold} tokens, prediction has {pred}")]
    TokenCount {
        sent_id: String,
        gold: usize,
        pred: usize,
    },
}

#[derive(Clone, Copy, Debug, Eq, Hash, Ord, PartialEq, PartialOrd, Serialize)]
pub enum Metric {
    #[serde(rename = "EUAS")]
    Euas,
    #[serde(rename = "EULAS")]
    Eulas,
    #[serde(rename = "ELAS")]
    Elas,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Euas, Metric::Eulas, Metric::Elas];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Euas => "EUAS",
            Metric::Eulas => "EULAS",
            Metric::Elas => "ELAS",
        }
    }
}

/// Matched / gold / predicted edge counts for one metric.
#[derive(Clone, Copy, Debug, Default, Eq, PartialEq, Serialize)]
pub struct Counts {
    pub gold: usize,
    pub predicted: usize,
    pub matched: usize,
}

impl Counts {
    pub fn precision(&self) -> f64 {
        ratio(self.matched, self.predicted)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.matched, self.gold)
    }

    pub fn f1(&self) -> f64 {
        ratio(2 * self.matched, self.gold + self.predicted)
    }

    fn add(&mut self, other: Counts) {
        self.gold += other.gold;
        self.predicted += other.predicted;
        self.matched += other.matched;
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        100.0 * num as f64 / den as f64
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MetricScore {
    pub metric: Metric,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub counts: Counts,
}

/// Scores for one corpus.
#[derive(Clone, Debug, Default, Eq, PartialEq)]
pub struct Scores {
    counts: BTreeMap<Metric, Counts>,
}

impl Scores {
    pub fn counts(&self, metric: Metric) -> Counts {
        self.counts.get(&metric).copied().unwrap_or_default()
    }

    pub fn f1(&self, metric: Metric) -> f64 {
        self.counts(metric).f1()
    }

    pub fn merge(&mut self, other: &Scores) {
        for (metric, counts) in &other.counts {
            self.counts.entry(*metric).or_default().add(*counts);
        }
    }

    pub fn rows(&self) -> Vec<MetricScore> {
        Metric::ALL
            .iter()
            .map(|&metric| {
                let counts = self.counts(metric);
                MetricScore {
                    metric,
                    precision: counts.precision(),
                    recall: counts.recall(),
                    f1: counts.f1(),
                    counts,
                }
            })
            .collect()
    }
}

/// Matches between two edge multisets under an equivalence given by `key`:
/// the size of a maximum matching, i.e. the sum over classes of the smaller
/// class size.
fn matches<K: Ord>(gold: &EudGraph, pred: &EudGraph, key: impl Fn(&EudEdge) -> K) -> Counts {
    let mut classes: BTreeMap<K, (usize, usize)> = BTreeMap::new();
    for e in &gold.edges {
        classes.entry(key(e)).or_default().0 += 1;
    }
    for e in &pred.edges {
        classes.entry(key(e)).or_default().1 += 1;
    }
    Counts {
        gold: gold.len(),
        predicted: pred.len(),
        matched: classes.values().map(|&(g, p)| g.min(p)).sum(),
    }
}

/// Score one pair of graphs.
pub fn score_graphs(gold: &EudGraph, pred: &EudGraph) -> Scores {
    let mut counts = BTreeMap::new();
    counts.insert(Metric::Euas, matches(gold, pred, |e| (e.head, e.dep)));
    counts.insert(
        Metric::Eulas,
        matches(gold, pred, |e| {
            (e.head, e.dep, base_relation(&e.label).to_owned())
        }),
    );
    counts.insert(
        Metric::Elas,
        matches(gold, pred, |e| (e.head, e.dep, e.label.clone())),
    );
    Scores { counts }
}

/// Score aligned corpora.
pub fn score(gold: &[Sentence], pred: &[Sentence]) -> Result<Scores, ScoreError> {
    if gold.len() != pred.len() {
        return Err(ScoreError::SentenceCount {
            gold: gold.len(),
            pred: pred.len(),
        });
    }
    let mut total = Scores::default();
    for (g, p) in gold.iter().zip(pred) {
        if g.len() != p.len() {
            return Err(ScoreError::TokenCount {
                sent_id: g.name().to_owned(),
                gold: g.len(),
                pred: p.len(),
            });
        }
        total.merge(&score_graphs(
            &EudGraph::from_sentence(g),
            &EudGraph::from_sentence(p),
        ));
    }
    // Keep all three metrics present even for empty corpora.
    for metric in Metric::ALL {
        total.counts.entry(metric).or_default();
    }
    Ok(total)
}

/// A scored corpus plus pipeline diagnostics.
#[derive(Clone, Debug, Serialize)]
pub struct EvalReport {
    pub scores: Vec<MetricScore>,
    /// Per-treebank breakdown when more than one file was scored.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub treebanks: Vec<TreebankScores>,
    /// Warning counters (repairs, relexicalization failures, lossage).
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub warnings: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TreebankScores {
    pub name: String,
    pub scores: Vec<MetricScore>,
}

impl EvalReport {
    pub fn new(scores: &Scores) -> Self {
        EvalReport {
            scores: scores.rows(),
            treebanks: Vec::new(),
            warnings: BTreeMap::new(),
        }
    }

    /// Micro-averaged report over several named treebanks.
    pub fn from_treebanks(parts: &[(String, Scores)]) -> Self {
        let mut total = Scores::default();
        for (_, s) in parts {
            total.merge(s);
        }
        let mut report = EvalReport::new(&total);
        if parts.len() > 1 {
            report.treebanks = parts
                .iter()
                .map(|(name, s)| TreebankScores {
                    name: name.clone(),
                    scores: s.rows(),
                })
                .collect();
        }
        report
    }

    pub fn f1(&self, metric: Metric) -> f64 {
        self.scores
            .iter()
            .find(|s| s.metric == metric)
            .map_or(0.0, |s| s.f1)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn write_rows(out: &mut String, rows: &[MetricScore]) {
    for row in rows {
        let _ = writeln!(
            out,
            "{:<7}{:>10.2}{:>10.2}{:>10.2}{:>9}{:>9}{:>9}",
            row.metric.name(),
            row.precision,
            row.recall,
            row.f1,
            row.counts.gold,
            row.counts.predicted,
            row.counts.matched
        );
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let header = format!(
            "{:<7}{:>10}{:>10}{:>10}{:>9}{:>9}{:>9}\n",
            "Metric", "P", "R", "F1", "Gold", "Pred", "Match"
        );
        let mut out = header.clone();
        write_rows(&mut out, &self.scores);
        for tb in &self.treebanks {
            let _ = writeln!(out, "\n[{}]", tb.name);
            out.push_str(&header);
            write_rows(&mut out, &tb.scores);
        }
        if !self.warnings.is_empty() {
            out.push('\n');
            for (name, count) in &self.warnings {
                let _ = writeln!(out, "{}: {}", name, count);
            }
        }
        f.write_str(&out)
    }
}

/// In-degree histogram and cumulative edge coverage.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DegreeStats {
    /// In-degree to number of tokens.
    pub histogram: BTreeMap<usize, usize>,
    /// Maximum in-degree k to the percentage of edges kept when every token
    /// keeps at most k incoming edges.
    pub coverage: BTreeMap<usize, f64>,
    pub total_edges: usize,
}

pub fn degree_stats(corpus: &[Sentence]) -> DegreeStats {
    let mut histogram: BTreeMap<usize, usize> = BTreeMap::new();
    for s in corpus {
        for t in &s.tokens {
            *histogram.entry(t.deps.len()).or_default() += 1;
        }
    }

    let total_edges: usize = histogram.iter().map(|(d, c)| d * c).sum();
    let max_degree = histogram.keys().copied().max().unwrap_or(0);
    let coverage = (1..=max_degree)
        .filter(|_| total_edges > 0)
        .map(|k| {
            let kept: usize = histogram.iter().map(|(d, c)| (*d).min(k) * c).sum();
            (k, 100.0 * kept as f64 / total_edges as f64)
        })
        .collect();

    DegreeStats {
        histogram,
        coverage,
        total_edges,
    }
}

impl DegreeStats {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("in_degree,nodes\n");
        for (degree, count) in &self.histogram {
            let _ = writeln!(out, "{},{}", degree, count);
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stats serialize")
    }
}

impl fmt::Display for DegreeStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<10}{:>10}", "In-degree", "Nodes")?;
        for (degree, count) in &self.histogram {
            writeln!(f, "{:<10}{:>10}", degree, count)?;
        }
        writeln!(f)?;
        writeln!(f, "{:<10}{:>10}", "Max heads", "Coverage")?;
        for (k, pct) in &self.coverage {
            writeln!(f, "{:<10}{:>9.2}%", k, pct)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conllu::Token;

    fn sentence(deps: &[&[(usize, &str)]]) -> Sentence {
        let tokens = deps
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let mut t = Token::new(i + 1, "w");
                t.deps = d.iter().map(|&(h, l)| (h, l.to_owned())).collect();
                t.canonicalize_deps();
                t
            })
            .collect();
        Sentence::new("m", tokens)
    }

    #[test]
    fn identical_graphs_score_100() {
        let g = sentence(&[&[(0, "root")], &[(1, "obl:in")]]);
        let s = score(std::slice::from_ref(&g), std::slice::from_ref(&g)).unwrap();
        for m in Metric::ALL {
            assert_eq!(s.f1(m), 100.0);
        }
    }

    #[test]
    fn corrupted_labels_keep_euas() {
        let gold = sentence(&[&[(0, "root")], &[(1, "obl:in")]]);
        let pred = sentence(&[&[(0, "x")], &[(1, "y")]]);
        let s = score(&[gold], &[pred]).unwrap();
        assert_eq!(s.f1(Metric::Euas), 100.0);
        assert_eq!(s.f1(Metric::Elas), 0.0);
        assert_eq!(s.f1(Metric::Eulas), 0.0);
    }

    #[test]
    fn eulas_truncates_at_first_colon() {
        let gold = sentence(&[&[(0, "root")], &[(1, "obl:arg:into")]]);
        let pred = sentence(&[&[(0, "root")], &[(1, "obl:in")]]);
        let s = score(&[gold], &[pred]).unwrap();
        assert_eq!(s.f1(Metric::Eulas), 100.0);
        assert_eq!(s.f1(Metric::Elas), 50.0);
    }

    #[test]
    fn misaligned_corpora_are_errors() {
        let a = sentence(&[&[(0, "root")]]);
        let b = sentence(&[&[(0, "root")], &[(1, "x")]]);
        assert!(matches!(
            score(std::slice::from_ref(&a), &[b]),
            Err(ScoreError::TokenCount { .. })
        ));
        assert!(matches!(
            score(&[a], &[]),
            Err(ScoreError::SentenceCount { .. })
        ));
    }

    #[test]
    fn coverage_arithmetic() {
        let single: Vec<&[(usize, &str)]> = vec![&[(0, "root")]; 1];
        let s = sentence(&single);
        assert_eq!(degree_stats(&[s]).coverage[&1], 100.0);

        // One token with two heads among nine single-headed ones.
        let mut deps: Vec<&[(usize, &str)]> = vec![&[(0, "root")]];
        deps.extend(std::iter::repeat_n(&[(1, "dep")][..], 8));
        deps.push(&[(1, "dep"), (2, "dep")]);
        let stats = degree_stats(&[sentence(&deps)]);
        assert_eq!(stats.total_edges, 11);
        assert!((stats.coverage[&1] - 1000.0 / 11.0).abs() < 1e-9);
        assert_eq!(stats.coverage[&2], 100.0);
        assert_eq!(stats.histogram[&1], 9);
        assert_eq!(stats.histogram[&2], 1);
    }

    #[test]
    fn report_renders() {
        let g = sentence(&[&[(0, "root")]]);
        let report =
            EvalReport::new(&score(std::slice::from_ref(&g), std::slice::from_ref(&g)).unwrap());
        let text = report.to_string();
        assert!(text.contains("ELAS"));
        let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(json["scores"][2]["metric"], "ELAS");
        assert_eq!(json["scores"][2]["f1"], 100.0);
    }
}
