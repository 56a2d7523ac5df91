//! Producers of label sequences per tree type.
//!
//! [`OraclePredictor`] replays the encoded gold splits; [`FrequencyPredictor`]
//! is a lexical baseline. Any external tagger can be plugged in through the
//! [`Predictor`] trait or through label files.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::bracket::{encode, BracketTag, LabelSeq};
use crate::conllu::Sentence;
use crate::split::{split_sentence, SplitConfig, SplitResult, TreeKind};

#[derive(Debug, Error, Eq, PartialEq)]
pub enum PredictError {
    #[error("unknown sentence: {0}")]
    UnknownSentence(String),
    #[error("no {0} labels available")]
    MissingTree(TreeKind),
    #[error("cannot train on an empty corpus")]
    EmptyTraining,
}

pub trait Predictor: Send + Sync {
    /// Labels for `s` in the given tree. The result has one entry per token.
    fn predict(&self, s: &Sentence, tree: TreeKind) -> Result<LabelSeq, PredictError>;

    /// Learn from split training sentences. The default does nothing.
    fn train(&mut self, _corpus: &[(Sentence, SplitResult)]) -> Result<(), PredictError> {
        Ok(())
    }
}

fn sentence_key(s: &Sentence) -> (String, Vec<String>) {
    (
        s.sent_id.clone(),
        s.tokens.iter().map(|t| t.form.clone()).collect(),
    )
}

/// Returns the encoded gold split of every sentence it was built from.
pub struct OraclePredictor {
    labels: HashMap<(String, Vec<String>), BTreeMap<TreeKind, LabelSeq>>,
}

impl OraclePredictor {
    pub fn new(gold: &[Sentence], cfg: &SplitConfig) -> Self {
        let labels = gold
            .iter()
            .map(|s| {
                let split = split_sentence(s, cfg);
                let per_tree = TreeKind::ALL
                    .iter()
                    .map(|&k| (k, encode(split.forest(k))))
                    .collect();
                (sentence_key(s), per_tree)
            })
            .collect();
        OraclePredictor { labels }
    }
}

impl Predictor for OraclePredictor {
    fn predict(&self, s: &Sentence, tree: TreeKind) -> Result<LabelSeq, PredictError> {
        let per_tree = self
            .labels
            .get(&sentence_key(s))
            .ok_or_else(|| PredictError::UnknownSentence(s.name().to_owned()))?;
        per_tree
            .get(&tree)
            .cloned()
            .ok_or(PredictError::MissingTree(tree))
    }
}

type Label = (String, String);

#[derive(Default)]
struct Counter(BTreeMap<Label, usize>);

impl Counter {
    fn add(&mut self, label: &Label) {
        *self.0.entry(label.clone()).or_default() += 1;
    }

    /// Most frequent label; ties go to the lexicographically smallest.
    fn best(&self) -> Option<&Label> {
        let mut best: Option<(&Label, usize)> = None;
        for (label, &count) in &self.0 {
            if best.is_none_or(|(_, c)| count > c) {
                best = Some((label, count));
            }
        }
        best.map(|(l, _)| l)
    }
}

#[derive(Default)]
struct TreeModel {
    by_form: HashMap<(String, String), Counter>,
    by_upos: HashMap<String, Counter>,
    global: Counter,
}

/// Predicts, per token, the (bracket, relation) pair seen most often with
/// its (form, UPOS), backing off to UPOS and then to the global mode.
#[derive(Default)]
pub struct FrequencyPredictor {
    models: BTreeMap<TreeKind, TreeModel>,
}

impl FrequencyPredictor {
    /// Split and encode `corpus`, then count.
    pub fn fit(corpus: &[Sentence], cfg: &SplitConfig) -> Result<Self, PredictError> {
        let split: Vec<(Sentence, SplitResult)> = corpus
            .iter()
            .map(|s| (s.clone(), split_sentence(s, cfg)))
            .collect();
        let mut predictor = FrequencyPredictor::default();
        predictor.train(&split)?;
        Ok(predictor)
    }
}

impl Predictor for FrequencyPredictor {
    fn predict(&self, s: &Sentence, tree: TreeKind) -> Result<LabelSeq, PredictError> {
        let model = self
            .models
            .get(&tree)
            .ok_or(PredictError::MissingTree(tree))?;
        let mut labels = LabelSeq::default();
        for t in &s.tokens {
            let label = model
                .by_form
                .get(&(t.form.clone(), t.upos.clone()))
                .and_then(Counter::best)
                .or_else(|| model.by_upos.get(&t.upos).and_then(Counter::best))
                .or_else(|| model.global.best())
                .ok_or(PredictError::EmptyTraining)?;
            labels
                .brackets
                .push(label.0.parse::<BracketTag>().unwrap_or_default());
            labels.relations.push(label.1.clone());
        }
        Ok(labels)
    }

    fn train(&mut self, corpus: &[(Sentence, SplitResult)]) -> Result<(), PredictError> {
        if corpus.iter().all(|(s, _)| s.is_empty()) {
            return Err(PredictError::EmptyTraining);
        }
        for (s, split) in corpus {
            for kind in TreeKind::ALL {
                let model = self.models.entry(kind).or_default();
                let labels = encode(split.forest(kind));
                for (t, (bracket, relation)) in s
                    .tokens
                    .iter()
                    .zip(labels.brackets.iter().zip(&labels.relations))
                {
                    let label = (bracket.to_string(), relation.clone());
                    model
                        .by_form
                        .entry((t.form.clone(), t.upos.clone()))
                        .or_default()
                        .add(&label);
                    model.by_upos.entry(t.upos.clone()).or_default().add(&label);
                    model.global.add(&label);
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conllu::Token;

    fn tiny() -> Sentence {
        let mut a = Token::new(1, "Dogs");
        a.upos = "NOUN".into();
        a.head = 2;
        a.deprel = "nsubj".into();
        a.deps = vec![(2, "nsubj".into())];
        let mut b = Token::new(2, "bark");
        b.upos = "VERB".into();
        b.deprel = "root".into();
        b.deps = vec![(0, "root".into())];
        Sentence::new("tiny", vec![a, b])
    }

    #[test]
    fn oracle_knows_only_its_sentences() {
        let s = tiny();
        let oracle = OraclePredictor::new(std::slice::from_ref(&s), &SplitConfig::default());
        let labels = oracle.predict(&s, TreeKind::Basic).unwrap();
        assert_eq!(labels.bracket_row(), "_ <\\");
        let other = Sentence::new("other", vec![Token::new(1, "x")]);
        assert_eq!(
            oracle.predict(&other, TreeKind::Basic),
            Err(PredictError::UnknownSentence("other".into()))
        );
    }

    #[test]
    fn frequency_backs_off_to_global_mode() {
        let s = tiny();
        let model =
            FrequencyPredictor::fit(std::slice::from_ref(&s), &SplitConfig::default()).unwrap();
        assert_eq!(
            model.predict(&s, TreeKind::Basic).unwrap(),
            OraclePredictor::new(std::slice::from_ref(&s), &SplitConfig::default())
                .predict(&s, TreeKind::Basic)
                .unwrap()
        );

        let mut unseen = Token::new(1, "zzz");
        unseen.upos = "INTJ".into();
        let labels = model
            .predict(&Sentence::new("u", vec![unseen]), TreeKind::Basic)
            .unwrap();
        // Global counts: ("<\", root) once, ("_", nsubj) once; the
        // lexicographically smaller label wins the tie.
        assert_eq!(labels.bracket_row(), "<\\");
        assert_eq!(labels.relations, vec!["root"]);
    }

    #[test]
    fn empty_training_is_an_error() {
        assert!(matches!(
            FrequencyPredictor::fit(&[], &SplitConfig::default()),
            Err(PredictError::EmptyTraining)
        ));
    }
}
