//! File-level workflows behind the command line tool.
//!
//! Every command works sentence by sentence in parallel and writes results
//! in input order, so output depends only on the input and the
//! configuration.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use log::{debug, info, warn};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bracket::{
    decode, encode_with_lossage, read_labels, write_labels, LabelFileError, LabeledSentence,
};
use crate::collate::{apply_to_sentence, collate, CollationPolicy, Forests};
use crate::conllu::{read_conllu, write_conllu, ConlluError, EmptyNodePolicy, Sentence, Token};
use crate::graph::{DepForest, ForestError};
use crate::label::LabelWarning;
use crate::metrics::{degree_stats, score, DegreeStats, EvalReport, ScoreError, Scores};
use crate::predictor::{FrequencyPredictor, PredictError, Predictor};
use crate::split::{split_sentence, Mode, SplitConfig, SplitResult, TreeKind};

pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{}: {source}", path.display())]
    Conllu { path: PathBuf, source: ConlluError },
    #[error("{}: {source}", path.display())]
    Labels {
        path: PathBuf,
        source: LabelFileError,
    },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: sentence {sent_id}: {source}", path.display())]
    Forest {
        path: PathBuf,
        sent_id: String,
        source: ForestError,
    },
    #[error("{0}")]
    Score(#[from] ScoreError),
    #[error("{0}")]
    Predict(#[from] PredictError),
    #[error("{0}")]
    Mismatch(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, PipelineError>;

/// Settings shared by all commands.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub split: SplitConfig,
    pub policy: CollationPolicy,
    pub empty_nodes: EmptyNodePolicy,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            split: SplitConfig::default(),
            policy: CollationPolicy::default(),
            empty_nodes: EmptyNodePolicy::default(),
            seed: DEFAULT_SEED,
        }
    }
}

impl RunConfig {
    /// Fixed mode with extra roots dropped: the configuration under which
    /// a gold round trip is lossless.
    pub fn fixed() -> Self {
        RunConfig {
            split: SplitConfig::with_mode(Mode::Fixed),
            policy: CollationPolicy {
                drop_extra_roots: true,
                ..CollationPolicy::default()
            },
            ..RunConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.policy.validate().map_err(PipelineError::Config)?;
        if self.split.cle_high_score <= self.split.cle_low_score {
            return Err(PipelineError::Config(
                "high CLE score must exceed the low score".into(),
            ));
        }
        Ok(())
    }

    fn trees(&self) -> &[TreeKind] {
        &self.policy.tree_order
    }
}

/// Named warning counters. They never affect the exit status.
#[derive(Clone, Debug, Default, Eq, PartialEq, Serialize)]
pub struct Diagnostics(pub BTreeMap<String, usize>);

impl Diagnostics {
    pub fn add(&mut self, key: impl Into<String>, n: usize) {
        if n > 0 {
            *self.0.entry(key.into()).or_default() += n;
        }
    }

    pub fn merge(&mut self, other: &Diagnostics) {
        for (k, v) in &other.0 {
            self.add(k.clone(), *v);
        }
    }

    pub fn get(&self, key: &str) -> usize {
        self.0.get(key).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn label_warnings(&mut self, warnings: &[LabelWarning]) {
        for w in warnings {
            let key = match w {
                LabelWarning::AmbiguousMarker { .. } => "label.ambiguous_marker",
                LabelWarning::OffsetOutOfRange { .. } => "label.offset_out_of_range",
            };
            self.add(key, 1);
        }
    }

    fn split(&mut self, split: &SplitResult) {
        for r in &split.repairs {
            self.add(format!("split.{}.{}", r.tree, r.action), 1);
        }
        self.label_warnings(&split.warnings);
    }

    fn log(&self) {
        for (k, v) in &self.0 {
            warn!("{}: {}", k, v);
        }
    }
}

fn merged<'a>(items: impl Iterator<Item = &'a Diagnostics>) -> Diagnostics {
    let mut all = Diagnostics::default();
    for d in items {
        all.merge(d);
    }
    all
}

pub fn read_corpus(path: &Path, policy: EmptyNodePolicy) -> Result<Vec<Sentence>> {
    let file = File::open(path).map_err(|source| PipelineError::Io {
        path: path.to_owned(),
        source,
    })?;
    let corpus =
        read_conllu(BufReader::new(file), policy).map_err(|source| PipelineError::Conllu {
            path: path.to_owned(),
            source,
        })?;
    debug!("{}: {} sentences", path.display(), corpus.len());
    Ok(corpus)
}

fn write_file(path: &Path, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    let io_err = |source| PipelineError::Io {
        path: path.to_owned(),
        source,
    };
    let mut out = BufWriter::new(File::create(path).map_err(io_err)?);
    f(&mut out).map_err(io_err)?;
    out.flush().map_err(io_err)
}

fn forests_of(path: &Path, corpus: &[Sentence]) -> Result<Vec<DepForest>> {
    corpus
        .iter()
        .map(|s| {
            DepForest::from_basic(s).map_err(|source| PipelineError::Forest {
                path: path.to_owned(),
                sent_id: s.name().to_owned(),
                source,
            })
        })
        .collect()
}

fn check_aligned(what: &str, a: &[Sentence], b: &[Sentence]) -> Result<()> {
    if a.len() != b.len() {
        return Err(PipelineError::Mismatch(format!(
            "{}: {} sentences against {}",
            what,
            a.len(),
            b.len()
        )));
    }
    for (x, y) in a.iter().zip(b) {
        if x.len() != y.len() {
            return Err(PipelineError::Mismatch(format!(
                "{}: sentence {} has {} tokens against {}",
                what,
                x.name(),
                x.len(),
                y.len()
            )));
        }
    }
    Ok(())
}

pub fn split_corpus(corpus: &[Sentence], cfg: &SplitConfig) -> Vec<SplitResult> {
    corpus.par_iter().map(|s| split_sentence(s, cfg)).collect()
}

/// Split a corpus into one CoNLL-U file per tree plus `repairs.tsv`.
/// Returns the paths written, trees first.
pub fn cmd_split(
    input: &Path,
    outdir: &Path,
    cfg: &RunConfig,
) -> Result<(Vec<PathBuf>, Diagnostics)> {
    cfg.validate()?;
    let corpus = read_corpus(input, cfg.empty_nodes)?;
    fs::create_dir_all(outdir).map_err(|source| PipelineError::Io {
        path: outdir.to_owned(),
        source,
    })?;
    let splits = split_corpus(&corpus, &cfg.split);

    let mut written = Vec::new();
    for &kind in cfg.trees() {
        let trees: Vec<Sentence> = corpus
            .par_iter()
            .zip(&splits)
            .map(|(s, r)| r.forest(kind).to_sentence(s))
            .collect();
        let path = outdir.join(format!("{}.conllu", kind));
        write_file(&path, |out| write_conllu(&trees, out))?;
        written.push(path);
    }

    let log = outdir.join("repairs.tsv");
    write_file(&log, |out| {
        writeln!(out, "sent_id\ttree\ttoken\taction")?;
        for (s, r) in corpus.iter().zip(&splits) {
            for repair in r.repairs.iter().filter(|r| cfg.trees().contains(&r.tree)) {
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}",
                    s.name(),
                    repair.tree,
                    repair.token,
                    repair.action
                )?;
            }
        }
        Ok(())
    })?;
    written.push(log);

    let mut diag = Diagnostics::default();
    splits.iter().for_each(|r| diag.split(r));
    diag.log();
    info!("split {} sentences into {}", corpus.len(), outdir.display());
    Ok((written, diag))
}

/// Encode the HEAD/DEPREL columns of a tree file as labels.
pub fn encode_corpus(
    trees: &[Sentence],
    path: &Path,
) -> Result<(Vec<LabeledSentence>, Diagnostics)> {
    let forests = forests_of(path, trees)?;
    let encoded: Vec<_> = forests.par_iter().map(encode_with_lossage).collect();
    let mut diag = Diagnostics::default();
    let labeled = trees
        .iter()
        .zip(encoded)
        .map(|(s, e)| {
            if !e.dropped.is_empty() {
                warn!(
                    "{}: arcs of tokens {:?} cannot be encoded",
                    s.name(),
                    e.dropped
                );
            }
            diag.add("encode.lossage", e.dropped.len());
            LabeledSentence {
                forms: s.tokens.iter().map(|t| t.form.clone()).collect(),
                labels: e.labels,
            }
        })
        .collect();
    Ok((labeled, diag))
}

pub fn cmd_encode(input: &Path, output: &Path, cfg: &RunConfig) -> Result<Diagnostics> {
    let trees = read_corpus(input, cfg.empty_nodes)?;
    let (labeled, diag) = encode_corpus(&trees, input)?;
    write_file(output, |out| write_labels(&labeled, out))?;
    Ok(diag)
}

/// Decode a label file into a tree file. With a reference corpus the other
/// columns are copied from it; otherwise only forms are filled in.
pub fn cmd_decode(
    input: &Path,
    reference: Option<&Path>,
    output: &Path,
    cfg: &RunConfig,
) -> Result<Diagnostics> {
    let file = File::open(input).map_err(|source| PipelineError::Io {
        path: input.to_owned(),
        source,
    })?;
    let labeled = read_labels(BufReader::new(file)).map_err(|source| PipelineError::Labels {
        path: input.to_owned(),
        source,
    })?;
    let skeleton: Vec<Sentence> = match reference {
        Some(path) => read_corpus(path, cfg.empty_nodes)?,
        None => labeled
            .iter()
            .enumerate()
            .map(|(i, l)| {
                let tokens = l
                    .forms
                    .iter()
                    .enumerate()
                    .map(|(j, f)| Token::new(j + 1, f.clone()))
                    .collect();
                Sentence::new((i + 1).to_string(), tokens)
            })
            .collect(),
    };
    if skeleton.len() != labeled.len()
        || skeleton
            .iter()
            .zip(&labeled)
            .any(|(s, l)| s.len() != l.labels.len())
    {
        return Err(PipelineError::Mismatch(format!(
            "{} does not align with its reference",
            input.display()
        )));
    }

    let decoded: Vec<_> = labeled.par_iter().map(|l| decode(&l.labels)).collect();
    let mut diag = Diagnostics::default();
    let trees: Vec<Sentence> = skeleton
        .iter()
        .zip(&decoded)
        .map(|(s, d)| {
            diag.add("decode.repairs", d.repairs);
            d.forest.to_sentence(s)
        })
        .collect();
    write_file(output, |out| write_conllu(&trees, out))?;
    diag.log();
    Ok(diag)
}

/// Collate forests into the DEPS column of `original`.
pub fn collate_corpus(
    original: &[Sentence],
    forests: &BTreeMap<TreeKind, Vec<DepForest>>,
    policy: &CollationPolicy,
) -> (Vec<Sentence>, Diagnostics) {
    let results: Vec<(Sentence, Vec<LabelWarning>)> = original
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let per_sentence: Forests = forests.iter().map(|(k, f)| (*k, &f[i])).collect();
            let c = collate(&per_sentence, s, policy);
            (apply_to_sentence(&c.graph, s), c.warnings)
        })
        .collect();
    let mut diag = Diagnostics::default();
    let sentences = results
        .into_iter()
        .map(|(s, w)| {
            diag.label_warnings(&w);
            s
        })
        .collect();
    (sentences, diag)
}

pub fn cmd_collate(
    trees: &[(TreeKind, PathBuf)],
    original: &Path,
    output: &Path,
    cfg: &RunConfig,
) -> Result<Diagnostics> {
    cfg.validate()?;
    let corpus = read_corpus(original, cfg.empty_nodes)?;
    let mut forests = BTreeMap::new();
    for (kind, path) in trees {
        let tree_corpus = read_corpus(path, cfg.empty_nodes)?;
        check_aligned(&path.display().to_string(), &tree_corpus, &corpus)?;
        forests.insert(*kind, forests_of(path, &tree_corpus)?);
    }
    let (collated, diag) = collate_corpus(&corpus, &forests, &cfg.policy);
    write_file(output, |out| write_conllu(&collated, out))?;
    diag.log();
    Ok(diag)
}

fn treebank_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Score aligned gold/prediction file pairs, with a per-file breakdown
/// when there is more than one pair.
pub fn cmd_eval(pairs: &[(PathBuf, PathBuf)], cfg: &RunConfig) -> Result<EvalReport> {
    let mut parts = Vec::new();
    for (gold, pred) in pairs {
        let g = read_corpus(gold, cfg.empty_nodes)?;
        let p = read_corpus(pred, cfg.empty_nodes)?;
        parts.push((treebank_name(gold), score(&g, &p)?));
    }
    Ok(EvalReport::from_treebanks(&parts))
}

/// Predict, decode and collate every sentence of `corpus`.
pub fn predict_corpus(
    corpus: &[Sentence],
    predictor: &dyn Predictor,
    cfg: &RunConfig,
) -> Result<(Vec<Sentence>, Diagnostics)> {
    cfg.validate()?;
    type Predicted =
        std::result::Result<(BTreeMap<TreeKind, DepForest>, Diagnostics), PredictError>;
    let per_sentence: Vec<Predicted> = corpus
        .par_iter()
        .map(|s| {
            let mut diag = Diagnostics::default();
            let mut forests = BTreeMap::new();
            for &kind in cfg.trees() {
                let labels = predictor.predict(s, kind)?;
                let decoded = decode(&labels);
                diag.add("decode.repairs", decoded.repairs);
                forests.insert(kind, decoded.forest);
            }
            Ok((forests, diag))
        })
        .collect();

    let mut forests: BTreeMap<TreeKind, Vec<DepForest>> = BTreeMap::new();
    let mut diag = Diagnostics::default();
    for result in per_sentence {
        let (f, d) = result?;
        diag.merge(&d);
        for (k, forest) in f {
            forests.entry(k).or_default().push(forest);
        }
    }
    let (pred, collate_diag) = collate_corpus(corpus, &forests, &cfg.policy);
    diag.merge(&collate_diag);
    Ok((pred, diag))
}

/// Split, encode, decode, collate: gold labels in, predicted graph out.
pub fn roundtrip_corpus(
    corpus: &[Sentence],
    cfg: &RunConfig,
) -> Result<(Vec<Sentence>, Diagnostics)> {
    cfg.validate()?;
    let trees = cfg.trees();
    let per_sentence: Vec<(Sentence, Diagnostics)> = corpus
        .par_iter()
        .map(|s| {
            let mut diag = Diagnostics::default();
            let split = split_sentence(s, &cfg.split);
            diag.split(&split);
            let decoded: Vec<(TreeKind, DepForest)> = trees
                .iter()
                .map(|&kind| {
                    let e = encode_with_lossage(split.forest(kind));
                    diag.add("encode.lossage", e.dropped.len());
                    let d = decode(&e.labels);
                    diag.add("decode.repairs", d.repairs);
                    (kind, d.forest)
                })
                .collect();
            let forests: Forests = decoded.iter().map(|(k, f)| (*k, f)).collect();
            let c = collate(&forests, s, &cfg.policy);
            diag.label_warnings(&c.warnings);
            (apply_to_sentence(&c.graph, s), diag)
        })
        .collect();
    let diag = merged(per_sentence.iter().map(|(_, d)| d));
    Ok((per_sentence.into_iter().map(|(s, _)| s).collect(), diag))
}

fn report(parts: Vec<(String, Scores)>, diag: &Diagnostics) -> EvalReport {
    let mut report = EvalReport::from_treebanks(&parts);
    report.warnings = diag.0.clone();
    report
}

/// Gold round trip over one or more treebanks.
pub fn cmd_roundtrip(inputs: &[PathBuf], cfg: &RunConfig) -> Result<EvalReport> {
    let mut parts = Vec::new();
    let mut diag = Diagnostics::default();
    for path in inputs {
        let gold = read_corpus(path, cfg.empty_nodes)?;
        let (pred, d) = roundtrip_corpus(&gold, cfg)?;
        diag.merge(&d);
        parts.push((treebank_name(path), score(&gold, &pred)?));
    }
    diag.log();
    Ok(report(parts, &diag))
}

/// Run `predictor` over `corpus` and score the result against it.
pub fn run_pipeline(
    corpus: &[Sentence],
    predictor: &dyn Predictor,
    cfg: &RunConfig,
) -> Result<(Vec<Sentence>, EvalReport)> {
    let (pred, diag) = predict_corpus(corpus, predictor, cfg)?;
    let scores = score(corpus, &pred)?;
    Ok((pred, report(vec![("corpus".into(), scores)], &diag)))
}

/// Train the frequency baseline on `train`, predict `test`, write the
/// prediction to `output` when given, and score it.
pub fn cmd_baseline(
    train: &Path,
    test: &Path,
    output: Option<&Path>,
    cfg: &RunConfig,
) -> Result<EvalReport> {
    let train_corpus = read_corpus(train, cfg.empty_nodes)?;
    let test_corpus = read_corpus(test, cfg.empty_nodes)?;
    let model = FrequencyPredictor::fit(&train_corpus, &cfg.split)?;
    let (pred, report) = run_pipeline(&test_corpus, &model, cfg)?;
    if let Some(path) = output {
        write_file(path, |out| write_conllu(&pred, out))?;
    }
    Ok(report)
}

pub fn cmd_stats(inputs: &[PathBuf], cfg: &RunConfig) -> Result<DegreeStats> {
    let mut corpus = Vec::new();
    for path in inputs {
        corpus.extend(read_corpus(path, cfg.empty_nodes)?);
    }
    Ok(degree_stats(&corpus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::Metric;
    use crate::predictor::OraclePredictor;
    use crate::synthetic::curated_suite;

    #[test]
    fn fixed_round_trip_is_lossless_on_the_suite() {
        let suite = curated_suite();
        let (pred, diag) = roundtrip_corpus(&suite, &RunConfig::fixed()).unwrap();
        assert_eq!(pred, suite);
        assert_eq!(diag.get("encode.lossage"), 0);
        assert_eq!(diag.get("decode.repairs"), 0);
    }

    #[test]
    fn oracle_pipeline_matches_round_trip() {
        let suite = curated_suite();
        let cfg = RunConfig::fixed();
        let oracle = OraclePredictor::new(&suite, &cfg.split);
        let (pred, report) = run_pipeline(&suite, &oracle, &cfg).unwrap();
        assert_eq!(pred, roundtrip_corpus(&suite, &cfg).unwrap().0);
        assert_eq!(report.f1(Metric::Elas), 100.0);
    }

    #[test]
    fn diagnostics_skip_zero_counts() {
        let mut d = Diagnostics::default();
        d.add("x", 0);
        assert!(d.is_empty());
        d.add("x", 2);
        d.merge(&d.clone());
        assert_eq!(d.get("x"), 4);
    }

    #[test]
    fn duplicate_trees_are_a_config_error() {
        let mut cfg = RunConfig::default();
        cfg.policy.tree_order = vec![TreeKind::Basic, TreeKind::Basic];
        assert!(matches!(
            roundtrip_corpus(&[], &cfg),
            Err(PipelineError::Config(_))
        ));
    }
}
