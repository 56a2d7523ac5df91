//! Bracketing encoding of forests as one tag per token.
//!
//! The tag of token `i` is built from, in this order:
//!
//! * `<` if token `i-1` has its head to the right;
//! * one `\` per left dependent of `i`;
//! * one `/` per right dependent of `i-1`;
//! * `>` if `i` has its head to the left.
//!
//! A tag with none of these is written `_`. Arcs from the artificial root
//! are not encoded; the relation label of every token travels in a
//! separate sequence. Arcs of the same direction that cross each other
//! cannot be expressed: the later-starting one is dropped at encoding
//! time and counted as lossage.

use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use log::warn;
use thiserror::Error;

use crate::graph::{find_cycles, Arc, DepForest};

#[derive(Clone, Copy, Debug, Default, Eq, Hash, Ord, PartialEq, PartialOrd)]
pub struct BracketTag {
    pub left_angle: bool,
    pub backslashes: usize,
    pub slashes: usize,
    pub right_angle: bool,
}

impl BracketTag {
    pub fn is_empty(&self) -> bool {
        *self == BracketTag::default()
    }
}

impl fmt::Display for BracketTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("_");
        }
        if self.left_angle {
            f.write_str("<")?;
        }
        for _ in 0..self.backslashes {
            f.write_str("\\")?;
        }
        for _ in 0..self.slashes {
            f.write_str("/")?;
        }
        if self.right_angle {
            f.write_str(">")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Eq, PartialEq)]
#[error("invalid bracket tag: {0:?}")]
pub struct ParseTagError(pub String);

impl FromStr for BracketTag {
    type Err = ParseTagError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "_" {
            return Ok(BracketTag::default());
        }
        let err = || ParseTagError(s.to_owned());
        if s.is_empty() {
            return Err(err());
        }

        let mut rest = s;
        let mut tag = BracketTag::default();
        if let Some(r) = rest.strip_prefix('<') {
            tag.left_angle = true;
            rest = r;
        }
        let count = rest.bytes().take_while(|&b| b == b'\\').count();
        tag.backslashes = count;
        rest = &rest[count..];
        let count = rest.bytes().take_while(|&b| b == b'/').count();
        tag.slashes = count;
        rest = &rest[count..];
        if let Some(r) = rest.strip_prefix('>') {
            tag.right_angle = true;
            rest = r;
        }
        if rest.is_empty() {
            Ok(tag)
        } else {
            Err(err())
        }
    }
}

/// Aligned bracket and relation sequences for one sentence.
#[derive(Clone, Debug, Default, Eq, Hash, PartialEq)]
pub struct LabelSeq {
    pub brackets: Vec<BracketTag>,
    pub relations: Vec<String>,
}

impl LabelSeq {
    pub fn len(&self) -> usize {
        self.brackets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.brackets.is_empty()
    }

    /// The bracket row, space separated.
    pub fn bracket_row(&self) -> String {
        self.brackets
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Encoding output with the dependents whose arc could not be expressed.
#[derive(Clone, Debug, Eq, PartialEq)]
pub struct Encoded {
    pub labels: LabelSeq,
    pub dropped: Vec<usize>,
}

fn crosses((a, b): (usize, usize), (c, d): (usize, usize)) -> bool {
    (a < c && c < b && b < d) || (c < a && a < d && d < b)
}

/// Encode a forest. Same-direction crossing arcs are logged and dropped.
pub fn encode(forest: &DepForest) -> LabelSeq {
    let encoded = encode_with_lossage(forest);
    if !encoded.dropped.is_empty() {
        warn!(
            "bracket encoding dropped {} crossing arc(s), dependents {:?}",
            encoded.dropped.len(),
            encoded.dropped
        );
    }
    encoded.labels
}

pub fn encode_with_lossage(forest: &DepForest) -> Encoded {
    let n = forest.len();

    // Token-token arcs as (start, end, dep, leftward).
    let mut arcs: Vec<(usize, usize, usize, bool)> = forest
        .arcs()
        .filter(|(_, a)| a.head > 0)
        .map(|(dep, a)| {
            if a.head > dep {
                (dep, a.head, dep, true)
            } else {
                (a.head, dep, dep, false)
            }
        })
        .collect();
    arcs.sort_unstable();

    let mut kept: Vec<(usize, usize, usize, bool)> = Vec::with_capacity(arcs.len());
    let mut dropped = Vec::new();
    for arc in arcs {
        let (start, end, dep, leftward) = arc;
        let clash = kept
            .iter()
            .any(|k| k.3 == leftward && crosses((k.0, k.1), (start, end)));
        if clash {
            dropped.push(dep);
        } else {
            kept.push(arc);
        }
    }
    dropped.sort_unstable();

    // Per token: does its head lie right / left, number of left and right
    // dependents.
    let mut head_right = vec![false; n + 1];
    let mut head_left = vec![false; n + 1];
    let mut left_deps = vec![0usize; n + 1];
    let mut right_deps = vec![0usize; n + 1];
    for &(start, end, dep, leftward) in &kept {
        if leftward {
            head_right[dep] = true;
            left_deps[end] += 1;
        } else {
            head_left[dep] = true;
            right_deps[start] += 1;
        }
    }

    let brackets = (1..=n)
        .map(|i| BracketTag {
            left_angle: i > 1 && head_right[i - 1],
            backslashes: left_deps[i],
            slashes: if i > 1 { right_deps[i - 1] } else { 0 },
            right_angle: head_left[i],
        })
        .collect();
    let relations = forest.parents().iter().map(|a| a.label.clone()).collect();

    Encoded {
        labels: LabelSeq {
            brackets,
            relations,
        },
        dropped,
    }
}

/// Decoding output with the number of inconsistencies that were repaired.
#[derive(Clone, Debug, Eq, PartialEq)]
pub struct Decoded {
    pub forest: DepForest,
    pub repairs: usize,
}

/// Decode a label sequence into a forest. Never fails.
///
/// Unmatched openers are discarded at the end of the sentence, unmatched
/// closers when they are read, second heads are ignored, and cycles are
/// broken by dropping the most recently matched arc on them. Tokens left
/// without a head attach to the root with their predicted relation.
pub fn decode(labels: &LabelSeq) -> Decoded {
    let n = labels.len();
    let mut heads: Vec<Option<(usize, usize)>> = vec![None; n + 1];
    let mut stamp = 0usize;
    let mut repairs = 0usize;
    let mut left_open: Vec<usize> = Vec::new();
    let mut right_open: Vec<usize> = Vec::new();

    let mut attach = |heads: &mut Vec<Option<(usize, usize)>>, dep: usize, head: usize| -> bool {
        if heads[dep].is_some() {
            return false;
        }
        stamp += 1;
        heads[dep] = Some((head, stamp));
        true
    };

    for (idx, tag) in labels.brackets.iter().enumerate() {
        let i = idx + 1;
        if tag.left_angle {
            if i > 1 {
                left_open.push(i - 1);
            } else {
                repairs += 1;
            }
        }
        for _ in 0..tag.backslashes {
            match left_open.pop() {
                Some(dep) => {
                    if !attach(&mut heads, dep, i) {
                        repairs += 1;
                    }
                }
                None => repairs += 1,
            }
        }
        for _ in 0..tag.slashes {
            if i > 1 {
                right_open.push(i - 1);
            } else {
                repairs += 1;
            }
        }
        if tag.right_angle {
            match right_open.pop() {
                Some(head) => {
                    if !attach(&mut heads, i, head) {
                        repairs += 1;
                    }
                }
                None => repairs += 1,
            }
        }
    }
    repairs += left_open.len() + right_open.len();

    loop {
        let flat: Vec<usize> = heads
            .iter()
            .map(|h| h.map_or(0, |(head, _)| head))
            .collect();
        let cycles = find_cycles(&flat);
        if cycles.is_empty() {
            break;
        }
        for cycle in cycles {
            let newest = cycle
                .iter()
                .copied()
                .max_by_key(|&d| heads[d].map_or(0, |(_, s)| s))
                .expect("cycles are nonempty");
            heads[newest] = None;
            repairs += 1;
        }
    }

    let parents = (1..=n)
        .map(|i| {
            let label = labels
                .relations
                .get(i - 1)
                .cloned()
                .unwrap_or_else(|| "root".to_owned());
            Arc::new(heads[i].map_or(0, |(h, _)| h), label)
        })
        .collect();

    Decoded {
        forest: DepForest::from_parents_unchecked(parents),
        repairs,
    }
}

/// A sentence in the textual label format.
#[derive(Clone, Debug, Default, Eq, PartialEq)]
pub struct LabeledSentence {
    pub forms: Vec<String>,
    pub labels: LabelSeq,
}

#[derive(Debug, Error)]
pub enum LabelFileError {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Write `form<TAB>bracket<TAB>relation` lines, one blank line after each
/// sentence.
pub fn write_labels<W: Write>(sentences: &[LabeledSentence], mut out: W) -> io::Result<()> {
    for sentence in sentences {
        for ((form, bracket), relation) in sentence
            .forms
            .iter()
            .zip(&sentence.labels.brackets)
            .zip(&sentence.labels.relations)
        {
            writeln!(out, "{}\t{}\t{}", form, bracket, relation)?;
        }
        writeln!(out)?;
    }
    out.flush()
}

pub fn read_labels<R: BufRead>(input: R) -> Result<Vec<LabeledSentence>, LabelFileError> {
    let mut sentences = Vec::new();
    let mut current = LabeledSentence::default();
    let mut open = false;

    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.is_empty() {
            if open {
                sentences.push(std::mem::take(&mut current));
                open = false;
            }
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(LabelFileError::Parse {
                line: idx + 1,
                message: format!("expected 3 tab-separated columns, found {}", cols.len()),
            });
        }
        let tag: BracketTag =
            cols[1]
                .parse()
                .map_err(|e: ParseTagError| LabelFileError::Parse {
                    line: idx + 1,
                    message: e.to_string(),
                })?;
        current.forms.push(cols[0].to_owned());
        current.labels.brackets.push(tag);
        current.labels.relations.push(cols[2].to_owned());
        open = true;
    }
    if open {
        sentences.push(current);
    }

    Ok(sentences)
}
