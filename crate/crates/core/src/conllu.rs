//! Reading and writing CoNLL-U, including the DEPS column.
//!
//! Multiword token ranges (`3-4`) are kept as opaque lines and written back
//! in place. Empty nodes (`5.1`) are either rejected or dropped together
//! with every enhanced edge that touches them.

use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConlluError {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("sentence {sent_id}: {message}")]
    Integrity { sent_id: String, message: String },

    #[error("sentence {sent_id}: empty node {id} on line {line} (empty nodes are rejected)")]
    EmptyNode {
        sent_id: String,
        id: String,
        line: usize,
    },
}

/// What to do with empty nodes (decimal ids such as `5.1`).
#[derive(Clone, Copy, Debug, Default, Eq, PartialEq)]
pub enum EmptyNodePolicy {
    Reject,
    #[default]
    Drop,
}

impl FromStr for EmptyNodePolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "reject" => Ok(EmptyNodePolicy::Reject),
            "drop" => Ok(EmptyNodePolicy::Drop),
            other => Err(format!("unknown empty node policy: {}", other)),
        }
    }
}

/// A syntactic word. Ids are 1-based; head 0 is the artificial root.
#[derive(Clone, Debug, Eq, PartialEq)]
pub struct Token {
    pub id: usize,
    pub form: String,
    pub lemma: String,
    pub upos: String,
    pub xpos: String,
    pub feats: String,
    pub head: usize,
    pub deprel: String,
    /// Enhanced dependencies as `(head, label)`, sorted and deduplicated.
    pub deps: Vec<(usize, String)>,
    pub misc: String,
}

impl Token {
    /// A token with `_` in every string column and no enhanced edges.
    pub fn new(id: usize, form: impl Into<String>) -> Self {
        Token {
            id,
            form: form.into(),
            lemma: "_".to_owned(),
            upos: "_".to_owned(),
            xpos: "_".to_owned(),
            feats: "_".to_owned(),
            head: 0,
            deprel: "_".to_owned(),
            deps: Vec::new(),
            misc: "_".to_owned(),
        }
    }

    /// Sort and deduplicate `deps`.
    pub fn canonicalize_deps(&mut self) {
        self.deps.sort();
        self.deps.dedup();
    }
}

#[derive(Clone, Debug, Default, Eq, PartialEq)]
pub struct Sentence {
    pub sent_id: String,
    pub text: String,
    pub tokens: Vec<Token>,
    /// Raw comment lines (including the leading `#`), in input order.
    pub comments: Vec<String>,
    /// Multiword token range lines, written back before the token that
    /// starts the range.
    pub multiword: Vec<String>,
}

impl Sentence {
    /// Build a sentence with `sent_id` and `text` comments.
    pub fn new(sent_id: impl Into<String>, tokens: Vec<Token>) -> Self {
        let sent_id = sent_id.into();
        let text = tokens
            .iter()
            .map(|t| t.form.as_str())
            .collect::<Vec<_>>()
            .join(" ");
        let mut comments = Vec::new();
        if !sent_id.is_empty() {
            comments.push(format!("# sent_id = {}", sent_id));
        }
        comments.push(format!("# text = {}", text));
        Sentence {
            sent_id,
            text,
            tokens,
            comments,
            multiword: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Token by 1-based id.
    pub fn token(&self, id: usize) -> Option<&Token> {
        id.checked_sub(1).and_then(|idx| self.tokens.get(idx))
    }

    /// A name for diagnostics: the sentence id, or the text when no id is set.
    pub fn name(&self) -> &str {
        if self.sent_id.is_empty() {
            &self.text
        } else {
            &self.sent_id
        }
    }

    /// Check the token-level and sentence-level invariants.
    pub fn validate(&self) -> Result<(), ConlluError> {
        let n = self.tokens.len();
        let fail = |message: String| ConlluError::Integrity {
            sent_id: self.name().to_owned(),
            message,
        };

        for (idx, token) in self.tokens.iter().enumerate() {
            if token.id != idx + 1 {
                return Err(fail(format!(
                    "token ids are not contiguous: expected {}, found {}",
                    idx + 1,
                    token.id
                )));
            }
            if token.head > n {
                return Err(fail(format!(
                    "token {} has dangling head {}",
                    token.id, token.head
                )));
            }
            for window in token.deps.windows(2) {
                if window[0] >= window[1] {
                    return Err(fail(format!(
                        "token {} has unsorted or duplicate enhanced edges",
                        token.id
                    )));
                }
            }
            for (head, label) in &token.deps {
                if *head > n {
                    return Err(fail(format!(
                        "token {} has dangling enhanced head {}",
                        token.id, head
                    )));
                }
                if *head == token.id {
                    return Err(fail(format!("token {} has a self-loop", token.id)));
                }
                if label.is_empty() || label.contains(char::is_whitespace) {
                    return Err(fail(format!(
                        "token {} has invalid enhanced label {:?}",
                        token.id, label
                    )));
                }
            }
        }

        Ok(())
    }
}

fn field(s: &str) -> &str {
    if s.is_empty() {
        "_"
    } else {
        s
    }
}

pub(crate) fn format_deps(deps: &[(usize, String)]) -> String {
    if deps.is_empty() {
        return "_".to_owned();
    }
    let mut sorted: Vec<&(usize, String)> = deps.iter().collect();
    sorted.sort();
    sorted
        .iter()
        .map(|(h, l)| format!("{}:{}", h, l))
        .collect::<Vec<_>>()
        .join("|")
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.id,
            field(&self.form),
            field(&self.lemma),
            field(&self.upos),
            field(&self.xpos),
            field(&self.feats),
            self.head,
            field(&self.deprel),
            format_deps(&self.deps),
            field(&self.misc)
        )
    }
}

/// Write sentences in CoNLL-U, each followed by a blank line.
pub fn write_conllu<W: Write>(sentences: &[Sentence], mut out: W) -> io::Result<()> {
    for sentence in sentences {
        write_sentence(sentence, &mut out)?;
    }
    out.flush()
}

pub fn write_sentence<W: Write>(sentence: &Sentence, out: &mut W) -> io::Result<()> {
    for comment in &sentence.comments {
        writeln!(out, "{}", comment)?;
    }
    let ranges: Vec<(usize, &str)> = sentence
        .multiword
        .iter()
        .filter_map(|line| {
            let start = line.split(['-', '\t']).next()?.parse().ok()?;
            Some((start, line.as_str()))
        })
        .collect();
    for token in &sentence.tokens {
        for (_, line) in ranges.iter().filter(|(start, _)| *start == token.id) {
            writeln!(out, "{}", line)?;
        }
        writeln!(out, "{}", token)?;
    }
    writeln!(out)
}

pub fn to_conllu_string(sentences: &[Sentence]) -> String {
    let mut buf = Vec::new();
    write_conllu(sentences, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CoNLL-U output is UTF-8")
}

/// Read every sentence from a CoNLL-U stream.
pub fn read_conllu<R: BufRead>(
    input: R,
    policy: EmptyNodePolicy,
) -> Result<Vec<Sentence>, ConlluError> {
    let mut sentences = Vec::new();
    let mut block: Vec<(usize, String)> = Vec::new();

    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line).to_owned();
        if line.trim().is_empty() {
            if !block.is_empty() {
                sentences.push(parse_block(&block, policy)?);
                block.clear();
            }
        } else {
            block.push((idx + 1, line));
        }
    }
    if !block.is_empty() {
        sentences.push(parse_block(&block, policy)?);
    }

    Ok(sentences)
}

pub fn read_conllu_str(input: &str, policy: EmptyNodePolicy) -> Result<Vec<Sentence>, ConlluError> {
    read_conllu(input.as_bytes(), policy)
}

#[derive(Debug, Clone, Copy, Eq, PartialEq)]
enum HeadRef {
    Word(usize),
    Empty,
}

fn parse_head_ref(s: &str) -> Option<HeadRef> {
    if let Ok(h) = s.parse::<usize>() {
        return Some(HeadRef::Word(h));
    }
    let (a, b) = s.split_once('.')?;
    if a.parse::<usize>().is_ok() && b.parse::<usize>().is_ok() {
        Some(HeadRef::Empty)
    } else {
        None
    }
}

fn parse_block(
    block: &[(usize, String)],
    policy: EmptyNodePolicy,
) -> Result<Sentence, ConlluError> {
    let mut sentence = Sentence::default();

    for (_, line) in block.iter().filter(|(_, l)| l.starts_with('#')) {
        if let Some(rest) = line.strip_prefix("# sent_id =") {
            sentence.sent_id = rest.trim().to_owned();
        } else if let Some(rest) = line.strip_prefix("# text =") {
            sentence.text = rest.trim().to_owned();
        }
    }

    for (line_no, line) in block {
        let line_no = *line_no;
        if line.starts_with('#') {
            sentence.comments.push(line.clone());
            continue;
        }

        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(ConlluError::Parse {
                line: line_no,
                message: format!("expected 10 tab-separated columns, found {}", cols.len()),
            });
        }

        let id = cols[0];
        if id.contains('-') {
            sentence.multiword.push(line.clone());
            continue;
        }
        if id.contains('.') {
            match policy {
                EmptyNodePolicy::Reject => {
                    return Err(ConlluError::EmptyNode {
                        sent_id: sentence.sent_id.clone(),
                        id: id.to_owned(),
                        line: line_no,
                    })
                }
                EmptyNodePolicy::Drop => continue,
            }
        }

        let parse_err = |message: String| ConlluError::Parse {
            line: line_no,
            message,
        };
        let id: usize = id
            .parse()
            .map_err(|_| parse_err(format!("invalid token id {:?}", cols[0])))?;
        if id == 0 {
            return Err(parse_err("token id must be at least 1".to_owned()));
        }
        let head: usize = cols[6]
            .parse()
            .map_err(|_| parse_err(format!("invalid head {:?}", cols[6])))?;

        let mut deps = Vec::new();
        if cols[8] != "_" {
            for item in cols[8].split('|') {
                let (head, label) = item
                    .split_once(':')
                    .ok_or_else(|| parse_err(format!("invalid enhanced dependency {:?}", item)))?;
                match parse_head_ref(head) {
                    Some(HeadRef::Word(h)) => deps.push((h, label.to_owned())),
                    Some(HeadRef::Empty) => {
                        if policy == EmptyNodePolicy::Reject {
                            return Err(ConlluError::EmptyNode {
                                sent_id: sentence.sent_id.clone(),
                                id: head.to_owned(),
                                line: line_no,
                            });
                        }
                    }
                    None => {
                        return Err(parse_err(format!("invalid enhanced head {:?}", head)));
                    }
                }
            }
        }

        let mut token = Token {
            id,
            form: cols[1].to_owned(),
            lemma: cols[2].to_owned(),
            upos: cols[3].to_owned(),
            xpos: cols[4].to_owned(),
            feats: cols[5].to_owned(),
            head,
            deprel: cols[7].to_owned(),
            deps,
            misc: cols[9].to_owned(),
        };
        token.canonicalize_deps();
        sentence.tokens.push(token);
    }

    sentence.validate()?;
    Ok(sentence)
}
