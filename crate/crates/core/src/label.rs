//! Relation labels and the relative-position treatment of marker lemmas.
//!
//! Enhanced labels append the lemma of a case, mark or cc dependent to the
//! relation (`obl:in`, `acl:to`, `conj:and`). For tagging, the lemma is
//! replaced by the signed offset of the marker token relative to the
//! dependent (`acl:-1`), and restored from the sentence afterwards.
//!
//! Label grammar:
//!
//! ```text
//! label   = base *( ":" segment )
//! segment = offset / word
//! offset  = ( "+" / "-" ) 1*DIGIT
//! word    = 1*( any character except ":" and whitespace )
//! ```
//!
//! Whether a word segment is lexical cannot be read off the label alone.
//! A segment counts as lexical when it matches the lemma of a marker token
//! attached to the dependent in the basic tree; otherwise it is grammatical
//! (`pass`, `relcl`, `poss`, ...).

use std::fmt;

use crate::conllu::Sentence;
use crate::graph::EudEdge;

/// Basic relations whose dependents' lemmas appear in enhanced labels.
pub const MARKER_RELATIONS: [&str; 3] = ["case", "mark", "cc"];

#[derive(Clone, Debug, Eq, Hash, PartialEq)]
pub enum Subtype {
    /// A marker lemma, e.g. `to` in `acl:to`.
    Lexical(String),
    /// Signed offset from the dependent to the marker token.
    Relative(i64),
    Grammatical(String),
}

impl fmt::Display for Subtype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subtype::Lexical(s) | Subtype::Grammatical(s) => f.write_str(s),
            Subtype::Relative(k) if *k > 0 => write!(f, "+{}", k),
            Subtype::Relative(k) => write!(f, "{}", k),
        }
    }
}

/// A relation label split into its universal relation and subtypes.
#[derive(Clone, Debug, Eq, Hash, PartialEq)]
pub struct RelLabel {
    pub base: String,
    pub subtypes: Vec<Subtype>,
}

fn parse_offset(s: &str) -> Option<i64> {
    let digits = s.strip_prefix('-').or_else(|| s.strip_prefix('+'))?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let value: i64 = digits.parse().ok()?;
    if value == 0 {
        return None;
    }
    Some(if s.starts_with('-') { -value } else { value })
}

impl RelLabel {
    /// Parse a label. Word segments come out as [`Subtype::Grammatical`].
    pub fn parse(label: &str) -> Self {
        let mut parts = label.split(':');
        let base = parts.next().unwrap_or_default().to_owned();
        let subtypes = parts
            .map(|p| match parse_offset(p) {
                Some(k) => Subtype::Relative(k),
                None => Subtype::Grammatical(p.to_owned()),
            })
            .collect();
        RelLabel { base, subtypes }
    }

    pub fn has_relative(&self) -> bool {
        self.subtypes
            .iter()
            .any(|s| matches!(s, Subtype::Relative(_)))
    }
}

impl fmt::Display for RelLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.base)?;
        for subtype in &self.subtypes {
            write!(f, ":{}", subtype)?;
        }
        Ok(())
    }
}

/// The universal relation: everything before the first `:`.
pub fn base_relation(label: &str) -> &str {
    label.split(':').next().unwrap_or(label)
}

#[derive(Clone, Debug, Eq, PartialEq)]
pub enum LabelWarning {
    /// Several marker tokens share the lemma; the nearest one was used.
    AmbiguousMarker {
        dep: usize,
        label: String,
        chosen: usize,
    },
    /// A relative offset points outside the sentence; it was dropped.
    OffsetOutOfRange { dep: usize, label: String },
}

impl fmt::Display for LabelWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelWarning::AmbiguousMarker { dep, label, chosen } => write!(
                f,
                "ambiguous marker for {} on token {}, chose token {}",
                label, dep, chosen
            ),
            LabelWarning::OffsetOutOfRange { dep, label } => {
                write!(f, "offset in {} on token {} is out of range", label, dep)
            }
        }
    }
}

/// Replace a lexical subtype with the offset of its marker token.
///
/// The edge is returned unchanged when no segment matches the lemma of a
/// case/mark/cc dependent of `edge.dep`, or when the label carries a
/// multiword marker (`_` in a subtype).
pub fn delexicalize(edge: &EudEdge, s: &Sentence) -> (EudEdge, Option<LabelWarning>) {
    let mut label = RelLabel::parse(&edge.label);
    let multiword = label
        .subtypes
        .iter()
        .any(|st| matches!(st, Subtype::Grammatical(w) if w.contains('_')));
    if label.subtypes.is_empty() || multiword {
        return (edge.clone(), None);
    }

    let markers: Vec<&crate::conllu::Token> = s
        .tokens
        .iter()
        .filter(|t| t.head == edge.dep && MARKER_RELATIONS.contains(&base_relation(&t.deprel)))
        .collect();

    for subtype in label.subtypes.iter_mut() {
        let word = match subtype {
            Subtype::Grammatical(w) | Subtype::Lexical(w) => w.clone(),
            Subtype::Relative(_) => continue,
        };
        let mut candidates: Vec<usize> = markers
            .iter()
            .filter(|t| t.lemma.to_lowercase() == word.to_lowercase())
            .map(|t| t.id)
            .collect();
        if candidates.is_empty() {
            continue;
        }
        candidates.sort_by_key(|&m| (m.abs_diff(edge.dep), m));
        let chosen = candidates[0];
        *subtype = Subtype::Relative(chosen as i64 - edge.dep as i64);
        let warning = (candidates.len() > 1).then(|| LabelWarning::AmbiguousMarker {
            dep: edge.dep,
            label: edge.label.clone(),
            chosen,
        });
        let out = EudEdge::new(edge.head, edge.dep, label.to_string());
        return (out, warning);
    }

    (edge.clone(), None)
}

/// Replace relative offsets with the (lowercased) lemma they point at.
///
/// Offsets pointing outside the sentence are removed and reported.
pub fn relexicalize(edge: &EudEdge, s: &Sentence) -> (EudEdge, Option<LabelWarning>) {
    let label = RelLabel::parse(&edge.label);
    if !label.has_relative() {
        return (edge.clone(), None);
    }

    let mut warning = None;
    let subtypes = label
        .subtypes
        .into_iter()
        .filter_map(|st| match st {
            Subtype::Relative(k) => {
                let target = edge.dep as i64 + k;
                let token = usize::try_from(target).ok().and_then(|id| s.token(id));
                match token {
                    Some(t) => Some(Subtype::Lexical(t.lemma.to_lowercase())),
                    None => {
                        warning = Some(LabelWarning::OffsetOutOfRange {
                            dep: edge.dep,
                            label: edge.label.clone(),
                        });
                        None
                    }
                }
            }
            other => Some(other),
        })
        .collect();

    let label = RelLabel {
        base: label.base,
        subtypes,
    };
    (
        EudEdge::new(edge.head, edge.dep, label.to_string()),
        warning,
    )
}

/// [`relexicalize`] on a bare label.
pub fn relexicalize_label(
    label: &str,
    head: usize,
    dep: usize,
    s: &Sentence,
) -> (String, Option<LabelWarning>) {
    let (edge, warning) = relexicalize(&EudEdge::new(head, dep, label), s);
    (edge.label, warning)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conllu::Token;

    fn tok(id: usize, lemma: &str, head: usize, deprel: &str) -> Token {
        let mut t = Token::new(id, lemma);
        t.lemma = lemma.to_owned();
        t.head = head;
        t.deprel = deprel.to_owned();
        t
    }

    #[test]
    fn parse_and_render() {
        for label in [
            "nsubj",
            "acl:-1",
            "obl:+2",
            "nmod:poss",
            "obl:arg:-1",
            "acl:relcl",
        ] {
            assert_eq!(RelLabel::parse(label).to_string(), label);
        }
        assert_eq!(
            RelLabel::parse("acl:-1").subtypes,
            vec![Subtype::Relative(-1)]
        );
        assert_eq!(
            RelLabel::parse("obl:+3").subtypes,
            vec![Subtype::Relative(3)]
        );
        // Unsigned digits and zero are not offsets.
        assert!(!RelLabel::parse("obl:3").has_relative());
        assert!(!RelLabel::parse("obl:-0").has_relative());
        assert_eq!(base_relation("obl:arg:into"), "obl");
    }

    #[test]
    fn grammatical_subtypes_untouched() {
        let s = Sentence::new(
            "g",
            vec![tok(1, "who", 2, "nsubj:pass"), tok(2, "shrink", 0, "root")],
        );
        let e = EudEdge::new(2, 1, "nsubj:pass");
        assert_eq!(delexicalize(&e, &s).0, e);
    }

    #[test]
    fn multiword_marker_untouched() {
        let s = Sentence::new(
            "m",
            vec![
                tok(1, "because", 3, "case"),
                tok(2, "of", 1, "fixed"),
                tok(3, "rain", 0, "root"),
            ],
        );
        let e = EudEdge::new(0, 3, "obl:because_of");
        assert_eq!(delexicalize(&e, &s).0, e);
    }

    #[test]
    fn ambiguity_picks_nearest_marker() {
        let s = Sentence::new(
            "a",
            vec![
                tok(1, "to", 4, "case"),
                tok(2, "x", 4, "amod"),
                tok(3, "to", 4, "case"),
                tok(4, "y", 0, "root"),
            ],
        );
        let (e, w) = delexicalize(&EudEdge::new(0, 4, "obl:to"), &s);
        assert_eq!(e.label, "obl:-1");
        assert!(matches!(
            w,
            Some(LabelWarning::AmbiguousMarker { chosen: 3, .. })
        ));
    }

    #[test]
    fn positive_offsets_and_inner_subtypes() {
        let s = Sentence::new(
            "p",
            vec![tok(1, "ryba", 0, "root"), tok(2, "do", 1, "case")],
        );
        let e = EudEdge::new(0, 1, "obl:arg:do:gen");
        let (d, _) = delexicalize(&e, &s);
        assert_eq!(d.label, "obl:arg:+1:gen");
        assert_eq!(relexicalize(&d, &s).0, e);
    }

    #[test]
    fn out_of_range_offset_is_dropped() {
        let s = Sentence::new("o", vec![tok(1, "a", 0, "root"), tok(2, "b", 1, "acl")]);
        let (e, w) = relexicalize(&EudEdge::new(1, 2, "acl:-5"), &s);
        assert_eq!(e.label, "acl");
        assert!(matches!(w, Some(LabelWarning::OffsetOutOfRange { .. })));
        let (e, w) = relexicalize(&EudEdge::new(1, 2, "acl:+1"), &s);
        assert_eq!(e.label, "acl");
        assert!(w.is_some());
    }
}
