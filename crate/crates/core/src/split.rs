//! Splitting an enhanced graph into four single-headed forests.
//!
//! * basic: the enhanced edges that mirror the basic tree, with marker
//!   lemmas replaced by relative positions;
//! * relative: basic, with `ref` edges swapped in;
//! * conjunct: basic, with `conj` arcs replaced by the propagated relation;
//! * control: basic, with subjects re-attached to the controlled predicate.
//!
//! Any cycle introduced by a substitution is repaired with a maximum
//! spanning arborescence in which the proposed arcs score high and all
//! others low. Tokens whose arc did not survive are attached to the root.
//!
//! Two modes are supported. `Faithful` reproduces the original system,
//! which only swapped subjects below `xcomp` and dropped the subject edge
//! of relative clause referents. `Fixed` also handles `ccomp`, places the
//! referent's edge in the control tree, and lets substituted arcs win ties
//! during cycle repair.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::cle::max_arborescence;
use crate::conllu::Sentence;
use crate::graph::{find_cycles, heads_of, Arc, DepForest, EudEdge, EudGraph};
use crate::label::{base_relation, delexicalize, LabelWarning};

#[derive(Clone, Copy, Debug, Eq, Hash, Ord, PartialEq, PartialOrd, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeKind {
    Basic,
    Relative,
    Conjunct,
    Control,
}

impl TreeKind {
    pub const ALL: [TreeKind; 4] = [
        TreeKind::Basic,
        TreeKind::Relative,
        TreeKind::Conjunct,
        TreeKind::Control,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TreeKind::Basic => "basic",
            TreeKind::Relative => "relative",
            TreeKind::Conjunct => "conjunct",
            TreeKind::Control => "control",
        }
    }
}

impl fmt::Display for TreeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TreeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TreeKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown tree type: {}", s))
    }
}

#[derive(Clone, Copy, Debug, Default, Eq, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Faithful,
    Fixed,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "faithful" => Ok(Mode::Faithful),
            "fixed" => Ok(Mode::Fixed),
            other => Err(format!("unknown mode: {}", other)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitConfig {
    pub mode: Mode,
    /// Score of proposed arcs during cycle repair.
    pub cle_high_score: f64,
    /// Score of every other arc.
    pub cle_low_score: f64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig {
            mode: Mode::Faithful,
            cle_high_score: 1.0,
            cle_low_score: -1000.0,
        }
    }
}

impl SplitConfig {
    pub fn with_mode(mode: Mode) -> Self {
        SplitConfig {
            mode,
            ..SplitConfig::default()
        }
    }
}

#[derive(Clone, Copy, Debug, Eq, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RepairAction {
    /// The arborescence replaced the proposed arc; the token went to root.
    CycleBreak,
    /// The token heads a `ref` arc that was broken; it went to root.
    RefHead,
    /// A cycle survived the arborescence; its members went to root.
    Collapse,
    /// A `conj` dependent had no propagated edge and kept its conj arc.
    ConjFallback,
}

impl fmt::Display for RepairAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RepairAction::CycleBreak => "cycle_break",
            RepairAction::RefHead => "ref_head",
            RepairAction::Collapse => "collapse",
            RepairAction::ConjFallback => "conj_fallback",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, Eq, PartialEq, Serialize)]
pub struct Repair {
    pub tree: TreeKind,
    pub token: usize,
    pub action: RepairAction,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SplitResult {
    pub basic: DepForest,
    pub relative: DepForest,
    pub conjunct: DepForest,
    pub control: DepForest,
    pub repairs: Vec<Repair>,
    pub warnings: Vec<LabelWarning>,
}

impl SplitResult {
    pub fn forest(&self, kind: TreeKind) -> &DepForest {
        match kind {
            TreeKind::Basic => &self.basic,
            TreeKind::Relative => &self.relative,
            TreeKind::Conjunct => &self.conjunct,
            TreeKind::Control => &self.control,
        }
    }
}

/// A forest produced by one split, with its audit trail.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeSplit {
    pub forest: DepForest,
    pub repairs: Vec<(usize, RepairAction)>,
    pub warnings: Vec<LabelWarning>,
}

/// The output of [`resolve_cycles`].
#[derive(Clone, Debug, PartialEq)]
pub struct Resolved {
    pub forest: DepForest,
    pub repairs: Vec<(usize, RepairAction)>,
}

/// Break cycles in a proposed head assignment.
///
/// Acyclic proposals are returned unchanged.
pub fn resolve_cycles(proposed: &[Arc], cfg: &SplitConfig) -> Resolved {
    resolve_with_preference(proposed, None, cfg)
}

/// Like [`resolve_cycles`], but arcs flagged in `preferred` score slightly
/// above the other proposed arcs. The bonus is small enough that the number
/// of broken arcs is still minimised first.
pub fn resolve_with_preference(
    proposed: &[Arc],
    preferred: Option<&[bool]>,
    cfg: &SplitConfig,
) -> Resolved {
    assert!(
        cfg.cle_high_score > cfg.cle_low_score,
        "high CLE score must exceed the low score"
    );
    let n = proposed.len();
    let heads = heads_of(proposed);
    if find_cycles(&heads).is_empty() {
        return Resolved {
            forest: DepForest::from_parents_unchecked(proposed.to_vec()),
            repairs: Vec::new(),
        };
    }

    let bonus = (cfg.cle_high_score - cfg.cle_low_score) / (n as f64 + 2.0);
    let mut scores = vec![vec![cfg.cle_low_score; n + 1]; n + 1];
    for (idx, arc) in proposed.iter().enumerate() {
        let dep = idx + 1;
        let mut score = cfg.cle_high_score;
        if preferred.is_some_and(|p| p[idx]) {
            score += bonus;
        }
        scores[arc.head][dep] = score;
    }
    let tree = max_arborescence(&scores);

    let mut parents = proposed.to_vec();
    let mut repairs = Vec::new();
    for dep in 1..=n {
        if tree[dep] == proposed[dep - 1].head {
            continue;
        }
        parents[dep - 1] = Arc::root();
        repairs.push((dep, RepairAction::CycleBreak));

        let arc = &proposed[dep - 1];
        if base_relation(&arc.label) == "ref" && arc.head > 0 {
            let ref_head = arc.head;
            if parents[ref_head - 1] != Arc::root() {
                parents[ref_head - 1] = Arc::root();
                repairs.push((ref_head, RepairAction::RefHead));
            }
        }
    }

    for cycle in find_cycles(&heads_of(&parents)) {
        for dep in cycle {
            parents[dep - 1] = Arc::root();
            repairs.push((dep, RepairAction::Collapse));
        }
    }

    Resolved {
        forest: DepForest::from_parents_unchecked(parents),
        repairs,
    }
}

fn resolve_split(
    basic: Option<&DepForest>,
    proposed: Vec<Arc>,
    warnings: Vec<LabelWarning>,
    cfg: &SplitConfig,
) -> TreeSplit {
    let preferred: Option<Vec<bool>> = match (cfg.mode, basic) {
        (Mode::Fixed, Some(basic)) => Some(
            proposed
                .iter()
                .zip(basic.parents())
                .map(|(p, b)| p != b)
                .collect(),
        ),
        _ => None,
    };
    let resolved = resolve_with_preference(&proposed, preferred.as_deref(), cfg);
    TreeSplit {
        forest: resolved.forest,
        repairs: resolved.repairs,
        warnings,
    }
}

fn delex_arc(edge: &EudEdge, s: &Sentence, warnings: &mut Vec<LabelWarning>) -> Arc {
    let (edge, warning) = delexicalize(edge, s);
    warnings.extend(warning);
    Arc::new(edge.head, edge.label)
}

/// The basic tree: per token, the enhanced edge that mirrors its basic arc.
pub fn split_basic(g: &EudGraph, s: &Sentence, cfg: &SplitConfig) -> TreeSplit {
    let mut warnings = Vec::new();
    let proposed: Vec<Arc> = s
        .tokens
        .iter()
        .map(|t| {
            let base = base_relation(&t.deprel);
            let mut candidates: Vec<&EudEdge> = g
                .incoming(t.id)
                .filter(|e| e.head == t.head && base_relation(&e.label) == base)
                .collect();
            candidates.sort_by_key(|e| e.label != t.deprel);
            match candidates.first() {
                Some(edge) => delex_arc(edge, s, &mut warnings),
                None => Arc::root(),
            }
        })
        .collect();
    resolve_split(None, proposed, warnings, cfg)
}

/// The relative clause tree: `ref` edges replace the basic arc.
pub fn split_relative(
    g: &EudGraph,
    s: &Sentence,
    basic: &DepForest,
    cfg: &SplitConfig,
) -> TreeSplit {
    let mut proposed = basic.parents().to_vec();
    for t in &s.tokens {
        if let Some(edge) = g.incoming(t.id).find(|e| base_relation(&e.label) == "ref") {
            proposed[t.id - 1] = Arc::new(edge.head, edge.label.clone());
        }
    }
    resolve_split(Some(basic), proposed, Vec::new(), cfg)
}

/// The conjunct tree: a `conj` arc is replaced by the enhanced edge that
/// carries the first conjunct's relation over to this conjunct.
pub fn split_conjunct(
    g: &EudGraph,
    s: &Sentence,
    basic: &DepForest,
    cfg: &SplitConfig,
) -> TreeSplit {
    let mut proposed = basic.parents().to_vec();
    let mut warnings = Vec::new();
    let mut fallbacks = Vec::new();

    for (dep, arc) in basic.arcs() {
        if base_relation(&arc.label) != "conj" || arc.head == 0 {
            continue;
        }

        // Climb to the first conjunct of a (rare) conj chain.
        let mut first = arc.head;
        for _ in 0..s.len() {
            match s.token(first) {
                Some(t) if base_relation(&t.deprel) == "conj" && t.head > 0 => first = t.head,
                _ => break,
            }
        }
        let first_token = match s.token(first) {
            Some(t) => t,
            None => continue,
        };
        let relation = base_relation(&first_token.deprel);

        let mut candidates: Vec<&EudEdge> = g
            .incoming(dep)
            .filter(|e| e.head != arc.head && base_relation(&e.label) == relation)
            .collect();
        candidates.sort_by_key(|e| (e.head != first_token.head, e.head));

        match candidates.first() {
            Some(edge) => proposed[dep - 1] = delex_arc(edge, s, &mut warnings),
            None => fallbacks.push((dep, RepairAction::ConjFallback)),
        }
    }

    let mut split = resolve_split(Some(basic), proposed, warnings, cfg);
    fallbacks.append(&mut split.repairs);
    split.repairs = fallbacks;
    split
}

/// The control tree: a subject is re-attached to the other predicate it is
/// the subject of, when one of the two predicates is a complement.
pub fn split_control(
    g: &EudGraph,
    s: &Sentence,
    basic: &DepForest,
    cfg: &SplitConfig,
) -> TreeSplit {
    let triggers: &[&str] = match cfg.mode {
        Mode::Faithful => &["xcomp"],
        Mode::Fixed => &["xcomp", "ccomp"],
    };
    let has_trigger = |h: usize| {
        h > 0
            && g.incoming(h)
                .any(|e| triggers.contains(&base_relation(&e.label)))
    };

    let mut proposed = basic.parents().to_vec();
    let mut warnings = Vec::new();

    for (dep, arc) in basic.arcs() {
        if base_relation(&arc.label) != "nsubj" || arc.head == 0 {
            continue;
        }
        let current = arc.head;
        let other = g.incoming(dep).find(|e| {
            e.head != current
                && e.head != 0
                && base_relation(&e.label) == "nsubj"
                && (has_trigger(current) || has_trigger(e.head))
        });
        if let Some(edge) = other {
            proposed[dep - 1] = delex_arc(edge, s, &mut warnings);
        }
    }

    if cfg.mode == Mode::Fixed {
        // The referent of a relative pronoun also fills the pronoun's role
        // inside the relative clause.
        for edge in g.edges.iter().filter(|e| base_relation(&e.label) == "ref") {
            let (referent, pronoun) = (edge.head, edge.dep);
            if referent == 0 || proposed[referent - 1] != *basic.parent(referent) {
                continue;
            }
            let pronoun = match s.token(pronoun) {
                Some(t) => t,
                None => continue,
            };
            let role = base_relation(&pronoun.deprel);
            let current = basic.parent(referent).head;
            if let Some(e) = g.incoming(referent).find(|e| {
                e.head == pronoun.head && e.head != current && base_relation(&e.label) == role
            }) {
                proposed[referent - 1] = delex_arc(e, s, &mut warnings);
            }
        }
    }

    resolve_split(Some(basic), proposed, warnings, cfg)
}

/// All four splits sharing one basic tree.
pub fn split_all(g: &EudGraph, s: &Sentence, cfg: &SplitConfig) -> SplitResult {
    let basic = split_basic(g, s, cfg);
    let relative = split_relative(g, s, &basic.forest, cfg);
    let conjunct = split_conjunct(g, s, &basic.forest, cfg);
    let control = split_control(g, s, &basic.forest, cfg);

    let mut repairs = Vec::new();
    let mut warnings = Vec::new();
    for (kind, split) in [
        (TreeKind::Basic, &basic),
        (TreeKind::Relative, &relative),
        (TreeKind::Conjunct, &conjunct),
        (TreeKind::Control, &control),
    ] {
        repairs.extend(split.repairs.iter().map(|&(token, action)| Repair {
            tree: kind,
            token,
            action,
        }));
        warnings.extend(split.warnings.iter().cloned());
    }

    SplitResult {
        basic: basic.forest,
        relative: relative.forest,
        conjunct: conjunct.forest,
        control: control.forest,
        repairs,
        warnings,
    }
}

/// Split the sentence's own enhanced graph.
pub fn split_sentence(s: &Sentence, cfg: &SplitConfig) -> SplitResult {
    split_all(&EudGraph::from_sentence(s), s, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arcs(heads: &[(usize, &str)]) -> Vec<Arc> {
        heads.iter().map(|&(h, l)| Arc::new(h, l)).collect()
    }

    #[test]
    fn acyclic_proposal_is_untouched() {
        let p = arcs(&[(2, "det"), (0, "root"), (2, "obj")]);
        let r = resolve_cycles(&p, &SplitConfig::default());
        assert_eq!(r.forest.parents(), &p[..]);
        assert!(r.repairs.is_empty());
    }

    #[test]
    fn two_cycle_loses_one_arc() {
        let p = arcs(&[(2, "a"), (1, "b")]);
        let r = resolve_cycles(&p, &SplitConfig::default());
        assert!(r.forest.validate().is_ok());
        assert_eq!(r.repairs.len(), 1);
        // Lower head index wins the tie: the root enters the cycle at 1.
        assert_eq!(r.forest.parents(), &arcs(&[(0, "root"), (1, "b")])[..]);
    }

    #[test]
    fn preference_decides_which_arc_survives() {
        let p = arcs(&[(2, "a"), (1, "b")]);
        let r = resolve_with_preference(&p, Some(&[true, false]), &SplitConfig::default());
        assert_eq!(r.forest.parents(), &arcs(&[(2, "a"), (0, "root")])[..]);
    }

    #[test]
    fn broken_ref_roots_its_head() {
        // 1 -ref-> 2 and 2 -> 1 form a cycle; 3 hangs off 1.
        let p = arcs(&[(2, "acl"), (1, "ref"), (1, "obj")]);
        // Preferring the acl arc forces CLE to cut the ref arc.
        let r = resolve_with_preference(&p, Some(&[true, false, false]), &SplitConfig::default());
        assert!(r.forest.validate().is_ok());
        assert_eq!(r.forest.parent(2), &Arc::root());
        assert_eq!(r.forest.parent(1), &Arc::root());
        assert_eq!(r.forest.parent(3), &Arc::new(1, "obj"));
        assert_eq!(
            r.repairs,
            vec![(2, RepairAction::CycleBreak), (1, RepairAction::RefHead)]
        );
    }

    #[test]
    fn empty_sentence_gives_empty_forests() {
        let s = Sentence::new("empty", Vec::new());
        let r = split_sentence(&s, &SplitConfig::default());
        for kind in TreeKind::ALL {
            assert!(r.forest(kind).is_empty());
        }
    }

    #[test]
    fn tree_kind_names_round_trip() {
        for kind in TreeKind::ALL {
            assert_eq!(kind.name().parse::<TreeKind>(), Ok(kind));
        }
        assert!("sweep".parse::<TreeKind>().is_err());
    }
}
