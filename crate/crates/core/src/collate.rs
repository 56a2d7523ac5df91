//! Merging forests back into one enhanced graph.

use std::collections::BTreeMap;

use crate::conllu::Sentence;
use crate::graph::{DepForest, EudEdge, EudGraph};
use crate::label::{base_relation, relexicalize_label, LabelWarning};
use crate::split::TreeKind;

#[derive(Clone, Debug, Eq, PartialEq)]
pub struct CollationPolicy {
    /// Trees in priority order; the first label seen for a (head, dep)
    /// pair wins.
    pub tree_order: Vec<TreeKind>,
    /// Keep a root arc only when the token has no other head, except for
    /// conjunct-tree root arcs that replace a basic `conj` arc.
    pub drop_extra_roots: bool,
    /// Non-basic trees only contribute arcs that differ from the basic tree.
    pub restrict_to_phenomenon: bool,
}

impl Default for CollationPolicy {
    fn default() -> Self {
        CollationPolicy {
            tree_order: TreeKind::ALL.to_vec(),
            drop_extra_roots: false,
            restrict_to_phenomenon: false,
        }
    }
}

impl CollationPolicy {
    pub fn validate(&self) -> Result<(), String> {
        let mut seen = self.tree_order.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.tree_order.len() {
            return Err("tree order contains duplicates".to_owned());
        }
        if self.tree_order.is_empty() {
            return Err("tree order is empty".to_owned());
        }
        Ok(())
    }
}

/// Forests of one sentence, keyed by tree type.
pub type Forests<'a> = BTreeMap<TreeKind, &'a DepForest>;

/// A collated graph and the relexicalization warnings it produced.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Collated {
    pub graph: EudGraph,
    pub warnings: Vec<LabelWarning>,
}

/// Union the arcs of all forests in policy order, keyed on (head, dep).
///
/// Trees named in the policy but absent from `forests` are skipped.
pub fn collate(forests: &Forests<'_>, s: &Sentence, policy: &CollationPolicy) -> Collated {
    let n = s.len();
    let basic = forests.get(&TreeKind::Basic).copied();
    let mut chosen: BTreeMap<(usize, usize), String> = BTreeMap::new();
    let mut pending_roots: Vec<(usize, String, bool)> = Vec::new();
    let mut warnings = Vec::new();

    for kind in &policy.tree_order {
        let forest = match forests.get(kind) {
            Some(f) => *f,
            None => continue,
        };
        assert_eq!(
            forest.len(),
            n,
            "{} forest does not match the sentence",
            kind
        );

        for (dep, arc) in forest.arcs() {
            let basic_arc = basic.map(|b| b.parent(dep));
            if policy.restrict_to_phenomenon && *kind != TreeKind::Basic {
                if let Some(b) = basic_arc {
                    if b.head == arc.head {
                        continue;
                    }
                }
            }

            let (label, warning) = relexicalize_label(&arc.label, arc.head, dep, s);
            warnings.extend(warning);

            if arc.head == 0 && policy.drop_extra_roots {
                let propagated = *kind == TreeKind::Conjunct
                    && basic_arc.is_some_and(|b| base_relation(&b.label) == "conj");
                pending_roots.push((dep, label, propagated));
                continue;
            }
            chosen.entry((arc.head, dep)).or_insert(label);
        }
    }

    for (dep, label, propagated) in pending_roots {
        let has_head = chosen.keys().any(|&(h, d)| d == dep && h != 0);
        if propagated || !has_head {
            chosen.entry((0, dep)).or_insert(label);
        }
    }

    let edges = chosen
        .into_iter()
        .map(|((head, dep), label)| EudEdge::new(head, dep, label))
        .collect();
    Collated {
        graph: EudGraph { n, edges },
        warnings,
    }
}

/// Copy of `s` whose DEPS column holds `g`.
pub fn apply_to_sentence(g: &EudGraph, s: &Sentence) -> Sentence {
    let mut out = s.clone();
    for token in out.tokens.iter_mut() {
        token.deps.clear();
    }
    for edge in &g.edges {
        if let Some(token) = out.tokens.get_mut(edge.dep - 1) {
            token.deps.push((edge.head, edge.label.clone()));
        }
    }
    for token in out.tokens.iter_mut() {
        token.canonicalize_deps();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conllu::Token;
    use crate::graph::Arc;

    fn sentence(n: usize) -> Sentence {
        Sentence::new(
            "c",
            (1..=n).map(|i| Token::new(i, format!("w{}", i))).collect(),
        )
    }

    fn forest(heads: &[(usize, &str)]) -> DepForest {
        DepForest::new(heads.iter().map(|&(h, l)| Arc::new(h, l)).collect()).unwrap()
    }

    #[test]
    fn identical_forests_collapse_to_one() {
        let s = sentence(2);
        let f = forest(&[(0, "root"), (1, "obj")]);
        let forests: Forests = TreeKind::ALL.iter().map(|&k| (k, &f)).collect();
        let g = collate(&forests, &s, &CollationPolicy::default()).graph;
        let expected: Vec<EudEdge> = f.to_edges();
        assert_eq!(g.edges.into_iter().collect::<Vec<_>>(), expected);
    }

    #[test]
    fn first_label_wins() {
        let s = sentence(2);
        let a = forest(&[(0, "root"), (1, "obj")]);
        let b = forest(&[(0, "root"), (1, "iobj")]);
        let forests: Forests = [(TreeKind::Basic, &a), (TreeKind::Control, &b)].into();
        let g = collate(&forests, &s, &CollationPolicy::default()).graph;
        assert!(g.edges.contains(&EudEdge::new(1, 2, "obj")));
        assert_eq!(g.len(), 2);

        let policy = CollationPolicy {
            tree_order: vec![TreeKind::Control, TreeKind::Basic],
            ..CollationPolicy::default()
        };
        let g = collate(&forests, &s, &policy).graph;
        assert!(g.edges.contains(&EudEdge::new(1, 2, "iobj")));
    }

    #[test]
    fn extra_roots_dropped_on_request() {
        let s = sentence(3);
        let basic = forest(&[(0, "root"), (1, "obj"), (0, "root")]);
        let relative = forest(&[(0, "root"), (1, "obj"), (2, "ref")]);
        let forests: Forests = [(TreeKind::Basic, &basic), (TreeKind::Relative, &relative)].into();

        let g = collate(&forests, &s, &CollationPolicy::default()).graph;
        assert!(g.edges.contains(&EudEdge::new(0, 3, "root")));

        let policy = CollationPolicy {
            drop_extra_roots: true,
            ..CollationPolicy::default()
        };
        let g = collate(&forests, &s, &policy).graph;
        assert!(!g.edges.contains(&EudEdge::new(0, 3, "root")));
        assert!(g.edges.contains(&EudEdge::new(0, 1, "root")));
        assert!(g.edges.contains(&EudEdge::new(2, 3, "ref")));
    }

    #[test]
    fn propagated_root_of_a_conjunct_survives() {
        let s = sentence(2);
        let basic = forest(&[(0, "root"), (1, "conj")]);
        let conjunct = forest(&[(0, "root"), (0, "root")]);
        let forests: Forests = [(TreeKind::Basic, &basic), (TreeKind::Conjunct, &conjunct)].into();
        let policy = CollationPolicy {
            drop_extra_roots: true,
            ..CollationPolicy::default()
        };
        let g = collate(&forests, &s, &policy).graph;
        assert!(g.edges.contains(&EudEdge::new(0, 2, "root")));
        assert!(g.edges.contains(&EudEdge::new(1, 2, "conj")));
    }

    #[test]
    fn apply_writes_deps() {
        let s = sentence(2);
        let empty = apply_to_sentence(&EudGraph::new(2), &s);
        assert!(empty.tokens.iter().all(|t| t.deps.is_empty()));

        let mut g = EudGraph::new(2);
        g.edges.insert(EudEdge::new(1, 2, "obj"));
        let out = apply_to_sentence(&g, &s);
        assert_eq!(out.tokens[1].deps, vec![(1, "obj".to_owned())]);
        assert!(out.tokens[0].deps.is_empty());
    }

    #[test]
    fn policy_validation() {
        assert!(CollationPolicy::default().validate().is_ok());
        let dup = CollationPolicy {
            tree_order: vec![TreeKind::Basic, TreeKind::Basic],
            ..CollationPolicy::default()
        };
        assert!(dup.validate().is_err());
    }
}
