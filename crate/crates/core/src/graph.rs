//! Enhanced dependency graphs and single-headed forests.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::conllu::Sentence;

/// A labelled enhanced dependency. Head 0 is the artificial root.
#[derive(Clone, Debug, Eq, Hash, Ord, PartialEq, PartialOrd)]
pub struct EudEdge {
    pub head: usize,
    pub dep: usize,
    pub label: String,
}

impl EudEdge {
    pub fn new(head: usize, dep: usize, label: impl Into<String>) -> Self {
        EudEdge {
            head,
            dep,
            label: label.into(),
        }
    }
}

impl fmt::Display for EudEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.head, self.dep, self.label)
    }
}

/// An enhanced dependency graph: tokens may have any number of heads.
#[derive(Clone, Debug, Default, Eq, PartialEq)]
pub struct EudGraph {
    pub n: usize,
    pub edges: BTreeSet<EudEdge>,
}

impl EudGraph {
    pub fn new(n: usize) -> Self {
        EudGraph {
            n,
            edges: BTreeSet::new(),
        }
    }

    /// One edge per DEPS entry of every token.
    pub fn from_sentence(s: &Sentence) -> Self {
        let edges = s
            .tokens
            .iter()
            .flat_map(|t| {
                t.deps
                    .iter()
                    .map(move |(head, label)| EudEdge::new(*head, t.id, label.clone()))
            })
            .collect();
        EudGraph { n: s.len(), edges }
    }

    /// Incoming edges of `dep`, ordered by head then label.
    pub fn incoming(&self, dep: usize) -> impl Iterator<Item = &EudEdge> {
        self.edges.iter().filter(move |e| e.dep == dep)
    }

    pub fn in_degree(&self, dep: usize) -> usize {
        self.incoming(dep).count()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// `graph_of_sentence`.
pub fn graph_of_sentence(s: &Sentence) -> EudGraph {
    EudGraph::from_sentence(s)
}

/// The parent arc of a token in a forest.
#[derive(Clone, Debug, Eq, Hash, PartialEq)]
pub struct Arc {
    pub head: usize,
    pub label: String,
}

impl Arc {
    pub fn new(head: usize, label: impl Into<String>) -> Self {
        Arc {
            head,
            label: label.into(),
        }
    }

    pub fn root() -> Self {
        Arc::new(0, "root")
    }
}

#[derive(Debug, Error, Eq, PartialEq)]
pub enum ForestError {
    #[error("token {dep} has head {head} outside 0..={n}")]
    HeadOutOfRange { dep: usize, head: usize, n: usize },
    #[error("token {0} is its own head")]
    SelfLoop(usize),
    #[error("cycle through token {0}")]
    Cycle(usize),
}

/// A single-headed structure over tokens `1..=n`, rooted at node 0.
///
/// Several tokens may attach to 0.
#[derive(Clone, Debug, Eq, Hash, PartialEq)]
pub struct DepForest {
    parents: Vec<Arc>,
}

impl DepForest {
    /// Build a forest, checking range and acyclicity.
    pub fn new(parents: Vec<Arc>) -> Result<Self, ForestError> {
        let forest = DepForest { parents };
        forest.validate()?;
        Ok(forest)
    }

    /// Build without checking. Callers must uphold the invariants.
    pub(crate) fn from_parents_unchecked(parents: Vec<Arc>) -> Self {
        DepForest { parents }
    }

    /// Every token attached to the root with label `root`.
    pub fn flat(n: usize) -> Self {
        DepForest {
            parents: vec![Arc::root(); n],
        }
    }

    /// The basic tree stored in the HEAD and DEPREL columns.
    pub fn from_basic(s: &Sentence) -> Result<Self, ForestError> {
        DepForest::new(
            s.tokens
                .iter()
                .map(|t| Arc::new(t.head, t.deprel.clone()))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.parents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parents.is_empty()
    }

    /// Parent arc of the token with 1-based id `dep`.
    pub fn parent(&self, dep: usize) -> &Arc {
        &self.parents[dep - 1]
    }

    pub fn parents(&self) -> &[Arc] {
        &self.parents
    }

    /// `(dep, arc)` pairs with 1-based dependents.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, &Arc)> {
        self.parents.iter().enumerate().map(|(i, a)| (i + 1, a))
    }

    pub fn set_parent(&mut self, dep: usize, arc: Arc) {
        self.parents[dep - 1] = arc;
    }

    pub fn validate(&self) -> Result<(), ForestError> {
        let n = self.parents.len();
        for (dep, arc) in self.arcs() {
            if arc.head > n {
                return Err(ForestError::HeadOutOfRange {
                    dep,
                    head: arc.head,
                    n,
                });
            }
            if arc.head == dep {
                return Err(ForestError::SelfLoop(dep));
            }
        }
        match find_cycles(&heads_of(&self.parents)).first() {
            Some(cycle) => Err(ForestError::Cycle(cycle[0])),
            None => Ok(()),
        }
    }

    /// The forest's arcs as enhanced edges.
    pub fn to_edges(&self) -> Vec<EudEdge> {
        self.arcs()
            .map(|(dep, a)| EudEdge::new(a.head, dep, a.label.clone()))
            .collect()
    }

    /// Write the forest into the HEAD/DEPREL columns of a copy of `s`,
    /// clearing DEPS.
    pub fn to_sentence(&self, s: &Sentence) -> Sentence {
        let mut out = s.clone();
        for (token, arc) in out.tokens.iter_mut().zip(&self.parents) {
            token.head = arc.head;
            token.deprel = arc.label.clone();
            token.deps.clear();
        }
        out
    }
}

/// Heads indexed by token id (index 0 unused, kept as 0).
pub(crate) fn heads_of(parents: &[Arc]) -> Vec<usize> {
    std::iter::once(0)
        .chain(parents.iter().map(|a| a.head))
        .collect()
}

/// All cycles in a head vector (`heads[0]` is the root and ignored).
///
/// Each cycle is returned once, as token ids in following order starting
/// from its smallest member.
pub(crate) fn find_cycles(heads: &[usize]) -> Vec<Vec<usize>> {
    const UNSEEN: usize = usize::MAX;
    let n = heads.len();
    // Visit mark: the start token of the walk that first reached a node.
    let mut mark = vec![UNSEEN; n];
    let mut cycles = Vec::new();
    if n > 0 {
        mark[0] = 0;
    }

    for start in 1..n {
        if mark[start] != UNSEEN {
            continue;
        }
        let mut v = start;
        while v < n && mark[v] == UNSEEN {
            mark[v] = start;
            v = heads[v];
        }
        if v < n && v != 0 && mark[v] == start {
            let mut cycle = vec![v];
            let mut u = heads[v];
            while u != v {
                cycle.push(u);
                u = heads[u];
            }
            let min_pos = cycle
                .iter()
                .enumerate()
                .min_by_key(|(_, &t)| t)
                .map(|(i, _)| i)
                .unwrap();
            cycle.rotate_left(min_pos);
            cycles.push(cycle);
        }
    }

    cycles
}
