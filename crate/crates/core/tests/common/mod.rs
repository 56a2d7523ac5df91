//! Helpers and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use eudsplit::conllu::{read_conllu_str, EmptyNodePolicy, Sentence};
use eudsplit::graph::{Arc, DepForest};
use rand::Rng;

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("data")
        .join(name)
}

pub fn load(name: &str) -> Sentence {
    let text = std::fs::read_to_string(data(name)).unwrap();
    let mut corpus = read_conllu_str(&text, EmptyNodePolicy::Reject).unwrap();
    assert_eq!(corpus.len(), 1, "{} holds one sentence", name);
    corpus.remove(0)
}

/// Forest from (head, label) pairs for tokens 1..=n.
pub fn forest(arcs: &[(usize, &str)]) -> DepForest {
    DepForest::new(arcs.iter().map(|&(h, l)| Arc::new(h, l)).collect()).unwrap()
}

/// (head, label) of every token, for compact assertions.
pub fn arcs_of(f: &DepForest) -> Vec<(usize, String)> {
    f.parents()
        .iter()
        .map(|a| (a.head, a.label.clone()))
        .collect()
}

/// `heads[d]` for d in 1..=n, index 0 unused. True when following heads
/// from every token reaches 0.
pub fn reaches_root(heads: &[usize]) -> bool {
    let n = heads.len() - 1;
    (1..=n).all(|start| {
        let mut cur = start;
        for _ in 0..=n {
            if cur == 0 {
                return true;
            }
            cur = heads[cur];
        }
        cur == 0
    })
}

/// Every arborescence rooted at 0 over tokens 1..=n, enumerated one head
/// assignment at a time. Returns the best score and every optimal head
/// vector (index 0 unused).
pub fn brute_force_arborescences(scores: &[Vec<f64>]) -> (f64, Vec<Vec<usize>>) {
    let n = scores.len() - 1;
    let mut best = f64::NEG_INFINITY;
    let mut optimal = Vec::new();
    let mut heads = vec![0usize; n + 1];
    // Odometer over heads[1..=n] in 0..=n, skipping self loops.
    loop {
        if (1..=n).all(|d| heads[d] != d) && reaches_root(&heads) {
            let total: f64 = (1..=n).map(|d| scores[heads[d]][d]).sum();
            if total > best + 1e-9 {
                best = total;
                optimal.clear();
            }
            if (total - best).abs() <= 1e-9 {
                optimal.push(heads.clone());
            }
        }
        let mut pos = 1;
        loop {
            if pos > n {
                return (best, optimal);
            }
            heads[pos] += 1;
            if heads[pos] <= n {
                break;
            }
            heads[pos] = 0;
            pos += 1;
        }
    }
}

/// Heads of a uniformly random rooted labelled tree on {0..=n}, rooted at
/// 0, decoded from a random Prüfer sequence.
pub fn prufer_heads<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let nodes = n + 1;
    if n == 0 {
        return vec![0];
    }
    if n == 1 {
        return vec![0, 0];
    }
    let seq: Vec<usize> = (0..nodes - 2).map(|_| rng.gen_range(0..nodes)).collect();
    let mut degree = vec![1usize; nodes];
    for &v in &seq {
        degree[v] += 1;
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    for &v in &seq {
        let leaf = (0..nodes).find(|&u| degree[u] == 1).unwrap();
        adj[leaf].push(v);
        adj[v].push(leaf);
        degree[leaf] -= 1;
        degree[v] -= 1;
    }
    let rest: Vec<usize> = (0..nodes).filter(|&u| degree[u] == 1).collect();
    adj[rest[0]].push(rest[1]);
    adj[rest[1]].push(rest[0]);

    let mut heads = vec![0usize; nodes];
    let mut seen = vec![false; nodes];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                heads[v] = u;
                stack.push(v);
            }
        }
    }
    heads
}

/// True unless two token-to-token arcs pointing the same way cross.
pub fn encodable(heads: &[usize]) -> bool {
    let n = heads.len() - 1;
    let spans: Vec<(usize, usize, bool)> = (1..=n)
        .filter(|&d| heads[d] != 0)
        .map(|d| {
            let h = heads[d];
            (d.min(h), d.max(h), h > d)
        })
        .collect();
    for (i, &(a, b, left)) in spans.iter().enumerate() {
        for &(c, d, left2) in &spans[i + 1..] {
            let cross = (a < c && c < b && b < d) || (c < a && a < d && d < b);
            if left == left2 && cross {
                return false;
            }
        }
    }
    true
}

/// A uniformly random forest among those the bracket encoding can express.
pub fn random_encodable_forest<R: Rng>(rng: &mut R, n: usize) -> DepForest {
    const RELATIONS: [&str; 6] = ["nsubj", "obj", "det", "obl:-2", "conj:+1", "amod"];
    loop {
        let heads = prufer_heads(rng, n);
        if encodable(&heads) {
            let parents = (1..=n)
                .map(|d| {
                    let label = if heads[d] == 0 {
                        "root"
                    } else {
                        RELATIONS[rng.gen_range(0..RELATIONS.len())]
                    };
                    Arc::new(heads[d], label)
                })
                .collect();
            return DepForest::new(parents).unwrap();
        }
    }
}
