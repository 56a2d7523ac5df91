//! Maximum spanning arborescence (Chu-Liu-Edmonds) over a dense score
//! matrix rooted at vertex 0.
//!
//! `scores[h][d]` is the score of the arc from `h` to `d`. Arcs into the
//! root and self-loops are ignored. Ties are broken towards the lower head
//! index.

/// Heads of the maximum spanning arborescence rooted at 0. `heads[0]` is 0.
pub fn max_arborescence(scores: &[Vec<f64>]) -> Vec<usize> {
    let n = scores.len();
    for row in scores {
        assert_eq!(row.len(), n, "score matrix must be square");
    }
    if n <= 1 {
        return vec![0; n];
    }

    let mut matrix: Vec<Vec<f64>> = scores.to_vec();
    for (v, row) in matrix.iter_mut().enumerate() {
        row[v] = f64::NEG_INFINITY;
    }
    for row in matrix.iter_mut() {
        row[0] = f64::NEG_INFINITY;
    }
    solve(&matrix)
}

fn best_heads(scores: &[Vec<f64>]) -> Vec<usize> {
    let n = scores.len();
    let mut heads = vec![0; n];
    for (d, head) in heads.iter_mut().enumerate().skip(1) {
        let mut best = 0;
        let mut best_score = scores[0][d];
        for (h, row) in scores.iter().enumerate().skip(1) {
            if h != d && row[d] > best_score {
                best = h;
                best_score = row[d];
            }
        }
        *head = best;
    }
    heads
}

fn first_cycle(heads: &[usize]) -> Option<Vec<usize>> {
    crate::graph::find_cycles(heads).into_iter().next()
}

fn solve(scores: &[Vec<f64>]) -> Vec<usize> {
    let n = scores.len();
    let heads = best_heads(scores);
    let cycle = match first_cycle(&heads) {
        Some(cycle) => cycle,
        None => return heads,
    };

    let mut in_cycle = vec![false; n];
    for &v in &cycle {
        in_cycle[v] = true;
    }

    // Contracted vertex set: the root, the vertices outside the cycle in
    // their original order, then the cycle as one vertex.
    let outside: Vec<usize> = (0..n).filter(|&v| !in_cycle[v]).collect();
    let m = outside.len() + 1;
    let c = m - 1;

    let mut contracted = vec![vec![f64::NEG_INFINITY; m]; m];
    // For an arc u -> cycle: the cycle vertex it enters.
    let mut enter = vec![0usize; m];
    // For an arc cycle -> v: the cycle vertex it leaves from.
    let mut leave = vec![0usize; m];

    for (i, &u) in outside.iter().enumerate() {
        for (j, &v) in outside.iter().enumerate() {
            contracted[i][j] = scores[u][v];
        }

        let mut best = f64::NEG_INFINITY;
        let mut best_v = cycle[0];
        for &v in &cycle {
            let s = scores[u][v] - scores[heads[v]][v];
            if s > best {
                best = s;
                best_v = v;
            }
        }
        contracted[i][c] = best;
        enter[i] = best_v;

        let mut best = f64::NEG_INFINITY;
        let mut best_u = cycle[0];
        let mut by_index = cycle.clone();
        by_index.sort_unstable();
        for &h in &by_index {
            if scores[h][u] > best {
                best = scores[h][u];
                best_u = h;
            }
        }
        contracted[c][i] = best;
        leave[i] = best_u;
    }
    contracted[c][0] = f64::NEG_INFINITY;

    let sub = solve(&contracted);

    let mut result = heads.clone();
    for (j, &v) in outside.iter().enumerate().skip(1) {
        result[v] = if sub[j] == c {
            leave[j]
        } else {
            outside[sub[j]]
        };
    }
    let entering_from = sub[c];
    let u = outside[entering_from];
    result[enter[entering_from]] = u;
    result[0] = 0;
    result
}

/// Total score of a head assignment (root excluded).
pub fn tree_score(scores: &[Vec<f64>], heads: &[usize]) -> f64 {
    heads
        .iter()
        .enumerate()
        .skip(1)
        .map(|(d, &h)| scores[h][d])
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn picks_best_heads_without_cycles() {
        let s = vec![
            vec![0.0, 5.0, 1.0],
            vec![0.0, 0.0, 4.0],
            vec![0.0, 1.0, 0.0],
        ];
        assert_eq!(max_arborescence(&s), vec![0, 0, 1]);
    }

    #[test]
    fn breaks_two_cycle() {
        // 1 <-> 2 strongly preferred; root arc into 2 is the better entry.
        let s = vec![
            vec![0.0, 1.0, 3.0],
            vec![0.0, 0.0, 10.0],
            vec![0.0, 10.0, 0.0],
        ];
        let heads = max_arborescence(&s);
        assert_eq!(heads, vec![0, 2, 0]);
    }

    #[test]
    fn nested_contraction() {
        // Classic example: 1 <-> 2 cycle, 3 hanging off 2.
        let s = vec![
            vec![0.0, 9.0, 10.0, 9.0],
            vec![0.0, 0.0, 20.0, 3.0],
            vec![0.0, 30.0, 0.0, 30.0],
            vec![0.0, 11.0, 0.0, 0.0],
        ];
        let heads = max_arborescence(&s);
        assert_eq!(heads, vec![0, 2, 0, 2]);
        assert_eq!(tree_score(&s, &heads), 70.0);
    }

    #[test]
    fn trivial_sizes() {
        assert!(max_arborescence(&[]).is_empty());
        assert_eq!(max_arborescence(&[vec![0.0]]), vec![0]);
    }
}
