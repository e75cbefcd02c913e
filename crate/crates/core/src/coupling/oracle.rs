//! Exact minimum-entropy coupling for two small marginals.
//!
//! Entropy is concave, so its minimum over the transportation polytope of
//! two marginals is attained at a vertex. Every vertex is the unique solution
//! supported on some spanning tree of the bipartite graph `K(n, m)`, so
//! enumerating spanning trees and keeping the non-negative solutions visits
//! every vertex.

use std::sync::OnceLock;

use super::{Cell, Coupling};
use crate::dist::{entropy_of_masses, Dist};
use crate::error::{Error, Result};

const MAX_STATES: usize = 4;

type Tree = Vec<(usize, usize)>;

fn trees(n: usize, m: usize) -> &'static [Tree] {
    static TABLE: OnceLock<Vec<Vec<Tree>>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut out = Vec::with_capacity(MAX_STATES * MAX_STATES);
        for n in 1..=MAX_STATES {
            for m in 1..=MAX_STATES {
                out.push(spanning_trees(n, m));
            }
        }
        out
    });
    &table[(n - 1) * MAX_STATES + (m - 1)]
}

/// All spanning trees of `K(n, m)`, as edge lists of `(row, col)`.
fn spanning_trees(n: usize, m: usize) -> Vec<Tree> {
    let edges: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..m).map(move |j| (i, j))).collect();
    let k = n + m - 1;
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(k);
    choose(&edges, 0, k, &mut chosen, &mut |subset| {
        if is_forest(n, subset) {
            out.push(subset.to_vec());
        }
    });
    out
}

fn choose(
    edges: &[(usize, usize)],
    start: usize,
    k: usize,
    chosen: &mut Vec<(usize, usize)>,
    visit: &mut impl FnMut(&[(usize, usize)]),
) {
    if chosen.len() == k {
        visit(chosen);
        return;
    }
    let need = k - chosen.len();
    for e in start..=edges.len().saturating_sub(need) {
        chosen.push(edges[e]);
        choose(edges, e + 1, k, chosen, visit);
        chosen.pop();
    }
}

fn is_forest(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut parent: Vec<usize> = (0..n + MAX_STATES).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(i, j) in edges {
        let a = find(&mut parent, i);
        let b = find(&mut parent, n + j);
        if a == b {
            return false;
        }
        parent[a] = b;
    }
    true
}

/// Solves for the flows on a spanning tree by peeling leaves. Returns `None`
/// when some flow is negative, i.e. the tree's basic solution is infeasible.
fn tree_solution(tree: &[(usize, usize)], a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    let n = a.len();
    let mut remaining: Vec<f64> = a.iter().chain(b).copied().collect();
    let mut degree = vec![0usize; remaining.len()];
    for &(i, j) in tree {
        degree[i] += 1;
        degree[n + j] += 1;
    }
    let mut flow = vec![f64::NAN; tree.len()];
    for _ in 0..tree.len() {
        let (e, leaf, other) = tree.iter().enumerate().find_map(|(e, &(i, j))| {
            if !flow[e].is_nan() {
                None
            } else if degree[i] == 1 {
                Some((e, i, n + j))
            } else if degree[n + j] == 1 {
                Some((e, n + j, i))
            } else {
                None
            }
        })?;
        let f = remaining[leaf];
        if f < -1e-12 {
            return None;
        }
        flow[e] = f.max(0.0);
        remaining[leaf] = 0.0;
        remaining[other] -= f;
        degree[leaf] -= 1;
        degree[other] -= 1;
    }
    Some(flow)
}

/// Exact minimum-entropy coupling of two marginals with at most four states each.
pub fn brute_force_mec_small(marginals: &[Dist]) -> Result<Coupling> {
    let [a, b] = marginals else {
        return Err(Error::InvalidParameter(format!(
            "exact oracle takes exactly 2 marginals, got {}",
            marginals.len()
        )));
    };
    if a.len() > MAX_STATES || b.len() > MAX_STATES {
        return Err(Error::InvalidParameter(format!(
            "exact oracle supports at most {MAX_STATES} states per marginal"
        )));
    }
    let mut best: Option<(f64, &Tree, Vec<f64>)> = None;
    for tree in trees(a.len(), b.len()) {
        let Some(flow) = tree_solution(tree, a.probs(), b.probs()) else {
            continue;
        };
        let h = entropy_of_masses(&flow);
        if best.as_ref().is_none_or(|(bh, _, _)| h < *bh) {
            best = Some((h, tree, flow));
        }
    }
    let (_, tree, flow) = best.ok_or_else(|| {
        Error::InvalidParameter("no feasible vertex; marginals must share total mass".into())
    })?;
    let cells = tree
        .iter()
        .zip(flow)
        .filter(|(_, f)| *f > 0.0)
        .map(|(&(i, j), mass)| Cell { idx: vec![i, j], mass })
        .collect();
    Ok(Coupling::from_parts_unchecked(vec![a.len(), b.len()], cells))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::validate_coupling;

    fn d(v: &[f64]) -> Dist {
        Dist::new(v.to_vec()).unwrap()
    }

    #[test]
    fn spanning_tree_counts() {
        // Scoins' formula: K(n, m) has n^(m-1) m^(n-1) spanning trees.
        for n in 1..=4usize {
            for m in 1..=4usize {
                let expected = n.pow(m as u32 - 1) * m.pow(n as u32 - 1);
                assert_eq!(trees(n, m).len(), expected, "K({n},{m})");
            }
        }
    }

    #[test]
    fn point_mass_against_two_states() {
        let c = brute_force_mec_small(&[d(&[1.0]), d(&[0.3, 0.7])]).unwrap();
        let mut cells: Vec<_> = c.cells().iter().map(|c| (c.idx.clone(), c.mass)).collect();
        cells.sort_by(|a, b| a.0.cmp(&b.0));
        assert_eq!(cells, vec![(vec![0, 0], 0.3), (vec![0, 1], 0.7)]);
    }

    #[test]
    fn known_minima() {
        let c = brute_force_mec_small(&[d(&[0.5, 0.5]), d(&[0.5, 0.5])]).unwrap();
        assert!((c.entropy() - 1.0).abs() < 1e-12);
        // vertices {0.5,0.1,0,0.4} and {0.1,0.5,0.4,0} both give 1.360964
        let m = [d(&[0.6, 0.4]), d(&[0.5, 0.5])];
        let c = brute_force_mec_small(&m).unwrap();
        assert!((c.entropy() - 1.360964).abs() < 1e-6);
        assert!(validate_coupling(&c, &m, 1e-12).unwrap().passed);
    }

    #[test]
    fn guards() {
        assert!(brute_force_mec_small(&[d(&[1.0])]).is_err());
        assert!(brute_force_mec_small(&[d(&[1.0]), d(&[1.0]), d(&[1.0])]).is_err());
        assert!(brute_force_mec_small(&[d(&[0.2; 5]), d(&[1.0])]).is_err());
    }
}
