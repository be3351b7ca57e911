//! Leaf-labelled binary trees and the diagrammatic moment constants.
//!
//! `enumerate_trees(n)` lists the isomorphism classes of binary trees whose
//! leaves carry the labels `0..=n+1` and whose internal vertices are unlabelled
//! of degree 3 — the diagrams of the (n+1)-st cluster moment, equivalently the
//! n-point size-biased moment, of which there are `(2n-1)!!`. They are built by
//! leaf insertion: a tree with leaves `0..=k` has `2k-1` edges and inserting
//! leaf `k+1` into each edge yields every larger class exactly once.
//!
//! `diagram_moment(n, [P_1..P_n])` attaches monomial `P_i` to leaf `i` (the
//! remaining leaves integrate against 1), places an independent κ displacement
//! on every edge, and computes `E[Π P_i(X_i)]` with `X_i` the sum of edge
//! displacements on the path from leaf 0 — the bracketed constant of the
//! scaling-limit moment formula.

use super::kappa::{KappaError, KappaModel};
use super::monomial::Monomial;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TreeError {
    #[error("tree order {0} outside supported range 1..=7")]
    OrderOutOfRange(usize),
    #[error("expected {0} monomials, got {1}")]
    WrongMonomialCount(usize, usize),
    #[error("total monomial degree {0} exceeds 8")]
    DegreeTooLarge(usize),
    #[error("diagram expansion too large: {0} terms")]
    ExpansionTooLarge(u128),
    #[error(transparent)]
    Kappa(#[from] KappaError),
}

/// Binary tree with leaves `0..n_leaves` and unlabelled internal vertices.
#[derive(Debug, Clone)]
pub struct DiagramTree {
    pub n_leaves: usize,
    /// Edges as vertex pairs; vertices `0..n_leaves` are the leaves,
    /// the rest are internal.
    pub edges: Vec<(usize, usize)>,
}

impl DiagramTree {
    fn single_edge() -> Self {
        DiagramTree { n_leaves: 2, edges: vec![(0, 1)] }
    }

    fn n_vertices(&self) -> usize {
        self.edges.len() + 1
    }

    /// Insert a new leaf into edge `e`, subdividing it.
    fn insert_leaf(&self, e: usize) -> Self {
        let mut t = self.clone();
        let new_leaf = self.n_leaves;
        // shift internal vertex ids up by one to keep leaves contiguous
        let shift = |v: usize| if v >= new_leaf { v + 1 } else { v };
        for edge in t.edges.iter_mut() {
            *edge = (shift(edge.0), shift(edge.1));
        }
        let (a, b) = t.edges[e];
        let mid = self.n_vertices() + 1; // one past the shifted ids
        t.edges[e] = (a, mid);
        t.edges.push((mid, b));
        t.edges.push((mid, new_leaf));
        t.n_leaves += 1;
        t
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n_vertices()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Edge indices on the path from leaf 0 to vertex `target`.
    pub fn path_from_root(&self, target: usize) -> Vec<usize> {
        let n = self.n_vertices();
        let mut prev = vec![usize::MAX; n];
        let mut prev_edge = vec![usize::MAX; n];
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            adj[a].push((b, i));
            adj[b].push((a, i));
        }
        let mut queue = std::collections::VecDeque::from([0usize]);
        prev[0] = 0;
        while let Some(v) = queue.pop_front() {
            for &(w, e) in &adj[v] {
                if prev[w] == usize::MAX {
                    prev[w] = v;
                    prev_edge[w] = e;
                    queue.push_back(w);
                }
            }
        }
        let mut path = Vec::new();
        let mut v = target;
        while v != 0 {
            path.push(prev_edge[v]);
            v = prev[v];
        }
        path
    }

    /// Canonical form rooted at leaf 0, used to assert pairwise
    /// non-isomorphism of the enumeration.
    pub fn canonical_form(&self) -> String {
        let adj = self.adjacency();
        fn go(v: usize, parent: usize, adj: &[Vec<usize>], n_leaves: usize) -> String {
            let mut kids: Vec<String> = adj[v]
                .iter()
                .filter(|&&w| w != parent)
                .map(|&w| go(w, v, adj, n_leaves))
                .collect();
            if kids.is_empty() {
                format!("L{v}")
            } else {
                kids.sort();
                format!("({})", kids.join(","))
            }
        }
        let root_nbr = adj[0][0];
        go(root_nbr, 0, &adj, self.n_leaves)
    }
}

/// All isomorphism classes with leaves `0..=n+1`; exactly `(2n-1)!!` of them.
pub fn enumerate_trees(n: usize) -> Result<Vec<DiagramTree>, TreeError> {
    if n == 0 || n > 7 {
        return Err(TreeError::OrderOutOfRange(n));
    }
    let mut trees = vec![DiagramTree::single_edge()];
    // grow from leaves {0,1} to leaves {0..=n+1}
    for _ in 2..=(n + 1) {
        let mut next = Vec::with_capacity(trees.len() * (2 * trees[0].n_leaves - 3));
        for t in &trees {
            for e in 0..t.edges.len() {
                next.push(t.insert_leaf(e));
            }
        }
        trees = next;
    }
    Ok(trees)
}

pub fn double_factorial_odd(n: usize) -> u64 {
    (1..=n).map(|k| 2 * k as u64 - 1).product()
}

/// The bracketed diagram constant: sum over trees of
/// `E[Π_i P_i(X_i)]`, monomial `P_i` on leaf `i`, κ on every edge.
pub fn diagram_moment(n: usize, monomials: &[Monomial], kappa: &KappaModel) -> Result<f64, TreeError> {
    if monomials.len() != n {
        return Err(TreeError::WrongMonomialCount(n, monomials.len()));
    }
    let total_degree: usize = monomials.iter().map(|p| p.degree()).sum();
    if total_degree > 8 {
        return Err(TreeError::DegreeTooLarge(total_degree));
    }
    let trees = enumerate_trees(n)?;
    let mut sum = 0.0;
    for t in &trees {
        sum += tree_moment(t, monomials, kappa)?;
    }
    Ok(sum)
}

/// `E[Π_i P_i(X_i)]` for one tree: expand each factor ⟨X_i, u⟩ over the edges
/// of leaf i's root path, then take the product of per-edge κ moments.
pub fn tree_moment(tree: &DiagramTree, monomials: &[Monomial], kappa: &KappaModel) -> Result<f64, TreeError> {
    // factor list: (leaf path, direction)
    let mut paths = Vec::new();
    let mut factors: Vec<(usize, Vec<f64>)> = Vec::new();
    for (i, p) in monomials.iter().enumerate() {
        let leaf = i + 1;
        let path = tree.path_from_root(leaf);
        let pid = paths.len();
        paths.push(path);
        for u in p.directions() {
            factors.push((pid, u.clone()));
        }
    }
    if factors.is_empty() {
        return Ok(1.0); // every kappa integrates to 1
    }
    let count: u128 = factors.iter().map(|(p, _)| paths[*p].len() as u128).product();
    if count > 50_000_000 {
        return Err(TreeError::ExpansionTooLarge(count));
    }
    let n_edges = tree.edges.len();
    let mut assignment = vec![0usize; factors.len()];
    let mut total = 0.0;
    loop {
        // group directions by assigned edge, take product of kappa moments
        let mut per_edge: Vec<Vec<&[f64]>> = vec![Vec::new(); n_edges];
        for (f, &(pid, ref u)) in factors.iter().enumerate() {
            per_edge[paths[pid][assignment[f]]].push(u.as_slice());
        }
        let mut term = 1.0;
        for dirs in per_edge.iter().filter(|d| !d.is_empty()) {
            if dirs.len() % 2 == 1 {
                term = 0.0;
                break;
            }
            let m = Monomial::new(kappa.d, dirs.iter().map(|u| u.to_vec()).collect())
                .expect("directions already validated");
            term *= kappa.monomial_moment(1, &m)?;
            if term == 0.0 {
                break;
            }
        }
        total += term;
        // advance mixed-radix assignment
        let mut i = 0;
        loop {
            if i == factors.len() {
                return Ok(total);
            }
            assignment[i] += 1;
            if assignment[i] < paths[factors[i].0].len() {
                break;
            }
            assignment[i] = 0;
            i += 1;
        }
    }
}
