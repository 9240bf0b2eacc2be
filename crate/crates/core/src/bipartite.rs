//! Bipartite graphs between buyers (left) and items (right), maximum
//! matchings, and the critical-set computation the solver's price raises are
//! driven by.
//!
//! A set of buyers `S` has deficiency `|S| - |N(S)|`. Among the sets of
//! maximum deficiency there is a unique minimal one (maximum-deficiency sets
//! are closed under intersection); we call it the critical set. It is empty
//! exactly when some matching saturates every buyer.

use std::collections::VecDeque;

#[derive(Clone, Debug)]
pub struct BipartiteGraph {
    n_left: usize,
    n_right: usize,
    adj: Vec<Vec<usize>>,  // left -> right neighbors, ascending
    radj: Vec<Vec<usize>>, // right -> left neighbors, ascending
}

impl BipartiteGraph {
    pub fn new(n_left: usize, n_right: usize) -> Self {
        BipartiteGraph {
            n_left,
            n_right,
            adj: vec![Vec::new(); n_left],
            radj: vec![Vec::new(); n_right],
        }
    }

    pub fn n_left(&self) -> usize {
        self.n_left
    }

    pub fn n_right(&self) -> usize {
        self.n_right
    }

    /// Insert an edge. Keeps neighbor lists sorted for deterministic scans.
    pub fn add_edge(&mut self, left: usize, right: usize) {
        debug_assert!(left < self.n_left && right < self.n_right);
        if let Err(pos) = self.adj[left].binary_search(&right) {
            self.adj[left].insert(pos, right);
        }
        if let Err(pos) = self.radj[right].binary_search(&left) {
            self.radj[right].insert(pos, left);
        }
    }

    pub fn has_edge(&self, left: usize, right: usize) -> bool {
        self.adj[left].binary_search(&right).is_ok()
    }

    pub fn neighbors(&self, left: usize) -> &[usize] {
        &self.adj[left]
    }

    pub fn right_neighbors(&self, right: usize) -> &[usize] {
        &self.radj[right]
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(l, rs)| rs.iter().map(move |&r| (l, r)))
    }

    /// Union of the right neighborhoods of `lefts`, ascending.
    pub fn neighborhood(&self, lefts: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.n_right];
        for &l in lefts {
            for &r in &self.adj[l] {
                seen[r] = true;
            }
        }
        (0..self.n_right).filter(|&r| seen[r]).collect()
    }

    /// Connected component containing the left vertex `start`, as sorted
    /// (left, right) vertex lists.
    pub fn component_of(&self, start: usize) -> (Vec<usize>, Vec<usize>) {
        let mut left_seen = vec![false; self.n_left];
        let mut right_seen = vec![false; self.n_right];
        left_seen[start] = true;
        let mut queue = VecDeque::from([(true, start)]);
        while let Some((is_left, v)) = queue.pop_front() {
            if is_left {
                for &r in &self.adj[v] {
                    if !right_seen[r] {
                        right_seen[r] = true;
                        queue.push_back((false, r));
                    }
                }
            } else {
                for &l in &self.radj[v] {
                    if !left_seen[l] {
                        left_seen[l] = true;
                        queue.push_back((true, l));
                    }
                }
            }
        }
        (
            (0..self.n_left).filter(|&l| left_seen[l]).collect(),
            (0..self.n_right).filter(|&r| right_seen[r]).collect(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    pub left: Vec<Option<usize>>,
    pub right: Vec<Option<usize>>,
}

impl Matching {
    pub fn new(n_left: usize, n_right: usize) -> Self {
        Matching {
            left: vec![None; n_left],
            right: vec![None; n_right],
        }
    }

    pub fn size(&self) -> usize {
        self.left.iter().filter(|x| x.is_some()).count()
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.left
            .iter()
            .enumerate()
            .filter_map(|(l, r)| r.map(|r| (l, r)))
            .collect()
    }

    pub fn covers(&self, lefts: &[usize]) -> bool {
        lefts.iter().all(|&l| self.left[l].is_some())
    }
}

/// Depth-first search for an augmenting path from `left`; flips the path into
/// `m` when found. The lowest free neighbor is preferred over displacing an
/// earlier vertex, so interchangeable vertices settle in index order.
fn try_augment(
    g: &BipartiteGraph,
    m: &mut Matching,
    left: usize,
    visited_right: &mut [bool],
) -> bool {
    for &r in g.neighbors(left) {
        if !visited_right[r] && m.right[r].is_none() {
            visited_right[r] = true;
            m.left[left] = Some(r);
            m.right[r] = Some(left);
            return true;
        }
    }
    for &r in g.neighbors(left) {
        if visited_right[r] {
            continue;
        }
        visited_right[r] = true;
        match m.right[r] {
            None => {
                m.left[left] = Some(r);
                m.right[r] = Some(left);
                return true;
            }
            Some(other) => {
                if try_augment(g, m, other, visited_right) {
                    m.left[left] = Some(r);
                    m.right[r] = Some(left);
                    return true;
                }
            }
        }
    }
    false
}

/// A maximum matching, deterministic for a given graph (vertices and
/// neighbors are scanned in ascending order).
pub fn max_matching(g: &BipartiteGraph) -> Matching {
    let mut m = Matching::new(g.n_left(), g.n_right());
    for l in 0..g.n_left() {
        let mut visited = vec![false; g.n_right()];
        try_augment(g, &mut m, l, &mut visited);
    }
    m
}

/// The unique minimal set of buyers with maximum deficiency, sorted. Empty
/// iff every buyer can be matched simultaneously.
///
/// Computed as the left vertices reachable from the unmatched left vertices
/// of a maximum matching by paths alternating non-matching / matching edges.
pub fn critical_set(g: &BipartiteGraph) -> Vec<usize> {
    let all: Vec<usize> = (0..g.n_left()).collect();
    critical_set_in(g, &all)
}

/// Critical set of the subgraph induced on the left vertices `active`
/// (ascending, no duplicates). Edges of inactive left vertices are ignored;
/// an isolated *active* vertex is always critical, an inactive one never is.
pub fn critical_set_in(g: &BipartiteGraph, active: &[usize]) -> Vec<usize> {
    let mut m = Matching::new(g.n_left(), g.n_right());
    for &l in active {
        let mut visited = vec![false; g.n_right()];
        try_augment(g, &mut m, l, &mut visited);
    }
    let mut left_seen = vec![false; g.n_left()];
    let mut right_seen = vec![false; g.n_right()];
    let mut queue: VecDeque<usize> = active
        .iter()
        .copied()
        .filter(|&l| m.left[l].is_none())
        .inspect(|&l| left_seen[l] = true)
        .collect();
    while let Some(l) = queue.pop_front() {
        for &r in g.neighbors(l) {
            if right_seen[r] {
                continue;
            }
            right_seen[r] = true;
            // A matched left vertex is necessarily active: augmentation only
            // ran from active vertices and flipping a path keeps every
            // intermediate left vertex matched.
            if let Some(other) = m.right[r] {
                if !left_seen[other] {
                    left_seen[other] = true;
                    queue.push_back(other);
                }
            }
        }
    }
    (0..g.n_left()).filter(|&l| left_seen[l]).collect()
}

/// A matching of exactly `target_size` covering every left vertex in
/// `must_cover`, or `None` when no such matching exists.
///
/// Built deterministically in two stages: saturate `must_cover` in ascending
/// order, then extend to maximum size (augmentation never unmatches a left
/// vertex, so the cover survives). Because the set of coverable left-vertex
/// sets is a matroid, stage one succeeds whenever any matching covers
/// `must_cover`, and the extension reaches the graph's maximum matching
/// size — so comparing that size against `target_size` is an exact test, and
/// a surplus is trimmed by unmatching expendable vertices.
pub fn lex_matching(
    g: &BipartiteGraph,
    must_cover: &[usize],
    target_size: usize,
) -> Option<Matching> {
    if target_size > g.n_right() || must_cover.len() > target_size {
        return None;
    }
    let mut m = Matching::new(g.n_left(), g.n_right());
    for &l in must_cover {
        let mut visited = vec![false; g.n_right()];
        if !try_augment(g, &mut m, l, &mut visited) {
            return None;
        }
    }
    for l in 0..g.n_left() {
        if m.left[l].is_none() {
            let mut visited = vec![false; g.n_right()];
            try_augment(g, &mut m, l, &mut visited);
        }
    }
    let mut excess = m.size().checked_sub(target_size)?;
    if excess > 0 {
        let mut in_must = vec![false; g.n_left()];
        for &l in must_cover {
            in_must[l] = true;
        }
        for l in (0..g.n_left()).rev() {
            if excess == 0 {
                break;
            }
            if !in_must[l] {
                if let Some(r) = m.left[l].take() {
                    m.right[r] = None;
                    excess -= 1;
                }
            }
        }
    }
    Some(m)
}
