//! The dynamic demand graph and its derived graphs.
//!
//! At prices `p`, a buyer demands the items giving it maximal, strictly
//! positive utility. The demand graph `G⁺` holds exactly those edges, except
//! that permanently deleted pairs and priced-out buyers never contribute.
//! `U⁺`/`V⁺` are the buyers/items with at least one demand edge.
//!
//! Once the solver has stopped raising prices, three derived graphs decide
//! the final matching:
//!
//! * `G′` — `G⁺` restricted to unmarked items (marked items will end up
//!   strictly more expensive, so a buyer that also demands an unmarked item
//!   will not actually want them);
//! * `G*` — `G⁺` where every buyer having at least one unmarked neighbor
//!   drops its marked-item edges; buyers whose whole demand set is marked
//!   keep it (they stay indifferent when all their items' prices rise alike);
//! * `H` — `G*` plus a zero-utility edge `(i,j)` for every buyer `i`
//!   outside `U⁺` (dummies, priced-out and zero-max-utility buyers alike)
//!   and unmarked item `j` that `i` can exactly afford at utility 0. These
//!   edges let items priced at a buyer's indifference point — in particular
//!   items still at their reserve, via the dummies — clear the market.

use crate::bipartite::BipartiteGraph;
use crate::model::Instance;
use crate::rational::ExtendedRational;

/// Mutable per-solve state: prices, item marks, permanent pair deletions and
/// permanently priced-out buyers. Buyer indices include the dummies.
#[derive(Clone, Debug)]
pub struct DemandState {
    pub prices: Vec<ExtendedRational>,
    pub marked: Vec<bool>,
    priced_out: Vec<bool>,
    deleted: Vec<bool>, // buyer-major [buyer * m_items + item]
    m_items: usize,
}

impl DemandState {
    /// Fresh state: prices at the reserves, nothing marked or deleted.
    pub fn new(instance: &Instance) -> Self {
        DemandState {
            prices: instance.reserves().to_vec(),
            marked: vec![false; instance.m_items()],
            priced_out: vec![false; instance.total_buyers()],
            deleted: vec![false; instance.total_buyers() * instance.m_items()],
            m_items: instance.m_items(),
        }
    }

    /// Rebuild the state a finished solve would be in at the given prices and
    /// marks: a pair whose budget is exactly a marked item's price can only
    /// have gotten there through a budget-tightness deletion. Lets a later
    /// consumer of a solver outcome (price lifting, in particular) proceed
    /// without replaying the solve.
    pub fn reconstruct(
        instance: &Instance,
        prices: &[ExtendedRational],
        marked: &[bool],
    ) -> Self {
        let mut state = DemandState::new(instance);
        state.prices = prices.to_vec();
        state.marked = marked.to_vec();
        for i in 0..instance.total_buyers() {
            for j in 0..instance.m_items() {
                if marked[j] && instance.params(i, j).budget == prices[j] {
                    state.delete(i, j);
                }
            }
        }
        state
    }

    pub fn is_deleted(&self, buyer: usize, item: usize) -> bool {
        self.deleted[buyer * self.m_items + item]
    }

    /// Permanently remove a buyer/item pair.
    pub fn delete(&mut self, buyer: usize, item: usize) {
        self.deleted[buyer * self.m_items + item] = true;
    }

    pub fn is_priced_out(&self, buyer: usize) -> bool {
        self.priced_out[buyer]
    }

    /// Permanently remove a buyer (its maximal utility has dropped to zero).
    pub fn price_out(&mut self, buyer: usize) {
        self.priced_out[buyer] = true;
    }

    pub fn deleted_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.deleted.len())
            .filter(|&k| self.deleted[k])
            .map(|k| (k / self.m_items, k % self.m_items))
            .collect()
    }
}

/// Immutable snapshot of `G⁺` at some prices.
#[derive(Clone, Debug)]
pub struct DemandGraph {
    pub graph: BipartiteGraph,
    /// Buyers with at least one demand edge, ascending.
    pub u_plus: Vec<usize>,
    /// Items demanded by someone, ascending.
    pub v_plus: Vec<usize>,
}

/// Build `G⁺` at the state's prices. An edge `(i,j)` is present iff the pair
/// is not deleted, `i` is not priced out, `u_ij(p_j) > 0`, and no non-deleted
/// pair of `i` gives strictly more utility.
pub fn build_demand_graph(instance: &Instance, state: &DemandState) -> DemandGraph {
    let n = instance.total_buyers();
    let m = instance.m_items();
    debug_assert!((0..m).all(|j| state.prices[j] >= *instance.reserve(j)));
    let mut graph = BipartiteGraph::new(n, m);
    let zero = ExtendedRational::zero();
    for i in 0..n {
        if state.is_priced_out(i) {
            continue;
        }
        let mut best: Option<(ExtendedRational, Vec<usize>)> = None;
        for j in 0..m {
            if state.is_deleted(i, j) {
                continue;
            }
            let u = instance.utility(i, j, &state.prices[j]);
            match &mut best {
                Some((w, ties)) => match u.cmp(w) {
                    std::cmp::Ordering::Greater => best = Some((u, vec![j])),
                    std::cmp::Ordering::Equal => ties.push(j),
                    std::cmp::Ordering::Less => {}
                },
                None => best = Some((u, vec![j])),
            }
        }
        if let Some((w, ties)) = best {
            if w > zero {
                for j in ties {
                    graph.add_edge(i, j);
                }
            }
        }
    }
    let u_plus: Vec<usize> = (0..n).filter(|&i| !graph.neighbors(i).is_empty()).collect();
    let v_plus: Vec<usize> = (0..m)
        .filter(|&j| !graph.right_neighbors(j).is_empty())
        .collect();
    DemandGraph {
        graph,
        u_plus,
        v_plus,
    }
}

/// The three end-game graphs derived from `G⁺`.
#[derive(Clone, Debug)]
pub struct FinalGraphs {
    pub g_prime: BipartiteGraph,
    /// Buyers that still have an edge in `G′` (its non-singleton vertices).
    pub g_prime_active: Vec<usize>,
    pub g_star: BipartiteGraph,
    pub h: BipartiteGraph,
}

pub fn build_final_graphs(
    instance: &Instance,
    state: &DemandState,
    demand: &DemandGraph,
) -> FinalGraphs {
    let n = instance.total_buyers();
    let m = instance.m_items();
    let mut g_prime = BipartiteGraph::new(n, m);
    let mut g_star = BipartiteGraph::new(n, m);
    for &i in &demand.u_plus {
        let neighbors = demand.graph.neighbors(i);
        let has_unmarked = neighbors.iter().any(|&j| !state.marked[j]);
        for &j in neighbors {
            if !state.marked[j] {
                g_prime.add_edge(i, j);
            }
            if !has_unmarked || !state.marked[j] {
                g_star.add_edge(i, j);
            }
        }
        // Each buyer's surviving demand set is homogeneous in mark status.
        debug_assert!({
            let marks: Vec<bool> = g_star.neighbors(i).iter().map(|&j| state.marked[j]).collect();
            marks.windows(2).all(|w| w[0] == w[1])
        });
    }
    let g_prime_active: Vec<usize> = (0..n)
        .filter(|&i| !g_prime.neighbors(i).is_empty())
        .collect();

    let mut h = g_star.clone();
    let zero = ExtendedRational::zero();
    let mut in_u_plus = vec![false; n];
    for &i in &demand.u_plus {
        in_u_plus[i] = true;
    }
    for i in 0..n {
        if in_u_plus[i] {
            continue;
        }
        for j in 0..m {
            if state.marked[j] || state.is_deleted(i, j) {
                continue;
            }
            if instance.params(i, j).budget >= state.prices[j]
                && instance.utility(i, j, &state.prices[j]) == zero
            {
                h.add_edge(i, j);
            }
        }
    }
    debug_assert!(h
        .edges()
        .all(|(i, j)| !state.is_deleted(i, j)));
    FinalGraphs {
        g_prime,
        g_prime_active,
        g_star,
        h,
    }
}
