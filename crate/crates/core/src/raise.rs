//! Simultaneous price raises over a tied block of the demand graph.
//!
//! When a group of buyers is squeezed onto too few items, all of those
//! items' prices must rise together in a way that keeps every buyer in the
//! group exactly indifferent across its current demand edges. Each edge
//! `(i₀,j₀)` of the block proposes a candidate raise: push `j₀` as high as
//! `i₀` tolerates before something changes — its utility reaching zero, its
//! budget binding, or an outside item becoming just as attractive — then
//! propagate prices along the block's edges so that every tie is preserved,
//! discarding the candidate if any propagated price overshoots another
//! edge's own tolerance. The raise actually applied is the smallest
//! surviving candidate, and the tolerance that binds there classifies what
//! happens next:
//!
//! * [`RaiseEvent::Alpha`] — an outside pair now ties with a block buyer's
//!   maximal utility and joins the demand graph;
//! * [`RaiseEvent::Beta`] — some buyer's utility dropped to zero on all of
//!   its edges, so it leaves the market;
//! * [`RaiseEvent::Gamma`] — some buyer's budget is exactly exhausted, so
//!   the block's items get marked and the exhausted pairs are deleted.
//!
//! Exactly one event is reported; when several conditions hold at the same
//! prices, `Alpha` wins over `Beta`, which wins over `Gamma`.
//!
//! The same machinery with extra per-item ceilings gives
//! [`increase_price_bounded`], and through it [`lift_plus`]: the strictly
//! positive nudge applied to marked items at the very end, sized so that no
//! buyer's comparisons between items change.

use std::collections::VecDeque;

use thiserror::Error;

use crate::bipartite::BipartiteGraph;
use crate::demand::{DemandGraph, DemandState};
use crate::model::Instance;
use crate::rational::ExtendedRational;

/// A connected set of buyers together with the items they are tied over.
///
/// `buyers` and `items` are ascending; `edges` lists the demand edges
/// spanning them, in the order candidate raises should be seeded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub buyers: Vec<usize>,
    pub items: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

impl Component {
    fn contains_item(&self, item: usize) -> bool {
        self.items.binary_search(&item).is_ok()
    }

    fn item_pos(&self, item: usize) -> usize {
        self.items
            .binary_search(&item)
            .expect("edge item belongs to the component")
    }

    fn buyer_pos(&self, buyer: usize) -> usize {
        self.buyers
            .binary_search(&buyer)
            .expect("edge buyer belongs to the component")
    }

    fn validate(&self, state: &DemandState) {
        debug_assert!(!self.buyers.is_empty() && !self.edges.is_empty());
        debug_assert!(self.buyers.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(self.items.windows(2).all(|w| w[0] < w[1]));
        for &(i, j) in &self.edges {
            debug_assert!(self.buyers.binary_search(&i).is_ok());
            debug_assert!(self.contains_item(j));
            debug_assert!(!state.is_deleted(i, j) && !state.is_priced_out(i));
        }
    }
}

/// What stopped a price raise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RaiseEvent {
    /// Outside pairs that now tie with their buyer's maximal utility.
    Alpha { new_edges: Vec<(usize, usize)> },
    /// Block edges on which the buyer's utility reached exactly zero.
    Beta { hits: Vec<(usize, usize)> },
    /// Block edges on which the buyer's budget is exactly exhausted.
    Gamma { hits: Vec<(usize, usize)> },
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RaiseError {
    /// No tolerance binds: the block's prices could rise forever, so no
    /// price vector can clear this market.
    #[error("prices in the component can rise without bound")]
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LiftError {
    /// A buyer attached to a marked item has no headroom at all: its budget
    /// equals the item's current price, so no positive lift preserves its
    /// demand.
    #[error("buyer {buyer} is budget-tight on marked item {item}; no positive lift exists")]
    TightBudget { buyer: usize, item: usize },
}

/// The connected component, within the subgraph induced by the given
/// (critical) buyers and their demand-graph neighborhood, that contains
/// `start`.
pub fn critical_component(demand: &DemandGraph, critical: &[usize], start: usize) -> Component {
    debug_assert!(critical.contains(&start));
    let g = &demand.graph;
    let mut in_set = vec![false; g.n_left()];
    for &i in critical {
        in_set[i] = true;
    }
    let mut seen_buyer = vec![false; g.n_left()];
    let mut seen_item = vec![false; g.n_right()];
    seen_buyer[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(i) = queue.pop_front() {
        for &j in g.neighbors(i) {
            if seen_item[j] {
                continue;
            }
            seen_item[j] = true;
            for &i2 in g.right_neighbors(j) {
                if in_set[i2] && !seen_buyer[i2] {
                    seen_buyer[i2] = true;
                    queue.push_back(i2);
                }
            }
        }
    }
    let buyers: Vec<usize> = (0..g.n_left()).filter(|&i| seen_buyer[i]).collect();
    let items: Vec<usize> = (0..g.n_right()).filter(|&j| seen_item[j]).collect();
    let edges: Vec<(usize, usize)> = buyers
        .iter()
        .flat_map(|&i| g.neighbors(i).iter().map(move |&j| (i, j)))
        .collect();
    Component {
        buyers,
        items,
        edges,
    }
}

/// Whether `(buyer, item)` could still hold at or above the item's current
/// price: not deleted, and either strictly affordable or exactly affordable
/// at an item whose price will not rise further on its own (unmarked).
fn eligible_outside(instance: &Instance, state: &DemandState, buyer: usize, item: usize) -> bool {
    if state.is_deleted(buyer, item) {
        return false;
    }
    let budget = instance.params(buyer, item).budget;
    let price = &state.prices[item];
    budget > *price || (budget == *price && !state.marked[item])
}

/// The buyer's best utility over items outside the component, restricted to
/// pairs that could actually become demand edges at higher block prices.
fn outside_best(
    instance: &Instance,
    state: &DemandState,
    comp: &Component,
    buyer: usize,
) -> Option<ExtendedRational> {
    let mut best: Option<ExtendedRational> = None;
    for j in 0..instance.m_items() {
        if comp.contains_item(j) || !eligible_outside(instance, state, buyer, j) {
            continue;
        }
        let u = instance.utility(buyer, j, &state.prices[j]);
        best = Some(match best {
            Some(cur) => cur.max(u),
            None => u,
        });
    }
    best
}

/// Per-edge price tolerances: how high the edge's item may go before the
/// edge's buyer hits zero utility, exhausts its budget, or starts envying an
/// outside item — further clipped by the caller's ceilings if given.
fn edge_caps(
    instance: &Instance,
    state: &DemandState,
    comp: &Component,
    extra: Option<&[ExtendedRational]>,
) -> Vec<ExtendedRational> {
    let mut outside: Vec<Option<Option<ExtendedRational>>> = vec![None; comp.buyers.len()];
    let mut caps = Vec::with_capacity(comp.edges.len());
    for &(i, j) in &comp.edges {
        let bp = comp.buyer_pos(i);
        let best = outside[bp]
            .get_or_insert_with(|| outside_best(instance, state, comp, i))
            .clone();
        let (value_limit, budget) = instance.thresholds(i, j);
        let mut cap = value_limit.min(budget);
        if let Some(u_max) = best {
            cap = cap.min(instance.utility_inverse(i, j, &u_max));
        }
        if let Some(extra) = extra {
            cap = cap.min(extra[j].clone());
        }
        caps.push(cap);
    }
    caps
}

struct Topology {
    /// Dense item position → incident edge indices.
    at_item: Vec<Vec<usize>>,
    /// Dense buyer position → incident edge indices.
    of_buyer: Vec<Vec<usize>>,
}

fn topology(comp: &Component) -> Topology {
    let mut at_item = vec![Vec::new(); comp.items.len()];
    let mut of_buyer = vec![Vec::new(); comp.buyers.len()];
    for (e, &(i, j)) in comp.edges.iter().enumerate() {
        at_item[comp.item_pos(j)].push(e);
        of_buyer[comp.buyer_pos(i)].push(e);
    }
    // Propagation visits edges in (buyer, item) order regardless of how the
    // caller ordered them. For finite ties any order gives the same prices;
    // ratio ties between zero-priced items are all infinite, though, and
    // there the first propagation path wins, so fix a canonical one.
    for list in at_item.iter_mut().chain(of_buyer.iter_mut()) {
        list.sort_by_key(|&e| comp.edges[e]);
    }
    Topology { at_item, of_buyer }
}

/// Grow one candidate raise from the seed edge: set the seed item to the
/// seed edge's tolerance, then walk the block keeping every edge's buyer
/// indifferent. Returns prices densely indexed by `comp.items`, or `None`
/// if any price lands above some incident edge's own tolerance (or at
/// infinity), which discards the candidate.
fn propagate(
    instance: &Instance,
    state: &DemandState,
    comp: &Component,
    topo: &Topology,
    caps: &[ExtendedRational],
    seed: usize,
) -> Option<Vec<ExtendedRational>> {
    let seed_val = caps[seed].clone();
    if !seed_val.is_finite() {
        return None;
    }
    let mut q: Vec<Option<ExtendedRational>> = vec![None; comp.items.len()];
    let fits = |val: &ExtendedRational, pos: usize| topo.at_item[pos].iter().all(|&e| *val <= caps[e]);
    let (_, j0) = comp.edges[seed];
    let j0p = comp.item_pos(j0);
    if !fits(&seed_val, j0p) {
        return None;
    }
    debug_assert!(seed_val >= state.prices[j0], "tolerances never sit below prices");
    q[j0p] = Some(seed_val);
    let mut queue = VecDeque::from([j0p]);
    while let Some(jp) = queue.pop_front() {
        let price = q[jp].clone().expect("queued items are priced");
        let j = comp.items[jp];
        for &e1 in &topo.at_item[jp] {
            let (i, _) = comp.edges[e1];
            let level = instance.utility(i, j, &price);
            for &e2 in &topo.of_buyer[comp.buyer_pos(i)] {
                let (_, j2) = comp.edges[e2];
                let j2p = comp.item_pos(j2);
                if q[j2p].is_some() {
                    continue;
                }
                let val = instance.utility_inverse(i, j2, &level);
                if !val.is_finite() || !fits(&val, j2p) {
                    return None;
                }
                debug_assert!(val >= state.prices[j2], "tie-preserving prices never fall");
                q[j2p] = Some(val);
                queue.push_back(j2p);
            }
        }
    }
    Some(
        q.into_iter()
            .map(|v| v.expect("the component is connected"))
            .collect(),
    )
}

fn all_candidates(
    instance: &Instance,
    state: &DemandState,
    comp: &Component,
    extra: Option<&[ExtendedRational]>,
) -> Vec<Option<Vec<ExtendedRational>>> {
    let caps = edge_caps(instance, state, comp, extra);
    let topo = topology(comp);
    (0..comp.edges.len())
        .map(|seed| propagate(instance, state, comp, &topo, &caps, seed))
        .collect()
}

/// Every edge's candidate raise, densely indexed by `comp.items`
/// (`None` for discarded candidates). Surviving candidates are pairwise
/// comparable and the applied raise is their pointwise minimum; exposed so
/// tests can check exactly that.
pub fn candidate_raises(
    instance: &Instance,
    state: &DemandState,
    comp: &Component,
) -> Vec<Option<Vec<ExtendedRational>>> {
    all_candidates(instance, state, comp, None)
}

fn minimal_raise(
    instance: &Instance,
    state: &DemandState,
    comp: &Component,
    extra: Option<&[ExtendedRational]>,
) -> Result<Vec<ExtendedRational>, RaiseError> {
    let mut best: Option<Vec<ExtendedRational>> = None;
    for cand in all_candidates(instance, state, comp, extra).into_iter().flatten() {
        best = Some(match best {
            None => cand,
            Some(cur) => cur
                .into_iter()
                .zip(cand)
                .map(|(a, b)| a.min(b))
                .collect(),
        });
    }
    best.ok_or(RaiseError::Unbounded)
}

/// Raise the block's prices to the smallest level at which something
/// changes, and report what changed. Prices outside the block are returned
/// untouched.
pub fn increase_price(
    instance: &Instance,
    state: &DemandState,
    comp: &Component,
) -> Result<(Vec<ExtendedRational>, RaiseEvent), RaiseError> {
    comp.validate(state);
    let dense = minimal_raise(instance, state, comp, None)?;
    let mut q = state.prices.clone();
    for (pos, &j) in comp.items.iter().enumerate() {
        q[j] = dense[pos].clone();
    }
    let event = classify(instance, state, comp, &q);
    Ok((q, event))
}

/// The event binding at the raised prices `q`, in reporting priority order.
///
/// Every tolerance is attached to a single edge, so attribution works
/// edge by edge. That distinction only matters in degenerate blocks where
/// zero-priced ratio ties force a propagation-order choice: there a buyer's
/// edges can land at different utility levels, and the binding edge is the
/// one whose level matches an outside option, not necessarily the buyer's
/// best.
fn classify(
    instance: &Instance,
    state: &DemandState,
    comp: &Component,
    q: &[ExtendedRational],
) -> RaiseEvent {
    let zero = ExtendedRational::zero();
    let mut alpha = Vec::new();
    for &(i, j) in &comp.edges {
        let level = instance.utility(i, j, &q[j]);
        if level > zero {
            for outside in 0..instance.m_items() {
                if !comp.contains_item(outside)
                    && eligible_outside(instance, state, i, outside)
                    && instance.utility(i, outside, &state.prices[outside]) == level
                {
                    alpha.push((i, outside));
                }
            }
        }
    }
    alpha.sort_unstable();
    alpha.dedup();
    if !alpha.is_empty() {
        return RaiseEvent::Alpha { new_edges: alpha };
    }
    let beta: Vec<(usize, usize)> = comp
        .edges
        .iter()
        .copied()
        .filter(|&(i, j)| instance.utility(i, j, &q[j]) == zero)
        .collect();
    if !beta.is_empty() {
        return RaiseEvent::Beta { hits: beta };
    }
    let gamma: Vec<(usize, usize)> = comp
        .edges
        .iter()
        .copied()
        .filter(|&(i, j)| instance.params(i, j).budget == q[j])
        .collect();
    if gamma.is_empty() {
        unreachable!("a price raise always stops at some binding tolerance");
    }
    RaiseEvent::Gamma { hits: gamma }
}

/// Like [`increase_price`], but with caller-imposed per-item ceilings that
/// must sit strictly above the current prices. Returns the raised prices —
/// strictly above the old ones and at most the ceilings on every block item
/// — without classifying an event: the caller picks ceilings low enough
/// that nothing changes below them.
pub fn increase_price_bounded(
    instance: &Instance,
    state: &DemandState,
    comp: &Component,
    caps: &[ExtendedRational],
) -> Result<Vec<ExtendedRational>, RaiseError> {
    comp.validate(state);
    debug_assert!(
        comp.items.iter().all(|&j| caps[j] > state.prices[j]),
        "ceilings must sit strictly above current prices"
    );
    let dense = minimal_raise(instance, state, comp, Some(caps))?;
    let mut q = state.prices.clone();
    for (pos, &j) in comp.items.iter().enumerate() {
        debug_assert!(dense[pos] <= caps[j] && dense[pos] > state.prices[j]);
        q[j] = dense[pos].clone();
    }
    Ok(q)
}

/// Nudge every marked item's price strictly up, by at most `epsilon`,
/// without changing any buyer's comparisons between items. Marked items are
/// processed as connected blocks of the final assignment graph `h`: the
/// buyers attached there are exactly indifferent across their block, so the
/// block must move in lockstep, bounded tightly enough that no buyer starts
/// preferring an outside item (or vice versa) and no budget is crossed.
/// Isolated marked items move up by `epsilon / 2`.
pub fn lift_plus(
    instance: &Instance,
    prices: &[ExtendedRational],
    marked: &[bool],
    epsilon: &ExtendedRational,
    h: &BipartiteGraph,
) -> Result<Vec<ExtendedRational>, LiftError> {
    assert!(
        epsilon.is_finite() && epsilon.is_positive(),
        "the lift tolerance must be finite and positive"
    );
    let m = instance.m_items();
    let mut out = prices.to_vec();
    if !marked.iter().any(|&x| x) {
        return Ok(out);
    }
    let state = DemandState::reconstruct(instance, prices, marked);
    let zero = ExtendedRational::zero();
    let half = epsilon / &ExtendedRational::from_int(2);
    let mut seen = vec![false; m];
    for start in 0..m {
        if !marked[start] || seen[start] {
            continue;
        }
        // Gather the connected block of marked items and its attached buyers.
        let mut items = vec![start];
        let mut buyers: Vec<usize> = Vec::new();
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(j) = queue.pop_front() {
            for &i in h.right_neighbors(j) {
                if buyers.contains(&i) {
                    continue;
                }
                buyers.push(i);
                for &j2 in h.neighbors(i) {
                    debug_assert!(marked[j2], "attached buyers hold only marked-item edges");
                    if !seen[j2] {
                        seen[j2] = true;
                        items.push(j2);
                        queue.push_back(j2);
                    }
                }
            }
        }
        if buyers.is_empty() {
            // Nobody is indifferent about this item; any small bump works.
            out[start] = &prices[start] + &half;
            continue;
        }
        buyers.sort_unstable();
        items.sort_unstable();
        let edges: Vec<(usize, usize)> = buyers
            .iter()
            .flat_map(|&i| h.neighbors(i).iter().map(move |&j| (i, j)))
            .collect();
        for &(i, j) in &edges {
            if instance.params(i, j).budget == prices[j] {
                return Err(LiftError::TightBudget { buyer: i, item: j });
            }
        }
        let comp = Component {
            buyers,
            items,
            edges,
        };
        // Per-item ceilings: anywhere strictly between the old price and the
        // ceiling, each attached buyer still strictly beats its own best
        // outside option, so its comparisons with the rest of the market are
        // unchanged.
        let mut caps = prices.to_vec();
        for &j in &comp.items {
            caps[j] = &prices[j] + epsilon;
        }
        for &i in &comp.buyers {
            let mut floor = zero.clone();
            for j in 0..m {
                if comp.contains_item(j) || state.is_deleted(i, j) {
                    continue;
                }
                floor = floor.max(instance.utility(i, j, &prices[j]));
            }
            debug_assert!(floor.is_finite());
            let &(_, j0) = comp
                .edges
                .iter()
                .find(|&&(i2, _)| i2 == i)
                .expect("attached buyers have an edge");
            let level = instance.utility(i, j0, &prices[j0]);
            debug_assert!(level > floor, "attached buyers strictly prefer their own block");
            let target = if level.is_finite() {
                level.midpoint(&floor)
            } else {
                &floor + &ExtendedRational::one()
            };
            for &(i2, j) in comp.edges.iter().filter(|&&(i2, _)| i2 == i) {
                let cap = instance.utility_inverse(i2, j, &target);
                caps[j] = caps[j].clone().min(cap);
            }
        }
        let lifted = increase_price_bounded(instance, &state, &comp, &caps)
            .expect("a bounded raise within a lift block always lands");
        for &j in &comp.items {
            out[j] = lifted[j].clone();
        }
    }
    Ok(out)
}
