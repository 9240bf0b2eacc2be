//! End-to-end search for the cheapest market-clearing prices.
//!
//! Starting from the reserve prices, the solver repeatedly picks a set of
//! buyers that outnumbers the items it demands (a critical set), takes the
//! connected block around that set's lowest-index member, and raises the
//! block's prices in lockstep — keeping every caught buyer exactly
//! indifferent across its demand — until the market shifts:
//!
//! * an outside pair ties in and the demand graph grows,
//! * some buyers' utility hits zero and they leave the market for good, or
//! * budgets bind, in which case every block item is *marked* — its final
//!   price must end an arbitrarily small step above the level just reached —
//!   and the exactly-affordable pairs are severed, since the buyers holding
//!   them cannot follow that step.
//!
//! Once no over-demand is left, marked items get a second look: because
//! their prices finish strictly higher, a buyer also demanding an unmarked
//! item will strictly prefer the unmarked one. If the unmarked items alone
//! are over-demanded, they are marked too (and tight pairs severed, which
//! reopens the raising loop). The end-game then asks for a perfect
//! assignment: every buyer still demanding something is served from its
//! remaining demand edges, and every item clears, if need be by a buyer
//! sitting exactly at indifference — an unsold item would have to stay at
//! its reserve, which the dummy buyers encode as absorption at utility zero.
//! If no such assignment exists, no prices whatsoever clear the market.
//!
//! Prices are reported as [`PricePlus`]: a numeric level plus a flag telling
//! whether the equilibrium sits at that level or just above it. The pair
//! (level, flag) is exact; [`realize_prices`] turns it into concrete numbers
//! for any positive tolerance.

use crate::bipartite::{critical_set_in, lex_matching};
use crate::demand::{build_demand_graph, build_final_graphs, DemandState};
use crate::model::Instance;
use crate::raise::{critical_component, increase_price, lift_plus, LiftError, RaiseError, RaiseEvent};
use crate::rational::ExtendedRational;

/// A price level that is either hit exactly or undercut by every
/// sufficiently small positive step; `plus` selects the second reading.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PricePlus {
    pub price: ExtendedRational,
    pub plus: bool,
}

impl PricePlus {
    pub fn concrete(price: ExtendedRational) -> Self {
        PricePlus { price, plus: false }
    }

    pub fn just_above(price: ExtendedRational) -> Self {
        PricePlus { price, plus: true }
    }
}

/// What the solver found: the cheapest clearing prices with a supporting
/// assignment, or a proof that none exist.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveResult {
    Equilibrium {
        /// Item assigned to each real buyer, `None` for the unassigned.
        allocation: Vec<Option<usize>>,
        /// Per-item clearing price, exact or just-above.
        prices: Vec<PricePlus>,
    },
    NoEquilibrium,
}

impl SolveResult {
    pub fn is_equilibrium(&self) -> bool {
        matches!(self, SolveResult::Equilibrium { .. })
    }
}

/// What ended one step of the search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StageEvent {
    /// Snapshot of the opening market, before any price has moved.
    Start,
    /// Buyers in the block became indifferent to these outside pairs, which
    /// now join the demand graph.
    EdgesAdded { pairs: Vec<(usize, usize)> },
    /// These buyers' maximal utility fell to zero; they leave the market.
    BuyersPricedOut { buyers: Vec<usize> },
    /// Budgets bound: the block's items are marked and the
    /// exactly-affordable pairs severed.
    ItemsMarked {
        items: Vec<usize>,
        deleted: Vec<(usize, usize)>,
    },
    /// The unmarked items alone were over-demanded, so they are marked too;
    /// severing any tight pairs reopens the raising loop.
    ShortfallMarked {
        items: Vec<usize>,
        deleted: Vec<(usize, usize)>,
    },
    /// The block's prices could rise forever; the search stops with no
    /// equilibrium.
    Unbounded,
}

/// One entry of the solve trace: the prices after the event, the critical
/// set that drove it, and the block that was raised (or marked).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageRecord {
    /// Price raises performed so far (the opening snapshot is stage 0).
    pub stage: usize,
    /// Deletion rounds completed so far.
    pub phase: usize,
    pub prices: Vec<ExtendedRational>,
    pub critical: Vec<usize>,
    pub component_buyers: Vec<usize>,
    pub component_items: Vec<usize>,
    pub event: StageEvent,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub result: SolveResult,
    pub trace: Vec<StageRecord>,
}

/// Solve for the minimum clearing prices. The returned trace is empty; use
/// [`solve_with_trace`] to see the search unfold.
pub fn algmin(instance: &Instance) -> Outcome {
    solve(instance, false)
}

/// Like [`algmin`], but records one [`StageRecord`] per price raise, per
/// deletion round, and for the opening snapshot.
pub fn solve_with_trace(instance: &Instance) -> Outcome {
    solve(instance, true)
}

fn solve(instance: &Instance, record: bool) -> Outcome {
    let n = instance.n_buyers();
    let m = instance.m_items();
    let stage_bound = m * m * n * n;
    let phase_bound = m * n;
    let mut state = DemandState::new(instance);
    let mut trace: Vec<StageRecord> = Vec::new();
    let mut stages = 0usize;
    let mut phases = 0usize;
    let mut opened = false;

    loop {
        // Raise prices until no buyer group outnumbers its demanded items.
        loop {
            let demand = build_demand_graph(instance, &state);
            let critical = critical_set_in(&demand.graph, &demand.u_plus);
            let Some(&start) = critical.first() else { break };
            let comp = critical_component(&demand, &critical, start);
            if record && !opened {
                opened = true;
                trace.push(StageRecord {
                    stage: 0,
                    phase: 0,
                    prices: state.prices.clone(),
                    critical: critical.clone(),
                    component_buyers: comp.buyers.clone(),
                    component_items: comp.items.clone(),
                    event: StageEvent::Start,
                });
            }
            stages += 1;
            assert!(stages <= stage_bound, "stage counter exceeded m²n²");
            let (q, event) = match increase_price(instance, &state, &comp) {
                Ok(found) => found,
                Err(RaiseError::Unbounded) => {
                    if record {
                        trace.push(StageRecord {
                            stage: stages,
                            phase: phases,
                            prices: state.prices.clone(),
                            critical,
                            component_buyers: comp.buyers,
                            component_items: comp.items,
                            event: StageEvent::Unbounded,
                        });
                    }
                    return Outcome {
                        result: SolveResult::NoEquilibrium,
                        trace,
                    };
                }
            };
            // A marked item whose price actually moved sits strictly below
            // its eventual level again, so the mark comes off.
            for &j in &comp.items {
                if state.marked[j] && q[j] > state.prices[j] {
                    state.marked[j] = false;
                }
            }
            state.prices = q;
            let event = match event {
                // Nothing to apply: the next demand-graph rebuild sees the
                // new ties at the raised prices by itself.
                RaiseEvent::Alpha { new_edges } => StageEvent::EdgesAdded { pairs: new_edges },
                RaiseEvent::Beta { hits } => {
                    phases += 1;
                    // Hits arrive buyer-major, so adjacent deduplication is
                    // enough.
                    let mut buyers: Vec<usize> = hits.into_iter().map(|(i, _)| i).collect();
                    buyers.dedup();
                    for &i in &buyers {
                        state.price_out(i);
                    }
                    StageEvent::BuyersPricedOut { buyers }
                }
                RaiseEvent::Gamma { hits: _ } => {
                    phases += 1;
                    for &j in &comp.items {
                        state.marked[j] = true;
                    }
                    // The item's final price sits strictly above its current
                    // level, which no exactly-exhausted budget can follow —
                    // whether or not its holder was in the raised block.
                    let deleted = sever_tight_pairs(instance, &mut state, &comp.items);
                    StageEvent::ItemsMarked {
                        items: comp.items.clone(),
                        deleted,
                    }
                }
            };
            assert!(phases <= phase_bound, "phase counter exceeded m·n");
            if record {
                trace.push(StageRecord {
                    stage: stages,
                    phase: phases,
                    prices: state.prices.clone(),
                    critical,
                    component_buyers: comp.buyers,
                    component_items: comp.items,
                    event,
                });
            }
        }

        // Marked items end strictly more expensive, so a buyer with an
        // unmarked alternative will not actually take one. If the unmarked
        // items alone cannot serve their demanders, mark them as well.
        let demand = build_demand_graph(instance, &state);
        let finals = build_final_graphs(instance, &state, &demand);
        let shortfall = critical_set_in(&finals.g_prime, &finals.g_prime_active);
        if shortfall.is_empty() {
            break;
        }
        let items = finals.g_prime.neighborhood(&shortfall);
        for &j in &items {
            state.marked[j] = true;
        }
        let deleted = sever_tight_pairs(instance, &mut state, &items);
        let reopened = !deleted.is_empty();
        if reopened {
            phases += 1;
            assert!(phases <= phase_bound, "phase counter exceeded m·n");
        }
        if record {
            trace.push(StageRecord {
                stage: stages,
                phase: phases,
                prices: state.prices.clone(),
                critical: shortfall.clone(),
                component_buyers: shortfall,
                component_items: items.clone(),
                event: StageEvent::ShortfallMarked { items, deleted },
            });
        }
        if !reopened {
            break;
        }
    }

    // End-game: serve every remaining demander from its demand edges and
    // clear every item, recruiting exactly-indifferent bystanders (dummies
    // included) for items nobody demands.
    let demand = build_demand_graph(instance, &state);
    let finals = build_final_graphs(instance, &state, &demand);
    debug_assert!(
        critical_set_in(&finals.g_star, &demand.u_plus).is_empty(),
        "after marking settles, the kept demand edges must admit a full matching"
    );
    let result = match lex_matching(&finals.h, &demand.u_plus, m) {
        Some(matching) => SolveResult::Equilibrium {
            allocation: matching.left[..n].to_vec(),
            prices: (0..m)
                .map(|j| PricePlus {
                    price: state.prices[j].clone(),
                    plus: state.marked[j],
                })
                .collect(),
        },
        None => SolveResult::NoEquilibrium,
    };
    Outcome { result, trace }
}

/// Permanently remove every pair whose budget exactly equals one of the
/// given (freshly marked) items' current prices: those items finish strictly
/// above that level, out of the pair's reach. Mirrors what
/// [`DemandState::reconstruct`] infers from a finished outcome, so the live
/// state and a reconstructed one agree. Returns the severed pairs.
fn sever_tight_pairs(
    instance: &Instance,
    state: &mut DemandState,
    items: &[usize],
) -> Vec<(usize, usize)> {
    let mut deleted = Vec::new();
    for i in 0..instance.total_buyers() {
        for &j in items {
            if !state.is_deleted(i, j) && instance.params(i, j).budget == state.prices[j] {
                state.delete(i, j);
                deleted.push((i, j));
            }
        }
    }
    deleted
}

/// Concrete prices for a solved equilibrium: every just-above level is
/// lifted by at most `epsilon` without disturbing any buyer's comparisons,
/// so the result clears the market at actual numbers.
pub fn realize_prices(
    instance: &Instance,
    prices: &[PricePlus],
    epsilon: &ExtendedRational,
) -> Result<Vec<ExtendedRational>, LiftError> {
    let numeric: Vec<ExtendedRational> = prices.iter().map(|p| p.price.clone()).collect();
    let marked: Vec<bool> = prices.iter().map(|p| p.plus).collect();
    let state = DemandState::reconstruct(instance, &numeric, &marked);
    let demand = build_demand_graph(instance, &state);
    let finals = build_final_graphs(instance, &state, &demand);
    lift_plus(instance, &numeric, &marked, epsilon, &finals.h)
}
