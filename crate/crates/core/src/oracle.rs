//! Brute-force ground truth for desk-sized markets.
//!
//! The fast paths elsewhere in the crate earn their trust by agreeing with
//! the dumbest possible implementations. This module provides those:
//!
//! * [`grid_equilibria`] — try every candidate price vector against every
//!   matching (including the empty one), keeping whatever passes
//!   [`check_competitive_equilibrium`];
//! * [`grid_min_prices`] — the componentwise minimum over those hits, a grid
//!   approximation of the infimum over all equilibrium prices;
//! * [`critical_set_bruteforce`] — the most-demanded buyer set found by
//!   enumerating every subset.
//!
//! Every search refuses inputs whose space exceeds a configured evaluation
//! budget instead of silently degrading, so a passing cross-check always
//! means the whole space was covered.

use crate::bipartite::BipartiteGraph;
use crate::model::{Family, Instance};
use crate::rational::{rational_gcd, ExtendedRational, Finite};
use crate::verify::check_competitive_equilibrium;
use num::{BigRational, Signed, ToPrimitive, Zero};
use std::collections::BTreeSet;

/// One hit of the grid search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridEquilibrium {
    pub allocation: Vec<Option<usize>>,
    pub prices: Vec<ExtendedRational>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("the search needs at least {required} checker evaluations, over the budget of {budget}; coarsen the resolution or lower the bound")]
    BudgetExceeded { required: u128, budget: u128 },
    #[error("subset enumeration handles at most {limit} buyers, got {got}")]
    TooManyBuyers { limit: usize, got: usize },
    #[error("resolution must be a positive finite rational")]
    BadResolution,
    #[error("price bound must be a finite non-negative rational")]
    BadBound,
}

/// Default cap on `(grid points) × (matchings)` checker evaluations.
pub const DEFAULT_EVALUATION_BUDGET: u128 = 4_000_000;

/// Per-item cap on tie-derived candidate prices; markets whose tie chains
/// outgrow it are refused rather than searched incompletely.
const TIE_CLOSURE_CAP: usize = 4096;

/// Largest left side [`critical_set_bruteforce`] will enumerate.
pub const BRUTEFORCE_BUYER_LIMIT: usize = 20;

/// Default grid upper bound: one above the largest finite value, budget or
/// reserve. Any equilibrium price beyond every value and budget would leave
/// its item unsellable yet priced over its reserve, so nothing is lost.
pub fn default_price_bound(instance: &Instance) -> ExtendedRational {
    let mut best = ExtendedRational::zero();
    for i in 0..instance.n_buyers() {
        for j in 0..instance.m_items() {
            let params = instance.params(i, j);
            for bound in [params.value, params.budget] {
                if bound.is_finite() {
                    best = best.max(bound);
                }
            }
        }
    }
    for reserve in instance.reserves() {
        best = best.max(reserve.clone());
    }
    &best + &ExtendedRational::one()
}

/// Default grid step: a quarter of the gcd of all finite parameters and
/// reserves. The gcd of a set also divides every pairwise difference, so all
/// prices at which two affine curves cross or a curve hits zero or a budget
/// land on this grid.
pub fn default_resolution(instance: &Instance) -> ExtendedRational {
    let mut gcd: Option<BigRational> = None;
    let mut fold = |x: &ExtendedRational| {
        if let Finite(r) = x {
            if !r.is_zero() {
                gcd = Some(match gcd.take() {
                    Some(g) => rational_gcd(&g, r),
                    None => r.abs(),
                });
            }
        }
    };
    for i in 0..instance.n_buyers() {
        for j in 0..instance.m_items() {
            let params = instance.params(i, j);
            fold(&params.value);
            fold(&params.budget);
        }
    }
    for reserve in instance.reserves() {
        fold(reserve);
    }
    let gcd = gcd.map_or_else(ExtendedRational::one, Finite);
    &gcd / &ExtendedRational::from_int(4)
}

/// Exhaustively searches the price grid `{0, δ, 2δ, …} ∩ [0, bound]`
/// (augmented with each item's reserve and, for return-on-investment
/// markets, tie-derived prices) against every matching of real buyers to
/// items, under [`DEFAULT_EVALUATION_BUDGET`].
pub fn grid_equilibria(
    instance: &Instance,
    resolution: &ExtendedRational,
    price_bound: &ExtendedRational,
) -> Result<Vec<GridEquilibrium>, OracleError> {
    grid_equilibria_with_budget(instance, resolution, price_bound, DEFAULT_EVALUATION_BUDGET)
}

/// [`grid_equilibria`] with an explicit evaluation budget.
pub fn grid_equilibria_with_budget(
    instance: &Instance,
    resolution: &ExtendedRational,
    price_bound: &ExtendedRational,
    budget: u128,
) -> Result<Vec<GridEquilibrium>, OracleError> {
    if !resolution.is_finite() || !resolution.is_positive() {
        return Err(OracleError::BadResolution);
    }
    if !price_bound.is_finite() || price_bound.is_negative() {
        return Err(OracleError::BadBound);
    }
    let m = instance.m_items();
    let matchings_count = count_matchings(instance.n_buyers(), m);

    // Refuse on the base grid size before materializing anything.
    let steps = (price_bound.finite() / resolution.finite()).floor();
    let grid_len = steps.to_integer().to_u128().unwrap_or(u128::MAX).saturating_add(1);
    let base_required = grid_len
        .saturating_pow(u32::try_from(m).expect("item count fits u32"))
        .saturating_mul(matchings_count);
    if base_required > budget {
        return Err(OracleError::BudgetExceeded { required: base_required, budget });
    }

    let candidates = candidate_prices(instance, resolution, price_bound);
    let required = candidates
        .iter()
        .map(|c| c.len() as u128)
        .fold(1u128, u128::saturating_mul)
        .saturating_mul(matchings_count);
    if required > budget {
        return Err(OracleError::BudgetExceeded { required, budget });
    }

    let matchings = enumerate_matchings(instance.n_buyers(), m);
    let mut found = Vec::new();
    let mut indices = vec![0usize; m];
    let mut prices: Vec<ExtendedRational> =
        candidates.iter().map(|c| c[0].clone()).collect();
    'grid: loop {
        for allocation in &matchings {
            let report = check_competitive_equilibrium(instance, allocation, &prices)
                .expect("enumerated outcomes are well-formed");
            if report.holds() {
                found.push(GridEquilibrium {
                    allocation: allocation.clone(),
                    prices: prices.clone(),
                });
            }
        }
        let mut axis = 0;
        loop {
            if axis == m {
                break 'grid;
            }
            indices[axis] += 1;
            if indices[axis] < candidates[axis].len() {
                prices[axis] = candidates[axis][indices[axis]].clone();
                break;
            }
            indices[axis] = 0;
            prices[axis] = candidates[axis][0].clone();
            axis += 1;
        }
    }
    Ok(found)
}

/// Componentwise minimum over all grid equilibria; `None` when the grid
/// holds no equilibrium at all.
pub fn grid_min_prices(
    instance: &Instance,
    resolution: &ExtendedRational,
    price_bound: &ExtendedRational,
) -> Result<Option<Vec<ExtendedRational>>, OracleError> {
    let equilibria = grid_equilibria(instance, resolution, price_bound)?;
    Ok(equilibria.split_first().map(|(first, rest)| {
        let mut min = first.prices.clone();
        for eq in rest {
            for (slot, price) in min.iter_mut().zip(&eq.prices) {
                if price < slot {
                    *slot = price.clone();
                }
            }
        }
        min
    }))
}

/// The most-demanded buyer set, by enumerating all `2^n` buyer subsets: the
/// unique minimal subset `A` maximizing `|A| − |N(A)|`. Computed as the
/// intersection of all maximizers, which the subset lattice guarantees is
/// itself a maximizer — asserted, since this is the referee implementation.
pub fn critical_set_bruteforce(graph: &BipartiteGraph) -> Result<Vec<usize>, OracleError> {
    let n = graph.n_left();
    if n > BRUTEFORCE_BUYER_LIMIT {
        return Err(OracleError::TooManyBuyers { limit: BRUTEFORCE_BUYER_LIMIT, got: n });
    }
    assert!(graph.n_right() <= 128, "subset enumeration supports at most 128 items");
    let neighbor_masks: Vec<u128> = (0..n)
        .map(|u| graph.neighbors(u).iter().fold(0u128, |acc, &v| acc | (1 << v)))
        .collect();
    let deficiency = |subset: u32| -> i64 {
        let mut neighbors = 0u128;
        for (u, mask) in neighbor_masks.iter().enumerate() {
            if subset & (1 << u) != 0 {
                neighbors |= mask;
            }
        }
        i64::from(subset.count_ones()) - i64::from(neighbors.count_ones())
    };
    let mut best = 0i64;
    let mut intersection = 0u32; // the empty set attains deficiency 0
    for subset in 0..(1u32 << n) {
        let d = deficiency(subset);
        if d > best {
            best = d;
            intersection = subset;
        } else if d == best {
            intersection &= subset;
        }
    }
    assert_eq!(
        deficiency(intersection),
        best,
        "maximizers must be closed under intersection"
    );
    Ok((0..n).filter(|u| intersection & (1 << u) != 0).collect())
}

/// Sorted candidate prices per item.
fn candidate_prices(
    instance: &Instance,
    resolution: &ExtendedRational,
    price_bound: &ExtendedRational,
) -> Vec<Vec<ExtendedRational>> {
    let mut base = BTreeSet::new();
    let mut price = ExtendedRational::zero();
    while price <= *price_bound {
        base.insert(price.clone());
        price = &price + resolution;
    }
    let mut sets = vec![base; instance.m_items()];
    for (j, set) in sets.iter_mut().enumerate() {
        set.insert(instance.reserve(j).clone());
    }
    if instance.family() == Family::Roi {
        for (set, ties) in sets.iter_mut().zip(roi_tie_prices(instance, price_bound)) {
            set.extend(ties);
        }
    }
    sets.into_iter().map(|set| set.into_iter().collect()).collect()
}

/// Prices at which return-seeking buyers' preferences can pivot.
///
/// Price raises in this family stop at budgets and reserves, and propagate
/// between items through return ties: `t_ij / p_j = t_ij' / p_j'` maps a
/// stopping price `c` on one item to `c · t_ij / t_ij'` on another. The
/// equilibrium infimum is built from such chains rather than grid steps, so
/// the closure of the stopping prices under tie maps (one hop per vertex on
/// a chain, hence `n + m` rounds) joins the grid as explicit candidates.
/// Markets whose closure outgrows [`TIE_CLOSURE_CAP`] keep a truncated set;
/// the evaluation-budget check sees the blow-up and refuses the search
/// before the truncation could be observed.
fn roi_tie_prices(
    instance: &Instance,
    price_bound: &ExtendedRational,
) -> Vec<BTreeSet<ExtendedRational>> {
    let n = instance.n_buyers();
    let m = instance.m_items();
    let mut sets: Vec<BTreeSet<ExtendedRational>> = vec![BTreeSet::new(); m];
    for (j, set) in sets.iter_mut().enumerate() {
        set.insert(instance.reserve(j).clone());
        for i in 0..n {
            let budget = instance.params(i, j).budget;
            if budget.is_finite() && budget <= *price_bound {
                set.insert(budget);
            }
        }
    }
    let mut frontier = sets.clone();
    for _round in 0..(n + m) {
        let mut next: Vec<BTreeSet<ExtendedRational>> = vec![BTreeSet::new(); m];
        for source in 0..m {
            for target in 0..m {
                if source == target {
                    continue;
                }
                for i in 0..n {
                    let from = instance.params(i, source).value;
                    let to = instance.params(i, target).value;
                    if !from.is_positive() || !to.is_positive() {
                        continue;
                    }
                    for price in &frontier[source] {
                        if price.is_zero() {
                            continue;
                        }
                        let mapped = &(&to * price) / &from;
                        if mapped <= *price_bound
                            && !sets[target].contains(&mapped)
                            && sets[target].len() + next[target].len() < TIE_CLOSURE_CAP
                        {
                            next[target].insert(mapped);
                        }
                    }
                }
            }
        }
        if next.iter().all(BTreeSet::is_empty) {
            break;
        }
        for (set, new) in sets.iter_mut().zip(&next) {
            set.extend(new.iter().cloned());
        }
        frontier = next;
    }
    sets
}

/// Every matching of `n` buyers to `m` items, the empty assignment included,
/// in buyer-major order with "unassigned" before the items.
fn enumerate_matchings(n: usize, m: usize) -> Vec<Vec<Option<usize>>> {
    fn recurse(
        buyer: usize,
        n: usize,
        m: usize,
        current: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<Option<usize>>>,
    ) {
        if buyer == n {
            out.push(current.clone());
            return;
        }
        current[buyer] = None;
        recurse(buyer + 1, n, m, current, used, out);
        for item in 0..m {
            if !used[item] {
                used[item] = true;
                current[buyer] = Some(item);
                recurse(buyer + 1, n, m, current, used, out);
                current[buyer] = None;
                used[item] = false;
            }
        }
    }
    let mut out = Vec::new();
    recurse(0, n, m, &mut vec![None; n], &mut vec![false; m], &mut out);
    out
}

/// `Σ_k C(n,k) · C(m,k) · k!`, saturating.
fn count_matchings(n: usize, m: usize) -> u128 {
    let choose = |n: u128, k: u128| -> u128 {
        let mut result = 1u128;
        for i in 0..k {
            result = result.saturating_mul(n - i) / (i + 1);
        }
        result
    };
    let mut total = 0u128;
    let mut factorial = 1u128;
    for k in 0..=n.min(m) {
        let k = k as u128;
        if k > 0 {
            factorial = factorial.saturating_mul(k);
        }
        total = total.saturating_add(
            choose(n as u128, k)
                .saturating_mul(choose(m as u128, k))
                .saturating_mul(factorial),
        );
    }
    total
}
