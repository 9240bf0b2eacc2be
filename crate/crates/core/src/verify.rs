//! Outcome checkers: is a proposed assignment-plus-prices pair a competitive
//! equilibrium, and is it weakly or strongly stable?
//!
//! The checkers evaluate the defining conditions directly from the instance
//! parameters and know nothing about how an outcome was produced, so they can
//! referee solver outputs, hand-built outcomes, and brute-force searches
//! alike. They take concrete (finite) prices only; an outcome whose prices
//! carry "just above p" markers has to be realized at an explicit epsilon
//! first (see [`crate::raise::lift_plus`]).
//!
//! An outcome is a *competitive equilibrium* when the market clears — every
//! unsold item sits exactly at its reserve, no sold item is below its
//! reserve — and every buyer weakly prefers their own assignment (or their
//! empty assignment, at utility 0) to every item at the posted prices.
//!
//! Stability asks instead whether some buyer/seller pair could profitably
//! deviate. A pair blocks *strong* stability as soon as the buyer strictly
//! prefers the item at the seller's current payoff: the seller can take the
//! same payment, gaining weakly. Blocking *weak* stability requires both
//! sides to gain strictly, which for strictly decreasing utility curves
//! means the buyer must also have budget headroom above the current payoff.
//! A tight budget therefore shelters an outcome from weak blocking but not
//! from strong blocking; the two notions differ exactly on such pairs.

use crate::model::Instance;
use crate::rational::ExtendedRational;

/// One way a proposed outcome fails the equilibrium conditions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquilibriumViolation {
    /// An unsold item is priced away from its reserve.
    UnsoldOffReserve { item: usize },
    /// A sold item is priced below its reserve.
    SoldBelowReserve { item: usize },
    /// A winner gets strictly negative utility from the assigned item.
    WinnerLoss { buyer: usize },
    /// A buyer gets strictly more utility from `item` than from their
    /// assignment (for unassigned buyers: strictly more than 0).
    Envy { buyer: usize, item: usize },
}

/// Verdict of [`check_competitive_equilibrium`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquilibriumReport {
    pub violations: Vec<EquilibriumViolation>,
}

impl EquilibriumReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StabilityMode {
    Weak,
    Strong,
}

/// Verdict of [`check_stability`]: the buyer/item pairs that block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityReport {
    pub mode: StabilityMode,
    pub blocking_pairs: Vec<(usize, usize)>,
}

impl StabilityReport {
    pub fn holds(&self) -> bool {
        self.blocking_pairs.is_empty()
    }
}

/// The outcome handed to a checker is unusable; no verdict is possible.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CheckError {
    #[error("allocation lists {got} buyers, the market has {expected}")]
    AllocationLength { expected: usize, got: usize },
    #[error("price vector lists {got} items, the market has {expected}")]
    PriceLength { expected: usize, got: usize },
    #[error("buyer {buyer} is assigned item {item}, which does not exist")]
    UnknownItem { buyer: usize, item: usize },
    #[error("item {item} is assigned to two buyers")]
    ItemAssignedTwice { item: usize },
    #[error("item {item} has a negative or non-finite price")]
    BadPrice { item: usize },
    #[error("buyer {buyer} takes a loss at the assigned item; stability is defined for individually rational outcomes only")]
    NotIndividuallyRational { buyer: usize },
}

/// Checks that `allocation` (over the real buyers) and `prices` are
/// well-formed for `instance` and returns, per item, the buyer it is sold to.
fn validate(
    instance: &Instance,
    allocation: &[Option<usize>],
    prices: &[ExtendedRational],
) -> Result<Vec<Option<usize>>, CheckError> {
    if allocation.len() != instance.n_buyers() {
        return Err(CheckError::AllocationLength {
            expected: instance.n_buyers(),
            got: allocation.len(),
        });
    }
    if prices.len() != instance.m_items() {
        return Err(CheckError::PriceLength {
            expected: instance.m_items(),
            got: prices.len(),
        });
    }
    for (item, price) in prices.iter().enumerate() {
        if !price.is_finite() || price.is_negative() {
            return Err(CheckError::BadPrice { item });
        }
    }
    let mut winner_of = vec![None; instance.m_items()];
    for (buyer, assigned) in allocation.iter().enumerate() {
        if let Some(item) = *assigned {
            if item >= instance.m_items() {
                return Err(CheckError::UnknownItem { buyer, item });
            }
            if winner_of[item].replace(buyer).is_some() {
                return Err(CheckError::ItemAssignedTwice { item });
            }
        }
    }
    Ok(winner_of)
}

/// Is `(allocation, prices)` a competitive equilibrium of `instance`?
///
/// `allocation[i]` is the item assigned to real buyer `i`, if any; every
/// price must be a finite non-negative rational. The report lists every
/// violated condition: market clearing per item, then every buyer's loss or
/// envy, in index order.
pub fn check_competitive_equilibrium(
    instance: &Instance,
    allocation: &[Option<usize>],
    prices: &[ExtendedRational],
) -> Result<EquilibriumReport, CheckError> {
    let winner_of = validate(instance, allocation, prices)?;
    let mut violations = Vec::new();
    for (item, winner) in winner_of.iter().enumerate() {
        let price = &prices[item];
        let reserve = instance.reserve(item);
        if winner.is_none() && price != reserve {
            violations.push(EquilibriumViolation::UnsoldOffReserve { item });
        }
        if winner.is_some() && price < reserve {
            violations.push(EquilibriumViolation::SoldBelowReserve { item });
        }
    }
    for (buyer, assigned) in allocation.iter().enumerate() {
        let own = assigned.map(|item| instance.utility(buyer, item, &prices[item]));
        if own.as_ref().is_some_and(ExtendedRational::is_negative) {
            violations.push(EquilibriumViolation::WinnerLoss { buyer });
        }
        let baseline = own.unwrap_or_else(ExtendedRational::zero);
        for item in 0..instance.m_items() {
            if *assigned == Some(item) {
                continue;
            }
            if instance.utility(buyer, item, &prices[item]) > baseline {
                violations.push(EquilibriumViolation::Envy { buyer, item });
            }
        }
    }
    Ok(EquilibriumReport { violations })
}

/// Is `(allocation, payoffs)` weakly or strongly stable?
///
/// `payoffs[j]` is seller `j`'s current payoff — the price paid if the item
/// is sold, its reserve by convention otherwise. Stability is only defined
/// for individually rational outcomes, so a winner with strictly negative
/// utility is a [`CheckError::NotIndividuallyRational`] input, not a failed
/// verdict.
pub fn check_stability(
    instance: &Instance,
    allocation: &[Option<usize>],
    payoffs: &[ExtendedRational],
    mode: StabilityMode,
) -> Result<StabilityReport, CheckError> {
    validate(instance, allocation, payoffs)?;
    let mut baselines = Vec::with_capacity(allocation.len());
    for (buyer, assigned) in allocation.iter().enumerate() {
        let utility = match assigned {
            Some(item) => instance.utility(buyer, *item, &payoffs[*item]),
            None => ExtendedRational::zero(),
        };
        if utility.is_negative() {
            return Err(CheckError::NotIndividuallyRational { buyer });
        }
        baselines.push(utility);
    }
    let mut blocking_pairs = Vec::new();
    for (buyer, assigned) in allocation.iter().enumerate() {
        for item in 0..instance.m_items() {
            if *assigned == Some(item) {
                continue;
            }
            if instance.utility(buyer, item, &payoffs[item]) <= baselines[buyer] {
                continue;
            }
            // The buyer strictly gains at the seller's current payoff, so the
            // pair blocks strong stability outright. Blocking weak stability
            // needs a strictly higher payment the buyer can still afford:
            // headroom below the budget, since the curve is continuous there.
            let blocks = match mode {
                StabilityMode::Strong => true,
                StabilityMode::Weak => payoffs[item] < instance.params(buyer, item).budget,
            };
            if blocks {
                blocking_pairs.push((buyer, item));
            }
        }
    }
    Ok(StabilityReport { mode, blocking_pairs })
}
