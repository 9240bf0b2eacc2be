//! The direct mechanism built on the solver, and a falsification probe for
//! its incentives.
//!
//! Bidders submit per-pair parameters; the mechanism solves for the cheapest
//! clearing prices of the *submitted* market and trades accordingly. When no
//! prices clear that market, nothing is traded: every bidder walks away
//! empty-handed at utility zero (reported as the solver's `NoEquilibrium`
//! result).
//!
//! Whether a bidder can gain by misreporting is probed, not proven:
//! [`best_response_probe`] replays the mechanism against a finite,
//! caller-chosen set of alternative bids for one bidder and compares that
//! bidder's *true* payoff across the runs. Because winning prices can be
//! "just above" a level, a payoff is reported two ways: at prices realized a
//! small step up (the money actually paid at tolerance ε), and at the bare
//! levels (the limit as the step shrinks). A profitable deviation under the
//! realized reading is a genuine counterexample to truthfulness; when the
//! truthful market clears, the probe is expected to find none.

use crate::model::{Instance, PairParams};
use crate::rational::ExtendedRational;
use crate::solver::{algmin, realize_prices, Outcome, SolveResult};

/// Solve the submitted market and trade at its cheapest clearing prices, or
/// trade nothing when no prices clear it.
pub fn run_mechanism(bids: &Instance) -> Outcome {
    algmin(bids)
}

/// A bidder's true payoff from one mechanism run, under both readings of a
/// just-above price.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PayoffSample {
    /// Utility at concrete prices, every just-above level lifted by at most
    /// the probe's tolerance.
    pub realized: ExtendedRational,
    /// Utility read directly at the numeric levels — the limit of
    /// `realized` as the tolerance shrinks to zero.
    pub limit: ExtendedRational,
}

impl PayoffSample {
    fn empty_handed() -> Self {
        PayoffSample {
            realized: ExtendedRational::zero(),
            limit: ExtendedRational::zero(),
        }
    }
}

/// What [`best_response_probe`] found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BestResponseReport {
    /// The deviator's payoff when everyone, including it, bids truthfully.
    pub truthful: PayoffSample,
    /// The best payoff over the probed deviations.
    pub best_deviation: PayoffSample,
    /// Index into the probed set attaining `best_deviation` (largest
    /// realized payoff, earliest on ties).
    pub best_index: usize,
}

impl BestResponseReport {
    /// Whether some probed deviation strictly beats telling the truth, at
    /// the realized prices.
    pub fn deviation_profits(&self) -> bool {
        self.best_deviation.realized > self.truthful.realized
    }
}

/// Replay the mechanism with `deviator` swapping its row for each entry of
/// `deviation_set` (everyone else truthful), and report the deviator's true
/// payoffs: truthful run versus the best probed deviation. Just-above prices
/// are realized at tolerance `epsilon`.
///
/// Each deviation row must be valid for the instance's family; the set must
/// be non-empty.
pub fn best_response_probe(
    true_instance: &Instance,
    deviator: usize,
    deviation_set: &[Vec<PairParams>],
    epsilon: &ExtendedRational,
) -> BestResponseReport {
    assert!(
        deviator < true_instance.n_buyers(),
        "the deviator must be a real buyer"
    );
    assert!(
        !deviation_set.is_empty(),
        "the probe needs at least one deviation to try"
    );
    let truthful_outcome = run_mechanism(true_instance);
    let truthful = payoff(true_instance, true_instance, deviator, &truthful_outcome, epsilon);
    let mut best: Option<(usize, PayoffSample)> = None;
    for (index, row) in deviation_set.iter().enumerate() {
        let bids = with_row_replaced(true_instance, deviator, row.clone());
        let outcome = run_mechanism(&bids);
        let sample = payoff(true_instance, &bids, deviator, &outcome, epsilon);
        if best
            .as_ref()
            .is_none_or(|(_, cur)| sample.realized > cur.realized)
        {
            best = Some((index, sample));
        }
    }
    let (best_index, best_deviation) = best.expect("deviation_set is non-empty");
    BestResponseReport {
        truthful,
        best_deviation,
        best_index,
    }
}

/// The deviator's true payoff from an outcome of the (possibly misreported)
/// `bids` market. Prices are lifted against `bids`: that is the market whose
/// ties the mechanism must preserve when it steps above a level.
fn payoff(
    true_instance: &Instance,
    bids: &Instance,
    deviator: usize,
    outcome: &Outcome,
    epsilon: &ExtendedRational,
) -> PayoffSample {
    let SolveResult::Equilibrium { allocation, prices } = &outcome.result else {
        return PayoffSample::empty_handed();
    };
    let Some(item) = allocation[deviator] else {
        return PayoffSample::empty_handed();
    };
    let realized = realize_prices(bids, prices, epsilon)
        .expect("a solved market always admits a price lift");
    PayoffSample {
        realized: true_instance.utility(deviator, item, &realized[item]),
        limit: true_instance.utility(deviator, item, &prices[item].price),
    }
}

fn with_row_replaced(instance: &Instance, buyer: usize, row: Vec<PairParams>) -> Instance {
    let rows: Vec<Vec<PairParams>> = (0..instance.n_buyers())
        .map(|i| {
            if i == buyer {
                row.clone()
            } else {
                (0..instance.m_items()).map(|j| instance.params(i, j)).collect()
            }
        })
        .collect();
    Instance::new(instance.family(), rows)
        .and_then(|inst| inst.with_reserves(instance.reserves().to_vec()))
        .expect("a probed deviation must stay valid for the instance's family")
}
