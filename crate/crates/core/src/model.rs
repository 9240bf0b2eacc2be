//! Market instances: buyers, items, per-pair utility parameters.
//!
//! A market has `n` unit-demand buyers and `m` items. Buyer `i`'s utility for
//! item `j` is a function of the item's price `p`, determined by the family
//! and the pair's parameters `(value, budget)`:
//!
//! * quasi-linear — `value - p` while `p <= budget`, else `-1`;
//! * return-on-investment (ROI) — `value / p` while `0 < p <= budget`, `+inf`
//!   at `p = 0` (or `0` when `value = 0`), else `-1`;
//! * ranked — `value - p` with offsets spaced so the buyer's item curves never
//!   overlap inside the budgets, i.e. a strict preference order over items.
//!
//! Every curve is continuous and strictly decreasing on `[0, budget]` and
//! drops to `-1` past the budget; that discontinuity is what distinguishes
//! this market from the classic assignment market.
//!
//! Instances also carry per-item reserve prices (default 0) and, by default,
//! `m` internal dummy buyers whose utility is exactly 0 at an item's reserve.
//! Dummies let unsold items clear at their reserve without special-casing.

use crate::rational::{ExtendedRational, Finite, NegInf, PosInf};
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    QuasiLinear,
    Roi,
    Ranked,
}

impl Family {
    /// Name of the per-pair value parameter in serialized form.
    pub fn value_key(&self) -> &'static str {
        match self {
            Family::QuasiLinear => "v",
            Family::Roi => "t",
            Family::Ranked => "M",
        }
    }
}

impl FromStr for Family {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, ModelError> {
        match s {
            "quasilinear" | "quasi_linear" => Ok(Family::QuasiLinear),
            "roi" => Ok(Family::Roi),
            "ranked" => Ok(Family::Ranked),
            other => Err(ModelError::UnknownFamily(other.to_string())),
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::QuasiLinear => "quasilinear",
            Family::Roi => "roi",
            Family::Ranked => "ranked",
        })
    }
}

/// Parameters of one buyer/item pair: the family-specific value (v, t or M)
/// and the hard payment cap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairParams {
    pub value: ExtendedRational,
    pub budget: ExtendedRational,
}

impl PairParams {
    pub fn new(value: ExtendedRational, budget: ExtendedRational) -> Self {
        PairParams { value, budget }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("unknown utility family {0:?}")]
    UnknownFamily(String),
    #[error("expected {expected} parameter rows, got {got}")]
    BadRowCount { expected: usize, got: usize },
    #[error("expected {expected} parameters in row {row}, got {got}")]
    BadRowLength { row: usize, expected: usize, got: usize },
    #[error("expected {expected} reserves, got {got}")]
    BadReserveCount { expected: usize, got: usize },
    #[error("buyer {buyer}, item {item}: {reason}")]
    BadParameter { buyer: usize, item: usize, reason: String },
    #[error("item {0}: reserve must be finite and non-negative")]
    BadReserve(usize),
    #[error("buyer {buyer}: ranked curves for items {item_a} and {item_b} overlap within budgets")]
    RankedCurvesCross { buyer: usize, item_a: usize, item_b: usize },
}

/// An immutable market instance.
///
/// Buyer indices `0..n_buyers()` are the real buyers; when dummies are
/// enabled (the default) indices `n_buyers()..total_buyers()` are internal
/// dummy buyers, one per item, with utility 0 at every item's reserve.
#[derive(Clone, Debug)]
pub struct Instance {
    family: Family,
    n_buyers: usize,
    m_items: usize,
    params: Vec<PairParams>, // row-major, real buyers only
    reserves: Vec<ExtendedRational>,
    include_dummies: bool,
}

impl Instance {
    /// Build an instance from per-buyer parameter rows. Reserves default to 0
    /// and dummy buyers are enabled; see [`Instance::with_reserves`] and
    /// [`Instance::without_dummies`].
    pub fn new(family: Family, rows: Vec<Vec<PairParams>>) -> Result<Self, ModelError> {
        let n_buyers = rows.len();
        let m_items = rows.first().map_or(0, Vec::len);
        let mut params = Vec::with_capacity(n_buyers * m_items);
        for (row_idx, row) in rows.into_iter().enumerate() {
            if row.len() != m_items {
                return Err(ModelError::BadRowLength {
                    row: row_idx,
                    expected: m_items,
                    got: row.len(),
                });
            }
            params.extend(row);
        }
        let instance = Instance {
            family,
            n_buyers,
            m_items,
            params,
            reserves: vec![ExtendedRational::zero(); m_items],
            include_dummies: true,
        };
        instance.validated()
    }

    pub fn with_reserves(mut self, reserves: Vec<ExtendedRational>) -> Result<Self, ModelError> {
        if reserves.len() != self.m_items {
            return Err(ModelError::BadReserveCount {
                expected: self.m_items,
                got: reserves.len(),
            });
        }
        self.reserves = reserves;
        self.validated()
    }

    pub fn without_dummies(mut self) -> Self {
        self.include_dummies = false;
        self
    }

    fn validated(mut self) -> Result<Self, ModelError> {
        for (j, r) in self.reserves.iter().enumerate() {
            if !r.is_finite() || r.is_negative() {
                return Err(ModelError::BadReserve(j));
            }
        }
        for i in 0..self.n_buyers {
            for j in 0..self.m_items {
                let p = &self.params[i * self.m_items + j];
                let bad = |reason: &str| ModelError::BadParameter {
                    buyer: i,
                    item: j,
                    reason: reason.to_string(),
                };
                if !p.value.is_finite() || p.value.is_negative() {
                    return Err(bad("value must be finite and non-negative"));
                }
                if p.budget.is_negative() || p.budget.is_neg_inf() {
                    return Err(bad("budget must be non-negative"));
                }
            }
        }
        if self.family == Family::Roi {
            // A zero return makes the pair worthless at any positive price;
            // such pairs are stored with budget 0 so the curve is the single
            // point u(0) = 0.
            for p in &mut self.params {
                if p.value.is_zero() {
                    p.budget = ExtendedRational::zero();
                }
            }
        }
        if self.family == Family::Ranked {
            self.check_ranked_curves()?;
        }
        Ok(self)
    }

    /// Ranked offsets must give each buyer a price-independent preference
    /// order: the reachable utility ranges `[max(0, M-b), M]` of any two items
    /// with positive offsets may touch but not overlap.
    fn check_ranked_curves(&self) -> Result<(), ModelError> {
        let zero = ExtendedRational::zero();
        for i in 0..self.n_buyers {
            for a in 0..self.m_items {
                let pa = self.real_params(i, a);
                if !pa.value.is_positive() {
                    continue;
                }
                let lo_a = (&pa.value - &pa.budget).max(zero.clone());
                for b in (a + 1)..self.m_items {
                    let pb = self.real_params(i, b);
                    if !pb.value.is_positive() {
                        continue;
                    }
                    let lo_b = (&pb.value - &pb.budget).max(zero.clone());
                    let hi = pa.value.clone().min(pb.value.clone());
                    let lo = lo_a.clone().max(lo_b);
                    if lo < hi {
                        return Err(ModelError::RankedCurvesCross {
                            buyer: i,
                            item_a: a,
                            item_b: b,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Number of real buyers.
    pub fn n_buyers(&self) -> usize {
        self.n_buyers
    }

    pub fn m_items(&self) -> usize {
        self.m_items
    }

    pub fn has_dummies(&self) -> bool {
        self.include_dummies
    }

    /// Real buyers plus internal dummies.
    pub fn total_buyers(&self) -> usize {
        if self.include_dummies {
            self.n_buyers + self.m_items
        } else {
            self.n_buyers
        }
    }

    pub fn is_dummy(&self, buyer: usize) -> bool {
        buyer >= self.n_buyers
    }

    pub fn reserve(&self, item: usize) -> &ExtendedRational {
        &self.reserves[item]
    }

    pub fn reserves(&self) -> &[ExtendedRational] {
        &self.reserves
    }

    fn real_params(&self, buyer: usize, item: usize) -> &PairParams {
        &self.params[buyer * self.m_items + item]
    }

    /// Parameters of a buyer/item pair. Dummy buyers get value = budget =
    /// reserve in every family: their curve is affine with utility exactly 0
    /// at the item's reserve and −1 above it, so a dummy can absorb any item
    /// left at its reserve but never competes beyond that. (An ROI-shaped
    /// dummy could not do this for positive reserves, and dummies never
    /// participate in price raises, so the family-consistency requirement
    /// does not apply to them.)
    pub fn params(&self, buyer: usize, item: usize) -> PairParams {
        if buyer < self.n_buyers {
            self.real_params(buyer, item).clone()
        } else {
            PairParams::new(self.reserves[item].clone(), self.reserves[item].clone())
        }
    }

    /// Whether the pair's curve is the affine `value - p` (all quasi-linear
    /// and ranked pairs, and every dummy pair regardless of family).
    fn is_affine_pair(&self, buyer: usize) -> bool {
        self.family != Family::Roi || self.is_dummy(buyer)
    }

    /// Utility of buyer `buyer` for item `item` at price `price`.
    pub fn utility(&self, buyer: usize, item: usize, price: &ExtendedRational) -> ExtendedRational {
        let PairParams { value, budget } = self.params(buyer, item);
        if *price > budget {
            return ExtendedRational::from_int(-1);
        }
        if self.is_affine_pair(buyer) {
            &value - price
        } else if price.is_zero() {
            if value.is_positive() {
                PosInf
            } else {
                ExtendedRational::zero()
            }
        } else {
            &value / price
        }
    }

    /// Smallest price `p` in `[0, budget]` with `utility(p) = q`; `+inf` when
    /// no such price exists. Since the curves are strictly decreasing the
    /// preimage, if any, is unique.
    pub fn utility_inverse(
        &self,
        buyer: usize,
        item: usize,
        q: &ExtendedRational,
    ) -> ExtendedRational {
        let PairParams { value, budget } = self.params(buyer, item);
        if self.is_affine_pair(buyer) {
            if !q.is_finite() {
                return PosInf;
            }
            let p = &value - q;
            if p.is_negative() || p > budget {
                PosInf
            } else {
                p
            }
        } else {
            let degenerate = value.is_zero(); // curve is the single point u(0)=0
            match q {
                PosInf => {
                    if degenerate {
                        PosInf
                    } else {
                        ExtendedRational::zero()
                    }
                }
                NegInf => PosInf,
                Finite(_) => {
                    if q.is_zero() {
                        return if degenerate { ExtendedRational::zero() } else { PosInf };
                    }
                    if !q.is_positive() || degenerate {
                        return PosInf;
                    }
                    let p = &value / q;
                    if p > budget {
                        PosInf
                    } else {
                        p
                    }
                }
            }
        }
    }

    /// The pair's two structural price levels: the price where utility reaches
    /// 0 (`+inf` if the curve never does within budget) and the budget itself.
    pub fn thresholds(&self, buyer: usize, item: usize) -> (ExtendedRational, ExtendedRational) {
        let zero_price = self.utility_inverse(buyer, item, &ExtendedRational::zero());
        (zero_price, self.params(buyer, item).budget)
    }
}
