//! Shared fixtures for unit tests: small markets that several modules probe
//! from different angles.

use crate::model::{Family, Instance, PairParams};
use crate::rational::ExtendedRational;

/// Parse an extended rational from a literal; panics on bad input.
pub(crate) fn er(s: &str) -> ExtendedRational {
    s.parse().expect("test literal")
}

/// Build a `(value, budget)` pair from literals.
pub(crate) fn pair(value: &str, budget: &str) -> PairParams {
    PairParams::new(er(value), er(budget))
}

/// Build an instance from rows of `(value, budget)` literals.
pub(crate) fn market(family: Family, rows: &[&[(&str, &str)]]) -> Instance {
    let rows = rows
        .iter()
        .map(|row| row.iter().map(|(v, b)| pair(v, b)).collect())
        .collect();
    Instance::new(family, rows).expect("test instance")
}

/// Three quasi-linear buyers over two identical items: the first two have
/// deep budgets, the third is capped at 2 and forces the first marks.
pub(crate) fn three_buyer_market() -> Instance {
    market(
        Family::QuasiLinear,
        &[
            &[("10", "10"), ("10", "10")],
            &[("10", "10"), ("10", "10")],
            &[("10", "2"), ("10", "2")],
        ],
    )
}

/// Five quasi-linear buyers over three items; the first item is coveted by
/// everyone while the others are fallbacks, so prices climb in several
/// stages with deletions along the way.
pub(crate) fn five_buyer_market() -> Instance {
    market(
        Family::QuasiLinear,
        &[
            &[("1000", "inf"), ("100", "inf"), ("100", "inf")],
            &[("200", "190"), ("11", "190"), ("11", "190")],
            &[("20", "2"), ("10", "2"), ("10", "2")],
            &[("20", "1"), ("10", "1"), ("10", "1")],
            &[("20", "1"), ("10", "1"), ("10", "1")],
        ],
    )
}
