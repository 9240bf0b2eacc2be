//! File formats and command implementations behind the `mineq` binary.
//!
//! Instances and outcomes travel as JSON documents in which every number is
//! a rational string — `"19"`, `"3/2"`, or `"inf"` — so prices and
//! parameters round-trip without floating-point loss. Buyers and items are
//! referred to by the names declared in the instance file; the solver's
//! indices never leak into the files.
//!
//! Every command returns its report on standard output and signals the
//! verdict through the exit code:
//!
//! | code | meaning                                                  |
//! |------|----------------------------------------------------------|
//! | 0    | success: solved, check passed, or report produced        |
//! | 1    | unreadable, malformed, or inconsistent input             |
//! | 2    | refused: the exhaustive search would exceed its budget   |
//! | 3    | the market has no competitive equilibrium                |
//! | 4    | the check ran to completion and failed                   |

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use mineq::mechanism::best_response_probe;
use mineq::model::{Family, Instance, PairParams};
use mineq::oracle::{default_price_bound, default_resolution, grid_equilibria, OracleError};
use mineq::solver::{realize_prices, StageEvent, StageRecord};
use mineq::verify::{
    check_competitive_equilibrium, check_stability, CheckError, EquilibriumViolation,
    StabilityMode,
};
use mineq::{algmin, solve_with_trace, ExtendedRational, SolveResult};
use serde::{Deserialize, Serialize};

/// A finished command: the report for standard output plus the exit code.
pub struct CmdOutput {
    pub stdout: String,
    pub code: i32,
}

/// Failures that abort a command before it can produce a verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// Unreadable, malformed, or internally inconsistent input (exit 1).
    Input(String),
    /// The request is too large for exhaustive treatment (exit 2).
    Refused(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Refused(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) | CliError::Refused(msg) => f.write_str(msg),
        }
    }
}

impl std::error::Error for CliError {}

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------

/// A market description. `params` is an n×m array of rows, one per buyer in
/// `buyers` order, each row one entry per item in `items` order. An entry
/// carries the family's value key (`v` for quasilinear, `t` for roi, `M` for
/// ranked) and the budget key `b`.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct InstanceFile {
    pub family: String,
    pub buyers: Vec<String>,
    pub items: Vec<String>,
    pub params: Vec<Vec<BTreeMap<String, String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reserves: Option<Vec<String>>,
}

/// One buyer-item pairing, by name.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub buyer: String,
    pub item: String,
}

/// An item's price; `plus` marks a price the market only supports from
/// strictly above.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct PriceEntry {
    pub item: String,
    pub value: String,
    pub plus: bool,
}

/// A concrete (already lifted) price.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct RealizedPrice {
    pub item: String,
    pub value: String,
}

/// What a price-raising stage stopped on.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TraceEventFile {
    /// Snapshot before the first raise.
    Start,
    /// New ties formed toward items outside the raised block.
    EdgesAdded { pairs: Vec<Assignment> },
    /// Buyers whose utility reached zero left the market.
    BuyersPricedOut { buyers: Vec<String> },
    /// Budgets ran out: the block's items now carry just-above prices and
    /// the exactly-exhausted pairs were severed.
    ItemsMarked {
        items: Vec<String>,
        deleted: Vec<Assignment>,
    },
    /// A group of buyers was left short of items; the spare items were
    /// marked and their exactly-exhausted pairs severed.
    ShortfallMarked {
        items: Vec<String>,
        deleted: Vec<Assignment>,
    },
    /// Prices could grow without bound; the solve ended with no equilibrium.
    Unbounded,
}

/// One stage of the solve, with the prices in force when it began.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct TraceStage {
    pub stage: usize,
    pub phase: usize,
    pub prices: Vec<String>,
    pub critical: Vec<String>,
    pub component_buyers: Vec<String>,
    pub component_items: Vec<String>,
    pub event: TraceEventFile,
}

/// A solve result. For `"no_equilibrium"` the allocation and price arrays
/// are empty; otherwise prices cover every item and `allocation` lists the
/// winning pairs only.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct OutcomeFile {
    pub status: String,
    pub allocation: Vec<Assignment>,
    pub prices: Vec<PriceEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realized_prices: Option<Vec<RealizedPrice>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceStage>>,
}

pub const STATUS_EQUILIBRIUM: &str = "equilibrium";
pub const STATUS_NO_EQUILIBRIUM: &str = "no_equilibrium";

// ---------------------------------------------------------------------------
// Parsing and conversion
// ---------------------------------------------------------------------------

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path, what: &str) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| input(format!("cannot read {what} {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| input(format!("malformed {what} {}: {e}", path.display())))
}

pub fn read_instance_file(path: &Path) -> Result<InstanceFile, CliError> {
    read_json(path, "instance file")
}

pub fn read_outcome_file(path: &Path) -> Result<OutcomeFile, CliError> {
    read_json(path, "outcome file")
}

fn parse_rational(text: &str, what: &str) -> Result<ExtendedRational, CliError> {
    text.parse()
        .map_err(|e| input(format!("{what}: bad rational {text:?}: {e}")))
}

fn parse_param_entry(
    entry: &BTreeMap<String, String>,
    value_key: &str,
    at: &str,
) -> Result<PairParams, CliError> {
    let mut keys: Vec<&str> = entry.keys().map(String::as_str).collect();
    keys.sort_unstable();
    let mut expected = vec![value_key, "b"];
    expected.sort_unstable();
    if keys != expected {
        return Err(input(format!(
            "{at}: expected exactly the keys {expected:?}, got {keys:?}"
        )));
    }
    let value = parse_rational(&entry[value_key], &format!("{at}.{value_key}"))?;
    let budget = parse_rational(&entry["b"], &format!("{at}.b"))?;
    Ok(PairParams::new(value, budget))
}

fn check_unique(names: &[String], what: &str) -> Result<(), CliError> {
    let mut seen = std::collections::BTreeSet::new();
    for name in names {
        if !seen.insert(name) {
            return Err(input(format!("duplicate {what} name {name:?}")));
        }
    }
    Ok(())
}

/// Build the in-memory market from a parsed file, validating dimensions,
/// name uniqueness, and the family's parameter constraints.
pub fn to_instance(file: &InstanceFile) -> Result<Instance, CliError> {
    let family: Family = file
        .family
        .parse()
        .map_err(|e| input(format!("family: {e}")))?;
    check_unique(&file.buyers, "buyer")?;
    check_unique(&file.items, "item")?;
    let n = file.buyers.len();
    let m = file.items.len();
    if file.params.len() != n {
        return Err(input(format!(
            "params has {} rows, the file names {n} buyers",
            file.params.len()
        )));
    }
    let key = family.value_key();
    let mut rows = Vec::with_capacity(n);
    for (i, row) in file.params.iter().enumerate() {
        if row.len() != m {
            return Err(input(format!(
                "params[{i}] has {} entries, the file names {m} items",
                row.len()
            )));
        }
        let mut parsed = Vec::with_capacity(m);
        for (j, entry) in row.iter().enumerate() {
            parsed.push(parse_param_entry(entry, key, &format!("params[{i}][{j}]"))?);
        }
        rows.push(parsed);
    }
    let instance = Instance::new(family, rows).map_err(|e| input(format!("params: {e}")))?;
    match &file.reserves {
        None => Ok(instance),
        Some(reserves) => {
            if reserves.len() != m {
                return Err(input(format!(
                    "reserves has {} entries, the file names {m} items",
                    reserves.len()
                )));
            }
            let parsed: Result<Vec<_>, _> = reserves
                .iter()
                .enumerate()
                .map(|(j, r)| parse_rational(r, &format!("reserves[{j}]")))
                .collect();
            instance
                .with_reserves(parsed?)
                .map_err(|e| input(format!("reserves: {e}")))
        }
    }
}

fn buyer_name(file: &InstanceFile, index: usize) -> String {
    file.buyers
        .get(index)
        .cloned()
        .unwrap_or_else(|| format!("buyer[{index}]"))
}

fn item_name(file: &InstanceFile, index: usize) -> String {
    file.items
        .get(index)
        .cloned()
        .unwrap_or_else(|| format!("item[{index}]"))
}

fn assignment(file: &InstanceFile, buyer: usize, item: usize) -> Assignment {
    Assignment {
        buyer: buyer_name(file, buyer),
        item: item_name(file, item),
    }
}

fn trace_to_file(file: &InstanceFile, trace: &[StageRecord]) -> Vec<TraceStage> {
    trace
        .iter()
        .map(|record| TraceStage {
            stage: record.stage,
            phase: record.phase,
            prices: record.prices.iter().map(|p| p.to_string()).collect(),
            critical: record.critical.iter().map(|&i| buyer_name(file, i)).collect(),
            component_buyers: record
                .component_buyers
                .iter()
                .map(|&i| buyer_name(file, i))
                .collect(),
            component_items: record
                .component_items
                .iter()
                .map(|&j| item_name(file, j))
                .collect(),
            event: match &record.event {
                StageEvent::Start => TraceEventFile::Start,
                StageEvent::EdgesAdded { pairs } => TraceEventFile::EdgesAdded {
                    pairs: pairs.iter().map(|&(i, j)| assignment(file, i, j)).collect(),
                },
                StageEvent::BuyersPricedOut { buyers } => TraceEventFile::BuyersPricedOut {
                    buyers: buyers.iter().map(|&i| buyer_name(file, i)).collect(),
                },
                StageEvent::ItemsMarked { items, deleted } => TraceEventFile::ItemsMarked {
                    items: items.iter().map(|&j| item_name(file, j)).collect(),
                    deleted: deleted.iter().map(|&(i, j)| assignment(file, i, j)).collect(),
                },
                StageEvent::ShortfallMarked { items, deleted } => TraceEventFile::ShortfallMarked {
                    items: items.iter().map(|&j| item_name(file, j)).collect(),
                    deleted: deleted.iter().map(|&(i, j)| assignment(file, i, j)).collect(),
                },
                StageEvent::Unbounded => TraceEventFile::Unbounded,
            },
        })
        .collect()
}

fn render<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports are serializable");
    text.push('\n');
    text
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

pub fn cmd_solve(
    instance_path: &Path,
    trace: bool,
    epsilon: &str,
    realize: bool,
) -> Result<CmdOutput, CliError> {
    let file = read_instance_file(instance_path)?;
    let instance = to_instance(&file)?;
    let epsilon = parse_rational(epsilon, "--epsilon")?;
    if !epsilon.is_finite() || !epsilon.is_positive() {
        return Err(input("--epsilon must be a positive finite rational"));
    }

    let outcome = if trace {
        solve_with_trace(&instance)
    } else {
        algmin(&instance)
    };
    let trace_out = trace.then(|| trace_to_file(&file, &outcome.trace));

    match outcome.result {
        SolveResult::NoEquilibrium => {
            let report = OutcomeFile {
                status: STATUS_NO_EQUILIBRIUM.to_string(),
                allocation: Vec::new(),
                prices: Vec::new(),
                realized_prices: None,
                trace: trace_out,
            };
            Ok(CmdOutput {
                stdout: render(&report),
                code: 3,
            })
        }
        SolveResult::Equilibrium { allocation, prices } => {
            let realized_prices = if realize {
                let lifted = realize_prices(&instance, &prices, &epsilon)
                    .map_err(|e| input(format!("cannot realize prices: {e}")))?;
                Some(
                    lifted
                        .iter()
                        .enumerate()
                        .map(|(j, p)| RealizedPrice {
                            item: item_name(&file, j),
                            value: p.to_string(),
                        })
                        .collect(),
                )
            } else {
                None
            };
            let report = OutcomeFile {
                status: STATUS_EQUILIBRIUM.to_string(),
                allocation: allocation
                    .iter()
                    .enumerate()
                    .filter_map(|(i, slot)| slot.map(|j| assignment(&file, i, j)))
                    .collect(),
                prices: prices
                    .iter()
                    .enumerate()
                    .map(|(j, p)| PriceEntry {
                        item: item_name(&file, j),
                        value: p.price.to_string(),
                        plus: p.plus,
                    })
                    .collect(),
                realized_prices,
                trace: trace_out,
            };
            Ok(CmdOutput {
                stdout: render(&report),
                code: 0,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct CheckReport {
    mode: String,
    pass: bool,
    violations: Vec<String>,
}

fn item_index(file: &InstanceFile, name: &str) -> Result<usize, CliError> {
    file.items
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| input(format!("unknown item name {name:?}")))
}

fn buyer_index(file: &InstanceFile, name: &str) -> Result<usize, CliError> {
    file.buyers
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| input(format!("unknown buyer name {name:?}")))
}

/// Translate an outcome file into the checker's vectors: a full allocation
/// over buyers and one concrete price per item. Just-above prices are only
/// accepted through an accompanying realized price vector.
fn outcome_vectors(
    file: &InstanceFile,
    outcome: &OutcomeFile,
) -> Result<(Vec<Option<usize>>, Vec<ExtendedRational>), CliError> {
    if outcome.status != STATUS_EQUILIBRIUM {
        return Err(input(format!(
            "outcome status {:?} offers nothing to check",
            outcome.status
        )));
    }
    let mut allocation: Vec<Option<usize>> = vec![None; file.buyers.len()];
    for pair in &outcome.allocation {
        let i = buyer_index(file, &pair.buyer)?;
        let j = item_index(file, &pair.item)?;
        if allocation[i].is_some() {
            return Err(input(format!("buyer {:?} is assigned twice", pair.buyer)));
        }
        allocation[i] = Some(j);
    }

    let m = file.items.len();
    let mut prices: Vec<Option<ExtendedRational>> = vec![None; m];
    if let Some(realized) = &outcome.realized_prices {
        for entry in realized {
            let j = item_index(file, &entry.item)?;
            if prices[j].is_some() {
                return Err(input(format!("item {:?} is priced twice", entry.item)));
            }
            prices[j] = Some(parse_rational(&entry.value, "realized price")?);
        }
    } else {
        if let Some(entry) = outcome.prices.iter().find(|e| e.plus) {
            return Err(input(format!(
                "item {:?} carries a just-above price; realize it first (solve --realize)",
                entry.item
            )));
        }
        for entry in &outcome.prices {
            let j = item_index(file, &entry.item)?;
            if prices[j].is_some() {
                return Err(input(format!("item {:?} is priced twice", entry.item)));
            }
            prices[j] = Some(parse_rational(&entry.value, "price")?);
        }
    }
    let prices: Vec<ExtendedRational> = prices
        .into_iter()
        .enumerate()
        .map(|(j, p)| p.ok_or_else(|| input(format!("no price for item {:?}", item_name(file, j)))))
        .collect::<Result<_, _>>()?;
    Ok((allocation, prices))
}

fn describe_violation(file: &InstanceFile, violation: &EquilibriumViolation) -> String {
    match violation {
        EquilibriumViolation::UnsoldOffReserve { item } => {
            format!("unsold item {:?} is priced away from its reserve", item_name(file, *item))
        }
        EquilibriumViolation::SoldBelowReserve { item } => {
            format!("item {:?} sells below its reserve", item_name(file, *item))
        }
        EquilibriumViolation::WinnerLoss { buyer } => {
            format!("buyer {:?} takes a loss on the assigned item", buyer_name(file, *buyer))
        }
        EquilibriumViolation::Envy { buyer, item } => format!(
            "buyer {:?} strictly prefers item {:?} at these prices",
            buyer_name(file, *buyer),
            item_name(file, *item)
        ),
    }
}

pub fn cmd_check(
    instance_path: &Path,
    outcome_path: &Path,
    mode: &str,
) -> Result<CmdOutput, CliError> {
    let file = read_instance_file(instance_path)?;
    let instance = to_instance(&file)?;
    let outcome = read_outcome_file(outcome_path)?;
    let (allocation, prices) = outcome_vectors(&file, &outcome)?;

    let violations = match mode {
        "ce" => {
            let report = check_competitive_equilibrium(&instance, &allocation, &prices)
                .map_err(|e| input(format!("outcome does not fit the instance: {e}")))?;
            report
                .violations
                .iter()
                .map(|v| describe_violation(&file, v))
                .collect::<Vec<String>>()
        }
        "weak" | "strong" => {
            let stability_mode = if mode == "weak" {
                StabilityMode::Weak
            } else {
                StabilityMode::Strong
            };
            match check_stability(&instance, &allocation, &prices, stability_mode) {
                Ok(report) => report
                    .blocking_pairs
                    .iter()
                    .map(|&(i, j)| {
                        format!(
                            "buyer {:?} and item {:?} block the outcome",
                            buyer_name(&file, i),
                            item_name(&file, j)
                        )
                    })
                    .collect(),
                Err(CheckError::NotIndividuallyRational { buyer }) => {
                    vec![format!(
                        "buyer {:?} takes a loss on the assigned item",
                        buyer_name(&file, buyer)
                    )]
                }
                Err(e) => return Err(input(format!("outcome does not fit the instance: {e}"))),
            }
        }
        other => {
            return Err(input(format!(
                "--mode must be ce, weak, or strong, got {other:?}"
            )))
        }
    };

    let pass = violations.is_empty();
    let report = CheckReport {
        mode: mode.to_string(),
        pass,
        violations,
    };
    Ok(CmdOutput {
        stdout: render(&report),
        code: if pass { 0 } else { 4 },
    })
}

// ---------------------------------------------------------------------------
// oracle
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct OracleEquilibrium {
    allocation: Vec<Assignment>,
    prices: Vec<String>,
}

#[derive(Serialize)]
struct OracleReport {
    resolution: String,
    bound: String,
    count: usize,
    infimum: Option<Vec<String>>,
    equilibria: Vec<OracleEquilibrium>,
}

pub fn cmd_oracle(
    instance_path: &Path,
    resolution: Option<&str>,
    bound: Option<&str>,
) -> Result<CmdOutput, CliError> {
    let file = read_instance_file(instance_path)?;
    let instance = to_instance(&file)?;
    let resolution = match resolution {
        Some(text) => parse_rational(text, "--resolution")?,
        None => default_resolution(&instance),
    };
    let bound = match bound {
        Some(text) => parse_rational(text, "--bound")?,
        None => default_price_bound(&instance),
    };

    let equilibria = grid_equilibria(&instance, &resolution, &bound).map_err(|e| match e {
        OracleError::BudgetExceeded { .. } | OracleError::TooManyBuyers { .. } => {
            CliError::Refused(e.to_string())
        }
        OracleError::BadResolution | OracleError::BadBound => CliError::Input(e.to_string()),
    })?;

    let infimum = equilibria.split_first().map(|(first, rest)| {
        let mut min = first.prices.clone();
        for eq in rest {
            for (slot, price) in min.iter_mut().zip(&eq.prices) {
                if price < slot {
                    *slot = price.clone();
                }
            }
        }
        min.iter().map(|p| p.to_string()).collect::<Vec<String>>()
    });
    let report = OracleReport {
        resolution: resolution.to_string(),
        bound: bound.to_string(),
        count: equilibria.len(),
        infimum,
        equilibria: equilibria
            .iter()
            .map(|eq| OracleEquilibrium {
                allocation: eq
                    .allocation
                    .iter()
                    .enumerate()
                    .filter_map(|(i, slot)| slot.map(|j| assignment(&file, i, j)))
                    .collect(),
                prices: eq.prices.iter().map(|p| p.to_string()).collect(),
            })
            .collect(),
    };
    let code = if report.count == 0 { 3 } else { 0 };
    Ok(CmdOutput {
        stdout: render(&report),
        code,
    })
}

// ---------------------------------------------------------------------------
// nash
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct PayoffReport {
    realized: String,
    limit: String,
}

#[derive(Serialize)]
struct NashReport {
    deviator: String,
    epsilon: String,
    deviations: usize,
    truthful: PayoffReport,
    best: PayoffReport,
    best_index: usize,
    profitable: bool,
}

/// Rebuild the market with one buyer's row swapped out, validating that the
/// replacement still fits the family.
fn with_replaced_row(
    instance: &Instance,
    buyer: usize,
    row: &[PairParams],
) -> Result<Instance, String> {
    let rows: Vec<Vec<PairParams>> = (0..instance.n_buyers())
        .map(|i| {
            (0..instance.m_items())
                .map(|j| {
                    if i == buyer {
                        row[j].clone()
                    } else {
                        instance.params(i, j)
                    }
                })
                .collect()
        })
        .collect();
    Instance::new(instance.family(), rows)
        .and_then(|inst| inst.with_reserves(instance.reserves().to_vec()))
        .map_err(|e| e.to_string())
}

/// The built-in deviation grid: every single value or budget nudged by ±1
/// and ±2, keeping only rows the family accepts.
fn built_in_grid(instance: &Instance, deviator: usize) -> Vec<Vec<PairParams>> {
    let truth: Vec<PairParams> = (0..instance.m_items())
        .map(|j| instance.params(deviator, j))
        .collect();
    let mut grid = Vec::new();
    for j in 0..instance.m_items() {
        for step in [1i64, 2] {
            let delta = ExtendedRational::from_int(step);
            let mut candidates = Vec::new();
            let mut variant = truth.clone();
            variant[j].value = &truth[j].value + &delta;
            candidates.push(variant);
            if truth[j].value >= delta {
                let mut variant = truth.clone();
                variant[j].value = &truth[j].value - &delta;
                candidates.push(variant);
            }
            let mut variant = truth.clone();
            variant[j].budget = &truth[j].budget + &delta;
            candidates.push(variant);
            if truth[j].budget >= delta {
                let mut variant = truth.clone();
                variant[j].budget = &truth[j].budget - &delta;
                candidates.push(variant);
            }
            for row in candidates {
                if with_replaced_row(instance, deviator, &row).is_ok() {
                    grid.push(row);
                }
            }
        }
    }
    grid
}

pub fn cmd_nash(
    instance_path: &Path,
    deviator: &str,
    grid_spec: Option<&Path>,
) -> Result<CmdOutput, CliError> {
    let file = read_instance_file(instance_path)?;
    let instance = to_instance(&file)?;
    let index = buyer_index(&file, deviator)?;
    let epsilon = ExtendedRational::ratio(1, 100);

    // The truth always sits at index 0 so the probe is never worse off than
    // honest bidding.
    let truth: Vec<PairParams> = (0..instance.m_items())
        .map(|j| instance.params(index, j))
        .collect();
    let mut grid = vec![truth];
    match grid_spec {
        None => grid.extend(built_in_grid(&instance, index)),
        Some(path) => {
            let rows: Vec<Vec<BTreeMap<String, String>>> = read_json(path, "deviation grid")?;
            let key = instance.family().value_key();
            for (r, row) in rows.iter().enumerate() {
                if row.len() != instance.m_items() {
                    return Err(input(format!(
                        "grid row {r} has {} entries, the market has {} items",
                        row.len(),
                        instance.m_items()
                    )));
                }
                let parsed: Result<Vec<PairParams>, CliError> = row
                    .iter()
                    .enumerate()
                    .map(|(j, entry)| parse_param_entry(entry, key, &format!("grid[{r}][{j}]")))
                    .collect();
                let parsed = parsed?;
                with_replaced_row(&instance, index, &parsed)
                    .map_err(|e| input(format!("grid row {r}: {e}")))?;
                grid.push(parsed);
            }
        }
    }

    let report = best_response_probe(&instance, index, &grid, &epsilon);
    let rendered = NashReport {
        deviator: deviator.to_string(),
        epsilon: epsilon.to_string(),
        deviations: grid.len(),
        truthful: PayoffReport {
            realized: report.truthful.realized.to_string(),
            limit: report.truthful.limit.to_string(),
        },
        best: PayoffReport {
            realized: report.best_deviation.realized.to_string(),
            limit: report.best_deviation.limit.to_string(),
        },
        best_index: report.best_index,
        profitable: report.deviation_profits(),
    };
    Ok(CmdOutput {
        stdout: render(&rendered),
        code: 0,
    })
}

// ---------------------------------------------------------------------------
