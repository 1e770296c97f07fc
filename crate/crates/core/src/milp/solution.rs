//! Solver solutions: parsing the `name value` format and turning an
//! assignment back into a checked certificate bundle.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use thiserror::Error;

use super::{MilpModel, VarKind, Variant};
use crate::cert::{covering_bound, CertError, CertificateBundle};
use crate::dyadic::{parse_decimal, rationalize_rational, DyadicError, DyadicRational};
use crate::strategy::{expand_symmetric, StrategyError, TreeStrategy};

/// Distance from 0 or 1 within which a binary value is accepted.
pub const SNAP_TOLERANCE: f64 = 0.3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolutionError {
    #[error("solution line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("solution line {line}: unknown variable `{name}`")]
    UnknownVariable { line: usize, name: String },
    #[error("solution line {line}: binary `{name}` = {value} is not within {SNAP_TOLERANCE} of 0 or 1")]
    AmbiguousBinary { line: usize, name: String, value: String },
    #[error("solution line {line}: `{name}` is assigned twice")]
    Duplicate { line: usize, name: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("solver reported status `{0}`")]
    Status(SolveStatus),
    #[error("strategy {strategy}: {msg}")]
    Structure { strategy: usize, msg: String },
    #[error("strategy {strategy}: `{name}`: {source}")]
    Weight { strategy: usize, name: String, source: DyadicError },
    #[error("strategy {strategy}: weight of `{vertex}` is {weight}, above the bound 2^(ell-1) = {limit}")]
    WeightTooLarge { strategy: usize, vertex: String, weight: DyadicRational, limit: i64 },
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Cert(#[from] CertError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolveStatus {
    Optimal,
    Feasible,
    Infeasible,
    #[default]
    Unknown,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Feasible => "feasible",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Binary(bool),
    /// Decimal text exactly as the solver wrote it.
    Continuous(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SolutionAssignment {
    pub values: HashMap<String, Value>,
    pub objective: Option<String>,
    pub status: SolveStatus,
}

impl SolutionAssignment {
    pub fn binary(&self, name: &str) -> bool {
        matches!(self.values.get(name), Some(Value::Binary(true)))
    }

    /// Continuous value as an exact rational; absent variables are zero.
    pub fn continuous(&self, name: &str) -> Option<Result<BigRational, DyadicError>> {
        match self.values.get(name) {
            Some(Value::Continuous(text)) => Some(parse_decimal(text)),
            _ => None,
        }
    }
}

/// Reads `name value` lines. `#` starts a comment; `objective <v>` and
/// `status <word>` lines are optional. Variables not mentioned are zero.
pub fn parse_solution(model: &MilpModel, text: &str) -> Result<SolutionAssignment, SolutionError> {
    let mut sol = SolutionAssignment::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let words: Vec<&str> = content.split_whitespace().collect();
        let malformed = |msg: &str| SolutionError::Malformed { line, msg: msg.to_string() };
        if words.len() != 2 {
            return Err(malformed("expected `name value`"));
        }
        let (name, value) = (words[0], words[1]);
        match name {
            "objective" => {
                parse_decimal(value).map_err(|_| malformed("objective is not a number"))?;
                sol.objective = Some(value.to_string());
                continue;
            }
            "status" => {
                sol.status = match value.to_ascii_lowercase().as_str() {
                    "optimal" => SolveStatus::Optimal,
                    "feasible" => SolveStatus::Feasible,
                    "infeasible" => SolveStatus::Infeasible,
                    "unknown" => SolveStatus::Unknown,
                    _ => return Err(malformed("status must be optimal, feasible, infeasible or unknown")),
                };
                continue;
            }
            _ => {}
        }
        let Some(idx) = model.variable_index(name) else {
            return Err(SolutionError::UnknownVariable { line, name: name.to_string() });
        };
        let q = parse_decimal(value).map_err(|_| malformed("value is not a number"))?;
        let v = match model.variables()[idx].kind {
            VarKind::Continuous => Value::Continuous(value.to_string()),
            VarKind::Binary => {
                let f = q.to_f64().unwrap_or(f64::NAN);
                if (f - 1.0).abs() <= SNAP_TOLERANCE {
                    Value::Binary(true)
                } else if f.abs() <= SNAP_TOLERANCE {
                    Value::Binary(false)
                } else {
                    return Err(SolutionError::AmbiguousBinary {
                        line,
                        name: name.to_string(),
                        value: value.to_string(),
                    });
                }
            }
        };
        if sol.values.insert(name.to_string(), v).is_some() {
            return Err(SolutionError::Duplicate { line, name: name.to_string() });
        }
    }
    Ok(sol)
}

/// A bundle recovered from a solution, with enough context to report it.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub bundle: CertificateBundle,
    /// Tree vertices (`y = 1`) dropped because their weight rationalised to 0.
    pub dropped_zero_weight: usize,
    /// Strategies left out because every tree vertex was dropped.
    pub dropped_empty: usize,
    /// `floor(objective / T) + 1` from the solver's objective line, if present,
    /// with the objective rounded to the weight grid first.
    pub claimed_bound: Option<u64>,
}

/// Rebuilds the strategies of a solution: tree vertices are those with
/// `y = 1` and positive rationalised weight, parents come from `x = 1` arcs,
/// and weights are the `z` values rounded to `max_exponent` binary places.
/// A strategy left with no tree vertex is omitted. Every other strategy must then validate and the bundle must cover every vertex;
/// nothing is repaired. Symmetric models return mirrors appended.
pub fn extract_strategies(
    model: &MilpModel,
    sol: &SolutionAssignment,
    max_exponent: u32,
) -> Result<Extraction, ExtractError> {
    if sol.status == SolveStatus::Infeasible {
        return Err(ExtractError::Status(sol.status));
    }
    let g = model.graph();
    let n = g.len();
    let root = model.root();
    let limit = model.z_upper();
    let limit_d = DyadicRational::integer(limit as u64);
    let mut strategies = Vec::with_capacity(model.blocks().len());
    let mut dropped = 0;
    let mut dropped_empty = 0;

    for (bi, blk) in model.blocks().iter().enumerate() {
        let strategy = bi + 1;
        let var = |i: usize| model.variables()[i].name.as_str();
        let structure = |msg: String| ExtractError::Structure { strategy, msg };

        let mut weight = vec![DyadicRational::zero(); n];
        for v in 0..n {
            let name = var(blk.z[v]);
            let q = match sol.continuous(name) {
                None => continue,
                Some(q) => q.map_err(|source| ExtractError::Weight { strategy, name: name.into(), source })?,
            };
            let w = rationalize_nonnegative(&q, max_exponent)
                .map_err(|source| ExtractError::Weight { strategy, name: name.into(), source })?;
            if w > limit_d {
                return Err(ExtractError::WeightTooLarge { strategy, vertex: g.label(v).into(), weight: w, limit });
            }
            weight[v] = w;
        }

        let in_tree: Vec<bool> = (0..n).map(|v| sol.binary(var(blk.y[v]))).collect();
        let mut parent: Vec<Option<usize>> = vec![None; n];
        for (a, &(i, j)) in model.arcs().iter().enumerate() {
            if !sol.binary(var(blk.x[a])) {
                continue;
            }
            if !in_tree[j] {
                return Err(structure(format!("arc {} is chosen but `{}` is not a tree vertex", var(blk.x[a]), g.label(j))));
            }
            if let Some(p) = parent[j] {
                return Err(structure(format!(
                    "`{}` has two parents, `{}` and `{}`",
                    g.label(j),
                    g.label(p),
                    g.label(i)
                )));
            }
            parent[j] = Some(i);
        }

        let mut s = TreeStrategy::new(Arc::clone(g), root);
        for v in 0..n {
            if !in_tree[v] {
                if !weight[v].is_zero() {
                    return Err(structure(format!("`{}` has weight {} but is not a tree vertex", g.label(v), weight[v])));
                }
                continue;
            }
            if v == root {
                return Err(structure(format!("root `{}` is marked as a tree vertex", g.label(v))));
            }
            if weight[v].is_zero() {
                dropped += 1;
                continue;
            }
            let p = parent[v].ok_or_else(|| structure(format!("tree vertex `{}` has no incoming arc", g.label(v))))?;
            s.attach(p, v, weight[v].clone())?;
        }
        if s.size() == 1 {
            dropped_empty += 1;
            continue;
        }
        strategies.push(s);
    }

    if model.params().variant == Variant::Sts {
        strategies = expand_symmetric(&strategies)?;
    }
    let bundle = CertificateBundle::new(Arc::clone(g), root, strategies)?;
    bundle.validate()?;
    covering_bound(&bundle)?;

    let claimed_bound = match &sol.objective {
        Some(text) => {
            let z = parse_decimal(text).map_err(|source| ExtractError::Weight { strategy: 0, name: "objective".into(), source })?;
            let z = rationalize_nonnegative(&z, max_exponent)
                .map_err(|source| ExtractError::Weight { strategy: 0, name: "objective".into(), source })?
                .to_rational();
            let q = (z / BigRational::from_integer((model.params().t as i64).into())).floor().to_integer();
            q.to_u64().and_then(|q| q.checked_add(1))
        }
        None => None,
    };
    Ok(Extraction { bundle, dropped_zero_weight: dropped, dropped_empty, claimed_bound })
}

/// Solver noise can put a weight just below zero; such a value is read as 0
/// when 0 is its nearest grid point, and rejected otherwise.
fn rationalize_nonnegative(q: &BigRational, max_exponent: u32) -> Result<DyadicRational, DyadicError> {
    if q.is_negative() {
        let half_step = BigRational::new(1.into(), num_bigint::BigInt::from(1) << (max_exponent as usize + 1));
        if -q.clone() < half_step {
            return Ok(DyadicRational::zero());
        }
        return Err(DyadicError::Negative(q.to_string()));
    }
    rationalize_rational(q, max_exponent)
}
