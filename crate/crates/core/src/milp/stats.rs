//! Model size as built, next to the closed-form counts
//! `T(2n + m)` variables, `T(n + m)` binaries and `T(2m + 2n + 1) + n` rows.

use std::fmt;

use super::{MilpModel, RowKind, VarKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RowCount {
    pub kind: RowKind,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelStats {
    pub n: usize,
    /// Arc count of the bidirected graph.
    pub m: usize,
    pub t: usize,
    pub blocks: usize,
    pub root_degree: usize,
    pub variable_count: usize,
    pub constraint_count: usize,
    pub binary_count: usize,
    pub continuous_count: usize,
    pub rows: Vec<RowCount>,
    pub formula_variables: usize,
    pub formula_binaries: usize,
    pub formula_constraints: usize,
}

pub fn model_stats(model: &MilpModel) -> ModelStats {
    let g = model.graph();
    let n = g.len();
    let m = model.arcs().len();
    let blocks = model.blocks().len();
    let binary_count = model.variables().iter().filter(|v| v.kind == VarKind::Binary).count();
    let rows = RowKind::ALL
        .iter()
        .map(|&kind| RowCount { kind, count: model.constraints().iter().filter(|c| c.kind == kind).count() })
        .collect();
    ModelStats {
        n,
        m,
        t: model.params().t,
        blocks,
        root_degree: g.degree(model.root()),
        variable_count: model.variables().len(),
        constraint_count: model.constraints().len(),
        binary_count,
        continuous_count: model.variables().len() - binary_count,
        rows,
        formula_variables: blocks * (2 * n + m),
        formula_binaries: blocks * (n + m),
        formula_constraints: blocks * (2 * m + 2 * n + 1) + n,
    }
}

impl ModelStats {
    pub fn rows_of(&self, kind: RowKind) -> usize {
        self.rows.iter().find(|r| r.kind == kind).map_or(0, |r| r.count)
    }

    /// Signed pieces that take the built row count to the formula's count.
    /// Reading the formula as two rows per arc, `2n + 1` per block and `n`
    /// coverage rows, the model differs by: one doubling row per arc instead
    /// of two, no doubling rows on the `2·deg(r)` arcs at the root, one
    /// root-exclusion row per block, and no coverage row for the root.
    pub fn constraint_delta(&self) -> Vec<(&'static str, i64)> {
        let b = self.blocks as i64;
        vec![
            ("formula counts two rows per arc, model builds one doubling row per arc", b * self.m as i64),
            ("doubling rows skipped on arcs at the root", b * 2 * self.root_degree as i64),
            ("root-exclusion rows not in the formula", -b),
            ("no coverage row for the root", 1),
        ]
    }
}

impl fmt::Display for ModelStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n = {}, arcs m = {}, T = {}, blocks = {}, deg(root) = {}", self.n, self.m, self.t, self.blocks, self.root_degree)?;
        writeln!(f, "variables   {:>7}  (formula T(2n+m) = {})", self.variable_count, self.formula_variables)?;
        writeln!(f, "  binary    {:>7}  (formula T(n+m) = {})", self.binary_count, self.formula_binaries)?;
        writeln!(f, "  continuous{:>7}", self.continuous_count)?;
        writeln!(f, "constraints {:>7}  (formula T(2m+2n+1)+n = {})", self.constraint_count, self.formula_constraints)?;
        for r in &self.rows {
            writeln!(f, "  {:<10}{:>7}", r.kind.prefix(), r.count)?;
        }
        let delta = self.formula_constraints as i64 - self.constraint_count as i64;
        writeln!(f, "formula - built = {delta}:")?;
        for (what, d) in self.constraint_delta() {
            writeln!(f, "  {d:>+7}  {what}")?;
        }
        Ok(())
    }
}
