//! Attention-mode ablation under leave-one-out evaluation.
//!
//! Unlike the transductive grid of [`super::models`], every query row here is
//! scored against the other `2^m - 1` labeled rows only. Three single-layer
//! attention modes are compared on the same shared-embedding footing:
//!
//! * `RowIclCollapsed` — rows become single tokens by mean-pooling the shared
//!   cell embedding together with the label slot (labeled context rows pool
//!   `m + 1` cells; the query's label slot is masked to zero). Attention is
//!   hard nearest-neighbor over that scalar with equidistant rows sharing
//!   weight equally.
//! * `CellCrossAttnNoId` — cell-level cross-attention with no column
//!   identifier: each query cell attends uniformly to every context cell with
//!   a matching value, in any column.
//! * `ColumnStream` — per-column heads: head `j` attends uniformly to the
//!   context cells of column `j` with a matching value.
//!
//! The returned accuracy is the expected accuracy under a fair tie-break:
//! rows whose two class probabilities tie exactly contribute 1/2. All three
//! modes are exact rationals; on Task A at `m = 3` they evaluate to 5/8, 1/4,
//! and 1 respectively.

use super::{Frac, Row, ToyError, ToyTask};

/// Attention mode of one ablation cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AblationMode {
    RowIclCollapsed,
    CellCrossAttnNoId,
    ColumnStream,
}

impl AblationMode {
    pub const ALL: [AblationMode; 3] = [
        AblationMode::RowIclCollapsed,
        AblationMode::CellCrossAttnNoId,
        AblationMode::ColumnStream,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            AblationMode::RowIclCollapsed => "row_icl_collapsed",
            AblationMode::CellCrossAttnNoId => "cell_cross_attn_no_id",
            AblationMode::ColumnStream => "column_stream",
        }
    }
}

/// Leave-one-out expected accuracy of the selected attention mode.
pub fn ablation_modes(task: &ToyTask, mode: AblationMode) -> Result<Frac, ToyError> {
    if task.m > 20 {
        return Err(ToyError::MTooLarge(task.m));
    }
    let mut credit = Frac::new(0, 1);
    for q in task.rows() {
        let (p0, p1) = match mode {
            AblationMode::RowIclCollapsed => row_icl_prob(task, q),
            AblationMode::CellCrossAttnNoId => cell_cross_prob(task, q),
            AblationMode::ColumnStream => column_stream_prob(task, q),
        };
        let y = task.label(q);
        if p0 == p1 {
            credit += Frac::new(1, 2);
        } else if (y == 0 && p0 > p1) || (y == 1 && p1 > p0) {
            credit += Frac::new(1, 1);
        }
    }
    Ok(credit / Frac::new(1i64 << task.m, 1))
}

fn context<'a>(task: &'a ToyTask, q: Row) -> impl Iterator<Item = Row> + 'a {
    task.rows().filter(move |&r| r != q)
}

fn average(items: impl Iterator<Item = (i64, i64)>) -> (Frac, Frac) {
    let mut zeros = 0i64;
    let mut ones = 0i64;
    for (z, o) in items {
        zeros += z;
        ones += o;
    }
    let total = zeros + ones;
    debug_assert!(total > 0);
    (Frac::new(zeros, total), Frac::new(ones, total))
}

/// Collapsed row token: pooled cell values plus the label slot. Context rows
/// pool `weight + y` over `m + 1` slots; the query pools `weight` with the
/// label slot masked to zero. Pool comparisons reduce to the integer
/// numerators because the denominator is shared.
fn row_icl_prob(task: &ToyTask, q: Row) -> (Frac, Frac) {
    let pooled = |r: Row| i64::from(task.weight(r)) + i64::from(task.label(r));
    let q_pool = i64::from(task.weight(q));
    let min_dist = context(task, q)
        .map(|r| (pooled(r) - q_pool).abs())
        .min()
        .expect("context never empty");
    average(
        context(task, q)
            .filter(|&r| (pooled(r) - q_pool).abs() == min_dist)
            .map(|r| {
                let y = i64::from(task.label(r));
                (1 - y, y)
            }),
    )
}

/// Every context cell with a matching value votes its row label, regardless
/// of column; the query's `m` cell distributions are then averaged.
fn cell_cross_prob(task: &ToyTask, q: Row) -> (Frac, Frac) {
    let cells: Vec<(Frac, Frac)> = (0..task.m)
        .map(|j| {
            let v = task.bit(q, j);
            average(context(task, q).map(|r| {
                let matching = (0..task.m).filter(|&jj| task.bit(r, jj) == v).count() as i64;
                let y = i64::from(task.label(r));
                ((1 - y) * matching, y * matching)
            }))
        })
        .collect();
    mean_pairs(&cells)
}

/// Head `j` sees only column `j`: context rows with a matching value in that
/// column vote their label; heads are averaged.
fn column_stream_prob(task: &ToyTask, q: Row) -> (Frac, Frac) {
    let heads: Vec<(Frac, Frac)> = (0..task.m)
        .map(|j| {
            let v = task.bit(q, j);
            average(context(task, q).filter(|&r| task.bit(r, j) == v).map(|r| {
                let y = i64::from(task.label(r));
                (1 - y, y)
            }))
        })
        .collect();
    mean_pairs(&heads)
}

fn mean_pairs(cells: &[(Frac, Frac)]) -> (Frac, Frac) {
    let k = Frac::new(cells.len() as i64, 1);
    (
        cells.iter().map(|c| c.0).sum::<Frac>() / k,
        cells.iter().map(|c| c.1).sum::<Frac>() / k,
    )
}
