//! Boolean label rules over the full `{0,1}^m` enumeration.

use super::ToyError;

/// The three label rules: the first column, XOR of the first two columns,
/// and the column majority.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskKind {
    A,
    B,
    C,
}

/// A row of `{0,1}^m`, packed with column 1 in the most significant of the
/// `m` low bits, so row index `0b100` is the row written `100`.
pub type Row = u32;

/// One task instance: a label rule evaluated over all `2^m` rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ToyTask {
    pub kind: TaskKind,
    pub m: usize,
}

impl ToyTask {
    pub fn new(kind: TaskKind, m: usize) -> Result<Self, ToyError> {
        if m > 20 {
            return Err(ToyError::MTooLarge(m));
        }
        let needed = match kind {
            TaskKind::A => 1,
            TaskKind::B => 2,
            TaskKind::C => 1,
        };
        if m < needed {
            return Err(ToyError::MTooSmall { task: kind, needed, m });
        }
        Ok(Self { kind, m })
    }

    pub fn row_count(&self) -> usize {
        1usize << self.m
    }

    /// Value of column `j` (0-based; column 1 of the notation is `j = 0`).
    pub fn bit(&self, row: Row, j: usize) -> u8 {
        ((row >> (self.m - 1 - j)) & 1) as u8
    }

    /// Hamming weight of the row.
    pub fn weight(&self, row: Row) -> u32 {
        row.count_ones()
    }

    /// The deterministic binary label of a row. Majority ties on even `m`
    /// break toward 1.
    pub fn label(&self, row: Row) -> u8 {
        match self.kind {
            TaskKind::A => self.bit(row, 0),
            TaskKind::B => self.bit(row, 0) ^ self.bit(row, 1),
            TaskKind::C => {
                let w = self.weight(row) as usize;
                u8::from(2 * w >= self.m + self.m % 2)
            }
        }
    }

    pub fn rows(&self) -> impl Iterator<Item = Row> {
        0..(self.row_count() as Row)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_order_matches_row_notation() {
        let t = ToyTask::new(TaskKind::A, 3).unwrap();
        // row 100 has x1 = 1, x2 = 0, x3 = 0
        assert_eq!(t.bit(0b100, 0), 1);
        assert_eq!(t.bit(0b100, 1), 0);
        assert_eq!(t.bit(0b100, 2), 0);
        assert_eq!(t.label(0b100), 1);
        assert_eq!(t.label(0b011), 0);
    }

    #[test]
    fn xor_rule() {
        let t = ToyTask::new(TaskKind::B, 3).unwrap();
        assert_eq!(t.label(0b000), 0);
        assert_eq!(t.label(0b010), 1);
        assert_eq!(t.label(0b100), 1);
        assert_eq!(t.label(0b110), 0);
        assert_eq!(t.label(0b111), 0);
    }

    #[test]
    fn majority_rule_with_even_tie_to_one() {
        let odd = ToyTask::new(TaskKind::C, 3).unwrap();
        assert_eq!(odd.label(0b001), 0);
        assert_eq!(odd.label(0b011), 1);
        let even = ToyTask::new(TaskKind::C, 4).unwrap();
        assert_eq!(even.label(0b1100), 1); // 2-of-4 tie -> 1
        assert_eq!(even.label(0b1000), 0);
    }

    #[test]
    fn shape_validation() {
        assert!(ToyTask::new(TaskKind::B, 1).is_err());
        assert!(ToyTask::new(TaskKind::A, 21).is_err());
    }
}
