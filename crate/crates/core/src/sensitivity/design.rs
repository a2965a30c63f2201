//! Saltelli sampling design for variance-based sensitivity analysis.

use serde::{Deserialize, Serialize};

use super::sobol::SobolSequence;
use crate::error::{Error, Result};

/// Axis-aligned box the unit-cube design is mapped onto.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorBox {
    pub names: Vec<String>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl FactorBox {
    pub fn new(names: Vec<String>, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if names.len() != lower.len() || names.len() != upper.len() || names.is_empty() {
            return Err(Error::InvalidConfig("factor box needs one name and bound pair per factor".into()));
        }
        for ((name, lo), hi) in names.iter().zip(&lower).zip(&upper) {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::InvalidConfig(format!("factor {name}: bounds [{lo}, {hi}] invalid")));
            }
        }
        Ok(Self { names, lower, upper })
    }

    /// The unit cube with factors named `x1`, `x2`, ...
    pub fn unit(k: usize) -> Self {
        Self {
            names: (1..=k).map(|i| format!("x{i}")).collect(),
            lower: vec![0.0; k],
            upper: vec![1.0; k],
        }
    }

    pub fn dimension(&self) -> usize {
        self.names.len()
    }

    pub fn scale(&self, unit: &[f64]) -> Vec<f64> {
        unit.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(u, (lo, hi))| lo + u * (hi - lo))
            .collect()
    }
}

/// Role of a design row within its block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    A,
    /// `A` with column `i` taken from `B`.
    AB(usize),
    /// `B` with column `i` taken from `A` (second-order designs only).
    BA(usize),
    B,
}

/// Rows are grouped in blocks of `k + 2` (or `2k + 2`) per base sample:
/// `A_j`, `A_B^(1)_j .. A_B^(k)_j`, optionally `B_A^(1)_j .. B_A^(k)_j`, then `B_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SobolDesign {
    pub factors: FactorBox,
    pub base_samples: usize,
    pub second_order: bool,
    /// Points in the unit cube, one per evaluation.
    pub unit_rows: Vec<Vec<f64>>,
}

impl SobolDesign {
    pub fn dimension(&self) -> usize {
        self.factors.dimension()
    }

    pub fn block_size(&self) -> usize {
        let k = self.dimension();
        if self.second_order {
            2 * k + 2
        } else {
            k + 2
        }
    }

    pub fn evaluations(&self) -> usize {
        self.unit_rows.len()
    }

    pub fn row_kind(&self, row: usize) -> RowKind {
        let k = self.dimension();
        let r = row % self.block_size();
        match r {
            0 => RowKind::A,
            r if r <= k => RowKind::AB(r - 1),
            r if self.second_order && r <= 2 * k => RowKind::BA(r - k - 1),
            _ => RowKind::B,
        }
    }

    /// Rows mapped onto the factor box.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.unit_rows.iter().map(|r| self.factors.scale(r)).collect()
    }

    pub fn row(&self, index: usize) -> Vec<f64> {
        self.factors.scale(&self.unit_rows[index])
    }
}

/// Builds the design from the first `n` points of the `2k`-dimensional
/// Sobol sequence: `A` takes the first `k` coordinates, `B` the last `k`.
pub fn saltelli_design(factors: FactorBox, n: usize, second_order: bool) -> Result<SobolDesign> {
    if n < 2 {
        return Err(Error::InvalidConfig(format!("base sample count must be >= 2, got {n}")));
    }
    let k = factors.dimension();
    let mut seq = SobolSequence::new(2 * k)?;
    let block = if second_order { 2 * k + 2 } else { k + 2 };
    let mut unit_rows = Vec::with_capacity(n * block);
    let mut point = vec![0.0; 2 * k];
    for _ in 0..n {
        seq.next_into(&mut point);
        let (a, b) = point.split_at(k);
        unit_rows.push(a.to_vec());
        for i in 0..k {
            let mut row = a.to_vec();
            row[i] = b[i];
            unit_rows.push(row);
        }
        if second_order {
            for i in 0..k {
                let mut row = b.to_vec();
                row[i] = a[i];
                unit_rows.push(row);
            }
        }
        unit_rows.push(b.to_vec());
    }
    Ok(SobolDesign {
        factors,
        base_samples: n,
        second_order,
        unit_rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_layout() {
        let k = 3;
        let design = saltelli_design(FactorBox::unit(k), 8, true).unwrap();
        assert_eq!(design.evaluations(), 8 * (2 * k + 2));
        let block = &design.unit_rows[..design.block_size()];
        let (a, b) = (&block[0], &block[2 * k + 1]);
        for i in 0..k {
            let ab = &block[1 + i];
            let ba = &block[1 + k + i];
            for c in 0..k {
                assert_eq!(ab[c], if c == i { b[c] } else { a[c] });
                assert_eq!(ba[c], if c == i { a[c] } else { b[c] });
            }
        }
        assert_eq!(design.row_kind(0), RowKind::A);
        assert_eq!(design.row_kind(2), RowKind::AB(1));
        assert_eq!(design.row_kind(k + 1), RowKind::BA(0));
        assert_eq!(design.row_kind(2 * k + 1), RowKind::B);
        assert_eq!(design.row_kind(2 * k + 2), RowKind::A);
    }

    #[test]
    fn first_order_design_size() {
        let design = saltelli_design(FactorBox::unit(11), 256, false).unwrap();
        assert_eq!(design.evaluations(), 256 * 13);
        assert_eq!(design.row_kind(12), RowKind::B);
    }

    #[test]
    fn single_factor_ab_equals_b() {
        let design = saltelli_design(FactorBox::unit(1), 16, false).unwrap();
        for block in design.unit_rows.chunks(3) {
            assert_eq!(block[1], block[2]);
        }
    }

    #[test]
    fn scales_onto_the_box() {
        let factors = FactorBox::new(vec!["u".into(), "w".into()], vec![-1.0, 10.0], vec![1.0, 20.0]).unwrap();
        assert_eq!(factors.scale(&[0.25, 0.5]), vec![-0.5, 15.0]);
        let design = saltelli_design(factors, 32, false).unwrap();
        for row in design.rows() {
            assert!((-1.0..=1.0).contains(&row[0]) && (10.0..=20.0).contains(&row[1]));
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(saltelli_design(FactorBox::unit(2), 1, false).is_err());
        assert!(FactorBox::new(vec!["u".into()], vec![1.0], vec![0.0]).is_err());
        assert!(FactorBox::new(vec![], vec![], vec![]).is_err());
        assert!(FactorBox::new(vec!["u".into()], vec![0.0, 1.0], vec![1.0]).is_err());
    }
}
