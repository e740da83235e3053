//! Finite abelian groups presented as direct sums of cyclic groups.
//!
//! Every element is identified with its position in the lexicographic
//! enumeration of residue vectors (first factor most significant). All tables
//! elsewhere in the crate store these indices.

use serde::{Deserialize, Serialize};

use crate::error::{GammaError, Result};

const MAX_ORDER: u64 = 1 << 32;
/// Groups up to this order get a precomputed addition table.
const ADD_TABLE_LIMIT: usize = 1 << 10;

/// Cyclic factor orders `d_1, ..., d_r`; the empty list is the trivial group.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InvariantFactors(pub Vec<u64>);

impl InvariantFactors {
    pub fn new(factors: Vec<u64>) -> Self {
        InvariantFactors(factors)
    }

    pub fn factors(&self) -> &[u64] {
        &self.0
    }
}

impl From<&[u64]> for InvariantFactors {
    fn from(f: &[u64]) -> Self {
        InvariantFactors(f.to_vec())
    }
}

/// Residue-vector form of a group element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    pub residues: Vec<u64>,
}

impl GroupElement {
    pub fn new(residues: Vec<u64>) -> Self {
        GroupElement { residues }
    }
}

#[derive(Debug, Clone)]
pub struct FiniteAbelianGroup {
    invariants: InvariantFactors,
    strides: Vec<usize>,
    order: usize,
    add_table: Option<Vec<u32>>,
    neg_table: Vec<u32>,
}

impl PartialEq for FiniteAbelianGroup {
    fn eq(&self, other: &Self) -> bool {
        self.invariants == other.invariants
    }
}

impl Eq for FiniteAbelianGroup {}

impl FiniteAbelianGroup {
    /// Builds the group `Z_{d_1} x ... x Z_{d_r}`.
    pub fn new(invariants: InvariantFactors) -> Result<Self> {
        let mut order: u64 = 1;
        for &d in invariants.factors() {
            if d < 2 {
                return Err(GammaError::InvalidFactor(d));
            }
            order = order.checked_mul(d).ok_or(GammaError::OrderOverflow)?;
            if order > MAX_ORDER {
                return Err(GammaError::OrderOverflow);
            }
        }
        let order = order as usize;
        let mut strides = vec![1usize; invariants.0.len()];
        for i in (0..invariants.0.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * invariants.0[i + 1] as usize;
        }
        let mut group = FiniteAbelianGroup {
            invariants,
            strides,
            order,
            add_table: None,
            neg_table: Vec::new(),
        };
        group.neg_table = (0..order)
            .map(|a| group.slow_neg(a) as u32)
            .collect();
        if order <= ADD_TABLE_LIMIT {
            let mut table = vec![0u32; order * order];
            for a in 0..order {
                for b in 0..order {
                    table[a * order + b] = group.slow_add(a, b) as u32;
                }
            }
            group.add_table = Some(table);
        }
        Ok(group)
    }

    pub fn from_factors(factors: &[u64]) -> Result<Self> {
        Self::new(InvariantFactors(factors.to_vec()))
    }

    pub fn trivial() -> Self {
        Self::new(InvariantFactors(Vec::new())).expect("trivial group is valid")
    }

    pub fn invariants(&self) -> &InvariantFactors {
        &self.invariants
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.invariants.0.len()
    }

    /// Index of the identity element; always 0.
    pub fn zero(&self) -> usize {
        0
    }

    pub fn zero_element(&self) -> GroupElement {
        GroupElement::new(vec![0; self.rank()])
    }

    pub fn element_at(&self, index: usize) -> Result<GroupElement> {
        self.check_index(index)?;
        Ok(GroupElement::new(self.residues(index)))
    }

    pub fn index_of(&self, element: &GroupElement) -> Result<usize> {
        self.validate(element)?;
        Ok(element
            .residues
            .iter()
            .zip(&self.strides)
            .map(|(&r, &s)| r as usize * s)
            .sum())
    }

    /// Residue vector of an index. Panics on out-of-range indices in debug builds.
    pub fn residues(&self, index: usize) -> Vec<u64> {
        debug_assert!(index < self.order);
        self.invariants
            .0
            .iter()
            .zip(&self.strides)
            .map(|(&d, &s)| ((index / s) as u64) % d)
            .collect()
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.validate(a)?;
        self.validate(b)?;
        Ok(GroupElement::new(
            a.residues
                .iter()
                .zip(&b.residues)
                .zip(&self.invariants.0)
                .map(|((&x, &y), &d)| (x + y) % d)
                .collect(),
        ))
    }

    pub fn negate(&self, a: &GroupElement) -> Result<GroupElement> {
        self.validate(a)?;
        Ok(GroupElement::new(
            a.residues
                .iter()
                .zip(&self.invariants.0)
                .map(|(&x, &d)| (d - x) % d)
                .collect(),
        ))
    }

    /// Index-level addition used by all hot loops.
    #[inline]
    pub fn add_idx(&self, a: usize, b: usize) -> usize {
        match &self.add_table {
            Some(t) => t[a * self.order + b] as usize,
            None => self.slow_add(a, b),
        }
    }

    #[inline]
    pub fn neg_idx(&self, a: usize) -> usize {
        self.neg_table[a] as usize
    }

    #[inline]
    pub fn sub_idx(&self, a: usize, b: usize) -> usize {
        self.add_idx(a, self.neg_idx(b))
    }

    /// `k * a` for a non-negative multiplier.
    pub fn scale_idx(&self, a: usize, k: u64) -> usize {
        let mut acc = 0;
        let mut base = a;
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add_idx(acc, base);
            }
            base = self.add_idx(base, base);
            k >>= 1;
        }
        acc
    }

    pub fn check_index(&self, index: usize) -> Result<()> {
        if index < self.order {
            Ok(())
        } else {
            Err(GammaError::IndexOutOfRange {
                index,
                order: self.order,
            })
        }
    }

    /// Exhaustive homomorphism test of an index table `G -> H`.
    pub fn is_homomorphism_to(&self, table: &[usize], target: &FiniteAbelianGroup) -> Result<bool> {
        if table.len() != self.order {
            return Err(GammaError::TableSize {
                expected: self.order,
                got: table.len(),
            });
        }
        for (pos, &v) in table.iter().enumerate() {
            if v >= target.order {
                return Err(GammaError::EntryOutOfRange {
                    position: pos,
                    value: v,
                    bound: target.order,
                });
            }
        }
        Ok((0..self.order).all(|a| {
            (0..self.order)
                .all(|b| table[self.add_idx(a, b)] == target.add_idx(table[a], table[b]))
        }))
    }

    fn validate(&self, element: &GroupElement) -> Result<()> {
        if element.residues.len() != self.rank() {
            return Err(GammaError::LengthMismatch {
                expected: self.rank(),
                got: element.residues.len(),
            });
        }
        for (&r, &d) in element.residues.iter().zip(&self.invariants.0) {
            if r >= d {
                return Err(GammaError::ResidueOutOfRange {
                    residue: r,
                    factor: d,
                });
            }
        }
        Ok(())
    }

    fn slow_add(&self, a: usize, b: usize) -> usize {
        self.invariants
            .0
            .iter()
            .zip(&self.strides)
            .map(|(&d, &s)| {
                let d = d as usize;
                ((a / s % d + b / s % d) % d) * s
            })
            .sum()
    }

    fn slow_neg(&self, a: usize) -> usize {
        self.invariants
            .0
            .iter()
            .zip(&self.strides)
            .map(|(&d, &s)| {
                let d = d as usize;
                ((d - a / s % d) % d) * s
            })
            .sum()
    }
}

/// Free-standing form of [`FiniteAbelianGroup::is_homomorphism_to`].
pub fn is_group_homomorphism(
    table: &[usize],
    source: &FiniteAbelianGroup,
    target: &FiniteAbelianGroup,
) -> Result<bool> {
    source.is_homomorphism_to(table, target)
}
