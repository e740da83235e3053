//! Ideals, the ideal lattice, and primeness.

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

use crate::error::{GammaError, Result};
use crate::ring::GammaRing;

/// Rings up to this order get the ideal-lattice cross-check in [`is_prime`].
pub const IDEAL_CROSS_CHECK_LIMIT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sidedness {
    Left,
    Right,
    TwoSided,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdealSubset {
    /// Sorted member indices.
    pub members: Vec<usize>,
    pub side: Sidedness,
}

impl IdealSubset {
    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn is_zero(&self) -> bool {
        self.members == [0]
    }
}

/// Least subset containing `seeds` that is an additive subgroup closed under
/// the Gamma-multiplications of the given side(s).
pub fn ideal_generated(r: &GammaRing, seeds: &[usize], side: Sidedness) -> Result<IdealSubset> {
    for &s in seeds {
        r.m_group().check_index(s)?;
    }
    let n = r.m_order();
    let mut member = vec![false; n];
    let mut list = Vec::new();
    let mut queue = VecDeque::new();
    let push = |x: usize, member: &mut Vec<bool>, queue: &mut VecDeque<usize>| {
        if !member[x] {
            member[x] = true;
            queue.push_back(x);
        }
    };
    push(0, &mut member, &mut queue);
    for &s in seeds {
        push(s, &mut member, &mut queue);
    }
    while let Some(a) = queue.pop_front() {
        list.push(a);
        // finite group: closure under + gives negatives too
        for i in 0..list.len() {
            let b = list[i];
            push(r.add(a, b), &mut member, &mut queue);
        }
        for g in 0..r.gamma_order() {
            for m in 0..n {
                if side != Sidedness::Left {
                    push(r.mul(a, g, m), &mut member, &mut queue);
                }
                if side != Sidedness::Right {
                    push(r.mul(m, g, a), &mut member, &mut queue);
                }
            }
        }
    }
    let members = (0..n).filter(|&x| member[x]).collect();
    Ok(IdealSubset { members, side })
}

/// Whether `set` is an additive subgroup closed on the declared side(s).
pub fn is_ideal(r: &GammaRing, set: &IdealSubset) -> bool {
    let n = r.m_order();
    let mut member = vec![false; n];
    for &x in &set.members {
        member[x] = true;
    }
    if !member[0] {
        return false;
    }
    for &a in &set.members {
        if !member[r.neg(a)] {
            return false;
        }
        for &b in &set.members {
            if !member[r.add(a, b)] {
                return false;
            }
        }
        for g in 0..r.gamma_order() {
            for m in 0..n {
                if set.side != Sidedness::Left && !member[r.mul(a, g, m)] {
                    return false;
                }
                if set.side != Sidedness::Right && !member[r.mul(m, g, a)] {
                    return false;
                }
            }
        }
    }
    true
}

/// All two-sided ideals, as sorted member lists, in lexicographic order.
///
/// Every ideal is a join of principal ideals, so the lattice is reached by
/// repeatedly joining known ideals with single generators.
pub fn enumerate_ideals(r: &GammaRing) -> Result<Vec<Vec<usize>>> {
    let zero = ideal_generated(r, &[], Sidedness::TwoSided)?.members;
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    seen.insert(zero.clone());
    let mut frontier = vec![zero];
    while let Some(ideal) = frontier.pop() {
        let mut inside = vec![false; r.m_order()];
        for &x in &ideal {
            inside[x] = true;
        }
        for a in 0..r.m_order() {
            if inside[a] {
                continue;
            }
            let mut seeds = ideal.clone();
            seeds.push(a);
            let next = ideal_generated(r, &seeds, Sidedness::TwoSided)?.members;
            if seen.insert(next.clone()) {
                frontier.push(next);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeVerdict {
    pub prime: bool,
    /// Nonzero `(a, b)` with `a Gamma M Gamma b = 0`, when not prime.
    pub witness: Option<(usize, usize)>,
    /// Verdict of the ideal-pair definition, when the lattice was enumerated.
    pub ideal_verdict: Option<bool>,
}

/// The set `a Gamma M` as a membership vector.
fn right_products(r: &GammaRing, a: usize) -> Vec<usize> {
    let n = r.m_order();
    let mut seen = vec![false; n];
    for g in 0..r.gamma_order() {
        for m in 0..n {
            seen[r.mul(a, g, m)] = true;
        }
    }
    (0..n).filter(|&x| seen[x]).collect()
}

/// Elementwise primeness test (`a Gamma M Gamma b = 0` implies `a = 0` or
/// `b = 0`), cross-checked against the ideal-pair definition on small rings.
pub fn is_prime(r: &GammaRing) -> Result<PrimeVerdict> {
    r.require_barnes()?;
    let n = r.m_order();
    let mut witness = None;
    'outer: for a in 1..n {
        let left = right_products(r, a);
        for b in 1..n {
            let kills = left
                .iter()
                .all(|&t| (0..r.gamma_order()).all(|d| r.mul(t, d, b) == 0));
            if kills {
                witness = Some((a, b));
                break 'outer;
            }
        }
    }
    let prime = witness.is_none();
    let ideal_verdict = if n <= IDEAL_CROSS_CHECK_LIMIT {
        let v = prime_by_ideals(r)?;
        if v != prime {
            return Err(GammaError::InternalInconsistency(format!(
                "elementwise primeness {prime} disagrees with ideal-pair primeness {v}"
            )));
        }
        Some(v)
    } else {
        None
    };
    Ok(PrimeVerdict {
        prime,
        witness,
        ideal_verdict,
    })
}

/// Ideal-pair definition: for nonzero ideals `A, B`, `A Gamma B != 0`.
pub fn prime_by_ideals(r: &GammaRing) -> Result<bool> {
    let ideals = enumerate_ideals(r)?;
    let nonzero: Vec<&Vec<usize>> = ideals.iter().filter(|i| i.len() > 1).collect();
    for a in &nonzero {
        for b in &nonzero {
            let vanishes = a.iter().all(|&x| {
                (0..r.gamma_order()).all(|g| b.iter().all(|&y| r.mul(x, g, y) == 0))
            });
            if vanishes {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteAbelianGroup;

    fn trivial(m: &[u64]) -> GammaRing {
        GammaRing::trivial(
            FiniteAbelianGroup::from_factors(m).unwrap(),
            FiniteAbelianGroup::from_factors(&[2]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn zero_seed_gives_zero_ideal() {
        let r = GammaRing::matrix(2, 2, 2).unwrap();
        let i = ideal_generated(&r, &[0], Sidedness::TwoSided).unwrap();
        assert_eq!(i.members, vec![0]);
        assert!(i.is_zero());
    }

    #[test]
    fn trivial_ring_ideal_is_cyclic_subgroup() {
        let r = trivial(&[4]);
        assert_eq!(
            ideal_generated(&r, &[2], Sidedness::TwoSided).unwrap().members,
            vec![0, 2]
        );
        assert_eq!(
            ideal_generated(&r, &[1], Sidedness::Right).unwrap().members,
            vec![0, 1, 2, 3]
        );
    }

    #[test]
    fn matrix_ring_is_simple() {
        let r = GammaRing::matrix(2, 2, 2).unwrap();
        let e11 = r.m_from_entries(&[1, 0, 0, 0]).unwrap();
        let i = ideal_generated(&r, &[e11], Sidedness::TwoSided).unwrap();
        assert_eq!(i.members.len(), 16);
        assert_eq!(enumerate_ideals(&r).unwrap().len(), 2);
    }

    #[test]
    fn one_sided_ideals_are_closed_fixed_points() {
        let r = GammaRing::matrix(2, 2, 2).unwrap();
        let e11 = r.m_from_entries(&[1, 0, 0, 0]).unwrap();
        for side in [Sidedness::Left, Sidedness::Right, Sidedness::TwoSided] {
            let i = ideal_generated(&r, &[e11], side).unwrap();
            assert!(is_ideal(&r, &i));
            let again = ideal_generated(&r, &i.members, side).unwrap();
            assert_eq!(again, i);
        }
        // right ideal generated by E11 is the first row: E11 Gamma M
        let right = ideal_generated(&r, &[e11], Sidedness::Right).unwrap();
        assert_eq!(right.members.len(), 4);
    }

    #[test]
    fn primeness_examples() {
        let r = GammaRing::matrix(2, 2, 2).unwrap();
        let v = is_prime(&r).unwrap();
        assert!(v.prime);
        assert_eq!(v.ideal_verdict, Some(true));

        let t = trivial(&[4]);
        let v = is_prime(&t).unwrap();
        assert!(!v.prime);
        let (a, b) = v.witness.unwrap();
        assert!(a != 0 && b != 0);

        let a = GammaRing::matrix(2, 1, 1).unwrap();
        let p = GammaRing::direct_product(&a, &a).unwrap();
        let v = is_prime(&p).unwrap();
        assert!(!v.prime);
        assert_eq!(v.ideal_verdict, Some(false));
        // (x, 0) and (0, y)
        let (x, y) = (2, 1);
        assert!((0..p.gamma_order())
            .all(|g| (0..p.m_order()).all(|m| (0..p.gamma_order())
                .all(|d| p.mul(p.mul(x, g, m), d, y) == 0))));
    }

    #[test]
    fn primeness_requires_barnes() {
        let r = GammaRing::matrix(2, 1, 1).unwrap();
        let bad = r.with_product_entry(1, 1, 1, 0).unwrap().with_product_entry(1, 0, 1, 1).unwrap();
        assert!(matches!(is_prime(&bad), Err(GammaError::Precondition(_))));
    }
}
