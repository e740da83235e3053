//! n-multiplicative isomorphisms and derivations: verification, additivity,
//! inverses, and defect maps.
//!
//! Verifiers here enumerate literal product tuples; they are the reference the
//! search in [`crate::search`] is checked against.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::axioms::Witness;
use crate::error::{GammaError, Result};
use crate::ring::GammaRing;

/// Default evaluation budget for exhaustive scans.
pub const DEFAULT_BUDGET: u128 = 100_000_000;
/// Upper bound on the number of sampled tuples in partial verification.
pub const MAX_SAMPLES: u128 = 1 << 20;

/// Element map `phi: M -> M'` and Gamma map `psi: Gamma -> Gamma'`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct MapPair {
    pub phi: Vec<usize>,
    pub psi: Vec<usize>,
}

fn check_bijection(table: &[usize], domain: usize, codomain: usize, what: &str) -> Result<()> {
    if table.len() != domain {
        return Err(GammaError::TableSize {
            expected: domain,
            got: table.len(),
        });
    }
    if domain != codomain {
        return Err(GammaError::NotBijective(format!(
            "{what}: domain order {domain} != codomain order {codomain}"
        )));
    }
    let mut hit = vec![false; codomain];
    for (position, &v) in table.iter().enumerate() {
        if v >= codomain {
            return Err(GammaError::EntryOutOfRange {
                position,
                value: v,
                bound: codomain,
            });
        }
        if std::mem::replace(&mut hit[v], true) {
            return Err(GammaError::NotBijective(format!(
                "{what}: value {v} hit twice"
            )));
        }
    }
    Ok(())
}

impl MapPair {
    pub fn new(source: &GammaRing, target: &GammaRing, phi: Vec<usize>, psi: Vec<usize>) -> Result<Self> {
        check_bijection(&phi, source.m_order(), target.m_order(), "phi")?;
        check_bijection(&psi, source.gamma_order(), target.gamma_order(), "psi")?;
        Ok(MapPair { phi, psi })
    }

    pub fn identity(r: &GammaRing) -> Self {
        MapPair {
            phi: (0..r.m_order()).collect(),
            psi: (0..r.gamma_order()).collect(),
        }
    }

    /// Table inverse; no verification.
    pub fn inverted(&self) -> Self {
        let invert = |t: &[usize]| {
            let mut inv = vec![0; t.len()];
            for (i, &v) in t.iter().enumerate() {
                inv[v] = i;
            }
            inv
        };
        MapPair {
            phi: invert(&self.phi),
            psi: invert(&self.psi),
        }
    }

    /// `other` after `self`.
    pub fn then(&self, other: &MapPair) -> MapPair {
        MapPair {
            phi: self.phi.iter().map(|&x| other.phi[x]).collect(),
            psi: self.psi.iter().map(|&g| other.psi[g]).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct DerivationTable {
    pub d: Vec<usize>,
}

impl DerivationTable {
    pub fn new(ring: &GammaRing, d: Vec<usize>) -> Result<Self> {
        if d.len() != ring.m_order() {
            return Err(GammaError::TableSize {
                expected: ring.m_order(),
                got: d.len(),
            });
        }
        for (position, &v) in d.iter().enumerate() {
            ring.m_group().check_index(v).map_err(|_| GammaError::EntryOutOfRange {
                position,
                value: v,
                bound: ring.m_order(),
            })?;
        }
        Ok(DerivationTable { d })
    }

    pub fn zero(ring: &GammaRing) -> Self {
        DerivationTable {
            d: vec![0; ring.m_order()],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Completeness {
    Exact,
    Partial { samples: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verification {
    pub passed: bool,
    pub completeness: Completeness,
    pub witness: Option<Witness>,
    pub evaluations: u128,
}

impl Verification {
    pub fn is_exact_pass(&self) -> bool {
        self.passed && self.completeness == Completeness::Exact
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    pub budget: u128,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            budget: DEFAULT_BUDGET,
            seed: 0,
        }
    }
}

fn tuple_count(m: usize, g: usize, n: usize) -> u128 {
    let mut c: u128 = 1;
    for _ in 0..n {
        c = c.saturating_mul(m as u128);
    }
    for _ in 1..n {
        c = c.saturating_mul(g as u128);
    }
    c
}

fn check_arity(n: usize) -> Result<()> {
    if n < 2 {
        Err(GammaError::ArityTooSmall { min: 2, got: n })
    } else {
        Ok(())
    }
}

/// Tuple layout for witnesses: `(x1, g1, x2, ..., g_{n-1}, xn)`.
const PRODUCT_DETAIL: &str = "tuple (x1, g1, x2, ..., xn) breaks the product identity";

/// Checks `phi(x1 g1 x2 ... xn) = phi(x1) psi(g1) phi(x2) ... phi(xn)`
/// exhaustively when the tuple count fits the budget, else on a seeded sample.
pub fn verify_n_multiplicative(
    source: &GammaRing,
    target: &GammaRing,
    pair: &MapPair,
    n: usize,
    cfg: VerifyConfig,
) -> Result<Verification> {
    check_arity(n)?;
    MapPair::new(source, target, pair.phi.clone(), pair.psi.clone())?;
    let (mo, go) = (source.m_order(), source.gamma_order());
    let count = tuple_count(mo, go, n);
    if count <= cfg.budget {
        let witness = (0..mo).into_par_iter().find_map_first(|x1| {
            let mut tuple = vec![x1];
            iso_dfs(source, target, pair, n, x1, pair.phi[x1], &mut tuple)
                .then(|| Witness::new(tuple, PRODUCT_DETAIL))
        });
        return Ok(Verification {
            passed: witness.is_none(),
            completeness: Completeness::Exact,
            witness,
            evaluations: count,
        });
    }
    let samples = cfg.budget.min(MAX_SAMPLES) as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut witness = None;
    for _ in 0..samples {
        let mut tuple = vec![rng.gen_range(0..mo)];
        let (mut s, mut t) = (tuple[0], pair.phi[tuple[0]]);
        for _ in 1..n {
            let (g, x) = (rng.gen_range(0..go), rng.gen_range(0..mo));
            tuple.extend([g, x]);
            s = source.mul(s, g, x);
            t = target.mul(t, pair.psi[g], pair.phi[x]);
        }
        if pair.phi[s] != t {
            witness = Some(Witness::new(tuple, PRODUCT_DETAIL));
            break;
        }
    }
    Ok(Verification {
        passed: witness.is_none(),
        completeness: Completeness::Partial { samples },
        witness,
        evaluations: samples as u128,
    })
}

/// Returns true (leaving the failing tuple in `tuple`) on the first violation.
fn iso_dfs(
    source: &GammaRing,
    target: &GammaRing,
    pair: &MapPair,
    remaining_letters: usize,
    s: usize,
    t: usize,
    tuple: &mut Vec<usize>,
) -> bool {
    if remaining_letters == 1 {
        return pair.phi[s] != t;
    }
    for g in 0..source.gamma_order() {
        for x in 0..source.m_order() {
            tuple.extend([g, x]);
            let s2 = source.mul(s, g, x);
            let t2 = target.mul(t, pair.psi[g], pair.phi[x]);
            if iso_dfs(source, target, pair, remaining_letters - 1, s2, t2, tuple) {
                return true;
            }
            tuple.truncate(tuple.len() - 2);
        }
    }
    false
}

/// `phi(x + y) = phi(x) + phi(y)` for all pairs.
pub fn verify_additive_pair(source: &GammaRing, target: &GammaRing, pair: &MapPair) -> Verification {
    let mo = source.m_order();
    let witness = (0..mo).find_map(|x| {
        (0..mo)
            .find(|&y| pair.phi[source.add(x, y)] != target.add(pair.phi[x], pair.phi[y]))
            .map(|y| Witness::new(vec![x, y], "phi(x + y) != phi(x) + phi(y)"))
    });
    Verification {
        passed: witness.is_none(),
        completeness: Completeness::Exact,
        witness,
        evaluations: (mo as u128) * (mo as u128),
    }
}

/// `d(x + y) = d(x) + d(y)` for all pairs.
pub fn verify_additive_derivation(ring: &GammaRing, d: &DerivationTable) -> Verification {
    let mo = ring.m_order();
    let witness = (0..mo).find_map(|x| {
        (0..mo)
            .find(|&y| d.d[ring.add(x, y)] != ring.add(d.d[x], d.d[y]))
            .map(|y| Witness::new(vec![x, y], "d(x + y) != d(x) + d(y)"))
    });
    Verification {
        passed: witness.is_none(),
        completeness: Completeness::Exact,
        witness,
        evaluations: (mo as u128) * (mo as u128),
    }
}

/// Checks the Leibniz expansion
/// `d(x1 g1 ... xn) = sum_i x1 g1 ... d(xi) ... g_{n-1} xn`, each summand
/// evaluated as its own left-associated product.
pub fn verify_n_derivation(
    ring: &GammaRing,
    d: &DerivationTable,
    n: usize,
    cfg: VerifyConfig,
) -> Result<Verification> {
    check_arity(n)?;
    DerivationTable::new(ring, d.d.clone())?;
    let (mo, go) = (ring.m_order(), ring.gamma_order());
    let count = tuple_count(mo, go, n);
    if count <= cfg.budget {
        let witness = (0..mo).into_par_iter().find_map_first(|x1| {
            let mut tuple = vec![x1];
            let mut terms = vec![d.d[x1]];
            derivation_dfs(ring, d, n, x1, &mut terms, &mut tuple)
                .then(|| Witness::new(tuple, PRODUCT_DETAIL))
        });
        return Ok(Verification {
            passed: witness.is_none(),
            completeness: Completeness::Exact,
            witness,
            evaluations: count,
        });
    }
    let samples = cfg.budget.min(MAX_SAMPLES) as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut witness = None;
    for _ in 0..samples {
        let x1 = rng.gen_range(0..mo);
        let mut tuple = vec![x1];
        let mut s = x1;
        let mut terms = vec![d.d[x1]];
        for _ in 1..n {
            let (g, x) = (rng.gen_range(0..go), rng.gen_range(0..mo));
            tuple.extend([g, x]);
            for t in terms.iter_mut() {
                *t = ring.mul(*t, g, x);
            }
            terms.push(ring.mul(s, g, d.d[x]));
            s = ring.mul(s, g, x);
        }
        let sum = terms.iter().fold(0, |acc, &t| ring.add(acc, t));
        if d.d[s] != sum {
            witness = Some(Witness::new(tuple, PRODUCT_DETAIL));
            break;
        }
    }
    Ok(Verification {
        passed: witness.is_none(),
        completeness: Completeness::Partial { samples },
        witness,
        evaluations: samples as u128,
    })
}

fn derivation_dfs(
    ring: &GammaRing,
    d: &DerivationTable,
    remaining_letters: usize,
    s: usize,
    terms: &mut Vec<usize>,
    tuple: &mut Vec<usize>,
) -> bool {
    if remaining_letters == 1 {
        let sum = terms.iter().fold(0, |acc, &t| ring.add(acc, t));
        return d.d[s] != sum;
    }
    let saved = terms.clone();
    for g in 0..ring.gamma_order() {
        for x in 0..ring.m_order() {
            tuple.extend([g, x]);
            for (t, &old) in terms.iter_mut().zip(&saved) {
                *t = ring.mul(old, g, x);
            }
            terms.push(ring.mul(s, g, d.d[x]));
            if derivation_dfs(ring, d, remaining_letters - 1, ring.mul(s, g, x), terms, tuple) {
                return true;
            }
            terms.pop();
            tuple.truncate(tuple.len() - 2);
        }
    }
    terms.copy_from_slice(&saved);
    false
}

/// Inverse pair `(phi^-1, psi^-1)`, re-verified as an n-multiplicative map
/// from `target` back to `source`.
pub fn inverse_pair(
    source: &GammaRing,
    target: &GammaRing,
    pair: &MapPair,
    n: usize,
    cfg: VerifyConfig,
) -> Result<MapPair> {
    let forward = verify_n_multiplicative(source, target, pair, n, cfg)?;
    if !forward.passed {
        return Err(GammaError::Precondition(
            "pair is not n-multiplicative".into(),
        ));
    }
    let inv = pair.inverted();
    let back = verify_n_multiplicative(target, source, &inv, n, cfg)?;
    if !back.passed {
        return Err(GammaError::InternalInconsistency(
            "inverse of an n-multiplicative pair failed re-verification".into(),
        ));
    }
    Ok(inv)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DefectOrigin {
    IsoDefect,
    DerivationDefect,
    User,
}

/// Table `f: M x Gamma x M -> M`, laid out like the product table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DefectMap {
    m_order: usize,
    gamma_order: usize,
    table: Vec<u32>,
    pub origin: DefectOrigin,
}

impl DefectMap {
    pub fn from_fn<F>(ring: &GammaRing, origin: DefectOrigin, f: F) -> Self
    where
        F: Fn(usize, usize, usize) -> usize,
    {
        let (mo, go) = (ring.m_order(), ring.gamma_order());
        let mut table = Vec::with_capacity(mo * go * mo);
        for x in 0..mo {
            for g in 0..go {
                for y in 0..mo {
                    table.push(f(x, g, y) as u32);
                }
            }
        }
        DefectMap {
            m_order: mo,
            gamma_order: go,
            table,
            origin,
        }
    }

    pub fn zero(ring: &GammaRing) -> Self {
        Self::from_fn(ring, DefectOrigin::User, |_, _, _| 0)
    }

    pub fn from_table(ring: &GammaRing, table: Vec<usize>) -> Result<Self> {
        let (mo, go) = (ring.m_order(), ring.gamma_order());
        if table.len() != mo * go * mo {
            return Err(GammaError::TableSize {
                expected: mo * go * mo,
                got: table.len(),
            });
        }
        if let Some((position, &value)) = table.iter().enumerate().find(|(_, &v)| v >= mo) {
            return Err(GammaError::EntryOutOfRange {
                position,
                value,
                bound: mo,
            });
        }
        Ok(Self::from_fn(ring, DefectOrigin::User, |x, g, y| {
            table[(x * go + g) * mo + y]
        }))
    }

    #[inline]
    pub fn get(&self, x: usize, g: usize, y: usize) -> usize {
        self.table[(x * self.gamma_order + g) * self.m_order + y] as usize
    }

    pub fn is_zero(&self) -> bool {
        self.table.iter().all(|&v| v == 0)
    }

    /// Least `(x, g, y)` with nonzero value.
    pub fn first_nonzero(&self) -> Option<(usize, usize, usize)> {
        self.table.iter().position(|&v| v != 0).map(|i| {
            let y = i % self.m_order;
            let rest = i / self.m_order;
            (rest / self.gamma_order, rest % self.gamma_order, y)
        })
    }

    pub fn m_order(&self) -> usize {
        self.m_order
    }

    pub fn gamma_order(&self) -> usize {
        self.gamma_order
    }

    fn vanishes_on_zero_slots(&self) -> bool {
        (0..self.m_order).all(|x| {
            (0..self.gamma_order).all(|g| self.get(x, g, 0) == 0 && self.get(0, g, x) == 0)
        })
    }
}

/// `f(x, g, y) = phi^-1(phi(x + y) - phi(x) - phi(y))`.
pub fn defect_of_iso(
    source: &GammaRing,
    target: &GammaRing,
    pair: &MapPair,
    n: usize,
    cfg: VerifyConfig,
) -> Result<DefectMap> {
    source.require_barnes()?;
    target.require_barnes()?;
    let v = verify_n_multiplicative(source, target, pair, n, cfg)?;
    if !v.is_exact_pass() {
        return Err(GammaError::Precondition(
            "defect requires an exactly verified n-multiplicative pair".into(),
        ));
    }
    let inv = pair.inverted();
    let f = DefectMap::from_fn(source, DefectOrigin::IsoDefect, |x, _, y| {
        let img = target.sub(
            target.sub(pair.phi[source.add(x, y)], pair.phi[x]),
            pair.phi[y],
        );
        inv.phi[img]
    });
    if !f.vanishes_on_zero_slots() {
        return Err(GammaError::InternalInconsistency(
            "iso defect does not vanish on zero slots although phi^-1(0) = 0".into(),
        ));
    }
    Ok(f)
}

/// `f(x, g, y) = d(x + y) - d(x) - d(y)`.
pub fn defect_of_derivation(
    ring: &GammaRing,
    d: &DerivationTable,
    n: usize,
    cfg: VerifyConfig,
) -> Result<DefectMap> {
    ring.require_barnes()?;
    let v = verify_n_derivation(ring, d, n, cfg)?;
    if !v.is_exact_pass() {
        return Err(GammaError::Precondition(
            "defect requires an exactly verified n-multiplicative derivation".into(),
        ));
    }
    let f = DefectMap::from_fn(ring, DefectOrigin::DerivationDefect, |x, _, y| {
        ring.sub(ring.sub(d.d[ring.add(x, y)], d.d[x]), d.d[y])
    });
    if !f.vanishes_on_zero_slots() {
        return Err(GammaError::InternalInconsistency(
            "derivation defect does not vanish on zero slots although d(0) = 0".into(),
        ));
    }
    Ok(f)
}
