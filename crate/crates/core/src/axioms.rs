//! Exhaustive axiom checks (Barnes and Nobusawa) and idempotent/unity detection.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GammaError, Result};
use crate::ring::GammaRing;

/// Per-axiom evaluation cap; larger scans are refused rather than sampled.
pub const AXIOM_EVALUATION_CAP: u128 = 1 << 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AxiomId {
    /// `(x+y)ay = xaz + yaz` and `xa(y+z) = xay + xaz`.
    BarnesDistributiveM,
    /// `x(a+b)y = xay + xby`.
    BarnesDistributiveGamma,
    /// `(xay)bz = xa(ybz)`.
    BarnesAssociative,
    NobusawaDistributive,
    /// `(xay)bz = xa(ybz) = x(ayb)z`.
    NobusawaAssociative,
    /// Nonzero `x, y` with `xgy = 0` forces `g = 0`.
    NobusawaFaithfulStrict,
    /// `xgy = 0` for all `x, y` forces `g = 0`.
    NobusawaFaithfulAnnihilator,
}

/// A failing tuple of element indices, with the positions named in `detail`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub tuple: Vec<usize>,
    pub detail: String,
}

impl Witness {
    pub fn new(tuple: Vec<usize>, detail: impl Into<String>) -> Self {
        Witness {
            tuple,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub axiom: AxiomId,
    pub passed: bool,
    pub witness: Option<Witness>,
    pub evaluations: u128,
}

impl AxiomReport {
    fn from_scan(axiom: AxiomId, witness: Option<Witness>, evaluations: u128) -> Self {
        AxiomReport {
            axiom,
            passed: witness.is_none(),
            witness,
            evaluations,
        }
    }
}

fn check_cap(needed: u128) -> Result<u128> {
    if needed > AXIOM_EVALUATION_CAP {
        Err(GammaError::BudgetExceeded {
            needed,
            cap: AXIOM_EVALUATION_CAP,
        })
    } else {
        Ok(needed)
    }
}

/// Lexicographically least failing tuple, scanning the outermost argument in parallel.
pub(crate) fn first_witness<F>(outer: usize, f: F) -> Option<Witness>
where
    F: Fn(usize) -> Option<Witness> + Sync + Send,
{
    (0..outer).into_par_iter().find_map_first(f)
}

/// Barnes axioms (ii)-(iv); closure holds by table construction.
pub fn check_barnes_axioms(r: &GammaRing) -> Result<Vec<AxiomReport>> {
    let (m, g) = (r.m_order() as u128, r.gamma_order() as u128);
    let dist_m = check_cap(m * m * m * g)?;
    let dist_g = check_cap(m * g * g * m)?;
    let assoc = check_cap(m * m * m * g * g)?;
    Ok(vec![
        AxiomReport::from_scan(AxiomId::BarnesDistributiveM, scan_distributive_m(r), 2 * dist_m),
        AxiomReport::from_scan(
            AxiomId::BarnesDistributiveGamma,
            scan_distributive_gamma(r),
            dist_g,
        ),
        AxiomReport::from_scan(AxiomId::BarnesAssociative, scan_associative(r), assoc),
    ])
}

fn scan_distributive_m(r: &GammaRing) -> Option<Witness> {
    let (mo, go) = (r.m_order(), r.gamma_order());
    first_witness(mo, |x| {
        for y in 0..mo {
            let s = r.add(x, y);
            for a in 0..go {
                for z in 0..mo {
                    if r.mul(s, a, z) != r.add(r.mul(x, a, z), r.mul(y, a, z)) {
                        return Some(Witness::new(vec![x, y, a, z], "(x+y)az != xaz + yaz"));
                    }
                    let t = r.add(y, z);
                    if r.mul(x, a, t) != r.add(r.mul(x, a, y), r.mul(x, a, z)) {
                        return Some(Witness::new(vec![x, y, a, z], "xa(y+z) != xay + xaz"));
                    }
                }
            }
        }
        None
    })
}

fn scan_distributive_gamma(r: &GammaRing) -> Option<Witness> {
    let (mo, go) = (r.m_order(), r.gamma_order());
    let gg = r.gamma_group();
    first_witness(mo, |x| {
        for a in 0..go {
            for b in 0..go {
                let s = gg.add_idx(a, b);
                for y in 0..mo {
                    if r.mul(x, s, y) != r.add(r.mul(x, a, y), r.mul(x, b, y)) {
                        return Some(Witness::new(vec![x, a, b, y], "x(a+b)y != xay + xby"));
                    }
                }
            }
        }
        None
    })
}

fn scan_associative(r: &GammaRing) -> Option<Witness> {
    let (mo, go) = (r.m_order(), r.gamma_order());
    first_witness(mo, |x| {
        for a in 0..go {
            for y in 0..mo {
                let xay = r.mul(x, a, y);
                for b in 0..go {
                    for z in 0..mo {
                        if r.mul(xay, b, z) != r.mul(x, a, r.mul(y, b, z)) {
                            return Some(Witness::new(vec![x, a, y, b, z], "(xay)bz != xa(ybz)"));
                        }
                    }
                }
            }
        }
        None
    })
}

/// Nobusawa conditions, reporting the faithfulness condition under both
/// quantifier readings.
pub fn check_nobusawa(r: &GammaRing) -> Result<Vec<AxiomReport>> {
    if !r.has_nu() {
        return Err(GammaError::MissingNu);
    }
    let (mo, go) = (r.m_order(), r.gamma_order());
    let (m, g) = (mo as u128, go as u128);
    let barnes = check_barnes_axioms(r)?;
    let dist_ok = barnes
        .iter()
        .filter(|rep| rep.axiom != AxiomId::BarnesAssociative)
        .find_map(|rep| rep.witness.clone());
    let assoc_evals = check_cap(m * m * m * g * g)?;
    let assoc = first_witness(mo, |x| {
        for a in 0..go {
            for y in 0..mo {
                let xay = r.mul(x, a, y);
                for b in 0..go {
                    let ayb = r.nu(a, y, b).expect("nu present");
                    for z in 0..mo {
                        let lhs = r.mul(xay, b, z);
                        if lhs != r.mul(x, a, r.mul(y, b, z)) {
                            return Some(Witness::new(vec![x, a, y, b, z], "(xay)bz != xa(ybz)"));
                        }
                        if lhs != r.mul(x, ayb, z) {
                            return Some(Witness::new(vec![x, a, y, b, z], "(xay)bz != x(ayb)z"));
                        }
                    }
                }
            }
        }
        None
    });
    let faith_evals = check_cap(g * m * m)?;
    let strict = (1..go).find_map(|a| {
        for x in 1..mo {
            for y in 1..mo {
                if r.mul(x, a, y) == 0 {
                    return Some(Witness::new(vec![x, a, y], "xgy = 0 with x, y, g nonzero"));
                }
            }
        }
        None
    });
    let annihilator = (1..go).find_map(|a| {
        let kills = (0..mo).all(|x| (0..mo).all(|y| r.mul(x, a, y) == 0));
        kills.then(|| Witness::new(vec![a], "nonzero g annihilates M x M"))
    });
    Ok(vec![
        AxiomReport::from_scan(
            AxiomId::NobusawaDistributive,
            dist_ok,
            barnes[0].evaluations + barnes[1].evaluations,
        ),
        AxiomReport::from_scan(AxiomId::NobusawaAssociative, assoc, 2 * assoc_evals),
        AxiomReport::from_scan(AxiomId::NobusawaFaithfulStrict, strict, faith_evals),
        AxiomReport::from_scan(AxiomId::NobusawaFaithfulAnnihilator, annihilator, faith_evals),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IdempotentRecord {
    pub e: usize,
    pub gamma: usize,
    pub nontrivial: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct UnityRecord {
    pub one: usize,
    pub gamma: usize,
}

/// Whether `(one, gamma)` is a two-sided gamma-unity.
pub fn is_unity(r: &GammaRing, one: usize, gamma: usize) -> bool {
    one != 0 && (0..r.m_order()).all(|x| r.mul(one, gamma, x) == x && r.mul(x, gamma, one) == x)
}

/// All nonzero `(1, g)` with `1 g x = x g 1 = x` for every `x`, ordered by `(1, g)`.
pub fn find_unities(r: &GammaRing) -> Vec<UnityRecord> {
    let mut out = Vec::new();
    for one in 1..r.m_order() {
        for gamma in 0..r.gamma_order() {
            if is_unity(r, one, gamma) {
                out.push(UnityRecord { one, gamma });
            }
        }
    }
    out
}

/// All nonzero `(e, g)` with `e g e = e`, ordered by `(e, g)`.
pub fn find_idempotents(r: &GammaRing) -> Vec<IdempotentRecord> {
    let mut out = Vec::new();
    for e in 1..r.m_order() {
        for gamma in 0..r.gamma_order() {
            if r.mul(e, gamma, e) == e {
                out.push(IdempotentRecord {
                    e,
                    gamma,
                    nontrivial: !is_unity(r, e, gamma),
                });
            }
        }
    }
    out
}
