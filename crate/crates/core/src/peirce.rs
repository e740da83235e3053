//! Idempotent frames, Peirce decomposition, and the structural conditions
//! (i)-(iv) under which multiplicative maps are forced to be additive.
//!
//! The complement `e2 = 1 - e` is never an element of `M`; it exists only as
//! the pair of operator tables `left_f: Gamma x M -> M` (`b, a |-> e2 b a`)
//! and `right_f: M x Gamma -> M` (`a, b |-> a b e2`).

use serde::Serialize;

use crate::axioms::{is_unity, Witness};
use crate::error::{GammaError, Result};
use crate::ring::GammaRing;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrameProvenance {
    CanonicalFromUnity,
    UserSupplied,
}

#[derive(Debug, Clone)]
pub struct IdempotentFrame<'r> {
    ring: &'r GammaRing,
    e: usize,
    gamma1: usize,
    /// `left_f[b * |M| + a]`
    left_f: Vec<u32>,
    /// `right_f[a * |Gamma| + b]`
    right_f: Vec<u32>,
    provenance: FrameProvenance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrameInvariant {
    NontrivialIdempotent,
    LeftSpecialization,
    RightSpecialization,
    LeftAdditive,
    RightAdditive,
    FrameAssociative,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrameViolation {
    pub invariant: FrameInvariant,
    pub witness: Witness,
}

impl<'r> IdempotentFrame<'r> {
    /// Canonical complement maps from a gamma1-unity:
    /// `left_f(b, a) = 1ba - eba`, `right_f(a, b) = ab1 - abe`.
    pub fn canonical(ring: &'r GammaRing, e: usize, gamma1: usize, unity: usize) -> Result<Self> {
        ring.m_group().check_index(e)?;
        ring.m_group().check_index(unity)?;
        ring.gamma_group().check_index(gamma1)?;
        if !is_unity(ring, unity, gamma1) {
            return Err(GammaError::InvalidFrame(format!(
                "element {unity} is not a {gamma1}-unity"
            )));
        }
        let (mo, go) = (ring.m_order(), ring.gamma_order());
        let mut left_f = Vec::with_capacity(go * mo);
        for b in 0..go {
            for a in 0..mo {
                left_f.push(ring.sub(ring.mul(unity, b, a), ring.mul(e, b, a)) as u32);
            }
        }
        let mut right_f = Vec::with_capacity(mo * go);
        for a in 0..mo {
            for b in 0..go {
                right_f.push(ring.sub(ring.mul(a, b, unity), ring.mul(a, b, e)) as u32);
            }
        }
        let frame = IdempotentFrame {
            ring,
            e,
            gamma1,
            left_f,
            right_f,
            provenance: FrameProvenance::CanonicalFromUnity,
        };
        frame.into_validated()
    }

    /// Frame from user-supplied operator tables, rejected unless every frame
    /// invariant holds.
    pub fn custom(
        ring: &'r GammaRing,
        e: usize,
        gamma1: usize,
        left_f: Vec<usize>,
        right_f: Vec<usize>,
    ) -> Result<Self> {
        ring.m_group().check_index(e)?;
        ring.gamma_group().check_index(gamma1)?;
        let (mo, go) = (ring.m_order(), ring.gamma_order());
        let convert = |t: Vec<usize>| -> Result<Vec<u32>> {
            if t.len() != mo * go {
                return Err(GammaError::TableSize {
                    expected: mo * go,
                    got: t.len(),
                });
            }
            t.into_iter()
                .enumerate()
                .map(|(position, value)| {
                    if value >= mo {
                        Err(GammaError::EntryOutOfRange {
                            position,
                            value,
                            bound: mo,
                        })
                    } else {
                        Ok(value as u32)
                    }
                })
                .collect()
        };
        let frame = IdempotentFrame {
            ring,
            e,
            gamma1,
            left_f: convert(left_f)?,
            right_f: convert(right_f)?,
            provenance: FrameProvenance::UserSupplied,
        };
        frame.into_validated()
    }

    fn into_validated(self) -> Result<Self> {
        let violations = self.violations();
        if violations.is_empty() {
            Ok(self)
        } else {
            let msg: Vec<String> = violations
                .iter()
                .map(|v| format!("{:?} at {:?}", v.invariant, v.witness.tuple))
                .collect();
            Err(GammaError::InvalidFrame(msg.join("; ")))
        }
    }

    /// Every violated frame invariant with its least witness.
    pub fn violations(&self) -> Vec<FrameViolation> {
        let r = self.ring;
        let (mo, go) = (r.m_order(), r.gamma_order());
        let (e, g1) = (self.e, self.gamma1);
        let mut out = Vec::new();
        let mut record = |invariant, witness: Option<Witness>| {
            if let Some(witness) = witness {
                out.push(FrameViolation { invariant, witness });
            }
        };
        let nontrivial = e != 0 && r.mul(e, g1, e) == e && !is_unity(r, e, g1);
        record(
            FrameInvariant::NontrivialIdempotent,
            (!nontrivial).then(|| Witness::new(vec![e, g1], "e is not a nontrivial g1-idempotent")),
        );
        record(
            FrameInvariant::LeftSpecialization,
            (0..mo)
                .find(|&a| self.left(g1, a) != r.sub(a, r.mul(e, g1, a)))
                .map(|a| Witness::new(vec![a], "left_f(g1, a) != a - e g1 a")),
        );
        record(
            FrameInvariant::RightSpecialization,
            (0..mo)
                .find(|&a| self.right(a, g1) != r.sub(a, r.mul(a, g1, e)))
                .map(|a| Witness::new(vec![a], "right_f(a, g1) != a - a g1 e")),
        );
        let left_add = (0..go).find_map(|b| {
            (0..mo).find_map(|a1| {
                (0..mo)
                    .find(|&a2| {
                        self.left(b, r.add(a1, a2)) != r.add(self.left(b, a1), self.left(b, a2))
                    })
                    .map(|a2| Witness::new(vec![b, a1, a2], "left_f(b, a1 + a2) not additive"))
            })
        });
        record(FrameInvariant::LeftAdditive, left_add);
        let right_add = (0..mo).find_map(|a1| {
            (0..mo).find_map(|a2| {
                (0..go)
                    .find(|&b| {
                        self.right(r.add(a1, a2), b) != r.add(self.right(a1, b), self.right(a2, b))
                    })
                    .map(|b| Witness::new(vec![a1, a2, b], "right_f(a1 + a2, b) not additive"))
            })
        });
        record(FrameInvariant::RightAdditive, right_add);
        record(FrameInvariant::FrameAssociative, self.associativity_witness());
        out
    }

    /// Least `(a, b, c, y)` with `right_f(a, b) c y != a b left_f(c, y)`.
    pub fn associativity_witness(&self) -> Option<Witness> {
        let r = self.ring;
        let (mo, go) = (r.m_order(), r.gamma_order());
        crate::axioms::first_witness(mo, |a| {
            for b in 0..go {
                let abf = self.right(a, b);
                for c in 0..go {
                    for y in 0..mo {
                        if r.mul(abf, c, y) != r.mul(a, b, self.left(c, y)) {
                            return Some(Witness::new(
                                vec![a, b, c, y],
                                "(a b f) c y != a b (f c y)",
                            ));
                        }
                    }
                }
            }
            None
        })
    }

    pub fn ring(&self) -> &'r GammaRing {
        self.ring
    }

    pub fn e(&self) -> usize {
        self.e
    }

    pub fn gamma1(&self) -> usize {
        self.gamma1
    }

    pub fn provenance(&self) -> FrameProvenance {
        self.provenance
    }

    /// `e2 b a`.
    #[inline]
    pub fn left(&self, b: usize, a: usize) -> usize {
        self.left_f[b * self.ring.m_order() + a] as usize
    }

    /// `a b e2`.
    #[inline]
    pub fn right(&self, a: usize, b: usize) -> usize {
        self.right_f[a * self.ring.gamma_order() + b] as usize
    }

    pub fn left_table(&self) -> Vec<usize> {
        self.left_f.iter().map(|&v| v as usize).collect()
    }

    pub fn right_table(&self) -> Vec<usize> {
        self.right_f.iter().map(|&v| v as usize).collect()
    }
}

/// Canonical frames for every nontrivial idempotent `(e, g)` whose `g` admits a
/// unity, using the least such unity.
pub fn canonical_frames(r: &GammaRing) -> Vec<IdempotentFrame<'_>> {
    let unities = crate::axioms::find_unities(r);
    crate::axioms::find_idempotents(r)
        .into_iter()
        .filter(|rec| rec.nontrivial)
        .filter_map(|rec| {
            let one = unities.iter().find(|u| u.gamma == rec.gamma)?.one;
            IdempotentFrame::canonical(r, rec.e, rec.gamma, one).ok()
        })
        .collect()
}

/// Indices into [`PeirceComponents::components`].
pub const BLOCKS: [(usize, usize); 4] = [(1, 1), (1, 2), (2, 1), (2, 2)];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeirceComponents {
    pub e: usize,
    pub gamma1: usize,
    /// Projection tables `P11, P12, P21, P22`.
    pub projections: [Vec<usize>; 4],
    /// Component subsets `M11, M12, M21, M22`, sorted.
    pub components: [Vec<usize>; 4],
}

fn block_index(i: usize, j: usize) -> usize {
    (i - 1) * 2 + (j - 1)
}

impl PeirceComponents {
    pub fn block(&self, i: usize, j: usize) -> &[usize] {
        &self.components[block_index(i, j)]
    }

    pub fn projection(&self, i: usize, j: usize) -> &[usize] {
        &self.projections[block_index(i, j)]
    }
}

/// Splits `M` into `M11 + M12 + M21 + M22` relative to the frame idempotent
/// and verifies the direct-sum identities exhaustively.
pub fn peirce_decompose(frame: &IdempotentFrame<'_>) -> Result<PeirceComponents> {
    let r = frame.ring;
    let (e, g1) = (frame.e, frame.gamma1);
    let n = r.m_order();
    let mut p = [vec![0; n], vec![0; n], vec![0; n], vec![0; n]];
    for a in 0..n {
        let ea = r.mul(e, g1, a);
        let ae = r.mul(a, g1, e);
        let eae = r.mul(ea, g1, e);
        p[0][a] = eae;
        p[1][a] = r.sub(ea, eae);
        p[2][a] = r.sub(ae, eae);
        p[3][a] = r.add(r.sub(r.sub(a, ea), ae), eae);
    }
    for a in 0..n {
        let sum = p.iter().fold(0, |acc, t| r.add(acc, t[a]));
        if sum != a {
            return Err(GammaError::InternalInconsistency(format!(
                "Peirce projections do not sum to the identity at {a}"
            )));
        }
        for (i, pi) in p.iter().enumerate() {
            for (j, pj) in p.iter().enumerate() {
                let composed = pi[pj[a]];
                let expected = if i == j { pj[a] } else { 0 };
                if composed != expected {
                    return Err(GammaError::InternalInconsistency(format!(
                        "Peirce projections {i},{j} not orthogonal idempotents at {a}"
                    )));
                }
            }
        }
    }
    let image = |t: &Vec<usize>| {
        let mut seen = vec![false; n];
        for &v in t {
            seen[v] = true;
        }
        (0..n).filter(|&v| seen[v]).collect::<Vec<_>>()
    };
    let components = [image(&p[0]), image(&p[1]), image(&p[2]), image(&p[3])];
    Ok(PeirceComponents {
        e,
        gamma1: g1,
        projections: p,
        components,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeirceRelationReport {
    /// `Mij Gamma Mkl` inside `Mil`.
    pub containment_passed: bool,
    pub containment_witness: Option<Witness>,
    /// `Mij g1 Mkl = 0` for `j != k`.
    pub orthogonality_passed: bool,
    pub orthogonality_witness: Option<Witness>,
}

impl PeirceRelationReport {
    pub fn passed(&self) -> bool {
        self.containment_passed && self.orthogonality_passed
    }
}

/// Witness tuples are `(i, j, k, l, x, g, y)`.
pub fn check_peirce_relations(r: &GammaRing, pc: &PeirceComponents) -> PeirceRelationReport {
    let n = r.m_order();
    let mut member = [vec![false; n], vec![false; n], vec![false; n], vec![false; n]];
    for (b, comp) in pc.components.iter().enumerate() {
        for &x in comp {
            member[b][x] = true;
        }
    }
    let mut containment = None;
    let mut orthogonality = None;
    for &(i, j) in &BLOCKS {
        for &(k, l) in &BLOCKS {
            let target = &member[block_index(i, l)];
            for &x in pc.block(i, j) {
                for &y in pc.block(k, l) {
                    for g in 0..r.gamma_order() {
                        let p = r.mul(x, g, y);
                        if containment.is_none() && !target[p] {
                            containment = Some(Witness::new(
                                vec![i, j, k, l, x, g, y],
                                "x g y escapes M_il",
                            ));
                        }
                    }
                    if j != k && orthogonality.is_none() && r.mul(x, pc.gamma1, y) != 0 {
                        orthogonality = Some(Witness::new(
                            vec![i, j, k, l, x, pc.gamma1, y],
                            "x g1 y != 0 with j != k",
                        ));
                    }
                }
            }
        }
    }
    PeirceRelationReport {
        containment_passed: containment.is_none(),
        containment_witness: containment,
        orthogonality_passed: orthogonality.is_none(),
        orthogonality_witness: orthogonality,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionVerdict {
    pub passed: bool,
    pub witness: Option<Witness>,
}

impl ConditionVerdict {
    fn from_witness(witness: Option<Witness>) -> Self {
        ConditionVerdict {
            passed: witness.is_none(),
            witness,
        }
    }
}

/// `x Gamma M = 0` implies `x = 0`.
pub fn check_condition_ii(r: &GammaRing) -> ConditionVerdict {
    let (mo, go) = (r.m_order(), r.gamma_order());
    ConditionVerdict::from_witness(
        (1..mo)
            .find(|&x| (0..go).all(|g| (0..mo).all(|m| r.mul(x, g, m) == 0)))
            .map(|x| Witness::new(vec![x], "nonzero x with x Gamma M = 0")),
    )
}

/// `e_a Gamma M Gamma x = 0` for every frame `a` implies `x = 0`.
pub fn check_condition_iii(r: &GammaRing, frames: &[IdempotentFrame<'_>]) -> Result<ConditionVerdict> {
    if frames.is_empty() {
        return Err(GammaError::EmptyFrameFamily);
    }
    let (mo, go) = (r.m_order(), r.gamma_order());
    // union over the family of e Gamma M
    let mut left = vec![false; mo];
    for f in frames {
        for d in 0..go {
            for m in 0..mo {
                left[r.mul(f.e, d, m)] = true;
            }
        }
    }
    let left: Vec<usize> = (0..mo).filter(|&s| left[s]).collect();
    Ok(ConditionVerdict::from_witness(
        (1..mo)
            .find(|&x| {
                left.iter()
                    .all(|&s| (0..go).all(|b| r.mul(s, b, x) == 0))
            })
            .map(|x| Witness::new(vec![x], "nonzero x with e Gamma M Gamma x = 0 for all frames")),
    ))
}

/// For `p = e g1 x g1 e`: `p Gamma M Gamma (1 - e) = 0` implies `p = 0`, with
/// `m b (1 - e)` realized as `right_f(m, b)`.
pub fn check_condition_iv(frame: &IdempotentFrame<'_>) -> ConditionVerdict {
    let r = frame.ring;
    let (mo, go) = (r.m_order(), r.gamma_order());
    let (e, g1) = (frame.e, frame.gamma1);
    let mut right = vec![false; mo];
    for m in 0..mo {
        for b in 0..go {
            right[frame.right(m, b)] = true;
        }
    }
    let right: Vec<usize> = (0..mo).filter(|&t| right[t]).collect();
    ConditionVerdict::from_witness(
        (0..mo)
            .find(|&x| {
                let p = r.mul(r.mul(e, g1, x), g1, e);
                p != 0 && right.iter().all(|&t| (0..go).all(|d| r.mul(p, d, t) == 0))
            })
            .map(|x| Witness::new(vec![x], "e g1 x g1 e != 0 annihilates Gamma M Gamma (1 - e)")),
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrameSummary {
    pub e: usize,
    pub gamma1: usize,
    pub provenance: FrameProvenance,
    /// Condition (i): frame invariants.
    pub valid: bool,
    pub violations: Vec<FrameViolation>,
    pub condition_iv: ConditionVerdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MartindaleReport {
    pub frames: Vec<FrameSummary>,
    pub condition_ii: ConditionVerdict,
    /// `None` for an empty family.
    pub condition_iii: Option<ConditionVerdict>,
    pub empty_family: bool,
    pub passed: bool,
}

/// Conditions (i)-(iv) for a family of frames; an empty family fails.
pub fn check_martindale_family(r: &GammaRing, frames: &[IdempotentFrame<'_>]) -> MartindaleReport {
    let summaries: Vec<FrameSummary> = frames
        .iter()
        .map(|f| {
            let violations = f.violations();
            FrameSummary {
                e: f.e,
                gamma1: f.gamma1,
                provenance: f.provenance,
                valid: violations.is_empty(),
                violations,
                condition_iv: check_condition_iv(f),
            }
        })
        .collect();
    let condition_ii = check_condition_ii(r);
    let condition_iii = check_condition_iii(r, frames).ok();
    let passed = !frames.is_empty()
        && condition_ii.passed
        && condition_iii.as_ref().is_some_and(|c| c.passed)
        && summaries.iter().all(|s| s.valid && s.condition_iv.passed);
    MartindaleReport {
        frames: summaries,
        condition_ii,
        condition_iii,
        empty_family: frames.is_empty(),
        passed,
    }
}
