use std::path::Path;

use serde_json::{json, Value};

use gammaring::axioms::{check_barnes_axioms, check_nobusawa, find_idempotents, find_unities, AxiomId, AxiomReport};
use gammaring::format::GrdfDocument;
use gammaring::ideal::is_prime;
use gammaring::maps::{verify_additive_derivation, verify_additive_pair, verify_n_derivation, verify_n_multiplicative, Completeness, Verification, VerifyConfig};
use gammaring::peirce::{canonical_frames, check_martindale_family, check_peirce_relations, peirce_decompose, IdempotentFrame};
use gammaring::search::{search_n_derivations, search_n_multiplicative_isos, SearchConfig, SearchOutcome, SearchStatus};
use gammaring::theorem::{hunt_counterexamples, matrix_family, run_additivity_pipeline, run_derivation_pipeline, trivial_family, ConclusionStatus, HuntConfig, PipelineConfig, PipelineReport};
use gammaring::{GammaError, GammaRing, Result};

use crate::report::{product_pattern, render_optional, Outcome, Report};

#[derive(Debug, Clone)]
pub struct Options {
    pub n: usize,
    pub k: Option<usize>,
    pub budget: u64,
    pub seed: u64,
    pub require_additive: bool,
}

impl Options {
    fn verify(&self) -> VerifyConfig {
        VerifyConfig {
            budget: self.budget as u128,
            seed: self.seed,
        }
    }

    fn search(&self) -> SearchConfig {
        let mut cfg = SearchConfig::new(self.n);
        cfg.node_budget = self.budget;
        cfg
    }

    fn pipeline(&self) -> PipelineConfig {
        let mut cfg = PipelineConfig::new(self.n);
        cfg.k = self.k;
        cfg.verify = self.verify();
        cfg
    }

    fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "k": self.k.unwrap_or(self.n.saturating_sub(1)),
            "budget": self.budget,
            "seed": self.seed,
            "require_additive": self.require_additive,
        })
    }
}

pub fn load(path: &Path) -> Result<GrdfDocument> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| GammaError::Format(format!("cannot read {}: {e}", path.display())))?;
    GrdfDocument::parse(&text)
}

fn ring_summary(r: &GammaRing) -> Value {
    json!({
        "m_invariants": r.m_group().invariants().factors(),
        "gamma_invariants": r.gamma_group().invariants().factors(),
        "m_order": r.m_order(),
        "gamma_order": r.gamma_order(),
        "nobusawa_product": r.has_nu(),
    })
}

fn axiom_pattern(id: AxiomId) -> &'static str {
    match id {
        AxiomId::BarnesDistributiveM => "MMGM",
        AxiomId::BarnesDistributiveGamma => "MGGM",
        AxiomId::BarnesAssociative | AxiomId::NobusawaAssociative => "MGMGM",
        // reuses a Barnes distributivity witness, rendered by index
        AxiomId::NobusawaDistributive => "",
        AxiomId::NobusawaFaithfulStrict => "MGM",
        AxiomId::NobusawaFaithfulAnnihilator => "G",
    }
}

fn axiom_json(r: &GammaRing, rep: &AxiomReport) -> Value {
    json!({
        "axiom": rep.axiom,
        "passed": rep.passed,
        "evaluations": rep.evaluations,
        "witness": render_optional(r, &rep.witness, axiom_pattern(rep.axiom)),
    })
}

fn completeness_outcome(v: &Verification) -> Outcome {
    if !v.passed {
        Outcome::Fail
    } else if matches!(v.completeness, Completeness::Partial { .. }) {
        Outcome::Partial
    } else {
        Outcome::Pass
    }
}

fn verification_json(r: &GammaRing, v: &Verification, pattern: &str) -> Value {
    json!({
        "passed": v.passed,
        "completeness": v.completeness,
        "evaluations": v.evaluations,
        "witness": render_optional(r, &v.witness, pattern),
    })
}

fn search_outcome<T>(s: &SearchOutcome<T>) -> Outcome {
    if s.status == SearchStatus::BudgetExhausted {
        Outcome::Partial
    } else {
        Outcome::Pass
    }
}

/// Frames from the document, or the canonical family when it lists none.
fn frames_for<'r>(doc: &GrdfDocument, r: &'r GammaRing) -> Result<(Vec<IdempotentFrame<'r>>, &'static str)> {
    if doc.frames.is_empty() {
        Ok((canonical_frames(r), "canonical"))
    } else {
        Ok((doc.frames(r)?, "document"))
    }
}

pub fn axioms(doc: &GrdfDocument, opts: &Options) -> Result<Report> {
    let r = doc.ring()?;
    let barnes = check_barnes_axioms(&r)?;
    let passed = barnes.iter().all(|a| a.passed);
    let nobusawa = if r.has_nu() {
        Value::Array(check_nobusawa(&r)?.iter().map(|a| axiom_json(&r, a)).collect())
    } else {
        Value::Null
    };
    Ok(Report {
        command: "axioms",
        options: opts.to_json(),
        outcome: if passed { Outcome::Pass } else { Outcome::Fail },
        body: json!({
            "ring": ring_summary(&r),
            "barnes": barnes.iter().map(|a| axiom_json(&r, a)).collect::<Vec<_>>(),
            "barnes_passed": passed,
            "nobusawa": nobusawa,
        }),
    })
}

pub fn idempotents(doc: &GrdfDocument, opts: &Options) -> Result<Report> {
    let r = doc.ring()?;
    let unities: Vec<Value> = find_unities(&r)
        .iter()
        .map(|u| {
            json!({
                "one": u.one,
                "gamma": u.gamma,
                "rendered": format!("M:{} G:{}", r.render_m(u.one), r.render_gamma(u.gamma)),
            })
        })
        .collect();
    let idempotents: Vec<Value> = find_idempotents(&r)
        .iter()
        .map(|i| {
            json!({
                "e": i.e,
                "gamma": i.gamma,
                "nontrivial": i.nontrivial,
                "rendered": format!("M:{} G:{}", r.render_m(i.e), r.render_gamma(i.gamma)),
            })
        })
        .collect();
    Ok(Report {
        command: "idempotents",
        options: opts.to_json(),
        outcome: Outcome::Pass,
        body: json!({
            "ring": ring_summary(&r),
            "unity_count": unities.len(),
            "unities": unities,
            "idempotent_count": idempotents.len(),
            "idempotents": idempotents,
        }),
    })
}

pub fn peirce(doc: &GrdfDocument, opts: &Options) -> Result<Report> {
    let r = doc.ring()?;
    let (frames, source) = frames_for(doc, &r)?;
    let mut outcome = if frames.is_empty() { Outcome::Fail } else { Outcome::Pass };
    let mut out = Vec::new();
    for frame in &frames {
        let pc = peirce_decompose(frame)?;
        let rel = check_peirce_relations(&r, &pc);
        if !rel.passed() {
            outcome = Outcome::Fail;
        }
        let blocks: Vec<Value> = [(1, 1), (1, 2), (2, 1), (2, 2)]
            .iter()
            .map(|&(i, j)| {
                json!({
                    "block": format!("M{i}{j}"),
                    "size": pc.block(i, j).len(),
                    "members": pc.block(i, j),
                })
            })
            .collect();
        out.push(json!({
            "e": frame.e(),
            "gamma1": frame.gamma1(),
            "provenance": frame.provenance(),
            "blocks": blocks,
            "containment_passed": rel.containment_passed,
            "containment_witness": render_optional(&r, &rel.containment_witness, "iiiiMGM"),
            "orthogonality_passed": rel.orthogonality_passed,
            "orthogonality_witness": render_optional(&r, &rel.orthogonality_witness, "iiiiMGM"),
        }));
    }
    Ok(Report {
        command: "peirce",
        options: opts.to_json(),
        outcome,
        body: json!({
            "ring": ring_summary(&r),
            "frame_source": source,
            "frames": out,
        }),
    })
}

pub fn conditions(doc: &GrdfDocument, opts: &Options) -> Result<Report> {
    let r = doc.ring()?;
    let (frames, source) = frames_for(doc, &r)?;
    let rep = check_martindale_family(&r, &frames);
    let prime = is_prime(&r)?;
    let frames_json: Vec<Value> = rep
        .frames
        .iter()
        .map(|f| {
            json!({
                "e": f.e,
                "gamma1": f.gamma1,
                "provenance": f.provenance,
                "valid": f.valid,
                "violations": f.violations,
                "condition_iv": {
                    "passed": f.condition_iv.passed,
                    "witness": render_optional(&r, &f.condition_iv.witness, "M"),
                },
            })
        })
        .collect();
    Ok(Report {
        command: "conditions",
        options: opts.to_json(),
        outcome: if rep.passed { Outcome::Pass } else { Outcome::Fail },
        body: json!({
            "ring": ring_summary(&r),
            "frame_source": source,
            "empty_family": rep.empty_family,
            "condition_ii": {
                "passed": rep.condition_ii.passed,
                "witness": render_optional(&r, &rep.condition_ii.witness, "M"),
            },
            "condition_iii": rep.condition_iii.as_ref().map(|c| json!({
                "passed": c.passed,
                "witness": render_optional(&r, &c.witness, "M"),
            })),
            "frames": frames_json,
            "passed": rep.passed,
            "prime": prime,
        }),
    })
}

fn target_of(doc: &GrdfDocument, source: &GammaRing) -> Result<GammaRing> {
    Ok(doc.target_ring()?.unwrap_or_else(|| source.clone()))
}

pub fn verify_iso(doc: &GrdfDocument, opts: &Options) -> Result<Report> {
    let src = doc.ring()?;
    let tgt = target_of(doc, &src)?;
    let pairs = doc.map_pairs(&src, &tgt)?;
    if pairs.is_empty() {
        return Err(GammaError::Format("the document lists no maps".into()));
    }
    let mut outcome = Outcome::Pass;
    let mut out = Vec::new();
    for pair in &pairs {
        let mult = verify_n_multiplicative(&src, &tgt, pair, opts.n, opts.verify())?;
        let add = verify_additive_pair(&src, &tgt, pair);
        outcome = outcome.merge(completeness_outcome(&mult));
        if opts.require_additive && !add.passed {
            outcome = Outcome::Fail;
        }
        out.push(json!({
            "phi": pair.phi,
            "psi": pair.psi,
            "multiplicative": verification_json(&src, &mult, &product_pattern(opts.n)),
            "additive": verification_json(&src, &add, "MM"),
        }));
    }
    Ok(Report {
        command: "verify-iso",
        options: opts.to_json(),
        outcome,
        body: json!({ "source": ring_summary(&src), "target": ring_summary(&tgt), "maps": out }),
    })
}

pub fn search_iso(doc: &GrdfDocument, opts: &Options) -> Result<Report> {
    let src = doc.ring()?;
    let tgt = target_of(doc, &src)?;
    let found = search_n_multiplicative_isos(&src, &tgt, opts.search())?;
    let mut outcome = search_outcome(&found);
    let mut results = Vec::new();
    let mut additive = 0;
    let mut witness = Value::Null;
    for pair in &found.results {
        let add = verify_additive_pair(&src, &tgt, pair);
        if add.passed {
            additive += 1;
        } else if witness.is_null() {
            witness = json!({
                "phi": pair.phi,
                "psi": pair.psi,
                "additivity": render_optional(&src, &add.witness, "MM"),
            });
        }
        results.push(json!({ "phi": pair.phi, "psi": pair.psi, "additive": add.passed }));
    }
    if opts.require_additive && additive < found.results.len() {
        outcome = Outcome::Fail;
    }
    Ok(Report {
        command: "search-iso",
        options: opts.to_json(),
        outcome,
        body: json!({
            "source": ring_summary(&src),
            "target": ring_summary(&tgt),
            "status": found.status,
            "nodes": found.nodes,
            "count": found.results.len(),
            "additive_count": additive,
            "non_additive_witness": witness,
            "results": results,
        }),
    })
}

pub fn verify_derivation(doc: &GrdfDocument, opts: &Options) -> Result<Report> {
    let r = doc.ring()?;
    let ds = doc.derivation_tables(&r)?;
    if ds.is_empty() {
        return Err(GammaError::Format("the document lists no derivations".into()));
    }
    let mut outcome = Outcome::Pass;
    let mut out = Vec::new();
    for d in &ds {
        let der = verify_n_derivation(&r, d, opts.n, opts.verify())?;
        let add = verify_additive_derivation(&r, d);
        outcome = outcome.merge(completeness_outcome(&der));
        if opts.require_additive && !add.passed {
            outcome = Outcome::Fail;
        }
        out.push(json!({
            "d": d.d,
            "derivation": verification_json(&r, &der, &product_pattern(opts.n)),
            "additive": verification_json(&r, &add, "MM"),
        }));
    }
    Ok(Report {
        command: "verify-derivation",
        options: opts.to_json(),
        outcome,
        body: json!({ "ring": ring_summary(&r), "derivations": out }),
    })
}

pub fn search_derivations(doc: &GrdfDocument, opts: &Options) -> Result<Report> {
    let r = doc.ring()?;
    let found = search_n_derivations(&r, opts.search())?;
    let mut outcome = search_outcome(&found);
    let mut results = Vec::new();
    let mut additive = 0;
    let mut witness = Value::Null;
    for d in &found.results {
        let add = verify_additive_derivation(&r, d);
        if add.passed {
            additive += 1;
        } else if witness.is_null() {
            witness = json!({ "d": d.d, "additivity": render_optional(&r, &add.witness, "MM") });
        }
        results.push(json!({ "d": d.d, "additive": add.passed, "zero": d.d.iter().all(|&v| v == 0) }));
    }
    if opts.require_additive && additive < found.results.len() {
        outcome = Outcome::Fail;
    }
    Ok(Report {
        command: "search-derivations",
        options: opts.to_json(),
        outcome,
        body: json!({
            "ring": ring_summary(&r),
            "status": found.status,
            "nodes": found.nodes,
            "count": found.results.len(),
            "additive_count": additive,
            "non_additive_witness": witness,
            "results": results,
        }),
    })
}

fn pipeline_json(r: &GammaRing, rep: &PipelineReport) -> Value {
    let c = &rep.conclusion;
    let k = rep.k;
    let mut vi = String::new();
    let mut vii = String::from("MGM");
    for _ in 0..k {
        vi.push_str("MG");
        vii.push_str("GM");
    }
    vi.push_str("MGM");
    json!({
        "n": rep.n,
        "k": k,
        "multiplicative": verification_json(r, &rep.multiplicative, &product_pattern(rep.n)),
        "additive": verification_json(r, &rep.additive, "MM"),
        "defect_is_zero": rep.defect_is_zero,
        "conclusion": {
            "status": c.status,
            "reason": c.reason,
            "conditions_passed": c.conditions.passed,
            "hypotheses": c.hypotheses.as_ref().map(|h| json!({
                "exact_pass": h.exact_pass(),
                "v": verification_json(r, &h.v, "MGM"),
                "vi": verification_json(r, &h.vi, &vi),
                "vii": verification_json(r, &h.vii, &vii),
            })),
            "f_is_zero": c.f_is_zero,
            "f_first_nonzero": c.f_first_nonzero,
        },
        "claims": rep.claims,
    })
}

fn conclusion_outcome(rep: &PipelineReport) -> Outcome {
    match rep.conclusion.status {
        ConclusionStatus::Confirmed => Outcome::Pass,
        ConclusionStatus::PreconditionFailed => Outcome::Fail,
    }
}

/// Precondition failures of one map are reported inline; everything else aborts.
fn pipeline_entry(r: &GammaRing, run: Result<PipelineReport>, outcome: &mut Outcome) -> Result<Value> {
    match run {
        Ok(rep) => {
            *outcome = outcome.merge(conclusion_outcome(&rep));
            Ok(pipeline_json(r, &rep))
        }
        Err(GammaError::Precondition(msg)) => {
            *outcome = Outcome::Fail;
            Ok(json!({ "precondition_failed": msg }))
        }
        Err(e) => Err(e),
    }
}

pub fn theorem(doc: &GrdfDocument, opts: &Options) -> Result<Report> {
    let src = doc.ring()?;
    let tgt = target_of(doc, &src)?;
    let pairs = doc.map_pairs(&src, &tgt)?;
    let ds = doc.derivation_tables(&src)?;
    if pairs.is_empty() && ds.is_empty() {
        return Err(GammaError::Format("theorem needs maps or derivations in the document".into()));
    }
    let (frames, source) = frames_for(doc, &src)?;
    let cfg = opts.pipeline();
    let mut outcome = Outcome::Pass;
    let mut maps = Vec::new();
    for pair in &pairs {
        let run = run_additivity_pipeline(&src, &tgt, &frames, pair, cfg);
        let mut entry = pipeline_entry(&src, run, &mut outcome)?;
        entry["phi"] = json!(pair.phi);
        entry["psi"] = json!(pair.psi);
        maps.push(entry);
    }
    let mut ders = Vec::new();
    for d in &ds {
        let run = run_derivation_pipeline(&src, &frames, d, cfg);
        let mut entry = pipeline_entry(&src, run, &mut outcome)?;
        entry["d"] = json!(d.d);
        ders.push(entry);
    }
    Ok(Report {
        command: "theorem",
        options: opts.to_json(),
        outcome,
        body: json!({
            "ring": ring_summary(&src),
            "frame_source": source,
            "frame_count": frames.len(),
            "maps": maps,
            "derivations": ders,
        }),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Family {
    Trivial,
    Matrix,
}

#[derive(Debug, Clone)]
pub struct HuntOptions {
    pub family: Family,
    pub n: usize,
    pub budget: u64,
    pub max_order: u64,
    pub gamma: Vec<u64>,
    pub max_cells: usize,
    pub modulus: u64,
    pub witness_limit: usize,
}

pub fn hunt(opts: &HuntOptions) -> Result<Report> {
    let family = match opts.family {
        Family::Trivial => trivial_family(opts.max_order, &opts.gamma)?,
        Family::Matrix => matrix_family(opts.modulus, opts.max_cells)?,
    };
    let mut cfg = HuntConfig::new(opts.n);
    cfg.node_budget = opts.budget;
    cfg.witness_limit = opts.witness_limit;
    let survey = hunt_counterexamples(&family, cfg)?;
    let outcome = if survey.partial { Outcome::Partial } else { Outcome::Pass };
    let family_name = match opts.family {
        Family::Trivial => "trivial",
        Family::Matrix => "matrix",
    };
    Ok(Report {
        command: "hunt",
        options: json!({
            "family": family_name,
            "n": opts.n,
            "budget": opts.budget,
            "max_order": opts.max_order,
            "gamma": opts.gamma,
            "max_cells": opts.max_cells,
            "modulus": opts.modulus,
            "witness_limit": opts.witness_limit,
        }),
        outcome,
        body: serde_json::to_value(&survey).map_err(|e| GammaError::Format(e.to_string()))?,
    })
}
