//! GRDF, the JSON description format for Gamma-rings, frames and maps.
//!
//! ```json
//! {
//!   "m_group": {"invariants": [2]},
//!   "gamma_group": {"invariants": [2]},
//!   "product": {"type": "table", "entries": [[[0, 0], [0, 0]], [[0, 0], [0, 1]]]},
//!   "frames": [{"e": 1, "gamma1": 1, "mode": "canonical"}],
//!   "maps": [{"phi": [0, 1], "psi": [0, 1]}]
//! }
//! ```
//!
//! `entries[x][g][y]` is the index of `x g y`; `nu[a][x][b]` the index of
//! `a x b` in Gamma. A `{"type": "matrix", "mod", "rows", "cols"}` product
//! derives both groups and the Nobusawa product, so none of them may be given.
//! Custom frames carry `left_f[b][a]` and `right_f[a][b]`. An optional
//! `target` ring (same ring fields) is the codomain of the maps; without it
//! maps go from the ring to itself.
//!
//! Canonical text is `serde_json` pretty output plus a trailing newline, so
//! parsing and re-emitting a canonical document reproduces it byte for byte.

use serde::{Deserialize, Serialize};

use crate::axioms::find_unities;
use crate::error::{GammaError, Result};
use crate::group::FiniteAbelianGroup;
use crate::maps::{DerivationTable, MapPair};
use crate::peirce::IdempotentFrame;
use crate::ring::GammaRing;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub invariants: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ProductSpec {
    Table {
        entries: Vec<Vec<Vec<usize>>>,
    },
    Matrix {
        #[serde(rename = "mod")]
        modulus: u64,
        rows: usize,
        cols: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameMode {
    Canonical,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameSpec {
    pub e: usize,
    pub gamma1: usize,
    pub mode: FrameMode,
    /// Canonical mode: the unity to use; the least gamma1-unity if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unity: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left_f: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right_f: Option<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub phi: Vec<usize>,
    pub psi: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DerivationSpec {
    pub d: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_group: Option<GroupSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_group: Option<GroupSpec>,
    pub product: ProductSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<Vec<Vec<Vec<usize>>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrdfDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_group: Option<GroupSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_group: Option<GroupSpec>,
    pub product: ProductSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<Vec<Vec<Vec<usize>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<RingSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub frames: Vec<FrameSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub maps: Vec<MapSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub derivations: Vec<DerivationSpec>,
}

fn flatten3(t: &[Vec<Vec<usize>>], dims: (usize, usize, usize), what: &str) -> Result<Vec<usize>> {
    let shape_err = || GammaError::Format(format!("{what} must be a {} x {} x {} array", dims.0, dims.1, dims.2));
    if t.len() != dims.0 {
        return Err(shape_err());
    }
    let mut out = Vec::with_capacity(dims.0 * dims.1 * dims.2);
    for plane in t {
        if plane.len() != dims.1 {
            return Err(shape_err());
        }
        for row in plane {
            if row.len() != dims.2 {
                return Err(shape_err());
            }
            out.extend(row);
        }
    }
    Ok(out)
}

fn flatten2(t: &[Vec<usize>], dims: (usize, usize), what: &str) -> Result<Vec<usize>> {
    if t.len() != dims.0 || t.iter().any(|r| r.len() != dims.1) {
        return Err(GammaError::Format(format!("{what} must be a {} x {} array", dims.0, dims.1)));
    }
    Ok(t.concat())
}

fn nest3(flat: &[usize], dims: (usize, usize, usize)) -> Vec<Vec<Vec<usize>>> {
    flat.chunks(dims.1 * dims.2)
        .map(|plane| plane.chunks(dims.2).map(|r| r.to_vec()).collect())
        .collect()
}

fn nest2(flat: &[usize], cols: usize) -> Vec<Vec<usize>> {
    flat.chunks(cols).map(|r| r.to_vec()).collect()
}

fn build_ring(
    m_group: &Option<GroupSpec>,
    gamma_group: &Option<GroupSpec>,
    product: &ProductSpec,
    nu: &Option<Vec<Vec<Vec<usize>>>>,
) -> Result<GammaRing> {
    match product {
        ProductSpec::Matrix { modulus, rows, cols } => {
            if m_group.is_some() || gamma_group.is_some() || nu.is_some() {
                return Err(GammaError::Format(
                    "a matrix product derives m_group, gamma_group and nu; do not give them".into(),
                ));
            }
            GammaRing::matrix(*modulus, *rows, *cols)
        }
        ProductSpec::Table { entries } => {
            let (Some(m), Some(g)) = (m_group, gamma_group) else {
                return Err(GammaError::Format("a table product needs m_group and gamma_group".into()));
            };
            let m = FiniteAbelianGroup::from_factors(&m.invariants)?;
            let g = FiniteAbelianGroup::from_factors(&g.invariants)?;
            let (mo, go) = (m.order(), g.order());
            let mu = flatten3(entries, (mo, go, mo), "product entries")?;
            let ring = GammaRing::from_table(m, g, mu)?;
            match nu {
                Some(nu) => ring.with_nu(flatten3(nu, (go, mo, go), "nu")?),
                None => Ok(ring),
            }
        }
    }
}

fn ring_fields(r: &GammaRing) -> (Option<GroupSpec>, Option<GroupSpec>, ProductSpec, Option<Vec<Vec<Vec<usize>>>>) {
    if let Some(s) = r.matrix_shape() {
        return (
            None,
            None,
            ProductSpec::Matrix {
                modulus: s.modulus,
                rows: s.rows,
                cols: s.cols,
            },
            None,
        );
    }
    let (mo, go) = (r.m_order(), r.gamma_order());
    (
        Some(GroupSpec {
            invariants: r.m_group().invariants().factors().to_vec(),
        }),
        Some(GroupSpec {
            invariants: r.gamma_group().invariants().factors().to_vec(),
        }),
        ProductSpec::Table {
            entries: nest3(&r.mu_table(), (mo, go, mo)),
        },
        r.nu_table().map(|nu| nest3(&nu, (go, mo, go))),
    )
}

impl RingSpec {
    pub fn from_ring(r: &GammaRing) -> Self {
        let (m_group, gamma_group, product, nu) = ring_fields(r);
        RingSpec {
            m_group,
            gamma_group,
            product,
            nu,
        }
    }

    pub fn build(&self) -> Result<GammaRing> {
        build_ring(&self.m_group, &self.gamma_group, &self.product, &self.nu)
    }
}

impl GrdfDocument {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| GammaError::Format(e.to_string()))
    }

    /// Canonical text form.
    pub fn to_canonical_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("GRDF documents always serialize");
        s.push('\n');
        s
    }

    /// Document describing `r` alone.
    pub fn from_ring(r: &GammaRing) -> Self {
        let (m_group, gamma_group, product, nu) = ring_fields(r);
        GrdfDocument {
            m_group,
            gamma_group,
            product,
            nu,
            target: None,
            frames: Vec::new(),
            maps: Vec::new(),
            derivations: Vec::new(),
        }
    }

    pub fn ring(&self) -> Result<GammaRing> {
        build_ring(&self.m_group, &self.gamma_group, &self.product, &self.nu)
    }

    /// The codomain for maps: the `target` ring if given, else `None`.
    pub fn target_ring(&self) -> Result<Option<GammaRing>> {
        self.target.as_ref().map(RingSpec::build).transpose()
    }

    /// Builds and validates every frame on `r`.
    pub fn frames<'r>(&self, r: &'r GammaRing) -> Result<Vec<IdempotentFrame<'r>>> {
        self.frames.iter().map(|f| build_frame(r, f)).collect()
    }

    pub fn map_pairs(&self, source: &GammaRing, target: &GammaRing) -> Result<Vec<MapPair>> {
        self.maps
            .iter()
            .map(|m| MapPair::new(source, target, m.phi.clone(), m.psi.clone()))
            .collect()
    }

    pub fn derivation_tables(&self, r: &GammaRing) -> Result<Vec<DerivationTable>> {
        self.derivations.iter().map(|d| DerivationTable::new(r, d.d.clone())).collect()
    }

    pub fn push_frame(&mut self, frame: &IdempotentFrame<'_>) {
        let r = frame.ring();
        self.frames.push(FrameSpec {
            e: frame.e(),
            gamma1: frame.gamma1(),
            mode: FrameMode::Custom,
            unity: None,
            left_f: Some(nest2(&frame.left_table(), r.m_order())),
            right_f: Some(nest2(&frame.right_table(), r.gamma_order())),
        });
    }
}

fn build_frame<'r>(r: &'r GammaRing, f: &FrameSpec) -> Result<IdempotentFrame<'r>> {
    match f.mode {
        FrameMode::Canonical => {
            if f.left_f.is_some() || f.right_f.is_some() {
                return Err(GammaError::Format("canonical frames take no left_f/right_f tables".into()));
            }
            r.gamma_group().check_index(f.gamma1)?;
            let unity = match f.unity {
                Some(u) => u,
                None => find_unities(r)
                    .into_iter()
                    .find(|u| u.gamma == f.gamma1)
                    .map(|u| u.one)
                    .ok_or_else(|| GammaError::InvalidFrame(format!("no {}-unity for a canonical frame", f.gamma1)))?,
            };
            IdempotentFrame::canonical(r, f.e, f.gamma1, unity)
        }
        FrameMode::Custom => {
            let (Some(left), Some(right)) = (&f.left_f, &f.right_f) else {
                return Err(GammaError::Format("custom frames need left_f and right_f".into()));
            };
            if f.unity.is_some() {
                return Err(GammaError::Format("custom frames take no unity".into()));
            }
            let (mo, go) = (r.m_order(), r.gamma_order());
            let left = flatten2(left, (go, mo), "left_f")?;
            let right = flatten2(right, (mo, go), "right_f")?;
            IdempotentFrame::custom(r, f.e, f.gamma1, left, right)
        }
    }
}
