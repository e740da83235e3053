//! Dense-table representation of finite Gamma-rings and their constructors.

use std::sync::{Arc, OnceLock};

use crate::error::{GammaError, Result};
use crate::group::{FiniteAbelianGroup, InvariantFactors};

/// Largest product table the crate will materialize.
pub const MAX_TABLE_ENTRIES: u128 = 1 << 28;

/// Shape of a matrix Gamma-ring: `M` is `rows x cols` over `Z_modulus`,
/// `Gamma` is `cols x rows`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MatrixShape {
    pub modulus: u64,
    pub rows: usize,
    pub cols: usize,
}

/// A finite Gamma-ring stored as index tables.
///
/// `mu[(x * |Gamma| + g) * |M| + y]` is the index of `x g y`. The optional
/// Nobusawa product `nu[(a * |M| + x) * |Gamma| + b]` is the index of `a x b`
/// in `Gamma`.
#[derive(Debug, Clone)]
pub struct GammaRing {
    m: Arc<FiniteAbelianGroup>,
    gamma: Arc<FiniteAbelianGroup>,
    mu: Vec<u32>,
    nu: Option<Vec<u32>>,
    matrix: Option<MatrixShape>,
    barnes: OnceLock<bool>,
}

impl PartialEq for GammaRing {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.gamma == other.gamma && self.mu == other.mu && self.nu == other.nu
    }
}

impl Eq for GammaRing {}

fn table_len(m: usize, g: usize) -> Result<usize> {
    let len = (m as u128) * (m as u128) * (g as u128);
    if len > MAX_TABLE_ENTRIES {
        return Err(GammaError::BudgetExceeded {
            needed: len,
            cap: MAX_TABLE_ENTRIES,
        });
    }
    Ok(len as usize)
}

impl GammaRing {
    /// Stores a product table without checking any axiom.
    pub fn from_table(
        m: FiniteAbelianGroup,
        gamma: FiniteAbelianGroup,
        mu: Vec<usize>,
    ) -> Result<Self> {
        let expected = table_len(m.order(), gamma.order())?;
        if mu.len() != expected {
            return Err(GammaError::TableSize {
                expected,
                got: mu.len(),
            });
        }
        let bound = m.order();
        let mu = mu
            .into_iter()
            .enumerate()
            .map(|(position, value)| {
                if value >= bound {
                    Err(GammaError::EntryOutOfRange {
                        position,
                        value,
                        bound,
                    })
                } else {
                    Ok(value as u32)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GammaRing {
            m: Arc::new(m),
            gamma: Arc::new(gamma),
            mu,
            nu: None,
            matrix: None,
            barnes: OnceLock::new(),
        })
    }

    /// Builds a ring from a product function evaluated on every triple.
    pub fn from_fn<F>(m: FiniteAbelianGroup, gamma: FiniteAbelianGroup, f: F) -> Result<Self>
    where
        F: Fn(usize, usize, usize) -> usize,
    {
        let (mo, go) = (m.order(), gamma.order());
        let mut mu = Vec::with_capacity(table_len(mo, go)?);
        for x in 0..mo {
            for g in 0..go {
                for y in 0..mo {
                    mu.push(f(x, g, y));
                }
            }
        }
        Self::from_table(m, gamma, mu)
    }

    /// Attaches a Nobusawa product table `Gamma x M x Gamma -> Gamma`.
    pub fn with_nu(mut self, nu: Vec<usize>) -> Result<Self> {
        let (mo, go) = (self.m.order(), self.gamma.order());
        let expected = go * mo * go;
        if nu.len() != expected {
            return Err(GammaError::TableSize {
                expected,
                got: nu.len(),
            });
        }
        let nu = nu
            .into_iter()
            .enumerate()
            .map(|(position, value)| {
                if value >= go {
                    Err(GammaError::EntryOutOfRange {
                        position,
                        value,
                        bound: go,
                    })
                } else {
                    Ok(value as u32)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        self.nu = Some(nu);
        Ok(self)
    }

    /// `M` = `rows x cols` matrices over `Z_k`, `Gamma` = `cols x rows`
    /// matrices, product = matrix multiplication. Includes the Nobusawa
    /// product `Gamma x M x Gamma -> Gamma`.
    pub fn matrix(modulus: u64, rows: usize, cols: usize) -> Result<Self> {
        if modulus < 2 {
            return Err(GammaError::InvalidFactor(modulus));
        }
        if rows == 0 || cols == 0 {
            return Err(GammaError::Precondition(
                "matrix dimensions must be positive".into(),
            ));
        }
        let m = FiniteAbelianGroup::new(InvariantFactors(vec![modulus; rows * cols]))?;
        let gamma = FiniteAbelianGroup::new(InvariantFactors(vec![modulus; cols * rows]))?;
        let (mo, go) = (m.order(), gamma.order());
        table_len(mo, go)?;
        let mats: Vec<Vec<u64>> = (0..mo).map(|i| m.residues(i)).collect();
        let gams: Vec<Vec<u64>> = (0..go).map(|i| gamma.residues(i)).collect();
        let encode = |entries: &[u64], grp: &FiniteAbelianGroup| -> usize {
            let mut idx = 0usize;
            for (&e, &d) in entries.iter().zip(grp.invariants().factors()) {
                idx = idx * d as usize + e as usize;
            }
            idx
        };
        // x (r x c) * g (c x r) -> r x r
        let mut xg: Vec<Vec<u64>> = Vec::with_capacity(mo * go);
        for x in &mats {
            for g in &gams {
                xg.push(matmul(x, g, rows, cols, rows, modulus));
            }
        }
        let mut mu = Vec::with_capacity(mo * go * mo);
        for p in &xg {
            for y in &mats {
                mu.push(encode(&matmul(p, y, rows, rows, cols, modulus), &m));
            }
        }
        // g (c x r) * x (r x c) -> c x c, then * b (c x r)
        let mut nu = Vec::with_capacity(go * mo * go);
        for g in &gams {
            for x in &mats {
                let gx = matmul(g, x, cols, rows, cols, modulus);
                for b in &gams {
                    nu.push(encode(&matmul(&gx, b, cols, cols, rows, modulus), &gamma));
                }
            }
        }
        let mut ring = Self::from_table(m, gamma, mu)?.with_nu(nu)?;
        ring.matrix = Some(MatrixShape {
            modulus,
            rows,
            cols,
        });
        Ok(ring)
    }

    /// Ring with identically zero product.
    pub fn trivial(m: FiniteAbelianGroup, gamma: FiniteAbelianGroup) -> Result<Self> {
        Self::from_fn(m, gamma, |_, _, _| 0)
    }

    /// Componentwise product of two rings.
    pub fn direct_product(a: &GammaRing, b: &GammaRing) -> Result<Self> {
        let cat = |x: &FiniteAbelianGroup, y: &FiniteAbelianGroup| {
            let mut f = x.invariants().factors().to_vec();
            f.extend_from_slice(y.invariants().factors());
            FiniteAbelianGroup::new(InvariantFactors(f))
        };
        let m = cat(a.m_group(), b.m_group())?;
        let gamma = cat(a.gamma_group(), b.gamma_group())?;
        let (mb, gb) = (b.m_order(), b.gamma_order());
        Self::from_fn(m, gamma, |x, g, y| {
            let left = a.mul(x / mb, g / gb, y / mb);
            let right = b.mul(x % mb, g % gb, y % mb);
            left * mb + right
        })
    }

    pub fn m_group(&self) -> &FiniteAbelianGroup {
        &self.m
    }

    pub fn gamma_group(&self) -> &FiniteAbelianGroup {
        &self.gamma
    }

    pub fn m_order(&self) -> usize {
        self.m.order()
    }

    pub fn gamma_order(&self) -> usize {
        self.gamma.order()
    }

    pub fn matrix_shape(&self) -> Option<MatrixShape> {
        self.matrix
    }

    pub fn has_nu(&self) -> bool {
        self.nu.is_some()
    }

    /// `x g y`.
    #[inline]
    pub fn mul(&self, x: usize, g: usize, y: usize) -> usize {
        self.mu[(x * self.gamma.order() + g) * self.m.order() + y] as usize
    }

    /// Nobusawa product `a x b`, if present.
    #[inline]
    pub fn nu(&self, a: usize, x: usize, b: usize) -> Option<usize> {
        let (mo, go) = (self.m.order(), self.gamma.order());
        self.nu.as_ref().map(|t| t[(a * mo + x) * go + b] as usize)
    }

    #[inline]
    pub fn add(&self, a: usize, b: usize) -> usize {
        self.m.add_idx(a, b)
    }

    #[inline]
    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.m.sub_idx(a, b)
    }

    #[inline]
    pub fn neg(&self, a: usize) -> usize {
        self.m.neg_idx(a)
    }

    /// Product table as plain indices, in `(x, g, y)` lexicographic order.
    pub fn mu_table(&self) -> Vec<usize> {
        self.mu.iter().map(|&v| v as usize).collect()
    }

    pub fn nu_table(&self) -> Option<Vec<usize>> {
        self.nu
            .as_ref()
            .map(|t| t.iter().map(|&v| v as usize).collect())
    }

    /// Copy of the ring with one product entry overwritten. The copy loses its
    /// matrix shape and Nobusawa product.
    pub fn with_product_entry(&self, x: usize, g: usize, y: usize, value: usize) -> Result<Self> {
        self.m.check_index(x)?;
        self.gamma.check_index(g)?;
        self.m.check_index(y)?;
        self.m.check_index(value)?;
        let mut mu = self.mu_table();
        mu[(x * self.gamma.order() + g) * self.m.order() + y] = value;
        Self::from_table((*self.m).clone(), (*self.gamma).clone(), mu)
    }

    /// Whether all Barnes axioms hold; computed once and cached.
    pub fn is_barnes(&self) -> Result<bool> {
        if let Some(&v) = self.barnes.get() {
            return Ok(v);
        }
        let reports = crate::axioms::check_barnes_axioms(self)?;
        let ok = reports.iter().all(|r| r.passed);
        let _ = self.barnes.set(ok);
        Ok(ok)
    }

    pub fn require_barnes(&self) -> Result<()> {
        if self.is_barnes()? {
            Ok(())
        } else {
            Err(GammaError::Precondition(
                "ring does not satisfy the Barnes axioms".into(),
            ))
        }
    }

    /// Human-readable rendering of an `M` element: residues, plus the matrix
    /// for matrix rings.
    pub fn render_m(&self, x: usize) -> String {
        let res = self.m.residues(x);
        match self.matrix {
            Some(s) => render_matrix(&res, s.rows, s.cols),
            None => format!("{res:?}"),
        }
    }

    pub fn render_gamma(&self, g: usize) -> String {
        let res = self.gamma.residues(g);
        match self.matrix {
            Some(s) => render_matrix(&res, s.cols, s.rows),
            None => format!("{res:?}"),
        }
    }

    /// Index of the matrix with the given row-major entries (matrix rings only).
    pub fn m_from_entries(&self, entries: &[u64]) -> Result<usize> {
        self.m
            .index_of(&crate::group::GroupElement::new(entries.to_vec()))
    }

    pub fn gamma_from_entries(&self, entries: &[u64]) -> Result<usize> {
        self.gamma
            .index_of(&crate::group::GroupElement::new(entries.to_vec()))
    }
}

fn matmul(a: &[u64], b: &[u64], n: usize, k: usize, m: usize, modulus: u64) -> Vec<u64> {
    let mut out = vec![0u64; n * m];
    for i in 0..n {
        for j in 0..m {
            let mut s = 0u64;
            for t in 0..k {
                s = (s + a[i * k + t] * b[t * m + j]) % modulus;
            }
            out[i * m + j] = s;
        }
    }
    out
}

fn render_matrix(entries: &[u64], rows: usize, cols: usize) -> String {
    let body: Vec<String> = (0..rows)
        .map(|r| {
            let row: Vec<String> = entries[r * cols..(r + 1) * cols]
                .iter()
                .map(|e| e.to_string())
                .collect();
            row.join(" ")
        })
        .collect();
    format!("[{}]", body.join("; "))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(f: &[u64]) -> FiniteAbelianGroup {
        FiniteAbelianGroup::from_factors(f).unwrap()
    }

    #[test]
    fn all_zero_table_is_accepted() {
        let r = GammaRing::from_table(z(&[2]), z(&[2]), vec![0; 8]).unwrap();
        assert_eq!(r.mul(1, 1, 1), 0);
    }

    #[test]
    fn malformed_entry_is_rejected() {
        let mut mu = vec![0; 8];
        mu[3] = 2;
        let err = GammaRing::from_table(z(&[2]), z(&[2]), mu).unwrap_err();
        assert!(matches!(err, GammaError::EntryOutOfRange { value: 2, .. }));
        let err = GammaRing::from_table(z(&[2]), z(&[2]), vec![0; 7]).unwrap_err();
        assert!(matches!(err, GammaError::TableSize { expected: 8, .. }));
    }

    #[test]
    fn matrix_orders() {
        let r = GammaRing::matrix(2, 2, 2).unwrap();
        assert_eq!((r.m_order(), r.gamma_order()), (16, 16));
        let r = GammaRing::matrix(2, 1, 2).unwrap();
        assert_eq!((r.m_order(), r.gamma_order()), (4, 4));
    }

    #[test]
    fn matrix_round_trips_through_table_form() {
        let r = GammaRing::matrix(2, 2, 2).unwrap();
        let copy = GammaRing::from_table(
            r.m_group().clone(),
            r.gamma_group().clone(),
            r.mu_table(),
        )
        .unwrap()
        .with_nu(r.nu_table().unwrap())
        .unwrap();
        assert_eq!(copy, r);
    }

    #[test]
    fn matrix_units_multiply() {
        let r = GammaRing::matrix(2, 2, 2).unwrap();
        let e11 = r.m_from_entries(&[1, 0, 0, 0]).unwrap();
        let e12 = r.m_from_entries(&[0, 1, 0, 0]).unwrap();
        let i = r.gamma_from_entries(&[1, 0, 0, 1]).unwrap();
        assert_eq!(r.mul(e11, i, e12), e12);
        assert_eq!(r.mul(e12, i, e11), 0);
        assert_eq!(r.render_m(e12), "[0 1; 0 0]");
    }

    #[test]
    fn direct_product_indexing() {
        let a = GammaRing::matrix(2, 1, 1).unwrap();
        let b = GammaRing::matrix(3, 1, 1).unwrap();
        let p = GammaRing::direct_product(&a, &b).unwrap();
        assert_eq!(p.m_order(), 6);
        // (1,2) * (1,1) * (1,2) = (1, 4 mod 3 = 1)
        assert_eq!(p.mul(3 + 2, 3 + 1, 3 + 2), 3 + 1);
    }

    #[test]
    fn patched_entry() {
        let r = GammaRing::matrix(2, 1, 1).unwrap();
        let p = r.with_product_entry(1, 1, 1, 0).unwrap();
        assert_eq!(p.mul(1, 1, 1), 0);
        assert!(!p.has_nu());
    }
}
