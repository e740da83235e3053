//! Brute-force oracles and the small-ring corpus shared by integration tests.
//! Everything here works from raw product lookups and plain enumeration.

#![allow(dead_code)]

use gammaring::{FiniteAbelianGroup, GammaRing};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn group(factors: &[u64]) -> FiniteAbelianGroup {
    FiniteAbelianGroup::from_factors(factors).unwrap()
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut out = vec![p.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
        out.push(p.clone());
    }
}

/// Literal check of `phi(x1 g1 ... xn) = phi(x1) psi(g1) ... phi(xn)` over
/// every tuple, products left-associated.
pub fn literal_multiplicative(src: &GammaRing, tgt: &GammaRing, phi: &[usize], psi: &[usize], n: usize) -> bool {
    fn rec(src: &GammaRing, tgt: &GammaRing, phi: &[usize], psi: &[usize], left: usize, v: usize, w: usize) -> bool {
        if left == 0 {
            return phi[v] == w;
        }
        for g in 0..src.gamma_order() {
            for x in 0..src.m_order() {
                if !rec(src, tgt, phi, psi, left - 1, src.mul(v, g, x), tgt.mul(w, psi[g], phi[x])) {
                    return false;
                }
            }
        }
        true
    }
    (0..src.m_order()).all(|x| rec(src, tgt, phi, psi, n - 1, x, phi[x]))
}

/// Literal Leibniz check, each summand its own left-associated product.
pub fn literal_derivation(r: &GammaRing, d: &[usize], n: usize) -> bool {
    fn rec(r: &GammaRing, d: &[usize], left: usize, prod: usize, terms: &[usize]) -> bool {
        if left == 0 {
            let sum = terms.iter().fold(0, |acc, &t| r.add(acc, t));
            return d[prod] == sum;
        }
        for g in 0..r.gamma_order() {
            for x in 0..r.m_order() {
                let mut next: Vec<usize> = terms.iter().map(|&t| r.mul(t, g, x)).collect();
                next.push(r.mul(prod, g, d[x]));
                if !rec(r, d, left - 1, r.mul(prod, g, x), &next) {
                    return false;
                }
            }
        }
        true
    }
    (0..r.m_order()).all(|x| rec(r, d, n - 1, x, &[d[x]]))
}

pub fn literal_additive(src: &GammaRing, tgt: &GammaRing, phi: &[usize]) -> bool {
    let m = src.m_order();
    (0..m).all(|x| (0..m).all(|y| phi[src.add(x, y)] == tgt.add(phi[x], phi[y])))
}

/// Filtration oracle: every bijection pair that passes the literal check.
pub fn brute_isos(src: &GammaRing, tgt: &GammaRing, n: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    if src.m_order() != tgt.m_order() || src.gamma_order() != tgt.gamma_order() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let gammas = permutations(src.gamma_order());
    for phi in permutations(src.m_order()) {
        for psi in &gammas {
            if literal_multiplicative(src, tgt, &phi, psi, n) {
                out.push((phi.clone(), psi.clone()));
            }
        }
    }
    out.sort();
    out
}

/// Every self-map of `M` passing the literal Leibniz check.
pub fn brute_derivations(r: &GammaRing, n: usize) -> Vec<Vec<usize>> {
    let m = r.m_order();
    let total = m.pow(m as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut d = vec![0; m];
        let mut c = code;
        for slot in d.iter_mut().rev() {
            *slot = c % m;
            c /= m;
        }
        if literal_derivation(r, &d, n) {
            out.push(d);
        }
    }
    out
}

pub fn label(name: impl Into<String>, r: GammaRing) -> (String, GammaRing) {
    (name.into(), r)
}

/// `F4 = F2[a]/(a^2 + a + 1)`, index `2*hi + lo` for `hi a + lo`.
fn f4_mul(x: usize, y: usize) -> usize {
    let (a, b) = (x >> 1, x & 1);
    let (c, d) = (y >> 1, y & 1);
    let hi = (a & c) ^ (a & d) ^ (b & c);
    let lo = (a & c) ^ (b & d);
    (hi << 1) | lo
}

/// Structured rings with `|M| <= 4` and `|Gamma| <= 2`.
pub fn small_structured() -> Vec<(String, GammaRing)> {
    let mut out = Vec::new();
    let ms: [&[u64]; 5] = [&[], &[2], &[3], &[4], &[2, 2]];
    let gs: [&[u64]; 2] = [&[], &[2]];
    for m in ms {
        for g in gs {
            out.push(label(format!("trivial M={m:?} G={g:?}"), GammaRing::trivial(group(m), group(g)).unwrap()));
        }
    }
    out.push(label("matrix(2,1,1)", GammaRing::matrix(2, 1, 1).unwrap()));
    out.push(label(
        "Z4 with 2gxy",
        GammaRing::from_fn(group(&[4]), group(&[2]), |x, g, y| (2 * g * x * y) % 4).unwrap(),
    ));
    out.push(label(
        "F4 over Z2",
        GammaRing::from_fn(group(&[2, 2]), group(&[2]), |x, g, y| if g == 1 { f4_mul(x, y) } else { 0 }).unwrap(),
    ));
    out.push(label(
        "F2 x F2 over Z2",
        GammaRing::from_fn(group(&[2, 2]), group(&[2]), |x, g, y| if g == 1 { x & y } else { 0 }).unwrap(),
    ));
    out.push(label(
        "left-zero pair over Z2",
        // (a, b)(c, d) = (ac, ad)
        GammaRing::from_fn(group(&[2, 2]), group(&[2]), |x, g, y| {
            let (a, c, d) = (x >> 1, y >> 1, y & 1);
            g * (((a & c) << 1) | (a & d))
        })
        .unwrap(),
    ));
    out.push(label(
        "Z2 x Z2 square-zero",
        // (a, b)(c, d) = (0, ac)
        GammaRing::from_fn(group(&[2, 2]), group(&[2]), |x, g, y| g * ((x >> 1) & (y >> 1))).unwrap(),
    ));
    out
}

/// Seeded random product tables with `|M| <= 4` and `|Gamma| <= 2`; most
/// break every axiom, which the search must not rely on.
pub fn small_random(count: usize, seed: u64) -> Vec<(String, GammaRing)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shapes: [(&[u64], &[u64]); 5] = [(&[2], &[2]), (&[3], &[2]), (&[4], &[2]), (&[2, 2], &[2]), (&[4], &[])];
    (0..count)
        .map(|i| {
            let (m, g) = shapes[i % shapes.len()];
            let (mg, gg) = (group(m), group(g));
            let (mo, go) = (mg.order(), gg.order());
            let mu: Vec<usize> = (0..mo * go * mo).map(|_| rng.gen_range(0..mo)).collect();
            label(format!("random #{i} M={m:?} G={g:?}"), GammaRing::from_table(mg, gg, mu).unwrap())
        })
        .collect()
}

/// Barnes rings up to order 16 for primeness checks.
pub fn prime_corpus() -> Vec<(String, GammaRing)> {
    let mut out: Vec<(String, GammaRing)> = small_structured();
    for (rows, cols) in [(1, 2), (2, 1), (1, 3), (3, 1), (2, 2), (1, 4), (4, 1)] {
        out.push(label(format!("matrix(2,{rows},{cols})"), GammaRing::matrix(2, rows, cols).unwrap()));
    }
    out.push(label("matrix(3,1,1)", GammaRing::matrix(3, 1, 1).unwrap()));
    out.push(label("matrix(3,1,2)", GammaRing::matrix(3, 1, 2).unwrap()));
    let f2 = GammaRing::matrix(2, 1, 1).unwrap();
    out.push(label("F2 x F2 product", GammaRing::direct_product(&f2, &f2).unwrap()));
    out.push(label(
        "F2 x matrix(2,1,2)",
        GammaRing::direct_product(&f2, &GammaRing::matrix(2, 1, 2).unwrap()).unwrap(),
    ));
    for m in [&[8u64][..], &[2, 4], &[2, 2, 2], &[16], &[4, 4], &[2, 2, 2, 2]] {
        out.push(label(format!("trivial M={m:?} G=[2]"), GammaRing::trivial(group(m), group(&[2])).unwrap()));
    }
    out.retain(|(_, r)| r.m_order() <= 16 && r.is_barnes().unwrap());
    out
}

/// Additive closure of a membership mask.
fn closure(r: &GammaRing, mut mask: u32) -> u32 {
    loop {
        let mut next = mask;
        for x in 0..r.m_order() {
            if mask >> x & 1 == 1 {
                for y in 0..r.m_order() {
                    if mask >> y & 1 == 1 {
                        next |= 1 << r.add(x, y);
                    }
                }
            }
        }
        if next == mask {
            return mask;
        }
        mask = next;
    }
}

/// Every two-sided ideal, as membership masks, by subgroup enumeration.
pub fn brute_ideals(r: &GammaRing) -> Vec<u32> {
    assert!(r.m_order() <= 32);
    let mut subgroups = vec![1u32];
    let mut i = 0;
    while i < subgroups.len() {
        let s = subgroups[i];
        for x in 0..r.m_order() {
            if s >> x & 1 == 0 {
                let t = closure(r, s | 1 << x);
                if !subgroups.contains(&t) {
                    subgroups.push(t);
                }
            }
        }
        i += 1;
    }
    subgroups
        .into_iter()
        .filter(|&s| {
            (0..r.m_order()).filter(|&a| s >> a & 1 == 1).all(|a| {
                (0..r.gamma_order()).all(|g| {
                    (0..r.m_order()).all(|m| s >> r.mul(a, g, m) & 1 == 1 && s >> r.mul(m, g, a) & 1 == 1)
                })
            })
        })
        .collect()
}

/// No two nonzero ideals with `A Gamma B = 0`.
pub fn brute_prime_by_ideals(r: &GammaRing) -> bool {
    let members = |s: u32| -> Vec<usize> { (0..r.m_order()).filter(|&x| s >> x & 1 == 1).collect() };
    let nonzero: Vec<Vec<usize>> = brute_ideals(r).into_iter().filter(|&s| s != 1).map(members).collect();
    nonzero.iter().all(|a| {
        nonzero
            .iter()
            .all(|b| a.iter().any(|&x| (0..r.gamma_order()).any(|g| b.iter().any(|&y| r.mul(x, g, y) != 0))))
    })
}

/// `a Gamma M Gamma b = 0` forces `a = 0` or `b = 0`.
pub fn brute_prime_elementwise(r: &GammaRing) -> bool {
    let (m, go) = (r.m_order(), r.gamma_order());
    (1..m).all(|a| {
        (1..m).all(|b| {
            (0..go).any(|g| (0..m).any(|x| (0..go).any(|h| r.mul(r.mul(a, g, x), h, b) != 0)))
        })
    })
}
