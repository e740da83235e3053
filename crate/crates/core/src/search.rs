//! Backtracking search for n-multiplicative isomorphisms and derivations.
//!
//! Propagation works on *word relations*: for a partial assignment, `W_k` is
//! the set of pairs `(s, t)` where `s` is the source value of a length-`k`
//! word `x1 g1 ... xk` whose letters are all assigned and `t` is the value the
//! defining identity prescribes for its image. `W_{k+1}` extends `W_k` by one
//! `(g, x)` step, so the relation never grows past `|M| * |M'|` pairs and the
//! `|M|^n |Gamma|^(n-1)` tuple space is never enumerated. Every pair in `W_n`
//! fixes one value of the unknown map; once everything is assigned, `W_n`
//! covers every product tuple, so leaves are fully checked.
//!
//! On top of forcing, each node filters the domains of unassigned variables
//! against `W_{n-1}` (words whose last letter or last Gamma slot is the
//! unknown) and branches on the smallest domain.
//!
//! Isomorphism search first colours both rings jointly: an element's colour
//! records, for each word position, how many n-fold products through it land
//! in each colour class. Any n-multiplicative bijection pair preserves these
//! counts, so images are confined to the matching class.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use crate::error::{GammaError, Result};
use crate::maps::{DerivationTable, MapPair};
use crate::ring::GammaRing;

const UNSET: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    /// Product arity `n >= 2`.
    pub n: usize,
    /// Maximum number of branching decisions.
    pub node_budget: u64,
    /// Stop after this many results.
    pub report_limit: Option<usize>,
}

impl SearchConfig {
    pub fn new(n: usize) -> Self {
        SearchConfig {
            n,
            node_budget: 100_000_000,
            report_limit: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(GammaError::ArityTooSmall { min: 2, got: self.n });
        }
        if self.node_budget == 0 {
            return Err(GammaError::Precondition("node budget must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchStatus {
    Complete,
    BudgetExhausted,
    LimitReached,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchOutcome<T> {
    /// Results in lexicographic table order.
    pub results: Vec<T>,
    pub status: SearchStatus,
    pub nodes: u64,
}

impl<T> SearchOutcome<T> {
    pub fn is_complete(&self) -> bool {
        self.status == SearchStatus::Complete
    }
}

/// Deduplicating pair set over `rows x cols`.
const LEFT_SUFFIX_CAP: usize = 4096;

struct Relation {
    cols: usize,
    seen: Vec<bool>,
    pairs: Vec<(usize, usize)>,
}

impl Relation {
    fn new(rows: usize, cols: usize) -> Self {
        Relation {
            cols,
            seen: vec![false; rows * cols],
            pairs: Vec::new(),
        }
    }

    fn clear(&mut self) {
        for &(s, t) in &self.pairs {
            self.seen[s * self.cols + t] = false;
        }
        self.pairs.clear();
    }

    #[inline]
    fn insert(&mut self, s: usize, t: usize) {
        let k = s * self.cols + t;
        if !self.seen[k] {
            self.seen[k] = true;
            self.pairs.push((s, t));
        }
    }
}

#[derive(Clone, Copy)]
enum Var {
    Elem(usize),
    Gam(usize),
}

enum Step {
    Consistent,
    Conflict,
}

/// Refinement is skipped when one round of position vectors would cost more
/// than this many table lookups.
const REFINE_COST_LIMIT: u128 = 1 << 30;

/// Joint colouring of source and target; index 0 is the source.
struct Colours {
    m: [Vec<u32>; 2],
    g: [Vec<u32>; 2],
}

/// One free step `(g, y)` applied to a value distribution. Counts wrap; the
/// residues mod 2^64 are still invariants.
fn extend(r: &GammaRing, v: &[u64]) -> Vec<u64> {
    let mo = r.m_order();
    let mut out = vec![0u64; mo];
    for (s, &c) in v.iter().enumerate() {
        if c == 0 {
            continue;
        }
        for g in 0..r.gamma_order() {
            for y in 0..mo {
                let w = r.mul(s, g, y);
                out[w] = out[w].wrapping_add(c);
            }
        }
    }
    out
}

/// Product-value distributions of n-fold words with a fixed letter at each
/// position: `(element vectors, gamma vectors)`, indexed `[item][position]`.
fn position_vectors(r: &GammaRing, n: usize) -> (Vec<Vec<Vec<u64>>>, Vec<Vec<Vec<u64>>>) {
    let (mo, go) = (r.m_order(), r.gamma_order());
    // prefix[k] counts words with k + 1 letters by value
    let mut prefix = vec![vec![1u64; mo]];
    for k in 1..n {
        let next = extend(r, &prefix[k - 1]);
        prefix.push(next);
    }
    let finish = |mut v: Vec<u64>, steps: usize| {
        for _ in 0..steps {
            v = extend(r, &v);
        }
        v
    };
    let elems = (0..mo)
        .map(|x| {
            (0..n)
                .map(|i| {
                    let mut b = vec![0u64; mo];
                    if i == 0 {
                        b[x] = 1;
                    } else {
                        for (s, &c) in prefix[i - 1].iter().enumerate() {
                            for g in 0..go {
                                let w = r.mul(s, g, x);
                                b[w] = b[w].wrapping_add(c);
                            }
                        }
                    }
                    finish(b, n - 1 - i)
                })
                .collect()
        })
        .collect();
    let gammas = (0..go)
        .map(|g| {
            (0..n - 1)
                .map(|j| {
                    let mut b = vec![0u64; mo];
                    for (s, &c) in prefix[j].iter().enumerate() {
                        for y in 0..mo {
                            let w = r.mul(s, g, y);
                            b[w] = b[w].wrapping_add(c);
                        }
                    }
                    finish(b, n - 2 - j)
                })
                .collect()
        })
        .collect();
    (elems, gammas)
}

/// Per position: the count landing on `own_value` (elements only) and, for
/// each colour class in order, the sorted counts of its values.
fn signature(own: u32, own_value: Option<usize>, vectors: &[Vec<u64>], colour: &[u32], classes: usize) -> Vec<u64> {
    let mut sig = vec![own as u64];
    for v in vectors {
        if let Some(x) = own_value {
            sig.push(v[x]);
        }
        let mut per: Vec<Vec<u64>> = vec![Vec::new(); classes];
        for (w, &c) in v.iter().enumerate() {
            per[colour[w] as usize].push(c);
        }
        for mut list in per {
            list.sort_unstable();
            sig.extend(list);
        }
    }
    sig
}

/// Relabels signatures of both rings with shared ids; `None` when some class
/// has different sizes on the two sides.
fn relabel(sigs: [Vec<Vec<u64>>; 2]) -> Option<([Vec<u32>; 2], usize)> {
    let mut ids: BTreeMap<&Vec<u64>, [usize; 2]> = BTreeMap::new();
    for (side, list) in sigs.iter().enumerate() {
        for sig in list {
            ids.entry(sig).or_default()[side] += 1;
        }
    }
    if ids.values().any(|c| c[0] != c[1]) {
        return None;
    }
    let index: BTreeMap<&Vec<u64>, u32> = ids.keys().enumerate().map(|(i, k)| (*k, i as u32)).collect();
    let out = [0, 1].map(|side| sigs[side].iter().map(|s| index[s]).collect());
    Some((out, ids.len()))
}

/// `None` means the rings admit no n-multiplicative bijection pair.
fn refine_colours(src: &GammaRing, tgt: &GammaRing, n: usize) -> Option<Colours> {
    let (mo, go) = (src.m_order(), src.gamma_order());
    let mut colours = Colours {
        m: [vec![0; mo], vec![0; mo]],
        g: [vec![0; go], vec![0; go]],
    };
    let cost = (mo as u128).pow(3) * go as u128 * (n as u128).pow(2);
    if cost > REFINE_COST_LIMIT {
        return Some(colours);
    }
    let vecs = [position_vectors(src, n), position_vectors(tgt, n)];
    let (mut m_classes, mut g_classes) = (1, 1);
    loop {
        let m_sigs = [0, 1].map(|i| {
            (0..mo)
                .map(|x| signature(colours.m[i][x], Some(x), &vecs[i].0[x], &colours.m[i], m_classes))
                .collect()
        });
        let g_sigs = [0, 1].map(|i| {
            (0..go)
                .map(|g| signature(colours.g[i][g], None, &vecs[i].1[g], &colours.m[i], m_classes))
                .collect()
        });
        let (m, mc) = relabel(m_sigs)?;
        let (g, gc) = relabel(g_sigs)?;
        let stable = mc == m_classes && gc == g_classes;
        colours = Colours { m, g };
        (m_classes, g_classes) = (mc, gc);
        if stable {
            return Some(colours);
        }
    }
}

struct IsoSearch<'a> {
    src: &'a GammaRing,
    tgt: &'a GammaRing,
    n: usize,
    phi: Vec<u32>,
    psi: Vec<u32>,
    used_m: Vec<bool>,
    used_g: Vec<bool>,
    colours: Colours,
    trail: Vec<Var>,
    assigned_m: Vec<usize>,
    assigned_g: Vec<usize>,
    words: Vec<Relation>,
    nodes: u64,
    cfg: SearchConfig,
    results: Vec<MapPair>,
    status: SearchStatus,
}

impl<'a> IsoSearch<'a> {
    fn assign_m(&mut self, x: usize, v: usize) {
        self.phi[x] = v as u32;
        self.used_m[v] = true;
        self.trail.push(Var::Elem(x));
    }

    fn assign_g(&mut self, g: usize, v: usize) {
        self.psi[g] = v as u32;
        self.used_g[v] = true;
        self.trail.push(Var::Gam(g));
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().expect("trail entry") {
                Var::Elem(x) => {
                    self.used_m[self.phi[x] as usize] = false;
                    self.phi[x] = UNSET;
                }
                Var::Gam(g) => {
                    self.used_g[self.psi[g] as usize] = false;
                    self.psi[g] = UNSET;
                }
            }
        }
    }

    fn refresh_assigned(&mut self) {
        self.assigned_m.clear();
        self.assigned_m
            .extend((0..self.phi.len()).filter(|&x| self.phi[x] != UNSET));
        self.assigned_g.clear();
        self.assigned_g
            .extend((0..self.psi.len()).filter(|&g| self.psi[g] != UNSET));
    }

    /// One pass over `W_1 .. W_n`; forced values are assigned immediately.
    fn force_pass(&mut self, changed: &mut bool) -> Step {
        self.refresh_assigned();
        let n = self.n;
        self.words[0].clear();
        for &x in &self.assigned_m {
            self.words[0].insert(x, self.phi[x] as usize);
        }
        for level in 1..n {
            let (done, rest) = self.words.split_at_mut(level);
            let prev = &done[level - 1];
            let next = &mut rest[0];
            next.clear();
            for &(s, t) in &prev.pairs {
                for &g in &self.assigned_g {
                    let pg = self.psi[g] as usize;
                    for &x in &self.assigned_m {
                        let s2 = self.src.mul(s, g, x);
                        let t2 = self.tgt.mul(t, pg, self.phi[x] as usize);
                        if level + 1 < n {
                            next.insert(s2, t2);
                            continue;
                        }
                        let cur = self.phi[s2];
                        if cur == UNSET {
                            if self.used_m[t2] || self.colours.m[1][t2] != self.colours.m[0][s2] {
                                return Step::Conflict;
                            }
                            self.phi[s2] = t2 as u32;
                            self.used_m[t2] = true;
                            self.trail.push(Var::Elem(s2));
                            *changed = true;
                        } else if cur as usize != t2 {
                            return Step::Conflict;
                        }
                    }
                }
            }
        }
        Step::Consistent
    }

    /// Fully assigned suffixes `g1 y1 ... g_{n-1} y_{n-1}` as
    /// `(g, y, psi(g), phi(y))`, at most `LEFT_SUFFIX_CAP` of them; any subset
    /// gives a sound filter.
    fn left_suffixes(&self) -> Vec<Vec<[usize; 4]>> {
        let letters: Vec<[usize; 4]> = self
            .assigned_g
            .iter()
            .flat_map(|&g| {
                self.assigned_m
                    .iter()
                    .map(move |&y| [g, y, self.psi[g] as usize, self.phi[y] as usize])
            })
            .collect();
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(self.n - 1);
        fn grow(letters: &[[usize; 4]], len: usize, cur: &mut Vec<[usize; 4]>, out: &mut Vec<Vec<[usize; 4]>>) {
            if out.len() >= LEFT_SUFFIX_CAP {
                return;
            }
            if cur.len() == len {
                out.push(cur.clone());
                return;
            }
            for &l in letters {
                cur.push(l);
                grow(letters, len, cur, out);
                cur.pop();
                if out.len() >= LEFT_SUFFIX_CAP {
                    return;
                }
            }
        }
        if !letters.is_empty() {
            grow(&letters, self.n - 1, &mut cur, &mut out);
        }
        out
    }

    /// Forcing to a fixed point, then domain filtering; singleton domains are
    /// assigned and the loop repeats. Returns the branching variable and its
    /// domain, `Some(None)` at a leaf, or `None` on conflict.
    fn propagate(&mut self) -> Option<Option<(Var, Vec<usize>)>> {
        loop {
            loop {
                let mut changed = false;
                if let Step::Conflict = self.force_pass(&mut changed) {
                    return None;
                }
                if !changed {
                    break;
                }
            }
            // W_{n-1} is words[n-2]; the final pass made no change so it is current.
            let (mo, go) = (self.src.m_order(), self.src.gamma_order());
            if self.assigned_m.len() == mo && self.assigned_g.len() == go {
                return Some(None);
            }
            let prev = &self.words[self.n - 2].pairs;
            let mut best: Option<(Var, Vec<usize>)> = None;
            let mut gamma_best: Option<(Var, Vec<usize>)> = None;
            let mut forced: Vec<(Var, usize)> = Vec::new();
            let suffixes = self.left_suffixes();
            let (cm, cg) = (&self.colours.m, &self.colours.g);
            for x in (0..mo).filter(|&x| self.phi[x] == UNSET) {
                let mut dom: Vec<bool> = (0..mo).map(|u| !self.used_m[u] && cm[1][u] == cm[0][x]).collect();
                for &(s, t) in prev {
                    for &g in &self.assigned_g {
                        let w = self.src.mul(s, g, x);
                        let v = self.phi[w];
                        let pg = self.psi[g] as usize;
                        for (u, ok) in dom.iter_mut().enumerate() {
                            if !*ok {
                                continue;
                            }
                            let t2 = self.tgt.mul(t, pg, u);
                            *ok = if v != UNSET {
                                t2 == v as usize
                            } else if w == x {
                                t2 == u
                            } else {
                                t2 != u && !self.used_m[t2] && cm[1][t2] == cm[0][w]
                            };
                        }
                    }
                }
                // x in the leading slot
                for suffix in &suffixes {
                    let w = suffix.iter().fold(x, |acc, l| self.src.mul(acc, l[0], l[1]));
                    let v = self.phi[w];
                    for (u, ok) in dom.iter_mut().enumerate() {
                        if !*ok {
                            continue;
                        }
                        let t2 = suffix.iter().fold(u, |acc, l| self.tgt.mul(acc, l[2], l[3]));
                        *ok = if v != UNSET {
                            t2 == v as usize
                        } else if w == x {
                            t2 == u
                        } else {
                            t2 != u && !self.used_m[t2] && cm[1][t2] == cm[0][w]
                        };
                    }
                }
                let dom: Vec<usize> = (0..mo).filter(|&u| dom[u]).collect();
                match dom.len() {
                    0 => return None,
                    1 => forced.push((Var::Elem(x), dom[0])),
                    _ => {
                        if best.as_ref().is_none_or(|(_, d)| dom.len() < d.len()) {
                            best = Some((Var::Elem(x), dom));
                        }
                    }
                }
            }
            for g in (0..go).filter(|&g| self.psi[g] == UNSET) {
                let mut dom: Vec<bool> = (0..go).map(|d| !self.used_g[d] && cg[1][d] == cg[0][g]).collect();
                for &(s, t) in prev {
                    for &x in &self.assigned_m {
                        let w = self.src.mul(s, g, x);
                        let v = self.phi[w];
                        let px = self.phi[x] as usize;
                        for (d, ok) in dom.iter_mut().enumerate() {
                            if !*ok {
                                continue;
                            }
                            let t2 = self.tgt.mul(t, d, px);
                            *ok = if v != UNSET {
                                t2 == v as usize
                            } else {
                                !self.used_m[t2] && cm[1][t2] == cm[0][w]
                            };
                        }
                    }
                }
                let dom: Vec<usize> = (0..go).filter(|&d| dom[d]).collect();
                match dom.len() {
                    0 => return None,
                    1 => forced.push((Var::Gam(g), dom[0])),
                    _ => {
                        if gamma_best.as_ref().is_none_or(|(_, d)| dom.len() < d.len()) {
                            gamma_best = Some((Var::Gam(g), dom.clone()));
                        }
                        if best.as_ref().is_none_or(|(_, d)| dom.len() < d.len()) {
                            best = Some((Var::Gam(g), dom));
                        }
                    }
                }
            }
            if forced.is_empty() {
                // no word can be formed until some Gamma letter is fixed
                if self.assigned_g.is_empty() && go > 0 {
                    return Some(gamma_best.or(best));
                }
                return Some(best);
            }
            for (var, v) in forced {
                match var {
                    Var::Elem(x) => {
                        if self.used_m[v] {
                            return None;
                        }
                        self.assign_m(x, v);
                    }
                    Var::Gam(g) => {
                        if self.used_g[v] {
                            return None;
                        }
                        self.assign_g(g, v);
                    }
                }
            }
        }
    }

    fn run(&mut self) {
        if self.status != SearchStatus::Complete {
            return;
        }
        let mark = self.trail.len();
        match self.propagate() {
            None => {}
            Some(None) => {
                self.results.push(MapPair {
                    phi: self.phi.iter().map(|&v| v as usize).collect(),
                    psi: self.psi.iter().map(|&v| v as usize).collect(),
                });
                if self.cfg.report_limit.is_some_and(|l| self.results.len() >= l) {
                    self.status = SearchStatus::LimitReached;
                }
            }
            Some(Some((var, dom))) => {
                for v in dom {
                    if self.status != SearchStatus::Complete {
                        break;
                    }
                    self.nodes += 1;
                    if self.nodes > self.cfg.node_budget {
                        self.status = SearchStatus::BudgetExhausted;
                        break;
                    }
                    let inner = self.trail.len();
                    match var {
                        Var::Elem(x) => {
                            if self.used_m[v] {
                                continue;
                            }
                            self.assign_m(x, v);
                        }
                        Var::Gam(g) => {
                            if self.used_g[v] {
                                continue;
                            }
                            self.assign_g(g, v);
                        }
                    }
                    self.run();
                    self.undo_to(inner);
                }
            }
        }
        self.undo_to(mark);
    }
}

/// All pairs `(phi, psi)` of bijections satisfying the n-fold product identity
/// from `source` onto `target`, sorted by `(phi, psi)`.
pub fn search_n_multiplicative_isos(
    source: &GammaRing,
    target: &GammaRing,
    cfg: SearchConfig,
) -> Result<SearchOutcome<MapPair>> {
    cfg.validate()?;
    if source.m_order() != target.m_order() || source.gamma_order() != target.gamma_order() {
        return Ok(SearchOutcome {
            results: Vec::new(),
            status: SearchStatus::Complete,
            nodes: 0,
        });
    }
    let Some(colours) = refine_colours(source, target, cfg.n) else {
        return Ok(SearchOutcome {
            results: Vec::new(),
            status: SearchStatus::Complete,
            nodes: 0,
        });
    };
    let (mo, go) = (source.m_order(), source.gamma_order());
    let mut s = IsoSearch {
        src: source,
        tgt: target,
        n: cfg.n,
        phi: vec![UNSET; mo],
        psi: vec![UNSET; go],
        used_m: vec![false; mo],
        used_g: vec![false; go],
        colours,
        trail: Vec::new(),
        assigned_m: Vec::new(),
        assigned_g: Vec::new(),
        words: (0..cfg.n).map(|_| Relation::new(mo, mo)).collect(),
        nodes: 0,
        cfg,
        results: Vec::new(),
        status: SearchStatus::Complete,
    };
    s.run();
    let mut results = s.results;
    results.sort();
    Ok(SearchOutcome {
        results,
        status: s.status,
        nodes: s.nodes,
    })
}

struct DerivationSearch<'a> {
    ring: &'a GammaRing,
    n: usize,
    d: Vec<u32>,
    trail: Vec<usize>,
    assigned: Vec<usize>,
    words: Vec<Relation>,
    /// Folding the Leibniz sum into one value needs `(s + t) g x = s g x + t g x`.
    folded: bool,
    /// Unfolded level `n - 2` entries `[s, term_1, ..., term_k]`.
    expanded: Vec<Vec<usize>>,
    nodes: u64,
    cfg: SearchConfig,
    results: Vec<DerivationTable>,
    status: SearchStatus,
}

impl<'a> DerivationSearch<'a> {
    fn assign(&mut self, x: usize, v: usize) {
        self.d[x] = v as u32;
        self.trail.push(x);
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let x = self.trail.pop().expect("trail entry");
            self.d[x] = UNSET;
        }
    }

    /// Word relation for derivations: extending `(s, t)` by `(g, x)` gives
    /// `(s g x, t g x + s g d(x))`.
    fn force_pass(&mut self, changed: &mut bool) -> Step {
        let r = self.ring;
        self.assigned.clear();
        self.assigned
            .extend((0..self.d.len()).filter(|&x| self.d[x] != UNSET));
        if !self.folded {
            return self.force_pass_expanded(changed);
        }
        self.words[0].clear();
        for &x in &self.assigned {
            self.words[0].insert(x, self.d[x] as usize);
        }
        let n = self.n;
        for level in 1..n {
            let (done, rest) = self.words.split_at_mut(level);
            let prev = &done[level - 1];
            let next = &mut rest[0];
            next.clear();
            for &(s, t) in &prev.pairs {
                for g in 0..r.gamma_order() {
                    for &x in &self.assigned {
                        let s2 = r.mul(s, g, x);
                        let t2 = r.add(r.mul(t, g, x), r.mul(s, g, self.d[x] as usize));
                        if level + 1 < n {
                            next.insert(s2, t2);
                            continue;
                        }
                        let cur = self.d[s2];
                        if cur == UNSET {
                            self.d[s2] = t2 as u32;
                            self.trail.push(s2);
                            *changed = true;
                        } else if cur as usize != t2 {
                            return Step::Conflict;
                        }
                    }
                }
            }
        }
        Step::Consistent
    }

    fn propagate(&mut self) -> Option<Option<(usize, Vec<usize>)>> {
        let r = self.ring;
        let mo = r.m_order();
        loop {
            loop {
                let mut changed = false;
                if let Step::Conflict = self.force_pass(&mut changed) {
                    return None;
                }
                if !changed {
                    break;
                }
            }
            if self.assigned.len() == mo {
                return Some(None);
            }
            let prev: Vec<(usize, &[usize])> = if self.folded {
                self.words[self.n - 2]
                    .pairs
                    .iter()
                    .map(|(s, t)| (*s, std::slice::from_ref(t)))
                    .collect()
            } else {
                self.expanded.iter().map(|e| (e[0], &e[1..])).collect()
            };
            let mut best: Option<(usize, Vec<usize>)> = None;
            let mut forced = Vec::new();
            for x in (0..mo).filter(|&x| self.d[x] == UNSET) {
                let mut dom = vec![true; mo];
                for &(s, terms) in &prev {
                    for g in 0..r.gamma_order() {
                        let v = self.d[r.mul(s, g, x)];
                        if v == UNSET {
                            continue;
                        }
                        // need s g u = d(s g x) - sum of (term g x)
                        let known = terms.iter().fold(0, |acc, &t| r.add(acc, r.mul(t, g, x)));
                        let want = r.sub(v as usize, known);
                        for (u, ok) in dom.iter_mut().enumerate() {
                            if *ok && r.mul(s, g, u) != want {
                                *ok = false;
                            }
                        }
                    }
                }
                let dom: Vec<usize> = (0..mo).filter(|&u| dom[u]).collect();
                match dom.len() {
                    0 => return None,
                    1 => forced.push((x, dom[0])),
                    _ => {
                        if best.as_ref().is_none_or(|(_, d)| dom.len() < d.len()) {
                            best = Some((x, dom));
                        }
                    }
                }
            }
            if forced.is_empty() {
                return Some(best);
            }
            for (x, v) in forced {
                self.assign(x, v);
            }
        }
    }

    /// Same relation with every summand kept apart, for tables that are not
    /// left distributive.
    fn force_pass_expanded(&mut self, changed: &mut bool) -> Step {
        let r = self.ring;
        let n = self.n;
        let mut level: Vec<Vec<usize>> = self.assigned.iter().map(|&x| vec![x, self.d[x] as usize]).collect();
        for depth in 1..n {
            if depth == n - 1 {
                self.expanded = level.clone();
            }
            let mut seen = HashSet::new();
            let mut next = Vec::new();
            for entry in &level {
                let s = entry[0];
                for g in 0..r.gamma_order() {
                    for &x in &self.assigned {
                        let s2 = r.mul(s, g, x);
                        let mut e2 = Vec::with_capacity(entry.len() + 1);
                        e2.push(s2);
                        e2.extend(entry[1..].iter().map(|&t| r.mul(t, g, x)));
                        e2.push(r.mul(s, g, self.d[x] as usize));
                        if depth + 1 < n {
                            if seen.insert(e2.clone()) {
                                next.push(e2);
                            }
                            continue;
                        }
                        let t2 = e2[1..].iter().fold(0, |acc, &t| r.add(acc, t));
                        let cur = self.d[s2];
                        if cur == UNSET {
                            self.d[s2] = t2 as u32;
                            self.trail.push(s2);
                            *changed = true;
                        } else if cur as usize != t2 {
                            return Step::Conflict;
                        }
                    }
                }
            }
            level = next;
        }
        Step::Consistent
    }

    fn run(&mut self) {
        if self.status != SearchStatus::Complete {
            return;
        }
        let mark = self.trail.len();
        match self.propagate() {
            None => {}
            Some(None) => {
                self.results.push(DerivationTable {
                    d: self.d.iter().map(|&v| v as usize).collect(),
                });
                if self.cfg.report_limit.is_some_and(|l| self.results.len() >= l) {
                    self.status = SearchStatus::LimitReached;
                }
            }
            Some(Some((x, dom))) => {
                for v in dom {
                    if self.status != SearchStatus::Complete {
                        break;
                    }
                    self.nodes += 1;
                    if self.nodes > self.cfg.node_budget {
                        self.status = SearchStatus::BudgetExhausted;
                        break;
                    }
                    let inner = self.trail.len();
                    self.assign(x, v);
                    self.run();
                    self.undo_to(inner);
                }
            }
        }
        self.undo_to(mark);
    }
}

fn left_distributive(r: &GammaRing) -> bool {
    let (mo, go) = (r.m_order(), r.gamma_order());
    (0..mo).all(|x| {
        (0..mo).all(|y| {
            let xy = r.add(x, y);
            (0..go).all(|g| (0..mo).all(|z| r.mul(xy, g, z) == r.add(r.mul(x, g, z), r.mul(y, g, z))))
        })
    })
}

/// All maps `d: M -> M` satisfying the n-fold Leibniz identity, sorted by table.
/// `d(0)` is not fixed in advance; it is whatever the identity forces.
pub fn search_n_derivations(ring: &GammaRing, cfg: SearchConfig) -> Result<SearchOutcome<DerivationTable>> {
    cfg.validate()?;
    let mo = ring.m_order();
    let mut s = DerivationSearch {
        ring,
        n: cfg.n,
        d: vec![UNSET; mo],
        trail: Vec::new(),
        assigned: Vec::new(),
        words: (0..cfg.n).map(|_| Relation::new(mo, mo)).collect(),
        folded: left_distributive(ring),
        expanded: Vec::new(),
        nodes: 0,
        cfg,
        results: Vec::new(),
        status: SearchStatus::Complete,
    };
    s.run();
    let mut results = s.results;
    results.sort();
    Ok(SearchOutcome {
        results,
        status: s.status,
        nodes: s.nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteAbelianGroup;
    use crate::maps::{verify_additive_pair, verify_n_derivation, verify_n_multiplicative, VerifyConfig};

    fn trivial(m: &[u64], g: &[u64]) -> GammaRing {
        GammaRing::trivial(
            FiniteAbelianGroup::from_factors(m).unwrap(),
            FiniteAbelianGroup::from_factors(g).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn rejects_bad_config() {
        let r = trivial(&[2], &[2]);
        assert!(search_n_multiplicative_isos(&r, &r, SearchConfig::new(1)).is_err());
        let mut cfg = SearchConfig::new(2);
        cfg.node_budget = 0;
        assert!(search_n_derivations(&r, cfg).is_err());
    }

    #[test]
    fn mismatched_orders_give_empty_complete() {
        let a = trivial(&[2], &[2]);
        let b = trivial(&[4], &[2]);
        let out = search_n_multiplicative_isos(&a, &b, SearchConfig::new(2)).unwrap();
        assert!(out.results.is_empty() && out.is_complete());
    }

    #[test]
    fn trivial_z4_counts() {
        let r = trivial(&[4], &[2]);
        let out = search_n_multiplicative_isos(&r, &r, SearchConfig::new(2)).unwrap();
        assert!(out.is_complete());
        assert_eq!(out.results.len(), 12);
        let additive = out
            .results
            .iter()
            .filter(|p| verify_additive_pair(&r, &r, p).passed)
            .count();
        assert_eq!(additive, 4);
        assert!(out.results.contains(&MapPair::identity(&r)));
        assert!(out.results.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn matrix_121_results_verify_and_extend_to_higher_arity() {
        let r = GammaRing::matrix(2, 1, 2).unwrap();
        let out = search_n_multiplicative_isos(&r, &r, SearchConfig::new(2)).unwrap();
        assert!(out.is_complete());
        assert!(!out.results.is_empty());
        for p in &out.results {
            for n in 2..=4 {
                assert!(verify_n_multiplicative(&r, &r, p, n, VerifyConfig::default())
                    .unwrap()
                    .is_exact_pass());
            }
        }
    }

    #[test]
    fn limit_and_budget_are_reported() {
        let r = trivial(&[2, 2, 2], &[2]);
        let mut cfg = SearchConfig::new(2);
        cfg.report_limit = Some(3);
        let out = search_n_multiplicative_isos(&r, &r, cfg).unwrap();
        assert_eq!(out.status, SearchStatus::LimitReached);
        assert_eq!(out.results.len(), 3);
        let mut cfg = SearchConfig::new(2);
        cfg.node_budget = 5;
        let out = search_n_multiplicative_isos(&r, &r, cfg).unwrap();
        assert_eq!(out.status, SearchStatus::BudgetExhausted);
    }

    #[test]
    fn derivations_on_trivial_rings_fix_zero_only() {
        // d(0) is forced to 0; every other value is free: |M|^(|M| - 1) maps
        let r = trivial(&[2, 2], &[2]);
        let out = search_n_derivations(&r, SearchConfig::new(2)).unwrap();
        assert!(out.is_complete());
        assert_eq!(out.results.len(), 64);
        assert!(out.results.iter().all(|d| d.d[0] == 0));
        assert!(out.results.contains(&DerivationTable::zero(&r)));
    }

    #[test]
    fn derivation_search_matches_brute_force_on_small_rings() {
        for r in [
            trivial(&[3], &[2]),
            GammaRing::matrix(2, 1, 1).unwrap(),
            GammaRing::matrix(3, 1, 1).unwrap(),
            GammaRing::matrix(2, 1, 2).unwrap(),
        ] {
            let mo = r.m_order();
            for n in 2..=3 {
                let mut brute = Vec::new();
                let total = mo.pow(mo as u32);
                for code in 0..total {
                    let mut c = code;
                    let d: Vec<usize> = (0..mo)
                        .map(|_| {
                            let v = c % mo;
                            c /= mo;
                            v
                        })
                        .collect();
                    let d = DerivationTable { d };
                    if verify_n_derivation(&r, &d, n, VerifyConfig::default()).unwrap().passed {
                        brute.push(d);
                    }
                }
                brute.sort();
                let out = search_n_derivations(&r, SearchConfig::new(n)).unwrap();
                assert!(out.is_complete());
                assert_eq!(out.results, brute, "order {mo}, n = {n}");
            }
        }
    }
}
