//! Graphs under disjoint union, and marked graphs under the joint union `∨`
//! or the inflation `⋆`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{OnceLock, RwLock};

use serde::Serialize;

use super::permutations::Permutation;
use crate::error::{Error, Result};
use crate::presheaf::{mask_indices, EnumCache, InstanceDescriptor, Mask, Presheaf};

/// Largest vertex count whose upper triangle fits the `u64` code.
pub const MAX_VERTICES: usize = 11;

fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Bit of pair `i < j` in a code of `n` vertices; earlier pairs are more
/// significant so that numeric order is lexicographic order of the bitstring.
fn pair_bit(n: usize, i: usize, j: usize) -> u64 {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    let k = j * (j - 1) / 2 + i;
    1u64 << (pair_count(n) - 1 - k)
}

/// A simple graph on vertices `0..n`, stored as its upper-triangle bitstring.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Graph {
    n: u8,
    code: u64,
}

impl Graph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(Error::domain(format!("graphs are limited to {MAX_VERTICES} vertices")));
        }
        let mut code = 0;
        for &(i, j) in edges {
            if i >= n || j >= n || i == j {
                return Err(Error::domain(format!("invalid edge {}-{} on {n} vertices", i + 1, j + 1)));
            }
            code |= pair_bit(n, i, j);
        }
        Ok(Graph { n: n as u8, code })
    }

    pub fn empty() -> Self {
        Graph { n: 0, code: 0 }
    }

    pub fn edgeless(n: usize) -> Self {
        Graph { n: n as u8, code: 0 }
    }

    pub fn complete(n: usize) -> Self {
        Graph { n: n as u8, code: (1u64 << pair_count(n)) - 1 }
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|j| (j - 1, j)).collect();
        Graph::new(n, &edges).expect("valid path")
    }

    pub fn order(&self) -> usize {
        self.n as usize
    }

    pub fn code(&self) -> u64 {
        self.code
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        i != j && self.code & pair_bit(self.order(), i, j) != 0
    }

    pub fn neighbors(&self, i: usize) -> Mask {
        (0..self.order()).filter(|&j| self.adjacent(i, j)).fold(0, |m, j| m | (1 << j))
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.order();
        (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).filter(|&(i, j)| self.adjacent(i, j)).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.code.count_ones() as usize
    }

    /// Induced subgraph on `mask`, vertices renumbered increasingly.
    pub fn induced(&self, mask: Mask) -> Graph {
        let kept: Vec<usize> = mask_indices(mask).collect();
        self.reorder(&kept)
    }

    /// Graph whose vertex `k` is vertex `order[k]` of `self`.
    fn reorder(&self, order: &[usize]) -> Graph {
        let m = order.len();
        let mut code = 0;
        for b in 1..m {
            for a in 0..b {
                if self.adjacent(order[a], order[b]) {
                    code |= pair_bit(m, a, b);
                }
            }
        }
        Graph { n: m as u8, code }
    }

    /// Block-diagonal union: `other`'s vertices follow `self`'s.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let k = self.order();
        let mut edges = self.edges();
        edges.extend(other.edges().into_iter().map(|(i, j)| (i + k, j + k)));
        Graph::new(k + other.order(), &edges).expect("sizes checked by callers")
    }

    /// Adds a vertex adjacent to `neighbors`.
    fn extended(&self, neighbors: Mask) -> Graph {
        let n = self.order();
        let mut edges = self.edges();
        edges.extend(mask_indices(neighbors).map(|i| (i, n)));
        Graph::new(n + 1, &edges).expect("bounded by callers")
    }

    /// Connected components as vertex masks, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Mask> {
        components_of(self.order(), &self.edges())
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Lexicographically minimal relabeling. With `fix_first`, vertex 0 stays
    /// first (used for the mark of a marked graph).
    pub fn canonical_form(&self, fix_first: bool) -> Graph {
        static MEMO: OnceLock<RwLock<HashMap<(Graph, bool), Graph>>> = OnceLock::new();
        let memo = MEMO.get_or_init(Default::default);
        if let Some(g) = memo.read().expect("canonical memo poisoned").get(&(self.clone(), fix_first)) {
            return g.clone();
        }
        let g = self.reorder(&self.canonical_order(fix_first));
        memo.write().expect("canonical memo poisoned").insert((self.clone(), fix_first), g.clone());
        g
    }

    fn canonical_order(&self, fix_first: bool) -> Vec<usize> {
        let n = self.order();
        if n <= 1 {
            return (0..n).collect();
        }
        let total = pair_count(n);
        let mut search = CanonSearch { g: self, n, total, best: None, order: Vec::with_capacity(n) };
        if fix_first {
            search.order.push(0);
            search.run(1, 1, 0);
        } else {
            search.run(0, 0, 0);
        }
        search.best.expect("at least one ordering").1
    }
}

struct CanonSearch<'a> {
    g: &'a Graph,
    n: usize,
    total: usize,
    best: Option<(u64, Vec<usize>)>,
    order: Vec<usize>,
}

impl CanonSearch<'_> {
    fn run(&mut self, pos: usize, used: Mask, prefix: u64) {
        if pos == self.n {
            if self.best.as_ref().is_none_or(|(b, _)| prefix < *b) {
                self.best = Some((prefix, self.order.clone()));
            }
            return;
        }
        let len = pair_count(pos + 1);
        for v in 0..self.n {
            if used & (1 << v) != 0 {
                continue;
            }
            let mut p = prefix;
            for a in 0..pos {
                p = (p << 1) | self.g.adjacent(self.order[a], v) as u64;
            }
            if let Some((b, _)) = &self.best {
                if p > b >> (self.total - len) {
                    continue;
                }
            }
            self.order.push(v);
            self.run(pos + 1, used | (1 << v), p);
            self.order.pop();
        }
    }
}

fn components_of(n: usize, edges: &[(usize, usize)]) -> Vec<Mask> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut y = x;
        while parent[y] != r {
            let next = parent[y];
            parent[y] = r;
            y = next;
        }
        r
    }
    for &(i, j) in edges {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut by_root: Vec<(usize, Mask)> = Vec::new();
    for v in 0..n {
        let r = find(&mut parent, v);
        match by_root.iter_mut().find(|(root, _)| *root == r) {
            Some((_, m)) => *m |= 1 << v,
            None => by_root.push((r, 1 << v)),
        }
    }
    by_root.into_iter().map(|(_, m)| m).collect()
}

fn write_edges(f: &mut fmt::Formatter<'_>, edges: &[(String, String)]) -> fmt::Result {
    let parts: Vec<String> = edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
    f.write_str(&parts.join(","))
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.n)?;
        let edges: Vec<_> = self.edges().into_iter().map(|(i, j)| ((i + 1).to_string(), (j + 1).to_string())).collect();
        write_edges(f, &edges)
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph({self})")
    }
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Parses `n:i-j,…`; the endpoint `*` is returned as `None`.
fn parse_edge_list(s: &str) -> Result<(usize, Vec<(Option<usize>, Option<usize>)>)> {
    let s = s.trim();
    let (head, tail) = s.split_once(':').ok_or_else(|| Error::parse(s, "expected `n:edges`"))?;
    let n: usize = head.trim().parse().map_err(|_| Error::parse(head, "vertex count must be a nonnegative integer"))?;
    let endpoint = |t: &str| -> Result<Option<usize>> {
        let t = t.trim();
        if t == "*" {
            return Ok(None);
        }
        match t.parse::<usize>() {
            Ok(v) if (1..=n).contains(&v) => Ok(Some(v - 1)),
            _ => Err(Error::parse(t, format!("vertex must be in 1..={n}"))),
        }
    };
    let mut edges = Vec::new();
    for tok in tail.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (a, b) = tok.split_once('-').ok_or_else(|| Error::parse(tok, "expected an edge `i-j`"))?;
        let (a, b) = (endpoint(a)?, endpoint(b)?);
        if a == b {
            return Err(Error::parse(tok, "loops are not allowed"));
        }
        edges.push((a, b));
    }
    Ok((n, edges))
}

impl FromStr for Graph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (n, raw) = parse_edge_list(s)?;
        let mut edges = Vec::with_capacity(raw.len());
        for (a, b) in raw {
            match (a, b) {
                (Some(a), Some(b)) => edges.push((a, b)),
                _ => return Err(Error::parse(s, "`*` only appears in marked graphs")),
            }
        }
        Graph::new(n, &edges).map_err(|e| Error::parse(s, e.to_string()))
    }
}

/// Inversion graph of a permutation, as a coinvariant: one vertex per entry,
/// an edge for each inverted pair.
pub fn inversion_graph(p: &Permutation) -> Graph {
    let edges: Vec<_> = p.inversions().collect();
    Graph::new(p.len(), &edges).expect("permutation sizes fit").canonical_form(false)
}

/// `(Gr, ⊎, ∅)`.
#[derive(Debug, Clone)]
pub struct Gr {
    cap: usize,
    cache: EnumCache<Graph>,
}

impl Gr {
    pub const DEFAULT_CAP: usize = 7;

    pub fn new() -> Self {
        Gr { cap: Self::DEFAULT_CAP, cache: EnumCache::default() }
    }

    pub fn with_cap(cap: usize) -> Self {
        Gr { cap: cap.min(MAX_VERTICES), cache: EnumCache::default() }
    }
}

impl Default for Gr {
    fn default() -> Self {
        Self::new()
    }
}

/// Unions of sub-multisets of parts: all `(X, complement)` splits, deduped.
fn split_pairs<T: Clone + Ord>(parts: &[T], combine: impl Fn(&[T]) -> T) -> Vec<(T, T)> {
    let k = parts.len();
    let mut out = BTreeSet::new();
    for sel in 0u32..(1 << k) {
        let (mut left, mut right) = (Vec::new(), Vec::new());
        for (i, p) in parts.iter().enumerate() {
            if sel & (1 << i) != 0 {
                left.push(p.clone());
            } else {
                right.push(p.clone());
            }
        }
        out.insert((combine(&left), combine(&right)));
    }
    out.into_iter().collect()
}

impl Presheaf for Gr {
    type Obj = Graph;

    fn descriptor(&self) -> InstanceDescriptor {
        InstanceDescriptor { name: "gr", associative: true, commutative: true, cap: self.cap }
    }

    fn size(&self, o: &Graph) -> usize {
        o.order()
    }

    fn induced(&self, o: &Graph, mask: Mask) -> Graph {
        o.induced(mask)
    }

    fn canonical(&self, o: &Graph) -> Graph {
        o.canonical_form(false)
    }

    fn relabel(&self, o: &Graph, perm: &[usize]) -> Graph {
        let mut inverse = vec![0; perm.len()];
        for (i, &p) in perm.iter().enumerate() {
            inverse[p] = i;
        }
        o.reorder(&inverse)
    }

    fn encode(&self, o: &Graph) -> Vec<u8> {
        let c = o.canonical_form(false);
        let mut e = vec![c.n];
        e.extend_from_slice(&c.code.to_be_bytes());
        e
    }

    fn generate(&self, n: usize) -> Vec<Graph> {
        if n == 0 {
            return vec![Graph::empty()];
        }
        let smaller = self.generate(n - 1);
        let mut out = BTreeSet::new();
        for g in &smaller {
            for nb in 0..(1 as Mask) << (n - 1) {
                out.insert(g.extended(nb).canonical_form(false));
            }
        }
        out.into_iter().collect()
    }

    fn cache(&self) -> &EnumCache<Graph> {
        &self.cache
    }

    fn unit(&self) -> Graph {
        Graph::empty()
    }

    fn product(&self, a: &Graph, b: &Graph) -> Result<Graph> {
        if a.order() + b.order() > MAX_VERTICES {
            return Err(Error::resource("graph product", a.order() + b.order(), MAX_VERTICES));
        }
        Ok(a.disjoint_union(b).canonical_form(false))
    }

    fn factor_pairs(&self, a: &Graph) -> Result<Vec<(Graph, Graph)>> {
        let parts = self.irreducible_factors(a)?;
        Ok(split_pairs(&parts, |ps| {
            ps.iter().fold(Graph::empty(), |acc, g| acc.disjoint_union(g)).canonical_form(false)
        }))
    }

    fn irreducible_factors(&self, a: &Graph) -> Result<Vec<Graph>> {
        let mut parts: Vec<Graph> = a.components().into_iter().map(|m| a.induced(m).canonical_form(false)).collect();
        parts.sort();
        Ok(parts)
    }

    fn is_irreducible(&self, a: &Graph) -> Result<bool> {
        Ok(a.order() >= 1 && a.is_connected())
    }
}

/// A graph on `I ⊔ {*}`, stored with the mark at vertex 0 and ground element
/// `i` at vertex `i + 1`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MarkedGraph(Graph);

impl MarkedGraph {
    /// `edges` over vertices `0..=n`, vertex 0 being the mark.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Ok(MarkedGraph(Graph::new(n + 1, edges)?))
    }

    pub fn unit() -> Self {
        MarkedGraph(Graph::edgeless(1))
    }

    pub fn size(&self) -> usize {
        self.0.order() - 1
    }

    pub fn graph(&self) -> &Graph {
        &self.0
    }

    /// Vertices (including the mark) adjacent to the mark.
    pub fn mark_neighbors(&self) -> Mask {
        self.0.neighbors(0)
    }

    /// Graph on the unmarked vertices.
    pub fn without_mark(&self) -> Graph {
        self.0.induced(crate::presheaf::full_mask(self.0.order()) & !1)
    }

    /// Joint union: marks merged, no edges across the unmarked parts.
    pub fn vee(&self, other: &MarkedGraph) -> MarkedGraph {
        let k = self.size();
        let mut edges = self.0.edges();
        edges.extend(other.0.edges().into_iter().map(|(i, j)| (shift(i, k), shift(j, k))));
        MarkedGraph::new(k + other.size(), &edges).expect("sizes checked by callers")
    }

    /// Inflation: the mark of `self` is replaced by `other`; an unmarked
    /// vertex of `self` is joined to every vertex of `other` exactly when it
    /// was joined to the mark of `self`.
    pub fn star(&self, other: &MarkedGraph) -> MarkedGraph {
        let (k, l) = (self.size(), other.size());
        // result: 0 = mark of other, 1..=k from self, k+1..=k+l from other
        let from_other = |v: usize| if v == 0 { 0 } else { v + k };
        let mut edges: Vec<(usize, usize)> =
            self.0.edges().into_iter().filter(|&(i, _)| i != 0).collect();
        edges.extend(other.0.edges().into_iter().map(|(i, j)| (from_other(i), from_other(j))));
        for i in 1..=k {
            if self.0.adjacent(0, i) {
                edges.extend((0..=l).map(|v| (i, from_other(v))));
            }
        }
        MarkedGraph::new(k + l, &edges).expect("sizes checked by callers")
    }

    fn induced(&self, mask: Mask) -> MarkedGraph {
        MarkedGraph(self.0.induced((mask << 1) | 1))
    }

    pub fn canonical_form(&self) -> MarkedGraph {
        MarkedGraph(self.0.canonical_form(true))
    }
}

fn shift(v: usize, k: usize) -> usize {
    if v == 0 {
        0
    } else {
        v + k
    }
}

impl fmt::Display for MarkedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.size())?;
        let name = |v: usize| if v == 0 { "*".to_string() } else { v.to_string() };
        let edges: Vec<_> = self.0.edges().into_iter().map(|(i, j)| (name(i), name(j))).collect();
        write_edges(f, &edges)
    }
}

impl fmt::Debug for MarkedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MarkedGraph({self})")
    }
}

impl Serialize for MarkedGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl FromStr for MarkedGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (n, raw) = parse_edge_list(s)?;
        let v = |x: Option<usize>| x.map_or(0, |i| i + 1);
        let edges: Vec<_> = raw.into_iter().map(|(a, b)| (v(a), v(b))).collect();
        MarkedGraph::new(n, &edges).map_err(|e| Error::parse(s, e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum MGrProduct {
    /// Joint union `∨`; commutative with unique factorization.
    Vee,
    /// Inflation `⋆`.
    Star,
}

/// Marked graphs with one of the two products.
#[derive(Debug, Clone)]
pub struct MGr {
    product: MGrProduct,
    cap: usize,
    cache: EnumCache<MarkedGraph>,
}

impl MGr {
    pub const DEFAULT_CAP: usize = 5;

    pub fn new(product: MGrProduct) -> Self {
        MGr { product, cap: Self::DEFAULT_CAP, cache: EnumCache::default() }
    }

    pub fn with_cap(product: MGrProduct, cap: usize) -> Self {
        MGr { product, cap: cap.min(MAX_VERTICES - 1), cache: EnumCache::default() }
    }

    pub fn product_kind(&self) -> MGrProduct {
        self.product
    }

    /// Two distinct words of `⋆`-irreducible marked graphs of the given
    /// total size with the same product, if any.
    pub fn star_relation_witness(&self, total: usize) -> Result<Option<(Vec<MarkedGraph>, Vec<MarkedGraph>)>> {
        let star = MGr { product: MGrProduct::Star, cap: self.cap, cache: self.cache.clone() };
        let mut irreducibles = Vec::new();
        for k in 1..=total {
            for g in star.enumerate(k)?.iter() {
                if star.is_irreducible(g)? {
                    irreducibles.push(g.clone());
                }
            }
        }
        let mut seen: HashMap<MarkedGraph, Vec<MarkedGraph>> = HashMap::new();
        let mut words: Vec<Vec<MarkedGraph>> = vec![Vec::new()];
        let mut complete = Vec::new();
        while let Some(w) = words.pop() {
            let sz: usize = w.iter().map(MarkedGraph::size).sum();
            if sz == total {
                complete.push(w);
                continue;
            }
            for g in &irreducibles {
                if sz + g.size() <= total {
                    let mut next = w.clone();
                    next.push(g.clone());
                    words.push(next);
                }
            }
        }
        complete.sort();
        for w in complete {
            let p = w.iter().try_fold(MarkedGraph::unit(), |acc, g| star.product(&acc, g))?;
            if let Some(prev) = seen.get(&p) {
                return Ok(Some((prev.clone(), w)));
            }
            seen.insert(p, w);
        }
        Ok(None)
    }
}

impl Presheaf for MGr {
    type Obj = MarkedGraph;

    fn descriptor(&self) -> InstanceDescriptor {
        match self.product {
            MGrProduct::Vee => InstanceDescriptor { name: "mgr", associative: true, commutative: true, cap: self.cap },
            MGrProduct::Star => {
                InstanceDescriptor { name: "mgr-star", associative: true, commutative: false, cap: self.cap }
            }
        }
    }

    fn size(&self, o: &MarkedGraph) -> usize {
        o.size()
    }

    fn induced(&self, o: &MarkedGraph, mask: Mask) -> MarkedGraph {
        o.induced(mask)
    }

    fn canonical(&self, o: &MarkedGraph) -> MarkedGraph {
        o.canonical_form()
    }

    fn relabel(&self, o: &MarkedGraph, perm: &[usize]) -> MarkedGraph {
        let mut inverse = vec![0; perm.len() + 1];
        for (i, &p) in perm.iter().enumerate() {
            inverse[p + 1] = i + 1;
        }
        MarkedGraph(o.0.reorder(&inverse))
    }

    fn encode(&self, o: &MarkedGraph) -> Vec<u8> {
        let c = o.canonical_form();
        let mut e = vec![c.0.n];
        e.extend_from_slice(&c.0.code.to_be_bytes());
        e
    }

    fn generate(&self, n: usize) -> Vec<MarkedGraph> {
        if n == 0 {
            return vec![MarkedGraph::unit()];
        }
        let smaller = self.generate(n - 1);
        let mut out = BTreeSet::new();
        for g in &smaller {
            for nb in 0..(1 as Mask) << n {
                out.insert(MarkedGraph(g.0.extended(nb)).canonical_form());
            }
        }
        out.into_iter().collect()
    }

    fn cache(&self) -> &EnumCache<MarkedGraph> {
        &self.cache
    }

    fn unit(&self) -> MarkedGraph {
        MarkedGraph::unit()
    }

    fn product(&self, a: &MarkedGraph, b: &MarkedGraph) -> Result<MarkedGraph> {
        if a.size() + b.size() + 1 > MAX_VERTICES {
            return Err(Error::resource("marked graph product", a.size() + b.size(), MAX_VERTICES - 1));
        }
        Ok(match self.product {
            MGrProduct::Vee => a.vee(b),
            MGrProduct::Star => a.star(b),
        }
        .canonical_form())
    }

    fn factor_pairs(&self, a: &MarkedGraph) -> Result<Vec<(MarkedGraph, MarkedGraph)>> {
        match self.product {
            MGrProduct::Vee => {
                let parts = self.irreducible_factors(a)?;
                Ok(split_pairs(&parts, |ps| {
                    ps.iter().fold(MarkedGraph::unit(), |acc, g| acc.vee(g)).canonical_form()
                }))
            }
            MGrProduct::Star => crate::presheaf::brute_force_factor_pairs(self, a),
        }
    }

    /// `∨`-components: the mark together with one component of the
    /// mark-deleted graph.
    fn irreducible_factors(&self, a: &MarkedGraph) -> Result<Vec<MarkedGraph>> {
        if self.product == MGrProduct::Star {
            return Err(Error::Unsupported { op: "irreducible factors", instance: "mgr-star".into() });
        }
        let mut parts: Vec<MarkedGraph> =
            a.without_mark().components().into_iter().map(|m| a.induced(m).canonical_form()).collect();
        parts.sort();
        Ok(parts)
    }

    fn is_irreducible(&self, a: &MarkedGraph) -> Result<bool> {
        match self.product {
            MGrProduct::Vee => Ok(a.size() >= 1 && a.without_mark().is_connected()),
            MGrProduct::Star => {
                if a.size() == 0 {
                    return Ok(false);
                }
                Ok(self.factor_pairs(a)?.iter().all(|(b, c)| b.size() == 0 || c.size() == 0))
            }
        }
    }
}
