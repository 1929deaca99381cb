//! Finite directed graphs, the diagonal algebra `M = l^inf(G0)` and the graph
//! correspondence `E(G)` together with its tensor powers.
//!
//! A tensor of degree `k` is a finitely supported coefficient function on the
//! composable paths of length `k`. Paths are written left to right
//! `e1 e2 ... ek` with `src(e_i) = rng(e_{i+1})`, so that creation operators
//! prepend edges.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::linalg::{C, ONE, ZERO};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub src: usize,
    pub rng: usize,
}

/// A finite directed graph `G = (G0, G1, r, s)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedGraph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    vertex_index: HashMap<String, usize>,
    edge_index: HashMap<String, usize>,
}

impl DirectedGraph {
    /// Builds a graph from vertex names and `(edge, src, rng)` triples.
    pub fn new<V, E>(vertices: V, edges: E) -> Result<Self>
    where
        V: IntoIterator,
        V::Item: Into<String>,
        E: IntoIterator<Item = (String, String, String)>,
    {
        let vertices: Vec<String> = vertices.into_iter().map(Into::into).collect();
        let mut vertex_index = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if vertex_index.insert(v.clone(), i).is_some() {
                return Err(Error::Duplicate(v.clone()));
            }
        }
        let mut out_edges = Vec::new();
        let mut edge_index = HashMap::new();
        for (name, s, t) in edges {
            let src = *vertex_index.get(&s).ok_or_else(|| Error::UnknownVertex(s.clone()))?;
            let rng = *vertex_index.get(&t).ok_or_else(|| Error::UnknownVertex(t.clone()))?;
            if edge_index.insert(name.clone(), out_edges.len()).is_some() {
                return Err(Error::Duplicate(name));
            }
            out_edges.push(Edge { name, src, rng });
        }
        Ok(Self {
            vertices,
            edges: out_edges,
            vertex_index,
            edge_index,
        })
    }

    /// The single-vertex graph with `d` loops `e1..ed`; its correspondence is
    /// `E = C^d` over `M = C`.
    pub fn free(d: usize) -> Self {
        let edges = (1..=d).map(|i| (format!("e{i}"), "o".to_string(), "o".to_string()));
        Self::new(["o"], edges).expect("free graph is well formed")
    }

    /// The directed cycle on vertices `1..=n` with edges `e_i: i -> i+1 (mod n)`.
    pub fn cycle(n: usize) -> Self {
        let vertices: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        let edges = (1..=n).map(|i| {
            (
                format!("e{i}"),
                i.to_string(),
                (i % n + 1).to_string(),
            )
        });
        Self::new(vertices.clone(), edges).expect("cycle graph is well formed")
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn vertex_id(&self, name: &str) -> Result<usize> {
        self.vertex_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn edge_id(&self, name: &str) -> Result<usize> {
        self.edge_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownEdge(name.to_string()))
    }

    /// The opposite graph `G^{-1}`: every edge `e` is replaced by `e^{-1}`
    /// with source and range swapped.
    pub fn opposite(&self) -> Self {
        let edges = self.edges.iter().map(|e| {
            (
                format!("{}^-1", e.name),
                self.vertices[e.rng].clone(),
                self.vertices[e.src].clone(),
            )
        });
        Self::new(self.vertices.clone(), edges).expect("opposite graph is well formed")
    }

    /// All composable paths of length `k`, by lexicographic edge order
    /// (vertex order for `k = 0`).
    pub fn paths_of_length(&self, k: usize) -> Vec<Path> {
        let mut level: Vec<Path> = (0..self.num_vertices()).map(Path::vertex).collect();
        for _ in 0..k {
            let mut next = Vec::new();
            for (e, edge) in self.edges.iter().enumerate() {
                for p in level.iter().filter(|p| p.rng == edge.src) {
                    let mut edges = Vec::with_capacity(p.len() + 1);
                    edges.push(e);
                    edges.extend_from_slice(&p.edges);
                    next.push(Path {
                        edges,
                        src: p.src,
                        rng: edge.rng,
                    });
                }
            }
            level = next;
        }
        level
    }

    pub fn path_from_names(&self, names: &[impl AsRef<str>]) -> Result<Path> {
        let ids = names
            .iter()
            .map(|n| self.edge_id(n.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Path::from_edges(self, ids)
    }

    pub fn path_name(&self, p: &Path) -> String {
        if p.edges.is_empty() {
            self.vertices[p.src].clone()
        } else {
            p.edges
                .iter()
                .map(|&e| self.edges[e].name.as_str())
                .collect::<Vec<_>>()
                .join("")
        }
    }
}

/// A finite path `e1 ... ek`; length-zero paths are vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Path {
    edges: Vec<usize>,
    src: usize,
    rng: usize,
}

impl Path {
    pub fn vertex(v: usize) -> Self {
        Self {
            edges: Vec::new(),
            src: v,
            rng: v,
        }
    }

    pub fn edge(g: &DirectedGraph, e: usize) -> Self {
        let edge = g.edge(e);
        Self {
            edges: vec![e],
            src: edge.src,
            rng: edge.rng,
        }
    }

    pub fn from_edges(g: &DirectedGraph, edges: Vec<usize>) -> Result<Self> {
        let Some(&first) = edges.first() else {
            return Err(Error::NotComposable("empty edge list".into()));
        };
        for w in edges.windows(2) {
            if g.edge(w[0]).src != g.edge(w[1]).rng {
                return Err(Error::NotComposable(format!(
                    "src({}) != rng({})",
                    g.edge(w[0]).name,
                    g.edge(w[1]).name
                )));
            }
        }
        let last = *edges.last().unwrap();
        Ok(Self {
            src: g.edge(last).src,
            rng: g.edge(first).rng,
            edges,
        })
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn src(&self) -> usize {
        self.src
    }

    pub fn rng(&self) -> usize {
        self.rng
    }

    /// `self` followed by `other`, defined when `src(self) = rng(other)`.
    pub fn concat(&self, other: &Path) -> Option<Path> {
        if self.src != other.rng {
            return None;
        }
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        Some(Path {
            edges,
            src: other.src,
            rng: self.rng,
        })
    }

    /// Splits into the first `k` edges and the rest.
    pub fn split_at(&self, g: &DirectedGraph, k: usize) -> (Path, Path) {
        assert!(k <= self.len());
        let head = if k == 0 {
            Path::vertex(self.rng)
        } else {
            Path::from_edges(g, self.edges[..k].to_vec()).expect("subpath is composable")
        };
        let tail = if k == self.len() {
            Path::vertex(self.src)
        } else {
            Path::from_edges(g, self.edges[k..].to_vec()).expect("subpath is composable")
        };
        (head, tail)
    }
}

impl Ord for Path {
    fn cmp(&self, other: &Self) -> Ordering {
        self.edges
            .len()
            .cmp(&other.edges.len())
            .then_with(|| self.edges.cmp(&other.edges))
            .then_with(|| self.src.cmp(&other.src))
    }
}

impl PartialOrd for Path {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// An element of `M = l^inf(G0)`: one complex value per vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement(pub Vec<C>);

impl AlgebraElement {
    pub fn zero(n: usize) -> Self {
        Self(vec![ZERO; n])
    }

    pub fn one(n: usize) -> Self {
        Self(vec![ONE; n])
    }

    pub fn indicator(n: usize, v: usize) -> Self {
        let mut a = Self::zero(n);
        a.0[v] = ONE;
        a
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, v: usize) -> C {
        self.0[v]
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.iter().map(|z| z.conj()).collect())
    }

    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        self.0.iter().all(|z| z.im.abs() <= tol)
    }

    pub fn is_positive(&self, tol: f64) -> bool {
        self.0.iter().all(|z| z.im.abs() <= tol && z.re >= -tol)
    }

    /// Sup norm.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: C) -> Self {
        Self(self.0.iter().map(|z| z * s).collect())
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (self - other).norm()
    }
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: Self) -> AlgebraElement {
        AlgebraElement(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: Self) -> AlgebraElement {
        AlgebraElement(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul for &AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: Self) -> AlgebraElement {
        AlgebraElement(self.0.iter().zip(&rhs.0).map(|(a, b)| a * b).collect())
    }
}

/// An element of `E^{(x)k}`: complex coefficients on composable paths of
/// length `k`. Degree zero tensors are elements of `M` keyed by vertex paths.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrTensor {
    degree: usize,
    num_vertices: usize,
    coeffs: BTreeMap<Path, C>,
}

impl CorrTensor {
    pub fn zero(g: &DirectedGraph, degree: usize) -> Self {
        Self {
            degree,
            num_vertices: g.num_vertices(),
            coeffs: BTreeMap::new(),
        }
    }

    /// `delta_alpha = delta_{e1} (x) ... (x) delta_{ek}`.
    pub fn delta(g: &DirectedGraph, path: Path) -> Self {
        let mut t = Self::zero(g, path.len());
        t.coeffs.insert(path, ONE);
        t
    }

    pub fn delta_edge(g: &DirectedGraph, e: usize) -> Self {
        Self::delta(g, Path::edge(g, e))
    }

    pub fn from_algebra(a: &AlgebraElement) -> Self {
        let coeffs = a
            .0
            .iter()
            .enumerate()
            .filter(|(_, z)| **z != ZERO)
            .map(|(v, z)| (Path::vertex(v), *z))
            .collect();
        Self {
            degree: 0,
            num_vertices: a.len(),
            coeffs,
        }
    }

    pub fn from_entries(
        g: &DirectedGraph,
        degree: usize,
        entries: impl IntoIterator<Item = (Path, C)>,
    ) -> Result<Self> {
        let mut t = Self::zero(g, degree);
        for (p, z) in entries {
            if p.len() != degree {
                return Err(Error::DegreeMismatch {
                    left: degree,
                    right: p.len(),
                });
            }
            *t.coeffs.entry(p).or_insert(ZERO) += z;
        }
        Ok(t)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn coeff(&self, p: &Path) -> C {
        self.coeffs.get(p).copied().unwrap_or(ZERO)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Path, &C)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|z| *z == ZERO)
    }

    /// The degree-zero part viewed as an element of `M`.
    pub fn to_algebra(&self) -> Option<AlgebraElement> {
        if self.degree != 0 {
            return None;
        }
        let mut a = AlgebraElement::zero(self.num_vertices);
        for (p, z) in &self.coeffs {
            a.0[p.src()] += z;
        }
        Some(a)
    }

    pub fn scale(&self, s: C) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(p, z)| (p.clone(), z * s)).collect(),
            ..self.clone()
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                left: self.degree,
                right: other.degree,
            });
        }
        let mut out = self.clone();
        for (p, z) in &other.coeffs {
            *out.coeffs.entry(p.clone()).or_insert(ZERO) += z;
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scale(C::new(-1.0, 0.0)))
    }

    /// Largest coefficient distance to `other` (same degree assumed).
    pub fn distance(&self, other: &Self) -> f64 {
        let mut d: f64 = 0.0;
        for (p, z) in &self.coeffs {
            d = d.max((z - other.coeff(p)).norm());
        }
        for (p, z) in &other.coeffs {
            d = d.max((z - self.coeff(p)).norm());
        }
        d
    }
}

impl Add for &CorrTensor {
    type Output = CorrTensor;
    fn add(self, rhs: Self) -> CorrTensor {
        self.try_add(rhs).expect("degree mismatch in tensor addition")
    }
}

impl Sub for &CorrTensor {
    type Output = CorrTensor;
    fn sub(self, rhs: Self) -> CorrTensor {
        self.try_sub(rhs).expect("degree mismatch in tensor subtraction")
    }
}

impl Neg for &CorrTensor {
    type Output = CorrTensor;
    fn neg(self) -> CorrTensor {
        self.scale(C::new(-1.0, 0.0))
    }
}

impl fmt::Display for CorrTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "deg {} {{", self.degree)?;
        for (i, (p, z)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:?}: {}", p.edges(), z)?;
        }
        write!(f, "}}")
    }
}

/// `<xi, eta>(v) = sum_{src(alpha) = v} conj(xi(alpha)) eta(alpha)`.
pub fn inner_product(xi: &CorrTensor, eta: &CorrTensor) -> Result<AlgebraElement> {
    if xi.degree != eta.degree {
        return Err(Error::DegreeMismatch {
            left: xi.degree,
            right: eta.degree,
        });
    }
    let mut out = AlgebraElement::zero(xi.num_vertices);
    for (p, z) in &xi.coeffs {
        if let Some(w) = eta.coeffs.get(p) {
            out.0[p.src()] += z.conj() * w;
        }
    }
    Ok(out)
}

/// `(phi(a) xi b)(alpha) = a(rng alpha) xi(alpha) b(src alpha)`.
pub fn module_action(a: &AlgebraElement, xi: &CorrTensor, b: &AlgebraElement) -> CorrTensor {
    let coeffs = xi
        .coeffs
        .iter()
        .map(|(p, z)| (p.clone(), a.get(p.rng()) * z * b.get(p.src())))
        .collect();
    CorrTensor {
        coeffs,
        ..xi.clone()
    }
}

/// `(xi (x) eta)(alpha beta) = xi(alpha) eta(beta)` on composable concatenations.
pub fn tensor(xi: &CorrTensor, eta: &CorrTensor) -> CorrTensor {
    let mut coeffs = BTreeMap::new();
    for (p, z) in &xi.coeffs {
        for (q, w) in &eta.coeffs {
            if let Some(pq) = p.concat(q) {
                *coeffs.entry(pq).or_insert(ZERO) += z * w;
            }
        }
    }
    CorrTensor {
        degree: xi.degree + eta.degree,
        num_vertices: xi.num_vertices,
        coeffs,
    }
}

/// `||xi|| = ||<xi, xi>||^{1/2}`.
pub fn corr_norm(xi: &CorrTensor) -> f64 {
    let ip = inner_product(xi, xi).expect("same degree");
    ip.0.iter().map(|z| z.re.max(0.0)).fold(0.0, f64::max).sqrt()
}
