//! Signed labeled multigraphs and their surgery operations.
//!
//! A [`SignedMultigraph`] records a torus action on a compact oriented
//! `2n`-manifold with isolated fixed points: one signed vertex per fixed
//! point, one labeled edge per isotropy 2-sphere. Edge labels are stored
//! **raw** (possibly non-canonical): [`reverse_edge`] mutates a label by
//! negation while flipping both endpoint signs, and the fixed point datum of
//! a vertex ([`SignedMultigraph::vertex_datum`]) canonicalizes on read, so
//! reading a datum before and after a reversal gives the same class.
//!
//! The operations — reversal, edge exchange, connected sum, self connected
//! sum, blow up — all return new graphs; values are never mutated in place.
//! [`validate_graph`] bundles the structural checks (no self-loops,
//! `n`-regularity, absence of the forbidden opposite-data pattern) with the
//! exact-arithmetic screening of the extracted fixed point collection.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{canonical_weight, spans_lattice, Sign, WeightVec};
use crate::fpdata::{
    make_datum, negate_datum, screen, FixedPointCollection, FixedPointDatum, FpError,
    ScreeningReport,
};

/// Errors from graph construction and surgery.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    UnknownVertex(String),
    UnknownEdge(usize),
    DuplicateVertex(String),
    SelfLoop(String),
    /// An edge label had the wrong number of coordinates.
    LabelRank { expected: usize, got: usize },
    /// The two vertices do not carry opposite fixed point data.
    DatumMismatch {
        p: String,
        q: String,
        datum_p: String,
        datum_q: String,
    },
    /// A vertex is joined to both summation points by same-class labels; the
    /// sum would create a self-loop (and the data cannot be realizable).
    ForbiddenPattern { p: String, q: String, r: String },
    /// The incident label multisets could not be matched class by class.
    UnmatchableLabels(String),
    /// Edge exchange requires identical raw labels.
    ExchangeLabelMismatch,
    /// Edge exchange requires four distinct endpoints.
    ExchangeSharedEndpoint,
    /// Blow-up weights must be pairwise distinct and match the vertex.
    BlowUpWeights(String),
    /// The operation needs two distinct vertices.
    SameVertex(String),
    Fp(FpError),
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::UnknownVertex(v) => write!(f, "unknown vertex {v:?}"),
            GraphError::UnknownEdge(i) => write!(f, "unknown edge index {i}"),
            GraphError::DuplicateVertex(v) => write!(f, "duplicate vertex id {v:?}"),
            GraphError::SelfLoop(v) => write!(f, "self-loop at vertex {v:?}"),
            GraphError::LabelRank { expected, got } => {
                write!(f, "expected labels with {expected} coordinates, got {got}")
            }
            GraphError::DatumMismatch {
                p,
                q,
                datum_p,
                datum_q,
            } => write!(
                f,
                "vertices {p:?} and {q:?} do not have opposite data: {datum_p} vs {datum_q}"
            ),
            GraphError::ForbiddenPattern { p, q, r } => write!(
                f,
                "vertex {r:?} is joined to both {p:?} and {q:?} by same-label edges"
            ),
            GraphError::UnmatchableLabels(c) => {
                write!(f, "incident labels of class {c} cannot be matched pairwise")
            }
            GraphError::ExchangeLabelMismatch => {
                write!(f, "edge exchange requires two edges with identical labels")
            }
            GraphError::ExchangeSharedEndpoint => {
                write!(f, "edge exchange requires four distinct endpoints")
            }
            GraphError::BlowUpWeights(msg) => write!(f, "invalid blow-up weights: {msg}"),
            GraphError::SameVertex(v) => write!(f, "need two distinct vertices, got {v:?} twice"),
            GraphError::Fp(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for GraphError {}

impl From<FpError> for GraphError {
    fn from(e: FpError) -> Self {
        GraphError::Fp(e)
    }
}

/// An undirected edge with a raw label. Endpoints are stored in sorted order;
/// the label is *not* auto-canonicalized (see the module docs).
#[derive(Clone, PartialEq, Eq)]
pub struct Edge {
    u: String,
    v: String,
    label: WeightVec,
}

impl Edge {
    #[inline]
    #[must_use]
    pub fn u(&self) -> &str {
        &self.u
    }

    #[inline]
    #[must_use]
    pub fn v(&self) -> &str {
        &self.v
    }

    #[inline]
    #[must_use]
    pub fn label(&self) -> &WeightVec {
        &self.label
    }

    /// Is `x` one of the endpoints?
    #[must_use]
    pub fn touches(&self, x: &str) -> bool {
        self.u == x || self.v == x
    }

    /// The endpoint that is not `x`.
    ///
    /// # Panics
    /// Panics if `x` is not an endpoint.
    #[must_use]
    pub fn other(&self, x: &str) -> &str {
        if self.u == x {
            &self.v
        } else {
            assert_eq!(self.v, x, "vertex is not an endpoint of this edge");
            &self.u
        }
    }
}

impl fmt::Debug for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}--{}; {})", self.u, self.v, self.label)
    }
}

/// A signed labeled multigraph: signed vertices, labeled multi-edges, no
/// self-loops. `n` is the half-dimension the graph describes (its target
/// regularity); `k` is the torus rank of the labels.
#[derive(Clone, PartialEq, Eq)]
pub struct SignedMultigraph {
    k: usize,
    n: usize,
    vertices: BTreeMap<String, Sign>,
    edges: Vec<Edge>,
}

impl SignedMultigraph {
    /// Build a graph, checking endpoints, ranks and the no-self-loop rule.
    pub fn new<I: Into<String>>(
        k: usize,
        n: usize,
        vertices: Vec<(I, Sign)>,
        edges: Vec<(String, String, WeightVec)>,
    ) -> Result<SignedMultigraph, GraphError> {
        let mut vmap = BTreeMap::new();
        for (id, sign) in vertices {
            let id = id.into();
            if vmap.insert(id.clone(), sign).is_some() {
                return Err(GraphError::DuplicateVertex(id));
            }
        }
        let mut g = SignedMultigraph {
            k,
            n,
            vertices: vmap,
            edges: Vec::with_capacity(edges.len()),
        };
        for (u, v, label) in edges {
            g.push_edge(u, v, label)?;
        }
        Ok(g)
    }

    /// The graph with no vertices (the data of the empty manifold).
    #[must_use]
    pub fn empty(k: usize, n: usize) -> SignedMultigraph {
        SignedMultigraph {
            k,
            n,
            vertices: BTreeMap::new(),
            edges: Vec::new(),
        }
    }

    fn push_edge(&mut self, u: String, v: String, label: WeightVec) -> Result<(), GraphError> {
        if !self.vertices.contains_key(&u) {
            return Err(GraphError::UnknownVertex(u));
        }
        if !self.vertices.contains_key(&v) {
            return Err(GraphError::UnknownVertex(v));
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if label.k() != self.k {
            return Err(GraphError::LabelRank {
                expected: self.k,
                got: label.k(),
            });
        }
        let (u, v) = if u <= v { (u, v) } else { (v, u) };
        self.edges.push(Edge { u, v, label });
        Ok(())
    }

    #[inline]
    #[must_use]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    #[must_use]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    #[must_use]
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    #[inline]
    #[must_use]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Vertex ids in sorted order.
    pub fn vertex_ids(&self) -> impl Iterator<Item = &str> {
        self.vertices.keys().map(String::as_str)
    }

    /// `(id, sign)` pairs in sorted id order.
    pub fn vertices(&self) -> impl Iterator<Item = (&str, Sign)> {
        self.vertices.iter().map(|(id, s)| (id.as_str(), *s))
    }

    #[must_use]
    pub fn vertex_sign(&self, v: &str) -> Option<Sign> {
        self.vertices.get(v).copied()
    }

    #[inline]
    #[must_use]
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Indices of the edges incident to `v`, in storage order.
    #[must_use]
    pub fn incident_edges(&self, v: &str) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.touches(v))
            .map(|(i, _)| i)
            .collect()
    }

    /// Indices of the edges joining `u` and `v`, in storage order.
    #[must_use]
    pub fn edges_between(&self, u: &str, v: &str) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.touches(u) && e.touches(v))
            .map(|(i, _)| i)
            .collect()
    }

    #[must_use]
    pub fn degree(&self, v: &str) -> usize {
        self.edges.iter().filter(|e| e.touches(v)).count()
    }

    /// The canonical fixed point datum of a vertex: its sign together with
    /// the labels of its incident edges.
    pub fn vertex_datum(&self, v: &str) -> Result<FixedPointDatum, GraphError> {
        let sign = self
            .vertex_sign(v)
            .ok_or_else(|| GraphError::UnknownVertex(v.to_string()))?;
        let labels: Vec<WeightVec> = self
            .edges
            .iter()
            .filter(|e| e.touches(v))
            .map(|e| e.label.clone())
            .collect();
        Ok(make_datum(sign, labels)?)
    }

    /// Extract the fixed point collection (one datum per vertex). Fails on
    /// irregular graphs, whose data would have mixed arities.
    pub fn collection(&self) -> Result<FixedPointCollection, GraphError> {
        let mut points = Vec::with_capacity(self.vertices.len());
        for v in self.vertices.keys() {
            points.push(self.vertex_datum(v)?);
        }
        Ok(FixedPointCollection::new(self.k, self.n, points)?)
    }

    /// Rename every vertex through `f` (must stay injective).
    pub fn rename_vertices(
        &self,
        mut f: impl FnMut(&str) -> String,
    ) -> Result<SignedMultigraph, GraphError> {
        let vertices: Vec<(String, Sign)> =
            self.vertices.iter().map(|(id, s)| (f(id), *s)).collect();
        let mut map = BTreeMap::new();
        for ((old, _), (new, _)) in self.vertices.iter().zip(&vertices) {
            map.insert(old.clone(), new.clone());
        }
        let edges = self
            .edges
            .iter()
            .map(|e| (map[&e.u].clone(), map[&e.v].clone(), e.label.clone()))
            .collect();
        SignedMultigraph::new(self.k, self.n, vertices, edges)
    }
}

impl fmt::Debug for SignedMultigraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SignedMultigraph(k={}, n={}, {} vertices, {} edges)",
            self.k,
            self.n,
            self.vertices.len(),
            self.edges.len()
        )
    }
}

#[derive(Serialize, Deserialize)]
struct VertexRepr {
    id: String,
    sign: Sign,
}

#[derive(Serialize, Deserialize)]
struct EdgeRepr {
    u: String,
    v: String,
    label: WeightVec,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    k: usize,
    n: usize,
    vertices: Vec<VertexRepr>,
    edges: Vec<EdgeRepr>,
}

impl Serialize for SignedMultigraph {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GraphRepr {
            k: self.k,
            n: self.n,
            vertices: self
                .vertices
                .iter()
                .map(|(id, sign)| VertexRepr {
                    id: id.clone(),
                    sign: *sign,
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeRepr {
                    u: e.u.clone(),
                    v: e.v.clone(),
                    label: e.label.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SignedMultigraph {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = GraphRepr::deserialize(d)?;
        SignedMultigraph::new(
            repr.k,
            repr.n,
            repr.vertices.into_iter().map(|v| (v.id, v.sign)).collect(),
            repr.edges.into_iter().map(|e| (e.u, e.v, e.label)).collect(),
        )
        .map_err(serde::de::Error::custom)
    }
}

/// Negate one edge's label and both endpoint signs.
///
/// The fixed point data of both endpoints are unchanged as equivalence
/// classes, so the new graph describes the same manifold.
pub fn reverse_edge(g: &SignedMultigraph, e: usize) -> Result<SignedMultigraph, GraphError> {
    let edge = g.edges.get(e).ok_or(GraphError::UnknownEdge(e))?;
    let mut out = g.clone();
    out.edges[e].label = edge.label.neg();
    let (u, v) = (edge.u.clone(), edge.v.clone());
    for w in [u, v] {
        let s = out.vertices.get_mut(&w).expect("endpoint exists");
        *s = s.flip();
    }
    Ok(out)
}

/// Exchange two edges with identical raw labels and four distinct endpoints:
/// `(u1,v1,a),(u2,v2,a)` become `(u1,v2,a),(v1,u2,a)`. Signs are untouched.
///
/// Endpoints are taken in stored (sorted) order, so the rewiring is
/// deterministic. Exposed for completeness; neither reduction engine uses it.
pub fn exchange_edges(
    g: &SignedMultigraph,
    e1: usize,
    e2: usize,
) -> Result<SignedMultigraph, GraphError> {
    let a = g.edges.get(e1).ok_or(GraphError::UnknownEdge(e1))?.clone();
    let b = g.edges.get(e2).ok_or(GraphError::UnknownEdge(e2))?.clone();
    if a.label != b.label {
        return Err(GraphError::ExchangeLabelMismatch);
    }
    let ids = [&a.u, &a.v, &b.u, &b.v];
    for i in 0..4 {
        for j in i + 1..4 {
            if ids[i] == ids[j] {
                return Err(GraphError::ExchangeSharedEndpoint);
            }
        }
    }
    let mut out = g.clone();
    // Remove the higher index first so the lower one stays valid.
    let (hi, lo) = if e1 > e2 { (e1, e2) } else { (e2, e1) };
    out.edges.remove(hi);
    out.edges.remove(lo);
    out.push_edge(a.u, b.v, a.label.clone())?;
    out.push_edge(a.v, b.u, a.label)?;
    Ok(out)
}

/// Check Def-4.5-style preconditions and merge two opposite-data vertices of
/// one graph: drop `p`, `q` and every edge between them, then join the
/// remaining partners class by class.
fn merge_opposite_pair(
    g: &SignedMultigraph,
    p: &str,
    q: &str,
) -> Result<SignedMultigraph, GraphError> {
    if p == q {
        return Err(GraphError::SameVertex(p.to_string()));
    }
    let dp = g.vertex_datum(p)?;
    let dq = g.vertex_datum(q)?;
    if dp != negate_datum(&dq) {
        return Err(GraphError::DatumMismatch {
            p: p.to_string(),
            q: q.to_string(),
            datum_p: dp.to_string(),
            datum_q: dq.to_string(),
        });
    }

    // Forbidden pattern: a common neighbor reached from both p and q by
    // same-class labels would become a self-loop.
    for (r, _) in g.vertices() {
        if r == p || r == q {
            continue;
        }
        let classes_p: BTreeSet<WeightVec> = g
            .edges
            .iter()
            .filter(|e| e.touches(p) && e.touches(r))
            .map(|e| canonical_weight(&e.label).0)
            .collect();
        if classes_p.is_empty() {
            continue;
        }
        for e in g.edges.iter().filter(|e| e.touches(q) && e.touches(r)) {
            if classes_p.contains(&canonical_weight(&e.label).0) {
                return Err(GraphError::ForbiddenPattern {
                    p: p.to_string(),
                    q: q.to_string(),
                    r: r.to_string(),
                });
            }
        }
    }

    // Group the non-(p,q) incident edges of each side by canonical label
    // class. Edges between p and q cancel against each other and simply
    // disappear.
    let mut side_p: BTreeMap<WeightVec, Vec<usize>> = BTreeMap::new();
    let mut side_q: BTreeMap<WeightVec, Vec<usize>> = BTreeMap::new();
    for (i, e) in g.edges.iter().enumerate() {
        if e.touches(p) && e.touches(q) {
            continue;
        }
        if e.touches(p) {
            side_p.entry(canonical_weight(&e.label).0).or_default().push(i);
        } else if e.touches(q) {
            side_q.entry(canonical_weight(&e.label).0).or_default().push(i);
        }
    }
    if side_p.keys().collect::<Vec<_>>() != side_q.keys().collect::<Vec<_>>() {
        let odd = side_p
            .keys()
            .chain(side_q.keys())
            .find(|c| side_p.contains_key(*c) != side_q.contains_key(*c))
            .expect("some class differs");
        return Err(GraphError::UnmatchableLabels(odd.to_string()));
    }

    let mut out = g.clone();
    let sort_key = |i: &usize| {
        let e = &g.edges[*i];
        (e.other(if e.touches(p) { p } else { q }).to_string(), *i)
    };
    let mut new_edges: Vec<(String, String, WeightVec)> = Vec::new();
    for (class, mut ep) in side_p {
        let mut eq = side_q.remove(&class).expect("checked equal class sets");
        if ep.len() != eq.len() {
            return Err(GraphError::UnmatchableLabels(class.to_string()));
        }
        // Deterministic greedy matching: both sides sorted by partner id.
        ep.sort_by_key(sort_key);
        eq.sort_by_key(sort_key);
        for (&i, &j) in ep.iter().zip(&eq) {
            let label_p = g.edges[i].label.clone();
            if out.edges[j].label != label_p {
                // Align by reversing the q-side edge: negate its label and
                // flip both endpoint signs. The flip at q is immaterial (q is
                // removed), the flip at the partner survives into the result.
                debug_assert_eq!(out.edges[j].label.neg(), label_p, "labels are class-equal");
                let y = out.edges[j].other(q).to_string();
                out.edges[j].label = out.edges[j].label.neg();
                for w in [q.to_string(), y] {
                    let s = out.vertices.get_mut(&w).expect("endpoint exists");
                    *s = s.flip();
                }
            }
            let x = g.edges[i].other(p).to_string();
            let y = out.edges[j].other(q).to_string();
            debug_assert_ne!(x, y, "forbidden pattern was excluded above");
            new_edges.push((x, y, label_p));
        }
    }

    out.edges.retain(|e| !e.touches(p) && !e.touches(q));
    out.vertices.remove(p);
    out.vertices.remove(q);
    for (x, y, label) in new_edges {
        out.push_edge(x, y, label)?;
    }
    Ok(out)
}

/// Connected sum of two graphs at `p ∈ g1`, `q ∈ g2`.
///
/// Requires the data to be opposite: `Σ_p = −Σ_q` as equivalence classes.
/// The result is the disjoint union minus `p`, `q` and their edges, with the
/// dangling partner endpoints joined pairwise by their matched labels.
/// Vertices of `g2` whose ids collide with `g1` are renamed with an `R.`
/// prefix. The fixed point collection of the result is exactly
/// `(Σ_1 ∖ Σ_p) ⊎ (Σ_2 ∖ Σ_q)`.
pub fn connected_sum(
    g1: &SignedMultigraph,
    p: &str,
    g2: &SignedMultigraph,
    q: &str,
) -> Result<SignedMultigraph, GraphError> {
    if g1.vertex_sign(p).is_none() {
        return Err(GraphError::UnknownVertex(p.to_string()));
    }
    if g2.vertex_sign(q).is_none() {
        return Err(GraphError::UnknownVertex(q.to_string()));
    }
    let (union, q_name) = disjoint_union(g1, g2)?;
    let q_new = q_name(q);
    merge_opposite_pair(&union, p, &q_new)
}

/// Self connected sum of one graph at two of its own vertices.
///
/// Same preconditions as [`connected_sum`] plus: no vertex may be joined to
/// both `p` and `q` by same-class labels (the forbidden pattern — the sum
/// would need a self-loop). If `p` and `q` are the only vertices, the result
/// is the empty graph.
pub fn self_connected_sum(
    g: &SignedMultigraph,
    p: &str,
    q: &str,
) -> Result<SignedMultigraph, GraphError> {
    if g.vertex_sign(p).is_none() {
        return Err(GraphError::UnknownVertex(p.to_string()));
    }
    if g.vertex_sign(q).is_none() {
        return Err(GraphError::UnknownVertex(q.to_string()));
    }
    merge_opposite_pair(g, p, q)
}

/// Disjoint union; `g2` vertices with colliding ids get an `R.` prefix
/// (repeated until free). Returns the union and the rename function applied
/// to `g2`'s ids.
pub fn disjoint_union(
    g1: &SignedMultigraph,
    g2: &SignedMultigraph,
) -> Result<(SignedMultigraph, impl Fn(&str) -> String), GraphError> {
    if g1.k != g2.k || g1.n != g2.n {
        return Err(GraphError::LabelRank {
            expected: g1.k,
            got: g2.k,
        });
    }
    let taken: BTreeSet<String> = g1.vertices.keys().cloned().collect();
    let rename = move |id: &str| {
        let mut name = id.to_string();
        while taken.contains(&name) {
            name = format!("R.{name}");
        }
        name
    };
    let g2r = g2.rename_vertices(|id| rename(id))?;
    let mut out = g1.clone();
    for (id, sign) in g2r.vertices {
        if out.vertices.insert(id.clone(), sign).is_some() {
            return Err(GraphError::DuplicateVertex(id));
        }
    }
    for e in g2r.edges {
        out.edges.push(e);
    }
    Ok((out, rename))
}

/// Blow up a vertex: replace `p` by the projective-space model graph on the
/// chosen weights.
///
/// `chosen_weights` must be pairwise distinct and must agree with the labels
/// of `p`'s incident edges up to reversal; the edges are first reversed to
/// realize exactly these labels (adjusting `ε(p)` along the way), and then
/// the graph is summed at `p` with the `n`-dimensional projective model on
/// the chosen weights — orientation-reversed if the adjusted `ε(p)` is `+1`
/// — at its base vertex `q0`. The vertex count grows by exactly `n − 1`.
pub fn blow_up(
    g: &SignedMultigraph,
    p: &str,
    chosen_weights: &[WeightVec],
) -> Result<SignedMultigraph, GraphError> {
    if g.vertex_sign(p).is_none() {
        return Err(GraphError::UnknownVertex(p.to_string()));
    }
    for i in 0..chosen_weights.len() {
        for j in i + 1..chosen_weights.len() {
            if chosen_weights[i] == chosen_weights[j] {
                return Err(GraphError::BlowUpWeights(format!(
                    "repeated weight {}",
                    chosen_weights[i]
                )));
            }
        }
    }
    let incident = g.incident_edges(p);
    if incident.len() != chosen_weights.len() {
        return Err(GraphError::BlowUpWeights(format!(
            "{} weights given for a vertex of degree {}",
            chosen_weights.len(),
            incident.len()
        )));
    }

    // Reverse p's edges so their raw labels become exactly the chosen ones.
    let mut adjusted = g.clone();
    let mut unused: Vec<&WeightVec> = chosen_weights.iter().collect();
    for &i in &incident {
        let label = adjusted.edges[i].label.clone();
        let direct = unused.iter().position(|w| **w == label);
        match direct {
            Some(pos) => {
                unused.remove(pos);
            }
            None => {
                let flipped = unused.iter().position(|w| **w == label.neg());
                match flipped {
                    Some(pos) => {
                        unused.remove(pos);
                        adjusted = reverse_edge(&adjusted, i)?;
                    }
                    None => {
                        return Err(GraphError::BlowUpWeights(format!(
                            "edge label {label} matches no remaining chosen weight"
                        )));
                    }
                }
            }
        }
    }

    let reversed_model = adjusted.vertex_sign(p) == Some(Sign::Plus);
    let model = crate::models::cpn_graph(g.k, chosen_weights, reversed_model)?;
    connected_sum(&adjusted, p, &model, "q0")
}

/// Negate every vertex sign; edges unchanged. Describes the same manifold
/// with reversed orientation.
#[must_use]
pub fn reverse_orientation(g: &SignedMultigraph) -> SignedMultigraph {
    let mut out = g.clone();
    for s in out.vertices.values_mut() {
        *s = s.flip();
    }
    out
}

/// Structural and arithmetic verdict for a graph.
#[derive(Debug, Clone, Serialize)]
pub struct GraphReport {
    /// Structural violations (self-loops, irregularity, forbidden pattern,
    /// failed effectiveness), in a human-readable form.
    pub violations: Vec<String>,
    /// Screening of the extracted fixed point collection; `None` when the
    /// graph is too irregular to extract one.
    pub screening: Option<ScreeningReport>,
    /// No structural violations and the screening (if any) found none.
    pub pass: bool,
}

/// Check a graph end to end: (i) no self-loops, (ii) `n`-regularity,
/// (iii) absence of the forbidden opposite-data pattern, (iv) the extracted
/// collection passes all fixed-point validators, and optionally (v) each
/// vertex's labels span the full lattice `Z^k` (effectiveness).
#[must_use]
pub fn validate_graph(g: &SignedMultigraph, require_effective: bool) -> GraphReport {
    let mut violations = Vec::new();

    for e in &g.edges {
        if e.u == e.v {
            violations.push(format!("self-loop at {:?}", e.u));
        }
    }

    let mut regular = true;
    for (v, _) in g.vertices() {
        let d = g.degree(v);
        if d != g.n {
            regular = false;
            violations.push(format!(
                "vertex {v:?} has degree {d}, expected {n}",
                n = g.n
            ));
        }
    }

    // Forbidden pattern over all opposite-data vertex pairs.
    if regular {
        let ids: Vec<&str> = g.vertex_ids().collect();
        let data: Vec<FixedPointDatum> = ids
            .iter()
            .map(|v| g.vertex_datum(v).expect("regular graph"))
            .collect();
        for i in 0..ids.len() {
            for j in i + 1..ids.len() {
                if data[i] != negate_datum(&data[j]) {
                    continue;
                }
                for (r, _) in g.vertices() {
                    if r == ids[i] || r == ids[j] {
                        continue;
                    }
                    let classes_i: BTreeSet<WeightVec> = g
                        .edges
                        .iter()
                        .filter(|e| e.touches(ids[i]) && e.touches(r))
                        .map(|e| canonical_weight(&e.label).0)
                        .collect();
                    let hit = g
                        .edges
                        .iter()
                        .filter(|e| e.touches(ids[j]) && e.touches(r))
                        .any(|e| classes_i.contains(&canonical_weight(&e.label).0));
                    if hit {
                        violations.push(format!(
                            "vertices {:?} and {:?} have opposite data and same-label edges \
                             to {r:?}",
                            ids[i], ids[j]
                        ));
                    }
                }
            }
        }
    }

    if require_effective {
        for (v, _) in g.vertices() {
            let labels: Vec<WeightVec> = g
                .edges
                .iter()
                .filter(|e| e.touches(v))
                .map(|e| e.label.clone())
                .collect();
            match spans_lattice(&labels, g.k) {
                Ok(true) => {}
                Ok(false) => violations.push(format!(
                    "labels at {v:?} do not span the full rank-{k} lattice",
                    k = g.k
                )),
                Err(e) => violations.push(format!("effectiveness check at {v:?}: {e}")),
            }
        }
    }

    let screening = if regular {
        match g.collection() {
            Ok(c) => Some(screen(&c)),
            Err(e) => {
                violations.push(format!("cannot extract fixed point data: {e}"));
                None
            }
        }
    } else {
        None
    };

    let pass = violations.is_empty()
        && screening
            .as_ref()
            .map(|s| s.realizable_candidate)
            .unwrap_or(g.is_empty());
    GraphReport {
        violations,
        screening,
        pass,
    }
}

/// The unique reversal normal form: every edge label canonical (first
/// nonzero coordinate positive), endpoint signs adjusted by the reversals
/// performed.
#[must_use]
pub fn reversal_normal_form(g: &SignedMultigraph) -> SignedMultigraph {
    let mut out = g.clone();
    for i in 0..out.edges.len() {
        let (canon, flipped) = canonical_weight(&out.edges[i].label);
        if flipped {
            out.edges[i].label = canon;
            let (u, v) = (out.edges[i].u.clone(), out.edges[i].v.clone());
            for w in [u, v] {
                let s = out.vertices.get_mut(&w).expect("endpoint exists");
                *s = s.flip();
            }
        }
    }
    out
}

/// Are two graphs isomorphic up to edge reversals?
///
/// Both graphs are put in reversal normal form and then compared by signed-
/// labeled-multigraph isomorphism (backtracking over vertices with equal
/// invariants). Intended for tests and assertions on the small graphs this
/// crate works with.
#[must_use]
pub fn iso_up_to_reversal(g1: &SignedMultigraph, g2: &SignedMultigraph) -> bool {
    let a = reversal_normal_form(g1);
    let b = reversal_normal_form(g2);
    if a.k != b.k
        || a.n != b.n
        || a.vertex_count() != b.vertex_count()
        || a.edge_count() != b.edge_count()
    {
        return false;
    }

    // Invariant key: sign plus sorted incident labels.
    let key = |g: &SignedMultigraph, v: &str| -> (Sign, Vec<WeightVec>) {
        let mut labels: Vec<WeightVec> = g
            .edges
            .iter()
            .filter(|e| e.touches(v))
            .map(|e| e.label.clone())
            .collect();
        labels.sort();
        (g.vertex_sign(v).expect("vertex exists"), labels)
    };
    let ids_a: Vec<String> = a.vertices.keys().cloned().collect();
    let ids_b: Vec<String> = b.vertices.keys().cloned().collect();
    let keys_a: Vec<_> = ids_a.iter().map(|v| key(&a, v)).collect();
    let keys_b: Vec<_> = ids_b.iter().map(|v| key(&b, v)).collect();
    {
        let mut ka = keys_a.clone();
        let mut kb = keys_b.clone();
        ka.sort();
        kb.sort();
        if ka != kb {
            return false;
        }
    }

    let labels_between = |g: &SignedMultigraph, u: &str, v: &str| -> Vec<WeightVec> {
        let mut ls: Vec<WeightVec> = g
            .edges
            .iter()
            .filter(|e| e.touches(u) && e.touches(v))
            .map(|e| e.label.clone())
            .collect();
        ls.sort();
        ls
    };

    fn assign(
        pos: usize,
        ids_a: &[String],
        ids_b: &[String],
        keys_a: &[(Sign, Vec<WeightVec>)],
        keys_b: &[(Sign, Vec<WeightVec>)],
        used: &mut Vec<bool>,
        map: &mut Vec<usize>,
        consistent: &dyn Fn(usize, usize, &[usize]) -> bool,
    ) -> bool {
        if pos == ids_a.len() {
            return true;
        }
        for cand in 0..ids_b.len() {
            if used[cand] || keys_a[pos] != keys_b[cand] {
                continue;
            }
            if !consistent(pos, cand, map) {
                continue;
            }
            used[cand] = true;
            map.push(cand);
            if assign(pos + 1, ids_a, ids_b, keys_a, keys_b, used, map, consistent) {
                return true;
            }
            map.pop();
            used[cand] = false;
        }
        false
    }

    let consistent = |pos: usize, cand: usize, map: &[usize]| -> bool {
        for (prev, &prev_cand) in map.iter().enumerate() {
            if labels_between(&a, &ids_a[pos], &ids_a[prev])
                != labels_between(&b, &ids_b[cand], &ids_b[prev_cand])
            {
                return false;
            }
        }
        true
    };

    let mut used = vec![false; ids_b.len()];
    let mut map = Vec::with_capacity(ids_a.len());
    assign(
        0, &ids_a, &ids_b, &keys_a, &keys_b, &mut used, &mut map, &consistent,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use crate::fpdata::verify_abbv;

    fn w(v: i64) -> WeightVec {
        WeightVec::scalar(v)
    }

    fn graph(
        n: usize,
        vertices: &[(&str, Sign)],
        edges: &[(&str, &str, i64)],
    ) -> SignedMultigraph {
        SignedMultigraph::new(
            1,
            n,
            vertices.iter().map(|(id, s)| (*id, *s)).collect(),
            edges
                .iter()
                .map(|(u, v, l)| (u.to_string(), v.to_string(), w(*l)))
                .collect(),
        )
        .unwrap()
    }

    fn sphere(n_labels: &[i64]) -> SignedMultigraph {
        let edges: Vec<(&str, &str, i64)> =
            n_labels.iter().map(|&l| ("p", "q", l)).collect();
        graph(
            n_labels.len(),
            &[("p", Sign::Plus), ("q", Sign::Minus)],
            &edges,
        )
    }

    #[test]
    fn construction_rejects_bad_graphs() {
        let bad = SignedMultigraph::new(
            1,
            1,
            vec![("p", Sign::Plus)],
            vec![("p".into(), "p".into(), w(1))],
        );
        assert!(matches!(bad, Err(GraphError::SelfLoop(_))));
        let bad = SignedMultigraph::new(
            1,
            1,
            vec![("p", Sign::Plus)],
            vec![("p".into(), "r".into(), w(1))],
        );
        assert!(matches!(bad, Err(GraphError::UnknownVertex(_))));
        let bad = SignedMultigraph::new(
            1,
            1,
            vec![("p", Sign::Plus), ("p", Sign::Minus)],
            vec![],
        );
        assert!(matches!(bad, Err(GraphError::DuplicateVertex(_))));
    }

    #[test]
    fn vertex_datum_canonicalizes() {
        let g = graph(
            2,
            &[("p", Sign::Plus), ("x", Sign::Plus), ("y", Sign::Plus)],
            &[("p", "x", -1), ("p", "y", 2)],
        );
        let d = g.vertex_datum("p").unwrap();
        assert_eq!(d.to_string(), "[-,1,2]");
    }

    #[test]
    fn reverse_edge_flips_label_and_endpoint_signs() {
        let g = sphere(&[3, 1, 2]);
        let e = g.edges_between("p", "q")[0];
        assert_eq!(g.edges()[e].label(), &w(3));
        let r = reverse_edge(&g, e).unwrap();
        assert_eq!(r.edges()[e].label(), &w(-3));
        assert_eq!(r.vertex_sign("p"), Some(Sign::Minus));
        assert_eq!(r.vertex_sign("q"), Some(Sign::Plus));
        // Double reversal is the identity.
        assert_eq!(reverse_edge(&r, e).unwrap(), g);
        // Vertex data are unchanged as classes.
        assert_eq!(r.vertex_datum("p").unwrap(), g.vertex_datum("p").unwrap());
        assert_eq!(r.vertex_datum("q").unwrap(), g.vertex_datum("q").unwrap());
    }

    #[test]
    fn exchange_edges_rewires_deterministically() {
        let g = graph(
            1,
            &[
                ("a", Sign::Plus),
                ("b", Sign::Plus),
                ("c", Sign::Plus),
                ("d", Sign::Plus),
            ],
            &[("a", "b", 5), ("c", "d", 5)],
        );
        let x = exchange_edges(&g, 0, 1).unwrap();
        assert_eq!(x.edges_between("a", "d").len(), 1);
        assert_eq!(x.edges_between("b", "c").len(), 1);
        assert!(iso_up_to_reversal(&g, &x));
        // Exchanging the new pair again stays isomorphic.
        let y = exchange_edges(&x, 0, 1).unwrap();
        assert!(iso_up_to_reversal(&g, &y));

        let bad = graph(
            1,
            &[
                ("a", Sign::Plus),
                ("b", Sign::Plus),
                ("c", Sign::Plus),
                ("d", Sign::Plus),
            ],
            &[("a", "b", 5), ("c", "d", 7)],
        );
        assert!(matches!(
            exchange_edges(&bad, 0, 1),
            Err(GraphError::ExchangeLabelMismatch)
        ));
        let shared = graph(
            2,
            &[("a", Sign::Plus), ("b", Sign::Plus), ("c", Sign::Plus)],
            &[("a", "b", 5), ("a", "c", 5)],
        );
        assert!(matches!(
            exchange_edges(&shared, 0, 1),
            Err(GraphError::ExchangeSharedEndpoint)
        ));
    }

    #[test]
    fn sphere_plus_reversed_sphere_is_a_sphere() {
        let g1 = sphere(&[1, 2, 3]);
        let g2 = reverse_orientation(&sphere(&[1, 2, 3]));
        // Sum at the + vertex of g1 and the (now +→−… reversed) p of g2:
        // Σ_p(g1) = [+,1,2,3], Σ_p(g2) = [−,1,2,3] = −Σ_p(g1).
        let s = connected_sum(&g1, "p", &g2, "p").unwrap();
        assert_eq!(s.vertex_count(), 2);
        assert_eq!(s.edge_count(), 3);
        assert!(iso_up_to_reversal(&s, &sphere(&[1, 2, 3])));
        // Collection invariant: (Σ₁ ∖ Σ_p) ⊎ (Σ₂ ∖ Σ_q).
        assert_eq!(
            s.collection().unwrap(),
            sphere(&[1, 2, 3]).collection().unwrap()
        );
    }

    #[test]
    fn connected_sum_rejects_datum_mismatch() {
        let g1 = sphere(&[1, 2, 3]);
        let g2 = sphere(&[1, 2, 3]);
        // Σ_p = [+,1,2,3] on both sides; need the negation.
        assert!(matches!(
            connected_sum(&g1, "p", &g2, "p"),
            Err(GraphError::DatumMismatch { .. })
        ));
    }

    #[test]
    fn self_sum_of_a_two_vertex_graph_is_empty() {
        let g = sphere(&[4, 5, 6]);
        let out = self_connected_sum(&g, "p", "q").unwrap();
        assert!(out.is_empty());
        assert_eq!(out.n(), 3);
        assert!(validate_graph(&out, false).pass);
    }

    #[test]
    fn self_sum_rewires_distinct_label_neighbors() {
        // p and q have opposite data {a,b,c} = {1,2,3}; r is joined to p by
        // b=2 and to q by c=3 (different labels, allowed). After the sum r
        // keeps degree 2: a new b-edge to q's b-partner y2 and a new c-edge
        // to p's c-partner y.
        let g = graph(
            3,
            &[
                ("p", Sign::Plus),
                ("q", Sign::Minus),
                ("r", Sign::Plus),
                ("x", Sign::Plus),
                ("x2", Sign::Plus),
                ("y", Sign::Plus),
                ("y2", Sign::Plus),
            ],
            &[
                ("p", "x", 1),
                ("p", "r", 2),
                ("p", "y", 3),
                ("q", "x2", 1),
                ("q", "y2", 2),
                ("q", "r", 3),
            ],
        );
        let out = self_connected_sum(&g, "p", "q").unwrap();
        assert_eq!(out.vertex_count(), 5);
        assert_eq!(out.edge_count(), 3);
        assert_eq!(out.edges_between("x", "x2").len(), 1);
        assert_eq!(out.edges_between("r", "y2").len(), 1);
        assert_eq!(out.edges_between("r", "y").len(), 1);
        assert_eq!(
            out.edges()[out.edges_between("r", "y2")[0]].label(),
            &w(2)
        );
        assert_eq!(out.edges()[out.edges_between("r", "y")[0]].label(), &w(3));
    }

    #[test]
    fn self_sum_rejects_forbidden_pattern() {
        // r is joined to both p and q by label 2 — the rewiring would need a
        // self-loop at r.
        let g = graph(
            3,
            &[
                ("p", Sign::Plus),
                ("q", Sign::Minus),
                ("r", Sign::Plus),
                ("x", Sign::Plus),
                ("x2", Sign::Plus),
                ("y", Sign::Plus),
                ("y2", Sign::Plus),
            ],
            &[
                ("p", "x", 1),
                ("p", "r", 2),
                ("p", "y", 3),
                ("q", "x2", 1),
                ("q", "r", 2),
                ("q", "y2", 3),
            ],
        );
        assert!(matches!(
            self_connected_sum(&g, "p", "q"),
            Err(GraphError::ForbiddenPattern { .. })
        ));
    }

    #[test]
    fn self_sum_cancels_direct_edges_and_aligns_reversed_labels() {
        // One direct p–q edge (label 3) cancels; the remaining labels {1,2}
        // match, but q's 2-edge is stored reversed (−2), so alignment
        // reverses it and flips the partner's sign. q's stored sign is +
        // because the −2 label already contributes one flip to its class
        // [−,1,2,3].
        let g = graph(
            3,
            &[
                ("p", Sign::Plus),
                ("q", Sign::Plus),
                ("x", Sign::Plus),
                ("x2", Sign::Plus),
                ("y", Sign::Plus),
                ("y2", Sign::Minus),
            ],
            &[
                ("p", "q", 3),
                ("p", "x", 1),
                ("p", "y", 2),
                ("q", "x2", 1),
                ("q", "y2", -2),
            ],
        );
        assert_eq!(
            g.vertex_datum("p").unwrap(),
            negate_datum(&g.vertex_datum("q").unwrap())
        );
        let out = self_connected_sum(&g, "p", "q").unwrap();
        assert_eq!(out.vertex_count(), 4);
        assert_eq!(out.edge_count(), 2);
        assert_eq!(out.edges()[out.edges_between("y", "y2")[0]].label(), &w(2));
        // y2's sign flipped by the alignment reversal.
        assert_eq!(out.vertex_sign("y2"), Some(Sign::Plus));
        assert_eq!(out.vertex_sign("y"), Some(Sign::Plus));
    }

    #[test]
    fn validate_graph_flags_violations() {
        // Irregular graph.
        let g = graph(
            3,
            &[("p", Sign::Plus), ("q", Sign::Minus)],
            &[("p", "q", 1)],
        );
        let rep = validate_graph(&g, false);
        assert!(!rep.pass);
        assert!(rep.violations.iter().any(|v| v.contains("degree")));
        assert!(rep.screening.is_none());

        // Forbidden pattern: Σ_p1 = −Σ_p2, both joined to p3 by label 1.
        let g = graph(
            2,
            &[
                ("p1", Sign::Plus),
                ("p2", Sign::Minus),
                ("p3", Sign::Plus),
                ("p4", Sign::Minus),
            ],
            &[
                ("p1", "p3", 1),
                ("p1", "p4", 2),
                ("p2", "p3", 1),
                ("p2", "p4", 2),
            ],
        );
        let rep = validate_graph(&g, false);
        assert!(!rep.pass);
        assert!(rep
            .violations
            .iter()
            .any(|v| v.contains("opposite data and same-label edges")));

        // Effectiveness: {2, 4} does not span Z.
        let g = sphere(&[2, 4]);
        assert!(validate_graph(&g, false).pass);
        let rep = validate_graph(&g, true);
        assert!(!rep.pass);
        assert!(rep.violations.iter().any(|v| v.contains("span")));
    }

    #[test]
    fn validate_graph_accepts_spheres() {
        for labels in [vec![1, 2, 3], vec![1, 1], vec![5]] {
            let rep = validate_graph(&sphere(&labels), false);
            assert!(rep.pass, "sphere {labels:?}: {:?}", rep.violations);
            let screening = rep.screening.unwrap();
            assert!(screening.realizable_candidate);
        }
        let empty = SignedMultigraph::empty(1, 3);
        assert!(validate_graph(&empty, false).pass);
    }

    #[test]
    fn iso_up_to_reversal_examples() {
        let g = sphere(&[1, 2, 3]);
        // Reverse one edge: same graph up to reversal.
        let r = reverse_edge(&g, 1).unwrap();
        assert_ne!(g, r);
        assert!(iso_up_to_reversal(&g, &r));
        // Different labels: not isomorphic.
        assert!(!iso_up_to_reversal(&g, &sphere(&[1, 2, 4])));
        // Renamed vertices: isomorphic.
        let renamed = g.rename_vertices(|v| format!("{v}!")).unwrap();
        assert!(iso_up_to_reversal(&g, &renamed));
        // A sphere is isomorphic to its orientation-reverse: swapping the two
        // vertices realizes the reversal.
        assert!(iso_up_to_reversal(&g, &reverse_orientation(&g)));
        // The projective plane is not (its signature is ±1): q0(+), q1(−),
        // q2(+) with edges 1, 2, 1 has no sign-compatible relabeling of its
        // reverse.
        let cp2 = graph(
            2,
            &[("q0", Sign::Plus), ("q1", Sign::Minus), ("q2", Sign::Plus)],
            &[("q0", "q1", 1), ("q0", "q2", 2), ("q1", "q2", 1)],
        );
        assert!(!iso_up_to_reversal(&cp2, &reverse_orientation(&cp2)));
    }

    #[test]
    fn connected_sum_collection_invariant() {
        // Hand-built 4-vertex graph summed with a sphere: the collection of
        // the result is the disjoint union minus the two summed points.
        let g1 = graph(
            2,
            &[
                ("a", Sign::Plus),
                ("b", Sign::Minus),
                ("c", Sign::Plus),
                ("d", Sign::Minus),
            ],
            &[("a", "b", 1), ("b", "c", 2), ("c", "d", 1), ("d", "a", 2)],
        );
        assert_eq!(verify_abbv(&g1.collection().unwrap()), rat(0, 1));
        let g2 = sphere(&[1, 2]);
        let sum = connected_sum(&g1, "a", &g2, "q").unwrap();
        assert_eq!(sum.vertex_count(), 4);
        let mut expected = Vec::new();
        for v in ["b", "c", "d"] {
            expected.push(g1.vertex_datum(v).unwrap());
        }
        expected.push(g2.vertex_datum("p").unwrap());
        let expected = FixedPointCollection::new(1, 2, expected).unwrap();
        assert_eq!(sum.collection().unwrap(), expected);
    }

    #[test]
    fn graph_serde_roundtrip() {
        let g = sphere(&[1, 2, 3]);
        let json = serde_json::to_string(&g).unwrap();
        let back: SignedMultigraph = serde_json::from_str(&json).unwrap();
        assert_eq!(g, back);
        let bad = r#"{"k":1,"n":1,"vertices":[{"id":"p","sign":1}],
                      "edges":[{"u":"p","v":"p","label":[1]}]}"#;
        assert!(serde_json::from_str::<SignedMultigraph>(bad).is_err());
    }
}
