//! Construction and reduction of four-dimensional descriptions (`n = 2`).
//!
//! Every valid two-regular description arises from the empty graph by four
//! elementary constructions: adding a minimal two-vertex component, replacing
//! an edge by a three-edge path, splitting a vertex into an edge, and
//! reversing an edge. [`generate4`] walks those constructions at random;
//! [`reduce4`] inverts them, contracting one maximal-label edge per round —
//! either by a self connected sum (two vertices gone) or by a blow-up that
//! makes the sum possible (net one vertex gone) — until nothing is left.
//!
//! For torus ranks `k ≥ 2` the signs are redundant: [`reduce4_gkm`] runs the
//! same contraction loop on an [`UnsignedMultigraph`] whose vertices carry
//! two linearly independent labels, fixing the orientation of one endpoint
//! per step (`assumed_plus`) and letting the labels dictate the rest.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{canonical_weight, generic_covector, spans_lattice, Int, Sign, WeightVec};
use crate::fpdata::negate_datum;
use crate::multigraph::{
    blow_up, reverse_edge, self_connected_sum, validate_graph, GraphReport, SignedMultigraph,
};

/// Failures of the dimension-4 generator, reducer, and replayer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reduce4Error {
    /// This module handles two-regular descriptions only.
    UnsupportedShape { k: usize, n: usize },
    /// The input fails structural validation or cannot be built at all.
    InvalidInput(String),
    /// The reduction exhausted every maximal edge without finding a
    /// contractible pattern: the graph is not reachable by the elementary
    /// constructions. The string is the first obstacle encountered.
    NotDescribable(String),
    /// The unsigned engine needs `k ≥ 2` and two linearly independent labels
    /// at every vertex.
    InvalidGkm(String),
    /// A trace failed to replay against its recorded snapshots.
    Replay { step: usize, detail: String },
}

impl fmt::Display for Reduce4Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reduce4Error::UnsupportedShape { k, n } => {
                write!(f, "engine requires n = 2; got k = {k}, n = {n}")
            }
            Reduce4Error::InvalidInput(why) => write!(f, "input fails validation: {why}"),
            Reduce4Error::NotDescribable(why) => {
                write!(f, "not reachable by the elementary constructions: {why}")
            }
            Reduce4Error::InvalidGkm(why) => write!(f, "not an unsigned description: {why}"),
            Reduce4Error::Replay { step, detail } => {
                write!(f, "replay diverged at step {step}: {detail}")
            }
        }
    }
}

impl std::error::Error for Reduce4Error {}

/// One recorded step of a construction or reduction trace.
///
/// The first three variants are the forward constructions (the fourth,
/// [`Step4::Reverse`], serves both directions); the last two are the
/// reduction's macro-steps. `assumed_plus` is set only by the unsigned
/// engine and names the vertex whose orientation was fixed for the step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "kebab-case")]
pub enum Step4 {
    /// Add a fresh two-vertex component: `u` (sign `+`) and `v` (sign `−`)
    /// joined by two edges labeled `a` and `b`, which must span `Z^k`.
    AddMinimal {
        u: String,
        v: String,
        a: WeightVec,
        b: WeightVec,
    },
    /// Replace the edge at `index` (label `C`) by the path
    /// `—C— u —d— v —C—`, where `u` gets `sign` and `v` its opposite.
    /// `C` and `d` must span `Z^k`.
    Subdivide {
        index: usize,
        d: WeightVec,
        sign: Sign,
        u: String,
        v: String,
    },
    /// Split the degree-2 vertex `v` into an edge: the incident edge at
    /// index `first` (label `E`) is rewired to a fresh vertex `u`, the other
    /// (label `F`) to a fresh `w`, and `u`, `w` are joined by an `E + F`
    /// edge. Both new vertices inherit `ε(v)`; `E`, `F` must span `Z^k` and
    /// must not cancel.
    SplitVertex {
        v: String,
        first: usize,
        u: String,
        w: String,
    },
    /// Negate the label of the edge at `index` and flip both endpoint signs.
    Reverse { index: usize },
    /// Contract a maximal edge whose endpoints carry opposite data by the
    /// self connected sum at `(p, q)`. Removes two vertices.
    SelfSum {
        p: String,
        q: String,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        assumed_plus: Option<String>,
    },
    /// Blow up `p` with the given weights, then take the self connected sum
    /// at `(then_p, then_q)`, where `then_q` is the freshly created partner.
    /// Removes one vertex net.
    BlowUpThenSelfSum {
        p: String,
        weights: Vec<WeightVec>,
        then_p: String,
        then_q: String,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        assumed_plus: Option<String>,
    },
}

/// A graph state recorded in a trace. Tagged so that an empty signed graph
/// and an empty unsigned graph stay distinguishable in the file format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Snapshot4 {
    Signed(SignedMultigraph),
    Unsigned(UnsignedMultigraph),
}

impl Snapshot4 {
    /// Number of vertices in the recorded state.
    #[must_use]
    pub fn vertex_count(&self) -> usize {
        match self {
            Snapshot4::Signed(g) => g.vertex_count(),
            Snapshot4::Unsigned(g) => g.vertex_count(),
        }
    }
}

/// A construction or reduction run: the steps taken and the graph after
/// each of them, starting with the input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace4 {
    pub steps: Vec<Step4>,
    pub snapshots: Vec<Snapshot4>,
}

impl Trace4 {
    /// Vertex counts along the trace, with the blown-up midpoint of each
    /// [`Step4::BlowUpThenSelfSum`] spliced in (it is one vertex larger than
    /// the state before the step, i.e. two larger than the state after).
    #[must_use]
    pub fn vertex_trail(&self) -> Vec<usize> {
        let mut out = Vec::new();
        if let Some(first) = self.snapshots.first() {
            out.push(first.vertex_count());
        }
        for (step, snap) in self.steps.iter().zip(self.snapshots.iter().skip(1)) {
            if matches!(step, Step4::BlowUpThenSelfSum { .. }) {
                out.push(snap.vertex_count() + 2);
            }
            out.push(snap.vertex_count());
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Unsigned graphs (for the k ≥ 2 engine).

/// An edge of an [`UnsignedMultigraph`]; endpoints are stored in sorted
/// order, and the label is read identically from both ends.
#[derive(Clone, PartialEq, Eq)]
pub struct UnsignedEdge {
    u: String,
    v: String,
    label: WeightVec,
}

impl UnsignedEdge {
    #[must_use]
    pub fn u(&self) -> &str {
        &self.u
    }

    #[must_use]
    pub fn v(&self) -> &str {
        &self.v
    }

    #[must_use]
    pub fn label(&self) -> &WeightVec {
        &self.label
    }

    #[must_use]
    pub fn touches(&self, v: &str) -> bool {
        self.u == v || self.v == v
    }

    /// The endpoint that is not `v`.
    #[must_use]
    pub fn other(&self, v: &str) -> &str {
        if self.u == v {
            &self.v
        } else {
            &self.u
        }
    }
}

impl fmt::Debug for UnsignedEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}--{}; {})", self.u, self.v, self.label)
    }
}

/// A labeled multigraph without vertex signs: the shape on which the
/// `k ≥ 2` reduction operates.
#[derive(Clone, PartialEq, Eq)]
pub struct UnsignedMultigraph {
    k: usize,
    n: usize,
    vertices: BTreeSet<String>,
    edges: Vec<UnsignedEdge>,
}

impl UnsignedMultigraph {
    /// Build a graph, rejecting duplicate vertices, unknown endpoints,
    /// self-loops, and labels of the wrong rank.
    pub fn new(
        k: usize,
        n: usize,
        vertices: Vec<String>,
        edges: Vec<(String, String, WeightVec)>,
    ) -> Result<UnsignedMultigraph, Reduce4Error> {
        if k == 0 {
            return Err(Reduce4Error::InvalidInput(
                "torus rank must be positive".to_string(),
            ));
        }
        let mut set = BTreeSet::new();
        for v in vertices {
            if !set.insert(v.clone()) {
                return Err(Reduce4Error::InvalidInput(format!(
                    "duplicate vertex {v:?}"
                )));
            }
        }
        let mut g = UnsignedMultigraph {
            k,
            n,
            vertices: set,
            edges: Vec::with_capacity(edges.len()),
        };
        for (u, v, label) in edges {
            g.push_edge(u, v, label)?;
        }
        Ok(g)
    }

    fn push_edge(&mut self, u: String, v: String, label: WeightVec) -> Result<(), Reduce4Error> {
        for w in [&u, &v] {
            if !self.vertices.contains(w) {
                return Err(Reduce4Error::InvalidInput(format!(
                    "edge endpoint {w:?} is not a vertex"
                )));
            }
        }
        if u == v {
            return Err(Reduce4Error::InvalidInput(format!("self-loop at {u:?}")));
        }
        if label.k() != self.k {
            return Err(Reduce4Error::InvalidInput(format!(
                "label {label} has rank {}, expected {}",
                label.k(),
                self.k
            )));
        }
        let (u, v) = if u <= v { (u, v) } else { (v, u) };
        self.edges.push(UnsignedEdge { u, v, label });
        Ok(())
    }

    #[must_use]
    pub fn k(&self) -> usize {
        self.k
    }

    #[must_use]
    pub fn n(&self) -> usize {
        self.n
    }

    #[must_use]
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = &str> {
        self.vertices.iter().map(String::as_str)
    }

    #[must_use]
    pub fn edges(&self) -> &[UnsignedEdge] {
        &self.edges
    }

    /// Indices of the edges touching `v`, in ascending order.
    #[must_use]
    pub fn incident_edges(&self, v: &str) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.touches(v))
            .map(|(i, _)| i)
            .collect()
    }

    #[must_use]
    pub fn degree(&self, v: &str) -> usize {
        self.edges.iter().filter(|e| e.touches(v)).count()
    }
}

impl fmt::Debug for UnsignedMultigraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "UnsignedMultigraph(k={}, n={}, {} vertices, {} edges)",
            self.k,
            self.n,
            self.vertices.len(),
            self.edges.len()
        )
    }
}

#[derive(Serialize, Deserialize)]
struct UnsignedEdgeRepr {
    u: String,
    v: String,
    label: WeightVec,
}

#[derive(Serialize, Deserialize)]
struct UnsignedRepr {
    k: usize,
    n: usize,
    vertices: Vec<String>,
    edges: Vec<UnsignedEdgeRepr>,
}

impl Serialize for UnsignedMultigraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        UnsignedRepr {
            k: self.k,
            n: self.n,
            vertices: self.vertices.iter().cloned().collect(),
            edges: self
                .edges
                .iter()
                .map(|e| UnsignedEdgeRepr {
                    u: e.u.clone(),
                    v: e.v.clone(),
                    label: e.label.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for UnsignedMultigraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = UnsignedRepr::deserialize(d)?;
        UnsignedMultigraph::new(
            repr.k,
            repr.n,
            repr.vertices,
            repr.edges.into_iter().map(|e| (e.u, e.v, e.label)).collect(),
        )
        .map_err(serde::de::Error::custom)
    }
}

/// Drop the vertex signs of a signed graph, keeping labels and shape.
#[must_use]
pub fn forget_signs(g: &SignedMultigraph) -> UnsignedMultigraph {
    UnsignedMultigraph::new(
        g.k(),
        g.n(),
        g.vertex_ids().map(str::to_string).collect(),
        g.edges()
            .iter()
            .map(|e| (e.u().to_string(), e.v().to_string(), e.label().clone()))
            .collect(),
    )
    .expect("a valid signed graph strips to a valid unsigned one")
}

// ---------------------------------------------------------------------------
// Step application (shared by the generator, the engines, and the replayers).

fn rebuilt(
    g: &SignedMultigraph,
    drop_vertex: Option<&str>,
    drop_edges: &[usize],
    add_vertices: Vec<(String, Sign)>,
    add_edges: Vec<(String, String, WeightVec)>,
) -> Result<SignedMultigraph, String> {
    let mut vertices: Vec<(String, Sign)> = g
        .vertices()
        .filter(|(id, _)| Some(*id) != drop_vertex)
        .map(|(id, s)| (id.to_string(), s))
        .collect();
    vertices.extend(add_vertices);
    let mut edges: Vec<(String, String, WeightVec)> = g
        .edges()
        .iter()
        .enumerate()
        .filter(|(i, _)| !drop_edges.contains(i))
        .map(|(_, e)| (e.u().to_string(), e.v().to_string(), e.label().clone()))
        .collect();
    edges.extend(add_edges);
    SignedMultigraph::new(g.k(), g.n(), vertices, edges).map_err(|e| e.to_string())
}

fn check_fresh(g: &SignedMultigraph, names: &[&str]) -> Result<(), String> {
    for (i, a) in names.iter().enumerate() {
        if g.vertex_sign(a).is_some() {
            return Err(format!("vertex name {a:?} is already taken"));
        }
        if names[i + 1..].contains(a) {
            return Err(format!("vertex name {a:?} is used twice"));
        }
    }
    Ok(())
}

fn check_spanning(k: usize, a: &WeightVec, b: &WeightVec) -> Result<(), String> {
    match spans_lattice(&[a.clone(), b.clone()], k) {
        Ok(true) => Ok(()),
        Ok(false) => Err(format!("labels {a} and {b} do not span the weight lattice")),
        Err(e) => Err(e.to_string()),
    }
}

/// Apply one step to a signed graph. Used by [`generate4`] and [`reduce4`]
/// to advance, and by [`replay4`] to verify.
fn apply_step_signed(g: &SignedMultigraph, step: &Step4) -> Result<SignedMultigraph, String> {
    match step {
        Step4::AddMinimal { u, v, a, b } => {
            check_fresh(g, &[u, v])?;
            check_spanning(g.k(), a, b)?;
            rebuilt(
                g,
                None,
                &[],
                vec![(u.clone(), Sign::Plus), (v.clone(), Sign::Minus)],
                vec![
                    (u.clone(), v.clone(), a.clone()),
                    (u.clone(), v.clone(), b.clone()),
                ],
            )
        }
        Step4::Subdivide {
            index,
            d,
            sign,
            u,
            v,
        } => {
            let e = g
                .edges()
                .get(*index)
                .ok_or_else(|| format!("no edge at index {index}"))?;
            check_fresh(g, &[u, v])?;
            let c = e.label().clone();
            check_spanning(g.k(), &c, d)?;
            rebuilt(
                g,
                None,
                &[*index],
                vec![(u.clone(), *sign), (v.clone(), sign.flip())],
                vec![
                    (e.u().to_string(), u.clone(), c.clone()),
                    (u.clone(), v.clone(), d.clone()),
                    (v.clone(), e.v().to_string(), c),
                ],
            )
        }
        Step4::SplitVertex { v, first, u, w } => {
            let sign = g
                .vertex_sign(v)
                .ok_or_else(|| format!("no vertex named {v:?}"))?;
            check_fresh(g, &[u, w])?;
            let inc = g.incident_edges(v);
            if inc.len() != 2 {
                return Err(format!(
                    "vertex {v:?} has degree {}, expected 2",
                    inc.len()
                ));
            }
            if !inc.contains(first) {
                return Err(format!("edge {first} is not incident to {v:?}"));
            }
            let other = inc[usize::from(inc[0] == *first)];
            let e1 = &g.edges()[*first];
            let e2 = &g.edges()[other];
            let (e, f) = (e1.label().clone(), e2.label().clone());
            let sum = e
                .try_sub(&f.neg())
                .map_err(|_| format!("the labels at {v:?} cancel"))?;
            check_spanning(g.k(), &e, &f)?;
            rebuilt(
                g,
                Some(v),
                &inc,
                vec![(u.clone(), sign), (w.clone(), sign)],
                vec![
                    (e1.other(v).to_string(), u.clone(), e),
                    (e2.other(v).to_string(), w.clone(), f),
                    (u.clone(), w.clone(), sum),
                ],
            )
        }
        Step4::Reverse { index } => reverse_edge(g, *index).map_err(|e| e.to_string()),
        Step4::SelfSum { p, q, .. } => self_connected_sum(g, p, q).map_err(|e| e.to_string()),
        Step4::BlowUpThenSelfSum {
            p,
            weights,
            then_p,
            then_q,
            ..
        } => {
            let mid = blow_up(g, p, weights).map_err(|e| e.to_string())?;
            self_connected_sum(&mid, then_p, then_q).map_err(|e| e.to_string())
        }
    }
}

fn fresh_name(taken: &BTreeSet<String>, base: String) -> String {
    let mut name = base;
    while taken.contains(&name) {
        name = format!("R.{name}");
    }
    name
}

/// Self connected sum without signs: drop all edges between `p` and `q`,
/// match the remaining edges of the two sides class by class (sorted by
/// partner id, then index), and join the partners. Fails when a common
/// neighbor is reached from both sides by the same class (the join would be
/// a self-loop) or when the label classes do not match up.
fn unsigned_self_sum(
    g: &UnsignedMultigraph,
    p: &str,
    q: &str,
) -> Result<UnsignedMultigraph, String> {
    if p == q {
        return Err("a sum needs two distinct vertices".to_string());
    }
    for v in [p, q] {
        if !g.vertices.contains(v) {
            return Err(format!("no vertex named {v:?}"));
        }
    }
    for r in g.vertex_ids() {
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
                return Err(format!(
                    "vertex {r:?} is joined to both {p:?} and {q:?} by the same label class"
                ));
            }
        }
    }
    let mut side_p: BTreeMap<WeightVec, Vec<usize>> = BTreeMap::new();
    let mut side_q: BTreeMap<WeightVec, Vec<usize>> = BTreeMap::new();
    for (i, e) in g.edges.iter().enumerate() {
        if e.touches(p) && e.touches(q) {
            continue;
        }
        if e.touches(p) {
            side_p
                .entry(canonical_weight(&e.label).0)
                .or_default()
                .push(i);
        } else if e.touches(q) {
            side_q
                .entry(canonical_weight(&e.label).0)
                .or_default()
                .push(i);
        }
    }
    if side_p.keys().collect::<Vec<_>>() != side_q.keys().collect::<Vec<_>>() {
        return Err(format!(
            "the label classes at {p:?} and {q:?} do not match"
        ));
    }
    let sort_key = |i: &usize| {
        let e = &g.edges[*i];
        (e.other(if e.touches(p) { p } else { q }).to_string(), *i)
    };
    let mut new_edges: Vec<(String, String, WeightVec)> = Vec::new();
    for (class, mut ep) in side_p {
        let mut eq = side_q.remove(&class).expect("checked equal class sets");
        if ep.len() != eq.len() {
            return Err(format!(
                "label class {class} has unequal multiplicity at {p:?} and {q:?}"
            ));
        }
        ep.sort_by_key(sort_key);
        eq.sort_by_key(sort_key);
        for (&i, &j) in ep.iter().zip(&eq) {
            let x = g.edges[i].other(p).to_string();
            let y = g.edges[j].other(q).to_string();
            debug_assert_ne!(x, y, "the common-neighbor guard above excludes this");
            new_edges.push((x, y, g.edges[i].label.clone()));
        }
    }
    let vertices = g
        .vertex_ids()
        .filter(|v| *v != p && *v != q)
        .map(str::to_string)
        .collect();
    let edges = g
        .edges
        .iter()
        .filter(|e| !e.touches(p) && !e.touches(q))
        .map(|e| (e.u.clone(), e.v.clone(), e.label.clone()))
        .chain(new_edges)
        .collect();
    UnsignedMultigraph::new(g.k, g.n, vertices, edges).map_err(|e| e.to_string())
}

/// Apply one step to an unsigned graph. Only reversals and the two
/// contraction macro-steps occur in unsigned traces.
fn apply_step_unsigned(
    g: &UnsignedMultigraph,
    step: &Step4,
) -> Result<UnsignedMultigraph, String> {
    match step {
        Step4::Reverse { index } => {
            let mut out = g.clone();
            let e = out
                .edges
                .get_mut(*index)
                .ok_or_else(|| format!("no edge at index {index}"))?;
            e.label = e.label.neg();
            Ok(out)
        }
        Step4::SelfSum { p, q, .. } => unsigned_self_sum(g, p, q),
        Step4::BlowUpThenSelfSum {
            p,
            weights,
            then_p,
            then_q,
            ..
        } => {
            if weights.len() != 2 {
                return Err(format!(
                    "an unsigned blow-up takes two weights, got {}",
                    weights.len()
                ));
            }
            let (x, l) = (&weights[0], &weights[1]);
            let inc = g.incident_edges(p);
            if inc.len() != 2 {
                return Err(format!("vertex {p:?} has degree {}, expected 2", inc.len()));
            }
            let l_idx = inc
                .iter()
                .copied()
                .find(|&i| {
                    let e = &g.edges[i];
                    e.other(p) == then_p && (e.label == *l || e.label == l.neg())
                })
                .ok_or_else(|| {
                    format!("no edge from {p:?} to {then_p:?} carries the label {l}")
                })?;
            let x_idx = inc[usize::from(inc[0] == l_idx)];
            let xe = &g.edges[x_idx];
            if xe.label != *x && xe.label != x.neg() {
                return Err(format!(
                    "the second label at {p:?} is {}, not {x}",
                    xe.label
                ));
            }
            let lx = l
                .try_sub(x)
                .map_err(|_| "the blow-up weights coincide".to_string())?;
            let taken: BTreeSet<String> = g.vertices.clone();
            let b1 = fresh_name(&taken, format!("{p}.1"));
            let b2 = fresh_name(&taken, format!("{p}.2"));
            if b2 != *then_q {
                return Err(format!(
                    "the blown-up partner would be named {b2:?}, not {then_q:?}"
                ));
            }
            let x_other = xe.other(p).to_string();
            let vertices = g
                .vertex_ids()
                .filter(|v| *v != p)
                .map(str::to_string)
                .chain([b1.clone(), b2.clone()])
                .collect();
            let edges = g
                .edges
                .iter()
                .enumerate()
                .filter(|(i, _)| !inc.contains(i))
                .map(|(_, e)| (e.u.clone(), e.v.clone(), e.label.clone()))
                .chain([
                    (x_other, b1.clone(), x.clone()),
                    (then_p.clone(), b2.clone(), l.clone()),
                    (b1, b2.clone(), lx),
                ])
                .collect();
            let mid = UnsignedMultigraph::new(g.k, g.n, vertices, edges)
                .map_err(|e| e.to_string())?;
            unsigned_self_sum(&mid, then_p, &b2)
        }
        _ => Err("only reversals, sums, and blow-ups appear in unsigned traces".to_string()),
    }
}

// ---------------------------------------------------------------------------
// The seeded generator.

const MAX_VERTICES: usize = 40;

fn rand_label(k: usize, rng: &mut ChaCha8Rng) -> WeightVec {
    loop {
        let coords: Vec<i64> = (0..k).map(|_| rng.gen_range(-3..=3)).collect();
        if coords.iter().any(|&c| c != 0) {
            return WeightVec::from_i64s(&coords).expect("some coordinate is nonzero");
        }
    }
}

fn rand_spanning_pair(k: usize, rng: &mut ChaCha8Rng) -> (WeightVec, WeightVec) {
    for _ in 0..200 {
        let a = rand_label(k, rng);
        let b = rand_label(k, rng);
        if spans_lattice(&[a.clone(), b.clone()], k) == Ok(true) {
            return (a, b);
        }
    }
    // The pool always contains a spanning pair; this is unreachable in
    // practice but keeps the generator total.
    let one = WeightVec::scalar(1);
    if k == 1 {
        (one.clone(), one)
    } else {
        let mut a = vec![0i64; k];
        let mut b = vec![0i64; k];
        a[0] = 1;
        b[1] = 1;
        (
            WeightVec::from_i64s(&a).expect("unit vector"),
            WeightVec::from_i64s(&b).expect("unit vector"),
        )
    }
}

fn rand_partner_for(c: &WeightVec, k: usize, rng: &mut ChaCha8Rng) -> Option<WeightVec> {
    for _ in 0..200 {
        let d = rand_label(k, rng);
        if spans_lattice(&[c.clone(), d.clone()], k) == Ok(true) {
            return Some(d);
        }
    }
    None
}

fn sup_norm(w: &WeightVec) -> Int {
    w.coords()
        .iter()
        .map(num::Signed::abs)
        .max()
        .expect("weights are nonempty")
}

/// Whether `g` contracts to the empty graph with every intermediate graph
/// valid. The caller is expected to have validated `g` itself already.
fn round_trips(g: &SignedMultigraph) -> bool {
    let Ok(trace) = reduce4(g) else {
        return false;
    };
    trace.snapshots.iter().skip(1).all(|snap| match snap {
        Snapshot4::Signed(h) => validate_graph(h, false).pass,
        Snapshot4::Unsigned(_) => false,
    })
}

/// Grow a valid two-regular description from the empty graph by `step_count`
/// random elementary constructions, deterministically from `seed`.
///
/// Labels are drawn with coordinates in `−3..=3`; vertex splits are skipped
/// when the merged label would exceed twice that bound, and the graph is
/// capped at 40 vertices. Every candidate step must leave the graph valid
/// *and* contractible to the empty graph by [`reduce4`] through valid
/// intermediate graphs before it is committed. The contractibility check
/// matters: subdividing an edge pairs the two inserted vertices with an
/// arbitrary sign, and the wrong choice at an edge of maximal label
/// magnitude creates a configuration that no contraction matches — or one
/// whose contraction passes through a forbidden pattern — even though every
/// numeric invariant still balances. Rejecting those candidates keeps the
/// round trip with the reduction engine exact. Only `k = 1` and `k = 2` are
/// constructible: a fresh component needs two spanning labels.
pub fn generate4(
    k: usize,
    seed: u64,
    step_count: usize,
) -> Result<(SignedMultigraph, Trace4), Reduce4Error> {
    if k == 0 || k > 2 {
        return Err(Reduce4Error::InvalidInput(format!(
            "two edge labels can span the weight lattice only for k = 1 or 2, not k = {k}"
        )));
    }
    if step_count == 0 {
        return Err(Reduce4Error::InvalidInput(
            "the construction needs at least one step".to_string(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = SignedMultigraph::empty(k, 2);
    let mut steps: Vec<Step4> = Vec::with_capacity(step_count);
    let mut snapshots = vec![Snapshot4::Signed(cur.clone())];
    let mut counter = 0usize;
    let label_cap = Int::from(6);

    while steps.len() < step_count {
        let mut committed = false;
        for _ in 0..200 {
            let candidate = match rng.gen_range(0..4) {
                0 if cur.vertex_count() + 2 <= MAX_VERTICES => {
                    let (a, b) = rand_spanning_pair(k, &mut rng);
                    Some((
                        Step4::AddMinimal {
                            u: format!("v{}", counter + 1),
                            v: format!("v{}", counter + 2),
                            a,
                            b,
                        },
                        2,
                    ))
                }
                1 if cur.edge_count() > 0 && cur.vertex_count() + 2 <= MAX_VERTICES => {
                    let index = rng.gen_range(0..cur.edge_count());
                    let c = cur.edges()[index].label().clone();
                    rand_partner_for(&c, k, &mut rng).map(|d| {
                        (
                            Step4::Subdivide {
                                index,
                                d,
                                sign: if rng.gen_bool(0.5) {
                                    Sign::Plus
                                } else {
                                    Sign::Minus
                                },
                                u: format!("v{}", counter + 1),
                                v: format!("v{}", counter + 2),
                            },
                            2,
                        )
                    })
                }
                2 if cur.vertex_count() > 0 && cur.vertex_count() < MAX_VERTICES => {
                    let mut eligible: Vec<String> = Vec::new();
                    for (id, _) in cur.vertices() {
                        let inc = cur.incident_edges(id);
                        if inc.len() != 2 {
                            continue;
                        }
                        let e = cur.edges()[inc[0]].label().clone();
                        let f = cur.edges()[inc[1]].label().clone();
                        let Ok(sum) = e.try_sub(&f.neg()) else {
                            continue;
                        };
                        if sup_norm(&sum) > label_cap {
                            continue;
                        }
                        if spans_lattice(&[e, f], k) != Ok(true) {
                            continue;
                        }
                        eligible.push(id.to_string());
                    }
                    if eligible.is_empty() {
                        None
                    } else {
                        let v = eligible[rng.gen_range(0..eligible.len())].clone();
                        let inc = cur.incident_edges(&v);
                        Some((
                            Step4::SplitVertex {
                                v,
                                first: inc[rng.gen_range(0..2)],
                                u: format!("v{}", counter + 1),
                                w: format!("v{}", counter + 2),
                            },
                            2,
                        ))
                    }
                }
                3 if cur.edge_count() > 0 => Some((
                    Step4::Reverse {
                        index: rng.gen_range(0..cur.edge_count()),
                    },
                    0,
                )),
                _ => None,
            };
            let Some((step, names_used)) = candidate else {
                continue;
            };
            let Ok(next) = apply_step_signed(&cur, &step) else {
                continue;
            };
            if !validate_graph(&next, false).pass {
                continue;
            }
            if !round_trips(&next) {
                continue;
            }
            counter += names_used;
            steps.push(step);
            snapshots.push(Snapshot4::Signed(next.clone()));
            cur = next;
            committed = true;
            break;
        }
        if !committed {
            return Err(Reduce4Error::InvalidInput(format!(
                "seed {seed} found no applicable construction step"
            )));
        }
    }
    Ok((cur, Trace4 { steps, snapshots }))
}

// ---------------------------------------------------------------------------
// The reduction engine.

fn norm2(w: &WeightVec) -> Int {
    w.coords().iter().fold(Int::zero(), |acc, c| acc + c * c)
}

/// The canonical class of maximal magnitude among `labels` (ties broken
/// lexicographically).
fn top_class<'a>(labels: impl Iterator<Item = &'a WeightVec>) -> Option<WeightVec> {
    labels
        .map(|w| canonical_weight(w).0)
        .max_by(|a, b| norm2(a).cmp(&norm2(b)).then_with(|| a.cmp(b)))
}

/// Indices of the labels that must be negated so that every label pairs
/// non-negatively against `l`. Labels orthogonal to `l` are oriented by a
/// deterministic generic covector instead, so the outcome never depends on
/// the presentation.
fn orientation_fixes(labels: &[WeightVec], k: usize, l: &WeightVec) -> Vec<usize> {
    let mut xi: Option<WeightVec> = None;
    let mut out = Vec::new();
    for (i, w) in labels.iter().enumerate() {
        let d = w.dot(l);
        if d.is_positive() {
            continue;
        }
        if d.is_negative() {
            out.push(i);
            continue;
        }
        let xi = xi.get_or_insert_with(|| generic_covector(labels, k, l));
        if w.dot(xi).is_negative() {
            out.push(i);
        }
    }
    out
}

fn report_summary(r: &GraphReport) -> String {
    let mut parts = r.violations.clone();
    if let Some(s) = &r.screening {
        parts.extend(
            s.verdicts
                .iter()
                .filter(|v| !v.pass)
                .map(|v| format!("{}: {}", v.check, v.reason)),
        );
    }
    parts.join("; ")
}

enum CaseOutcome {
    /// A contraction fired: the new graph and the recorded step.
    Applied(Box<SignedMultigraph>, Step4),
    /// Neither endpoint pattern matches here.
    NoMatch,
    /// A pattern matched but the operation could not be carried out.
    Blocked(String),
}

/// Try to contract the maximal edge `l_edge` with `p1` in the distinguished
/// role: either the endpoints carry opposite data (self sum), or `p2` looks
/// like the blown-up neighbor of `p1` (same sign, labels `{l, l − x}`), in
/// which case blowing up `p1` creates the partner that the sum needs.
fn try_contraction(
    g: &SignedMultigraph,
    p1: &str,
    p2: &str,
    l_edge: usize,
    l: &WeightVec,
) -> CaseOutcome {
    let d1 = g.vertex_datum(p1).expect("validated graph");
    let d2 = g.vertex_datum(p2).expect("validated graph");
    if d2 == negate_datum(&d1) {
        let step = Step4::SelfSum {
            p: p1.to_string(),
            q: p2.to_string(),
            assumed_plus: None,
        };
        return match apply_step_signed(g, &step) {
            Ok(next) => CaseOutcome::Applied(Box::new(next), step),
            Err(why) => CaseOutcome::Blocked(format!(
                "the sum at ({p1}, {p2}) is blocked: {why}"
            )),
        };
    }
    if g.vertex_sign(p1) != g.vertex_sign(p2) {
        return CaseOutcome::NoMatch;
    }
    let inc1 = g.incident_edges(p1);
    if inc1.len() != 2 {
        return CaseOutcome::NoMatch;
    }
    let x_idx = inc1[usize::from(inc1[0] == l_edge)];
    if x_idx == l_edge {
        return CaseOutcome::NoMatch;
    }
    let x = g.edges()[x_idx].label().clone();
    if canonical_weight(&x).0 == *l {
        return CaseOutcome::NoMatch;
    }
    let mut p2_raws: Vec<WeightVec> = g
        .incident_edges(p2)
        .into_iter()
        .map(|i| g.edges()[i].label().clone())
        .collect();
    p2_raws.sort();
    let mut candidates = vec![x.clone()];
    if x.dot(l).is_zero() {
        // The generic covector fixed x's orientation arbitrarily; the
        // matching below must get to see both.
        candidates.push(x.neg());
    }
    for x_cand in candidates {
        let Ok(lx) = l.try_sub(&x_cand) else {
            continue;
        };
        let mut want = vec![l.clone(), lx];
        want.sort();
        if p2_raws != want {
            continue;
        }
        let mid = match blow_up(g, p1, &[x_cand.clone(), l.clone()]) {
            Ok(m) => m,
            Err(why) => {
                return CaseOutcome::Blocked(format!(
                    "the blow-up at {p1} is blocked: {why}"
                ))
            }
        };
        let target = negate_datum(&d2);
        let olds: BTreeSet<&str> = g.vertex_ids().collect();
        let q_m = mid
            .vertex_ids()
            .filter(|id| !olds.contains(id))
            .filter(|id| mid.vertex_datum(id).ok().as_ref() == Some(&target))
            .min()
            .map(str::to_string);
        let Some(q_m) = q_m else {
            return CaseOutcome::Blocked(format!(
                "blowing up {p1} exposes no partner for {p2}"
            ));
        };
        let step = Step4::BlowUpThenSelfSum {
            p: p1.to_string(),
            weights: vec![x_cand, l.clone()],
            then_p: p2.to_string(),
            then_q: q_m,
            assumed_plus: None,
        };
        return match apply_step_signed(g, &step) {
            Ok(next) => CaseOutcome::Applied(Box::new(next), step),
            Err(why) => CaseOutcome::Blocked(format!(
                "the sum after blowing up {p1} is blocked: {why}"
            )),
        };
    }
    CaseOutcome::NoMatch
}

/// Reduce a valid two-regular description to the empty graph.
///
/// Each round normalizes every label to pair non-negatively against the
/// maximal label class `l` (recording the reversals), then walks the
/// `l`-labeled edges in deterministic order and contracts the first one
/// whose endpoints match a reduction pattern. Succeeds exactly when the
/// graph is reachable by the elementary constructions; the returned trace
/// replays under [`replay4`].
pub fn reduce4(g: &SignedMultigraph) -> Result<Trace4, Reduce4Error> {
    if g.n() != 2 {
        return Err(Reduce4Error::UnsupportedShape { k: g.k(), n: g.n() });
    }
    let report = validate_graph(g, false);
    if !report.pass {
        return Err(Reduce4Error::InvalidInput(report_summary(&report)));
    }
    let mut steps: Vec<Step4> = Vec::new();
    let mut snapshots = vec![Snapshot4::Signed(g.clone())];
    let mut cur = g.clone();
    while !cur.is_empty() {
        let Some(l) = top_class(cur.edges().iter().map(|e| e.label())) else {
            return Err(Reduce4Error::InvalidInput(
                "a nonempty graph without edges cannot be reduced".to_string(),
            ));
        };
        let labels: Vec<WeightVec> = cur.edges().iter().map(|e| e.label().clone()).collect();
        for i in orientation_fixes(&labels, cur.k(), &l) {
            cur = reverse_edge(&cur, i).map_err(|e| Reduce4Error::InvalidInput(e.to_string()))?;
            steps.push(Step4::Reverse { index: i });
            snapshots.push(Snapshot4::Signed(cur.clone()));
        }
        let mut l_edges: Vec<(String, String, usize)> = cur
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| *e.label() == l)
            .map(|(i, e)| (e.u().to_string(), e.v().to_string(), i))
            .collect();
        l_edges.sort();
        let mut fired = false;
        let mut obstacle: Option<String> = None;
        'search: for (u, v, idx) in &l_edges {
            for (p1, p2) in [(u.as_str(), v.as_str()), (v.as_str(), u.as_str())] {
                match try_contraction(&cur, p1, p2, *idx, &l) {
                    CaseOutcome::Applied(next, step) => {
                        steps.push(step);
                        snapshots.push(Snapshot4::Signed((*next).clone()));
                        cur = *next;
                        fired = true;
                        break 'search;
                    }
                    CaseOutcome::NoMatch => {}
                    CaseOutcome::Blocked(why) => {
                        obstacle.get_or_insert(why);
                    }
                }
            }
        }
        if !fired {
            return Err(Reduce4Error::NotDescribable(obstacle.unwrap_or_else(|| {
                format!("no endpoint of a {l}-labeled edge matches a contraction pattern")
            })));
        }
    }
    Ok(Trace4 { steps, snapshots })
}

/// Reduce an unsigned description (`k ≥ 2`, two independent labels per
/// vertex) to the empty graph.
///
/// The loop mirrors [`reduce4`], but with no signs to compare it fixes the
/// orientation of the distinguished endpoint each round (recorded as
/// `assumed_plus`) and matches on label multisets alone: equal multisets
/// contract by an unsigned sum, and a `{l, l − x}` neighbor by an unsigned
/// blow-up followed by the sum.
pub fn reduce4_gkm(g: &UnsignedMultigraph) -> Result<Trace4, Reduce4Error> {
    if g.n() != 2 {
        return Err(Reduce4Error::UnsupportedShape { k: g.k(), n: g.n() });
    }
    if g.k() < 2 {
        return Err(Reduce4Error::InvalidGkm(
            "two labels can be linearly independent only for k ≥ 2".to_string(),
        ));
    }
    for v in g.vertex_ids() {
        let inc = g.incident_edges(v);
        if inc.len() != 2 {
            return Err(Reduce4Error::InvalidInput(format!(
                "vertex {v:?} has degree {}, expected 2",
                inc.len()
            )));
        }
        let a = &g.edges()[inc[0]].label;
        let b = &g.edges()[inc[1]].label;
        if proportional(a, b) {
            return Err(Reduce4Error::InvalidGkm(format!(
                "the labels at {v:?} are proportional: {a} and {b}"
            )));
        }
    }
    let mut steps: Vec<Step4> = Vec::new();
    let mut snapshots = vec![Snapshot4::Unsigned(g.clone())];
    let mut cur = g.clone();
    while !cur.is_empty() {
        let Some(l) = top_class(cur.edges().iter().map(UnsignedEdge::label)) else {
            return Err(Reduce4Error::InvalidInput(
                "a nonempty graph without edges cannot be reduced".to_string(),
            ));
        };
        let labels: Vec<WeightVec> = cur.edges().iter().map(|e| e.label.clone()).collect();
        for i in orientation_fixes(&labels, cur.k(), &l) {
            let step = Step4::Reverse { index: i };
            cur = apply_step_unsigned(&cur, &step)
                .map_err(Reduce4Error::InvalidInput)?;
            steps.push(step);
            snapshots.push(Snapshot4::Unsigned(cur.clone()));
        }
        let mut l_edges: Vec<(String, String, usize)> = cur
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| e.label == l)
            .map(|(i, e)| (e.u.clone(), e.v.clone(), i))
            .collect();
        l_edges.sort();
        let mut fired = false;
        let mut obstacle: Option<String> = None;
        'search: for (u, v, idx) in &l_edges {
            for (p1, p2) in [(u.as_str(), v.as_str()), (v.as_str(), u.as_str())] {
                match try_unsigned_contraction(&cur, p1, p2, *idx, &l) {
                    CaseOutcomeU::Applied(next, step) => {
                        steps.push(step);
                        snapshots.push(Snapshot4::Unsigned((*next).clone()));
                        cur = *next;
                        fired = true;
                        break 'search;
                    }
                    CaseOutcomeU::NoMatch => {}
                    CaseOutcomeU::Blocked(why) => {
                        obstacle.get_or_insert(why);
                    }
                }
            }
        }
        if !fired {
            return Err(Reduce4Error::NotDescribable(obstacle.unwrap_or_else(|| {
                format!("no endpoint of a {l}-labeled edge matches a contraction pattern")
            })));
        }
    }
    Ok(Trace4 { steps, snapshots })
}

fn proportional(a: &WeightVec, b: &WeightVec) -> bool {
    let (ac, bc) = (a.coords(), b.coords());
    for i in 0..ac.len() {
        for j in (i + 1)..ac.len() {
            if &ac[i] * &bc[j] != &ac[j] * &bc[i] {
                return false;
            }
        }
    }
    true
}

enum CaseOutcomeU {
    Applied(Box<UnsignedMultigraph>, Step4),
    NoMatch,
    Blocked(String),
}

fn try_unsigned_contraction(
    g: &UnsignedMultigraph,
    p1: &str,
    p2: &str,
    l_edge: usize,
    l: &WeightVec,
) -> CaseOutcomeU {
    let inc1 = g.incident_edges(p1);
    let inc2 = g.incident_edges(p2);
    if inc1.len() != 2 || inc2.len() != 2 {
        return CaseOutcomeU::NoMatch;
    }
    let x_idx = inc1[usize::from(inc1[0] == l_edge)];
    let r_idx = inc2[usize::from(inc2[0] == l_edge)];
    if x_idx == l_edge || r_idx == l_edge {
        return CaseOutcomeU::NoMatch;
    }
    let x = g.edges()[x_idx].label.clone();
    let r = g.edges()[r_idx].label.clone();
    if canonical_weight(&x).0 == *l {
        return CaseOutcomeU::NoMatch;
    }
    if r == x {
        let step = Step4::SelfSum {
            p: p1.to_string(),
            q: p2.to_string(),
            assumed_plus: Some(p1.to_string()),
        };
        return match apply_step_unsigned(g, &step) {
            Ok(next) => CaseOutcomeU::Applied(Box::new(next), step),
            Err(why) => CaseOutcomeU::Blocked(format!(
                "the sum at ({p1}, {p2}) is blocked: {why}"
            )),
        };
    }
    let mut candidates = vec![x.clone()];
    if x.dot(l).is_zero() {
        candidates.push(x.neg());
    }
    for x_cand in candidates {
        let Ok(lx) = l.try_sub(&x_cand) else {
            continue;
        };
        if r != lx {
            continue;
        }
        let taken: BTreeSet<String> = g.vertex_ids().map(str::to_string).collect();
        let b2 = fresh_name(&taken, format!("{p1}.2"));
        let step = Step4::BlowUpThenSelfSum {
            p: p1.to_string(),
            weights: vec![x_cand, l.clone()],
            then_p: p2.to_string(),
            then_q: b2,
            assumed_plus: Some(p1.to_string()),
        };
        return match apply_step_unsigned(g, &step) {
            Ok(next) => CaseOutcomeU::Applied(Box::new(next), step),
            Err(why) => CaseOutcomeU::Blocked(format!(
                "the sum after blowing up {p1} is blocked: {why}"
            )),
        };
    }
    CaseOutcomeU::NoMatch
}

// ---------------------------------------------------------------------------
// Replay.

/// Re-apply a signed trace from `start`, checking every recorded snapshot,
/// and return the final graph.
pub fn replay4(start: &SignedMultigraph, trace: &Trace4) -> Result<SignedMultigraph, Reduce4Error> {
    if trace.snapshots.len() != trace.steps.len() + 1 {
        return Err(Reduce4Error::Replay {
            step: 0,
            detail: format!(
                "{} steps need {} snapshots, found {}",
                trace.steps.len(),
                trace.steps.len() + 1,
                trace.snapshots.len()
            ),
        });
    }
    let expect_signed = |snap: &Snapshot4, step: usize| match snap {
        Snapshot4::Signed(g) => Ok(g.clone()),
        Snapshot4::Unsigned(_) => Err(Reduce4Error::Replay {
            step,
            detail: "snapshot is not a signed graph".to_string(),
        }),
    };
    let mut cur = expect_signed(&trace.snapshots[0], 0)?;
    if cur != *start {
        return Err(Reduce4Error::Replay {
            step: 0,
            detail: "the first snapshot is not the starting graph".to_string(),
        });
    }
    for (i, step) in trace.steps.iter().enumerate() {
        cur = apply_step_signed(&cur, step)
            .map_err(|detail| Reduce4Error::Replay { step: i, detail })?;
        let recorded = expect_signed(&trace.snapshots[i + 1], i)?;
        if cur != recorded {
            return Err(Reduce4Error::Replay {
                step: i,
                detail: "the recorded snapshot differs from the replayed graph".to_string(),
            });
        }
    }
    Ok(cur)
}

/// Re-apply an unsigned trace from `start`, checking every recorded
/// snapshot, and return the final graph.
pub fn replay4_gkm(
    start: &UnsignedMultigraph,
    trace: &Trace4,
) -> Result<UnsignedMultigraph, Reduce4Error> {
    if trace.snapshots.len() != trace.steps.len() + 1 {
        return Err(Reduce4Error::Replay {
            step: 0,
            detail: format!(
                "{} steps need {} snapshots, found {}",
                trace.steps.len(),
                trace.steps.len() + 1,
                trace.snapshots.len()
            ),
        });
    }
    let expect_unsigned = |snap: &Snapshot4, step: usize| match snap {
        Snapshot4::Unsigned(g) => Ok(g.clone()),
        Snapshot4::Signed(_) => Err(Reduce4Error::Replay {
            step,
            detail: "snapshot is not an unsigned graph".to_string(),
        }),
    };
    let mut cur = expect_unsigned(&trace.snapshots[0], 0)?;
    if cur != *start {
        return Err(Reduce4Error::Replay {
            step: 0,
            detail: "the first snapshot is not the starting graph".to_string(),
        });
    }
    for (i, step) in trace.steps.iter().enumerate() {
        cur = apply_step_unsigned(&cur, step)
            .map_err(|detail| Reduce4Error::Replay { step: i, detail })?;
        let recorded = expect_unsigned(&trace.snapshots[i + 1], i)?;
        if cur != recorded {
            return Err(Reduce4Error::Replay {
                step: i,
                detail: "the recorded snapshot differs from the replayed graph".to_string(),
            });
        }
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpdata::{make_datum, FixedPointDatum};
    use crate::models::{cpn_graph, sphere_graph};
    use crate::multigraph::iso_up_to_reversal;

    fn sc(v: i64) -> WeightVec {
        WeightVec::scalar(v)
    }

    fn w2(a: i64, b: i64) -> WeightVec {
        WeightVec::from_i64s(&[a, b]).expect("nonzero")
    }

    fn dat(sign: Sign, ws: &[i64]) -> FixedPointDatum {
        make_datum(sign, ws.iter().map(|&v| sc(v)).collect()).expect("valid datum")
    }

    fn signed_data(g: &SignedMultigraph) -> Vec<FixedPointDatum> {
        let mut out: Vec<FixedPointDatum> = g.collection().expect("regular").points().to_vec();
        out.sort();
        out
    }

    fn cp2() -> SignedMultigraph {
        cpn_graph(1, &[sc(1), sc(2)], false).expect("model")
    }

    #[test]
    fn forward_steps_build_the_projective_plane() {
        let g0 = SignedMultigraph::empty(1, 2);
        let g1 = apply_step_signed(
            &g0,
            &Step4::AddMinimal {
                u: "v1".into(),
                v: "v2".into(),
                a: sc(1),
                b: sc(1),
            },
        )
        .expect("minimal component");
        assert_eq!(signed_data(&g1), vec![dat(Sign::Plus, &[1, 1]), dat(Sign::Minus, &[1, 1])]);
        let g2 = apply_step_signed(
            &g1,
            &Step4::SplitVertex {
                v: "v1".into(),
                first: 0,
                u: "v3".into(),
                w: "v4".into(),
            },
        )
        .expect("vertex split");
        assert_eq!(g2.vertex_count(), 3);
        assert!(validate_graph(&g2, false).pass);
        assert!(iso_up_to_reversal(&g2, &cp2()));
        // Splitting needs labels that do not cancel.
        let bad = apply_step_signed(
            &apply_step_signed(
                &g0,
                &Step4::AddMinimal {
                    u: "a".into(),
                    v: "b".into(),
                    a: sc(1),
                    b: sc(-1),
                },
            )
            .expect("component"),
            &Step4::SplitVertex {
                v: "a".into(),
                first: 0,
                u: "c".into(),
                w: "d".into(),
            },
        );
        assert!(bad.is_err());
    }

    #[test]
    fn subdividing_an_edge_inserts_an_opposite_pair() {
        let g0 = apply_step_signed(
            &SignedMultigraph::empty(1, 2),
            &Step4::AddMinimal {
                u: "v1".into(),
                v: "v2".into(),
                a: sc(1),
                b: sc(2),
            },
        )
        .expect("component");
        let g1 = apply_step_signed(
            &g0,
            &Step4::Subdivide {
                index: 0,
                d: sc(1),
                sign: Sign::Plus,
                u: "v3".into(),
                v: "v4".into(),
            },
        )
        .expect("subdivision");
        assert_eq!(g1.vertex_count(), 4);
        assert!(validate_graph(&g1, false).pass);
        let d3 = g1.vertex_datum("v3").expect("vertex");
        let d4 = g1.vertex_datum("v4").expect("vertex");
        assert_eq!(d3, negate_datum(&d4));
        assert_eq!(d3, dat(Sign::Plus, &[1, 1]));
    }

    #[test]
    fn generation_is_seed_deterministic() {
        for k in [1, 2] {
            let (g1, t1) = generate4(k, 7, 6).expect("generation");
            let (g2, t2) = generate4(k, 7, 6).expect("generation");
            assert_eq!(
                serde_json::to_string(&t1).expect("serializable"),
                serde_json::to_string(&t2).expect("serializable")
            );
            assert_eq!(g1, g2);
            assert!(validate_graph(&g1, false).pass);
            for snap in &t1.snapshots {
                let Snapshot4::Signed(g) = snap else {
                    panic!("generation records signed graphs");
                };
                assert!(validate_graph(g, false).pass);
            }
            let replayed =
                replay4(&SignedMultigraph::empty(k, 2), &t1).expect("trace replays");
            assert_eq!(replayed, g1);
        }
    }

    #[test]
    fn generator_rejects_unusable_parameters() {
        assert!(matches!(
            generate4(0, 1, 3),
            Err(Reduce4Error::InvalidInput(_))
        ));
        assert!(matches!(
            generate4(3, 1, 3),
            Err(Reduce4Error::InvalidInput(_))
        ));
        assert!(matches!(
            generate4(1, 1, 0),
            Err(Reduce4Error::InvalidInput(_))
        ));
    }

    #[test]
    fn the_projective_plane_reduces_via_a_blow_up() {
        let trace = reduce4(&cp2()).expect("reduces");
        assert_eq!(
            trace.steps,
            vec![
                Step4::BlowUpThenSelfSum {
                    p: "q0".into(),
                    weights: vec![sc(1), sc(2)],
                    then_p: "q2".into(),
                    then_q: "R.q2".into(),
                    assumed_plus: None,
                },
                Step4::SelfSum {
                    p: "R.q1".into(),
                    q: "q1".into(),
                    assumed_plus: None,
                },
            ]
        );
        assert_eq!(trace.vertex_trail(), vec![3, 4, 2, 0]);
        let Snapshot4::Signed(mid) = &trace.snapshots[1] else {
            panic!("signed snapshot");
        };
        assert_eq!(
            signed_data(mid),
            vec![dat(Sign::Plus, &[1, 1]), dat(Sign::Minus, &[1, 1])]
        );
        assert!(trace.snapshots.last().is_some_and(|s| s.vertex_count() == 0));
        replay4(&cp2(), &trace).expect("replays");
    }

    #[test]
    fn spheres_contract_in_a_single_sum() {
        for weights in [[1, 1], [1, 2]] {
            let g = sphere_graph(1, &[sc(weights[0]), sc(weights[1])]).expect("model");
            let trace = reduce4(&g).expect("reduces");
            assert_eq!(
                trace.steps,
                vec![Step4::SelfSum {
                    p: "q1".into(),
                    q: "q2".into(),
                    assumed_plus: None,
                }]
            );
        }
        let g = sphere_graph(2, &[w2(1, 0), w2(0, 1)]).expect("model");
        let trace = reduce4(&g).expect("reduces");
        assert!(trace.snapshots.last().is_some_and(|s| s.vertex_count() == 0));
        assert_eq!(
            trace
                .steps
                .iter()
                .filter(|s| !matches!(s, Step4::Reverse { .. }))
                .count(),
            1
        );
    }

    #[test]
    fn misoriented_labels_are_reversed_before_matching() {
        let g = SignedMultigraph::new(
            1,
            2,
            vec![("q1", Sign::Plus), ("q2", Sign::Minus)],
            vec![
                ("q1".into(), "q2".into(), sc(-1)),
                ("q1".into(), "q2".into(), sc(2)),
            ],
        )
        .expect("valid graph");
        let trace = reduce4(&g).expect("reduces");
        assert_eq!(
            trace.steps,
            vec![
                Step4::Reverse { index: 0 },
                Step4::SelfSum {
                    p: "q1".into(),
                    q: "q2".into(),
                    assumed_plus: None,
                },
            ]
        );
        replay4(&g, &trace).expect("replays");
    }

    #[test]
    fn screening_clean_graphs_can_still_fail_to_reduce() {
        let g = SignedMultigraph::new(
            1,
            2,
            vec![
                ("a", Sign::Plus),
                ("b", Sign::Plus),
                ("c", Sign::Minus),
                ("d", Sign::Minus),
            ],
            vec![
                ("a".into(), "b".into(), sc(3)),
                ("b".into(), "d".into(), sc(1)),
                ("c".into(), "d".into(), sc(3)),
                ("a".into(), "c".into(), sc(1)),
            ],
        )
        .expect("valid graph");
        assert!(validate_graph(&g, false).pass, "the square passes screening");
        let err = reduce4(&g).expect_err("no contraction pattern");
        assert!(matches!(err, Reduce4Error::NotDescribable(_)), "{err}");
    }

    #[test]
    fn generated_graphs_reduce_to_nothing() {
        for k in [1, 2] {
            for seed in 0..12 {
                let steps = 5 + (seed as usize % 8);
                let (g, _) = generate4(k, seed, steps).expect("generation");
                let trace = reduce4(&g)
                    .unwrap_or_else(|e| panic!("k={k} seed={seed} failed to reduce: {e}"));
                assert!(trace.snapshots.last().is_some_and(|s| s.vertex_count() == 0));
                let mut prev = g.vertex_count();
                for (step, snap) in trace.steps.iter().zip(trace.snapshots.iter().skip(1)) {
                    let Snapshot4::Signed(cur) = snap else {
                        panic!("signed snapshot");
                    };
                    assert!(validate_graph(cur, false).pass, "k={k} seed={seed}");
                    match step {
                        Step4::Reverse { .. } => assert_eq!(cur.vertex_count(), prev),
                        Step4::SelfSum { .. } => assert_eq!(cur.vertex_count(), prev - 2),
                        Step4::BlowUpThenSelfSum { .. } => {
                            assert_eq!(cur.vertex_count(), prev - 1);
                        }
                        _ => panic!("reduction traces contain no forward steps"),
                    }
                    if cur.vertex_count() == 2 {
                        let ids: Vec<&str> = cur.vertex_ids().collect();
                        let d0 = cur.vertex_datum(ids[0]).expect("vertex");
                        let d1 = cur.vertex_datum(ids[1]).expect("vertex");
                        assert_eq!(d0, negate_datum(&d1), "k={k} seed={seed}");
                    }
                    prev = cur.vertex_count();
                }
                replay4(&g, &trace).expect("replays");
            }
        }
    }

    #[test]
    fn gkm_reduction_classifies_the_unsigned_projective_plane() {
        let g = forget_signs(&cpn_graph(2, &[w2(1, 0), w2(0, 1)], false).expect("model"));
        let trace = reduce4_gkm(&g).expect("reduces");
        assert!(trace.snapshots.last().is_some_and(|s| s.vertex_count() == 0));
        let macros: Vec<&Step4> = trace
            .steps
            .iter()
            .filter(|s| !matches!(s, Step4::Reverse { .. }))
            .collect();
        assert_eq!(
            macros,
            vec![
                &Step4::BlowUpThenSelfSum {
                    p: "q1".into(),
                    weights: vec![w2(1, 0), w2(1, -1)],
                    then_p: "q2".into(),
                    then_q: "q1.2".into(),
                    assumed_plus: Some("q1".into()),
                },
                &Step4::SelfSum {
                    p: "q0".into(),
                    q: "q1.1".into(),
                    assumed_plus: Some("q0".into()),
                },
            ]
        );
        replay4_gkm(&g, &trace).expect("replays");
    }

    #[test]
    fn gkm_reduction_contracts_the_unsigned_sphere() {
        let g = forget_signs(&sphere_graph(2, &[w2(1, 0), w2(0, 1)]).expect("model"));
        let trace = reduce4_gkm(&g).expect("reduces");
        let macros: Vec<&Step4> = trace
            .steps
            .iter()
            .filter(|s| !matches!(s, Step4::Reverse { .. }))
            .collect();
        assert_eq!(
            macros,
            vec![&Step4::SelfSum {
                p: "q1".into(),
                q: "q2".into(),
                assumed_plus: Some("q1".into()),
            }]
        );
        assert!(trace.snapshots.last().is_some_and(|s| s.vertex_count() == 0));
        replay4_gkm(&g, &trace).expect("replays");
    }

    #[test]
    fn gkm_inputs_need_independent_labels() {
        let circle = forget_signs(&sphere_graph(1, &[sc(1), sc(2)]).expect("model"));
        assert!(matches!(
            reduce4_gkm(&circle),
            Err(Reduce4Error::InvalidGkm(_))
        ));
        let dependent = UnsignedMultigraph::new(
            2,
            2,
            vec!["a".into(), "b".into()],
            vec![
                ("a".into(), "b".into(), w2(1, 0)),
                ("a".into(), "b".into(), w2(2, 0)),
            ],
        )
        .expect("shape is fine");
        let err = reduce4_gkm(&dependent).expect_err("proportional labels");
        assert!(matches!(err, Reduce4Error::InvalidGkm(_)), "{err}");
    }

    #[test]
    fn wrong_dimensions_are_rejected() {
        let six = cpn_graph(1, &[sc(1), sc(2), sc(3)], false).expect("model");
        assert!(matches!(
            reduce4(&six),
            Err(Reduce4Error::UnsupportedShape { n: 3, .. })
        ));
        assert!(matches!(
            reduce4_gkm(&forget_signs(&six)),
            Err(Reduce4Error::UnsupportedShape { n: 3, .. })
        ));
    }

    #[test]
    fn traces_survive_serialization_and_replay_detects_tampering() {
        let trace = reduce4(&cp2()).expect("reduces");
        let json = serde_json::to_value(&trace).expect("serializable");
        assert_eq!(json["steps"][0]["step"], "blow-up-then-self-sum");
        assert_eq!(json["snapshots"][0]["kind"], "signed");
        let back: Trace4 = serde_json::from_value(json).expect("round-trips");
        assert_eq!(back, trace);
        replay4(&cp2(), &back).expect("replays");

        let mut tampered = trace.clone();
        tampered.snapshots[1] = tampered.snapshots[0].clone();
        let err = replay4(&cp2(), &tampered).expect_err("divergence is caught");
        assert!(matches!(err, Reduce4Error::Replay { step: 0, .. }), "{err}");

        let gkm = forget_signs(&sphere_graph(2, &[w2(1, 0), w2(0, 1)]).expect("model"));
        let gkm_trace = reduce4_gkm(&gkm).expect("reduces");
        let json = serde_json::to_string(&gkm_trace).expect("serializable");
        let back: Trace4 = serde_json::from_str(&json).expect("round-trips");
        replay4_gkm(&gkm, &back).expect("replays");
    }
}
