//! Generators for the standard multigraphs: spheres, projective spaces, the
//! 6-dimensional Hirzebruch-type family `Z_n`, and the connected sum
//! `Z₂ ♯ Z̄₂` — the catalog both reduction engines cut against.
//!
//! Vertex ids are deterministic (`q0`…`qn` for projective spaces, `q1`…`q6`
//! for `Z_n`, primed/double-primed for the `Z₂ ♯ Z̄₂` halves), so every trace
//! that references a model vertex is reproducible.

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraError, Int, Sign, WeightVec};
use crate::fpdata::FpError;
use crate::multigraph::{connected_sum, GraphError, SignedMultigraph};

pub use crate::multigraph::reverse_orientation;

/// A point in the model catalog, as referenced by traces and the `gen`
/// command.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "model")]
pub enum ModelId {
    #[serde(rename = "sphere")]
    Sphere { weights: Vec<WeightVec>, reversed: bool },
    #[serde(rename = "cpn")]
    CPn { a: Vec<WeightVec>, reversed: bool },
    #[serde(rename = "zn")]
    Zn {
        n: i64,
        a: WeightVec,
        b: WeightVec,
        c: WeightVec,
        reversed: bool,
    },
    #[serde(rename = "z2-sharp-z2bar")]
    Z2SharpZ2Bar {
        a: WeightVec,
        e: WeightVec,
        reversed: bool,
    },
}

/// Build the graph a [`ModelId`] names. The torus rank is read off the
/// parameters.
pub fn model_graph(id: &ModelId) -> Result<SignedMultigraph, GraphError> {
    let g = match id {
        ModelId::Sphere { weights, reversed } => {
            let k = weights.first().map(WeightVec::k).unwrap_or(1);
            let g = sphere_graph(k, weights)?;
            if *reversed {
                reverse_orientation(&g)
            } else {
                g
            }
        }
        ModelId::CPn { a, reversed } => {
            let k = a.first().map(WeightVec::k).unwrap_or(1);
            cpn_graph(k, a, *reversed)?
        }
        ModelId::Zn {
            n,
            a,
            b,
            c,
            reversed,
        } => zn_graph(a.k(), *n, a, b, c, *reversed)?,
        ModelId::Z2SharpZ2Bar { a, e, reversed } => {
            let g = z2_sharp_z2bar_graph(a.k(), a, e)?;
            if *reversed {
                reverse_orientation(&g)
            } else {
                g
            }
        }
    };
    Ok(g)
}

/// The two-fixed-point sphere: vertices `q1` (+) and `q2` (−) joined by `n`
/// parallel edges labeled `a_1, …, a_n`. Its data are `[+,a_1,…,a_n]` and
/// `[−,a_1,…,a_n]`.
pub fn sphere_graph(k: usize, weights: &[WeightVec]) -> Result<SignedMultigraph, GraphError> {
    if weights.is_empty() {
        return Err(GraphError::Fp(FpError::PointArity {
            expected: 1,
            got: 0,
        }));
    }
    let edges = weights
        .iter()
        .map(|w| ("q1".to_string(), "q2".to_string(), w.clone()))
        .collect();
    SignedMultigraph::new(
        k,
        weights.len(),
        vec![("q1", Sign::Plus), ("q2", Sign::Minus)],
        edges,
    )
}

/// The projective-space multigraph on parameters `a_1, …, a_n` (all distinct
/// and nonzero): vertices `q0, …, qn` with sign `(−1)^i`, and an edge
/// `(q_i, q_j)` labeled `a_j − a_i` for `i < j`, where `a_0 = 0`.
///
/// The stored sign `(−1)^i` composes with the label flips performed by datum
/// canonicalization to give the familiar alternating data; e.g. for
/// `a = (1,2,3)` the data are `[+,1,2,3], [−,1,1,2], [+,2,1,1], [−,3,2,1]`.
pub fn cpn_graph(
    k: usize,
    a: &[WeightVec],
    reversed: bool,
) -> Result<SignedMultigraph, GraphError> {
    if a.is_empty() {
        return Err(GraphError::Fp(FpError::PointArity {
            expected: 1,
            got: 0,
        }));
    }
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if a[i] == a[j] {
                return Err(GraphError::Fp(FpError::SideCondition(
                    "projective model parameters must be pairwise distinct",
                )));
            }
        }
    }
    let n = a.len();
    let sign_of = |i: usize| {
        let s = if i % 2 == 0 { Sign::Plus } else { Sign::Minus };
        if reversed {
            s.flip()
        } else {
            s
        }
    };
    let vertices: Vec<(String, Sign)> = (0..=n).map(|i| (format!("q{i}"), sign_of(i))).collect();
    let mut edges = Vec::new();
    for i in 0..=n {
        for j in i + 1..=n {
            // a_0 = 0, so the label is a_j for i = 0 and a_j − a_i otherwise.
            let label = if i == 0 {
                a[j - 1].clone()
            } else {
                a[j - 1]
                    .try_sub(&a[i - 1])
                    .map_err(|_| FpError::SideCondition("projective model parameters collide"))?
            };
            edges.push((format!("q{i}"), format!("q{j}"), label));
        }
    }
    SignedMultigraph::new(k, n, vertices, edges)
}

// sx·x + sy·y with an explicit rank check; fails if the result vanishes.
fn lin_comb(x: &WeightVec, sx: i64, y: &WeightVec, sy: i64) -> Result<WeightVec, AlgebraError> {
    if x.k() != y.k() {
        return Err(AlgebraError::DimensionMismatch {
            expected: x.k(),
            got: y.k(),
        });
    }
    let coords = x
        .coords()
        .iter()
        .zip(y.coords())
        .map(|(a, b)| a * Int::from(sx) + b * Int::from(sy))
        .collect();
    WeightVec::new(coords)
}

/// The 6-dimensional Hirzebruch-type multigraph `Z_n(a, b, c)`: six vertices
/// `q1…q6` with signs `+,−,−,−,+,+` and nine edges. Its data are
/// `[+,a−b,a,c], [−,a−b,a−nc,c], [−,a−b,b,c], [−,a−b,nc−b,c], [+,a,b,c],
/// [+,a−nc,nc−b,c]`.
///
/// Requires `a, b, c` nonzero and `a−b`, `a−nc`, `nc−b` nonzero.
pub fn zn_graph(
    k: usize,
    hirzebruch_n: i64,
    a: &WeightVec,
    b: &WeightVec,
    c: &WeightVec,
    reversed: bool,
) -> Result<SignedMultigraph, GraphError> {
    for w in [a, b, c] {
        if w.k() != k {
            return Err(GraphError::LabelRank {
                expected: k,
                got: w.k(),
            });
        }
    }
    let ab = lin_comb(a, 1, b, -1)
        .map_err(|_| FpError::SideCondition("Z_n requires a − b ≠ 0"))?;
    let anc = lin_comb(a, 1, c, -hirzebruch_n)
        .map_err(|_| FpError::SideCondition("Z_n requires a − n·c ≠ 0"))?;
    let ncb = lin_comb(c, hirzebruch_n, b, -1)
        .map_err(|_| FpError::SideCondition("Z_n requires n·c − b ≠ 0"))?;

    let signs = [
        Sign::Plus,
        Sign::Minus,
        Sign::Minus,
        Sign::Minus,
        Sign::Plus,
        Sign::Plus,
    ];
    let vertices: Vec<(String, Sign)> = signs
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let s = if reversed { s.flip() } else { *s };
            (format!("q{}", i + 1), s)
        })
        .collect();
    let e = |u: &str, v: &str, l: &WeightVec| (u.to_string(), v.to_string(), l.clone());
    let edges = vec![
        e("q1", "q2", c),
        e("q1", "q3", &ab),
        e("q5", "q1", a),
        e("q2", "q4", &ab),
        e("q2", "q6", &anc),
        e("q3", "q4", c),
        e("q4", "q6", &ncb),
        e("q5", "q3", b),
        e("q5", "q6", c),
    ];
    SignedMultigraph::new(k, 3, vertices, edges)
}

/// The connected sum `Z₂(a,e,e) ♯ Z̄₂(a,a−e,a−e)` at the two `q1` vertices:
/// a 10-vertex, 15-edge multigraph. The left half keeps ids `q2'…q6'`, the
/// right half `q2''…q6''`.
///
/// Requires `a, e` nonzero, `a ≠ e` and `2e ≠ a`.
pub fn z2_sharp_z2bar_graph(
    k: usize,
    a: &WeightVec,
    e: &WeightVec,
) -> Result<SignedMultigraph, GraphError> {
    lin_comb(e, 2, a, -1).map_err(|_| FpError::SideCondition("requires 2e ≠ a"))?;
    let ae = lin_comb(a, 1, e, -1).map_err(|_| FpError::SideCondition("requires a ≠ e"))?;
    let left = zn_graph(k, 2, a, e, e, false)?.rename_vertices(|id| format!("{id}'"))?;
    let right =
        zn_graph(k, 2, a, &ae, &ae, true)?.rename_vertices(|id| format!("{id}''"))?;
    connected_sum(&left, "q1'", &right, "q1''")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{int, rat};
    use crate::fpdata::{
        make_datum, screen, verify_abbv, verify_signature, FixedPointCollection,
    };
    use crate::multigraph::{blow_up, iso_up_to_reversal, validate_graph};

    fn w(v: i64) -> WeightVec {
        WeightVec::scalar(v)
    }

    fn ws(vs: &[i64]) -> Vec<WeightVec> {
        vs.iter().map(|&v| w(v)).collect()
    }

    fn expect_collection(n: usize, raw: &[(Sign, &[i64])]) -> FixedPointCollection {
        FixedPointCollection::new(
            1,
            n,
            raw.iter()
                .map(|(s, vs)| make_datum(*s, ws(vs)).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn sphere_graph_examples() {
        let g = sphere_graph(1, &ws(&[1, 2, 3])).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(
            g.collection().unwrap(),
            expect_collection(3, &[(Sign::Plus, &[1, 2, 3]), (Sign::Minus, &[1, 2, 3])])
        );
        // Equal counts of [+,w̄] and [−,w̄] when all weights coincide.
        let g = sphere_graph(1, &ws(&[1, 1])).unwrap();
        let c = g.collection().unwrap();
        let d = make_datum(Sign::Plus, ws(&[1, 1])).unwrap();
        assert_eq!(c.count(&d), c.count(&crate::fpdata::negate_datum(&d)));

        let e1 = WeightVec::from_i64s(&[1, 0]).unwrap();
        let e2 = WeightVec::from_i64s(&[0, 1]).unwrap();
        let g = sphere_graph(2, &[e1, e2]).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 2);
        assert!(validate_graph(&g, true).pass);
    }

    #[test]
    fn cpn_graph_data_match_the_worked_example() {
        let g = cpn_graph(1, &ws(&[1, 2, 3]), false).unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 6);
        assert_eq!(
            g.collection().unwrap(),
            expect_collection(
                3,
                &[
                    (Sign::Plus, &[1, 2, 3]),
                    (Sign::Minus, &[1, 1, 2]),
                    (Sign::Plus, &[2, 1, 1]),
                    (Sign::Minus, &[3, 2, 1]),
                ]
            )
        );
        assert!(validate_graph(&g, true).pass);

        let g = cpn_graph(1, &ws(&[1, 2]), false).unwrap();
        assert_eq!(
            g.collection().unwrap(),
            expect_collection(
                2,
                &[
                    (Sign::Plus, &[1, 2]),
                    (Sign::Minus, &[1, 1]),
                    (Sign::Plus, &[2, 1]),
                ]
            )
        );

        // The reversed flag negates every datum sign.
        let r = cpn_graph(1, &ws(&[1, 2]), true).unwrap();
        assert_eq!(
            r.collection().unwrap(),
            cpn_graph(1, &ws(&[1, 2]), false)
                .unwrap()
                .collection()
                .unwrap()
                .negated()
        );

        assert!(matches!(
            cpn_graph(1, &ws(&[1, 1, 2]), false),
            Err(GraphError::Fp(FpError::SideCondition(_)))
        ));
    }

    #[test]
    fn zn_graph_examples() {
        let g = zn_graph(1, 1, &w(3), &w(2), &w(1), false).unwrap();
        assert_eq!(g.vertex_count(), 6);
        assert_eq!(g.edge_count(), 9);
        assert_eq!(
            g.collection().unwrap(),
            expect_collection(
                3,
                &[
                    (Sign::Plus, &[1, 3, 1]),
                    (Sign::Minus, &[1, 2, 1]),
                    (Sign::Minus, &[1, 2, 1]),
                    (Sign::Plus, &[1, 1, 1]),
                    (Sign::Plus, &[3, 2, 1]),
                    (Sign::Minus, &[2, 1, 1]),
                ]
            )
        );
        assert_eq!(verify_abbv(&g.collection().unwrap()), rat(0, 1));
        assert!(validate_graph(&g, true).pass);

        let g = zn_graph(1, 2, &w(3), &w(1), &w(1), false).unwrap();
        assert_eq!(
            g.collection().unwrap(),
            expect_collection(
                3,
                &[
                    (Sign::Plus, &[2, 3, 1]),
                    (Sign::Minus, &[2, 1, 1]),
                    (Sign::Minus, &[2, 1, 1]),
                    (Sign::Minus, &[2, 1, 1]),
                    (Sign::Plus, &[3, 1, 1]),
                    (Sign::Plus, &[1, 1, 1]),
                ]
            )
        );
        assert_eq!(verify_abbv(&g.collection().unwrap()), rat(0, 1));

        // Reversed flag flips all signs.
        let r = zn_graph(1, 1, &w(3), &w(2), &w(1), true).unwrap();
        assert_eq!(
            r.collection().unwrap(),
            zn_graph(1, 1, &w(3), &w(2), &w(1), false)
                .unwrap()
                .collection()
                .unwrap()
                .negated()
        );

        // Side conditions: a = b collapses an edge label.
        assert!(zn_graph(1, 1, &w(2), &w(2), &w(1), false).is_err());
        // n·c = a collapses another.
        assert!(zn_graph(1, 2, &w(2), &w(3), &w(1), false).is_err());
    }

    #[test]
    fn z2_sharp_z2bar_structure_and_data() {
        let g = z2_sharp_z2bar_graph(1, &w(3), &w(1)).unwrap();
        assert_eq!(g.vertex_count(), 10);
        assert_eq!(g.edge_count(), 15);
        assert_eq!(
            g.collection().unwrap(),
            expect_collection(
                3,
                &[
                    (Sign::Minus, &[2, 1, 1]),
                    (Sign::Minus, &[2, 1, 1]),
                    (Sign::Minus, &[2, 1, 1]),
                    (Sign::Plus, &[3, 1, 1]),
                    (Sign::Plus, &[1, 1, 1]),
                    (Sign::Minus, &[1, 1, 2]),
                    (Sign::Plus, &[1, 2, 2]),
                    (Sign::Plus, &[1, 2, 2]),
                    (Sign::Minus, &[3, 2, 2]),
                    (Sign::Plus, &[1, 2, 2]),
                ]
            )
        );
        assert_eq!(verify_abbv(&g.collection().unwrap()), rat(0, 1));
        assert_eq!(verify_signature(&g.collection().unwrap()), Ok(int(0)));
        assert!(validate_graph(&g, true).pass);
        assert!(matches!(
            z2_sharp_z2bar_graph(1, &w(2), &w(1)),
            Err(GraphError::Fp(FpError::SideCondition(_)))
        ));
    }

    #[test]
    fn z2_sharp_z2bar_matches_the_direct_edge_list() {
        // The construction by connected sum must coincide with writing the
        // 15 edges down directly (a = 3, e = 1: a−e = 2, a−2e = 1, 2e−a = −1).
        let g = z2_sharp_z2bar_graph(1, &w(3), &w(1)).unwrap();
        let direct = SignedMultigraph::new(
            1,
            3,
            vec![
                ("q2'", Sign::Minus),
                ("q3'", Sign::Minus),
                ("q4'", Sign::Minus),
                ("q5'", Sign::Plus),
                ("q6'", Sign::Plus),
                ("q2''", Sign::Plus),
                ("q3''", Sign::Plus),
                ("q4''", Sign::Plus),
                ("q5''", Sign::Minus),
                ("q6''", Sign::Minus),
            ],
            [
                ("q2'", "q4'", 2),
                ("q2'", "q6'", 1),
                ("q3'", "q4'", 1),
                ("q4'", "q6'", 1),
                ("q5'", "q3'", 1),
                ("q5'", "q6'", 1),
                ("q2''", "q4''", 1),
                ("q2''", "q6''", -1),
                ("q3''", "q4''", 2),
                ("q4''", "q6''", 2),
                ("q5''", "q3''", 2),
                ("q5''", "q6''", 2),
                ("q2'", "q3''", 1),
                ("q3'", "q2''", 2),
                ("q5'", "q5''", 3),
            ]
            .iter()
            .map(|(u, v, l)| (u.to_string(), v.to_string(), w(*l)))
            .collect(),
        )
        .unwrap();
        assert_eq!(g, direct);
        assert!(iso_up_to_reversal(&g, &direct));
    }

    #[test]
    fn reverse_orientation_negates_the_signature() {
        let g = cpn_graph(1, &ws(&[1, 2]), false).unwrap();
        assert_eq!(verify_signature(&g.collection().unwrap()), Ok(int(1)));
        let r = reverse_orientation(&g);
        assert_eq!(verify_signature(&r.collection().unwrap()), Ok(int(-1)));
        assert_eq!(reverse_orientation(&r), g);
    }

    #[test]
    fn model_catalog_screens_clean() {
        let catalog: Vec<SignedMultigraph> = vec![
            sphere_graph(1, &ws(&[1, 2, 3])).unwrap(),
            cpn_graph(1, &ws(&[1, 2, 3]), false).unwrap(),
            cpn_graph(1, &ws(&[1, 2, 3]), true).unwrap(),
            zn_graph(1, 1, &w(3), &w(2), &w(1), false).unwrap(),
            zn_graph(1, 2, &w(3), &w(1), &w(1), false).unwrap(),
            zn_graph(1, 0, &w(1), &w(2), &w(5), false).unwrap(),
            z2_sharp_z2bar_graph(1, &w(3), &w(1)).unwrap(),
            z2_sharp_z2bar_graph(1, &w(5), &w(2)).unwrap(),
        ];
        for g in &catalog {
            let rep = validate_graph(g, false);
            assert!(rep.pass, "{g:?}: {:?}", rep.violations);
            assert!(screen(&g.collection().unwrap()).realizable_candidate);
        }
    }

    #[test]
    fn model_graph_dispatch_and_serde() {
        let id = ModelId::Zn {
            n: 1,
            a: w(3),
            b: w(2),
            c: w(1),
            reversed: false,
        };
        let g = model_graph(&id).unwrap();
        assert_eq!(g, zn_graph(1, 1, &w(3), &w(2), &w(1), false).unwrap());
        let json = serde_json::to_string(&id).unwrap();
        assert!(json.contains("\"model\":\"zn\""));
        let back: ModelId = serde_json::from_str(&json).unwrap();
        assert_eq!(id, back);

        let id = ModelId::Sphere {
            weights: ws(&[1, 2]),
            reversed: true,
        };
        let g = model_graph(&id).unwrap();
        assert_eq!(g.vertex_sign("q1"), Some(Sign::Minus));
    }

    #[test]
    fn blow_up_replaces_a_vertex_by_a_triangle() {
        // A 3-valent vertex with labels {1,2,5}: blowing it up yields the
        // triangle with labels a₂−a₁=1, a₃−a₁=4, a₃−a₂=3, outer edges intact.
        let g = SignedMultigraph::new(
            1,
            3,
            vec![
                ("p", Sign::Plus),
                ("x1", Sign::Plus),
                ("x2", Sign::Plus),
                ("x3", Sign::Plus),
            ],
            vec![
                ("p".into(), "x1".into(), w(1)),
                ("p".into(), "x2".into(), w(2)),
                ("p".into(), "x3".into(), w(5)),
            ],
        )
        .unwrap();
        let out = blow_up(&g, "p", &ws(&[1, 2, 5])).unwrap();
        assert_eq!(out.vertex_count(), g.vertex_count() + 3 - 1);
        assert!(out.vertex_sign("p").is_none());
        for (x, q, l) in [("x1", "q1", 1), ("x2", "q2", 2), ("x3", "q3", 5)] {
            let es = out.edges_between(x, q);
            assert_eq!(es.len(), 1);
            assert_eq!(out.edges()[es[0]].label(), &w(l));
        }
        let mut triangle: Vec<WeightVec> = [("q1", "q2"), ("q1", "q3"), ("q2", "q3")]
            .iter()
            .map(|(u, v)| {
                let es = out.edges_between(u, v);
                assert_eq!(es.len(), 1);
                out.edges()[es[0]].label().clone()
            })
            .collect();
        triangle.sort();
        assert_eq!(triangle, ws(&[1, 3, 4]));
    }

    #[test]
    fn blow_up_of_the_projective_plane_base_point() {
        let g = cpn_graph(1, &ws(&[1, 2]), false).unwrap();
        let out = blow_up(&g, "q0", &ws(&[1, 2])).unwrap();
        assert_eq!(out.vertex_count(), 4);
        let rep = validate_graph(&out, true);
        assert!(rep.pass, "{:?}", rep.violations);
        assert_eq!(
            out.collection().unwrap(),
            expect_collection(
                2,
                &[
                    (Sign::Plus, &[1, 2]),
                    (Sign::Minus, &[1, 1]),
                    (Sign::Plus, &[1, 1]),
                    (Sign::Minus, &[1, 2]),
                ]
            )
        );
        assert_eq!(verify_abbv(&out.collection().unwrap()), rat(0, 1));
    }

    #[test]
    fn blow_up_handles_reversal_choices_and_rejects_bad_weights() {
        let g = cpn_graph(1, &ws(&[1, 2]), false).unwrap();
        // Choosing {−1, 2} forces one reversal at q0 (ε flips to −), so the
        // non-reversed model is glued in; the result is still valid.
        let out = blow_up(&g, "q0", &[w(-1), w(2)]).unwrap();
        assert_eq!(out.vertex_count(), 4);
        assert!(validate_graph(&out, true).pass);

        assert!(matches!(
            blow_up(&g, "q0", &ws(&[1, 1])),
            Err(GraphError::BlowUpWeights(_))
        ));
        assert!(matches!(
            blow_up(&g, "q0", &ws(&[1, 3])),
            Err(GraphError::BlowUpWeights(_))
        ));
        assert!(matches!(
            blow_up(&g, "nope", &ws(&[1, 2])),
            Err(GraphError::UnknownVertex(_))
        ));

        // A negative vertex uses the non-reversed model.
        let r = reverse_orientation(&g);
        let out = blow_up(&r, "q0", &ws(&[1, 2])).unwrap();
        assert!(validate_graph(&out, true).pass);
    }
}
