// Reduce unsigned four-dimensional graphs: the independent-label regime.
//
// For torus rank k ≥ 2 the two edge labels at every vertex must be linearly
// independent, and under that hypothesis the signs are redundant — the
// reduction engine fixes an orientation per macro-step (recorded in the
// step's `assumed_plus` field) and contracts as in the signed case.  This
// example forgets the signs of two rank-2 models, reduces the skeletons, and
// shows the two rejections: dependent labels at a vertex, and rank 1, where
// independence is impossible.

use equigraph::algebra::WeightVec;
use equigraph::models::{cpn_graph, sphere_graph};
use equigraph::reduce4::{
    forget_signs, reduce4_gkm, replay4_gkm, Reduce4Error, Step4, UnsignedMultigraph,
};

fn wv(a: i64, b: i64) -> WeightVec {
    WeightVec::from_i64s(&[a, b]).expect("nonzero")
}

fn reduce_out(name: &str, g: &UnsignedMultigraph) {
    println!("{name}  ({} vertices)", g.vertex_count());
    for e in g.edges() {
        println!("    {e:?}");
    }
    let trace = reduce4_gkm(g).expect("model skeletons reduce");
    for step in &trace.steps {
        match step {
            Step4::SelfSum { p, q, assumed_plus } => println!(
                "    self sum at ({p}, {q}), orienting {:?} as +",
                assumed_plus.as_deref().expect("unsigned engine records it")
            ),
            Step4::BlowUpThenSelfSum { p, assumed_plus, .. } => println!(
                "    blow up {p} and self sum, orienting {:?} as +",
                assumed_plus.as_deref().expect("unsigned engine records it")
            ),
            other => println!("    {other:?}"),
        }
    }
    let end = replay4_gkm(g, &trace).expect("own trace replays");
    assert!(end.is_empty(), "reduction ends at the empty graph");
    println!("  -> empty after {} steps\n", trace.steps.len());
}

fn main() {
    // Two rank-2 models, signs forgotten.
    let cp2 = cpn_graph(2, &[wv(1, 0), wv(0, 1)], false).expect("rank-2 CP^2");
    reduce_out("CP^2 skeleton, a = ((1,0), (0,1))", &forget_signs(&cp2));

    let sphere = sphere_graph(2, &[wv(1, 0), wv(0, 1)]).expect("rank-2 sphere");
    reduce_out("sphere skeleton, labels (1,0), (0,1)", &forget_signs(&sphere));

    // Rejection 1: proportional labels at a vertex.  This skeleton is a
    // perfectly fine multigraph, but both labels at each vertex lie on the
    // same line, so no orientation assumption can be propagated.
    let dependent = UnsignedMultigraph::new(
        2,
        2,
        vec!["p".to_string(), "q".to_string()],
        vec![
            ("p".to_string(), "q".to_string(), wv(1, 1)),
            ("p".to_string(), "q".to_string(), wv(2, 2)),
        ],
    )
    .expect("well-formed graph");
    match reduce4_gkm(&dependent) {
        Err(Reduce4Error::InvalidGkm(msg)) => println!("rejected dependent labels: {msg}"),
        other => panic!("expected an independence failure, got {other:?}"),
    }

    // Rejection 2: rank 1.  Two scalars are never linearly independent.
    let rank1 = forget_signs(&sphere_graph(1, &[WeightVec::scalar(1), WeightVec::scalar(2)]).expect("sphere"));
    match reduce4_gkm(&rank1) {
        Err(Reduce4Error::InvalidGkm(msg)) => println!("rejected rank 1: {msg}"),
        other => panic!("expected a rank failure, got {other:?}"),
    }
}
