// Reduce six-dimensional fixed point data to the empty collection, move by
// move.
//
// The data-level engine works on bare fixed point collections: at each step
// it classifies the points carrying the current maximum weight and applies a
// rewrite move that eliminates that weight, never introducing a larger one.
// This example traces two classics — the projective space CP^3 with weights
// (1,2,3) and the six-dimensional quadric-type model Z_2 (3,1,1) — printing
// every move with the data it removes and adds.

use equigraph::algebra::WeightVec;
use equigraph::fpdata::FixedPointCollection;
use equigraph::models::{cpn_graph, zn_graph};
use equigraph::reduce6::{reduce6_data, Snapshot6, Step6};

fn w(v: i64) -> WeightVec {
    WeightVec::scalar(v)
}

fn trace_out(name: &str, c: &FixedPointCollection) -> usize {
    println!("{name}  ({} points)", c.len());
    for d in c.points() {
        println!("    {d:?}");
    }
    let trace = reduce6_data(c).expect("the standard models reduce");
    // snapshots[i] is the collection left after steps[i].
    for (i, (step, after)) in trace.steps.iter().zip(&trace.snapshots).enumerate() {
        let Step6::Move { case, mv } = step else {
            panic!("the data engine emits rewrite moves only");
        };
        println!("  step {}: [{case:?}] {mv:?}", i + 1);
        for d in &mv.removed {
            println!("      - {d:?}");
        }
        for d in &mv.added {
            println!("      + {d:?}");
        }
        let Snapshot6::Collection(c) = after else {
            panic!("data traces snapshot collections");
        };
        println!("      {} points left", c.len());
    }
    let Some(Snapshot6::Collection(last)) = trace.snapshots.last() else {
        panic!("trace ends in a collection");
    };
    assert!(last.is_empty(), "reduction must reach the empty collection");
    assert!(!trace.backtracked, "the standard models reduce greedily");
    println!("  -> empty after {} moves\n", trace.steps.len());
    trace.steps.len()
}

fn main() {
    let cp3 = cpn_graph(1, &[w(1), w(2), w(3)], false)
        .expect("CP^3")
        .collection()
        .expect("regular graph");
    let moves = trace_out("Σ CP^3 (1,2,3)", &cp3);
    assert_eq!(moves, 3, "an op-2 move followed by op-1 twice");

    let z2 = zn_graph(1, 2, &w(3), &w(1), &w(1), false)
        .expect("Z_2")
        .collection()
        .expect("regular graph");
    let moves = trace_out("Σ Z_2 (3,1,1)", &z2);
    assert_eq!(moves, 5, "an op-4 move followed by op-1 four times");
}
