// Reduce six-dimensional circle multigraphs to the empty graph.
//
// The graph-level engine contracts a graph by connected-sum surgery: each
// macro-step deletes an opposite-data vertex pair (possibly after gluing a
// catalog model on first).  The default policy takes any exact-opposite pair
// as soon as one exists, which keeps traces short.  We reduce a mirror pair
// of projective spaces and a single projective space, printing every step,
// the vertex counts along the way, and the penultimate two-vertex graph.

use equigraph::algebra::WeightVec;
use equigraph::models::cpn_graph;
use equigraph::multigraph::{disjoint_union, SignedMultigraph};
use equigraph::reduce6::{reduce6_graph, Snapshot6, Step6, Trace6};

fn w(v: i64) -> WeightVec {
    WeightVec::scalar(v)
}

fn describe(step: &Step6) -> String {
    match step {
        Step6::SelfSum { case, p, q } => format!("self sum at ({p}, {q})  [{case:?}]"),
        Step6::ModelSum {
            case,
            model,
            p,
            model_vertex,
            then_p,
            then_q,
        } => format!(
            "glue {model:?} at ({p}, {model_vertex}), then self sum at ({then_p}, {then_q})  [{case:?}]"
        ),
        Step6::Move { .. } | Step6::ReverseEdge { .. } => format!("{step:?}"),
    }
}

fn graph_snapshots(trace: &Trace6) -> Vec<&SignedMultigraph> {
    trace
        .snapshots
        .iter()
        .map(|s| match s {
            Snapshot6::Graph(g) => g,
            Snapshot6::Collection(_) => panic!("graph traces snapshot graphs"),
        })
        .collect()
}

fn trace_out(name: &str, g: &SignedMultigraph) -> Trace6 {
    let trace = reduce6_graph(g).expect("describable graphs reduce");
    // Snapshots record the state after each step; the last one is empty.
    let snaps = graph_snapshots(&trace);
    println!("{name}  ({} vertices)", g.vertex_count());
    for (i, step) in trace.steps.iter().enumerate() {
        println!(
            "  step {}: {}  -> {} vertices",
            i + 1,
            describe(step),
            snaps[i].vertex_count()
        );
    }
    assert!(snaps.last().expect("nonempty trace").is_empty());
    println!("  -> empty after {} steps\n", trace.steps.len());
    trace
}

fn main() {
    // A projective space next to its orientation reverse.  Every vertex has
    // its exact mirror in the other component, so the engine deletes one
    // opposite pair per step: 8, 6, 4, 2, 0 vertices.
    let cp3 = cpn_graph(1, &[w(1), w(2), w(3)], false).expect("CP^3");
    let mirror = cpn_graph(1, &[w(1), w(2), w(3)], true).expect("reversed CP^3");
    let (pair, _) = disjoint_union(&cp3, &mirror).expect("same rank, same arity");

    let trace = trace_out("CP^3 (1,2,3) ⊔ its reverse", &pair);
    let snaps = graph_snapshots(&trace);
    let counts: Vec<usize> = snaps.iter().map(|g| g.vertex_count()).collect();
    assert_eq!(counts, [6, 4, 2, 0]);

    // The opposite pairs are taken smallest class first, so the pair with
    // the largest weights survives to the end: the next-to-last graph is a
    // two-vertex graph whose three edge classes are 3, 2, 1.
    let penultimate = snaps[snaps.len() - 2];
    println!("next-to-last graph:");
    for (id, sign) in penultimate.vertices() {
        println!("    {id} ({sign})  {:?}", penultimate.vertex_datum(id).expect("regular"));
    }
    let mut classes: Vec<String> = penultimate
        .edges()
        .iter()
        .map(|e| format!("{}", e.label()))
        .collect();
    classes.sort();
    println!("    edge classes: {}", classes.join(", "));
    assert_eq!(classes, ["1", "2", "3"]);
    println!();

    // A single projective space has one opposite pair hiding inside: the two
    // middle vertices carry [±, 1, 1, 2].  Contracting it leaves the outer
    // pair [±, 1, 2, 3], so the whole graph goes in two steps.
    let trace = trace_out("CP^3 (1,2,3) alone", &cp3);
    assert_eq!(trace.steps.len(), 2);
    assert!(!trace.backtracked, "no dead ends on the way");
}
