// Render signed multigraphs as Graphviz DOT.
//
// The exporter writes one undirected `graph { … }` block: vertices carry
// `id,sign` labels, edges carry the canonical form of their label (first
// nonzero coordinate positive), so a reversed edge renders with the same
// class.  Output is deterministic — vertices in id order, edges in stored
// order — which makes the files diffable across runs.

use equigraph::algebra::WeightVec;
use equigraph::cli::dot_export;
use equigraph::models::{cpn_graph, sphere_graph};
use equigraph::multigraph::{reverse_edge, SignedMultigraph};

fn w(v: i64) -> WeightVec {
    WeightVec::scalar(v)
}

fn main() {
    let sphere = sphere_graph(1, &[w(2), w(5)]).expect("sphere");
    println!("// sphere S(2,5)");
    print!("{}", dot_export(&sphere));
    println!();

    let cp3 = cpn_graph(1, &[w(1), w(2), w(3)], false).expect("CP^3");
    println!("// CP^3 (1,2,3)");
    print!("{}", dot_export(&cp3));
    println!();

    // Determinism: same graph, same bytes.
    assert_eq!(dot_export(&cp3), dot_export(&cp3));

    // Reversal invariance of edge labels: reversing an edge negates its
    // stored label and flips the endpoint signs.  The DOT edge line shows
    // the canonical class, so only the node labels change.
    let reversed = reverse_edge(&cp3, 0).expect("edge 0 exists");
    let before = dot_export(&cp3);
    let after = dot_export(&reversed);
    let edge_lines = |s: &str| -> Vec<String> {
        s.lines()
            .filter(|l| l.contains("--"))
            .map(str::to_string)
            .collect()
    };
    assert_eq!(
        edge_lines(&before),
        edge_lines(&after),
        "edge classes survive reversal"
    );
    assert_ne!(before, after, "the flipped endpoint signs do show");
    println!("// reversing an edge changes node signs only:");
    for line in after.lines().filter(|l| l.contains("label=") && !l.contains("--")) {
        println!("{line}");
    }

    // The empty graph renders as an empty block.
    let empty = SignedMultigraph::empty(1, 3);
    assert_eq!(dot_export(&empty), "graph {\n}\n");
    println!("// empty graph: {:?}", dot_export(&empty));
}
