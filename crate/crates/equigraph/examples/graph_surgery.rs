// A tour of the operation algebra on signed labeled multigraphs.
//
// Runs each operation once on a small model graph and prints the before and
// after states: disjoint union, connected sum, self connected sum, edge
// reversal (with the normal form), edge exchange, and blow-up.  Every
// intermediate result is revalidated, and where an operation has a known
// outcome (sum of two spheres is a sphere; blow-up grows the vertex count by
// n − 1) we assert it.

use equigraph::algebra::WeightVec;
use equigraph::models::{cpn_graph, sphere_graph};
use equigraph::multigraph::{
    blow_up, connected_sum, disjoint_union, exchange_edges, iso_up_to_reversal, reverse_edge,
    reversal_normal_form, self_connected_sum, validate_graph, SignedMultigraph,
};

fn w(v: i64) -> WeightVec {
    WeightVec::scalar(v)
}

fn show(title: &str, g: &SignedMultigraph) {
    println!("{title}: {} vertices, {} edges", g.vertex_count(), g.edge_count());
    for (id, sign) in g.vertices() {
        let datum = g
            .vertex_datum(id)
            .map(|d| format!("{d:?}"))
            .unwrap_or_else(|_| "(irregular)".to_string());
        println!("    {id} ({sign})  {datum}");
    }
    for e in g.edges() {
        println!("    {e:?}");
    }
}

fn check(name: &str, g: &SignedMultigraph) {
    let report = validate_graph(g, false);
    assert!(report.pass, "{name} must stay valid: {:?}", report.violations);
}

fn main() {
    // --- Connected sum: S ⊕ S = S --------------------------------------
    let sphere = sphere_graph(1, &[w(1), w(2)]).expect("sphere");
    show("sphere S(1,2)", &sphere);

    // q2 of the left copy carries [−,1,2], q1 of the right copy [+,1,2]:
    // exactly opposite, which is what the sum requires.  Colliding ids on
    // the right get an `R.` prefix.
    let sum = connected_sum(&sphere, "q2", &sphere, "q1").expect("opposite data at the junction");
    show("S(1,2) # S(1,2)", &sum);
    check("connected sum", &sum);
    assert!(
        iso_up_to_reversal(&sum, &sphere),
        "sum of two spheres is a sphere again"
    );
    println!("    == S(1,2) up to reversal and renaming\n");

    // --- Disjoint union and self connected sum --------------------------
    // The same sum, staged: first the union (which reports how the right
    // copy's ids were renamed), then the merge inside one graph.
    let (union, renamed) = disjoint_union(&sphere, &sphere).expect("same rank, same arity");
    show("S(1,2) ⊔ S(1,2)", &union);
    check("disjoint union", &union);
    let merged = self_connected_sum(&union, "q2", &renamed("q1"))
        .expect("opposite pair inside one graph");
    assert!(iso_up_to_reversal(&merged, &sum), "staged sum agrees");
    println!("    self sum at (q2, {}) gives the same graph\n", renamed("q1"));

    // --- Edge reversal ---------------------------------------------------
    let cp2 = cpn_graph(1, &[w(1), w(2)], false).expect("CP^2");
    show("CP^2 (1,2)", &cp2);
    let reversed = reverse_edge(&cp2, 0).expect("edge 0 exists");
    show("after reversing edge 0", &reversed);
    check("edge reversal", &reversed);
    // Reversal negates one label and both endpoint signs; the fixed point
    // data are untouched as classes, so the normal forms coincide.
    assert_eq!(
        reversal_normal_form(&reversed),
        reversal_normal_form(&cp2),
        "reversal is invisible in the normal form"
    );
    println!("    same reversal normal form as CP^2 (1,2)\n");

    // --- Edge exchange ---------------------------------------------------
    // CP^3 (1,2,3) has two label-1 edges with four distinct endpoints:
    // (q0,q1) and (q2,q3).  Exchanging them rewires the graph without
    // touching any vertex datum, so all data-level screens still pass —
    // the exchanged graph is a different description candidate with the
    // same fixed point data.
    let cp3 = cpn_graph(1, &[w(1), w(2), w(3)], false).expect("CP^3");
    let (e1, e2) = {
        let mut found = Vec::new();
        for (i, e) in cp3.edges().iter().enumerate() {
            if *e.label() == w(1) {
                found.push(i);
            }
        }
        (found[0], *found.last().expect("two label-1 edges"))
    };
    let exchanged = exchange_edges(&cp3, e1, e2).expect("same label, distinct endpoints");
    show("CP^3 (1,2,3) with its label-1 edges exchanged", &exchanged);
    check("edge exchange", &exchanged);
    assert_eq!(
        exchanged.collection().expect("still regular"),
        cp3.collection().expect("regular"),
        "exchange preserves the fixed point data exactly"
    );
    println!("    same fixed point collection as CP^3 (1,2,3)\n");

    // --- Blow-up -----------------------------------------------------------
    // Blowing up a fixed point replaces it with a projective model on the
    // chosen weights; in arity n the vertex count grows by n − 1.
    let before = cp2.vertex_count();
    let blown = blow_up(&cp2, "q0", &[w(1), w(2)]).expect("weights match q0's edges");
    show("CP^2 (1,2) blown up at q0", &blown);
    check("blow-up", &blown);
    assert_eq!(blown.vertex_count(), before + 1, "n − 1 = 1 new vertex");
    println!("    vertex count {before} -> {}", blown.vertex_count());
}
