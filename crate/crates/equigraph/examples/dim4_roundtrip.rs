// Generate random four-dimensional descriptions and contract them back to
// nothing.
//
// `generate4` grows a two-regular signed multigraph from the empty graph by
// random elementary constructions (new mirror component, edge subdivision,
// vertex split, edge reversal), deterministically from a seed.  `reduce4`
// undoes any such graph with self-sums and blow-ups, largest label class
// first.  This example walks one seed in detail — construction steps,
// reduction steps, vertex trail, replay — and then sweeps a block of seeds
// for both torus ranks.

use equigraph::multigraph::validate_graph;
use equigraph::reduce4::{generate4, reduce4, replay4, Snapshot4, Step4};

fn step_name(step: &Step4) -> &'static str {
    match step {
        Step4::AddMinimal { .. } => "add minimal component",
        Step4::Subdivide { .. } => "subdivide edge",
        Step4::SplitVertex { .. } => "split vertex",
        Step4::Reverse { .. } => "reverse edge",
        Step4::SelfSum { .. } => "self sum",
        Step4::BlowUpThenSelfSum { .. } => "blow up, then self sum",
    }
}

fn main() {
    // --- One seed in detail ---------------------------------------------
    let (graph, built) = generate4(1, 7, 6).expect("k = 1 is constructible");
    println!("construction (k = 1, seed 7, 6 steps):");
    for step in &built.steps {
        println!("    {:<22}  {step:?}", step_name(step));
    }
    println!(
        "  grew to {} vertices, {} edges",
        graph.vertex_count(),
        graph.edge_count()
    );
    for (id, sign) in graph.vertices() {
        println!("    {id} ({sign})  {:?}", graph.vertex_datum(id).expect("regular"));
    }

    let trace = reduce4(&graph).expect("generated graphs reduce");
    println!("reduction:");
    for step in &trace.steps {
        println!("    {:<22}  {step:?}", step_name(step));
    }
    println!("  vertex trail {:?}", trace.vertex_trail());
    let Some(last) = trace.snapshots.last() else {
        panic!("traces are never empty");
    };
    assert_eq!(last.vertex_count(), 0, "reduction ends at the empty graph");

    // Every intermediate graph along the reduction is itself valid.
    for snap in &trace.snapshots {
        let Snapshot4::Signed(h) = snap else {
            panic!("signed input gives signed snapshots");
        };
        assert!(validate_graph(h, false).pass);
    }

    // The recorded steps replay to the recorded end state.
    let replayed = replay4(&graph, &trace).expect("own trace replays");
    assert!(replayed.is_empty());
    println!("  replayed the trace: empty graph confirmed\n");

    // --- A seed sweep ------------------------------------------------------
    // Rank 1 and rank 2, ten seeds each; the reduction must always reach the
    // empty graph.  Self-sums drop the vertex count by two, so the number of
    // macro-steps is half the final vertex count.
    for k in [1, 2] {
        for seed in 0..10 {
            let (g, _) = generate4(k, seed, 8).expect("constructible rank");
            let t = reduce4(&g).expect("generated graphs reduce");
            println!(
                "    k={k} seed={seed}: {:>2} vertices, {:>2} reduction steps, trail {:?}",
                g.vertex_count(),
                t.steps.len(),
                t.vertex_trail()
            );
            assert_eq!(t.snapshots.last().expect("nonempty").vertex_count(), 0);
        }
    }
}
