// Build the standard model catalog and run every validator on each entry.
//
// Each model family comes with parameters; the catalog below picks small
// representative values.  For every graph we run the structural checks plus
// the four data-level screens (localization sum, signature constancy,
// minimum-weight balance, sign balance) and print the verdicts.  At the end
// we plant a single-sign defect in one collection and show which screens
// notice.

use equigraph::algebra::WeightVec;
use equigraph::fpdata::{negate_datum, screen, FixedPointCollection};
use equigraph::models::{cpn_graph, sphere_graph, z2_sharp_z2bar_graph, zn_graph};
use equigraph::multigraph::{validate_graph, SignedMultigraph};

fn w(v: i64) -> WeightVec {
    WeightVec::scalar(v)
}

fn catalog() -> Vec<(&'static str, SignedMultigraph)> {
    vec![
        (
            "sphere S(1,2)",
            sphere_graph(1, &[w(1), w(2)]).expect("sphere"),
        ),
        (
            "CP^2 (1,2)",
            cpn_graph(1, &[w(1), w(2)], false).expect("CP^2"),
        ),
        (
            "CP^3 (1,2,3)",
            cpn_graph(1, &[w(1), w(2), w(3)], false).expect("CP^3"),
        ),
        (
            "Z_1 (3,2,1)",
            zn_graph(1, 1, &w(3), &w(2), &w(1), false).expect("Z_1"),
        ),
        (
            "Z_2 (3,1,1)",
            zn_graph(1, 2, &w(3), &w(1), &w(1), false).expect("Z_2"),
        ),
        (
            "Z_2 # Z_2-bar (3,1)",
            z2_sharp_z2bar_graph(1, &w(3), &w(1)).expect("Z_2 # Z_2-bar"),
        ),
    ]
}

fn main() {
    for (name, g) in catalog() {
        // Models are honest torus actions, so we ask for effectiveness too.
        let report = validate_graph(&g, true);
        println!(
            "{name}: {} vertices, {} edges -> {}",
            g.vertex_count(),
            g.edge_count(),
            if report.pass { "pass" } else { "FAIL" }
        );
        for line in &report.violations {
            println!("    structure: {line}");
        }
        if let Some(screening) = &report.screening {
            for v in &screening.verdicts {
                println!(
                    "    {}: {} — {}",
                    v.check,
                    if v.pass { "ok" } else { "fail" },
                    v.reason
                );
            }
        }
        assert!(report.pass, "model {name} must validate");
    }

    // Plant a defect: flip the sign of one fixed point of Z_1 (3,2,1) and
    // screen the damaged collection.  A single flipped sign unbalances the
    // localization sum, and usually more.
    let z1 = zn_graph(1, 1, &w(3), &w(2), &w(1), false).expect("Z_1");
    let clean = z1.collection().expect("fixed point data of a valid graph");
    let mut points = clean.points().to_vec();
    points[0] = negate_datum(&points[0]);
    let damaged =
        FixedPointCollection::new(clean.k(), clean.n(), points).expect("same arity, same rank");

    println!();
    println!("planted defect: first point of Z_1 (3,2,1) with its sign flipped");
    let report = screen(&damaged);
    for v in &report.verdicts {
        println!(
            "    {}: {} — {}",
            v.check,
            if v.pass { "ok" } else { "fail" },
            v.reason
        );
    }
    assert!(!report.realizable_candidate, "the defect must be caught");
    println!("verdict: caught");
}
