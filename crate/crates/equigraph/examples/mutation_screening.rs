// Measure how well the validators catch small data corruptions.
//
// Starting from the fixed point data of known-good models, apply one random
// single-site mutation — flip one point's sign, or add 1 to one weight —
// and screen the result.  A single-site change moves the localization sum
// by exactly one nonzero difference, so the first screen alone catches
// every such mutant; the run below confirms that empirically.  To fool the
// screens a corruption has to come in canceling pairs, and the example
// closes with one: a symmetric two-site bump that passes everything —
// because it lands on data that are genuinely realizable.

use equigraph::algebra::WeightVec;
use equigraph::fpdata::{make_datum, negate_datum, screen, FixedPointCollection, FixedPointDatum};
use equigraph::models::{cpn_graph, sphere_graph, z2_sharp_z2bar_graph, zn_graph};
use equigraph::reduce6::reduce6_data;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn w(v: i64) -> WeightVec {
    WeightVec::scalar(v)
}

/// One random single-site mutation: flip a sign or bump a weight by one.
/// Weights are kept canonical (positive scalars here), so bumping never
/// produces zero.
fn mutate(c: &FixedPointCollection, rng: &mut ChaCha8Rng) -> FixedPointCollection {
    let mut points = c.points().to_vec();
    let i = rng.gen_range(0..points.len());
    if rng.gen_bool(0.5) {
        points[i] = negate_datum(&points[i]);
    } else {
        points[i] = bump_weight(&points[i], rng.gen_range(0..points[i].n()));
    }
    FixedPointCollection::new(c.k(), c.n(), points).expect("same shape")
}

/// The datum with its `j`-th weight increased by one.
fn bump_weight(d: &FixedPointDatum, j: usize) -> FixedPointDatum {
    let mut weights: Vec<WeightVec> = d.weights().to_vec();
    let bumped = weights[j].as_scalar().clone() + 1;
    weights[j] = WeightVec::new(vec![bumped]).expect("still nonzero");
    make_datum(d.sign(), weights).expect("same arity")
}

fn main() {
    let sources: Vec<(&str, FixedPointCollection)> = vec![
        (
            "sphere(1,2,3)",
            sphere_graph(1, &[w(1), w(2), w(3)]).expect("sphere").collection().expect("regular"),
        ),
        (
            "CP^3(1,2,3)",
            cpn_graph(1, &[w(1), w(2), w(3)], false).expect("CP^3").collection().expect("regular"),
        ),
        (
            "Z_1(3,2,1)",
            zn_graph(1, 1, &w(3), &w(2), &w(1), false).expect("Z_1").collection().expect("regular"),
        ),
        (
            "Z_2(3,1,1)",
            zn_graph(1, 2, &w(3), &w(1), &w(1), false).expect("Z_2").collection().expect("regular"),
        ),
        (
            "Z_2#Z_2-bar(3,1)",
            z2_sharp_z2bar_graph(1, &w(3), &w(1)).expect("sum").collection().expect("regular"),
        ),
    ];

    // --- Single-site mutations -------------------------------------------
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let trials_per_source = 20;
    let mut by_check: Vec<(&str, usize)> = Vec::new();
    let mut survived = 0usize;

    for (name, clean) in &sources {
        assert!(screen(clean).realizable_candidate, "{name} is clean");
        for _ in 0..trials_per_source {
            let mutant = mutate(clean, &mut rng);
            let report = screen(&mutant);
            match report.verdicts.iter().find(|v| !v.pass) {
                Some(first) => {
                    match by_check.iter_mut().find(|(c, _)| *c == first.check) {
                        Some((_, n)) => *n += 1,
                        None => by_check.push((first.check, 1)),
                    }
                }
                None => survived += 1,
            }
        }
    }

    let total = sources.len() * trials_per_source;
    println!("{total} single-site mutants of {} model collections:", sources.len());
    for (check, n) in &by_check {
        println!("    caught by {check}: {n}");
    }
    println!("    past all screens: {survived}");
    assert_eq!(
        survived, 0,
        "one changed term cannot keep the localization sum at zero"
    );

    // --- A canceling pair ---------------------------------------------------
    // Bump the top weight of both outer points of CP^3 (1,2,3).  The two
    // localization terms move by opposite amounts, the collection stays
    // mirror-symmetric, and every screen passes — necessarily so, because
    // the result is exactly the data of a disjoint pair of spheres, a real
    // manifold.  Corruption that survives screening has stopped being
    // corruption.
    let cp3 = &sources[1].1;
    let mut points = cp3.points().to_vec();
    for p in &mut points {
        if p.weights().iter().any(|x| *x == w(3)) {
            *p = bump_weight(p, 2);
        }
    }
    let paired = FixedPointCollection::new(1, 3, points).expect("same shape");
    println!();
    println!("paired bump of CP^3(1,2,3), top weight 3 -> 4 at both carriers:");
    for d in paired.points() {
        println!("    {d:?}");
    }
    let report = screen(&paired);
    assert!(report.realizable_candidate, "the pair cancels in every screen");
    let trace = reduce6_data(&paired).expect("sphere ⊔ sphere data reduce");
    println!(
        "    passes all screens and reduces in {} moves: it is the data of S(1,2,4) ⊔ S(1,1,2)",
        trace.steps.len()
    );
}
