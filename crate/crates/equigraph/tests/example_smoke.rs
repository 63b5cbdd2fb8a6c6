//! Compile and run every example as a test, so the walkthroughs in
//! `examples/` (and the assertions inside them) stay correct.

macro_rules! smoke {
    ($name:ident) => {
        mod $name {
            include!(concat!("../examples/", stringify!($name), ".rs"));

            #[test]
            fn runs() {
                main();
            }
        }
    };
}

smoke!(cli_tour);
smoke!(dim4_roundtrip);
smoke!(export_dot);
smoke!(gkm_reduction);
smoke!(graph_surgery);
smoke!(mutation_screening);
smoke!(reduce_data_dimension6);
smoke!(reduce_graph_dimension6);
smoke!(validate_models);
