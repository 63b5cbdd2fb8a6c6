//! A calculus of signed labeled multigraphs describing torus actions on
//! compact oriented manifolds with isolated fixed points.
//!
//! Such an action is recorded combinatorially: one vertex per fixed point,
//! carrying a sign (the local orientation) and the multiset of tangent
//! weights; one edge per weight, labeled by it, joining fixed points that
//! share it. Everything here is exact — weights are arbitrary-precision
//! integer vectors, localization sums are exact rationals — so a passed
//! validator is a theorem about the input, not a float coincidence.
//!
//! The crate has three layers:
//!
//! * **Data and validators** ([`algebra`], [`fpdata`], [`multigraph`],
//!   [`models`]): weight vectors, fixed point data up to sign-flip
//!   equivalence, signed multigraphs, the four necessary-condition screens
//!   (localization sum, signature constancy, minimum-weight balance, sign
//!   balance), and the standard model catalog (spheres, projective spaces,
//!   the twist family and its connected sums).
//! * **Operation algebra** ([`multigraph`]): edge reversal and exchange,
//!   disjoint union, (self) connected sum, blow-up — each preserving the
//!   validators, with the reversal normal form and isomorphism up to
//!   reversal for comparing results.
//! * **Reduction engines** ([`reduce4`], [`reduce6`]): terminating searches
//!   that contract a description to the empty state through valid
//!   intermediates, step by recorded step, or report that no sequence of
//!   operations does so. Traces replay, so every reduction is a checkable
//!   certificate.
//!
//! The [`cli`] module (and the `equigraph` binary wrapping it) exposes the
//!   same machinery over JSON files. The `examples/` directory walks each
//!   capability end to end.
//!
//! # Quick start
//!
//! Build a model, check it, contract it:
//!
//! ```
//! use equigraph::algebra::WeightVec;
//! use equigraph::models::cpn_graph;
//! use equigraph::multigraph::validate_graph;
//! use equigraph::reduce6::reduce6_graph;
//!
//! let w = |v: i64| WeightVec::scalar(v);
//!
//! // The projective-space model on weights 1, 2, 3: four fixed points.
//! let g = cpn_graph(1, &[w(1), w(2), w(3)], false)?;
//! assert!(validate_graph(&g, true).pass);
//!
//! // Contract it to the empty graph; the trace records every surgery.
//! let trace = reduce6_graph(&g)?;
//! assert_eq!(trace.steps.len(), 2);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

#![forbid(unsafe_code)]

pub mod algebra;
pub mod cli;
pub mod fpdata;
pub mod models;
pub mod multigraph;
pub mod reduce4;
pub mod reduce6;
