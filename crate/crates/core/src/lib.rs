// Copyright 2026 the pmoments authors
// SPDX-License-Identifier: Apache-2.0

//! Exact computation of the p-th moment valuative invariants `S^(p)`, `τ`,
//! `α` and `δ^(p)` on convex-geometric models: volume curves, rational
//! polytopes with concave transforms, toric polarized varieties and
//! filtrations of section spaces.

pub mod corpus;
pub mod error;
pub mod filtration;
pub mod geodesic;
pub mod invariants;
pub mod numeric;
pub mod okounkov;
pub mod toric;
pub mod volume_curve;

pub use error::{Error, Result};
