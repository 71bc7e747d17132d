//! Finite-level differential operators in characteristic p and the counting of
//! dormant PGL2 opers of prescribed radii on pointed curves.
//!
//! The crate is organised bottom-up:
//!
//! - [`algebra_core`]: finite fields, polynomials, series, matrices.
//! - [`radii`]: residues mod p^N, radii sets and level lifting.
//! - [`disk_dmod`]: level-m divided-power operators acting on the formal disk.
//! - [`oper_p1`]: the dormancy oracle on the projective line with three marked points.
//! - [`graphs`]: trivalent semi-graphs of type (g, r).
//! - [`tqft_count`]: edge-labelling counts, gluing checks and closed formulas.
//! - [`cli`]: the command-line front end.

pub mod algebra_core;
pub mod cli;
pub mod disk_dmod;
pub mod graphs;
pub mod oper_p1;
pub mod radii;
pub mod tqft_count;
