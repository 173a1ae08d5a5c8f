//! Kinetic triangulation of moving points in the plane.
//!
//! The triangulation is the randomized treap-based scheme: points are split
//! recursively at their minimum-priority member, each split contributes a
//! pseudo-triangle bounded by the upper common tangent of the two halves, and
//! every pseudo-triangle is refined into triangles by drawing one chord per
//! funnel vertex in priority order. The kinetic layer keeps this structure
//! valid under polynomial motion with three certificate families (x-order,
//! bridge tangency, and visibility), an exact event queue, and local repair.
//!
//! The crate is `no_std` (with `alloc`); scenario files, logs and the
//! command line live in the `kinetri` companion crate.
//!
//! Module map:
//!
//! - [`motion`]: polynomials, trajectories, scenarios and priorities.
//! - [`kernel`]: exact orientation predicates, root isolation and event times.
//! - [`funnel`]: per-pseudo-triangle funnels and their chord triangulation.
//! - [`hulltree`]: the pseudo-triangulation treap and its subtree hulls.
//! - [`kds`]: certificates, the event queue and the kinetic event loop.
//! - [`oracle`]: brute-force reference construction used for verification.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod funnel;
pub mod hulltree;
pub mod kds;
pub mod kernel;
pub mod motion;
pub mod oracle;

pub use kernel::{EventTime, Frame, Side, Sign, Vertex};
pub use motion::{Polynomial, PriorityAssignment, Rational, Scenario, Trajectory};
