//! Shared numerical machinery: quadrature, ODE integration, root finding,
//! special functions, small-sample statistics and a kd-tree.

pub mod kdtree;
pub mod ode;
pub mod quad;
pub(crate) mod real;
pub mod roots;
pub mod special;
pub mod stats;
