//! Path-space geometry: uniform-grid paths with the Cameron–Martin inner
//! product, piecewise-linear projections, Brownian sampling and the TENT
//! and TRIG orthonormal bases.

pub mod basis;
pub mod brownian;
pub mod path;

pub use basis::{
    cm_inner_quadrature, gl_integrate, trig_element, trig_pair_integral, BasisElement, BasisKind,
    OrthonormalBasis, ScalarFn, TrigLabel,
};
pub use brownian::{normal_increments, sample_brownian, sample_rng};
pub use path::{GridPath, PathScalar};
