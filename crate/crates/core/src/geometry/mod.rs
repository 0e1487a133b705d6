//! Exact polyhedral computation over rationals.

pub mod cone;
pub mod linalg;
pub mod lp;
pub mod poly;

pub use cone::{cone_hull, normal_cone, tangent_cone, OrderCone, PolyCone};
pub use lp::LpOutcome;
pub use poly::{HPolyhedron, Row, VRep};
