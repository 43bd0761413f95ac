//! Algebraic structure of the image of the three-receiver range map: the
//! quartic surface, its nodes and tropes, the conic arcs of zero curvature,
//! the polyhedron Q3 and the boundary of the convex hull.

mod arcs;
mod curvature;
mod degeneration;
mod hull;
mod nodes;
mod q3;
mod quartic;

pub use arcs::{
    circumcircle, conic_arc, locus_plane, locus_point, ConicArc, LinearBound, Locus, Side, TPlane, TQuadric,
};
pub use curvature::{gaussian_curvature, gaussian_curvature_normalized};
pub use degeneration::{collinear_degeneration_check, degeneration_coeff_gap, squared_quadric_coeffs};
pub use hull::{hull_boundary_classify, HullComponent};
pub use nodes::{
    node_hessian, nodes, nodes_and_tropes, tangent_cone, trope_plane, tropes, EllipticCylinder, Node, NodeKind,
    TangentCone, Trope,
};
pub use q3::{q3_loci, q3_membership, q3_plane, q3_witnesses, Q3Facet, Q3Report, Q3Verdict};
pub use quartic::{
    homogeneous_form, quartic_normalized, quartic_residual, HomogeneousForm, KummerCoeffs, KummerQuartic,
};

pub(crate) use quartic::quartic_raw;
