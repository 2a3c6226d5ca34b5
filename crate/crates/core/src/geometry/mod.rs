//! Discrete curves and codimension-2 membranes, and the curvature, frame and
//! quarter-turn quantities the flows are built from.

mod curve;
mod frame;
mod mesh;

pub use curve::{
    circumcircle_curvature, curve_curvature_vector, curve_length, distance_to_curve,
    hausdorff_distance, point_segment_distance, unit_tangent, DiscreteCurve,
};
pub use frame::{rotate_j, NormalFrame, PLANE_TOLERANCE};
pub use mesh::{
    membrane_mean_curvature, membrane_normal_frame, membrane_volume, mixed_area,
    point_triangle_distance, vertex_tangent, DiscreteMembrane, TriMesh,
};
