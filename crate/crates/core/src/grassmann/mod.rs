//! The Grassmannian `Gr(m, n)` as rank-`m` symmetric projectors.

mod charts;
mod distance;
mod projector;

pub use charts::{
    cayley_chart_factor, chart, chart_cayley, chart_cayley_direct, chart_exp, chart_exp_series, chart_qr,
    chart_qr_generic, chart_rotation, chart_second_derivative, chart_second_derivative_check, qr_chart_factor,
    qr_chart_factor_generic, ChartId,
};
pub(crate) use charts::generator;
pub use distance::{
    distance, distance_by_eigenvalues, distance_from_complement, distance_from_overlap, distance_in_frame, geodesic,
    half_squared_distance_from_basis, principal_angles, principal_angles_in_frame,
};
pub(crate) use projector::ad_squared;
pub use projector::{frame_from_projector, random_projector, tangent_project, OrthoFrame, Projector};
