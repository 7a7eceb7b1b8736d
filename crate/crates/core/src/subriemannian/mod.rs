//! Sub-Riemannian geometry of the Heisenberg group: the contact form and its
//! horizontal frame, horizontal paths driven by piecewise-constant controls,
//! holonomy of planar loops, graded dilations, the Carnot–Carathéodory
//! distance and Monte Carlo ball volumes.

mod dilation;
mod distance;
mod frame;
mod path;
mod planar;
mod volume;

pub use dilation::{dilate, euclidean_dilate};
pub use distance::{
    cc_distance, distance_lower_bound, distance_upper_bound, gauge, CcDistance, CcOptions, StartKind,
};
pub use frame::{apply, contact_eval, frame_at, Frame, TangentVec};
pub use path::{cc_length, chow_connect, integrate_path, Control, HorizontalPath, NormKind};
pub use planar::{
    circle_samples, holonomy, horizontal_lift, isoperimetric_check, IsoperimetricReport, CLOSURE_TOL,
};
pub use volume::{ball_volume_fit, BallMetric, Membership, VolumeFit, VolumeOptions, VolumeRow};
