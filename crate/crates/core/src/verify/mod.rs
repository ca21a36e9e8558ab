//! Independent certification of coverings: planar grid oracles and density
//! estimates, sphere nets, and margin certificates for strip families.

mod planar;
mod sphere;

pub use planar::{
    density_estimate, grid_coverage, multiplicities_at, region_coverage, CoverageReport,
    SamplePattern,
};
pub use sphere::{
    build_sphere_net, certify_strip_cover, certify_strip_multiplicity, uniform_sphere_point,
    NetConfig, SphereNet,
};
