//! Fractional covers, random rounding to k-fold covers, and the planar
//! pipeline that turns them into k-fold coverings by translates.

mod lp;
mod mwu;
mod pipeline;
mod rounding;
mod translate;

pub use lp::{exact_fractional_cover_value, MAX_VERTEX_CANDIDATES};
pub use mwu::{fractional_cover, FractionalCover, MwuConfig};
pub use pipeline::{kfold_density_bound, kfold_pipeline, KfoldConfig, KfoldResult};
pub use rounding::{chernoff_round, multiplicities, tau_k_bound, Rounding};
pub use translate::{
    build_translate_instance, discretize_nstar, nstar_bounds, DiscretizedInstance, EdgeShape,
    NstarInstance, TranslateConfig,
};
