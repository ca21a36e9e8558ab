//! Covering a body, a window, or the whole plane by homothets drawn from a
//! prescribed family of ratios.

mod bands;
mod body;
mod cells;
mod family;
mod ring;
mod vitali;

pub use bands::{band_count, volume_threshold, Band, BandPartition};
pub use body::{
    cover_body, limit_ratio_cover, small_family_volume_bound, small_homothet_cover, BodyCover,
    CoverCase,
};
pub use cells::{classify, largest_inscribed_square, CellRelation};
pub use family::{HomothetFamily, RatioGenerator, RatioSource, MAX_INDEX};
pub use ring::{
    find_smooth_frame, max_turn, ring_cover, RingCertificate, RingConfig, RingProperties,
    RingSchedule, Shell, SmoothFrame, SMOOTH_TURN,
};
pub use vitali::{vitali_cover, VitaliConfig, VitaliCover};
