//! Exact continued-fraction expansions generated by regions of the Farey
//! natural extension: contraction of Farey expansions, induced maps, the
//! α-CF and S-expansion regions, and invariant measures.

pub mod cfe;
pub mod contraction;
pub mod error;
pub mod exact_core;
pub mod farey_maps;
pub mod gcf;
pub mod induced;
pub mod measure_entropy;
pub mod natural_extensions;
pub mod region_catalog;
pub mod shift_space;

pub use error::{Error, Result};
pub use exact_core::{ExtRational, Int, Mat2, Quad, Rat, RationalInterval};
pub use gcf::GcfDigits;
pub use induced::Region;
pub use natural_extensions::OmegaPoint;
