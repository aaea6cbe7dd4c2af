//! Dimension estimates at a scale: higher Lebesgue numbers, covers of
//! bounded mesh and multiplicity, `d(M)`, and lower-bound certificates.

pub mod asdim;
pub mod higher;
pub mod rn;
pub mod sperner;
pub mod star;

pub use asdim::{asdim_at_scale, asdim_zero_witness, d_of_m, dimension_report, AsdimAtScale, DimensionReport};
pub use higher::{higher_lebesgue, higher_lebesgue_exact, Bound, HigherLebesgue, Mode, DEFAULT_EXACT_LIMIT};
pub use rn::{cube_family_cover, rn_lower_bound_family, CubeFamily};
pub use sperner::{sperner_bound, sperner_witness, SpernerCertificate, Triangulation};
pub use star::{star_cover, star_lebesgue_constant};
