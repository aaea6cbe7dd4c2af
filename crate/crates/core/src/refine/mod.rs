//! Cover transformations, each returning a certificate whose checks are
//! recomputed from the output.

pub mod annuli;
pub mod certificate;
pub mod extension;
pub mod gromov;
pub mod ostrand;
pub mod paste;
pub mod shrink;

pub use annuli::{bounded_annulus_refine, squared_annuli};
pub use certificate::{CheckedInequality, GuaranteeKind, RefinementCertificate};
pub use extension::{subset_cover_extension, union_merge};
pub use gromov::{gromov_disjointify, Disjointified};
pub use ostrand::{ostrand_split, OstrandSplit};
pub use paste::{annulus_paste, Pasted};
pub use shrink::{inward_shrink, paracompact_shrink, ParacompactShrink};
