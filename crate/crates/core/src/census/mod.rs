//! Root counting and classification for polynomials over cataloged fields.

mod etale;
mod kac_rice;
mod roots;

pub use etale::{classify_etale, square_class, EtaleClassifier, SquareClass};
pub use kac_rice::{
    kac_rice_estimate, kac_rice_estimate_unchecked, kac_rice_residues, multiplicity_weight,
};
pub use roots::{count_roots, LocatedRoot, Newness, RootCount, RootFinder, RootRecord};
