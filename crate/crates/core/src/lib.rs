//! Pseudo-Anosov dilatations of fibrations on the magic 3-manifold and its Dehn fillings.

pub mod charpoly;
pub mod dehn;
pub mod entropy;
pub mod homology;
pub mod search;

pub use charpoly::{IntPoly, PolyError, RootEnclosure};
pub use dehn::{Cusp, DehnError, FaceKind, FilledClass};
pub use homology::{Cone, HClass, HomologyError, Slope};
