//! Polydisk squeezing function `T` on planar product domains.
//!
//! The crate evaluates `T` in closed form on a small catalog of product
//! domains (punctured disks, polydisks, an annulus times the disk, a single
//! ball), computes upper bounds from Kobayashi distances of the filled
//! factors, lower bounds from product and boundary-clearance constructions,
//! and cross-checks all of it with an independent numerical oracle: the
//! inradius at the origin of the image of an explicit embedding, measured by
//! sampling boundary circles.

pub mod cli;
pub mod domains;
pub mod embeddings;
pub mod error;
pub mod hyperbolic;
pub mod report;
pub mod search;
pub mod spec_file;
pub mod squeezing;
pub mod verify;

pub use num_complex::Complex64 as C64;

pub use domains::{BallFactor, Coord, Factor, FactorKind, PlanarFactor, ProductDomain, ProductPoint};
pub use embeddings::{MapExpr, Primitive, ProductMap};
pub use error::{Error, Result};
pub use hyperbolic::{DiskRadius, HyperbolicValue, MobiusAut};
pub use search::{FactorFamily, FamilySpec, SearchOptions, SearchResult};
pub use squeezing::{BoundReport, BoundsOptions, LimitProfile, MethodTag};
