//! Cantor–Bendixson calculus for compact countable spaces.
//!
//! * [`ordinal`]: ordinals below ε₀ in Cantor normal form.
//! * [`space`]: characteristics `(α, p)`, derivatives, unions, census.
//! * [`realize`]: explicit clusters of rational points with a prescribed
//!   characteristic.
//! * [`oracle`]: structural derived sets and exact geometric audits used to
//!   cross-check the symbolic calculus.
//!
//! Geometry is generic over [`Scalar`]; the aliases below fix it to
//! arbitrary-precision rationals.

pub mod oracle;
pub mod ordinal;
pub mod realize;
pub mod scalar;
pub mod space;

pub use ordinal::{parse_ordinal, Ordinal, OrdinalError, ParseMode};
pub use realize::{RealizationConfig, RealizeError};
pub use scalar::Scalar;
pub use space::{AmbientDescriptor, Cardinality, CbChar, SpaceError};

/// Exact rational coordinates.
pub type Rational = num_rational::BigRational;

pub type ClusterTree = realize::ClusterTree<Rational>;
pub type PointCloud = realize::PointCloud<Rational>;
pub type TreeFile = realize::TreeFile<Rational>;
pub type GeometryReport = oracle::GeometryReport<Rational>;

/// Trees over binary floats; exact while coordinates stay dyadic.
pub type ClusterTreeF64 = realize::ClusterTree<f64>;
