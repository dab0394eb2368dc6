//! Ternary dendric shifts: S-adic languages, extension graphs,
//! desubstitution, class graphs and interval exchanges.

pub mod cassaigne;
pub mod desubstitution;
pub mod error;
pub mod extensions;
pub mod iet;
pub mod morphism;
pub mod sadic;
pub mod scalar;
pub mod ternary;
pub mod words;

pub use error::{Error, Result};
pub use extensions::{extension_graph, ExtensionGraph};
pub use iet::Iet;
pub use morphism::{parse_expr, Morphism, Permutation, Shape};
pub use sadic::{language_of_level, DirectiveSequence};
pub use scalar::{Rational, Scalar};
pub use ternary::ClassLabel;
pub use words::{Alphabet, FiniteLanguage, Word};

/// An interval exchange with exact rational data.
pub type RationalIet = Iet<Rational>;
/// An interval exchange with floating-point data, for quick experiments.
pub type FloatIet = Iet<f64>;
