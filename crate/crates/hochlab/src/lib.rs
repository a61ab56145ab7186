//! Exact-rational workbench for the algebra of differential operators on
//! affine space and the homological structures built from it.
//!
//! The crate provides, over `Q[x_1..x_n]`:
//!
//! * [`weyl`] — the Weyl algebra and its twisted variants in normal form,
//!   with the order predicate, Leibniz coproduct, curvature and the torsor
//!   translation between twists;
//! * [`polydiff`] — polydifferential operators `Diff(O^k, P)` in tensor
//!   normal form as a model of Hochschild cochains, with the Hochschild
//!   differential, cup product and brace operations;
//! * [`bar`] — the bar coalgebra of the cochain algebra, its product, and
//!   the two-sided bar complex with exact windowed cohomology;
//! * [`quantize`] — the multiplication cochain `phi`, the pairing into the
//!   two-sided bar complex and its cocycle/quasi-isomorphism checks;
//! * [`koszul`] — polynomial differential forms and polyvector fields with
//!   the Koszul and twisted de Rham differentials, the divergence operator
//!   and Milnor-number oracles;
//! * [`linalg`] — the exact sparse rank/kernel/solve kernel everything above
//!   reduces to.
//!
//! All values are immutable after construction and all computations are
//! exact; no floating point appears anywhere. Randomized suites live in
//! [`suites`] and are driven by explicit seeds, so every report is
//! reproducible byte for byte.

pub mod bar;
pub mod error;
pub mod koszul;
pub mod linalg;
pub mod mono;
pub mod parse;
pub mod poly;
pub mod polydiff;
pub mod quantize;
pub mod rat;
pub mod report;
pub mod suites;
pub mod weyl;
pub mod window;

pub use error::{AlgebraError, ArityError};
pub use mono::Mono;
pub use poly::Poly;
pub use rat::{rat, ratio, Rat};
pub use weyl::{OneForm, WeylOp};
pub use window::TruncationWindow;
