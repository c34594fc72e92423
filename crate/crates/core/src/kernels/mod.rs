//! Periodic-lattice checks of the operator inequalities used in the lower bound.

pub mod decay;
pub mod dyson;
pub mod eigen;
pub mod fields;
pub mod hat;
pub mod hole;
pub mod io;
pub mod lattice;

pub use decay::{decay_bound_check, DecayReport, ProductBump};
pub use dyson::{certify_dyson, verify_dyson, DysonCertificate, DysonCheckConfig, UChoice};
pub use eigen::{smallest_eigenpair, LanczosOptions};
pub use fields::{build_eta, build_f_r, build_h, build_w_r, CutoffProfile};
pub use hat::{ball_decomposition, hat_j, BallDecomposition, Gaussian, RadialFunction};
pub use hole::{verify_hole_lemma, HoleLemmaReport};
pub use io::{read_field, write_field, Verdict};
pub use lattice::{Lattice, PeriodicLatticeField, Space};
