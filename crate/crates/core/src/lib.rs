//! Online multiple gradient descent (OMGD) and companion online learners for
//! strongly convex, smooth losses, together with exact evaluators for the
//! non-stationarity measures that control their dynamic regret:
//!
//! * path-length `P_T = Σ ‖x*_{t-1} − x*_t‖`,
//! * squared path-length `S_T = Σ ‖x*_{t-1} − x*_t‖²`,
//! * function variation `V_T = Σ sup_x |f_{t-1}(x) − f_t(x)|`.
//!
//! Every loss family in [`losses`] admits exact minimizers, exact gradient
//! bounds and exact pairwise variation, so the regret bounds in [`bounds`]
//! are evaluated against oracle-grade right-hand sides. The [`harness`]
//! module drives whole experiments and backs the `dynregret` binary.
//!
//! ```
//! use dynregret::{algorithms::{self, AlgorithmConfig}, regularity, scenarios};
//!
//! let scenario = scenarios::instance2(4).unwrap();
//! let traj = algorithms::run(&AlgorithmConfig::greedy(), &scenario).unwrap();
//! assert_eq!(regularity::dynamic_regret(&traj), 0.25);
//! ```

pub mod algorithms;
pub mod bounds;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod linalg;
pub mod losses;
pub mod regularity;
pub mod rng;
pub mod scenarios;

pub use error::{Error, Result};
pub use geometry::FeasibleSet;
pub use losses::{CurvatureCertificate, LossFunction};
