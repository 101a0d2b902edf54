//! Numeric defaults shared by the library and the command line.
//!
//! | name                    | value   | used by                                  |
//! |-------------------------|---------|------------------------------------------|
//! | `DELTA`                 | 0.01    | jump truncation level of the sampler     |
//! | `TOL`                   | 1e-8    | Picard stopping tolerance (Besov norm)   |
//! | `MAX_ITER`              | 200     | Picard iteration cap                     |
//! | `N_PROBES`              | 64      | random probes per operator-norm estimate |
//! | `QUAD_TOL`              | 1e-10   | relative quadrature tolerance            |
//! | `QUAD_PANEL_BUDGET`     | 60      | dyadic panels toward 0 or infinity       |
//! | `ZERO_THRESHOLD`        | 1e-10   | relative floor for `|p(i xi)|`           |
//! | `KAPPA_XI_RANGE`        | 4096    | largest radius in the decay fit          |
//! | `KAPPA_SHELLS`          | 64      | log-spaced shells in the decay fit       |
//! | `KAPPA_DIRECTIONS`      | 8       | directions per shell (d >= 2)            |
//! | `KAPPA_FIT_RESIDUAL`    | 0.25    | RMS residual above which the fit fails   |
//! | `PROBE_SAFETY`          | 1.5     | safety factor on probed operator norms   |
//! | `RATIO_SLACK`           | 0.05    | slack on observed contraction ratios     |
//! | `OMEGA_BISECTION_TOL`   | 1e-10   | relative tolerance for the ω inverse     |
//! | `PARTITION_SHARPNESS`   | 1.0     | transition sharpness of φ₀               |
//! | `LIPSCHITZ_SAMPLES`     | 10000   | pairs sampled to verify a nonlinearity   |
//! | `ADMISSIBILITY_C_SCAN`  | see below | constants tried by `check-conditions`  |

pub const DELTA: f64 = 0.01;
pub const TOL: f64 = 1e-8;
pub const MAX_ITER: usize = 200;
pub const N_PROBES: usize = 64;
pub const QUAD_TOL: f64 = 1e-10;
pub const QUAD_PANEL_BUDGET: usize = 60;
pub const ZERO_THRESHOLD: f64 = 1e-10;
pub const KAPPA_XI_RANGE: f64 = 4096.0;
pub const KAPPA_SHELLS: usize = 64;
pub const KAPPA_DIRECTIONS: usize = 8;
pub const KAPPA_FIT_RESIDUAL: f64 = 0.25;
pub const PROBE_SAFETY: f64 = 1.5;
pub const RATIO_SLACK: f64 = 0.05;
pub const OMEGA_BISECTION_TOL: f64 = 1e-10;
pub const PARTITION_SHARPNESS: f64 = 1.0;
pub const LIPSCHITZ_SAMPLES: usize = 10_000;
pub const ADMISSIBILITY_C_SCAN: [f64; 5] = [0.1, 0.25, 0.5, 1.0, 2.0];
