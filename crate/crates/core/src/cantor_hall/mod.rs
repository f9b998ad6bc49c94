//! Hall-style Cantor subdivisions of `eta(D_q)`, `tau(B_k)` and the closures
//! of `eta(T_p)` and `tau(L_p)`.

pub mod decompose;
pub mod gaps;
pub mod hall;
pub mod inequalities;
pub mod node;
pub mod thickness;

pub use decompose::{
    decompose, decompose_difference, decompose_product, decompose_quotient, decompose_sum, DecompositionCertificate,
    Operation,
};
pub use gaps::{theorem12_gaps, GapReport, OpGaps, StageInterval};
pub use hall::{check_hall_condition, HallReport, HallViolation};
pub use inequalities::{sample_prefixes, verify_inequalities, Check, InequalityReport, PrefixCheck};
pub use node::{node_endpoints, subdivide, Family, Subdivider, Subdivision, SubdivisionNode};
pub use thickness::{thickness, ThicknessReport};
