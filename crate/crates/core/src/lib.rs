//! Tensor algebras and Hardy algebras of W*-correspondences over
//! `l^inf(G^0)` for a finite directed graph `G`, together with their
//! covariant representations, Nevanlinna-Pick interpolation and
//! absolute continuity tests.

pub mod accont;
pub mod corr;
pub mod error;
pub mod eval;
pub mod fock;
pub mod io;
pub mod linalg;
pub mod pick;
pub mod random;
pub mod reps;
pub mod suite;

pub use corr::{AlgebraElement, CorrTensor, DirectedGraph, Edge, Path};
pub use error::{Error, Result};
pub use fock::{FockBasis, FockOperator, HardyElement};
pub use accont::{ac_membership, AcReport, AcVerdict};
pub use eval::{evaluate, EvalResult};
pub use pick::{np_feasible, InterpolationProblem, NpVerdict, Realization};
pub use reps::{
    classify, make_covariant, Classification, CommutantElement, CovariantRep, DualPoint,
    Representation, Superoperator,
};
