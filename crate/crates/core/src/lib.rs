//! Symmetric dilations of single-qubit Pauli channels and Pauli semigroups.

pub mod channel;
pub mod collision;
pub mod dilation;
pub mod error;
pub mod io;
pub mod matcore;
pub mod pauli;
pub mod physdil;
pub mod verify;

pub use channel::{BlochVector, KrausChannel, PauliChannel, PauliLiouvillian, QubitMap};
pub use collision::{BathOperators, CollisionConfig, ConvergenceRow};
pub use dilation::{EnvRepSolution, GroupRep, Isometry, SU2Generators};
pub use error::{Error, Result};
pub use matcore::{CMat, C64};
pub use pauli::{Pauli, PauliString, Phase};
pub use physdil::{KrylovSubspace, PauliFit, PhysicalDilation, Schedule};
