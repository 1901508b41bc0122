//! The Kruglov transform: classical (on discrete laws) and noncommutative (on
//! matrix algebras, spectrally and through explicit tensor blocks).

pub mod distribution;
pub mod fock;
pub mod tensor;

pub use distribution::{
    kruglov_charfn, kruglov_exact, kruglov_mc, ks_distance, maj_bound_check, DiscreteDistribution, KruglovLaw, Sampler,
    DEFAULT_KMAX,
};
pub use fock::{check_independence_charfn, eigen_law, nc_kruglov_spectral, FockBlock, TruncatedFockSum};
pub use tensor::{
    check_alpha_multiplicative, check_commutator_identity, check_strange_equality, nc_kruglov_tensor, symmetrize,
    TensorElement,
};
