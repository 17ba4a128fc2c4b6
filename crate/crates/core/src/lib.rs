//! Exact construction of the compact E8 Lie algebra from Spin(16) and its
//! 128-dimensional Majorana–Weyl spinor, its root system, and a generalized
//! Euler chart `S(x)·exp(Σ yᵃ C_a)·S(z)` of the group.
//!
//! The exact layers ([`halfint`], [`sparse`], [`clifford`], [`algebra`],
//! [`verify`], [`cartan`]) never round: every generator lives in (1/2)·ℤ.
//! Floating point enters only in [`roots`] (spectral extraction, snapped and
//! then certified exactly) and [`chart`] (group elements).

pub mod algebra;
pub mod bundle;
pub mod cartan;
pub mod chart;
pub mod clifford;
pub mod error;
pub mod halfint;
pub mod rank;
pub mod region;
pub mod roots;
pub mod sparse;
pub mod verify;

pub use algebra::{
    abstract_bracket, build_adjoint, build_transcribed_blocks, build_structure_tensor, AdjointRep, AlgebraElement,
    BasisIndex, StructureTensor, DIM, RANK,
};
pub use cartan::{find_cartan, CartanSet};
pub use clifford::{build_gamma_system, spinor_generators, GammaSystem, SpinorGenerators, PAIR_COUNT, SPINOR_DIM};
pub use error::{Error, Result};
pub use halfint::{commutator, mat_mul, trace_pairing, HalfInt, HalfIntMatrix};
pub use roots::{Root, RootSystem};
pub use sparse::SparseHalfIntMatrix;

/// Version of the on-disk bundle and report formats.
pub const FORMAT_VERSION: u32 = 1;

/// Everything exact about the algebra, built once and shared immutably.
#[derive(Clone, Debug)]
pub struct E8 {
    pub gammas: GammaSystem,
    pub spinors: SpinorGenerators,
    pub tensor: StructureTensor,
    pub adjoint: AdjointRep,
}

impl E8 {
    pub fn build() -> Result<Self> {
        let gammas = build_gamma_system()?;
        let spinors = spinor_generators(&gammas)?;
        let tensor = build_structure_tensor(&spinors)?;
        let adjoint = build_adjoint(&tensor)?;
        Ok(E8 {
            gammas,
            spinors,
            tensor,
            adjoint,
        })
    }

    pub fn cartan(&self) -> Result<CartanSet> {
        find_cartan(&self.adjoint, &self.tensor)
    }
}
