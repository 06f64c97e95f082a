//! Pure states, density matrices, decompositions and incoherent channels.
//!
//! Basis labels are zero-based: the ancilla reference state `|1⟩` of the
//! conversion construction is index `0`. Bipartite vectors are ordered with
//! the first factor as the slow index, `|i⟩|a⟩ -> i * d_b + a`.

mod channel;
mod density;
pub mod io;
mod pure;
mod random;

pub use channel::{random_incoherent_channel, IncoherentChannel, BRANCH_CUTOFF, COMPLETENESS_TOL};
pub use density::{density_from, Decomposition, DensityMatrix, DENSITY_TOL};
pub use io::{load_state, parse_state, StateInput};
pub use pure::{make_pure, PureState};
pub use random::{
    random_density, random_density_with, random_pure, random_pure_with, random_unitary_with,
    rng_from_seed, SeededRng,
};

/// `ρ ⊗ |1⟩⟨1|` with an ancilla of the same dimension as the system.
pub fn attach_ancilla(rho: &DensityMatrix) -> DensityMatrix {
    let d = rho.dim();
    rho.tensor(&PureState::basis(d, 0).projector())
}

/// `|ψ⟩ ⊗ |1⟩`.
pub fn attach_ancilla_pure(psi: &PureState) -> PureState {
    psi.tensor(&PureState::basis(psi.dim(), 0))
}
