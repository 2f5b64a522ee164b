//! Dense state-vector and density-matrix simulation with noise and sampling.

mod circuit;
mod measure;
mod noise;
mod state;

pub use circuit::{neel_circuit, Circuit, Gate};
pub use measure::{
    apply_readout, measure_probs, sample, sample_call, sampling_rng, sampling_stream,
    simulate_measurements, Measurable, MeasurementSet, OutcomeRef, Outcomes, ParityMask, ProbDist,
    Provenance, DENSE_DIST_LIMIT,
};
pub use noise::{run_noisy, run_noisy_from, NoiseModel, PauliRates};
pub use state::{run_circuit, run_from, DensityMatrix, StateVector};

pub(crate) use measure::{rotated_diagonal, splitmix};
pub(crate) use state::check_capacity;

use crate::error::Result;
use crate::linalg::{eigh, lanczos_ground};
use crate::pauli::PauliSum;

/// Largest state vector.
pub const STATEVECTOR_LIMIT: usize = 20;
/// Largest density matrix.
pub const DENSITY_LIMIT: usize = 12;

/// Up to this size the ground state comes from a full dense diagonalization.
const DENSE_EIGH_LIMIT: usize = 8;

/// Smallest eigenvalue of `h` and a unit eigenvector.
pub fn exact_ground_state(h: &PauliSum) -> Result<(f64, StateVector)> {
    let n = h.num_qubits();
    check_capacity("exact diagonalization", n, STATEVECTOR_LIMIT)?;
    if n <= DENSE_EIGH_LIMIT {
        let (vals, vecs) = eigh(&h.to_dense());
        let v = vecs.into_iter().next().expect("non-empty spectrum");
        return Ok((vals[0], StateVector::from_amplitudes(n, v)?));
    }
    let (e, v, _) = lanczos_ground(h, 1e-9, 500);
    Ok((e, StateVector::from_amplitudes(n, v)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_of_z_is_one() {
        let h = PauliSum::from_labels(&[("Z", 1.0)]).unwrap();
        let (e, v) = exact_ground_state(&h).unwrap();
        assert!((e + 1.0).abs() < 1e-12);
        assert!((v.amplitudes()[1].norm() - 1.0).abs() < 1e-12);
    }
}
