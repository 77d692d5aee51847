//! Entangled polynomial codes for distributed matrix multiplication over
//! prime fields.
//!
//! `N` workers each store one coded block of `A` and of `B` and return
//! `ÃᵢᵀB̃ᵢ`. The master recovers `C = AᵀB` from the first results to arrive;
//! how many it needs is the scheme's recovery threshold.
//!
//! ```
//! use entangled_core::{compute_all_workers, entangled_spec, CodingScheme, Matrix, PrimeField};
//!
//! let f = PrimeField::new(7).unwrap();
//! let code = entangled_spec(2, 1, 1, 5, f).unwrap();
//! let a = Matrix::from_i64(f, 2, 1, &[1, 2]).unwrap();
//! let b = Matrix::from_i64(f, 2, 1, &[3, 4]).unwrap();
//! let results = compute_all_workers(&code, &a, &b).unwrap();
//! let picked: Vec<_> = [1, 3, 4].iter().map(|&i| (i, results[i].clone())).collect();
//! assert_eq!(code.decode(&picked, (1, 1)).unwrap().get(0, 0), 4);
//! ```

pub mod bilinear;
pub mod blocks;
pub mod bounds;
pub mod convolution;
pub mod error;
pub mod field;
mod linalg;
pub mod matrix;
pub mod oracle;
pub mod poly;
pub mod robust;
pub mod schemes;
pub mod sim;
pub mod verify;

pub use bilinear::{BilinearConstruction, ElementwiseProductCode, ImprovedEntangledCode};
pub use blocks::{assemble_product, partition, BlockGrid};
pub use convolution::ConvCodeSpec;
pub use error::{Error, Result};
pub use field::{FieldElement, FieldOp, PrimeField};
pub use linalg::rank;
pub use matrix::{Matrix, MatrixBlock};
pub use poly::{FieldPolynomial, LagrangeBasis};
pub use robust::{
    hamming_relations, run_fault_trials, Detection, FaultMode, FaultModel, FaultTally,
    RobustDecoder,
};
pub use schemes::{
    compute_all_workers, entangled_spec, CodingScheme, PolynomialCodeSpec, RandomLinearScheme,
    SchemeKind, UncodedRepetition, WorkerResult,
};
pub use sim::{run_experiment, run_trial, LatencyModel, SimulationConfig, TrialReport};
