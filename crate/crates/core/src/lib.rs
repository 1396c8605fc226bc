//! Spectral tomography of noisy quantum gates.
//!
//! Pauli transfer matrices and their spectra, the spectral signal
//! `g(k) = Tr[T^k]` with and without SPAM, matrix-pencil eigenvalue
//! estimation with nested-F-test model selection and bootstrap intervals,
//! and spectrum-only bounds on gate fidelity and unitarity.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assign;
pub mod basis;
pub mod channels;
pub mod counts;
pub mod error;
pub mod io;
pub mod lindblad;
pub mod linalg;
pub mod nonmarkov;
pub mod pencil;
pub mod ptm;
pub mod quadrature;
pub mod quality;
pub mod random;
pub mod rng;
pub mod scalar;
pub mod signal;
pub mod spectrum;
pub mod stats;
pub mod sweep;

pub use basis::{BasisKind, OperatorBasis};
pub use channels::ChannelSpec;
pub use counts::{CountsRecord, ShotSummary};
pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector};
pub use pencil::{fit, select_model_order, ModelSelection, PencilConfig, PencilFit};
pub use ptm::{PauliTransferMatrix, ValidityReport};
pub use quality::{quality_report, QualityReport};
pub use scalar::Real;
pub use signal::{SignalSource, SpamModel, SpectralSignal};
pub use spectrum::Spectrum;

pub type Ptm = PauliTransferMatrix<f64>;
pub type Signal = SpectralSignal<f64>;
pub type Fit = PencilFit<f64>;
pub type Selection = ModelSelection<f64>;
pub type Spam = SpamModel<f64>;
pub type Basis = OperatorBasis<f64>;
pub type Lindblad = lindblad::LindbladParams<f64>;
pub type Complex64 = num_complex::Complex<f64>;
