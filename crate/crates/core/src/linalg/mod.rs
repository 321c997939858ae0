//! Linear algebra kernel: complex matrices, tensor-space layouts, and
//! Hermitian propagators.

pub mod expm;
pub mod layout;
pub mod matrix;

pub use expm::{eigh, expm_unitary, EIG_PATH_LIMIT};
pub use layout::{destroy, embed, number, z_like, Mode, ModeKind, SpaceLayout};
pub use matrix::{im, re, ComplexMatrix, C64, DENSE_DIM_LIMIT};
