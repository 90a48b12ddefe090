//! Cutoffs, Hilbert blocks, the truncated transform, mollifiers and
//! smooth truncations.

mod blocks;
mod cutoff;
mod dump;
mod kernel;
mod mollifier;

pub use blocks::{block_kernel, required_m_max, transform_blocks, truncated_transform, DyadicSchedule};
pub use cutoff::{plateau, BumpCutoff};
pub use dump::{read_kernel_binary, write_kernel_binary, write_kernel_csv};
pub use kernel::{compensated_sum, Coeff, ComplexKernel, DiscreteKernel, Kernel, KernelMeta, Variant};
pub use mollifier::{mollifier_kernel, smooth_truncate, MollifierKind};
