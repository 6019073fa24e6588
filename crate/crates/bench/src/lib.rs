//! Fixed-seed inputs shared by the benchmarks.

use apx_core::format::{Instance, InstanceKind};
use apx_core::gen::{generate, GenParams, Shape};

pub const SEED: u64 = 0x5eed;

pub fn instance(kind: InstanceKind, n: usize, w: u64) -> Instance {
    generate(&GenParams { kind, n, w, seed: SEED, shape: Shape::Uniform, k: 3 }).expect("valid generator parameters")
}
