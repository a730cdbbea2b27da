//! Row-parallel dispatch with a sequential fallback.
//!
//! With the `parallel` feature disabled, [`Execution::Parallel`] silently runs
//! sequentially. Both modes write each output row exactly once from a pure
//! function of its row index, so results are identical bit for bit.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether this build can actually run rows concurrently.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Fills `out` (row-major, `width` items per row) by calling `fill(row, slice)`
/// once per row.
pub fn fill_rows<T, F>(out: &mut [T], width: usize, exec: Execution, fill: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    if width == 0 {
        return;
    }
    debug_assert_eq!(out.len() % width, 0);
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        out.par_chunks_mut(width)
            .enumerate()
            .for_each(|(row, slice)| fill(row, slice));
        return;
    }
    let _ = exec;
    for (row, slice) in out.chunks_mut(width).enumerate() {
        fill(row, slice);
    }
}
