//! Data-parallel helpers. With the `parallel` feature these fan out over
//! rayon's pool; without it they run the same closures sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `0..len`, preserving index order in the output.
pub(crate) fn map_range<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}

/// Runs `f` on every index of `0..len`, unordered.
pub(crate) fn for_each_range<F>(len: usize, f: F)
where
    F: Fn(usize) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().for_each(f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).for_each(f)
    }
}

/// Runs `op` inside a pool of `width` threads (0 = rayon default). Without
/// the `parallel` feature this simply calls `op`.
pub(crate) fn with_width<R: Send>(width: usize, op: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    {
        if width == 0 {
            return op();
        }
        match rayon::ThreadPoolBuilder::new().num_threads(width).build() {
            Ok(pool) => pool.install(op),
            Err(_) => op(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = width;
        op()
    }
}

pub const fn enabled() -> bool {
    cfg!(feature = "parallel")
}
