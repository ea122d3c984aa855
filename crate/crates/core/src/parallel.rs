//! Thin switch between rayon and plain iterators.
//!
//! Hot loops call these helpers with an [`Exec`] policy. With the `parallel`
//! feature disabled every policy runs sequentially, so results never depend on
//! the feature set: each output element is computed by the same code in the
//! same floating-point order either way.

use std::sync::atomic::{AtomicU8, Ordering};

/// Execution policy for data-parallel kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

static DEFAULT: AtomicU8 = AtomicU8::new(if cfg!(feature = "parallel") { 1 } else { 0 });

impl Exec {
    /// Process-wide default policy (parallel when the feature is on).
    pub fn current() -> Exec {
        match DEFAULT.load(Ordering::Relaxed) {
            1 => Exec::Parallel,
            _ => Exec::Sequential,
        }
    }

    pub fn set_default(exec: Exec) {
        DEFAULT.store(matches!(exec, Exec::Parallel) as u8, Ordering::Relaxed);
    }

    fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

/// Fill `out[i] = f(i)` for every index.
pub fn fill_indexed<T, F>(exec: Exec, out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        out.par_iter_mut().enumerate().for_each(|(i, o)| *o = f(i));
        return;
    }
    let _ = exec.is_parallel();
    for (i, o) in out.iter_mut().enumerate() {
        *o = f(i);
    }
}

/// Map `f` over `0..n`, collecting results in index order.
pub fn map_range<T, F>(exec: Exec, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec.is_parallel();
    (0..n).map(f).collect()
}

/// Run two closures, potentially at the same time.
pub fn join<A, B, RA, RB>(exec: Exec, a: A, b: B) -> (RA, RB)
where
    A: FnOnce() -> RA + Send,
    B: FnOnce() -> RB + Send,
    RA: Send,
    RB: Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return rayon::join(a, b);
    }
    let _ = exec.is_parallel();
    (a(), b())
}
