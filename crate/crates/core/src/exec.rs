//! Execution mode switch.
//!
//! With the `parallel` feature the data-parallel loops use rayon; without it
//! (or with [`Execution::Sequential`]) they run on the calling thread. Both
//! modes produce identical results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Below this many items the parallel paths fall back to a plain loop.
#[cfg(feature = "parallel")]
const PAR_MIN_LEN: usize = 2048;

pub(crate) fn map_indexed<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() && items.len() >= PAR_MIN_LEN {
        return items
            .par_iter()
            .enumerate()
            .with_min_len(PAR_MIN_LEN / 4)
            .map(|(i, t)| f(i, t))
            .collect();
    }
    let _ = exec;
    items.iter().enumerate().map(|(i, t)| f(i, t)).collect()
}

pub(crate) fn zip_for_each_mut<A, B, F>(exec: Execution, a: &mut [A], b: &mut [B], f: F)
where
    A: Send,
    B: Send,
    F: Fn(&mut A, &mut B) + Sync + Send,
{
    debug_assert_eq!(a.len(), b.len());
    #[cfg(feature = "parallel")]
    if exec.is_parallel() && a.len() >= PAR_MIN_LEN {
        a.par_iter_mut()
            .zip(b.par_iter_mut())
            .with_min_len(PAR_MIN_LEN / 4)
            .for_each(|(x, y)| f(x, y));
        return;
    }
    let _ = exec;
    a.iter_mut().zip(b.iter_mut()).for_each(|(x, y)| f(x, y));
}

pub(crate) fn zip_map_mut<A, B, R, F>(exec: Execution, a: &mut [A], b: &mut [B], f: F) -> Vec<R>
where
    A: Send,
    B: Send,
    R: Send,
    F: Fn(&mut A, &mut B) -> R + Sync + Send,
{
    debug_assert_eq!(a.len(), b.len());
    #[cfg(feature = "parallel")]
    if exec.is_parallel() && a.len() >= PAR_MIN_LEN {
        return a
            .par_iter_mut()
            .zip(b.par_iter_mut())
            .with_min_len(PAR_MIN_LEN / 4)
            .map(|(x, y)| f(x, y))
            .collect();
    }
    let _ = exec;
    a.iter_mut().zip(b.iter_mut()).map(|(x, y)| f(x, y)).collect()
}

/// Maps over independent jobs (whole simulation runs). Unlike the
/// per-agent helpers there is no minimum length: each job is heavy.
pub(crate) fn map_jobs<T, R, F>(exec: Execution, jobs: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return jobs.into_par_iter().map(f).collect();
    }
    let _ = exec;
    jobs.into_iter().map(f).collect()
}
