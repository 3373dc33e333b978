//! Data-parallel mapping for the term sweeps. The `parallel` feature (on by
//! default) fans work out with rayon; callers sort their outputs afterwards,
//! so scheduling never affects results. The sequential path is always
//! compiled, both as the fallback and for benchmark comparisons.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub fn map_collect<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_collect_sequential(items, f)
    }
}

pub fn map_collect_sequential<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}
