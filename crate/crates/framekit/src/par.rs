//! Data-parallel execution of independent work items, with a sequential
//! fallback when the `parallel` feature is disabled or parallelism is
//! switched off at runtime.

/// Map `f` over `items`, preserving input order in the output.
pub fn map_items<I, T, F>(items: Vec<I>, parallel: bool, f: F) -> Vec<T>
where
    I: Send,
    T: Send,
    F: Fn(I) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if parallel {
            use rayon::prelude::*;
            return items.into_par_iter().map(f).collect();
        }
    }
    let _ = parallel;
    items.into_iter().map(f).collect()
}
