use rayon::prelude::*;
use symmcouple_core::TrialRunner;

/// Runs trials on a dedicated rayon pool. Results come back in index
/// order, so reports do not depend on the thread count.
pub struct Parallel {
    pool: rayon::ThreadPool,
}

impl Parallel {
    /// `threads = 0` uses every available core.
    pub fn new(threads: usize) -> anyhow::Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
        Ok(Parallel { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl TrialRunner for Parallel {
    fn run<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        self.pool.install(|| (0..n).into_par_iter().map(f).collect())
    }
}

/// Thread count from `SYMMCOUPLE_THREADS` if set, else `flag`.
pub fn resolve_threads(flag: Option<usize>) -> anyhow::Result<usize> {
    match std::env::var("SYMMCOUPLE_THREADS") {
        Ok(v) => v.trim().parse().map_err(|_| anyhow::anyhow!("SYMMCOUPLE_THREADS=`{v}` is not a thread count")),
        Err(_) => Ok(flag.unwrap_or(0)),
    }
}
