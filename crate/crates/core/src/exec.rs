//! Order-preserving map over a slice, on a rayon pool or sequentially.
//!
//! Without the `parallel` feature every executor runs on the calling thread.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Sequential,
    /// `jobs = 0` means one worker per available core.
    Parallel { jobs: usize },
}

pub struct Executor {
    #[cfg(feature = "parallel")]
    pool: Option<rayon::ThreadPool>,
    jobs: usize,
}

fn available() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

impl Executor {
    pub fn new(strategy: Strategy) -> Self {
        match strategy {
            Strategy::Sequential => Self::sequential(),
            Strategy::Parallel { jobs } => Self::with_jobs(jobs),
        }
    }

    pub fn sequential() -> Self {
        Executor {
            #[cfg(feature = "parallel")]
            pool: None,
            jobs: 1,
        }
    }

    #[cfg(feature = "parallel")]
    pub fn with_jobs(jobs: usize) -> Self {
        let jobs = if jobs == 0 { available() } else { jobs };
        if jobs == 1 {
            return Self::sequential();
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .thread_name(|i| format!("ppcert-{i}"))
            .build()
            .expect("thread pool");
        Executor {
            pool: Some(pool),
            jobs,
        }
    }

    #[cfg(not(feature = "parallel"))]
    pub fn with_jobs(_jobs: usize) -> Self {
        let _ = available;
        Self::sequential()
    }

    pub fn jobs(&self) -> usize {
        self.jobs
    }

    /// `items.iter().map(f).collect()`, with results in input order.
    pub fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            use rayon::prelude::*;
            return pool.install(|| items.par_iter().map(&f).collect());
        }
        items.iter().map(f).collect()
    }
}
