//! Execution mode for batch work.
//!
//! Relation checks over weight grids, matrix columns and seed vectors are
//! independent of each other. [`Exec::Parallel`] farms them out to rayon when
//! the `parallel` feature is enabled; without the feature it silently runs
//! sequentially. Results are always returned in input order, so output is
//! identical in both modes.

/// How independent work items are scheduled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Exec {
    /// Plain iterator on the calling thread.
    Sequential,
    /// Rayon data-parallel iterator (sequential fallback without the `parallel` feature).
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if Exec::parallel_available() {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// True when the crate was compiled with rayon support.
    pub const fn parallel_available() -> bool {
        cfg!(feature = "parallel")
    }

    /// Map `f` over `items`, preserving order.
    pub fn map<T, U, F>(self, items: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(f).collect()
            }
            _ => items.iter().map(f).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_modes_preserve_order() {
        let v: Vec<u64> = (0..1000).collect();
        let a = Exec::Sequential.map(&v, |x| x * x);
        let b = Exec::Parallel.map(&v, |x| x * x);
        assert_eq!(a, b);
        assert_eq!(a[999], 999 * 999);
    }
}
