//! Execution mode for the data-parallel inner loops.
//!
//! Every parallel loop in the crate goes through [`Exec`], which maps over an
//! index range or a slice and collects results in input order. Reductions are
//! always finished sequentially over the ordered partials, so results are
//! bitwise identical in both modes.
//!
//! With the `parallel` feature disabled, [`Exec::Parallel`] silently runs
//! sequentially.

use std::cell::Cell;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

thread_local! {
    static OVERRIDE: Cell<Option<Exec>> = const { Cell::new(None) };
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// Mode in effect on the calling thread.
    pub fn current() -> Exec {
        OVERRIDE.with(|o| o.get()).unwrap_or_default()
    }

    pub fn map_range<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(f).collect()
            }
            _ => (0..n).map(f).collect(),
        }
    }

    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
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

    /// Apply `f(row_index, row)` to each `width`-sized chunk of `data`.
    pub fn for_each_row<F>(self, data: &mut [f64], width: usize, f: F)
    where
        F: Fn(usize, &mut [f64]) + Sync + Send,
    {
        if width == 0 {
            return;
        }
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                data.par_chunks_mut(width)
                    .enumerate()
                    .for_each(|(i, row)| f(i, row));
            }
            _ => data
                .chunks_mut(width)
                .enumerate()
                .for_each(|(i, row)| f(i, row)),
        }
    }

    /// Ordered sum of per-index partials.
    pub fn sum_range<F>(self, n: usize, f: F) -> f64
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        self.map_range(n, f).into_iter().sum()
    }
}

/// Run `f` with `mode` as the current execution mode on this thread.
pub fn with_mode<R>(mode: Exec, f: impl FnOnce() -> R) -> R {
    let prev = OVERRIDE.with(|o| o.replace(Some(mode)));
    let out = f();
    OVERRIDE.with(|o| o.set(prev));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let seq = Exec::Sequential.map_range(1000, |i| (i as f64).sqrt());
        let par = Exec::Parallel.map_range(1000, |i| (i as f64).sqrt());
        assert_eq!(seq, par);
        let a = Exec::Sequential.sum_range(1000, |i| 1.0 / (i as f64 + 1.0));
        let b = Exec::Parallel.sum_range(1000, |i| 1.0 / (i as f64 + 1.0));
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn override_is_scoped() {
        let inner = with_mode(Exec::Sequential, Exec::current);
        assert_eq!(inner, Exec::Sequential);
        assert_eq!(Exec::current(), Exec::default());
    }

    #[test]
    fn rows() {
        let mut data = vec![0.0; 12];
        Exec::current().for_each_row(&mut data, 3, |i, row| row.iter_mut().for_each(|x| *x = i as f64));
        assert_eq!(&data[9..], &[3.0, 3.0, 3.0]);
    }
}
