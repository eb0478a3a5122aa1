//! Execution strategy for point-wise sweeps.
//!
//! Every sweep in the crate (map grids, delay scans, radial profiles) goes
//! through [`map_indexed`]. Each point is computed independently and the
//! results are collected in index order, so the output is bit-identical
//! whichever strategy runs it.

/// Defaults to [`Exec::Parallel`] when the `parallel` feature is on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Exec {
    #[cfg_attr(not(feature = "parallel"), default)]
    Sequential,
    #[cfg(feature = "parallel")]
    #[default]
    Parallel,
}

/// Evaluates `f(0..n)` and returns the results in index order.
pub fn map_indexed<T, F>(exec: Exec, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        Exec::Sequential => (0..n).map(f).collect(),
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
    }
}

/// Fallible variant of [`map_indexed`]; the first error in index order wins.
pub fn try_map_indexed<T, E, F>(exec: Exec, n: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    map_indexed(exec, n, f).into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree_bitwise() {
        let f = |i: usize| ((i as f64) * 0.37).sin().exp();
        let seq = map_indexed(Exec::Sequential, 1000, f);
        let def = map_indexed(Exec::default(), 1000, f);
        assert_eq!(seq, def);
    }
}
