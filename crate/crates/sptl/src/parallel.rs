//! Data-parallel map with a sequential fallback.
//!
//! With the default `parallel` feature the maps run on the rayon thread pool;
//! without it they run sequentially. Either way the results come back in
//! input order, so every reduction downstream is deterministic.

/// Maps `f` over `items`, preserving order.
#[cfg(feature = "parallel")]
pub fn ordered_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send + Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(&f).collect()
}

/// Maps `f` over `items`, preserving order.
#[cfg(not(feature = "parallel"))]
pub fn ordered_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(&f).collect()
}

/// Sums `f(i)` for `i` in `lo..hi` in fixed ascending order.
///
/// The terms are computed in parallel (feature-gated) but always reduced
/// in index order with compensated summation, so the result is
/// bit-reproducible regardless of thread count.
pub fn ordered_sum_f64<F>(lo: u64, hi: u64, chunk: u64, f: F) -> f64
where
    F: Fn(u64) -> f64 + Sync + Send,
{
    let ranges: Vec<(u64, u64)> = (lo..hi)
        .step_by(chunk.max(1) as usize)
        .map(|a| (a, (a + chunk).min(hi)))
        .collect();
    let partials = ordered_map(ranges, |&(a, b)| {
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for i in a..b {
            let y = f(i) - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        sum
    });
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for p in partials {
        let y = p - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordered_map_preserves_order() {
        let v: Vec<u64> = (0..1000).collect();
        let out = ordered_map(v.clone(), |&x| x * 2);
        assert_eq!(out, v.iter().map(|x| x * 2).collect::<Vec<_>>());
    }

    #[test]
    fn ordered_sum_matches_serial() {
        let f = |i: u64| 1.0 / (1.0 + i as f64).powi(2);
        let par = ordered_sum_f64(0, 100_000, 1024, f);
        let mut ser = 0.0;
        for i in 0..100_000u64 {
            ser += f(i);
        }
        assert!((par - ser).abs() < 1e-9);
    }
}
