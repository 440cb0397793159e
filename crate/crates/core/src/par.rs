//! Deterministic parallel reduction.
//!
//! Work items `0..count` are cut into fixed chunks. Each chunk folds its
//! items in order into a fresh accumulator and chunks are merged in index
//! order, so floating-point results do not depend on the thread count.

use rayon::prelude::*;

pub(crate) fn ordered_reduce<A, M, F, G>(count: u64, chunk: u64, make: M, fold: F, mut merge: G) -> A
where
    A: Send,
    M: Fn() -> A + Sync,
    F: Fn(&mut A, u64) + Sync,
    G: FnMut(&mut A, A),
{
    let chunk = chunk.max(1);
    let chunks = count.div_ceil(chunk);
    let wave = (rayon::current_num_threads() as u64 * 4).max(1);
    let mut total = make();
    let mut c = 0;
    while c < chunks {
        let end = (c + wave).min(chunks);
        let parts: Vec<A> = (c..end)
            .into_par_iter()
            .map(|ci| {
                let mut acc = make();
                for i in ci * chunk..((ci + 1) * chunk).min(count) {
                    fold(&mut acc, i);
                }
                acc
            })
            .collect();
        for p in parts {
            merge(&mut total, p);
        }
        c = end;
    }
    total
}
