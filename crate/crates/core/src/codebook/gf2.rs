//! Dense GF(2) matrices with rows packed into `u128`.

/// Reduced row echelon form in place; returns pivot columns in row order.
pub fn rref(rows: &mut Vec<u128>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let bit = 1u128 << c;
        let Some(p) = (r..rows.len()).find(|&i| rows[i] & bit != 0) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r];
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && *row & bit != 0 {
                *row ^= pivot;
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

pub fn rank(rows: &[u128], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, ncols).len()
}

/// Basis of `{x : row·x = 0 for every row}` in `GF(2)^ncols`.
pub fn null_space(rows: &[u128], ncols: usize) -> Vec<u128> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, ncols);
    let mut is_pivot = vec![false; ncols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..ncols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut x = 1u128 << f;
            for (row, &p) in m.iter().zip(&pivots) {
                if (row >> f) & 1 == 1 {
                    x |= 1 << p;
                }
            }
            x
        })
        .collect()
}

#[inline]
pub fn parity(x: u128) -> bool {
    x.count_ones() & 1 == 1
}
