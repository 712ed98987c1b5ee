//! Small dense kernels shared by the simplex and the vertex oracle.

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Row-major square matrix inverse by Gauss-Jordan with partial pivoting.
/// Returns `None` when a pivot falls below `tiny` times the largest entry.
pub(crate) fn invert(mat: &[f64], k: usize, tiny: f64) -> Option<Vec<f64>> {
    let scale = mat.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if k == 0 {
        return Some(Vec::new());
    }
    if scale == 0.0 {
        return None;
    }
    let mut a = mat.to_vec();
    let mut inv = vec![0.0; k * k];
    for i in 0..k {
        inv[i * k + i] = 1.0;
    }
    for col in 0..k {
        let (pivot_row, pivot_abs) = (col..k)
            .map(|r| (r, a[r * k + col].abs()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot_abs <= tiny * scale {
            return None;
        }
        if pivot_row != col {
            for j in 0..k {
                a.swap(pivot_row * k + j, col * k + j);
                inv.swap(pivot_row * k + j, col * k + j);
            }
        }
        let p = a[col * k + col];
        for j in 0..k {
            a[col * k + j] /= p;
            inv[col * k + j] /= p;
        }
        for r in 0..k {
            if r == col {
                continue;
            }
            let f = a[r * k + col];
            if f == 0.0 {
                continue;
            }
            for j in 0..k {
                a[r * k + j] -= f * a[col * k + j];
                inv[r * k + j] -= f * inv[col * k + j];
            }
        }
    }
    Some(inv)
}

/// Solves the square system `rows * x = rhs`.
pub(crate) fn solve(rows: &[&[f64]], rhs: &[f64], tiny: f64) -> Option<Vec<f64>> {
    let k = rows.len();
    let mut aug: Vec<Vec<f64>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut v = r.to_vec();
            v.push(*b);
            v
        })
        .collect();
    let scale = rows.iter().flat_map(|r| r.iter()).fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&a, &b| aug[a][col].abs().total_cmp(&aug[b][col].abs()))
            .unwrap();
        if aug[pivot][col].abs() <= tiny * scale {
            return None;
        }
        aug.swap(col, pivot);
        for r in col + 1..k {
            let f = aug[r][col] / aug[col][col];
            if f != 0.0 {
                for j in col..=k {
                    aug[r][j] -= f * aug[col][j];
                }
            }
        }
    }
    let mut x = vec![0.0; k];
    for i in (0..k).rev() {
        let s: f64 = (i + 1..k).map(|j| aug[i][j] * x[j]).sum();
        x[i] = (aug[i][k] - s) / aug[i][i];
    }
    Some(x)
}

/// Row echelon reduction. Returns the rank and the reduced rows.
fn echelon(rows: &[&[f64]], d: usize, tiny: f64) -> (usize, Vec<Vec<f64>>, Vec<usize>) {
    let mut a: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
    let scale = rows.iter().flat_map(|r| r.iter()).fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..d {
        if rank == a.len() {
            break;
        }
        let pivot = (rank..a.len())
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        if a[pivot][col].abs() <= tiny * scale.max(f64::MIN_POSITIVE) {
            continue;
        }
        a.swap(rank, pivot);
        let p = a[rank][col];
        for j in 0..d {
            a[rank][j] /= p;
        }
        for r in 0..a.len() {
            if r != rank {
                let f = a[r][col];
                if f != 0.0 {
                    for j in 0..d {
                        a[r][j] -= f * a[rank][j];
                    }
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    (rank, a, pivots)
}

pub(crate) fn rank(rows: &[&[f64]], d: usize, tiny: f64) -> usize {
    echelon(rows, d, tiny).0
}

/// Unit vector spanning the kernel of `rows` (d columns) when the kernel is
/// exactly one-dimensional.
pub(crate) fn kernel_direction(rows: &[&[f64]], d: usize, tiny: f64) -> Option<Vec<f64>> {
    let (rank, reduced, pivots) = echelon(rows, d, tiny);
    if rank + 1 != d {
        return None;
    }
    let free = (0..d).find(|c| !pivots.contains(c))?;
    let mut w = vec![0.0; d];
    w[free] = 1.0;
    for (r, &pc) in pivots.iter().enumerate() {
        w[pc] = -reduced[r][free];
    }
    let norm = dot(&w, &w).sqrt();
    Some(w.into_iter().map(|v| v / norm).collect())
}
