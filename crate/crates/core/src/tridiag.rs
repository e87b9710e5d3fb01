//! Implicit QL iteration with Wilkinson-type shifts for symmetric
//! tridiagonal matrices.
//!
//! Rotations can be accumulated into the full eigenvector matrix or into its
//! first row only; the latter is all Gauss weights need and keeps the cost at
//! O(d²) for long chains.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Accumulate {
    FirstRow,
    Full,
}

#[derive(Debug, Clone)]
pub(crate) struct TridiagEigen {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// `rows[r][j]` is component `r` of eigenvector `j`. One row for
    /// `Accumulate::FirstRow`, `d` rows for `Accumulate::Full`.
    pub rows: Vec<Vec<f64>>,
}

const MAX_SWEEPS: usize = 60;

/// Returns `None` if some eigenvalue fails to converge.
pub(crate) fn symmetric_tridiagonal_eigen(
    diag: &[f64],
    offdiag: &[f64],
    accumulate: Accumulate,
) -> Option<TridiagEigen> {
    let n = diag.len();
    assert_eq!(offdiag.len() + 1, n.max(1));
    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    e.push(0.0);
    let nrows = match accumulate {
        Accumulate::FirstRow => 1.min(n),
        Accumulate::Full => n,
    };
    // cols[j][r] is component r of vector j, so a rotation touches two
    // contiguous slices
    let mut cols: Vec<Vec<f64>> = (0..n)
        .map(|c| (0..nrows).map(|r| if r == c { 1.0 } else { 0.0 }).collect())
        .collect();

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_SWEEPS {
                return None;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let (lo, hi) = cols.split_at_mut(i + 1);
                for (zi, zn) in lo[i].iter_mut().zip(hi[0].iter_mut()) {
                    let f = *zn;
                    *zn = s * *zi + c * f;
                    *zi = c * *zi - s * f;
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    Some(TridiagEigen {
        values: order.iter().map(|&j| d[j]).collect(),
        rows: (0..nrows)
            .map(|r| order.iter().map(|&j| cols[j][r]).collect())
            .collect(),
    })
}
