//! Small dense linear algebra: complex determinants via scaled partial
//! pivoting, bordered determinants, Jacobi symmetric eigendecomposition,
//! and smallest-left-singular-vector extraction. Sized for the matrices
//! this crate actually builds (order <= a few hundred).

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix, row-major.
#[derive(Debug, Clone)]
pub struct MatrixC {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl MatrixC {
    pub fn zeros(rows: usize, cols: usize) -> MatrixC {
        MatrixC { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> MatrixC {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        let mut m = MatrixC::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c);
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, *v);
            }
        }
        m
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &MatrixC) -> MatrixC {
        assert_eq!(self.cols, other.rows);
        let mut out = MatrixC::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }
}

/// Dense real matrix, row-major.
#[derive(Debug, Clone)]
pub struct MatrixR {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl MatrixR {
    pub fn zeros(rows: usize, cols: usize) -> MatrixR {
        MatrixR { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> MatrixR {
        let mut m = MatrixR::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> MatrixR {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        let mut m = MatrixR::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c);
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, *v);
            }
        }
        m
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> MatrixR {
        let mut out = MatrixR::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn mul(&self, other: &MatrixR) -> MatrixR {
        assert_eq!(self.cols, other.rows);
        let mut out = MatrixR::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Max column sum of absolute values.
    pub fn norm_one(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Determinant by LU with scaled partial pivoting. Empty matrix gives 1.
/// For orders above 16 the pivot product is accumulated as log-magnitude
/// plus phase to dodge overflow.
pub fn det_complex(m: &MatrixC) -> Complex64 {
    assert_eq!(m.nrows(), m.ncols(), "determinant needs a square matrix");
    let n = m.nrows();
    assert!(n <= 64, "determinant sized for small matrices, got {n}");
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut a = m.clone();
    // row scale factors for pivot selection
    let mut scale = vec![0.0_f64; n];
    for i in 0..n {
        let s = (0..n).map(|j| a.get(i, j).norm()).fold(0.0, f64::max);
        scale[i] = if s > 0.0 { s } else { 1.0 };
    }
    let mut swaps = 0usize;
    let log_form = n > 16;
    let mut det = Complex64::new(1.0, 0.0);
    let mut log_mag = 0.0_f64;
    let mut phase = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let mut pivot_row = col;
        let mut best = a.get(col, col).norm() / scale[col];
        for r in col + 1..n {
            let cand = a.get(r, col).norm() / scale[r];
            if cand > best {
                best = cand;
                pivot_row = r;
            }
        }
        if pivot_row != col {
            for j in 0..n {
                let t = a.get(col, j);
                a.set(col, j, a.get(pivot_row, j));
                a.set(pivot_row, j, t);
            }
            scale.swap(col, pivot_row);
            swaps += 1;
        }
        let p = a.get(col, col);
        if p.norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if log_form {
            log_mag += p.norm().ln();
            phase *= p / p.norm();
        } else {
            det *= p;
        }
        for r in col + 1..n {
            let f = a.get(r, col) / p;
            if f.norm() == 0.0 {
                continue;
            }
            for j in col + 1..n {
                let v = a.get(r, j) - f * a.get(col, j);
                a.set(r, j, v);
            }
        }
    }
    let sign = if swaps.is_multiple_of(2) { 1.0 } else { -1.0 };
    if log_form {
        phase * log_mag.exp() * sign
    } else {
        det * sign
    }
}

/// `u^T adj(M) u` for `u` the all-ones vector, through the bordered
/// determinant `det([[M, u], [u^T, 0]]) = -u^T adj(M) u`. Well defined for
/// singular `M`; the empty border gives 0.
pub fn bordered_det(m: &MatrixC) -> Complex64 {
    assert_eq!(m.nrows(), m.ncols());
    let n = m.nrows();
    if n == 0 {
        return Complex64::new(0.0, 0.0);
    }
    let one = Complex64::new(1.0, 0.0);
    let mut b = MatrixC::zeros(n + 1, n + 1);
    for i in 0..n {
        for j in 0..n {
            b.set(i, j, m.get(i, j));
        }
        b.set(i, n, one);
        b.set(n, i, one);
    }
    -det_complex(&b)
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Returns eigenvalues ascending and the orthonormal eigenvectors as the
/// columns of the second component.
pub fn sym_eig(m: &MatrixR) -> Result<(Vec<f64>, MatrixR)> {
    assert_eq!(m.nrows(), m.ncols(), "sym_eig needs a square matrix");
    let n = m.nrows();
    assert!(n <= 2000, "sym_eig sized for n <= 2000, got {n}");
    if n == 0 {
        return Ok((Vec::new(), MatrixR::zeros(0, 0)));
    }
    let mut a = m.clone();
    let mut v = MatrixR::identity(n);
    let max_sweeps = 40;
    let mut converged = false;
    for _ in 0..max_sweeps {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a.get(p, q).abs();
            }
        }
        if off <= 1e-300 || off <= 1e-15 * a.frobenius_norm() * n as f64 {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a.get(p, q);
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = 0.5 * (aqq - app) / apq;
                let t = if theta.abs() > 1e154 {
                    0.5 / theta
                } else {
                    let s = theta.signum();
                    s / (theta.abs() + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                a.set(p, p, app - t * apq);
                a.set(q, q, aqq + t * apq);
                a.set(p, q, 0.0);
                a.set(q, p, 0.0);
                for r in 0..n {
                    if r != p && r != q {
                        let arp = a.get(r, p);
                        let arq = a.get(r, q);
                        let new_p = arp - s * (arq + tau * arp);
                        let new_q = arq + s * (arp - tau * arq);
                        a.set(r, p, new_p);
                        a.set(p, r, new_p);
                        a.set(r, q, new_q);
                        a.set(q, r, new_q);
                    }
                }
                for r in 0..n {
                    let vrp = v.get(r, p);
                    let vrq = v.get(r, q);
                    v.set(r, p, vrp - s * (vrq + tau * vrp));
                    v.set(r, q, vrq + s * (vrp - tau * vrq));
                }
            }
        }
    }
    if !converged {
        return Err(Error::ConvergenceFailure(format!(
            "Jacobi sweeps exhausted on {n}x{n} matrix"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let evals: Vec<f64> = (0..n).map(|i| a.get(i, i)).collect();
    order.sort_by(|&i, &j| evals[i].partial_cmp(&evals[j]).unwrap());
    let sorted: Vec<f64> = order.iter().map(|&i| evals[i]).collect();
    let mut vec_sorted = MatrixR::zeros(n, n);
    for (newcol, &oldcol) in order.iter().enumerate() {
        for r in 0..n {
            vec_sorted.set(r, newcol, v.get(r, oldcol));
        }
    }
    Ok((sorted, vec_sorted))
}

/// Unit vector `v` minimizing `||v^T M||` (left null direction) together
/// with the attained smallest singular value, computed from the symmetric
/// eigendecomposition of `M M^T`.
pub fn null_vector(m: &MatrixR) -> Result<(Vec<f64>, f64)> {
    assert_eq!(m.nrows(), m.ncols(), "null_vector needs a square matrix");
    let n = m.nrows();
    assert!(n <= 64, "null_vector sized for small matrices, got {n}");
    if n == 0 {
        return Ok((Vec::new(), 0.0));
    }
    let mmt = m.mul(&m.transpose());
    let (evals, evecs) = sym_eig(&mmt)?;
    let sigma = evals[0].max(0.0).sqrt();
    let mut v: Vec<f64> = (0..n).map(|r| evecs.get(r, 0)).collect();
    // deterministic orientation: first entry of visible magnitude positive
    if let Some(lead) = v.iter().find(|x| x.abs() > 1e-12) {
        if *lead < 0.0 {
            for x in v.iter_mut() {
                *x = -*x;
            }
        }
    }
    Ok((v, sigma))
}

/// Inverse by Gauss-Jordan with scaled partial pivoting.
pub fn invert(m: &MatrixR) -> Result<MatrixR> {
    assert_eq!(m.nrows(), m.ncols());
    let n = m.nrows();
    let mut a = m.clone();
    let mut inv = MatrixR::identity(n);
    let mut scale = vec![0.0_f64; n];
    for i in 0..n {
        let s = (0..n).map(|j| a.get(i, j).abs()).fold(0.0, f64::max);
        if s == 0.0 {
            return Err(Error::IllConditioned { estimate: f64::INFINITY });
        }
        scale[i] = s;
    }
    for col in 0..n {
        let mut pivot_row = col;
        let mut best = a.get(col, col).abs() / scale[col];
        for r in col + 1..n {
            let cand = a.get(r, col).abs() / scale[r];
            if cand > best {
                best = cand;
                pivot_row = r;
            }
        }
        if best == 0.0 {
            return Err(Error::IllConditioned { estimate: f64::INFINITY });
        }
        if pivot_row != col {
            for j in 0..n {
                let t = a.get(col, j);
                a.set(col, j, a.get(pivot_row, j));
                a.set(pivot_row, j, t);
                let t = inv.get(col, j);
                inv.set(col, j, inv.get(pivot_row, j));
                inv.set(pivot_row, j, t);
            }
            scale.swap(col, pivot_row);
        }
        let p = a.get(col, col);
        for j in 0..n {
            a.set(col, j, a.get(col, j) / p);
            inv.set(col, j, inv.get(col, j) / p);
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a.get(r, col);
            if f == 0.0 {
                continue;
            }
            for j in 0..n {
                a.set(r, j, a.get(r, j) - f * a.get(col, j));
                inv.set(r, j, inv.get(r, j) - f * inv.get(col, j));
            }
        }
    }
    Ok(inv)
}
