//! Exact rational linear algebra: dense matrices over arbitrary-precision
//! rationals, deterministic row reduction, solving, kernels, images and
//! quotient projections.
//!
//! Everything here is exact; there is no floating point anywhere in the
//! crate. Pivoting is deterministic (first nonzero entry, column-major
//! scan) so that bases and solutions are reproducible across runs.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, BigRational, One, Zero};

use crate::error::Error;

/// The coefficient field: rationals with big-integer numerator/denominator.
pub type Rat = BigRational;

/// Shorthand for an integer rational.
pub fn rat(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

/// Shorthand for the fraction `p/q`.
pub fn ratio(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Parses the workspace shorthand `"p/q"` or `"p"`.
pub fn parse_rat(s: &str) -> Result<Rat, Error> {
    let s = s.trim();
    let make = |p: &str, q: &str| -> Result<Rat, Error> {
        let num: BigInt = p
            .parse()
            .map_err(|_| Error::structural(format!("bad rational numerator `{p}`")))?;
        let den: BigInt = q
            .parse()
            .map_err(|_| Error::structural(format!("bad rational denominator `{q}`")))?;
        if den.is_zero() {
            return Err(Error::structural(format!("zero denominator in `{s}`")));
        }
        Ok(Rat::new(num, den))
    };
    match s.split_once('/') {
        Some((p, q)) => make(p, q),
        None => make(s, "1"),
    }
}

/// Formats a rational in the canonical workspace form `"p/q"` or `"p"`.
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A dense matrix over the rationals, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    entries: Vec<Rat>,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| rat_to_string(self.at(i, j))).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, entries: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self, Error> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        for row in &rows {
            if row.len() != c {
                return Err(Error::structural("ragged matrix rows"));
            }
        }
        Ok(Mat { rows: r, cols: c, entries: rows.into_iter().flatten().collect() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rat) -> Self {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn column(entries: Vec<Rat>) -> Self {
        Mat { rows: entries.len(), cols: 1, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &Rat {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j { self.at(i, j).is_one() } else { self.at(i, j).is_zero() }
                })
            })
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn scale(&self, c: &Rat) -> Mat {
        Mat { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|e| e * c).collect() }
    }

    pub fn col_vec(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    /// Selects the given columns, in order.
    pub fn select_cols(&self, idx: &[usize]) -> Mat {
        Mat::from_fn(self.rows, idx.len(), |i, j| self.at(i, idx[j]).clone())
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Mat) -> Result<Mat, Error> {
        if self.rows != other.rows {
            return Err(Error::structural("hstack: row mismatch"));
        }
        Ok(Mat::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols { self.at(i, j).clone() } else { other.at(i, j - self.cols).clone() }
        }))
    }

    /// Vertical concatenation.
    pub fn vstack(&self, other: &Mat) -> Result<Mat, Error> {
        if self.cols != other.cols {
            return Err(Error::structural("vstack: column mismatch"));
        }
        Ok(Mat::from_fn(self.rows + other.rows, self.cols, |i, j| {
            if i < self.rows { self.at(i, j).clone() } else { other.at(i - self.rows, j).clone() }
        }))
    }

    /// Block matrix `[[a, b], [c, d]]`.
    pub fn block(a: &Mat, b: &Mat, c: &Mat, d: &Mat) -> Result<Mat, Error> {
        a.hstack(b)?.vstack(&c.hstack(d)?)
    }

    pub fn mul(&self, other: &Mat) -> Result<Mat, Error> {
        if self.cols != other.rows {
            return Err(Error::structural(format!(
                "matrix product dimension mismatch: {}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.at(i, j).clone();
                    out.set(i, j, cur + a * b);
                }
            }
        }
        Ok(out)
    }

    pub fn add_mat(&self, other: &Mat) -> Result<Mat, Error> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::structural("matrix sum dimension mismatch"));
        }
        Ok(Mat::from_fn(self.rows, self.cols, |i, j| self.at(i, j) + other.at(i, j)))
    }

    pub fn sub_mat(&self, other: &Mat) -> Result<Mat, Error> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::structural("matrix difference dimension mismatch"));
        }
        Ok(Mat::from_fn(self.rows, self.cols, |i, j| self.at(i, j) - other.at(i, j)))
    }

    pub fn neg_mat(&self) -> Mat {
        Mat { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|e| -e).collect() }
    }

    /// Row-major vectorization.
    pub fn vec_entries(&self) -> &[Rat] {
        &self.entries
    }

    /// Reduced row echelon form with the list of pivot columns.
    ///
    /// Pivot choice is the first row with a nonzero entry in the scanned
    /// column, so the output is deterministic.
    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let pivot_row = (row..m.rows).find(|&r| !m.at(r, col).is_zero());
            let Some(p) = pivot_row else { continue };
            if p != row {
                for j in 0..m.cols {
                    let a = m.at(row, j).clone();
                    let b = m.at(p, j).clone();
                    m.set(row, j, b);
                    m.set(p, j, a);
                }
            }
            let inv = {
                let piv = m.at(row, col).clone();
                Rat::one() / piv
            };
            for j in col..m.cols {
                let v = m.at(row, j) * &inv;
                m.set(row, j, v);
            }
            for r in 0..m.rows {
                if r == row || m.at(r, col).is_zero() {
                    continue;
                }
                let factor = m.at(r, col).clone();
                for j in col..m.cols {
                    let v = m.at(r, j) - &factor * m.at(row, j);
                    m.set(r, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        Rref { reduced: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// A basis of the kernel, as matrix columns. Deterministic: one basis
    /// vector per free column, in increasing column order.
    pub fn kernel(&self) -> Mat {
        let Rref { reduced, pivots } = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&j| !is_pivot[j]).collect();
        let mut basis = Mat::zeros(self.cols, free.len());
        for (bi, &fc) in free.iter().enumerate() {
            basis.set(fc, bi, Rat::one());
            for (ri, &pc) in pivots.iter().enumerate() {
                basis.set(pc, bi, -reduced.at(ri, fc));
            }
        }
        basis
    }

    /// Pivot columns of the matrix (indices into the original columns).
    pub fn image_pivot_cols(&self) -> Vec<usize> {
        self.rref().pivots
    }

    /// A basis of the column space: the original pivot columns.
    pub fn image(&self) -> Mat {
        let piv = self.image_pivot_cols();
        self.select_cols(&piv)
    }

    /// Solves `self * x = b` for a single column `b`. Returns the
    /// deterministic particular solution (free variables set to zero).
    pub fn solve(&self, b: &Mat) -> Result<Option<Mat>, Error> {
        let sols = self.solve_matrix(b)?;
        Ok(sols)
    }

    /// Solves `self * X = B` column by column with a single reduction.
    /// Returns `None` if any column is inconsistent.
    pub fn solve_matrix(&self, b: &Mat) -> Result<Option<Mat>, Error> {
        if b.rows != self.rows {
            return Err(Error::structural(format!(
                "solve: rhs has {} rows, matrix has {}",
                b.rows, self.rows
            )));
        }
        let aug = self.hstack(b)?;
        let Rref { reduced, pivots } = aug.rref();
        // A pivot beyond the coefficient block means inconsistency.
        if pivots.iter().any(|&p| p >= self.cols) {
            return Ok(None);
        }
        let mut x = Mat::zeros(self.cols, b.cols);
        for (ri, &pc) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                x.set(pc, j, reduced.at(ri, self.cols + j).clone());
            }
        }
        Ok(Some(x))
    }

    pub fn inverse(&self) -> Option<Mat> {
        if self.rows != self.cols {
            return None;
        }
        let inv = self.solve_matrix(&Mat::identity(self.rows)).ok()??;
        // Full rank check: the solve must actually invert.
        if self.mul(&inv).ok()?.is_identity() {
            Some(inv)
        } else {
            None
        }
    }
}

impl Add for &Mat {
    type Output = Mat;
    fn add(self, rhs: &Mat) -> Mat {
        self.add_mat(rhs).expect("matrix sum dimension mismatch")
    }
}

impl Sub for &Mat {
    type Output = Mat;
    fn sub(self, rhs: &Mat) -> Mat {
        self.sub_mat(rhs).expect("matrix difference dimension mismatch")
    }
}

impl Mul for &Mat {
    type Output = Mat;
    fn mul(self, rhs: &Mat) -> Mat {
        self.mul(rhs).expect("matrix product dimension mismatch")
    }
}

impl Neg for &Mat {
    type Output = Mat;
    fn neg(self) -> Mat {
        self.neg_mat()
    }
}

/// Result of a row reduction.
pub struct Rref {
    pub reduced: Mat,
    pub pivots: Vec<usize>,
}

/// A subspace of `Q^ambient_dim` given by a full-column-rank basis matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    pub ambient_dim: usize,
    pub basis: Mat,
}

impl Subspace {
    pub fn new(ambient_dim: usize, basis: Mat) -> Result<Self, Error> {
        if basis.rows() != ambient_dim {
            return Err(Error::structural(format!(
                "subspace basis has {} rows in ambient dimension {}",
                basis.rows(),
                ambient_dim
            )));
        }
        if basis.rank() != basis.cols() {
            return Err(Error::structural("subspace basis columns are linearly dependent"));
        }
        Ok(Subspace { ambient_dim, basis })
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn contains(&self, v: &Mat) -> bool {
        matches!(self.basis.solve(v), Ok(Some(_)))
    }
}

/// Which subspace of a matrix to extract.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubspaceKind {
    Kernel,
    Image,
}

/// `solve_exact`: particular solution (if any) plus a kernel basis.
pub fn solve_exact(a: &Mat, b: &Mat) -> Result<(Option<Mat>, Mat), Error> {
    if b.cols() != 1 {
        return Err(Error::structural("solve_exact expects a single column rhs"));
    }
    let sol = a.solve(b)?;
    Ok((sol, a.kernel()))
}

/// `subspace_basis`: exact kernel or image basis.
pub fn subspace_basis(a: &Mat, which: SubspaceKind) -> Result<Subspace, Error> {
    match which {
        SubspaceKind::Kernel => Subspace::new(a.cols(), a.kernel()),
        SubspaceKind::Image => Subspace::new(a.rows(), a.image()),
    }
}

/// Projection onto chosen complement coordinates for a subspace `S`, plus a
/// section of the projection.
///
/// The complement coordinates are the standard basis vectors whose indices
/// become pivots when reducing `[S | I]`; the projection `q` is surjective
/// with kernel exactly `S`, the returned `section` satisfies
/// `q * section = id`, and `q * S = 0`.
pub fn quotient_map(ambient_dim: usize, s: &Subspace) -> Result<(Mat, Mat), Error> {
    if s.ambient_dim != ambient_dim {
        return Err(Error::structural("quotient_map: ambient dimension mismatch"));
    }
    if s.basis.rank() != s.basis.cols() {
        return Err(Error::structural("quotient_map: basis not full column rank"));
    }
    let aug = s.basis.hstack(&Mat::identity(ambient_dim))?;
    let pivots = aug.image_pivot_cols();
    let s_dim = s.basis.cols();
    // Pivots beyond the S block pick the complement coordinates.
    let complement: Vec<usize> = pivots.iter().filter(|&&p| p >= s_dim).map(|&p| p - s_dim).collect();
    debug_assert_eq!(complement.len(), ambient_dim - s_dim);
    let section = Mat::from_fn(ambient_dim, complement.len(), |i, j| {
        if i == complement[j] { Rat::one() } else { Rat::zero() }
    });
    // [S | section] is invertible; the quotient map is the bottom block of
    // its inverse.
    let change = s.basis.hstack(&section)?;
    let inv = change
        .inverse()
        .ok_or_else(|| Error::structural("quotient_map: internal basis change not invertible"))?;
    let q = Mat::from_fn(ambient_dim - s_dim, ambient_dim, |i, j| inv.at(s_dim + i, j).clone());
    Ok((q, section))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat_i64(rows: Vec<Vec<i64>>) -> Mat {
        Mat::from_rows(rows.into_iter().map(|r| r.into_iter().map(rat).collect()).collect())
            .unwrap()
    }

    #[test]
    fn parse_and_format_rationals() {
        assert_eq!(parse_rat("3").unwrap(), rat(3));
        assert_eq!(parse_rat("-4/6").unwrap(), ratio(-2, 3));
        assert_eq!(rat_to_string(&ratio(-2, 3)), "-2/3");
        assert_eq!(rat_to_string(&rat(5)), "5");
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn solve_identity_returns_rhs() {
        let a = Mat::identity(3);
        let b = Mat::column(vec![rat(1), rat(-2), rat(7)]);
        let (sol, ker) = solve_exact(&a, &b).unwrap();
        assert_eq!(sol.unwrap(), b);
        assert_eq!(ker.cols(), 0);
    }

    #[test]
    fn zero_matrix_inconsistent_system() {
        let a = Mat::zeros(2, 2);
        let b = Mat::column(vec![rat(1), rat(0)]);
        let (sol, ker) = solve_exact(&a, &b).unwrap();
        assert!(sol.is_none());
        assert_eq!(ker.cols(), 2);
    }

    #[test]
    fn solve_resubstitutes_exactly() {
        // Fixed 5x7 instance with known solution.
        let a = mat_i64(vec![
            vec![1, 2, 0, -1, 3, 0, 2],
            vec![0, 1, 1, 1, 0, -2, 0],
            vec![2, 0, -1, 0, 1, 1, 1],
            vec![1, 1, 1, 1, 1, 1, 1],
            vec![0, 0, 2, 0, -1, 0, 3],
        ]);
        let x0 = Mat::column(vec![rat(1), rat(-1), rat(2), rat(0), rat(3), rat(-2), rat(1)]);
        let b = (&a).mul(&x0).unwrap();
        let (sol, ker) = solve_exact(&a, &b).unwrap();
        let x = sol.unwrap();
        assert_eq!(a.mul(&x).unwrap(), b);
        // Every kernel column really is in the kernel.
        let prod = a.mul(&ker).unwrap();
        assert!(prod.is_zero());
    }

    #[test]
    fn kernel_of_zero_map_is_everything() {
        let a = Mat::zeros(3, 3);
        let s = subspace_basis(&a, SubspaceKind::Kernel).unwrap();
        assert_eq!(s.dim(), 3);
        let id = Mat::identity(3);
        let s2 = subspace_basis(&id, SubspaceKind::Kernel).unwrap();
        assert_eq!(s2.dim(), 0);
        let im = subspace_basis(&id, SubspaceKind::Image).unwrap();
        assert_eq!(im.dim(), 3);
    }

    #[test]
    fn rank_nullity_on_fixed_matrix() {
        let a = mat_i64(vec![
            vec![1, 2, 3, 4, 5, 6],
            vec![2, 4, 6, 8, 10, 12],
            vec![0, 1, -1, 0, 2, 1],
            vec![1, 3, 2, 4, 7, 7],
        ]);
        assert_eq!(a.rank() + a.kernel().cols(), 6);
        assert_eq!(a.rank(), a.transpose().rank());
    }

    #[test]
    fn quotient_full_space_is_zero_dimensional() {
        let s = Subspace::new(3, Mat::identity(3)).unwrap();
        let (q, _) = quotient_map(3, &s).unwrap();
        assert_eq!(q.rows(), 0);
    }

    #[test]
    fn quotient_of_zero_subspace_is_identity() {
        let s = Subspace::new(3, Mat::zeros(3, 0)).unwrap();
        let (q, sec) = quotient_map(3, &s).unwrap();
        assert!(q.is_identity());
        assert!(sec.is_identity());
    }

    #[test]
    fn quotient_section_composite_is_identity() {
        let basis = mat_i64(vec![
            vec![1, 0],
            vec![2, 1],
            vec![0, 3],
            vec![1, 1],
            vec![-1, 2],
            vec![0, 0],
        ]);
        let s = Subspace::new(6, basis).unwrap();
        let (q, sec) = quotient_map(6, &s).unwrap();
        assert_eq!(q.rows(), 4);
        assert!(q.mul(&sec).unwrap().is_identity());
        assert!(q.mul(&s.basis).unwrap().is_zero());
    }

    #[test]
    fn dependent_basis_rejected() {
        let basis = mat_i64(vec![vec![1, 2], vec![2, 4]]);
        assert!(Subspace::new(2, basis).is_err());
    }
}
