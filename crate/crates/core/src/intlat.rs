//! Exact integer-matrix algebra: Smith normal form, integer kernels and
//! solvability, and cokernel (quotient lattice) structure.
//!
//! Everything is over unbounded integers; there is no floating point anywhere.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// A dense integer matrix in row-major order. Zero-dimensional shapes are
/// legal and behave as the unique empty matrix of that shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        IntMatrix {
            rows,
            cols,
            entries,
        }
    }

    /// Build from row slices of machine integers; handy in tests and recipes.
    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map(|row| row.len()).unwrap_or(0);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        IntMatrix::from_fn(r, c, |i, j| BigInt::from(rows[i][j]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, MatrixError> {
        if self.cols != other.rows {
            return Err(MatrixError::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = a * other.get(k, j);
                    let cur = out.get(i, j) + t;
                    out.set(i, j, cur);
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[BigInt]) -> Result<Vec<BigInt>, MatrixError> {
        if v.len() != self.cols {
            return Err(MatrixError::DimensionMismatch(format!(
                "{}x{} * vec[{}]",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = vec![BigInt::zero(); self.rows];
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[i] += self.get(i, j) * &v[j];
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &IntMatrix) -> Result<IntMatrix, MatrixError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(MatrixError::DimensionMismatch("add".into()));
        }
        Ok(IntMatrix::from_fn(self.rows, self.cols, |i, j| {
            self.get(i, j) + other.get(i, j)
        }))
    }

    pub fn sub(&self, other: &IntMatrix) -> Result<IntMatrix, MatrixError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(MatrixError::DimensionMismatch("sub".into()));
        }
        Ok(IntMatrix::from_fn(self.rows, self.cols, |i, j| {
            self.get(i, j) - other.get(i, j)
        }))
    }

    pub fn neg(&self) -> IntMatrix {
        IntMatrix::from_fn(self.rows, self.cols, |i, j| -self.get(i, j))
    }

    /// Block-diagonal sum: `self` in the top-left, `other` in the bottom-right.
    pub fn block_diag(&self, other: &IntMatrix) -> IntMatrix {
        IntMatrix::from_fn(
            self.rows + other.rows,
            self.cols + other.cols,
            |i, j| {
                if i < self.rows && j < self.cols {
                    self.get(i, j).clone()
                } else if i >= self.rows && j >= self.cols {
                    other.get(i - self.rows, j - self.cols).clone()
                } else {
                    BigInt::zero()
                }
            },
        )
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -self.get(r, j);
            self.set(r, j, v);
        }
    }

    fn negate_col(&mut self, c: usize) {
        for i in 0..self.rows {
            let v = -self.get(i, c);
            self.set(i, c, v);
        }
    }

    /// row[dst] += q * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        for j in 0..self.cols {
            let v = self.get(dst, j) + q * self.get(src, j);
            self.set(dst, j, v);
        }
    }

    /// col[dst] += q * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        for i in 0..self.rows {
            let v = self.get(i, dst) + q * self.get(i, src);
            self.set(i, dst, v);
        }
    }

    /// Exact determinant by fraction-free (Bareiss) elimination. This is an
    /// independent route from the Smith normal form; tests cross-check the two.
    pub fn determinant(&self) -> Result<BigInt, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                    Some(i) => {
                        a.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j);
                    let (q, r) = num.div_rem(&prev);
                    debug_assert!(r.is_zero(), "Bareiss division must be exact");
                    a.set(i, j, q);
                }
                a.set(i, k, BigInt::zero());
            }
            prev = a.get(k, k).clone();
        }
        Ok(sign * a.get(n - 1, n - 1).clone())
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

// JSON form: {"rows": r, "cols": c, "entries": [[row...], ...]} with exact
// (arbitrary-precision) integers.
impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("IntMatrix", 3)?;
        st.serialize_field("rows", &self.rows)?;
        st.serialize_field("cols", &self.cols)?;
        let rows: Vec<Vec<serde_json::Number>> = (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| {
                        serde_json::Number::from_str(&self.get(i, j).to_string())
                            .expect("integer literal")
                    })
                    .collect()
            })
            .collect();
        st.serialize_field("entries", &rows)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            rows: usize,
            cols: usize,
            entries: Vec<Vec<serde_json::Number>>,
        }
        let raw = Raw::deserialize(deserializer)?;
        if raw.entries.len() != raw.rows || raw.entries.iter().any(|r| r.len() != raw.cols) {
            return Err(D::Error::custom("entries shape does not match rows/cols"));
        }
        let mut entries = Vec::with_capacity(raw.rows * raw.cols);
        for row in &raw.entries {
            for n in row {
                let v = BigInt::from_str(n.as_str())
                    .map_err(|_| D::Error::custom("matrix entry is not an exact integer"))?;
                entries.push(v);
            }
        }
        Ok(IntMatrix {
            rows: raw.rows,
            cols: raw.cols,
            entries,
        })
    }
}

/// Smith normal form `M = U * D * V` with unimodular `U`, `V` and a
/// non-negative divisibility chain on the diagonal of `D`.
///
/// `row_transform` (`P`) and `col_transform` (`Q`) satisfy `P * M * Q = D`;
/// they are the inverses of `U` and `V` and are what the solver and kernel
/// extraction actually use.
#[derive(Debug, Clone)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub row_transform: IntMatrix,
    pub col_transform: IntMatrix,
}

impl SmithDecomposition {
    pub fn diagonal(&self) -> Vec<BigInt> {
        let n = self.d.rows().min(self.d.cols());
        (0..n).map(|i| self.d.get(i, i).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }
}

/// Compute the Smith normal form of `M`.
///
/// Pivot rule: smallest absolute value among nonzero entries of the working
/// submatrix, ties broken by lowest (row, col). This keeps the output
/// deterministic and entry growth tame.
pub fn smith_normal_form(m: &IntMatrix) -> SmithDecomposition {
    let rows = m.rows();
    let cols = m.cols();
    let mut a = m.clone();
    let mut p = IntMatrix::identity(rows);
    let mut u = IntMatrix::identity(rows);
    let mut q = IntMatrix::identity(cols);
    let mut v = IntMatrix::identity(cols);

    // Elementary op helpers keeping P*M*Q = A and U*A*V = M in sync.
    macro_rules! row_swap {
        ($i:expr, $j:expr) => {{
            a.swap_rows($i, $j);
            p.swap_rows($i, $j);
            u.swap_cols($i, $j);
        }};
    }
    macro_rules! col_swap {
        ($i:expr, $j:expr) => {{
            a.swap_cols($i, $j);
            q.swap_cols($i, $j);
            v.swap_rows($i, $j);
        }};
    }
    macro_rules! row_add {
        ($dst:expr, $src:expr, $q:expr) => {{
            let c: BigInt = $q;
            a.add_row_multiple($dst, $src, &c);
            p.add_row_multiple($dst, $src, &c);
            u.add_col_multiple($src, $dst, &(-&c));
        }};
    }
    macro_rules! col_add {
        ($dst:expr, $src:expr, $q:expr) => {{
            let c: BigInt = $q;
            a.add_col_multiple($dst, $src, &c);
            q.add_col_multiple($dst, $src, &c);
            v.add_row_multiple($src, $dst, &(-&c));
        }};
    }
    macro_rules! row_negate {
        ($i:expr) => {{
            a.negate_row($i);
            p.negate_row($i);
            u.negate_col($i);
        }};
    }

    let n = rows.min(cols);
    for t in 0..n {
        'pivot: loop {
            // Smallest nonzero entry of the submatrix, ties by lowest (row, col).
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if a.get(i, j).is_zero() {
                        continue;
                    }
                    let better = match pivot {
                        None => true,
                        Some((pi, pj)) => a.get(i, j).abs() < a.get(pi, pj).abs(),
                    };
                    if better {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                break 'pivot; // submatrix is zero
            };
            row_swap!(t, pi);
            col_swap!(t, pj);

            // Clear the pivot column and row; any nonzero remainder becomes a
            // smaller pivot candidate on the next pass.
            let mut dirty = false;
            for i in t + 1..rows {
                if !a.get(i, t).is_zero() {
                    let quot = a.get(i, t) / a.get(t, t);
                    row_add!(i, t, -quot);
                    if !a.get(i, t).is_zero() {
                        dirty = true;
                    }
                }
            }
            for j in t + 1..cols {
                if !a.get(t, j).is_zero() {
                    let quot = a.get(t, j) / a.get(t, t);
                    col_add!(j, t, -quot);
                    if !a.get(t, j).is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue 'pivot;
            }
            // Enforce divisibility: the pivot must divide every remaining entry.
            let mut offender = None;
            for i in t + 1..rows {
                for j in t + 1..cols {
                    if !(a.get(i, j) % a.get(t, t)).is_zero() {
                        offender = Some(i);
                        break;
                    }
                }
                if offender.is_some() {
                    break;
                }
            }
            if let Some(i) = offender {
                row_add!(t, i, BigInt::one());
                continue 'pivot;
            }
            break 'pivot;
        }
        if a.get(t, t).is_negative() {
            row_negate!(t);
        }
        if a.get(t, t).is_zero() {
            break; // the rest of the submatrix is zero too
        }
    }

    SmithDecomposition {
        u,
        d: a,
        v,
        row_transform: p,
        col_transform: q,
    }
}

/// A basis of the integer kernel `{v : Mv = 0}`.
pub fn kernel_basis(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    let snf = smith_normal_form(m);
    let diag = snf.diagonal();
    let mut basis = Vec::new();
    for t in 0..m.cols() {
        let zero_col = t >= diag.len() || diag[t].is_zero();
        if zero_col {
            let col: Vec<BigInt> = (0..m.cols())
                .map(|i| snf.col_transform.get(i, t).clone())
                .collect();
            basis.push(col);
        }
    }
    basis
}

/// Some integer solution of `Mv = c`, or `None` if no integer solution
/// exists. When `det(M) != 0` the returned solution is the unique one;
/// otherwise free coordinates are pinned to zero in SNF coordinates, which
/// makes the answer deterministic.
pub fn solve_integer(m: &IntMatrix, c: &[BigInt]) -> Result<Option<Vec<BigInt>>, MatrixError> {
    if c.len() != m.rows() {
        return Err(MatrixError::DimensionMismatch(format!(
            "solve: matrix {}x{}, rhs {}",
            m.rows(),
            m.cols(),
            c.len()
        )));
    }
    let snf = smith_normal_form(m);
    solve_with_snf(&snf, m.cols(), c)
}

fn solve_with_snf(
    snf: &SmithDecomposition,
    cols: usize,
    c: &[BigInt],
) -> Result<Option<Vec<BigInt>>, MatrixError> {
    let rhs = snf.row_transform.matvec(c)?;
    let diag = snf.diagonal();
    let mut w = vec![BigInt::zero(); cols];
    for (t, r) in rhs.iter().enumerate() {
        if t < diag.len() && !diag[t].is_zero() {
            let (quot, rem) = r.div_rem(&diag[t]);
            if !rem.is_zero() {
                return Ok(None);
            }
            w[t] = quot;
        } else if !r.is_zero() {
            return Ok(None);
        }
    }
    Ok(Some(snf.col_transform.matvec(&w)?))
}

/// Canonical coordinates in the cokernel `Z^k / im(M)`: torsion coordinates
/// reduced mod their invariant factor, free coordinates as-is.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CokernelCoords {
    pub torsion: Vec<BigInt>,
    pub free: Vec<BigInt>,
}

impl CokernelCoords {
    pub fn is_zero(&self) -> bool {
        self.torsion.iter().all(|x| x.is_zero()) && self.free.iter().all(|x| x.is_zero())
    }
}

/// The structure of `Z^k / im(M)` together with projection data.
#[derive(Debug, Clone)]
pub struct CokernelStructure {
    free_rank: usize,
    torsion: Vec<BigInt>,
    // Row transform P of the SNF of M and the diagonal, padded to k rows:
    // coordinate t of P*c lives in Z/diag[t] (diag[t] = 0 meaning Z).
    row_transform: IntMatrix,
    diag: Vec<BigInt>,
}

impl CokernelStructure {
    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    /// Invariant factors > 1, in divisibility order.
    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Project a vector to canonical cokernel coordinates. Additive, and zero
    /// exactly on `im(M)`.
    pub fn project(&self, c: &[BigInt]) -> Result<CokernelCoords, MatrixError> {
        let w = self.row_transform.matvec(c)?;
        let mut torsion = Vec::new();
        let mut free = Vec::new();
        for (t, x) in w.iter().enumerate() {
            match &self.diag[t] {
                d if d.is_zero() => free.push(x.clone()),
                d if d.is_one() => {}
                d => torsion.push(x.mod_floor(d)),
            }
        }
        Ok(CokernelCoords { torsion, free })
    }

    /// Sum of two canonical coordinate tuples, reduced canonically.
    pub fn add_coords(&self, a: &CokernelCoords, b: &CokernelCoords) -> CokernelCoords {
        let torsion = self
            .torsion
            .iter()
            .zip(a.torsion.iter().zip(&b.torsion))
            .map(|(d, (x, y))| (x + y).mod_floor(d))
            .collect();
        let free = a.free.iter().zip(&b.free).map(|(x, y)| x + y).collect();
        CokernelCoords { torsion, free }
    }
}

/// Compute the cokernel structure of `M` (quotient of `Z^rows` by the column
/// span of `M`).
pub fn cokernel(m: &IntMatrix) -> CokernelStructure {
    let snf = smith_normal_form(m);
    let mut diag = snf.diagonal();
    diag.resize(m.rows(), BigInt::zero());
    let torsion: Vec<BigInt> = diag.iter().filter(|d| **d > BigInt::one()).cloned().collect();
    let free_rank = diag.iter().filter(|d| d.is_zero()).count();
    CokernelStructure {
        free_rank,
        torsion,
        row_transform: snf.row_transform,
        diag,
    }
}
