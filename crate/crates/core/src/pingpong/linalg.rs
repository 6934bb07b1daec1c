//! Dense matrices over `Q(ζ_n)` with exact Gaussian elimination.

use std::fmt;

use serde_json::Value;

use super::cyclotomic::CyclotomicNumber;
use crate::error::{Error, Result};

pub type CycloVector = Vec<CyclotomicNumber>;

pub fn vector_is_zero(v: &[CyclotomicNumber]) -> bool {
    v.iter().all(CyclotomicNumber::is_zero)
}

pub fn vector_json(v: &[CyclotomicNumber]) -> Value {
    Value::Array(v.iter().map(CyclotomicNumber::to_json).collect())
}

/// Row-major matrix with entries in one cyclotomic field.
#[derive(Clone, PartialEq, Eq)]
pub struct CycloMatrix {
    n: u32,
    rows: usize,
    cols: usize,
    data: Vec<CyclotomicNumber>,
}

impl CycloMatrix {
    pub fn zeros(n: u32, rows: usize, cols: usize) -> Self {
        CycloMatrix {
            n,
            rows,
            cols,
            data: vec![CyclotomicNumber::zero(n); rows * cols],
        }
    }

    pub fn identity(n: u32, size: usize) -> Self {
        let mut m = Self::zeros(n, size, size);
        for i in 0..size {
            m.set(i, i, CyclotomicNumber::one(n));
        }
        m
    }

    pub fn from_int_rows(n: u32, rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged integer rows".into()));
        }
        let data = rows
            .iter()
            .flatten()
            .map(|&v| CyclotomicNumber::from_i64(n, v))
            .collect();
        Ok(CycloMatrix {
            n,
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(n: u32, rows: usize, columns: &[CycloVector]) -> Result<Self> {
        let mut m = Self::zeros(n, rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::Dimension(format!(
                    "column {j} has length {} instead of {rows}",
                    c.len()
                )));
            }
            for (i, v) in c.iter().enumerate() {
                if v.conductor() != n {
                    return Err(Error::ConductorMismatch {
                        left: n,
                        right: v.conductor(),
                    });
                }
                m.set(i, j, v.clone());
            }
        }
        Ok(m)
    }

    pub fn diagonal(n: u32, entries: &[CyclotomicNumber]) -> Self {
        let mut m = Self::zeros(n, entries.len(), entries.len());
        for (i, v) in entries.iter().enumerate() {
            m.set(i, i, v.clone());
        }
        m
    }

    pub fn conductor(&self) -> u32 {
        self.n
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &CyclotomicNumber {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: CyclotomicNumber) {
        self.data[r * self.cols + c] = v;
    }

    pub fn column(&self, j: usize) -> CycloVector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(CyclotomicNumber::is_zero)
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::ConductorMismatch {
                left: self.n,
                right: other.n,
            });
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_>>()?;
        Ok(self.with_data(data))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<_>>()?;
        Ok(self.with_data(data))
    }

    fn with_data(&self, data: Vec<CyclotomicNumber>) -> Self {
        CycloMatrix {
            n: self.n,
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, s: &CyclotomicNumber) -> Result<Self> {
        let data = self.data.iter().map(|a| a.mul(s)).collect::<Result<_>>()?;
        Ok(self.with_data(data))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::ConductorMismatch {
                left: self.n,
                right: other.n,
            });
        }
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.n, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = CyclotomicNumber::zero(self.n);
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    let b = other.get(k, j);
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add(&a.mul(b)?)?;
                    }
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[CyclotomicNumber]) -> Result<CycloVector> {
        let col = Self::from_columns(self.n, v.len(), &[v.to_vec()])?;
        Ok(self.mul(&col)?.column(0))
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut acc = Self::identity(self.n, self.rows);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Applies a field automorphism entrywise.
    pub fn galois(&self, k: u64) -> Result<Self> {
        let data = self
            .data
            .iter()
            .map(|a| a.galois(k))
            .collect::<Result<_>>()?;
        Ok(self.with_data(data))
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (CycloMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = m.get(r, c).inv().expect("pivot is nonzero");
            for j in c..m.cols {
                let v = m.get(r, j).mul(&inv).expect("same conductor");
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in c..m.cols {
                    let v = m
                        .get(i, j)
                        .sub(&f.mul(m.get(r, j)).expect("same conductor"))
                        .expect("same conductor");
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the null space.
    pub fn kernel(&self) -> Vec<CycloVector> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![CyclotomicNumber::zero(self.n); self.cols];
                v[f] = CyclotomicNumber::one(self.n);
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = r.get(row, f).neg();
                }
                v
            })
            .collect()
    }

    /// Basis of the column space, taken from the original pivot columns.
    pub fn image(&self) -> Vec<CycloVector> {
        let (_, pivots) = self.rref();
        pivots.into_iter().map(|j| self.column(j)).collect()
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            (0..self.rows)
                .map(|i| {
                    vector_json(
                        &(0..self.cols)
                            .map(|j| self.get(i, j).clone())
                            .collect::<Vec<_>>(),
                    )
                })
                .collect(),
        )
    }
}

impl fmt::Debug for CycloMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "CycloMatrix {}x{} over Q(z_{})",
            self.rows, self.cols, self.n
        )?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Whether two subspaces, given by bases, meet only in zero; otherwise a
/// nonzero common vector.
pub fn intersection_witness(
    n: u32,
    dim: usize,
    u: &[CycloVector],
    w: &[CycloVector],
) -> Result<Option<CycloVector>> {
    if u.is_empty() || w.is_empty() {
        return Ok(None);
    }
    let cols: Vec<CycloVector> = u.iter().chain(w).cloned().collect();
    let m = CycloMatrix::from_columns(n, dim, &cols)?;
    let ku = CycloMatrix::from_columns(n, dim, u)?;
    let kw = CycloMatrix::from_columns(n, dim, w)?;
    if m.rank() == ku.rank() + kw.rank() {
        return Ok(None);
    }
    // A null vector (c_u, c_w) of [U | W] gives U·c_u = -W·c_w.
    for null in m.kernel() {
        let cu: CycloVector = null[..u.len()].to_vec();
        let x = ku.mul_vec(&cu)?;
        if !vector_is_zero(&x) {
            return Ok(Some(x));
        }
    }
    Err(Error::Verification(
        "rank deficit without a nonzero common vector".into(),
    ))
}
