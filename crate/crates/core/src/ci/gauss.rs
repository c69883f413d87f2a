use std::io::{Read, Write};

use thiserror::Error;

use super::{validate_query, CiError, CiOracle, CiResult, QueryCounter};
use crate::graph::VertexId;
use crate::linalg;
use crate::scalar::Scalar;

/// Partial correlations are clamped to `±(1 - R_CLAMP)` before the
/// z-transform so degenerate data cannot produce an infinite statistic.
const R_CLAMP: f64 = 1e-12;

/// Pivot threshold for declaring a correlation submatrix singular.
const SINGULAR_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("dataset has no rows")]
    Empty,
    #[error("row {row} has {got} values, expected {expected}")]
    Ragged { row: usize, got: usize, expected: usize },
    #[error("row {row}, column {col}: cannot parse {value:?} as a number")]
    Parse { row: usize, col: usize, value: String },
    #[error("column {0} has zero variance")]
    ZeroVariance(usize),
    #[error("significance level {0} outside (0, 1)")]
    InvalidAlpha(f64),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// `n x p` sample with its correlation matrix computed once up front.
#[derive(Clone, Debug)]
pub struct GaussianData<T: Scalar> {
    n: usize,
    p: usize,
    rows: Vec<T>,
    correlation: Vec<T>,
    names: Option<Vec<String>>,
}

impl<T: Scalar> GaussianData<T> {
    /// Builds from row-major values (`rows.len() == n * p`).
    pub fn from_rows(n: usize, p: usize, rows: Vec<T>) -> Result<Self, DataError> {
        if n == 0 {
            return Err(DataError::Empty);
        }
        assert_eq!(rows.len(), n * p, "row-major buffer must hold n * p values");
        let correlation = correlation_matrix(n, p, &rows)?;
        Ok(GaussianData {
            n,
            p,
            rows,
            correlation,
            names: None,
        })
    }

    pub fn with_names(mut self, names: Vec<String>) -> Self {
        assert_eq!(names.len(), self.p);
        self.names = Some(names);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn value(&self, row: usize, col: usize) -> T {
        self.rows[row * self.p + col]
    }

    pub fn rows(&self) -> &[T] {
        &self.rows
    }

    pub fn correlation(&self, i: usize, j: usize) -> T {
        self.correlation[i * self.p + j]
    }

    pub fn correlation_matrix(&self) -> &[T] {
        &self.correlation
    }

    /// Reads CSV with `n` rows of `p` numeric columns. A first row that does
    /// not parse as numbers is taken as a header of column names.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self, DataError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut names = None;
        let mut values = Vec::new();
        let mut p = None;
        let mut n = 0;
        for (idx, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let parsed: Result<Vec<f64>, usize> = rec
                .iter()
                .enumerate()
                .map(|(c, f)| f.parse::<f64>().map_err(|_| c))
                .collect();
            let row = match parsed {
                Ok(row) => row,
                Err(_) if idx == 0 => {
                    names = Some(rec.iter().map(str::to_string).collect::<Vec<_>>());
                    p = Some(rec.len());
                    continue;
                }
                Err(col) => {
                    return Err(DataError::Parse {
                        row: idx + 1,
                        col: col + 1,
                        value: rec[col].to_string(),
                    })
                }
            };
            let expected = *p.get_or_insert(row.len());
            if row.len() != expected {
                return Err(DataError::Ragged {
                    row: idx + 1,
                    got: row.len(),
                    expected,
                });
            }
            values.extend(row.into_iter().map(T::lit));
            n += 1;
        }
        let data = GaussianData::from_rows(n, p.unwrap_or(0), values)?;
        Ok(match names {
            Some(names) => data.with_names(names),
            None => data,
        })
    }

    /// Writes CSV; values use the shortest representation that parses back
    /// to the same number.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), DataError> {
        let mut w = csv::Writer::from_writer(writer);
        if let Some(names) = &self.names {
            w.write_record(names)?;
        }
        for r in 0..self.n {
            w.write_record((0..self.p).map(|c| self.value(r, c).to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

fn correlation_matrix<T: Scalar>(n: usize, p: usize, rows: &[T]) -> Result<Vec<T>, DataError> {
    let mut mean = vec![0.0f64; p];
    for r in 0..n {
        for c in 0..p {
            mean[c] += rows[r * p + c].as_f64();
        }
    }
    for m in mean.iter_mut() {
        *m /= n as f64;
    }
    let mut cov = vec![0.0f64; p * p];
    let mut centered = vec![0.0f64; p];
    for r in 0..n {
        for c in 0..p {
            centered[c] = rows[r * p + c].as_f64() - mean[c];
        }
        for i in 0..p {
            let ci = centered[i];
            for j in i..p {
                cov[i * p + j] += ci * centered[j];
            }
        }
    }
    let sd: Vec<f64> = (0..p).map(|i| cov[i * p + i].sqrt()).collect();
    if let Some(c) = sd.iter().position(|&s| !(s > 0.0)) {
        return Err(DataError::ZeroVariance(c));
    }
    let mut corr = vec![T::zero(); p * p];
    for i in 0..p {
        corr[i * p + i] = T::one();
        for j in (i + 1)..p {
            let r = T::lit(cov[i * p + j] / (sd[i] * sd[j]));
            corr[i * p + j] = r;
            corr[j * p + i] = r;
        }
    }
    Ok(corr)
}

/// Sample partial correlation of `u` and `v` given `s`, read off the inverse
/// of the correlation submatrix over `{u, v} ∪ s`.
pub fn partial_correlation<T: Scalar>(
    data: &GaussianData<T>,
    u: VertexId,
    v: VertexId,
    s: &[VertexId],
) -> Result<T, CiError> {
    if s.is_empty() {
        return Ok(data.correlation(u.0, v.0));
    }
    let idx: Vec<usize> = [u.0, v.0].into_iter().chain(s.iter().map(|x| x.0)).collect();
    let k = idx.len();
    let mut sub = Vec::with_capacity(k * k);
    for &i in &idx {
        for &j in &idx {
            sub.push(data.correlation(i, j));
        }
    }
    let tol = T::lit(SINGULAR_TOL).max(T::epsilon() * T::lit(64.0));
    let prec = linalg::invert(&sub, k, tol).ok_or_else(|| {
        CiError::SingularSubmatrix(idx.iter().copied().map(VertexId).collect())
    })?;
    let denom = (prec[0] * prec[k + 1]).sqrt();
    if !(denom > T::zero()) {
        return Err(CiError::SingularSubmatrix(idx.into_iter().map(VertexId).collect()));
    }
    Ok(-prec[1] / denom)
}

/// Two-sided p-value of the Fisher-z test for partial correlation `r`
/// estimated from `n` samples with a conditioning set of size `cond`.
pub fn fisher_z_p_value(r: f64, n: usize, cond: usize) -> Result<f64, CiError> {
    if n < cond + 4 {
        return Err(CiError::InsufficientSamples { n, cond });
    }
    let r = r.clamp(-1.0 + R_CLAMP, 1.0 - R_CLAMP);
    let z = 0.5 * ((1.0 + r) / (1.0 - r)).ln();
    let stat = ((n - cond - 3) as f64).sqrt() * z.abs();
    // 2 (1 - Φ(stat)) = erfc(stat / √2)
    Ok(libm::erfc(stat / std::f64::consts::SQRT_2).clamp(0.0, 1.0))
}

/// Fisher-z conditional-independence test at significance level `alpha`.
#[derive(Debug)]
pub struct GaussCiTest<T: Scalar> {
    data: GaussianData<T>,
    alpha: f64,
    count: QueryCounter,
}

impl<T: Scalar> GaussCiTest<T> {
    pub fn new(data: GaussianData<T>, alpha: f64) -> Result<Self, DataError> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(DataError::InvalidAlpha(alpha));
        }
        Ok(GaussCiTest {
            data,
            alpha,
            count: QueryCounter::default(),
        })
    }

    pub fn data(&self) -> &GaussianData<T> {
        &self.data
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

impl<T: Scalar> CiOracle for GaussCiTest<T> {
    fn num_vars(&self) -> usize {
        self.data.p()
    }

    fn query(&self, u: VertexId, v: VertexId, s: &[VertexId]) -> Result<CiResult, CiError> {
        self.count.bump();
        validate_query(self.data.p(), u, v, s)?;
        // canonical argument order keeps the answer bit-identical under swaps
        let (a, b) = (u.min(v), u.max(v));
        let mut cond = s.to_vec();
        cond.sort();
        let r = partial_correlation(&self.data, a, b, &cond)?;
        let p_value = fisher_z_p_value(r.as_f64(), self.data.n(), cond.len())?;
        Ok(CiResult {
            independent: p_value > self.alpha,
            p_value: Some(p_value),
        })
    }

    fn test_count(&self) -> u64 {
        self.count.get()
    }
}
