//! Max-plus scalar, vector and matrix arithmetic, Hilbert's projective
//! metric, tropical hyperplanes and sectors, cone membership via
//! residuation.

use crate::{Result, TropError};
use std::fmt;

/// A value of the max-plus semifield: a real number or -infinity.
///
/// The representation wraps an `f64` that is either finite or
/// `f64::NEG_INFINITY`; `NaN` and `+inf` are rejected at construction, so
/// generic arithmetic can never silently apply the `(-inf) - (-inf)`
/// convention. That convention only exists inside the hyperplane-distance
/// routines, where it is spelled out explicitly.
#[derive(Clone, Copy, PartialEq, PartialOrd)]
pub struct ExtendedReal(f64);

impl ExtendedReal {
    pub const BOTTOM: ExtendedReal = ExtendedReal(f64::NEG_INFINITY);

    pub fn new(v: f64) -> Self {
        assert!(!v.is_nan() && v != f64::INFINITY, "not in Rmax: {v}");
        ExtendedReal(v)
    }

    pub fn finite(v: f64) -> Self {
        assert!(v.is_finite(), "expected a finite value, got {v}");
        ExtendedReal(v)
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn is_bottom(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Tropical multiplication (ordinary addition, -inf absorbing).
    pub fn plus(self, other: ExtendedReal) -> ExtendedReal {
        ExtendedReal(self.0 + other.0)
    }

    /// Tropical addition (maximum).
    pub fn max(self, other: ExtendedReal) -> ExtendedReal {
        ExtendedReal(self.0.max(other.0))
    }

    pub fn min(self, other: ExtendedReal) -> ExtendedReal {
        ExtendedReal(self.0.min(other.0))
    }
}

impl From<f64> for ExtendedReal {
    fn from(v: f64) -> Self {
        ExtendedReal::new(v)
    }
}

impl fmt::Debug for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_bottom() {
            write!(f, "-inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A vector over the max-plus semifield.
#[derive(Clone, PartialEq)]
pub struct TropVector(Vec<ExtendedReal>);

impl TropVector {
    pub fn new(entries: Vec<ExtendedReal>) -> Self {
        TropVector(entries)
    }

    pub fn from_f64(entries: &[f64]) -> Self {
        TropVector(entries.iter().map(|&v| ExtendedReal::new(v)).collect())
    }

    pub fn bottom(n: usize) -> Self {
        TropVector(vec![ExtendedReal::BOTTOM; n])
    }

    pub fn zeros(n: usize) -> Self {
        TropVector(vec![ExtendedReal::new(0.0); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[ExtendedReal] {
        &self.0
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.0[i].is_finite()).collect()
    }

    pub fn is_bot(&self) -> bool {
        self.0.iter().all(|v| v.is_bottom())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// max_i x_i, or -inf for BOT.
    pub fn top(&self) -> ExtendedReal {
        self.0
            .iter()
            .copied()
            .fold(ExtendedReal::BOTTOM, ExtendedReal::max)
    }

    /// min_i x_i.
    pub fn bot(&self) -> ExtendedReal {
        self.0
            .iter()
            .copied()
            .fold(ExtendedReal::new(0.0).plus(self.top()), ExtendedReal::min)
    }

    /// Hilbert seminorm: top - bot, 0 for BOT; +inf if the support is proper.
    pub fn hilbert_seminorm(&self) -> f64 {
        if self.is_bot() {
            return 0.0;
        }
        let top = self.top().value();
        let bot = self.0.iter().map(|v| v.0).fold(f64::INFINITY, f64::min);
        if bot == f64::NEG_INFINITY {
            f64::INFINITY
        } else {
            top - bot
        }
    }

    /// Adds a scalar to every entry.
    pub fn shift(&self, alpha: f64) -> TropVector {
        TropVector(self.0.iter().map(|v| v.plus(ExtendedReal::new(alpha))).collect())
    }

    /// Entrywise maximum.
    pub fn join(&self, other: &TropVector) -> TropVector {
        assert_eq!(self.len(), other.len());
        TropVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| a.max(b))
                .collect(),
        )
    }

    /// Entrywise minimum.
    pub fn meet(&self, other: &TropVector) -> TropVector {
        assert_eq!(self.len(), other.len());
        TropVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| a.min(b))
                .collect(),
        )
    }

    pub fn le(&self, other: &TropVector) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a.0 <= b.0)
    }

    /// Canonical projective representative: the maximal finite entry is
    /// shifted to 0. BOT is returned unchanged.
    pub fn canonicalize(&self) -> TropVector {
        let top = self.top();
        if top.is_bottom() {
            self.clone()
        } else {
            self.shift(-top.value())
        }
    }

    /// True when both vectors have the same support and agree up to an
    /// additive constant (within `tol`) on it.
    pub fn projectively_eq(&self, other: &TropVector, tol: f64) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let a = self.canonicalize();
        let b = other.canonicalize();
        a.0.iter().zip(&b.0).all(|(x, y)| {
            (x.is_bottom() && y.is_bottom()) || (x.0 - y.0).abs() <= tol
        })
    }
}

impl std::ops::Index<usize> for TropVector {
    type Output = ExtendedReal;
    fn index(&self, i: usize) -> &ExtendedReal {
        &self.0[i]
    }
}

impl fmt::Debug for TropVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// A matrix over the max-plus semifield with its finite support cached.
#[derive(Clone, PartialEq)]
pub struct TropMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<ExtendedReal>, // row-major
    support: Vec<(usize, usize)>,
}

impl TropMatrix {
    pub fn new(nrows: usize, ncols: usize, data: Vec<ExtendedReal>) -> Self {
        assert_eq!(data.len(), nrows * ncols);
        let support = (0..nrows)
            .flat_map(|i| (0..ncols).map(move |k| (i, k)))
            .filter(|&(i, k)| data[i * ncols + k].is_finite())
            .collect();
        TropMatrix {
            nrows,
            ncols,
            data,
            support,
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let nrows = rows.len();
        let ncols = if nrows == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(nrows * ncols);
        for row in rows {
            assert_eq!(row.len(), ncols, "ragged rows");
            data.extend(row.iter().map(|&v| ExtendedReal::new(v)));
        }
        TropMatrix::new(nrows, ncols, data)
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![ExtendedReal::BOTTOM; n * n];
        for i in 0..n {
            data[i * n + i] = ExtendedReal::new(0.0);
        }
        TropMatrix::new(n, n, data)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn get(&self, i: usize, k: usize) -> ExtendedReal {
        self.data[i * self.ncols + k]
    }

    /// Finite support E = {(i,k) : V_ik != -inf}, in row-major order.
    pub fn support(&self) -> &[(usize, usize)] {
        &self.support
    }

    pub fn column(&self, k: usize) -> TropVector {
        TropVector((0..self.nrows).map(|i| self.get(i, k)).collect())
    }

    pub fn columns(&self) -> impl Iterator<Item = TropVector> + '_ {
        (0..self.ncols).map(|k| self.column(k))
    }

    /// Keeps the columns listed in `cols` (in the given order).
    pub fn select_columns(&self, cols: &[usize]) -> TropMatrix {
        let mut data = Vec::with_capacity(self.nrows * cols.len());
        for i in 0..self.nrows {
            for &k in cols {
                data.push(self.get(i, k));
            }
        }
        TropMatrix::new(self.nrows, cols.len(), data)
    }

    pub fn row_is_bot(&self, i: usize) -> bool {
        (0..self.ncols).all(|k| self.get(i, k).is_bottom())
    }

    pub fn col_is_bot(&self, k: usize) -> bool {
        (0..self.nrows).all(|i| self.get(i, k).is_bottom())
    }

    /// Checks that no row and no column is identically -inf.
    pub fn validate(&self) -> Result<()> {
        for i in 0..self.nrows {
            if self.row_is_bot(i) {
                return Err(TropError::Validation(format!(
                    "row {} is identically -inf",
                    i + 1
                )));
            }
        }
        for k in 0..self.ncols {
            if self.col_is_bot(k) {
                return Err(TropError::Validation(format!(
                    "column {} is identically -inf",
                    k + 1
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Debug for TropMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "TropMatrix {}x{} [", self.nrows, self.ncols)?;
        for i in 0..self.nrows {
            write!(f, "  ")?;
            for k in 0..self.ncols {
                write!(f, "{:>8} ", format!("{}", self.get(i, k)))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// A tropical hyperplane, plain or signed, with a canonical projective
/// parameter vector.
#[derive(Clone, Debug)]
pub struct Hyperplane {
    pub param: TropVector,
    pub kind: HyperplaneKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum HyperplaneKind {
    Plain,
    Signed { pos: Vec<usize>, neg: Vec<usize> },
}

impl Hyperplane {
    pub fn plain(a: TropVector) -> Result<Self> {
        if a.is_bot() {
            return Err(TropError::InvalidArgument(
                "hyperplane parameter must not be identically -inf".into(),
            ));
        }
        Ok(Hyperplane {
            param: a.canonicalize(),
            kind: HyperplaneKind::Plain,
        })
    }

    pub fn signed(a: TropVector, pos: Vec<usize>, neg: Vec<usize>) -> Result<Self> {
        validate_partition(&pos, &neg, a.len())?;
        if a.is_bot() {
            return Err(TropError::InvalidArgument(
                "hyperplane parameter must not be identically -inf".into(),
            ));
        }
        Ok(Hyperplane {
            param: a.canonicalize(),
            kind: HyperplaneKind::Signed { pos, neg },
        })
    }
}

pub(crate) fn validate_partition(pos: &[usize], neg: &[usize], n: usize) -> Result<()> {
    if pos.is_empty() || neg.is_empty() {
        return Err(TropError::InvalidArgument(
            "both index classes of a signed hyperplane must be nonempty".into(),
        ));
    }
    let mut seen = vec![0u8; n];
    for &i in pos.iter().chain(neg) {
        if i >= n {
            return Err(TropError::InvalidArgument(format!(
                "index {} out of range for dimension {}",
                i + 1,
                n
            )));
        }
        seen[i] += 1;
    }
    if seen.iter().any(|&c| c != 1) {
        return Err(TropError::InvalidArgument(
            "index classes must partition the coordinate set".into(),
        ));
    }
    Ok(())
}

fn check_len(len: usize, expected: usize) -> Result<()> {
    if len != expected {
        Err(TropError::DimensionMismatch {
            expected,
            got: len,
        })
    } else {
        Ok(())
    }
}

/// Hilbert's projective distance between two vectors.
///
/// Returns 0 when both are BOT, +inf when the supports differ, and
/// otherwise `max_i (x_i - y_i) - min_i (x_i - y_i)` over the common
/// support.
pub fn hilbert_distance(x: &TropVector, y: &TropVector) -> Result<f64> {
    check_len(y.len(), x.len())?;
    let sx = x.support();
    let sy = y.support();
    if sx.is_empty() && sy.is_empty() {
        return Ok(0.0);
    }
    if sx != sy {
        return Ok(f64::INFINITY);
    }
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    for &i in &sx {
        let d = x[i].value() - y[i].value();
        hi = hi.max(d);
        lo = lo.min(d);
    }
    Ok(hi - lo)
}

/// Max-plus matrix-vector product: `(Vx)_i = max_k (V_ik + x_k)`.
pub fn trop_matvec(v: &TropMatrix, x: &TropVector) -> Result<TropVector> {
    check_len(x.len(), v.ncols())?;
    let mut out = Vec::with_capacity(v.nrows());
    for i in 0..v.nrows() {
        let mut acc = ExtendedReal::BOTTOM;
        for k in 0..v.ncols() {
            acc = acc.max(v.get(i, k).plus(x[k]));
        }
        out.push(acc);
    }
    Ok(TropVector::new(out))
}

/// Residuated (adjoint) product: `(V# y)_j = min_i (-V_ij + y_i)`, with the
/// convention `-(-inf) + y_i = +inf`, so rows where V_ij = -inf are skipped.
///
/// Satisfies `Vx <= y  iff  x <= V# y`. The result stays in Rmax as long
/// as no column of V is identically -inf.
pub fn adjoint_apply(v: &TropMatrix, y: &TropVector) -> Result<TropVector> {
    check_len(y.len(), v.nrows())?;
    let mut out = Vec::with_capacity(v.ncols());
    for j in 0..v.ncols() {
        let mut acc = f64::INFINITY;
        for i in 0..v.nrows() {
            let vij = v.get(i, j);
            if vij.is_finite() {
                acc = acc.min(y[i].value() - vij.value());
            }
        }
        if acc == f64::INFINITY {
            return Err(TropError::Validation(format!(
                "column {} is identically -inf; the adjoint leaves Rmax",
                j + 1
            )));
        }
        out.push(ExtendedReal::new(acc));
    }
    Ok(TropVector::new(out))
}

/// Projection of `x` onto the column space of `V`: `V (V# x)`.
///
/// The result is the greatest element of Col(V) below x, and realizes the
/// Hilbert distance from x to Col(V).
pub fn cone_project(v: &TropMatrix, x: &TropVector) -> Result<TropVector> {
    v.validate()?;
    let z = adjoint_apply(v, x)?;
    trop_matvec(v, &z)
}

/// Hilbert distance from a point to the tropical hyperplane with
/// parameter `a`: largest `x_i + a_i` minus the second largest, with the
/// convention `(-inf) - (-inf) = 0`.
pub fn hyperplane_distance(x: &TropVector, a: &TropVector) -> Result<f64> {
    check_len(a.len(), x.len())?;
    if a.is_bot() {
        return Err(TropError::InvalidArgument(
            "hyperplane parameter must not be identically -inf".into(),
        ));
    }
    let n = x.len();
    let mut best = f64::NEG_INFINITY;
    let mut second = f64::NEG_INFINITY;
    for i in 0..n {
        let s = x[i].plus(a[i]).value();
        if s > best {
            second = best;
            best = s;
        } else if s > second {
            second = s;
        }
    }
    if best == f64::NEG_INFINITY {
        // max of x + a is -inf: x lies on the hyperplane.
        return Ok(0.0);
    }
    if second == f64::NEG_INFINITY {
        return Ok(f64::INFINITY);
    }
    Ok(best - second)
}

/// Projection onto the signed hyperplane H^{IJ}_a together with the
/// Hilbert distance, which equals
/// `|max_{i in I}(x_i+a_i) - max_{j in J}(x_j+a_j)|` (0 when both maxima
/// are -inf).
pub fn signed_project_and_distance(
    x: &TropVector,
    a: &TropVector,
    pos: &[usize],
    neg: &[usize],
) -> Result<(TropVector, f64)> {
    let n = x.len();
    check_len(a.len(), n)?;
    validate_partition(pos, neg, n)?;
    if a.is_bot() {
        return Err(TropError::InvalidArgument(
            "hyperplane parameter must not be identically -inf".into(),
        ));
    }
    let class_max = |idx: &[usize]| -> ExtendedReal {
        idx.iter()
            .map(|&i| x[i].plus(a[i]))
            .fold(ExtendedReal::BOTTOM, ExtendedReal::max)
    };
    let max_pos = class_max(pos);
    let max_neg = class_max(neg);

    let mut proj = x.entries().to_vec();
    for &l in pos {
        if a[l].is_finite() {
            proj[l] = proj[l].min(max_neg.plus(ExtendedReal::new(-a[l].value())));
        }
    }
    for &l in neg {
        if a[l].is_finite() {
            proj[l] = proj[l].min(max_pos.plus(ExtendedReal::new(-a[l].value())));
        }
    }

    let dist = if max_pos.is_bottom() && max_neg.is_bottom() {
        0.0
    } else if max_pos.is_bottom() || max_neg.is_bottom() {
        f64::INFINITY
    } else {
        (max_pos.value() - max_neg.value()).abs()
    };
    Ok((TropVector::new(proj), dist))
}

/// All indices at which `x + a` attains its maximum (membership of x in
/// the sectors S_i(a) of the hyperplane with finite parameter a).
pub fn sector_index(x: &TropVector, a: &TropVector) -> Result<Vec<usize>> {
    check_len(a.len(), x.len())?;
    if !a.is_finite() {
        return Err(TropError::InvalidArgument(
            "sector decomposition requires a finite hyperplane parameter".into(),
        ));
    }
    let top = (0..x.len())
        .map(|i| x[i].plus(a[i]))
        .fold(ExtendedReal::BOTTOM, ExtendedReal::max);
    Ok((0..x.len())
        .filter(|&i| x[i].plus(a[i]) == top)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitLcg;

    pub(crate) fn v9() -> TropMatrix {
        TropMatrix::from_rows(&[
            vec![-3.0, 0.0, 0.0, 1.0, 1.0, -1.0, 0.0, 0.0, -1.0],
            vec![0.0, -3.0, 0.0, 0.0, -1.0, 1.0, 1.0, -1.0, 0.0],
            vec![-1.0, -1.0, -4.0, -2.0, -1.0, -1.0, -2.0, 0.0, 0.0],
        ])
    }

    fn vec3(a: f64, b: f64, c: f64) -> TropVector {
        TropVector::from_f64(&[a, b, c])
    }

    const NI: f64 = f64::NEG_INFINITY;

    #[test]
    fn hilbert_distance_basics() {
        let z = vec3(0.0, 0.0, 0.0);
        assert_eq!(hilbert_distance(&z, &z).unwrap(), 0.0);
        assert_eq!(hilbert_distance(&z, &vec3(1.0, 2.0, 3.0)).unwrap(), 2.0);
        let x = TropVector::from_f64(&[0.0, NI]);
        let y = TropVector::from_f64(&[0.0, 0.0]);
        assert_eq!(hilbert_distance(&x, &y).unwrap(), f64::INFINITY);
        assert_eq!(
            hilbert_distance(&TropVector::bottom(2), &TropVector::bottom(2)).unwrap(),
            0.0
        );
        assert!(hilbert_distance(&z, &TropVector::zeros(2)).is_err());
    }

    #[test]
    fn hilbert_distance_is_projective_metric() {
        let mut rng = SplitLcg::new(42);
        for _ in 0..200 {
            let x = TropVector::from_f64(&[rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0)]);
            let y = TropVector::from_f64(&[rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0)]);
            let z = TropVector::from_f64(&[rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0)]);
            let dxy = hilbert_distance(&x, &y).unwrap();
            let dyx = hilbert_distance(&y, &x).unwrap();
            assert!((dxy - dyx).abs() < 1e-12);
            let dxz = hilbert_distance(&x, &z).unwrap();
            let dzy = hilbert_distance(&z, &y).unwrap();
            assert!(dxy <= dxz + dzy + 1e-12);
            // invariance under additive shifts
            let shifted = y.shift(3.25);
            assert!((hilbert_distance(&x, &shifted).unwrap() - dxy).abs() < 1e-12);
        }
        // zero distance iff equal up to a constant
        let x = vec3(1.0, 2.0, 3.0);
        assert_eq!(hilbert_distance(&x, &x.shift(-7.0)).unwrap(), 0.0);
    }

    #[test]
    fn matvec_against_fig2_matrix() {
        let v = v9();
        let got = trop_matvec(&v, &TropVector::zeros(9)).unwrap();
        assert!(got.projectively_eq(&vec3(1.0, 1.0, 0.0), 0.0));
        assert_eq!(got.entries()[0].value(), 1.0);

        let bot = trop_matvec(&v, &TropVector::bottom(9)).unwrap();
        assert!(bot.is_bot());

        let id = TropMatrix::identity(3);
        let x = vec3(2.0, NI, 0.5);
        assert_eq!(trop_matvec(&id, &x).unwrap(), x);
    }

    #[test]
    fn adjoint_residuation() {
        let id = TropMatrix::identity(3);
        let y = vec3(1.0, -2.0, 0.0);
        assert_eq!(adjoint_apply(&id, &y).unwrap(), y);

        let v = TropMatrix::from_rows(&[vec![0.0, NI], vec![NI, 0.0]]);
        let y = TropVector::from_f64(&[1.0, 2.0]);
        assert_eq!(adjoint_apply(&v, &y).unwrap(), y);

        // residuation identity on a column of V9
        let v = v9();
        let c1 = v.column(0);
        let z = adjoint_apply(&v, &c1).unwrap();
        let back = trop_matvec(&v, &z).unwrap();
        assert!(hilbert_distance(&back, &c1).unwrap() < 1e-12);
    }

    #[test]
    fn cone_projection_properties() {
        let v = v9();
        // generators and their joins are fixed points
        let c3 = v.column(2);
        assert!(cone_project(&v, &c3).unwrap().projectively_eq(&c3, 1e-12));
        let join = v.column(0).join(&v.column(4));
        let p = cone_project(&v, &join).unwrap();
        assert!(p.le(&join) && join.le(&p));

        // a point outside the cone projects strictly below in coordinate 1
        let x = vec3(10.0, 0.0, 0.0);
        let p = cone_project(&v, &x).unwrap();
        assert!(p.le(&x));
        assert!(p[0].value() < x[0].value());
        // idempotent
        let pp = cone_project(&v, &p).unwrap();
        assert!(pp.le(&p) && p.le(&pp));
    }

    #[test]
    fn hyperplane_distance_formula() {
        assert_eq!(
            hyperplane_distance(&vec3(0.0, 0.0, -1.0), &vec3(0.0, 0.0, 1.0)).unwrap(),
            0.0
        );
        assert_eq!(
            hyperplane_distance(&vec3(0.0, 0.0, 0.0), &vec3(0.0, 0.0, 1.0)).unwrap(),
            1.0
        );
        let x = TropVector::from_f64(&[0.0, NI, NI]);
        assert_eq!(
            hyperplane_distance(&x, &vec3(0.0, 0.0, 0.0)).unwrap(),
            f64::INFINITY
        );
        // max of x + a identically -inf: on the hyperplane by convention
        let x = TropVector::from_f64(&[NI, NI, 0.0]);
        let a = TropVector::from_f64(&[0.0, 0.0, NI]);
        assert_eq!(hyperplane_distance(&x, &a).unwrap(), 0.0);
    }

    #[test]
    fn signed_projection_and_distance() {
        let a = vec3(0.0, 0.0, 0.0);
        let (p, d) =
            signed_project_and_distance(&vec3(2.0, 0.0, 0.0), &a, &[0], &[1, 2]).unwrap();
        assert_eq!(d, 2.0);
        assert!(p.projectively_eq(&vec3(0.0, 0.0, 0.0), 1e-12));

        // already on the hyperplane
        let x = vec3(1.0, 1.0, 0.0);
        let (p, d) = signed_project_and_distance(&x, &a, &[0], &[1, 2]).unwrap();
        assert_eq!(d, 0.0);
        assert_eq!(p, x);

        // degenerate: one side identically -inf
        let x = TropVector::from_f64(&[1.0, NI, NI]);
        let (_, d) = signed_project_and_distance(&x, &a, &[0], &[1, 2]).unwrap();
        assert_eq!(d, f64::INFINITY);

        assert!(signed_project_and_distance(&x, &a, &[0, 1], &[1, 2]).is_err());
    }

    #[test]
    fn signed_projection_lands_on_hyperplane() {
        let mut rng = SplitLcg::new(7);
        let a = vec3(0.5, -1.0, 2.0);
        for _ in 0..500 {
            let x = vec3(
                rng.uniform(-4.0, 4.0),
                rng.uniform(-4.0, 4.0),
                rng.uniform(-4.0, 4.0),
            );
            let (p, d) = signed_project_and_distance(&x, &a, &[0, 2], &[1]).unwrap();
            let mp = p[0].plus(a[0]).max(p[2].plus(a[2]));
            let mn = p[1].plus(a[1]);
            assert!((mp.value() - mn.value()).abs() < 1e-9);
            assert!((hilbert_distance(&x, &p).unwrap() - d).abs() < 1e-9);
        }
    }

    #[test]
    fn sectors() {
        let a = vec3(0.0, 0.0, 0.0);
        assert_eq!(sector_index(&vec3(1.0, 0.0, 0.0), &a).unwrap(), vec![0]);
        assert_eq!(
            sector_index(&vec3(0.0, 0.0, 0.0), &a).unwrap(),
            vec![0, 1, 2]
        );
        // column 4 of the Fig. 2 matrix lies in sector 1 of a = (0,0,1)
        let v = v9();
        let s = sector_index(&v.column(3), &vec3(0.0, 0.0, 1.0)).unwrap();
        assert!(s.contains(&0));
        let a_bad = TropVector::from_f64(&[0.0, NI, 0.0]);
        assert!(sector_index(&vec3(0.0, 0.0, 0.0), &a_bad).is_err());
    }

    #[test]
    fn zero_hyperplane_distance_iff_tie() {
        let mut rng = SplitLcg::new(11);
        for _ in 0..1000 {
            let x = vec3(
                rng.uniform(-3.0, 3.0).round(),
                rng.uniform(-3.0, 3.0).round(),
                rng.uniform(-3.0, 3.0).round(),
            );
            let a = vec3(
                rng.uniform(-3.0, 3.0).round(),
                rng.uniform(-3.0, 3.0).round(),
                rng.uniform(-3.0, 3.0).round(),
            );
            let d = hyperplane_distance(&x, &a).unwrap();
            let sums: Vec<f64> = (0..3).map(|i| x[i].plus(a[i]).value()).collect();
            let top = sums.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let ties = sums.iter().filter(|&&s| s == top).count();
            assert_eq!(d == 0.0, ties >= 2 || top == f64::NEG_INFINITY);
        }
    }
}
