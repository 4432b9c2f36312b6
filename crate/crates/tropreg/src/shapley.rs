//! Shapley operators of the mean payoff games associated with a point
//! configuration: the plain operator T_V, the signed operator T^{IJ}, the
//! typed operator, one-player restrictions, and policy extraction.

use crate::tropical::{validate_partition, ExtendedReal, TropMatrix, TropVector};
use crate::{Result, TropError};

/// Common interface of the three operator shapes: an order-preserving,
/// additively homogeneous self-map of Rmax^n.
pub trait ShapleyOperator {
    fn dim(&self) -> usize;
    fn eval(&self, x: &TropVector) -> TropVector;
}

/// The operator
/// `T_i(x) = min_{k:(i,k) in E} [ -V_ik + max_{j != i} (V_jk + x_j) ]`
/// whose eigenvalue is minus the inner radius of Col(V).
#[derive(Clone, Debug)]
pub struct PlainOperator {
    v: TropMatrix,
}

/// Per-column statistics used by the fast evaluation: the maximum of
/// `V_jk + x_j` over rows, the smallest row attaining it, and the maximum
/// over the remaining rows.
struct ColumnStats {
    max: f64,
    argmax: usize,
    second: f64,
}

fn column_stats(v: &TropMatrix, k: usize, x: &TropVector, ops: &mut u64) -> ColumnStats {
    let mut st = ColumnStats {
        max: f64::NEG_INFINITY,
        argmax: usize::MAX,
        second: f64::NEG_INFINITY,
    };
    for j in 0..v.nrows() {
        let vjk = v.get(j, k);
        if vjk.is_bottom() {
            continue;
        }
        *ops += 1;
        let s = vjk.value() + x[j].value();
        if s > st.max {
            st.second = st.max;
            st.max = s;
            st.argmax = j;
        } else if s > st.second {
            st.second = s;
        }
    }
    if st.max == f64::NEG_INFINITY {
        st.argmax = usize::MAX;
    }
    st
}

impl PlainOperator {
    pub fn new(v: TropMatrix) -> Result<Self> {
        v.validate()?;
        Ok(PlainOperator { v })
    }

    pub fn matrix(&self) -> &TropMatrix {
        &self.v
    }

    /// Fast evaluation in O(|E|) arithmetic operations, with the number
    /// of additions/comparisons on weights reported in `ops`.
    pub fn eval_counted(&self, x: &TropVector, ops: &mut u64) -> TropVector {
        assert_eq!(x.len(), self.v.nrows());
        let n = self.v.nrows();
        let p = self.v.ncols();
        let stats: Vec<ColumnStats> = (0..p).map(|k| column_stats(&self.v, k, x, ops)).collect();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = f64::INFINITY;
            for k in 0..p {
                let vik = self.v.get(i, k);
                if vik.is_bottom() {
                    continue;
                }
                *ops += 1;
                let inner = if stats[k].argmax == i {
                    stats[k].second
                } else {
                    stats[k].max
                };
                acc = acc.min(inner - vik.value());
            }
            debug_assert!(acc < f64::INFINITY, "row {i} has no finite entry");
            out.push(ExtendedReal::new(acc));
        }
        TropVector::new(out)
    }

    /// Reference O(n^2 p) evaluation by the defining formula.
    pub fn eval_naive(&self, x: &TropVector) -> TropVector {
        assert_eq!(x.len(), self.v.nrows());
        let n = self.v.nrows();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = f64::INFINITY;
            for k in 0..self.v.ncols() {
                let vik = self.v.get(i, k);
                if vik.is_bottom() {
                    continue;
                }
                let mut inner = f64::NEG_INFINITY;
                for j in 0..n {
                    if j != i {
                        inner = inner.max(self.v.get(j, k).plus(x[j]).value());
                    }
                }
                acc = acc.min(inner - vik.value());
            }
            out.push(ExtendedReal::new(acc));
        }
        TropVector::new(out)
    }

    /// Restriction to a Min policy:
    /// `T^sigma_i(x) = -V_{i sigma(i)} + max_{j != i} (V_{j sigma(i)} + x_j)`.
    pub fn restrict_min(&self, sigma: &MinPolicy) -> Result<OnePlayerOperator> {
        sigma.validate(&self.v)?;
        Ok(OnePlayerOperator {
            m: self.min_linearization(sigma),
        })
    }

    /// Max-plus linearization of `T^sigma`: the n x n matrix
    /// `M_ij = -V_{i sigma(i)} + V_{j sigma(i)}` for j != i.
    pub fn min_linearization(&self, sigma: &MinPolicy) -> TropMatrix {
        let n = self.v.nrows();
        let mut data = vec![ExtendedReal::BOTTOM; n * n];
        for i in 0..n {
            let k = sigma.0[i];
            let vik = self.v.get(i, k).value();
            for j in 0..n {
                if j != i {
                    let vjk = self.v.get(j, k);
                    if vjk.is_finite() {
                        data[i * n + j] = ExtendedReal::new(vjk.value() - vik);
                    }
                }
            }
        }
        TropMatrix::new(n, n, data)
    }

    /// The Min policy achieving the outer minimum at `x`, smallest column
    /// index on ties, so that `T^sigma(x) = T(x)`.
    pub fn extract_min_policy(&self, x: &TropVector) -> Result<MinPolicy> {
        let n = self.v.nrows();
        let mut ops = 0u64;
        let stats: Vec<ColumnStats> = (0..self.v.ncols())
            .map(|k| column_stats(&self.v, k, x, &mut ops))
            .collect();
        let mut sigma = Vec::with_capacity(n);
        for i in 0..n {
            let mut best = f64::INFINITY;
            let mut best_k = None;
            for k in 0..self.v.ncols() {
                let vik = self.v.get(i, k);
                if vik.is_bottom() {
                    continue;
                }
                let inner = if stats[k].argmax == i {
                    stats[k].second
                } else {
                    stats[k].max
                };
                let val = inner - vik.value();
                if val < best {
                    best = val;
                    best_k = Some(k);
                }
            }
            sigma.push(best_k.ok_or_else(|| {
                TropError::Validation(format!("row {} has no finite entry", i + 1))
            })?);
        }
        Ok(MinPolicy(sigma))
    }

    /// The Max policy achieving every inner maximum at `x` (smallest row
    /// index on ties): `tau(i,k)` is defined for each edge `(i,k)` of E
    /// whose inner maximum is finite.
    pub fn extract_max_policy(&self, x: &TropVector) -> MaxPolicy {
        let n = self.v.nrows();
        let p = self.v.ncols();
        let mut choice = vec![None; n * p];
        for k in 0..p {
            for i in 0..n {
                if self.v.get(i, k).is_bottom() {
                    continue;
                }
                let mut best = f64::NEG_INFINITY;
                let mut best_j = None;
                for j in 0..n {
                    if j == i {
                        continue;
                    }
                    let s = self.v.get(j, k).plus(x[j]);
                    if s.is_finite() && s.value() > best {
                        best = s.value();
                        best_j = Some(j);
                    }
                }
                choice[i * p + k] = best_j;
            }
        }
        MaxPolicy { ncols: p, choice }
    }

    /// Min-plus linearization of the restriction to a Max policy:
    /// `N_ij = min {-V_ik + V_jk : (i,k) in E, tau(i,k) = j}`, entries
    /// +inf (represented as None) when no edge selects j.
    pub fn max_linearization(&self, tau: &MaxPolicy) -> Vec<Vec<Option<f64>>> {
        let n = self.v.nrows();
        let p = self.v.ncols();
        let mut nmat = vec![vec![None::<f64>; n]; n];
        for i in 0..n {
            for k in 0..p {
                let vik = self.v.get(i, k);
                if vik.is_bottom() {
                    continue;
                }
                if let Some(j) = tau.choice[i * p + k] {
                    let w = self.v.get(j, k).value() - vik.value();
                    let cell = &mut nmat[i][j];
                    *cell = Some(cell.map_or(w, |c: f64| c.min(w)));
                }
            }
        }
        nmat
    }
}

impl ShapleyOperator for PlainOperator {
    fn dim(&self) -> usize {
        self.v.nrows()
    }

    fn eval(&self, x: &TropVector) -> TropVector {
        let mut ops = 0;
        self.eval_counted(x, &mut ops)
    }
}

/// A stationary policy of player Min: one column per row, feasible when
/// `(i, sigma(i))` is in the finite support.
#[derive(Clone, Debug, PartialEq)]
pub struct MinPolicy(pub Vec<usize>);

impl MinPolicy {
    pub fn validate(&self, v: &TropMatrix) -> Result<()> {
        if self.0.len() != v.nrows() {
            return Err(TropError::DimensionMismatch {
                expected: v.nrows(),
                got: self.0.len(),
            });
        }
        for (i, &k) in self.0.iter().enumerate() {
            if k >= v.ncols() || v.get(i, k).is_bottom() {
                return Err(TropError::InvalidArgument(format!(
                    "policy selects column {} at row {} outside the support",
                    k + 1,
                    i + 1
                )));
            }
        }
        Ok(())
    }
}

/// A stationary policy of player Max: for each edge (i,k) of the game
/// graph, the row j != i chosen as the response.
#[derive(Clone, Debug)]
pub struct MaxPolicy {
    ncols: usize,
    choice: Vec<Option<usize>>, // indexed i * ncols + k
}

impl MaxPolicy {
    pub fn get(&self, i: usize, k: usize) -> Option<usize> {
        self.choice[i * self.ncols + k]
    }
}

/// One-player operator obtained by fixing a Min policy; a max-plus linear
/// map `x -> M x` on the off-diagonal linearization M.
#[derive(Clone, Debug)]
pub struct OnePlayerOperator {
    m: TropMatrix,
}

impl OnePlayerOperator {
    pub fn linearization(&self) -> &TropMatrix {
        &self.m
    }
}

impl ShapleyOperator for OnePlayerOperator {
    fn dim(&self) -> usize {
        self.m.nrows()
    }

    fn eval(&self, x: &TropVector) -> TropVector {
        crate::tropical::trop_matvec(&self.m, x).expect("dimension checked")
    }
}

/// The operator of signed regression: for `l` in I,
/// `T_l(x) = min_{k: V_lk finite} [ -V_lk + max_{j in J} (V_jk + x_j) ]`,
/// and symmetrically for `l` in J.
#[derive(Clone, Debug)]
pub struct SignedOperator {
    v: TropMatrix,
    pos: Vec<usize>,
    neg: Vec<usize>,
}

impl SignedOperator {
    pub fn new(v: TropMatrix, pos: Vec<usize>, neg: Vec<usize>) -> Result<Self> {
        validate_partition(&pos, &neg, v.nrows())?;
        for l in 0..v.nrows() {
            if v.row_is_bot(l) {
                return Err(TropError::Validation(format!(
                    "no point has a finite coordinate {}",
                    l + 1
                )));
            }
        }
        Ok(SignedOperator { v, pos, neg })
    }

    pub fn matrix(&self) -> &TropMatrix {
        &self.v
    }

    pub fn partition(&self) -> (&[usize], &[usize]) {
        (&self.pos, &self.neg)
    }
}

impl ShapleyOperator for SignedOperator {
    fn dim(&self) -> usize {
        self.v.nrows()
    }

    fn eval(&self, x: &TropVector) -> TropVector {
        let n = self.v.nrows();
        let mut out = Vec::with_capacity(n);
        for l in 0..n {
            let opposite: &[usize] = if self.pos.contains(&l) {
                &self.neg
            } else {
                &self.pos
            };
            let mut acc = f64::INFINITY;
            for k in 0..self.v.ncols() {
                let vlk = self.v.get(l, k);
                if vlk.is_bottom() {
                    continue;
                }
                let inner = opposite
                    .iter()
                    .map(|&j| self.v.get(j, k).plus(x[j]))
                    .fold(ExtendedReal::BOTTOM, ExtendedReal::max);
                acc = acc.min(inner.value() - vlk.value());
            }
            debug_assert!(acc < f64::INFINITY);
            out.push(ExtendedReal::new(acc));
        }
        TropVector::new(out)
    }
}

/// The typed operator: the pointwise minimum over classes i of the signed
/// operator of `H^i` built from the columns of class i.
#[derive(Clone, Debug)]
pub struct TypedOperator {
    v: TropMatrix,
    /// class of each column, values in 0..nrows
    types: Vec<usize>,
    classes: Vec<Vec<usize>>,
}

impl TypedOperator {
    pub fn new(v: TropMatrix, types: Vec<usize>) -> Result<Self> {
        let n = v.nrows();
        if types.len() != v.ncols() {
            return Err(TropError::DimensionMismatch {
                expected: v.ncols(),
                got: types.len(),
            });
        }
        let mut classes = vec![Vec::new(); n];
        for (k, &t) in types.iter().enumerate() {
            if t >= n {
                return Err(TropError::InvalidArgument(format!(
                    "column {} has type {} but there are only {} coordinates",
                    k + 1,
                    t + 1,
                    n
                )));
            }
            classes[t].push(k);
        }
        if let Some(i) = classes.iter().position(Vec::is_empty) {
            return Err(TropError::InvalidArgument(format!(
                "type class {} is empty",
                i + 1
            )));
        }
        for l in 0..n {
            if v.row_is_bot(l) {
                return Err(TropError::Validation(format!(
                    "no point has a finite coordinate {}",
                    l + 1
                )));
            }
        }
        Ok(TypedOperator { v, types, classes })
    }

    pub fn matrix(&self) -> &TropMatrix {
        &self.v
    }

    pub fn types(&self) -> &[usize] {
        &self.types
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    /// The per-class operator T^{ty,i} at coordinate l; +inf when class i
    /// offers no column with a finite l-th coordinate.
    fn per_class(&self, i: usize, l: usize, x: &TropVector) -> f64 {
        let mut acc = f64::INFINITY;
        for &k in &self.classes[i] {
            let vlk = self.v.get(l, k);
            if vlk.is_bottom() {
                continue;
            }
            let inner = if l == i {
                // max over j != i of V_jk + x_j
                (0..self.v.nrows())
                    .filter(|&j| j != i)
                    .map(|j| self.v.get(j, k).plus(x[j]))
                    .fold(ExtendedReal::BOTTOM, ExtendedReal::max)
            } else {
                self.v.get(i, k).plus(x[i])
            };
            acc = acc.min(inner.value() - vlk.value());
        }
        acc
    }
}

impl ShapleyOperator for TypedOperator {
    fn dim(&self) -> usize {
        self.v.nrows()
    }

    fn eval(&self, x: &TropVector) -> TropVector {
        let n = self.v.nrows();
        let mut out = Vec::with_capacity(n);
        for l in 0..n {
            let mut acc = f64::INFINITY;
            for i in 0..n {
                acc = acc.min(self.per_class(i, l, x));
            }
            debug_assert!(acc < f64::INFINITY, "coordinate {l} unconstrained");
            out.push(ExtendedReal::new(acc));
        }
        TropVector::new(out)
    }
}
