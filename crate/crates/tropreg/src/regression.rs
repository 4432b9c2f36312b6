//! Tropical linear regression: inner radii and maximal balls of tropical
//! cones, optimal (plain, signed, typed) regression hyperplanes, witness
//! points, simplicial supports, and the one-sided closed form.

use crate::shapley::{MinPolicy, PlainOperator, ShapleyOperator, SignedOperator, TypedOperator};
use crate::solver::{
    self, km_solve, rho_exact, round_to_rational, value_iterate, Method, SolverConfig,
};
use crate::tropical::{
    cone_project, hilbert_distance, hyperplane_distance, sector_index, signed_project_and_distance,
    ExtendedReal, TropMatrix, TropVector,
};
use crate::{Result, TropError};
use num_rational::Rational64;

fn rat_f64(q: Rational64) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// Largest Hilbert seminorm over the columns (the constant W of the
/// iteration bounds).
pub fn column_spread(v: &TropMatrix) -> f64 {
    v.columns().map(|c| c.hilbert_seminorm()).fold(0.0, f64::max)
}

#[derive(Clone, Debug)]
pub struct InradiusResult {
    /// +inf when the cone has full interior (orbit of 0 collapses)
    pub radius: f64,
    pub exact: Option<Rational64>,
    pub center: Option<TropVector>,
    pub lower: f64,
    pub upper: f64,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct RegressionResult {
    pub apex: TropVector,
    pub value: f64,
    pub exact: Option<Rational64>,
    pub lower: f64,
    pub upper: f64,
    pub ball_center: Option<TropVector>,
    pub witness_policy: Option<MinPolicy>,
    /// sector index i -> witness column
    pub witness_points: Option<Vec<usize>>,
    pub per_class_distances: Option<Vec<f64>>,
    pub iterations: usize,
    pub residual: f64,
    pub degenerate: bool,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct SignedRegressionResult {
    pub apex: TropVector,
    pub value: f64,
    pub exact: Option<Rational64>,
    pub interval_center: Option<TropVector>,
    pub interval_radius: f64,
    pub pos: Vec<usize>,
    pub neg: Vec<usize>,
    pub iterations: usize,
    pub residual: f64,
}

/// Drops identically -inf rows and columns, recording a warning per drop.
/// Returns the reduced matrix, the kept row indices, and the warnings.
fn reduce(v: &TropMatrix) -> (TropMatrix, Vec<usize>, Vec<String>) {
    let mut warnings = Vec::new();
    let rows: Vec<usize> = (0..v.nrows())
        .filter(|&i| {
            let keep = !v.row_is_bot(i);
            if !keep {
                warnings.push(format!("dropping all--inf row {}", i + 1));
            }
            keep
        })
        .collect();
    let cols: Vec<usize> = (0..v.ncols())
        .filter(|&k| {
            let keep = !v.col_is_bot(k);
            if !keep {
                warnings.push(format!("dropping all--inf column {}", k + 1));
            }
            keep
        })
        .collect();
    let mut data = Vec::with_capacity(rows.len() * cols.len());
    for &i in &rows {
        for &k in &cols {
            data.push(v.get(i, k));
        }
    }
    (TropMatrix::new(rows.len(), cols.len(), data), rows, warnings)
}

fn embed(x: &TropVector, rows: &[usize], n: usize) -> TropVector {
    let mut out = vec![ExtendedReal::BOTTOM; n];
    for (slot, &i) in rows.iter().enumerate() {
        out[i] = x[slot];
    }
    TropVector::new(out)
}

/// Generic eigenvalue solve honoring the configured method; `max_den`
/// bounds the denominator used by the rational rounding of exact mode.
fn solve_generic<T: ShapleyOperator + ?Sized>(
    t: &T,
    cfg: &SolverConfig,
    max_den: i64,
) -> Result<(f64, Option<Rational64>, Option<TropVector>, f64, f64, usize, f64)> {
    match cfg.method {
        Method::Km => {
            let c = km_solve(t, cfg)?;
            Ok((c.rho, None, c.eigenvector, c.lower, c.upper, c.iterations, c.residual))
        }
        Method::Vi => {
            let c = value_iterate(t, cfg.max_iter.min(20_000))?;
            Ok((c.rho, None, c.sub, c.lower, c.upper, c.iterations, c.residual))
        }
        Method::Exact => {
            // value iteration with doubling horizon until the bound gap
            // admits a unique rational with small denominator
            let target = 1.0 / (max_den * max_den) as f64;
            let mut k = 64;
            loop {
                let c = value_iterate(t, k)?;
                if c.rho == f64::NEG_INFINITY {
                    return Ok((f64::NEG_INFINITY, None, None, c.lower, c.upper, k, c.residual));
                }
                if c.upper - c.lower < target {
                    let q = round_to_rational(c.lower, c.upper, max_den).ok_or_else(|| {
                        TropError::NonConvergence {
                            iterations: k,
                            lower: c.lower,
                            upper: c.upper,
                        }
                    })?;
                    // refine the eigenvector by KM for the certificates
                    let eig = km_solve(t, &SolverConfig { method: Method::Km, ..cfg.clone() })
                        .ok()
                        .and_then(|km| km.eigenvector);
                    return Ok((rat_f64(q), Some(q), eig.or(c.sub), c.lower, c.upper, k, c.residual));
                }
                if k >= 1 << 20 {
                    return Err(TropError::NonConvergence {
                        iterations: k,
                        lower: c.lower,
                        upper: c.upper,
                    });
                }
                k *= 2;
            }
        }
    }
}

/// Radius (and center, when finite) of a maximal Hilbert ball inside
/// Col(V); equals -rho(T_V).
pub fn inradius(v: &TropMatrix, cfg: &SolverConfig) -> Result<InradiusResult> {
    let (vr, rows, warnings) = reduce(v);
    if vr.nrows() == 0 || vr.ncols() == 0 {
        return Err(TropError::Degenerate("no finite entries left".into()));
    }
    let t = PlainOperator::new(vr.clone())?;
    if vr.nrows() == 1 || solver::power_support(&t, vr.nrows()).is_empty() {
        return Ok(InradiusResult {
            radius: f64::INFINITY,
            exact: None,
            center: None,
            lower: f64::NEG_INFINITY,
            upper: f64::NEG_INFINITY,
            warnings,
        });
    }
    let (rho, exact, eig, lower, upper, _, _) = match cfg.method {
        Method::Exact => {
            let e = rho_exact(&t)?;
            match e.rho {
                None => {
                    return Ok(InradiusResult {
                        radius: f64::INFINITY,
                        exact: None,
                        center: None,
                        lower: f64::NEG_INFINITY,
                        upper: f64::NEG_INFINITY,
                        warnings,
                    })
                }
                Some(q) => (rat_f64(q), Some(q), e.eigenvector, rat_f64(q), rat_f64(q), 0, 0.0),
            }
        }
        _ => solve_generic(&t, cfg, vr.nrows() as i64)?,
    };
    if rho == f64::NEG_INFINITY {
        return Ok(InradiusResult {
            radius: f64::INFINITY,
            exact: None,
            center: None,
            lower,
            upper,
            warnings,
        });
    }
    // ball center = -c for a super-eigenvector c
    let center = match &eig {
        Some(u) if u.is_finite() => Some(u.clone()),
        _ => solver::construct_super_eigenvector(&t, rho).ok(),
    }
    .map(|c| {
        let neg = TropVector::from_f64(
            &(0..c.len()).map(|i| -c[i].value()).collect::<Vec<_>>(),
        )
        .canonicalize();
        embed(&neg, &rows, v.nrows())
    });
    Ok(InradiusResult {
        radius: -rho,
        exact: exact.map(|q| -q),
        center,
        lower,
        upper,
        warnings,
    })
}

/// Best plain regression hyperplane of the columns of V (strong duality:
/// optimal value = inradius, apex = sub-eigenvector of T_V).
pub fn best_hyperplane(v: &TropMatrix, cfg: &SolverConfig) -> Result<RegressionResult> {
    // a coordinate no point uses is matched exactly by the hyperplane
    // with that single finite apex entry
    if let Some(i) = (0..v.nrows()).find(|&i| v.row_is_bot(i)) {
        let mut apex = vec![ExtendedReal::BOTTOM; v.nrows()];
        apex[i] = ExtendedReal::new(0.0);
        return Ok(RegressionResult {
            apex: TropVector::new(apex),
            value: 0.0,
            exact: Some(Rational64::from_integer(0)),
            lower: 0.0,
            upper: 0.0,
            ball_center: None,
            witness_policy: None,
            witness_points: None,
            per_class_distances: None,
            iterations: 0,
            residual: 0.0,
            degenerate: false,
            warnings: vec![format!("row {} has no finite entry; value is 0", i + 1)],
        });
    }
    let (vr, rows, warnings) = reduce(v); // only columns can be dropped here
    let t = PlainOperator::new(vr.clone())?;
    let n = vr.nrows();
    if solver::power_support(&t, n).is_empty() {
        return Ok(RegressionResult {
            apex: TropVector::new({
                let mut a = vec![ExtendedReal::BOTTOM; v.nrows()];
                a[0] = ExtendedReal::new(0.0);
                a
            }),
            value: f64::INFINITY,
            exact: None,
            lower: f64::INFINITY,
            upper: f64::INFINITY,
            ball_center: None,
            witness_policy: None,
            witness_points: None,
            per_class_distances: None,
            iterations: 0,
            residual: 0.0,
            degenerate: true,
            warnings,
        });
    }
    let (rho, exact, eig, lower, upper, iterations, residual) = match cfg.method {
        Method::Exact => {
            let e = rho_exact(&t)?;
            let q = e.rho.ok_or_else(|| {
                TropError::Degenerate("every hyperplane is infinitely far".into())
            })?;
            (rat_f64(q), Some(q), e.eigenvector, rat_f64(q), rat_f64(q), 0, 0.0)
        }
        _ => solve_generic(&t, cfg, n as i64)?,
    };
    let apex_red = match eig {
        Some(u) => u,
        None => solver::construct_sub_eigenvector(&t, rho, 1e-6)?,
    };
    let apex = embed(&apex_red, &rows, v.nrows());
    // witnesses and ball center only when the apex is an (approximate)
    // eigenvector
    let ta = t.eval(&apex_red);
    let is_eigen = apex_red.is_finite()
        && (0..n).all(|i| (ta.entries()[i].value() - rho - apex_red[i].value()).abs() < 1e-6);
    let (ball_center, witness_policy, witness_points) = if is_eigen {
        let center = TropVector::from_f64(
            &(0..n).map(|i| -apex_red[i].value()).collect::<Vec<_>>(),
        )
        .canonicalize();
        let sigma = t.extract_min_policy(&apex_red)?;
        let witnesses = sigma.0.clone();
        (
            Some(embed(&center, &rows, v.nrows())),
            Some(sigma),
            Some(witnesses),
        )
    } else {
        (None, None, None)
    };
    Ok(RegressionResult {
        apex,
        value: -rho,
        exact: exact.map(|q| -q),
        lower: -upper,
        upper: -lower,
        ball_center,
        witness_policy,
        witness_points,
        per_class_distances: None,
        iterations,
        residual,
        degenerate: false,
        warnings,
    })
}

/// Witness columns of an optimal hyperplane: for each sector i, the
/// column selected by the optimal Min policy, verified to lie in S_i(a)
/// at hyperplane distance equal to the regression value.
pub fn witness_points(v: &TropMatrix, apex: &TropVector) -> Result<Vec<usize>> {
    let t = PlainOperator::new(v.clone())?;
    let ta = t.eval(apex);
    let diffs: Vec<f64> = (0..v.nrows())
        .map(|i| ta.entries()[i].value() - apex[i].value())
        .collect();
    let rho = diffs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if diffs.iter().any(|d| (d - rho).abs() > 1e-6) {
        return Err(TropError::Certificate(
            "witness extraction requires an eigenvector apex".into(),
        ));
    }
    let sigma = t.extract_min_policy(apex)?;
    for (i, &k) in sigma.0.iter().enumerate() {
        let col = v.column(k);
        let sectors = sector_index(&col, apex)?;
        if !sectors.contains(&i) {
            return Err(TropError::Certificate(format!(
                "witness column {} is not in sector {}",
                k + 1,
                i + 1
            )));
        }
        let d = hyperplane_distance(&col, apex)?;
        if (d - (-rho)).abs() > 1e-6 {
            return Err(TropError::Certificate(format!(
                "witness column {} has distance {} instead of {}",
                k + 1,
                d,
                -rho
            )));
        }
    }
    Ok(sigma.0)
}

/// Checks by sampling that the Hilbert ball B(center, r) lies in Col(V):
/// the 2n axis-perturbed extreme points must pass cone membership.
pub fn ball_in_cone(v: &TropMatrix, center: &TropVector, r: f64, tol: f64) -> Result<bool> {
    if !center.is_finite() {
        return Ok(false);
    }
    let n = center.len();
    for i in 0..n {
        for sign in [-1.0, 1.0] {
            let mut coords: Vec<f64> = (0..n).map(|j| center[j].value()).collect();
            coords[i] += sign * (r - tol).max(0.0);
            let x = TropVector::from_f64(&coords);
            let proj = cone_project(v, &x)?;
            if hilbert_distance(&x, &proj)? > 10.0 * tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The n columns spanning a simplicial cone that still contains the
/// maximal ball: the image of the optimal Min policy.
pub fn simplicial_support(v: &TropMatrix, apex: &TropVector, rho: f64) -> Result<Vec<usize>> {
    let sigma = witness_points(v, apex)?;
    let mut cols = sigma.clone();
    cols.sort_unstable();
    cols.dedup();
    if cols.len() != v.nrows() {
        return Err(TropError::Certificate(
            "optimal policy does not select n distinct columns".into(),
        ));
    }
    let sub = v.select_columns(&cols);
    let center = TropVector::from_f64(
        &(0..apex.len()).map(|i| -apex[i].value()).collect::<Vec<_>>(),
    );
    if !ball_in_cone(&sub, &center, -rho, 1e-7)? {
        return Err(TropError::Certificate(
            "maximal ball escapes the simplicial subcone".into(),
        ));
    }
    Ok(cols)
}

/// Best signed hyperplane H^{IJ}_a for the partition (pos, neg), with the
/// maximal vertical interval.
pub fn regress_signed(
    v: &TropMatrix,
    pos: &[usize],
    neg: &[usize],
    cfg: &SolverConfig,
) -> Result<SignedRegressionResult> {
    let t = SignedOperator::new(v.clone(), pos.to_vec(), neg.to_vec())?;
    let (rho, exact, eig, _, _, iterations, residual) =
        solve_generic(&t, cfg, v.nrows() as i64)?;
    let apex = match eig {
        Some(u) => u,
        None => solver::construct_sub_eigenvector(&t, rho, 1e-6)?,
    };
    let interval_center = if apex.is_finite() {
        Some(signed_interval_center(v, pos, neg, &apex))
    } else {
        None
    };
    Ok(SignedRegressionResult {
        apex,
        value: -rho,
        exact: exact.map(|q| -q),
        interval_center,
        interval_radius: -rho,
        pos: pos.to_vec(),
        neg: neg.to_vec(),
        iterations,
        residual,
    })
}

/// Center of a maximal vertical interval inside Sp(V), built from a
/// super-eigenvector u of T^{IJ}: shift each column by u, take the two
/// envelopes w^I, w^J over the optimal columns, splice them along the
/// partition, and shift back.
fn signed_interval_center(
    v: &TropMatrix,
    pos: &[usize],
    neg: &[usize],
    u: &TropVector,
) -> TropVector {
    let n = v.nrows();
    let shifted = |l: usize, k: usize| v.get(l, k).value() + u[l].value();
    // sigma(l): column achieving T^{IJ}_l at u, smallest index on ties
    let mut sigma = vec![0usize; n];
    for l in 0..n {
        let opposite: &[usize] = if pos.contains(&l) { neg } else { pos };
        let mut best = f64::INFINITY;
        for k in 0..v.ncols() {
            if v.get(l, k).is_bottom() {
                continue;
            }
            let inner = opposite
                .iter()
                .map(|&j| {
                    let vjk = v.get(j, k);
                    if vjk.is_finite() {
                        shifted(j, k)
                    } else {
                        f64::NEG_INFINITY
                    }
                })
                .fold(f64::NEG_INFINITY, f64::max);
            let val = inner - shifted(l, k);
            if val < best {
                best = val;
                sigma[l] = k;
            }
        }
    }
    let envelope = |class: &[usize]| -> Vec<f64> {
        (0..n)
            .map(|l| {
                class
                    .iter()
                    .map(|&i| {
                        let vlk = v.get(l, sigma[i]);
                        if vlk.is_finite() {
                            shifted(l, sigma[i]) - shifted(i, sigma[i])
                        } else {
                            f64::NEG_INFINITY
                        }
                    })
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect()
    };
    let wi = envelope(pos);
    let wj = envelope(neg);
    let w: Vec<f64> = (0..n)
        .map(|l| if pos.contains(&l) { wi[l] } else { wj[l] } - u[l].value())
        .collect();
    TropVector::from_f64(&w).canonicalize()
}

/// Best family of per-class signed hyperplanes (typed regression); the
/// per-class distances at the optimal apex are reported alongside.
pub fn regress_typed(
    v: &TropMatrix,
    types: &[usize],
    cfg: &SolverConfig,
) -> Result<RegressionResult> {
    let t = TypedOperator::new(v.clone(), types.to_vec())?;
    let (rho, exact, eig, lower, upper, iterations, residual) =
        solve_generic(&t, cfg, v.nrows() as i64)?;
    let apex = match eig {
        Some(u) => u,
        None => solver::construct_sub_eigenvector(&t, rho, 1e-6)?,
    };
    let n = v.nrows();
    let mut per_class = vec![0.0f64; n];
    for (k, &class) in types.iter().enumerate() {
        let neg: Vec<usize> = (0..n).filter(|&j| j != class).collect();
        let (_, d) = signed_project_and_distance(&v.column(k), &apex, &[class], &neg)?;
        per_class[class] = per_class[class].max(d);
    }
    Ok(RegressionResult {
        apex,
        value: -rho,
        exact: exact.map(|q| -q),
        lower: -upper,
        upper: -lower,
        ball_center: None,
        witness_policy: None,
        witness_points: None,
        per_class_distances: Some(per_class),
        iterations,
        residual,
        degenerate: false,
        warnings: Vec::new(),
    })
}

/// Closed-form one-sided regression: the greatest optimal matrix for
/// `min_A max_k || y^(k) - A x^(k) ||_inf` is `Abar + delta/2` with
/// `Abar_ij = min_k (y_i^(k) - x_j^(k))`.
pub fn one_sided_regression(
    xs: &[Vec<f64>],
    ys: &[Vec<f64>],
) -> Result<(Vec<Vec<f64>>, f64)> {
    if xs.is_empty() || xs.len() != ys.len() {
        return Err(TropError::InvalidArgument(
            "need matching, nonempty sample lists".into(),
        ));
    }
    let nx = xs[0].len();
    let my = ys[0].len();
    let mut abar = vec![vec![f64::INFINITY; nx]; my];
    for (x, y) in xs.iter().zip(ys) {
        if x.len() != nx || y.len() != my {
            return Err(TropError::DimensionMismatch {
                expected: nx,
                got: x.len(),
            });
        }
        for i in 0..my {
            for j in 0..nx {
                abar[i][j] = abar[i][j].min(y[i] - x[j]);
            }
        }
    }
    let mut delta = 0.0f64;
    for (x, y) in xs.iter().zip(ys) {
        for i in 0..my {
            let ax = (0..nx).map(|j| abar[i][j] + x[j]).fold(f64::NEG_INFINITY, f64::max);
            delta = delta.max((y[i] - ax).abs());
        }
    }
    let aopt = abar
        .iter()
        .map(|row| row.iter().map(|&e| e + delta / 2.0).collect())
        .collect();
    Ok((aopt, delta / 2.0))
}

/// Brute-force oracle for signed regression (n <= 3): the best value over
/// a dense grid of apexes with the first coordinate pinned to 0.
pub fn signed_grid_oracle(
    v: &TropMatrix,
    pos: &[usize],
    neg: &[usize],
    step: f64,
    half_range: f64,
) -> Result<f64> {
    let n = v.nrows();
    assert!(n <= 3, "grid oracle is desk-scale only");
    let steps = (2.0 * half_range / step).round() as i64;
    let axis: Vec<f64> = (0..=steps).map(|s| -half_range + s as f64 * step).collect();
    let mut best = f64::INFINITY;
    let mut coords = vec![0.0f64; n];
    let mut idx = vec![0usize; n - 1];
    loop {
        for (d, &i) in idx.iter().enumerate() {
            coords[d + 1] = axis[i];
        }
        let a = TropVector::from_f64(&coords);
        let mut worst = 0.0f64;
        for col in v.columns() {
            let (_, d) = signed_project_and_distance(&col, &a, pos, neg)?;
            worst = worst.max(d);
            if worst >= best {
                break;
            }
        }
        best = best.min(worst);
        let mut d = 0;
        loop {
            if d == idx.len() {
                return Ok(best);
            }
            idx[d] += 1;
            if idx[d] < axis.len() {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}
