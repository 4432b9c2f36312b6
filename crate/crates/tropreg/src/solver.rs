//! Spectral solvers for Shapley operators: projective Krasnoselskii-Mann
//! iteration, value iteration with Collatz-Wielandt bounds, exact rational
//! eigenvalues with Kleene-star certificates, and brute-force policy
//! enumeration used as a ground-truth oracle.

use crate::shapley::{MinPolicy, PlainOperator, ShapleyOperator};
use crate::tropical::{ExtendedReal, TropMatrix, TropVector};
use crate::{Result, TropError};
use num_rational::Rational64;
use num_traits::{Signed, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Km,
    Vi,
    Exact,
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub method: Method,
    /// damping weight of the operator step, strictly inside (0,1)
    pub gamma: f64,
    /// target Hilbert-seminorm residual
    pub epsilon: f64,
    pub max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            method: Method::Km,
            gamma: 0.5,
            epsilon: 1e-8,
            max_iter: 1_000_000,
        }
    }
}

/// Output of a spectral solve: the eigenvalue estimate with lower/upper
/// Collatz-Wielandt certificates, and the certifying vectors, re-verified
/// before being returned.
#[derive(Clone, Debug)]
pub struct SpectralCertificate {
    pub rho: f64,
    /// exact value when the rational post-processing succeeded
    pub exact: Option<Rational64>,
    /// T(sub) >= lower + sub holds
    pub lower: f64,
    /// T(sup) <= upper + sup holds
    pub upper: f64,
    /// approximate (or exact) finite eigenvector, canonical form
    pub eigenvector: Option<TropVector>,
    pub sub: Option<TropVector>,
    pub sup: Option<TropVector>,
    pub iterations: usize,
    pub residual: f64,
    /// Hilbert-seminorm residual after each iteration (KM mode)
    pub residual_log: Vec<f64>,
}

/// Checks `T(b) >= rho + b` up to `tol` (coordinates where b is -inf are
/// vacuous); requires b != BOT.
pub fn verify_sub<T: ShapleyOperator + ?Sized>(
    t: &T,
    b: &TropVector,
    rho: f64,
    tol: f64,
) -> bool {
    if b.is_bot() {
        return false;
    }
    let tb = t.eval(b);
    (0..b.len()).all(|i| {
        b[i].is_bottom() || tb.entries()[i].value() + tol >= rho + b[i].value()
    })
}

/// Checks `T(c) <= rho + c` up to `tol` for a finite c.
pub fn verify_super<T: ShapleyOperator + ?Sized>(
    t: &T,
    c: &TropVector,
    rho: f64,
    tol: f64,
) -> bool {
    if !c.is_finite() {
        return false;
    }
    let tc = t.eval(c);
    (0..c.len()).all(|i| tc.entries()[i].value() <= rho + c[i].value() + tol)
}

fn finite_or_degenerate(v: &TropVector, what: &str) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(TropError::Degenerate(format!(
            "{what} has a -inf coordinate; the operator does not preserve finite vectors"
        )))
    }
}

/// Damped fixed-point iteration
/// `v <- (1-gamma) v + gamma (T(v) - top(T(v)))` starting from 0, stopped
/// when the Hilbert-seminorm residual drops below `cfg.epsilon`.
pub fn km_solve<T: ShapleyOperator + ?Sized>(t: &T, cfg: &SolverConfig) -> Result<SpectralCertificate> {
    assert!(cfg.gamma > 0.0 && cfg.gamma < 1.0, "gamma must be in (0,1)");
    let n = t.dim();
    let mut v = TropVector::zeros(n);
    let mut log = Vec::new();
    for k in 0..cfg.max_iter {
        let tv = t.eval(&v);
        finite_or_degenerate(&tv, "T(v)")?;
        // residual = Hilbert seminorm of T(v) - v; its min/max are the
        // Collatz-Wielandt bounds certified by v itself.
        let diffs: Vec<f64> = (0..n)
            .map(|i| tv.entries()[i].value() - v[i].value())
            .collect();
        let lower = diffs.iter().cloned().fold(f64::INFINITY, f64::min);
        let upper = diffs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let residual = upper - lower;
        log.push(residual);
        if residual <= cfg.epsilon {
            let eig = v.canonicalize();
            return Ok(SpectralCertificate {
                rho: 0.5 * (lower + upper),
                exact: None,
                lower,
                upper,
                eigenvector: Some(eig.clone()),
                sub: Some(eig.clone()),
                sup: Some(eig),
                iterations: k,
                residual,
                residual_log: log,
            });
        }
        let top = tv.top().value();
        let next: Vec<f64> = (0..n)
            .map(|i| (1.0 - cfg.gamma) * v[i].value() + cfg.gamma * (tv.entries()[i].value() - top))
            .collect();
        v = TropVector::from_f64(&next);
    }
    let tv = t.eval(&v);
    let diffs: Vec<f64> = (0..n)
        .map(|i| tv.entries()[i].value() - v[i].value())
        .collect();
    let lower = diffs.iter().cloned().fold(f64::INFINITY, f64::min);
    let upper = diffs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Err(TropError::NonConvergence {
        iterations: cfg.max_iter,
        lower,
        upper,
    })
}

/// Value iteration `v^k = T^k(0)` with the bounds
/// `bot(v^k)/k <= rho(T) <= top(v^k)/k`, plus the regularized
/// sub/super-eigenvector constructions
/// `b = sup_j (v^j - j lo)` and `c = inf_j (v^j - j up)`.
pub fn value_iterate<T: ShapleyOperator + ?Sized>(t: &T, k_max: usize) -> Result<SpectralCertificate> {
    assert!(k_max >= 1);
    let n = t.dim();
    let mut iterates = vec![TropVector::zeros(n)];
    for _ in 0..k_max {
        let next = t.eval(iterates.last().unwrap());
        if next.is_bot() {
            // the whole orbit collapses: every mean payoff is -inf
            return Ok(SpectralCertificate {
                rho: f64::NEG_INFINITY,
                exact: None,
                lower: f64::NEG_INFINITY,
                upper: f64::NEG_INFINITY,
                eigenvector: None,
                sub: None,
                sup: None,
                iterations: iterates.len(),
                residual: f64::INFINITY,
                residual_log: Vec::new(),
            });
        }
        iterates.push(next);
    }
    let k = k_max as f64;
    let vk = iterates.last().unwrap();
    let upper = vk.top().value() / k;
    let lower = vk.entries().iter().map(|e| e.value()).fold(f64::INFINITY, f64::min) / k;
    let finite_orbit = iterates.iter().all(TropVector::is_finite);
    let (sub, sup) = if finite_orbit {
        let mut b = vec![f64::NEG_INFINITY; n];
        let mut c = vec![f64::INFINITY; n];
        for (j, vj) in iterates.iter().enumerate().skip(1) {
            for i in 0..n {
                let x = vj[i].value();
                b[i] = b[i].max(x - j as f64 * lower);
                c[i] = c[i].min(x - j as f64 * upper);
            }
        }
        (
            Some(TropVector::from_f64(&b)),
            Some(TropVector::from_f64(&c)),
        )
    } else {
        (None, None)
    };
    if let Some(b) = &sub {
        debug_assert!(verify_sub(t, b, lower, 1e-9));
    }
    if let Some(c) = &sup {
        debug_assert!(verify_super(t, c, upper, 1e-9));
    }
    Ok(SpectralCertificate {
        rho: 0.5 * (lower + upper),
        exact: None,
        lower,
        upper,
        eigenvector: None,
        sub,
        sup,
        iterations: k_max,
        residual: upper - lower,
        residual_log: Vec::new(),
    })
}

/// The rational with the smallest denominator <= `max_den` inside
/// `[lo - slack, hi + slack]`, if any.
pub fn round_to_rational(lo: f64, hi: f64, max_den: i64) -> Option<Rational64> {
    const SLACK: f64 = 1e-9;
    for q in 1..=max_den {
        let p_lo = ((lo - SLACK) * q as f64).ceil() as i64;
        let p_hi = ((hi + SLACK) * q as f64).floor() as i64;
        if p_lo <= p_hi {
            // prefer the candidate closest to the interval midpoint
            let mid = 0.5 * (lo + hi) * q as f64;
            let p = mid.round().clamp(p_lo as f64, p_hi as f64) as i64;
            return Some(Rational64::new(p, q));
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Exact rational arithmetic: matrices over Rmax with entries Option<Rational64>
// (None encodes -inf).

pub(crate) type Rat = Option<Rational64>;
pub(crate) type RatMat = Vec<Vec<Rat>>;

pub(crate) fn rat_from_f64(v: f64) -> Rat {
    if v == f64::NEG_INFINITY {
        None
    } else {
        Some(Rational64::approximate_float(v).expect("finite value representable"))
    }
}

pub(crate) fn rat_matrix(v: &TropMatrix) -> RatMat {
    (0..v.nrows())
        .map(|i| (0..v.ncols()).map(|k| rat_from_f64(v.get(i, k).value())).collect())
        .collect()
}

fn rat_to_trop(x: &[Rat]) -> TropVector {
    TropVector::new(
        x.iter()
            .map(|r| match r {
                Some(q) => ExtendedReal::new(*q.numer() as f64 / *q.denom() as f64),
                None => ExtendedReal::BOTTOM,
            })
            .collect(),
    )
}

fn rplus(a: Rat, b: Rat) -> Rat {
    match (a, b) {
        (Some(x), Some(y)) => Some(x + y),
        _ => None,
    }
}

fn rmax(a: Rat, b: Rat) -> Rat {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

/// Exact evaluation of the plain operator on a rational vector; output
/// coordinates may be -inf.
pub(crate) fn eval_rat(vr: &RatMat, x: &[Rat]) -> Vec<Rat> {
    let n = vr.len();
    let p = if n == 0 { 0 } else { vr[0].len() };
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc: Option<Rat> = None; // None = empty min (+inf)
        for k in 0..p {
            let vik = match vr[i][k] {
                Some(q) => q,
                None => continue,
            };
            let mut inner: Rat = None;
            for (j, row) in vr.iter().enumerate() {
                if j != i {
                    inner = rmax(inner, rplus(row[k], x[j]));
                }
            }
            let term = inner.map(|m| m - vik);
            acc = Some(match acc {
                None => term,
                Some(cur) => match (cur, term) {
                    (Some(a), Some(b)) => Some(a.min(b)),
                    _ => None,
                },
            });
        }
        out.push(acc.expect("validated operator has no empty row"));
    }
    out
}

/// Max cycle mean of the digraph of the square matrix `m` (edge i -> j of
/// weight m[i][j]) by Karp's dynamic program with all nodes as sources;
/// `None` when the digraph is acyclic.
pub(crate) fn karp_rat(m: &RatMat) -> Rat {
    let n = m.len();
    if n == 0 {
        return None;
    }
    // d[k][j] = max weight of a k-edge walk ending at j
    let mut d: Vec<Vec<Rat>> = Vec::with_capacity(n + 1);
    d.push(vec![Some(Rational64::zero()); n]);
    for k in 1..=n {
        let prev = &d[k - 1];
        let mut cur = vec![None; n];
        for j in 0..n {
            for (i, row) in m.iter().enumerate() {
                cur[j] = rmax(cur[j], rplus(prev[i], row[j]));
            }
        }
        d.push(cur);
    }
    let mut best: Rat = None;
    for j in 0..n {
        let dn = match d[n][j] {
            Some(q) => q,
            None => continue,
        };
        let mut inner: Rat = None;
        for (k, dk) in d.iter().enumerate().take(n) {
            if let Some(q) = dk[j] {
                let mean = (dn - q) / Rational64::from_integer((n - k) as i64);
                inner = Some(match inner {
                    Some(m) => m.min(mean),
                    None => mean,
                });
            }
        }
        best = rmax(best, inner);
    }
    best
}

/// Reflexive-transitive max-plus closure of a square rational matrix;
/// errors when a positive-mean cycle exists.
pub(crate) fn closure_rat(b: &RatMat) -> Result<RatMat> {
    let n = b.len();
    let mut star: RatMat = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        rmax(b[i][j], Some(Rational64::zero()))
                    } else {
                        b[i][j]
                    }
                })
                .collect()
        })
        .collect();
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                star[i][j] = rmax(star[i][j], rplus(star[i][m], star[m][j]));
            }
        }
    }
    let bad: Vec<usize> = (0..n)
        .filter(|&i| matches!(star[i][i], Some(q) if q.is_positive()))
        .collect();
    if !bad.is_empty() {
        return Err(TropError::PositiveCycle(bad));
    }
    Ok(star)
}

fn rat_matmul(a: &RatMat, b: &RatMat) -> RatMat {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    (0..n).fold(None, |acc, k| rmax(acc, rplus(a[i][k], b[k][j])))
                })
                .collect()
        })
        .collect()
}

/// Max-plus linearization of `T^sigma` in exact arithmetic.
pub(crate) fn min_linearization_rat(vr: &RatMat, sigma: &MinPolicy) -> RatMat {
    let n = vr.len();
    (0..n)
        .map(|i| {
            let k = sigma.0[i];
            let vik = vr[i][k].expect("feasible policy");
            (0..n)
                .map(|j| {
                    if j == i {
                        None
                    } else {
                        vr[j][k].map(|vjk| vjk - vik)
                    }
                })
                .collect()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Kleene star and max cycle mean over f64 matrices (public oracle surface).

/// The closure `I ∨ B ∨ B² ∨ …` of a square matrix with nonpositive max
/// cycle mean.
#[derive(Clone, Debug)]
pub struct KleeneStar {
    pub star: TropMatrix,
}

pub fn kleene_star(b: &TropMatrix) -> Result<KleeneStar> {
    assert_eq!(b.nrows(), b.ncols(), "square matrix required");
    let n = b.nrows();
    let mut star: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let w = b.get(i, j).value();
                    if i == j {
                        w.max(0.0)
                    } else {
                        w
                    }
                })
                .collect()
        })
        .collect();
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = star[i][m] + star[m][j];
                if via > star[i][j] {
                    star[i][j] = via;
                }
            }
        }
    }
    let bad: Vec<usize> = (0..n).filter(|&i| star[i][i] > 1e-12).collect();
    if !bad.is_empty() {
        return Err(TropError::PositiveCycle(bad));
    }
    let data = star
        .into_iter()
        .flatten()
        .map(ExtendedReal::new)
        .collect();
    Ok(KleeneStar {
        star: TropMatrix::new(n, n, data),
    })
}

/// Maximum weight-to-length ratio over the circuits of the digraph of `m`
/// (Karp's algorithm); errors on an empty graph, returns -inf when the
/// digraph is acyclic.
pub fn one_player_eigenvalue(m: &TropMatrix) -> Result<f64> {
    assert_eq!(m.nrows(), m.ncols());
    let n = m.nrows();
    if n == 0 || m.support().is_empty() {
        return Err(TropError::InvalidArgument("empty game graph".into()));
    }
    let mut d = vec![vec![f64::NEG_INFINITY; n]; n + 1];
    d[0] = vec![0.0; n];
    for k in 1..=n {
        for j in 0..n {
            for i in 0..n {
                let w = m.get(i, j).value();
                let cand = d[k - 1][i] + w;
                if cand > d[k][j] {
                    d[k][j] = cand;
                }
            }
        }
    }
    let mut best = f64::NEG_INFINITY;
    for j in 0..n {
        if d[n][j] == f64::NEG_INFINITY {
            continue;
        }
        let mut inner = f64::INFINITY;
        for k in 0..n {
            if d[k][j] > f64::NEG_INFINITY {
                inner = inner.min((d[n][j] - d[k][j]) / (n - k) as f64);
            }
        }
        best = best.max(inner);
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// Exact eigenvalue of the plain operator.

/// Result of the exact solve: the eigenvalue as a rational (None = -inf,
/// i.e. infinite inner radius), and when available an exact finite
/// eigenvector together with an optimal Min policy at it.
#[derive(Clone, Debug)]
pub struct ExactSpectral {
    pub rho: Rat,
    pub eigenvector: Option<TropVector>,
    pub eigenvector_rat: Option<Vec<Rational64>>,
    pub policy: Option<MinPolicy>,
}

fn critical_column(b: &RatMat, star: &RatMat) -> Option<usize> {
    // node on a 0-mean cycle: the best cycle weight through j, i.e. the
    // diagonal of B (x) B*, is 0
    let plus = rat_matmul(b, star);
    (0..b.len()).find(|&j| plus[j][j] == Some(Rational64::zero()))
}

/// Exact eigenvalue of T_V by Min-policy iteration with Karp's algorithm
/// and Kleene-star eigenvector extraction, everything in rational
/// arithmetic. Falls back to exhaustive policy enumeration.
pub fn rho_exact(t: &PlainOperator) -> Result<ExactSpectral> {
    let vr = rat_matrix(t.matrix());
    let n = t.dim();
    let mut guess = match km_solve(
        t,
        &SolverConfig {
            epsilon: 1e-9,
            max_iter: 200_000,
            ..SolverConfig::default()
        },
    ) {
        Ok(cert) => cert.eigenvector.unwrap(),
        Err(TropError::Degenerate(_)) | Err(TropError::NonConvergence { .. }) => {
            TropVector::zeros(n)
        }
        Err(e) => return Err(e),
    };
    let mut best: Option<(Rational64, MinPolicy)> = None;
    for _ in 0..64 {
        let sigma = match t.extract_min_policy(&guess) {
            Ok(s) => s,
            Err(_) => break,
        };
        let m = min_linearization_rat(&vr, &sigma);
        let rho_sigma = match karp_rat(&m) {
            Some(r) => r,
            // some policy makes every circuit disappear: mean payoff -inf
            None => {
                return Ok(ExactSpectral {
                    rho: None,
                    eigenvector: None,
                    eigenvector_rat: None,
                    policy: Some(sigma),
                })
            }
        };
        if best.as_ref().is_some_and(|(r, _)| *r <= rho_sigma) {
            break; // no improvement: stop the policy iteration
        }
        best = Some((rho_sigma, sigma.clone()));
        // eigenvector of the linearization from the Kleene star of
        // B = -rho_sigma + M^sigma, taken at a critical column
        let b: RatMat = m
            .iter()
            .map(|row| row.iter().map(|e| e.map(|q| q - rho_sigma)).collect())
            .collect();
        let star = closure_rat(&b)?;
        let Some(jc) = critical_column(&b, &star) else {
            break;
        };
        let u: Vec<Rat> = (0..n).map(|i| star[i][jc]).collect();
        if u.iter().any(Option::is_none) {
            break; // not a finite eigenvector; give up on this path
        }
        let tu = eval_rat(&vr, &u);
        let shifted: Vec<Rat> = u.iter().map(|e| e.map(|q| q + rho_sigma)).collect();
        if tu == shifted {
            let urat: Vec<Rational64> = u.iter().map(|e| e.unwrap()).collect();
            let uv = rat_to_trop(&u).canonicalize();
            let policy = t.extract_min_policy(&uv)?;
            return Ok(ExactSpectral {
                rho: Some(rho_sigma),
                eigenvector: Some(uv),
                eigenvector_rat: Some(urat),
                policy: Some(policy),
            });
        }
        guess = rat_to_trop(&u).canonicalize();
    }
    // fall back to the exhaustive oracle
    let rho = brute_force_rho(t, 2_000_000)?;
    Ok(ExactSpectral {
        rho,
        eigenvector: None,
        eigenvector_rat: None,
        policy: best.map(|(_, s)| s),
    })
}

/// Ground-truth oracle: `rho(T) = min_sigma` (max cycle mean of the
/// one-player linearization of `T^sigma`), enumerated exhaustively in
/// exact arithmetic. `None` means -inf.
pub fn brute_force_rho(t: &PlainOperator, budget: u128) -> Result<Rat> {
    let v = t.matrix();
    let n = v.nrows();
    let actions: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..v.ncols()).filter(|&k| v.get(i, k).is_finite()).collect())
        .collect();
    let mut count: u128 = 1;
    for a in &actions {
        count = count.saturating_mul(a.len() as u128);
        if count > budget {
            return Err(TropError::BudgetExceeded(count));
        }
    }
    let vr = rat_matrix(v);
    let mut sigma = vec![0usize; n];
    let mut best: Option<Rat> = None;
    loop {
        let pol = MinPolicy(sigma.iter().enumerate().map(|(i, &a)| actions[i][a]).collect());
        let m = min_linearization_rat(&vr, &pol);
        let chi = karp_rat(&m);
        best = Some(match best {
            None => chi,
            Some(cur) => match (cur, chi) {
                (Some(a), Some(b)) => Some(a.min(b)),
                _ => None,
            },
        });
        // next policy in lexicographic order
        let mut i = 0;
        loop {
            if i == n {
                return Ok(best.unwrap());
            }
            sigma[i] += 1;
            if sigma[i] < actions[i].len() {
                break;
            }
            sigma[i] = 0;
            i += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// Certificate constructions.

/// A finite c with `T(c) <= rho + c`, built from the Kleene star of the
/// linearization at a near-optimal Min policy (tropical sum of the star's
/// columns), verified before returning.
pub fn construct_super_eigenvector(t: &PlainOperator, rho: f64) -> Result<TropVector> {
    let mut guess = match km_solve(t, &SolverConfig::default()) {
        Ok(cert) => cert.eigenvector.unwrap(),
        Err(_) => TropVector::zeros(t.dim()),
    };
    for _ in 0..8 {
        let sigma = t.extract_min_policy(&guess)?;
        let m = t.min_linearization(&sigma);
        let n = m.nrows();
        let shifted = TropMatrix::new(
            n,
            n,
            (0..n * n)
                .map(|idx| {
                    let e = m.get(idx / n, idx % n);
                    if e.is_finite() {
                        ExtendedReal::new(e.value() - rho)
                    } else {
                        ExtendedReal::BOTTOM
                    }
                })
                .collect(),
        );
        match kleene_star(&shifted) {
            Ok(ks) => {
                // tropical sum of the columns of B*, finite since the
                // diagonal is >= 0
                let c = (0..n)
                    .map(|j| ks.star.column(j))
                    .fold(TropVector::bottom(n), |acc, col| acc.join(&col))
                    .canonicalize();
                if verify_super(t, &c, rho, 1e-9) {
                    return Ok(c);
                }
                guess = c;
            }
            Err(TropError::PositiveCycle(_)) => {
                // policy not optimal for this rho: refine at a damped step
                guess = t.eval(&guess).canonicalize();
            }
            Err(e) => return Err(e),
        }
    }
    Err(TropError::Certificate(format!(
        "no verified super-eigenvector found for rho = {rho}"
    )))
}

/// A vector b != BOT with `T(b) >= rho + b`, from the KM fixed point (or
/// an exact eigenvector when available), verified before returning.
pub fn construct_sub_eigenvector<T: ShapleyOperator + ?Sized>(
    t: &T,
    rho: f64,
    tol: f64,
) -> Result<TropVector> {
    let cfg = SolverConfig {
        epsilon: (tol * 0.5).max(1e-12),
        ..SolverConfig::default()
    };
    match km_solve(t, &cfg) {
        Ok(cert) => {
            let b = cert.eigenvector.unwrap();
            if verify_sub(t, &b, rho, tol) {
                return Ok(b);
            }
            Err(TropError::Certificate(format!(
                "KM fixed point fails the sub-eigenvector inequality at rho = {rho}"
            )))
        }
        Err(e) => Err(e),
    }
}

// ---------------------------------------------------------------------------
// Support restriction for operators without finite eigenvectors.

/// The support of `T^steps(0)`; coordinates outside it have mean payoff
/// -inf and are excluded before iterating.
pub fn power_support<T: ShapleyOperator + ?Sized>(t: &T, steps: usize) -> Vec<usize> {
    let mut x = TropVector::zeros(t.dim());
    for _ in 0..steps {
        x = t.eval(&x);
        if x.is_bot() {
            return Vec::new();
        }
    }
    x.support()
}

/// View of an operator restricted to a subset of coordinates, embedding
/// the complement at -inf.
pub struct SupportRestricted<'a, T: ShapleyOperator + ?Sized> {
    inner: &'a T,
    support: Vec<usize>,
}

impl<'a, T: ShapleyOperator + ?Sized> SupportRestricted<'a, T> {
    pub fn new(inner: &'a T, support: Vec<usize>) -> Self {
        assert!(!support.is_empty());
        SupportRestricted { inner, support }
    }

    pub fn embed(&self, x: &TropVector) -> TropVector {
        let mut full = vec![ExtendedReal::BOTTOM; self.inner.dim()];
        for (slot, &i) in self.support.iter().enumerate() {
            full[i] = x[slot];
        }
        TropVector::new(full)
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }
}

impl<T: ShapleyOperator + ?Sized> ShapleyOperator for SupportRestricted<'_, T> {
    fn dim(&self) -> usize {
        self.support.len()
    }

    fn eval(&self, x: &TropVector) -> TropVector {
        let full = self.inner.eval(&self.embed(x));
        TropVector::new(self.support.iter().map(|&i| full.entries()[i]).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitLcg;
    use crate::shapley::TypedOperator;

    const NI: f64 = f64::NEG_INFINITY;

    fn v9() -> PlainOperator {
        PlainOperator::new(TropMatrix::from_rows(&[
            vec![-3.0, 0.0, 0.0, 1.0, 1.0, -1.0, 0.0, 0.0, -1.0],
            vec![0.0, -3.0, 0.0, 0.0, -1.0, 1.0, 1.0, -1.0, 0.0],
            vec![-1.0, -1.0, -4.0, -2.0, -1.0, -1.0, -2.0, 0.0, 0.0],
        ]))
        .unwrap()
    }

    fn u4() -> PlainOperator {
        PlainOperator::new(TropMatrix::from_rows(&[
            vec![-1.0, 0.0, 1.0, 0.0],
            vec![0.0, -1.0, 0.0, 1.0],
            vec![0.0, 0.0, -2.0, -2.0],
        ]))
        .unwrap()
    }

    fn rand_op(rng: &mut SplitLcg, n: usize, p: usize) -> PlainOperator {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..p).map(|_| rng.uniform_int(-5, 5) as f64).collect())
            .collect();
        PlainOperator::new(TropMatrix::from_rows(&rows)).unwrap()
    }

    #[test]
    fn km_on_fig2() {
        let cert = km_solve(&v9(), &SolverConfig::default()).unwrap();
        assert!((cert.rho + 1.0).abs() < 1e-6);
        let u = cert.eigenvector.unwrap();
        assert!(u.projectively_eq(&TropVector::from_f64(&[-1.0, -1.0, 0.0]), 1e-6));
    }

    #[test]
    fn km_on_single_point() {
        let t = PlainOperator::new(TropMatrix::from_rows(&[vec![0.0], vec![0.0]])).unwrap();
        let cert = km_solve(&t, &SolverConfig::default()).unwrap();
        assert_eq!(cert.rho, 0.0);
        assert_eq!(cert.iterations, 0);
    }

    #[test]
    fn km_on_typed_v11() {
        let v = TropMatrix::from_rows(&[
            vec![1.0, 1.0, 2.0, 0.0, 0.0, 0.0, -3.0, -1.0, 0.0, 0.0, -2.0],
            vec![0.0, -2.0, 0.0, 1.0, 1.0, 2.0, 1.0, 0.0, 0.0, -3.0, 0.0],
            vec![0.0, 0.0, -2.0, -2.0, -1.0, -2.0, 0.0, 2.0, 3.0, 1.0, 1.0],
        ]);
        let typed = TypedOperator::new(v, vec![0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2]).unwrap();
        let cert = km_solve(&typed, &SolverConfig::default()).unwrap();
        assert!((cert.rho + 2.0).abs() < 1e-6);
    }

    #[test]
    fn value_iteration_bounds() {
        let cert = value_iterate(&v9(), 200).unwrap();
        assert!(cert.lower <= -1.0 + 1e-12 && -1.0 <= cert.upper + 1e-12);
        // W = max column spread of V9 is 4
        assert!(cert.upper - cert.lower <= 2.0 * 4.0 / 200.0 + 1e-12);
        assert!(verify_sub(&v9(), &cert.sub.unwrap(), cert.lower, 1e-9));
        assert!(verify_super(&v9(), &cert.sup.unwrap(), cert.upper, 1e-9));
    }

    #[test]
    fn value_iteration_fixed_point_case() {
        let t = PlainOperator::new(TropMatrix::from_rows(&[vec![0.0], vec![0.0]])).unwrap();
        let cert = value_iterate(&t, 50).unwrap();
        assert_eq!(cert.lower, 0.0);
        assert_eq!(cert.upper, 0.0);
    }

    #[test]
    fn value_iteration_brackets_oracle() {
        let mut rng = SplitLcg::new(42);
        for _ in 0..20 {
            let t = rand_op(&mut rng, 3, 5);
            let cert = value_iterate(&t, 150).unwrap();
            let oracle = brute_force_rho(&t, 1 << 20).unwrap().unwrap();
            let r = *oracle.numer() as f64 / *oracle.denom() as f64;
            assert!(cert.lower - 1e-9 <= r && r <= cert.upper + 1e-9);
        }
    }

    #[test]
    fn exact_on_paper_instances() {
        let e = rho_exact(&v9()).unwrap();
        assert_eq!(e.rho, Some(Rational64::from_integer(-1)));
        let u = e.eigenvector.unwrap();
        assert!(u.projectively_eq(&TropVector::from_f64(&[0.0, 0.0, 1.0]), 1e-9));

        let e = rho_exact(&u4()).unwrap();
        assert_eq!(e.rho, Some(Rational64::from_integer(-1)));

        let zeros = PlainOperator::new(TropMatrix::from_rows(&[
            vec![0.0, 0.0],
            vec![0.0, 0.0],
        ]))
        .unwrap();
        assert_eq!(rho_exact(&zeros).unwrap().rho, Some(Rational64::zero()));
    }

    #[test]
    fn exact_matches_brute_force_on_random() {
        let mut rng = SplitLcg::new(7);
        for _ in 0..60 {
            let n = 2 + rng.uniform_int(0, 2) as usize;
            let p = 2 + rng.uniform_int(0, 3) as usize;
            let t = rand_op(&mut rng, n, p);
            let e = rho_exact(&t).unwrap();
            let o = brute_force_rho(&t, 1 << 24).unwrap();
            assert_eq!(e.rho, o);
        }
    }

    #[test]
    fn brute_force_goldens() {
        assert_eq!(
            brute_force_rho(&v9(), 1 << 30).unwrap(),
            Some(Rational64::from_integer(-1))
        );
        assert_eq!(
            brute_force_rho(&u4(), 1 << 30).unwrap(),
            Some(Rational64::from_integer(-1))
        );
        let zeros = PlainOperator::new(TropMatrix::from_rows(&[
            vec![0.0, 0.0],
            vec![0.0, 0.0],
        ]))
        .unwrap();
        assert_eq!(brute_force_rho(&zeros, 16).unwrap(), Some(Rational64::zero()));
        assert!(matches!(
            brute_force_rho(&v9(), 2),
            Err(TropError::BudgetExceeded(_))
        ));
    }

    #[test]
    fn kleene_star_examples() {
        let b = TropMatrix::from_rows(&[vec![-1.0, -3.0], vec![0.0, -2.0]]);
        let s = kleene_star(&b).unwrap().star;
        let want = TropMatrix::from_rows(&[vec![0.0, -3.0], vec![0.0, 0.0]]);
        assert_eq!(s, want);

        let diag = TropMatrix::from_rows(&[vec![-1.0, NI], vec![NI, -1.0]]);
        assert_eq!(kleene_star(&diag).unwrap().star, TropMatrix::identity(2));

        let one = TropMatrix::from_rows(&[vec![0.0]]);
        assert_eq!(kleene_star(&one).unwrap().star, one);

        let pos = TropMatrix::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        assert!(matches!(kleene_star(&pos), Err(TropError::PositiveCycle(_))));
    }

    #[test]
    fn karp_examples() {
        let m = TropMatrix::from_rows(&[vec![-1.0]]);
        assert_eq!(one_player_eigenvalue(&m).unwrap(), -1.0);

        let m = TropMatrix::from_rows(&[vec![NI, 0.0], vec![-2.0, NI]]);
        assert_eq!(one_player_eigenvalue(&m).unwrap(), -1.0);

        let t = v9();
        let sigma = MinPolicy(vec![3, 5, 7]);
        let m = t.min_linearization(&sigma);
        assert!((one_player_eigenvalue(&m).unwrap() + 1.0).abs() < 1e-12);

        let acyclic = TropMatrix::from_rows(&[vec![NI, 1.0], vec![NI, NI]]);
        assert_eq!(one_player_eigenvalue(&acyclic).unwrap(), NI);
    }

    #[test]
    fn certificate_constructions() {
        let t = v9();
        let c = construct_super_eigenvector(&t, -1.0).unwrap();
        assert!(verify_super(&t, &c, -1.0, 1e-9));
        assert!(c.projectively_eq(&TropVector::from_f64(&[0.0, 0.0, 1.0]), 1e-9));

        let b = construct_sub_eigenvector(&t, -1.0, 1e-7).unwrap();
        assert!(verify_sub(&t, &b, -1.0, 1e-7));

        // all three paper apexes of the Fig. 3 instance
        let u = u4();
        for apex in [
            TropVector::from_f64(&[0.0, 0.0, 1.0]),
            TropVector::from_f64(&[0.0, 0.0, -1.0]),
            TropVector::new(vec![
                ExtendedReal::new(0.0),
                ExtendedReal::new(0.0),
                ExtendedReal::BOTTOM,
            ]),
        ] {
            assert!(verify_sub(&u, &apex, -1.0, 1e-12), "apex {apex:?}");
        }

        let mut rng = SplitLcg::new(12);
        for _ in 0..20 {
            let t = rand_op(&mut rng, 3, 4);
            let e = rho_exact(&t).unwrap();
            let r = e.rho.unwrap();
            let rf = *r.numer() as f64 / *r.denom() as f64;
            let c = construct_super_eigenvector(&t, rf).unwrap();
            assert!(verify_super(&t, &c, rf, 1e-9));
        }
    }

    #[test]
    fn rounding_to_rationals() {
        assert_eq!(
            round_to_rational(-1.02, -0.97, 3),
            Some(Rational64::from_integer(-1))
        );
        assert_eq!(
            round_to_rational(-2.52, -2.49, 3),
            Some(Rational64::new(-5, 2))
        );
        assert_eq!(round_to_rational(0.4, 0.45, 2), None);
    }

    #[test]
    fn power_support_detects_collapse() {
        // the diagonal pattern spans the whole space: every inner maximum
        // is empty and the orbit of 0 collapses at once
        let t = PlainOperator::new(TropMatrix::identity(2)).unwrap();
        assert!(power_support(&t, 2).is_empty());

        let t9 = v9();
        assert_eq!(power_support(&t9, 3), vec![0, 1, 2]);
    }
}
