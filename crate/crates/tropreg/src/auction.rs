//! Repeated-tender markets with hidden preference factors: synthetic
//! generation at a controlled distance to equilibrium, winner
//! determination, and inference of the factors by (typed) tropical
//! regression on the log-price configuration.

use crate::regression::{best_hyperplane, regress_typed};
use crate::rng::SplitLcg;
use crate::solver::SolverConfig;
use crate::tropical::{hyperplane_distance, ExtendedReal, TropMatrix, TropVector};
use crate::{Result, TropError};

#[derive(Clone, Debug)]
pub struct AuctionInstance {
    /// prices p_ij, n firms by q tenders, positive
    pub prices: Vec<Vec<f64>>,
    /// hidden preference factors, max normalized to 1 (known for
    /// simulated instances only)
    pub factors: Option<Vec<f64>>,
    /// winning firm per tender
    pub winners: Option<Vec<usize>>,
    pub reference_prices: Option<Vec<f64>>,
    pub delta: f64,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct InferenceReport {
    /// inferred factors exp(b), normalized to max 1
    pub f_reg: Vec<f64>,
    pub apex: TropVector,
    /// regression value (the solver's estimate of min dist)
    pub value: f64,
    /// re-evaluated distance of the configuration to H_apex
    pub distance: f64,
    /// distance normalized by the maximal |log| of the price seminorms;
    /// None when every price column is constant
    pub error: Option<f64>,
    pub iterations: usize,
    pub typed: bool,
    pub warnings: Vec<String>,
}

/// Log-price matrix V = -log p of an instance.
pub fn log_price_matrix(prices: &[Vec<f64>]) -> Result<TropMatrix> {
    let n = prices.len();
    if n == 0 || prices[0].is_empty() {
        return Err(TropError::InvalidArgument("empty price matrix".into()));
    }
    let q = prices[0].len();
    let mut data = Vec::with_capacity(n * q);
    for row in prices {
        if row.len() != q {
            return Err(TropError::DimensionMismatch {
                expected: q,
                got: row.len(),
            });
        }
        for &p in row {
            if !(p > 0.0) || !p.is_finite() {
                return Err(TropError::InvalidArgument(format!(
                    "prices must be positive and finite, got {p}"
                )));
            }
            data.push(ExtendedReal::new(-p.ln()));
        }
    }
    Ok(TropMatrix::new(n, q, data))
}

/// Generates an instance whose log-price columns lie on H_{log f} up to a
/// uniform perturbation of size `delta`.
///
/// Draw order on the seeded generator: reference prices P_j (only when
/// not supplied), then A_ij row-major, then the noise delta_ij row-major
/// (only when delta > 0).
pub fn simulate(
    f: &[f64],
    q: usize,
    reference_prices: Option<&[f64]>,
    delta: f64,
    seed: u64,
) -> Result<AuctionInstance> {
    let n = f.len();
    if n == 0 || q == 0 {
        return Err(TropError::InvalidArgument("need n >= 1 firms and q >= 1 tenders".into()));
    }
    if f.iter().any(|&x| !(x > 0.0 && x <= 1.0)) {
        return Err(TropError::InvalidArgument(
            "factors must lie in (0, 1]".into(),
        ));
    }
    if (f.iter().cloned().fold(0.0, f64::max) - 1.0).abs() > 1e-12 {
        return Err(TropError::InvalidArgument(
            "factors must be normalized to max 1".into(),
        ));
    }
    if delta < 0.0 {
        return Err(TropError::InvalidArgument("delta must be nonnegative".into()));
    }
    if let Some(p) = reference_prices {
        if p.len() != q {
            return Err(TropError::DimensionMismatch {
                expected: q,
                got: p.len(),
            });
        }
        if p.iter().any(|&x| !(x > 0.0)) {
            return Err(TropError::InvalidArgument(
                "reference prices must be positive".into(),
            ));
        }
    }
    let mut rng = SplitLcg::new(seed);
    let pref: Vec<f64> = match reference_prices {
        Some(p) => p.to_vec(),
        None => (0..q).map(|_| rng.log_uniform(1.0, 100.0)).collect(),
    };
    let mut a_mat = vec![vec![0.0f64; q]; n];
    for (i, row) in a_mat.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = rng.log_uniform(0.9 * pref[j] * f[i], 1.1 * pref[j] * f[i]);
        }
    }
    let a: Vec<f64> = f.iter().map(|&x| x.ln()).collect();
    // B = -log A, then surgery: the top coordinate of B + a is lowered
    // onto the runner-up so each column lands on H_a
    let mut v = vec![vec![0.0f64; q]; n];
    for j in 0..q {
        let b: Vec<f64> = (0..n).map(|i| -a_mat[i][j].ln()).collect();
        let scores: Vec<f64> = (0..n).map(|i| b[i] + a[i]).collect();
        let top = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let istar = scores.iter().position(|&s| s == top).unwrap();
        for i in 0..n {
            v[i][j] = if i == istar {
                let second = (0..n)
                    .filter(|&k| k != istar)
                    .map(|k| scores[k])
                    .fold(f64::NEG_INFINITY, f64::max);
                second - a[istar]
            } else {
                b[i]
            };
        }
    }
    if delta > 0.0 {
        for row in v.iter_mut() {
            for cell in row.iter_mut() {
                *cell += rng.uniform(-delta, delta);
            }
        }
    }
    let prices: Vec<Vec<f64>> = v
        .iter()
        .map(|row| row.iter().map(|&x| (-x).exp()).collect())
        .collect();
    let mut instance = AuctionInstance {
        prices,
        factors: Some(f.to_vec()),
        winners: None,
        reference_prices: Some(pref),
        delta,
        seed,
    };
    instance.winners = Some(determine_winners(&instance)?);
    Ok(instance)
}

/// The decision maker's choice per tender: the firm minimizing p_ij/f_i,
/// i.e. maximizing V_ij + log f_i, with the smallest index on ties.
/// Scores within 1e-8 of the best are treated as tied, so equilibrium
/// columns (which are exact ties) pick the same firm under factors known
/// only to high precision.
pub fn determine_winners(instance: &AuctionInstance) -> Result<Vec<usize>> {
    let f = instance.factors.as_ref().ok_or_else(|| {
        TropError::InvalidArgument("winner determination needs known factors".into())
    })?;
    let n = instance.prices.len();
    let q = instance.prices[0].len();
    let mut winners = Vec::with_capacity(q);
    for j in 0..q {
        let scores: Vec<f64> = (0..n)
            .map(|i| -instance.prices[i][j].ln() + f[i].ln())
            .collect();
        let best = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let who = scores.iter().position(|&s| s >= best - 1e-8).unwrap();
        winners.push(who);
    }
    Ok(winners)
}

/// Distance of the observed configuration to H_apex and the normalized
/// error e (None when all price columns are constant, making the
/// normalizer zero).
pub fn distance_to_equilibrium(
    prices: &[Vec<f64>],
    apex: &TropVector,
) -> Result<(f64, Option<f64>)> {
    let v = log_price_matrix(prices)?;
    let mut distance = 0.0f64;
    for col in v.columns() {
        distance = distance.max(hyperplane_distance(&col, apex)?);
    }
    let n = prices.len();
    let q = prices[0].len();
    let mut denom = 0.0f64;
    for j in 0..q {
        let hi = (0..n).map(|i| prices[i][j]).fold(f64::NEG_INFINITY, f64::max);
        let lo = (0..n).map(|i| prices[i][j]).fold(f64::INFINITY, f64::min);
        let spread = hi - lo;
        if spread > 0.0 {
            denom = denom.max(spread.ln().abs());
        }
    }
    let e = if denom > 0.0 { Some(distance / denom) } else { None };
    Ok((distance, e))
}

/// Infers the preference factors from prices alone, or with winner
/// identities via typed regression.
pub fn infer(
    prices: &[Vec<f64>],
    winners: Option<&[usize]>,
    cfg: &SolverConfig,
) -> Result<InferenceReport> {
    let v = log_price_matrix(prices)?;
    let n = prices.len();
    let mut warnings = Vec::new();
    let (apex, value, iterations, typed) = match winners {
        Some(w) => {
            if w.len() != prices[0].len() {
                return Err(TropError::DimensionMismatch {
                    expected: prices[0].len(),
                    got: w.len(),
                });
            }
            match regress_typed(&v, w, cfg) {
                Ok(r) => (r.apex, r.value, r.iterations, true),
                Err(TropError::InvalidArgument(msg)) => {
                    // e.g. some firm never won: fall back to the untyped model
                    warnings.push(format!("typed regression unavailable ({msg}); using untyped"));
                    let r = best_hyperplane(&v, cfg)?;
                    (r.apex, r.value, r.iterations, false)
                }
                Err(e) => return Err(e),
            }
        }
        None => {
            let r = best_hyperplane(&v, cfg)?;
            (r.apex, r.value, r.iterations, false)
        }
    };
    let apex = apex.canonicalize();
    let f_reg: Vec<f64> = (0..n)
        .map(|i| {
            if apex[i].is_finite() {
                apex[i].value().exp()
            } else {
                0.0
            }
        })
        .collect();
    let (distance, error) = distance_to_equilibrium(prices, &apex)?;
    Ok(InferenceReport {
        f_reg,
        apex,
        value,
        distance,
        error,
        iterations,
        typed,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const F: [f64; 3] = [1.0, 0.8, 0.6];
    const PREF: [f64; 6] = [1.0, 3.0, 9.0, 25.0, 70.0, 130.0];

    #[test]
    fn deterministic_per_seed() {
        let a = simulate(&F, 6, Some(&PREF), 0.05, 42).unwrap();
        let b = simulate(&F, 6, Some(&PREF), 0.05, 42).unwrap();
        assert_eq!(a.prices, b.prices);
        let c = simulate(&F, 6, Some(&PREF), 0.05, 43).unwrap();
        assert_ne!(a.prices, c.prices);
    }

    #[test]
    fn paper_scale_bands() {
        for seed in 0..10 {
            let inst = simulate(&F, 6, Some(&PREF), 0.05, seed).unwrap();
            // firm 3 on the cheapest product: 0.6 with a 10% band and the
            // 0.05 log noise
            let p = inst.prices[2][0];
            assert!((0.51..=0.70).contains(&p), "price {p}");
            // every price stays near its reference band
            for i in 0..3 {
                for j in 0..6 {
                    let nominal = PREF[j] * F[i];
                    let ratio = inst.prices[i][j] / nominal;
                    assert!((0.8..=1.25).contains(&ratio), "ratio {ratio}");
                }
            }
        }
    }

    #[test]
    fn exact_recovery_without_noise() {
        let inst = simulate(&F, 8, Some(&[1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 80.0, 130.0]), 0.0, 42)
            .unwrap();
        let cfg = SolverConfig {
            epsilon: 1e-12,
            ..SolverConfig::default()
        };
        let report = infer(&inst.prices, None, &cfg).unwrap();
        assert!(report.value.abs() < 1e-9);
        for (got, want) in report.f_reg.iter().zip(F) {
            assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        }
        let (d, e) = distance_to_equilibrium(&inst.prices, &report.apex).unwrap();
        assert!(d < 1e-9);
        assert!(e.unwrap() < 1e-9);
        // winners recomputed from the inferred factors coincide
        let redone = determine_winners(&AuctionInstance {
            factors: Some(report.f_reg.clone()),
            ..inst.clone()
        })
        .unwrap();
        assert_eq!(redone, inst.winners.unwrap());
    }

    #[test]
    fn winners_on_table_one() {
        // Prices proposed by firms in million euros (3 firms, 6 tenders)
        let prices = vec![
            vec![1.02, 3.21, 8.72, 26.2, 69.8, 123.0],
            vec![0.81, 2.65, 7.49, 20.3, 53.8, 106.0],
            vec![0.60, 1.86, 5.50, 14.7, 41.8, 76.0],
        ];
        let inst = AuctionInstance {
            prices,
            factors: Some(F.to_vec()),
            winners: None,
            reference_prices: None,
            delta: 0.05,
            seed: 0,
        };
        let w = determine_winners(&inst).unwrap();
        assert_eq!(w, vec![2, 2, 0, 2, 1, 0]);
    }

    #[test]
    fn winner_tie_break_and_scaling_invariance() {
        let inst = AuctionInstance {
            prices: vec![vec![1.0, 1.0], vec![1.0, 1.0]],
            factors: Some(vec![1.0, 1.0]),
            winners: None,
            reference_prices: None,
            delta: 0.0,
            seed: 0,
        };
        assert_eq!(determine_winners(&inst).unwrap(), vec![0, 0]);

        // common scaling of all factors leaves winners unchanged
        let inst2 = AuctionInstance {
            factors: Some(vec![0.5, 0.5]),
            ..inst
        };
        assert_eq!(determine_winners(&inst2).unwrap(), vec![0, 0]);
    }

    #[test]
    fn paper_scale_error_magnitude() {
        let inst = simulate(&F, 6, Some(&PREF), 0.05, 42).unwrap();
        let report = infer(&inst.prices, None, &SolverConfig::default()).unwrap();
        let e = report.error.unwrap();
        assert!(e > 1e-4 && e < 0.1, "e = {e}");
        assert!(report.distance < 0.12, "distance = {}", report.distance);
        for (got, want) in report.f_reg.iter().zip(F) {
            assert!((got.ln() - want.ln()).abs() < 0.12);
        }
    }

    #[test]
    fn typed_inference_with_winners() {
        let inst = simulate(&F, 60, None, 0.05, 7).unwrap();
        let winners = inst.winners.clone().unwrap();
        let typed = infer(&inst.prices, Some(&winners), &SolverConfig::default()).unwrap();
        assert!(typed.typed);
        let untyped = infer(&inst.prices, None, &SolverConfig::default()).unwrap();
        for (a, b) in typed.f_reg.iter().zip(F) {
            assert!((a.ln() - b.ln()).abs() < 0.15);
        }
        // both models stay close on this instance; equality is not claimed
        assert!(typed.value <= untyped.value + 0.2);
    }

    #[test]
    fn single_tender_distance() {
        let prices = vec![vec![2.0], vec![1.0]];
        let apex = TropVector::from_f64(&[0.0, 0.0]);
        let v = log_price_matrix(&prices).unwrap();
        let want = hyperplane_distance(&v.column(0), &apex).unwrap();
        let (d, _) = distance_to_equilibrium(&prices, &apex).unwrap();
        assert_eq!(d, want);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(simulate(&[1.0, 0.5], 0, None, 0.05, 1).is_err());
        assert!(simulate(&[0.5, 0.4], 4, None, 0.05, 1).is_err()); // not normalized
        assert!(simulate(&[1.0, 0.5], 4, None, -0.1, 1).is_err());
        assert!(log_price_matrix(&[vec![1.0, -2.0]]).is_err());
    }
}
