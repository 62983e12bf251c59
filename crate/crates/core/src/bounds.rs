//! Lower bounds on δ_max and the optimality factor ρ.
//!
//! For a `(K, M, N, δ_max)` set the Welch bound always applies once `K ≥ M`;
//! the Liu bound applies when `K ≥ 3M`, `M ≥ 2` and `N ≥ 2` and is then the
//! one ρ is measured against.

use std::fmt;

use crate::error::{QcssError, Result};
use crate::modarith::factorize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QcssParams {
    pub set_size: u64,
    pub flock_size: u64,
    pub length: u64,
    pub delta_max: f64,
}

impl QcssParams {
    pub fn new(set_size: u64, flock_size: u64, length: u64, delta_max: f64) -> Self {
        Self {
            set_size,
            flock_size,
            length,
            delta_max,
        }
    }

    /// Parameters the construction over Z_n achieves:
    /// `(n(p_0-1), n, n, n)`.
    pub fn for_construction(n: u64) -> Result<Self> {
        let f = factorize(n)?;
        Ok(Self::new(n * (f.p0() - 1), n, n, n as f64))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    Liu,
    Welch,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::Liu => "Liu",
            BoundKind::Welch => "Welch",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    Optimal,
    NearOptimal,
    NotNearOptimal,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Optimal => "optimal",
            Classification::NearOptimal => "near-optimal",
            Classification::NotNearOptimal => "not near-optimal",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalityReport {
    pub welch_bound: f64,
    pub liu_bound: Option<f64>,
    pub rho: f64,
    pub bound_used: BoundKind,
    pub classification: Classification,
}

const OPTIMAL_EPS: f64 = 1e-9;

/// `M·N·sqrt((K/M - 1) / (K(2N-1) - 1))`.
pub fn welch_bound(k: u64, m: u64, n: u64) -> Result<f64> {
    if k == 0 || m == 0 || n == 0 {
        return Err(QcssError::DegenerateParams(
            "K, M and N must be positive".into(),
        ));
    }
    if k < m {
        return Err(QcssError::DegenerateParams(format!("K < M ({k} < {m})")));
    }
    let denom = k as f64 * (2 * n - 1) as f64 - 1.0;
    if denom <= 0.0 {
        return Err(QcssError::DegenerateParams("K(2N-1) must exceed 1".into()));
    }
    let (kf, mf, nf) = (k as f64, m as f64, n as f64);
    Ok(mf * nf * ((kf / mf - 1.0) / denom).sqrt())
}

/// Which of the Liu-bound preconditions `(K, M, N)` fails, if any.
pub fn liu_preconditions(k: u64, m: u64, n: u64) -> Vec<&'static str> {
    let mut failed = Vec::new();
    if k < 3 * m {
        failed.push("K ≥ 3M");
    }
    if m < 2 {
        failed.push("M ≥ 2");
    }
    if n < 2 {
        failed.push("N ≥ 2");
    }
    failed
}

/// `sqrt(M·N·(1 - 2·sqrt(M / 3K)))`.
pub fn liu_bound(k: u64, m: u64, n: u64) -> Result<f64> {
    let failed = liu_preconditions(k, m, n);
    if !failed.is_empty() {
        return Err(QcssError::PreconditionViolated(failed));
    }
    let (kf, mf, nf) = (k as f64, m as f64, n as f64);
    Ok((mf * nf * (1.0 - 2.0 * (mf / (3.0 * kf)).sqrt())).sqrt())
}

pub fn optimality_factor(p: &QcssParams) -> Result<OptimalityReport> {
    let (k, m, n) = (p.set_size, p.flock_size, p.length);
    let welch = welch_bound(k, m, n)?;
    let liu = liu_bound(k, m, n).ok();
    let (bound, bound_used) = match liu {
        Some(b) => (b, BoundKind::Liu),
        None => (welch, BoundKind::Welch),
    };
    if bound <= 0.0 {
        return Err(QcssError::DegenerateParams(format!(
            "{bound_used} bound is zero for K = M"
        )));
    }
    let rho = p.delta_max / bound;
    let classification = if (rho - 1.0).abs() <= OPTIMAL_EPS {
        Classification::Optimal
    } else if rho > 1.0 && rho <= 2.0 {
        Classification::NearOptimal
    } else {
        Classification::NotNearOptimal
    };
    Ok(OptimalityReport {
        welch_bound: welch,
        liu_bound: liu,
        rho,
        bound_used,
        classification,
    })
}

/// Rounds half away from zero to 4 decimal places.
pub fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParamTable {
    /// Asymptotically optimal sets, least prime factor ≥ 5.
    Optimal,
    /// Near-optimal sets, least prime factor 3.
    NearOptimal,
    /// Prime-square lengths `N = p²`.
    PrimeSquare,
}

impl ParamTable {
    pub const ALL: [ParamTable; 3] = [
        ParamTable::Optimal,
        ParamTable::NearOptimal,
        ParamTable::PrimeSquare,
    ];

    /// Prime factors (with multiplicity) of every listed alphabet.
    pub fn alphabets(self) -> &'static [&'static [u64]] {
        match self {
            ParamTable::Optimal => &[
                &[5, 7],
                &[7, 11],
                &[11, 13],
                &[13, 17],
                &[17, 19],
                &[19, 23],
                &[23, 31],
                &[31, 37],
                &[37, 41],
                &[41, 43],
                &[43, 47],
                &[53, 59],
                &[61, 67],
                &[67, 71],
                &[71, 73],
                &[73, 79],
                &[79, 83],
                &[83, 89],
                &[89, 97],
            ],
            ParamTable::NearOptimal => &[
                &[3, 5],
                &[3, 7],
                &[3, 11],
                &[3, 5, 7],
                &[3, 5, 11],
                &[3, 5, 7, 11],
                &[3, 5, 7, 11, 13],
                &[3, 5, 7, 11, 13, 17],
            ],
            ParamTable::PrimeSquare => &[
                &[11, 11],
                &[13, 13],
                &[17, 17],
                &[19, 19],
                &[23, 23],
                &[29, 29],
                &[31, 31],
                &[37, 37],
                &[41, 41],
                &[43, 43],
                &[47, 47],
            ],
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            ParamTable::Optimal => "asymptotically optimal aperiodic QCSSs",
            ParamTable::NearOptimal => "near-optimal aperiodic QCSSs",
            ParamTable::PrimeSquare => "QCSSs with N = p^2",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub alphabet: String,
    pub set_size: u64,
    pub flock_size: u64,
    pub length: u64,
    pub rho: f64,
    pub bound_used: BoundKind,
}

impl TableRow {
    pub fn rho_rounded(&self) -> f64 {
        round4(self.rho)
    }
}

/// Computes `K = N(p_0-1)`, `M = N`, `δ_max = N` and ρ for each alphabet.
pub fn table_rows(table: ParamTable) -> Vec<TableRow> {
    table
        .alphabets()
        .iter()
        .map(|factors| {
            let n: u64 = factors.iter().product();
            let params = QcssParams::for_construction(n).expect("listed alphabets are odd");
            let report = optimality_factor(&params).expect("listed alphabets have K > M");
            let label: Vec<String> = factors.iter().map(u64::to_string).collect();
            TableRow {
                alphabet: format!("Z_{{{}}}", label.join("*")),
                set_size: params.set_size,
                flock_size: params.flock_size,
                length: params.length,
                rho: report.rho,
                bound_used: report.bound_used,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    StrictlyDecreasing,
    StrictlyIncreasing,
    Neither,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoteReport {
    pub rhos: Vec<f64>,
    pub trend: Trend,
}

/// ρ of the construction along a sweep of moduli, and the direction it moves.
pub fn asymptote_check(moduli: &[u64]) -> Result<AsymptoteReport> {
    let rhos = moduli
        .iter()
        .map(|&n| optimality_factor(&QcssParams::for_construction(n)?).map(|r| r.rho))
        .collect::<Result<Vec<_>>>()?;
    let down = rhos.windows(2).all(|w| w[1] < w[0]);
    let up = rhos.windows(2).all(|w| w[1] > w[0]);
    let trend = match (down, up) {
        (true, false) => Trend::StrictlyDecreasing,
        (false, true) => Trend::StrictlyIncreasing,
        _ => Trend::Neither,
    };
    Ok(AsymptoteReport { rhos, trend })
}

/// Closed form of ρ against the Liu bound for `(N(p_0-1), N, N, N)`:
/// `1 / sqrt(1 - 2/sqrt(3(p_0-1)))`. Tends to 1 as `p_0` grows.
pub fn liu_rho_closed_form(p0: u64) -> f64 {
    1.0 / (1.0 - 2.0 / (3.0 * (p0 - 1) as f64).sqrt()).sqrt()
}

/// Closed form of ρ against the Welch bound for `(2N, N, N, N)`:
/// `sqrt(4 - 2/N - 1/N²)`. Tends to 2 as `N` grows.
pub fn welch_rho_closed_form(n: u64) -> f64 {
    let nf = n as f64;
    (4.0 - 2.0 / nf - 1.0 / (nf * nf)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn welch_examples() {
        assert!((welch_bound(30, 15, 15).unwrap() - 225.0 / 869f64.sqrt()).abs() < 1e-12);
        assert!((welch_bound(30, 15, 15).unwrap() - 7.63260).abs() < 1e-5);
        assert_eq!(welch_bound(15, 15, 15).unwrap(), 0.0);
        assert!((welch_bound(42, 21, 21).unwrap() - 441.0 / 1721f64.sqrt()).abs() < 1e-12);
        assert!((welch_bound(42, 21, 21).unwrap() - 10.63036).abs() < 1e-5);
    }

    #[test]
    fn welch_degenerate() {
        let err = welch_bound(10, 20, 5).unwrap_err();
        assert!(err.to_string().contains("K < M"), "{err}");
        assert!(welch_bound(1, 1, 1).is_err());
        assert!(welch_bound(0, 1, 1).is_err());
    }

    #[test]
    fn liu_examples() {
        let b = liu_bound(140, 35, 35).unwrap();
        assert!((b - 35.0 * (1.0 - 1.0 / 3f64.sqrt()).sqrt()).abs() < 1e-12);
        assert!((b - 22.7540).abs() < 1e-4);
        assert!((liu_bound(60, 20, 20).unwrap() - 20.0 / 3f64.sqrt()).abs() < 1e-12);
        assert_eq!(round4(77.0 / liu_bound(462, 77, 77).unwrap()), 1.3754);
    }

    #[test]
    fn liu_lists_every_failed_precondition() {
        assert_eq!(
            liu_bound(2, 1, 1),
            Err(QcssError::PreconditionViolated(vec![
                "K ≥ 3M", "M ≥ 2", "N ≥ 2"
            ]))
        );
        assert_eq!(
            liu_bound(30, 15, 15),
            Err(QcssError::PreconditionViolated(vec!["K ≥ 3M"]))
        );
    }

    #[test]
    fn optimality_examples() {
        let r = optimality_factor(&QcssParams::new(140, 35, 35, 35.0)).unwrap();
        assert_eq!((round4(r.rho), r.bound_used), (1.5382, BoundKind::Liu));
        assert_eq!(r.classification, Classification::NearOptimal);
        assert!(r.liu_bound.unwrap() >= r.welch_bound);

        let r = optimality_factor(&QcssParams::new(30, 15, 15, 15.0)).unwrap();
        assert_eq!((round4(r.rho), r.bound_used), (1.9653, BoundKind::Welch));
        assert!(r.liu_bound.is_none());

        let r = optimality_factor(&QcssParams::new(1430, 143, 143, 143.0)).unwrap();
        assert_eq!(round4(r.rho), 1.2551);
        let r = optimality_factor(&QcssParams::new(1210, 121, 121, 121.0)).unwrap();
        assert_eq!(round4(r.rho), 1.2551);
    }

    #[test]
    fn classification_edges() {
        let liu = liu_bound(140, 35, 35).unwrap();
        let r = optimality_factor(&QcssParams::new(140, 35, 35, liu)).unwrap();
        assert_eq!(r.classification, Classification::Optimal);
        let r = optimality_factor(&QcssParams::new(140, 35, 35, 3.0 * liu)).unwrap();
        assert_eq!(r.classification, Classification::NotNearOptimal);
        assert!(optimality_factor(&QcssParams::new(5, 5, 5, 1.0)).is_err());
    }

    #[test]
    fn table_examples() {
        let iii = table_rows(ParamTable::Optimal);
        assert_eq!(iii.len(), 19);
        let r = &iii[0];
        assert_eq!(
            (
                r.alphabet.as_str(),
                r.set_size,
                r.flock_size,
                r.length,
                r.rho_rounded()
            ),
            ("Z_{5*7}", 140, 35, 35, 1.5382)
        );
        let iv = table_rows(ParamTable::NearOptimal);
        assert_eq!(iv.len(), 8);
        let r = &iv[3];
        assert_eq!((r.set_size, r.length, r.rho_rounded()), (210, 105, 1.9952));
        let v = table_rows(ParamTable::PrimeSquare);
        assert_eq!(v.len(), 11);
        let r = &v[1];
        assert_eq!(
            (r.flock_size, r.length, r.set_size, r.rho_rounded()),
            (169, 169, 2028, 1.2247)
        );
    }

    #[test]
    fn closed_forms_match_general_formula() {
        for row in table_rows(ParamTable::Optimal) {
            let p0 = factorize(row.length).unwrap().p0();
            assert!((row.rho - liu_rho_closed_form(p0)).abs() < 1e-12);
        }
        for row in table_rows(ParamTable::NearOptimal) {
            assert!((row.rho - welch_rho_closed_form(row.length)).abs() < 1e-12);
        }
        assert!((welch_rho_closed_form(1 << 40) - 2.0).abs() < 1e-9);
        assert!((liu_rho_closed_form(1 << 40) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn sweeps_move_toward_their_limits() {
        let optimal: Vec<u64> = ParamTable::Optimal
            .alphabets()
            .iter()
            .map(|f| f.iter().product())
            .collect();
        let r = asymptote_check(&optimal).unwrap();
        assert_eq!(r.trend, Trend::StrictlyDecreasing);
        assert_eq!(round4(*r.rhos.last().unwrap()), 1.0679);

        let near: Vec<u64> = ParamTable::NearOptimal
            .alphabets()
            .iter()
            .map(|f| f.iter().product())
            .collect();
        let r = asymptote_check(&near).unwrap();
        assert_eq!(r.trend, Trend::StrictlyIncreasing);
        assert!(r.rhos.iter().all(|&x| x < 2.0));
    }
}
