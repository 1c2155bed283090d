//! Exact verification of the counting identities behind the closed form.

use alloc::format;
use alloc::vec::Vec;
use core::ops::RangeInclusive;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{DomainError, VerificationFailure};
use crate::rational::{binomial, from_uint, int, powi, sqrt_lower, to_f64, BigRational};

/// The `k`-th Catalan number `C(2k, k) / (k + 1)`.
pub fn catalan(k: u64) -> BigUint {
    binomial(2 * k, k) / (k + 1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalanConvolutionRow {
    pub t: u64,
    pub i: u64,
    /// Sum over compositions `a_1 + ... + a_i = t - 1`, `a_j >= 1`, of
    /// `prod C_{a_j - 1}`.
    pub brute_force: BigUint,
    /// `i / (2t - i - 2) * C(2t - i - 2, t - 1)`.
    pub closed_form: BigRational,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalanConvolutionReport {
    pub rows: Vec<CatalanConvolutionRow>,
}

impl CatalanConvolutionReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn check(&self) -> Result<(), VerificationFailure> {
        match self.rows.iter().find(|r| !r.pass) {
            None => Ok(()),
            Some(r) => Err(VerificationFailure {
                identity: "Catalan i-fold convolution",
                at: format!("t={}, i={}", r.t, r.i),
            }),
        }
    }
}

/// Sum of `prod C_{a_j - 1}` over compositions of `total` into `parts`
/// positive parts, by explicit enumeration.
fn composition_sum(total: u64, parts: u64, catalans: &[BigUint]) -> BigUint {
    if parts == 0 {
        return if total == 0 { BigUint::one() } else { BigUint::zero() };
    }
    let mut acc = BigUint::zero();
    // leave at least one unit for every remaining part
    for first in 1..=total.saturating_sub(parts - 1) {
        let rest = composition_sum(total - first, parts - 1, catalans);
        if !rest.is_zero() {
            acc += &catalans[(first - 1) as usize] * rest;
        }
    }
    acc
}

/// Checks the convolution identity for every `t` in range (`t >= 2`) and
/// every `1 <= i <= t - 1`.
pub fn verify_catalan_convolution(t_range: RangeInclusive<u64>) -> CatalanConvolutionReport {
    let t_hi = *t_range.end();
    let catalans: Vec<BigUint> = (0..t_hi.max(1)).map(catalan).collect();
    let mut rows = Vec::new();
    for t in t_range.filter(|&t| t >= 2) {
        for i in 1..t {
            let brute_force = composition_sum(t - 1, i, &catalans);
            let top = 2 * t - i - 2;
            let closed_form = int(i) / int(top) * from_uint(binomial(top, t - 1));
            let pass = from_uint(brute_force.clone()) == closed_form;
            rows.push(CatalanConvolutionRow {
                t,
                i,
                brute_force,
                closed_form,
                pass,
            });
        }
    }
    CatalanConvolutionReport { rows }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GouldRow {
    pub x: u64,
    pub n: u64,
    /// `sum_{k=0}^{n} C(x+k, k) (x-k)/(x+k) 2^(n-k)`
    pub lhs: BigRational,
    /// `C(x+n, n)`
    pub rhs: BigRational,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GouldReport {
    pub rows: Vec<GouldRow>,
}

impl GouldReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn check(&self) -> Result<(), VerificationFailure> {
        match self.rows.iter().find(|r| !r.pass) {
            None => Ok(()),
            Some(r) => Err(VerificationFailure {
                identity: "Gould binomial identity",
                at: format!("x={}, n={}", r.x, r.n),
            }),
        }
    }
}

/// Checks the identity for all pairs with `x >= 1` and `0 <= n < x`.
pub fn verify_gould_identity(x_range: RangeInclusive<u64>, n_range: RangeInclusive<u64>) -> GouldReport {
    let mut rows = Vec::new();
    for x in x_range.filter(|&x| x >= 1) {
        for n in n_range.clone().filter(|&n| n < x) {
            let mut lhs = BigRational::zero();
            for k in 0..=n {
                let coeff = from_uint(binomial(x + k, k));
                let frac = BigRational::new((x as i64 - k as i64).into(), ((x + k) as i64).into());
                lhs += coeff * frac * from_uint(BigUint::one() << (n - k));
            }
            let rhs = from_uint(binomial(x + n, n));
            let pass = lhs == rhs;
            rows.push(GouldRow { x, n, lhs, rhs, pass });
        }
    }
    GouldReport { rows }
}

/// One partial sum compared with its closed form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesCheck {
    pub partial: BigRational,
    /// Closed-form value; exact when `sqrt(1 - x)` is rational, otherwise a
    /// rational approximation within `10^-40`.
    pub closed_form: BigRational,
    pub closed_form_exact: bool,
    /// Certified bound on the omitted terms.
    pub tail_bound: BigRational,
    pub pass: bool,
}

impl SeriesCheck {
    fn new(partial: BigRational, closed_form: BigRational, exact: bool, tail_bound: BigRational, tol: f64) -> Self {
        let gap = to_f64(&(&closed_form - &partial)).abs();
        let within_tol = gap <= tol + to_f64(&tail_bound);
        // all terms are positive, so an exact closed form is bracketed
        let bracketed = !exact || (partial <= closed_form && closed_form <= &partial + &tail_bound);
        SeriesCheck {
            pass: within_tol && bracketed,
            partial,
            closed_form,
            closed_form_exact: exact,
            tail_bound,
        }
    }

    pub fn error(&self) -> f64 {
        to_f64(&(&self.closed_form - &self.partial)).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinomialSeriesReport {
    pub x: BigRational,
    pub k_max: u64,
    pub tol: f64,
    /// `sum_{k>=0} C(2k,k) (x/4)^k = 1/sqrt(1-x)`
    pub central: SeriesCheck,
    /// `sum_{k>=1} k C(2k,k) (x/4)^k = x / (2 (1-x)^(3/2))`
    pub weighted: SeriesCheck,
    /// `8 sum_{k>=1} k C(2k-1,k) (x/4)^k`, which is 12 at `x = 3/4`.
    pub mean_weighted_term: SeriesCheck,
    /// `4 sum_{k>=0} C(2k-1,k) (x/4)^k` with `C(-1,0) = 1`, which is 6 at `x = 3/4`.
    pub mean_central_term: SeriesCheck,
}

impl BinomialSeriesReport {
    pub fn passed(&self) -> bool {
        self.central.pass && self.weighted.pass && self.mean_weighted_term.pass && self.mean_central_term.pass
    }

    pub fn check(&self) -> Result<(), VerificationFailure> {
        if self.passed() {
            Ok(())
        } else {
            Err(VerificationFailure {
                identity: "binomial series",
                at: format!("x={}, k_max={}, tol={}", self.x, self.k_max, self.tol),
            })
        }
    }
}

/// Partial sums to `k_max` of the two central-binomial generating series,
/// and of the two sums they feed into, compared with closed forms.
///
/// Term ratios give the tails: `a_{k+1}/a_k = x (2k+1)/(2k+2) < x` for the
/// plain series and `x (2k+1)/(2k)` for the `k`-weighted one, so beyond
/// `k_max` both decay at least geometrically.
pub fn verify_binomial_series(x: &BigRational, k_max: u64, tol: f64) -> Result<BinomialSeriesReport, DomainError> {
    let one = BigRational::one();
    if x <= &BigRational::zero() || x >= &one {
        return Err(DomainError::NotInUnitInterval {
            what: "binomial series argument",
        });
    }
    let quarter_x = x / int(4);
    let mut central = BigRational::zero();
    let mut weighted = BigRational::zero();
    let mut odd_weighted = BigRational::zero();
    let mut odd_central = BigRational::one(); // k = 0 term with C(-1, 0) = 1
    let mut pow = BigRational::one();
    for k in 0..=k_max {
        let c = from_uint(binomial(2 * k, k));
        let term = &c * &pow;
        weighted += int(k) * &term;
        central += term;
        if k >= 1 {
            let odd = from_uint(binomial(2 * k - 1, k)) * &pow;
            odd_weighted += int(k) * &odd;
            odd_central += odd;
        }
        pow *= &quarter_x;
    }

    let next = from_uint(binomial(2 * (k_max + 1), k_max + 1)) * powi(&quarter_x, k_max as i64 + 1);
    let central_tail = &next / (&one - x);
    let rho = x * int(2 * k_max + 3) / int(2 * k_max + 2);
    let weighted_tail = if rho < one {
        int(k_max + 1) * &next / (&one - &rho)
    } else {
        // not certified at this k_max
        int(u64::MAX)
    };

    let one_minus = &one - x;
    let (root, exact) = match crate::rational::exact_sqrt(&one_minus) {
        Some(r) => (r, true),
        None => (sqrt_lower(&one_minus, 40), false),
    };
    let central_closed = root.recip();
    let weighted_closed = x / (int(2) * &one_minus * &root);

    Ok(BinomialSeriesReport {
        x: x.clone(),
        k_max,
        tol,
        mean_weighted_term: SeriesCheck::new(
            int(8) * &odd_weighted,
            int(4) * &weighted_closed,
            exact,
            int(4) * &weighted_tail,
            tol,
        ),
        mean_central_term: SeriesCheck::new(
            int(4) * &odd_central,
            int(4) + int(2) * (&central_closed - &one),
            exact,
            int(2) * &central_tail,
            tol,
        ),
        central: SeriesCheck::new(central, central_closed, exact, central_tail, tol),
        weighted: SeriesCheck::new(weighted, weighted_closed, exact, weighted_tail, tol),
    })
}
