//! Closed-form bounds, special constants, and roots.
//!
//! Probability bounds are evaluated in log space; the hole-probability bound
//! additionally has an exact big-rational route used to cross-check the
//! floating evaluation. Root finding is bisection only, with the smallest
//! root selected by an ascending sign scan.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::binomial_coefficient;
use crate::rng::{bernoulli, rng_from_seed};

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Component-size constant of a subcritical sparse random graph:
/// `lambda_c = 3 / (1-c)^2`. Diverges as `c` approaches 1.
pub fn lambda_c(c: f64) -> Result<f64> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::domain(format!("c must be in (0, 1), got {c}")));
    }
    Ok(3.0 / ((1.0 - c) * (1.0 - c)))
}

/// The overlap condition `2 * [q * (1-eps)]^(k-2) <= 1`.
///
/// At `eps = 1/2` this holds for every overlap value `q` in [0, 1].
pub fn condition_one(q: f64, epsilon: f64, k: usize) -> bool {
    debug_assert!((0.0..=1.0).contains(&q) && (0.0..=1.0).contains(&epsilon));
    2.0 * (q * (1.0 - epsilon)).powi(k as i32 - 2) <= 1.0
}

/// Closed-form upper bounds on the two H-edge probabilities:
///
/// ```text
/// mu_eq  <= p * [eps^2 + (1-eps)^2] / (k-2)! * [a(1-eps) + d*eps]^(k-2)
/// mu_neq <= 4p * eps * (1-eps)     / (k-2)! * [a(1-eps) + d*eps]^(k-2)
/// ```
///
/// `a` and `d` are the sizes of the agreement classes V0 and V3.
pub fn mu_bounds(
    n: usize,
    a: usize,
    d: usize,
    p: f64,
    epsilon: f64,
    k: usize,
) -> Result<(f64, f64)> {
    if a + d > n {
        return Err(Error::domain(format!("a + d = {} exceeds n = {n}", a + d)));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("p must be in [0, 1], got {p}")));
    }
    if k < 3 {
        return Err(Error::domain(format!("k must be at least 3, got {k}")));
    }
    let core = (a as f64 * (1.0 - epsilon) + d as f64 * epsilon).powi(k as i32 - 2)
        / factorial(k - 2);
    let mu_eq = p * (epsilon * epsilon + (1.0 - epsilon) * (1.0 - epsilon)) * core;
    let mu_neq = 4.0 * p * epsilon * (1.0 - epsilon) * core;
    Ok((mu_eq, mu_neq))
}

/// The balance point `(3 - sqrt(3)) / 6 ~ 0.2113` where
/// `eps^2 + (1-eps)^2 = 4*eps*(1-eps)`.
pub fn epsilon_0() -> f64 {
    (3.0 - 3.0f64.sqrt()) / 6.0
}

/// The companion root `(3 + sqrt(3)) / 6` of the same quadratic.
pub fn epsilon_0_other_root() -> f64 {
    (3.0 + 3.0f64.sqrt()) / 6.0
}

/// Residual of the defining equation `eps^2 + (1-eps)^2 - 4*eps*(1-eps)`
/// (absolute value).
pub fn balance_residual(epsilon: f64) -> f64 {
    (epsilon * epsilon + (1.0 - epsilon) * (1.0 - epsilon)
        - 4.0 * epsilon * (1.0 - epsilon))
        .abs()
}

/// The cubic whose root is quoted as the qualitative-regime boundary.
pub fn regime_cubic(x: f64) -> f64 {
    2.0 * x * x * x - 2.0 * x * x + 3.0 * x - 1.0
}

/// The cubic root computation alongside the commonly quoted value.
///
/// The quoted 0.2726 does not zero the cubic `2x^3 - 2x^2 + 3x - 1`;
/// bisection puts the unique real root near 0.3966. Both numbers and both
/// residuals are reported so the discrepancy stays visible.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EpsilonC {
    pub computed_root: f64,
    pub residual_at_root: f64,
    pub quoted: f64,
    pub residual_at_quoted: f64,
}

pub fn epsilon_c() -> EpsilonC {
    let root = bisect(regime_cubic, 0.0, 1.0, 1e-12);
    EpsilonC {
        computed_root: root,
        residual_at_root: regime_cubic(root).abs(),
        quoted: 0.2726,
        residual_at_quoted: regime_cubic(0.2726).abs(),
    }
}

/// Bisection on `[lo, hi]`; assumes one sign change. Interval is narrowed to
/// `tol`.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut f_lo = f(lo);
    debug_assert!(f_lo.signum() != f(hi).signum());
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `Pr[G(n, c/n) is connected] <= c^(n-1) / n` for `0 < c < 1`.
pub fn connected_prob_bound(n: usize, c: f64) -> Result<f64> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::domain(format!("c must be in (0, 1), got {c}")));
    }
    if n < 2 {
        return Err(Error::domain(format!("n must be at least 2, got {n}")));
    }
    Ok(c.powi(n as i32 - 1) / n as f64)
}

/// Monte Carlo counterpart of `connected_prob_bound`: the empirical
/// connectivity frequency of `G(n, c/n)` over `samples` draws.
pub fn gnp_connected_frequency(n: usize, c: f64, samples: u64, seed: u64) -> f64 {
    assert!(n >= 2 && n <= 32, "sampler is for small graphs");
    let p = c / n as f64;
    let mut rng = rng_from_seed(seed);
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut connected = 0u64;
    let mut adj = vec![0u32; n];
    for _ in 0..samples {
        adj.iter_mut().for_each(|row| *row = 0);
        for i in 0..n {
            for j in i + 1..n {
                if bernoulli(&mut rng, p) {
                    adj[i] |= 1 << j;
                    adj[j] |= 1 << i;
                }
            }
        }
        let mut visited: u32 = 1;
        loop {
            let mut frontier = 0u32;
            let mut rest = visited;
            while rest != 0 {
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                frontier |= adj[v];
            }
            frontier &= !visited;
            if frontier == 0 {
                break;
            }
            visited |= frontier;
        }
        if visited == full {
            connected += 1;
        }
    }
    connected as f64 / samples as f64
}

/// Exponent of the small-cover probability bound:
/// `h(lambda) = c*(1-lambda)^k - lambda*ln(1/lambda) - (1-lambda)*ln(1/(1-lambda))`.
///
/// Positive `h` means covers of size `lambda*n` are exponentially unlikely.
pub fn cover_exponent(lambda: f64, c: f64, k: usize) -> Result<f64> {
    if !(lambda > 0.0 && lambda < 0.5) {
        return Err(Error::domain(format!("lambda must be in (0, 1/2), got {lambda}")));
    }
    if !(c > 0.0) {
        return Err(Error::domain(format!("c must be positive, got {c}")));
    }
    Ok(c * (1.0 - lambda).powi(k as i32) - lambda * (1.0 / lambda).ln()
        - (1.0 - lambda) * (1.0 / (1.0 - lambda)).ln())
}

/// The largest `q <= 1/2` such that `cover_exponent` stays positive on
/// `(0, q)`: sign scan over 10^4 grid points, then bisection on the first
/// sign change. Returns `1/2` when the exponent never turns negative.
pub fn q_c(c: f64, k: usize) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::domain(format!("c must be positive, got {c}")));
    }
    const GRID: usize = 10_000;
    let h = |lam: f64| cover_exponent(lam, c, k).expect("grid point in domain");
    let mut prev = 1e-15;
    for j in 1..GRID {
        let lam = 0.5 * j as f64 / GRID as f64;
        if h(lam) <= 0.0 {
            return Ok(bisect(h, prev, lam, 1e-12));
        }
        prev = lam;
    }
    Ok(0.5)
}

/// First-moment bound on the probability that some solution pair of
/// agreement count `i` forms a hole:
///
/// ```text
/// C(n,i) * 2^i * [2^(2-k) * lambda * (i/n)^(k-2) * (1 - i/n)]^(n-i-1) / (n-i)
///   * exp(-(lambda*n/C(k,2)) * [1 - (k*C(i,k) + 2*C(i,k-2)*C(n-i,2)) / (2^k*C(n,k))])
/// ```
///
/// Evaluated in log space. At `i = n` the bracket degenerates to `0^(-1)`;
/// the bound is vacuous there and the guarded limit `+inf` is returned.
pub fn hole_prob_bound(n: usize, i: usize, lambda: f64, k: usize) -> Result<f64> {
    validate_hole_params(n, i, lambda, k)?;
    if i == n {
        return Ok(f64::INFINITY);
    }
    let alpha = i as f64 / n as f64;
    let bracket = 2.0f64.powi(2 - k as i32) * lambda * alpha.powi(k as i32 - 2) * (1.0 - alpha);
    let power = n as isize - i as isize - 1;
    let bracket_ln = match (bracket == 0.0, power) {
        (_, 0) => 0.0,
        (true, _) => return Ok(0.0),
        (false, e) => e as f64 * bracket.ln(),
    };
    let ln_value = ln_choose(n, i) + i as f64 * 2.0f64.ln() + bracket_ln
        - ((n - i) as f64).ln()
        - hole_exponent_argument(n, i, lambda, k);
    Ok(ln_value.exp())
}

fn validate_hole_params(n: usize, i: usize, lambda: f64, k: usize) -> Result<()> {
    if n == 0 || i > n {
        return Err(Error::domain(format!("need 0 <= i <= n with n >= 1, got i={i}, n={n}")));
    }
    if k < 3 {
        return Err(Error::domain(format!("k must be at least 3, got {k}")));
    }
    if !(lambda > 0.0) {
        return Err(Error::domain(format!("lambda must be positive, got {lambda}")));
    }
    Ok(())
}

/// `lambda*n/C(k,2) * [1 - (k*C(i,k) + 2*C(i,k-2)*C(n-i,2)) / (2^k*C(n,k))]`.
fn hole_exponent_argument(n: usize, i: usize, lambda: f64, k: usize) -> f64 {
    let allowed = k as f64 * binomial_coefficient(i, k)
        + 2.0 * binomial_coefficient(i, k - 2) * binomial_coefficient(n - i, 2);
    let total = 2.0f64.powi(k as i32) * binomial_coefficient(n, k);
    lambda * n as f64 / binomial_coefficient(k, 2) * (1.0 - allowed / total)
}

fn ln_choose(n: usize, i: usize) -> f64 {
    let i = i.min(n - i);
    (1..=i).map(|j| (((n - i + j) as f64) / j as f64).ln()).sum()
}

/// Exact big-rational evaluation of the same bound (the combinatorial part
/// is exact; only the final `exp` is floating). Cross-check oracle for the
/// log-space route.
pub fn hole_prob_bound_exact(n: usize, i: usize, lambda: f64, k: usize) -> Result<f64> {
    validate_hole_params(n, i, lambda, k)?;
    if i == n {
        return Ok(f64::INFINITY);
    }
    let big = |x: usize| BigInt::from(x);
    let ratio = |num: BigInt, den: BigInt| BigRational::new(num, den);

    let alpha = ratio(big(i), big(n));
    let lambda_exact = BigRational::from_float(lambda)
        .ok_or_else(|| Error::domain("lambda is not finite"))?;
    let two_pow = if k >= 2 {
        ratio(BigInt::one(), BigInt::one() << (k - 2))
    } else {
        BigRational::one()
    };
    let bracket = two_pow
        * lambda_exact.clone()
        * pow_rational(&alpha, (k - 2) as i64)
        * (BigRational::one() - alpha);

    let power = n as i64 - i as i64 - 1;
    if bracket.is_zero() && power > 0 {
        return Ok(0.0);
    }
    let prefactor = ratio(big_choose(n, i) * (BigInt::one() << i), big(n - i))
        * pow_rational(&bracket, power);

    let ln_pre = ln_big_rational(&prefactor);
    Ok((ln_pre - hole_exponent_argument(n, i, lambda, k)).exp())
}

fn big_choose(n: usize, i: usize) -> BigInt {
    let i = i.min(n - i);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for j in 0..i {
        num *= BigInt::from(n - j);
        den *= BigInt::from(j + 1);
    }
    num / den
}

fn pow_rational(x: &BigRational, e: i64) -> BigRational {
    match e.cmp(&0) {
        std::cmp::Ordering::Equal => BigRational::one(),
        std::cmp::Ordering::Greater => x.pow(e as i32),
        std::cmp::Ordering::Less => BigRational::one() / x.pow((-e) as i32),
    }
}

/// `ln` of a positive big rational, stable for values far outside f64 range.
fn ln_big_rational(r: &BigRational) -> f64 {
    debug_assert!(r.is_positive());
    ln_big_int(r.numer()) - ln_big_int(r.denom())
}

fn ln_big_int(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 53 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 53;
    let top: BigInt = x >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * 2.0f64.ln()
}

/// The per-variable rate base of the hole bound and its logarithm:
///
/// ```text
/// f(x) = lambda^(1-x) * (x/2)^((k-2)(1-x)-x)
///        * exp(-lambda * (1 - (k x^k + k(k-1) x^(k-2) (1-x)^2) / 2^k) / C(k,2))
/// g(x) = ln f(x)
/// ```
///
/// `g` runs from `-inf` at `0+` up to `ln 2 - lambda/C(k,2) * (1 - k/2^k) > 0`
/// at `x = 1`, so a smallest root exists in `(0, 1)`.
#[derive(Clone, Copy, Debug)]
pub struct HoleRate {
    pub lambda: f64,
    pub k: usize,
}

impl HoleRate {
    pub fn f(&self, x: f64) -> f64 {
        let k = self.k as i32;
        self.lambda.powf(1.0 - x)
            * (x / 2.0).powf((k as f64 - 2.0) * (1.0 - x) - x)
            * (-self.exponent_term(x)).exp()
    }

    pub fn g(&self, x: f64) -> f64 {
        let k = self.k as f64;
        (1.0 - x) * self.lambda.ln() + ((k - 2.0) * (1.0 - x) - x) * (x / 2.0).ln()
            - self.exponent_term(x)
    }

    fn exponent_term(&self, x: f64) -> f64 {
        let k = self.k as f64;
        self.lambda / binomial_coefficient(self.k, 2)
            * (1.0
                - (k * x.powi(self.k as i32)
                    + k * (k - 1.0) * x.powi(self.k as i32 - 2) * (1.0 - x) * (1.0 - x))
                    / 2.0f64.powi(self.k as i32))
    }

    /// Smallest root of `g` in `(0, 1)`: ascending sign scan over 10^4 grid
    /// points, bisection to 1e-10. `None` if no sign change is found.
    pub fn smallest_root(&self) -> Option<f64> {
        const GRID: usize = 10_000;
        let mut prev_x = 1.0 / GRID as f64;
        let mut prev_g = self.g(prev_x);
        for j in 2..=GRID {
            let x = j as f64 / GRID as f64;
            let gx = self.g(x);
            if prev_g < 0.0 && gx >= 0.0 {
                return Some(bisect(|t| self.g(t), prev_x, x, 1e-10));
            }
            prev_x = x;
            prev_g = gx;
        }
        None
    }
}

/// Validated constructor for the hole-rate functions.
pub fn hole_rate_functions(lambda: f64, k: usize) -> Result<HoleRate> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::domain(format!("lambda must be in (0, 1), got {lambda}")));
    }
    if k < 3 {
        return Err(Error::domain(format!("k must be at least 3, got {k}")));
    }
    Ok(HoleRate { lambda, k })
}

/// Relative discrepancy between the raw Stirling-simplified base
///
/// ```text
/// 2^a * [(a/2)^(k-2) * lambda * (1-a)]^(1-a) * E(a) / (a^a * (1-a)^(1-a))
/// ```
///
/// (with `E` the exponential factor of `f`) and `f(a)` itself. The two are
/// algebraically identical; the simplification absorbs `2^a`, `a^(-a)` and
/// the `(1-a)^(1-a)` cancellation.
pub fn stirling_form_check(alpha: f64, lambda: f64, k: usize) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha must be in (0, 1), got {alpha}")));
    }
    let rate = hole_rate_functions(lambda, k)?;
    let exp_factor = (-rate.exponent_term(alpha)).exp();
    let raw = 2.0f64.powf(alpha)
        * ((alpha / 2.0).powi(k as i32 - 2) * lambda * (1.0 - alpha)).powf(1.0 - alpha)
        * exp_factor
        / (alpha.powf(alpha) * (1.0 - alpha).powf(1.0 - alpha));
    let reference = rate.f(alpha);
    if reference == 0.0 {
        return Ok(if raw == 0.0 { 0.0 } else { f64::INFINITY });
    }
    Ok((raw - reference).abs() / reference.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_c_examples() {
        assert_eq!(lambda_c(0.5).unwrap(), 12.0);
        assert!((lambda_c(1e-12).unwrap() - 3.0).abs() < 1e-9);
        assert!((lambda_c(0.9).unwrap() - 300.0).abs() < 1e-9);
        assert!(lambda_c(1.0).is_err());
    }

    #[test]
    fn condition_one_examples() {
        for q in [0.0, 0.3, 0.77, 1.0] {
            assert!(condition_one(q, 0.5, 3));
        }
        assert!(!condition_one(0.9, 0.0, 4)); // 2 * 0.81 > 1
        assert!(condition_one(0.0, 0.2, 5));
    }

    #[test]
    fn mu_bounds_examples() {
        // At eps = 1/2: eps^2+(1-eps)^2 = 1/2 and 4 eps (1-eps) = 1, so
        // mu_neq = 2 * mu_eq.
        let (eq, neq) = mu_bounds(20, 5, 3, 0.01, 0.5, 3).unwrap();
        assert!((neq - 2.0 * eq).abs() < 1e-15);
        // At the balance point the two bounds coincide.
        let (eq, neq) = mu_bounds(20, 5, 3, 0.01, epsilon_0(), 3).unwrap();
        assert!((eq - neq).abs() < 1e-15);
        // a = d = 0 kills the core factor.
        let (eq, neq) = mu_bounds(20, 0, 0, 0.01, 0.3, 3).unwrap();
        assert_eq!((eq, neq), (0.0, 0.0));
        assert!(mu_bounds(4, 3, 2, 0.01, 0.3, 3).is_err());
    }

    #[test]
    fn mu_ratio_is_independent_of_sizes_and_flips_at_the_balance_point() {
        for eps in [0.05, 0.15, epsilon_0(), 0.3, 0.5] {
            let expected = 4.0 * eps * (1.0 - eps) / (eps * eps + (1.0 - eps) * (1.0 - eps));
            for (a, d, p) in [(3usize, 4usize, 0.01), (10, 0, 0.2), (1, 7, 0.9)] {
                let (eq, neq) = mu_bounds(20, a, d, p, eps, 4).unwrap();
                if eq > 0.0 {
                    assert!((neq / eq - expected).abs() < 1e-12);
                }
            }
            if eps < epsilon_0() {
                assert!(expected < 1.0);
            } else if eps > epsilon_0() {
                assert!(expected > 1.0);
            }
        }
    }

    #[test]
    fn epsilon_0_residual_and_both_roots() {
        assert!((epsilon_0() - 0.211_324_865_4).abs() < 1e-9);
        assert!(balance_residual(epsilon_0()) <= 1e-14);
        assert!(balance_residual(epsilon_0_other_root()) <= 1e-14);
        assert!((epsilon_0_other_root() - 0.788_675_134_6).abs() < 1e-9);
    }

    #[test]
    fn epsilon_c_reports_root_and_quoted_value() {
        let ec = epsilon_c();
        assert!(ec.residual_at_root <= 1e-10);
        assert!((ec.computed_root - 0.3966).abs() < 1e-3, "{}", ec.computed_root);
        assert_eq!(ec.quoted, 0.2726);
        // The quoted value does not zero the cubic; the discrepancy is the point.
        assert!(ec.residual_at_quoted > 0.1);
    }

    #[test]
    fn connected_bound_examples() {
        assert_eq!(connected_prob_bound(8, 0.5).unwrap(), 0.0009765625);
        assert!((connected_prob_bound(2, 0.3).unwrap() - 0.15).abs() < 1e-15);
        assert!(connected_prob_bound(2, 1.2).is_err());
    }

    #[test]
    fn cover_exponent_examples() {
        // Entropy dominates at large lambda and tiny c.
        assert!(cover_exponent(0.4, 0.01, 3).unwrap() < 0.0);
        assert!(cover_exponent(0.01, 1.0, 3).unwrap() > 0.0);
        // The lambda -> 0 limit is c.
        assert!((cover_exponent(1e-9, 0.37, 3).unwrap() - 0.37).abs() < 1e-6);
    }

    #[test]
    fn q_c_root_and_monotonicity() {
        let q = q_c(0.2667, 3).unwrap();
        assert!(q > 0.0 && q < 0.5);
        // Residual at the returned root.
        assert!(cover_exponent(q, 0.2667, 3).unwrap().abs() <= 1e-9);
        // Large c caps at 1/2.
        assert_eq!(q_c(10.0, 3).unwrap(), 0.5);
        // Monotone in c.
        let mut prev = 0.0;
        for c in [0.05, 0.1, 0.5, 1.0, 2.0] {
            let q = q_c(c, 3).unwrap();
            assert!(q >= prev, "q_c not monotone at c={c}");
            prev = q;
        }
    }

    #[test]
    fn hole_bound_edge_cases() {
        assert_eq!(hole_prob_bound(10, 10, 0.9, 3).unwrap(), f64::INFINITY);
        assert_eq!(hole_prob_bound(10, 0, 0.9, 3).unwrap(), 0.0);
        assert!(hole_prob_bound(10, 5, 0.9, 3).unwrap() >= 0.0);
        assert!(hole_prob_bound(10, 11, 0.9, 3).is_err());
    }

    #[test]
    fn hole_bound_log_space_matches_big_rational() {
        for n in [10usize, 30, 60] {
            for i in 1..n {
                for (lambda, k) in [(0.9, 3usize), (0.5, 4), (0.1, 5)] {
                    let fast = hole_prob_bound(n, i, lambda, k).unwrap();
                    let exact = hole_prob_bound_exact(n, i, lambda, k).unwrap();
                    if exact == 0.0 {
                        assert_eq!(fast, 0.0);
                        continue;
                    }
                    let rel = (fast - exact).abs() / exact;
                    assert!(rel <= 1e-9, "n={n} i={i} lambda={lambda} k={k} rel={rel}");
                }
            }
        }
        // The documented spot check.
        let fast = hole_prob_bound(100, 50, 0.9, 3).unwrap();
        let exact = hole_prob_bound_exact(100, 50, 0.9, 3).unwrap();
        assert!((fast - exact).abs() / exact <= 1e-9);
    }

    #[test]
    fn hole_rate_known_values() {
        let rate = hole_rate_functions(0.9, 3).unwrap();
        // g(1) = ln 2 - (lambda / C(k,2)) * (1 - k/2^k)
        let expect = 2.0f64.ln() - 0.3 * 0.625;
        assert!((rate.g(1.0) - expect).abs() < 1e-12);
        assert!((rate.g(1.0) - 0.505_647_2).abs() < 1e-6);
        // g heads to -inf near zero.
        assert!(rate.g(1e-6) < -10.0);
        // The identity exp(g) = f on a grid.
        for j in 1..1000 {
            let x = j as f64 / 1000.0;
            let f = rate.f(x);
            let rel = (rate.g(x).exp() - f).abs() / f;
            assert!(rel <= 1e-12, "x={x} rel={rel}");
        }
    }

    #[test]
    fn hole_rate_smallest_root() {
        let rate = hole_rate_functions(0.9, 3).unwrap();
        let x = rate.smallest_root().expect("root exists");
        assert!(rate.g(x).abs() < 1e-8);
        assert!(x > 0.5 && x < 0.7, "x_k = {x}");
        // No earlier sign change: g negative strictly before the root.
        for j in 1..100 {
            let t = x * j as f64 / 100.0;
            assert!(rate.g(t) < 0.0, "t={t}");
        }
    }

    #[test]
    fn stirling_identity_across_the_grid() {
        for &k in &[3usize, 4, 5] {
            for &lambda in &[0.1, 0.5, 0.9] {
                for j in 1..=99 {
                    let alpha = j as f64 / 100.0;
                    let rel = stirling_form_check(alpha, lambda, k).unwrap();
                    assert!(rel <= 1e-10, "alpha={alpha} lambda={lambda} k={k} rel={rel}");
                }
            }
        }
        // Endpoint stability spot checks.
        assert!(stirling_form_check(0.5, 0.9, 3).unwrap() <= 1e-12);
        assert!(stirling_form_check(0.99, 0.5, 4).unwrap() <= 1e-10);
    }

    #[test]
    fn gnp_frequency_is_deterministic() {
        let a = gnp_connected_frequency(6, 0.5, 20_000, 9);
        let b = gnp_connected_frequency(6, 0.5, 20_000, 9);
        assert_eq!(a, b);
        assert!(a < connected_prob_bound(6, 0.5).unwrap() + 0.01);
    }
}
