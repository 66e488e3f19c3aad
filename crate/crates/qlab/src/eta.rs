//! Eta-quotient modularity analyzer.
//!
//! For a finite product over divisors delta of a level N of eta(delta z)
//! raised to integer exponents r_delta, this module computes:
//!
//! - the weight k = (1/2) sum r_delta,
//! - the two 24-divisibility conditions on sum delta r_delta and
//!   sum (N/delta) r_delta required before any modularity conclusion,
//! - the quadratic character descriptor ((-1)^k s / .) with
//!   s = prod delta^{r_delta} kept in factored form (exponents may be
//!   negative, so s is never materialized as an integer),
//! - exact rational cusp orders, one representative cusp per divisor d | N,
//!   and a holomorphy verdict from their signs.
//!
//! It also builds the specific one-parameter family of quotients at level
//! N = 2^5 * 3^2 * p * m used to establish divisibility density, together
//! with the closed-form cusp-order lower bound L that certifies holomorphy;
//! both the direct order formula and L are computed so their signs can be
//! cross-checked.

use std::collections::BTreeMap;

use num_rational::Ratio;

use crate::error::{QlabError, Result};
use crate::number_theory::{gcd, legendre};

pub type Rational = Ratio<i128>;

/// An eta-quotient: level N and a map delta -> r_delta with every delta | N.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaQuotient {
    level: u64,
    factors: BTreeMap<u64, i64>,
}

/// Verdict of the two 24-divisibility level conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LevelConditions {
    Ok,
    FailsDeltaSum,
    FailsCodeltaSum,
}

/// The quadratic character data ((-1)^sign_exponent * s / .), with s kept as
/// a prime factorization because exponents may be negative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterDescriptor {
    /// Parity of the weight: the character numerator carries (-1)^k.
    pub sign_exponent: u64,
    /// Prime -> exponent factorization of s = prod delta^{r_delta}.
    pub s_factors: BTreeMap<u64, i64>,
}

impl CharacterDescriptor {
    /// Evaluate the character at an odd prime not dividing s: the product of
    /// Legendre symbols of each factor, with exponent parity.
    pub fn evaluate_at_odd_prime(&self, p: u64) -> Result<i64> {
        for (&q, _) in &self.s_factors {
            if p == q {
                return Err(QlabError::NotCoprime(p, q));
            }
        }
        let mut value = if self.sign_exponent % 2 == 1 { legendre(-1, p)? } else { 1 };
        for (&q, &e) in &self.s_factors {
            if e.rem_euclid(2) == 1 {
                value *= legendre(q as i64, p)?;
            }
        }
        Ok(value)
    }
}

/// Order of vanishing at a representative cusp c/d.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CuspOrderReport {
    pub c: u64,
    pub d: u64,
    pub order: Rational,
}

/// Sign summary over all divisor cusps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HolomorphyVerdict {
    /// All orders are >= 0; carries every per-divisor report.
    HolomorphicAllCusps(Vec<CuspOrderReport>),
    /// At least one order is negative; carries the negative ones.
    NegativeAt(Vec<CuspOrderReport>),
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

fn factorize(mut n: u64) -> BTreeMap<u64, u64> {
    let mut out = BTreeMap::new();
    let mut p = 2;
    while p * p <= n {
        while n % p == 0 {
            *out.entry(p).or_insert(0) += 1;
            n /= p;
        }
        p += 1;
    }
    if n > 1 {
        *out.entry(n).or_insert(0) += 1;
    }
    out
}

impl EtaQuotient {
    /// Build from a level and (delta, r_delta) pairs; deltas must be distinct
    /// divisors of the level and exponents nonzero.
    pub fn new(level: u64, factors: &[(u64, i64)]) -> Result<Self> {
        if level == 0 {
            return Err(QlabError::InvalidSpec("level must be positive".into()));
        }
        let mut map = BTreeMap::new();
        for &(delta, r) in factors {
            if delta == 0 || level % delta != 0 {
                return Err(QlabError::DeltaNotDividingLevel { delta, level });
            }
            if r == 0 {
                return Err(QlabError::InvalidSpec(format!("exponent for delta={delta} is zero")));
            }
            if map.insert(delta, r).is_some() {
                return Err(QlabError::DuplicateDelta(delta));
            }
        }
        Ok(EtaQuotient { level, factors: map })
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn factors(&self) -> &BTreeMap<u64, i64> {
        &self.factors
    }

    /// Weight k = (1/2) sum r_delta as an exact rational.
    pub fn weight(&self) -> Rational {
        Rational::new(self.factors.values().map(|&r| r as i128).sum(), 2)
    }

    /// Integer weight, or an error when the exponent sum is odd.
    pub fn integral_weight(&self) -> Result<i64> {
        let w = self.weight();
        if w.is_integer() {
            Ok(*w.numer() as i64 / *w.denom() as i64)
        } else {
            Err(QlabError::NonIntegralWeight(format!("{}/{}", w.numer(), w.denom())))
        }
    }

    /// Check sum delta r_delta = 0 (mod 24) and sum (N/delta) r_delta = 0 (mod 24).
    pub fn check_level_conditions(&self) -> LevelConditions {
        let delta_sum: i128 =
            self.factors.iter().map(|(&d, &r)| d as i128 * r as i128).sum();
        if delta_sum.rem_euclid(24) != 0 {
            return LevelConditions::FailsDeltaSum;
        }
        let codelta_sum: i128 = self
            .factors
            .iter()
            .map(|(&d, &r)| (self.level / d) as i128 * r as i128)
            .sum();
        if codelta_sum.rem_euclid(24) != 0 {
            return LevelConditions::FailsCodeltaSum;
        }
        LevelConditions::Ok
    }

    /// The character data ((-1)^k s / .); requires an integral weight.
    pub fn character_descriptor(&self) -> Result<CharacterDescriptor> {
        let k = self.integral_weight()?;
        let mut s_factors: BTreeMap<u64, i64> = BTreeMap::new();
        for (&delta, &r) in &self.factors {
            for (q, e) in factorize(delta) {
                *s_factors.entry(q).or_insert(0) += e as i64 * r;
            }
        }
        s_factors.retain(|_, e| *e != 0);
        Ok(CharacterDescriptor { sign_exponent: k.rem_euclid(2) as u64, s_factors })
    }

    /// Exact order of vanishing at the cusp c/d:
    /// (N/24) sum over delta of gcd(d, delta)^2 r_delta / (gcd(d, N/d) d delta).
    pub fn cusp_order(&self, c: u64, d: u64) -> Result<Rational> {
        if d == 0 || self.level % d != 0 {
            return Err(QlabError::DeltaNotDividingLevel { delta: d, level: self.level });
        }
        if gcd(c, d) != 1 {
            return Err(QlabError::NotCoprime(c, d));
        }
        let n = self.level;
        let gdn = gcd(d, n / d);
        let mut total = Rational::new(0, 1);
        for (&delta, &r) in &self.factors {
            let g = gcd(d, delta) as i128;
            total += Rational::new(g * g * r as i128, (gdn * d * delta) as i128);
        }
        Ok(total * Rational::new(n as i128, 24))
    }

    /// One representative cusp per divisor d | N, with orders and a verdict.
    /// Requires integral weight and satisfied level conditions.
    pub fn holomorphy_verdict(&self) -> Result<HolomorphyVerdict> {
        self.integral_weight()?;
        match self.check_level_conditions() {
            LevelConditions::Ok => {}
            other => {
                return Err(QlabError::InvalidSpec(format!(
                    "level conditions not satisfied: {other:?}"
                )))
            }
        }
        let mut reports = Vec::new();
        let mut negatives = Vec::new();
        for d in divisors(self.level) {
            let order = self.cusp_order(1, d)?;
            let report = CuspOrderReport { c: 1, d, order };
            if report.order < Rational::new(0, 1) {
                negatives.push(report.clone());
            }
            reports.push(report);
        }
        if negatives.is_empty() {
            Ok(HolomorphyVerdict::HolomorphicAllCusps(reports))
        } else {
            Ok(HolomorphyVerdict::NegativeAt(negatives))
        }
    }
}

/// Parameters of the level-(2^5 3^2 p m) quotient family: prime p >= 5,
/// m a product of primes >= 5 coprime to p (m = 1 allowed), j >= 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuotientFamilySpec {
    pub p: u64,
    pub m: u64,
    pub j: u32,
}

impl QuotientFamilySpec {
    pub fn new(p: u64, m: u64, j: u32) -> Result<Self> {
        if p < 5 || !crate::number_theory::is_prime(p) {
            return Err(QlabError::InvalidSpec(format!("p={p} must be a prime >= 5")));
        }
        if m == 0 || factorize(m).keys().any(|&q| q < 5) {
            return Err(QlabError::InvalidSpec(format!(
                "m={m} must be a product of primes >= 5"
            )));
        }
        if gcd(p, m) != 1 {
            return Err(QlabError::NotCoprime(p, m));
        }
        if j == 0 {
            return Err(QlabError::InvalidSpec("j must be >= 1".into()));
        }
        Ok(QuotientFamilySpec { p, m, j })
    }

    pub fn level(&self) -> u64 {
        32 * 9 * self.p * self.m
    }
}

/// The quotient with factors {24: p^{j+1}+p-2, 24m: 1, 24p: -p^j} at level
/// 2^5 3^2 p m; for m = 1 the first two factors coincide and merge.
pub fn build_family_quotient(spec: QuotientFamilySpec) -> Result<EtaQuotient> {
    let p = spec.p as i64;
    let pj = p.pow(spec.j);
    let mut factors: BTreeMap<u64, i64> = BTreeMap::new();
    *factors.entry(24).or_insert(0) += pj * p + p - 2;
    *factors.entry(24 * spec.m).or_insert(0) += 1;
    *factors.entry(24 * spec.p).or_insert(0) += -pj;
    let pairs: Vec<(u64, i64)> = factors.into_iter().filter(|&(_, r)| r != 0).collect();
    EtaQuotient::new(spec.level(), &pairs)
}

/// The closed-form holomorphy bound at divisor d:
/// L = (p^{j+1}+p-2) p G1 + (p/m) G2 - p^j with
/// G1 = gcd^2(d,24)/gcd^2(d,24p), G2 = gcd^2(d,24m)/gcd^2(d,24p).
/// Returns (L, L >= 0).
pub fn cusp_order_bound(spec: QuotientFamilySpec, d: u64) -> Result<(Rational, bool)> {
    let n = spec.level();
    if d == 0 || n % d != 0 {
        return Err(QlabError::DeltaNotDividingLevel { delta: d, level: n });
    }
    let sq = |x: u64| (x as i128) * (x as i128);
    let g24p = sq(gcd(d, 24 * spec.p));
    let g1 = Rational::new(sq(gcd(d, 24)), g24p);
    let g2 = Rational::new(sq(gcd(d, 24 * spec.m)), g24p);
    let p = spec.p as i128;
    let pj = p.pow(spec.j);
    let l = Rational::from_integer(pj * p + p - 2) * Rational::from_integer(p) * g1
        + Rational::new(p, spec.m as i128) * g2
        - Rational::from_integer(pj);
    let nonneg = l >= Rational::new(0, 1);
    Ok((l, nonneg))
}
