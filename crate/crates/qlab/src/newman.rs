//! Exact coefficient recurrences for sparse eta-type products.
//!
//! Two shapes are verified, both over the integers with no reduction:
//!
//! * single-prime recurrences c(pn + d) = c(d) c(n) - mult * c((n - d)/p)
//!   for six built-in products f_1^a f_b, where d is the product's
//!   24-normalized weight times (p - 1)/24 and mult depends on the product
//!   and a quadratic symbol at p;
//! * prime-square recurrences a(n p^2 + D) = g(n) a(n) - p^{r+s-2} a((n - D)/p^2)
//!   for f_1^r f_q^s with r + s odd, where g(n) is an affine function of a
//!   Legendre symbol in n and D = (r + sq)(p^2 - 1)/24.
//!
//! Terms with non-integral or negative argument are zero. The constant part
//! of g is calibrated at n = 0 (where the recurrence forces g(0) = a(D)) and
//! cross-checked at n = 1.

use crate::error::{QlabError, Result};
use crate::number_theory::{is_prime, legendre};
use crate::report::{Status, VerificationReport, Witness};
use crate::series::{EtaProductSpec, QSeries, Ring};

/// The six built-in products with a single-prime coefficient recurrence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NewmanSeriesId {
    /// f_1 f_7, primes p = 1 (mod 6)
    F1F7,
    /// f_1 f_5, primes p = 1 (mod 4)
    F1F5,
    /// f_1 f_2, primes p = 1 (mod 8)
    F1F2,
    /// f_1^5 f_2, primes p = 1 (mod 24)
    F1p5F2,
    /// f_1^9 f_2, primes p = 1 (mod 24)
    F1p9F2,
    /// f_1^11 f_2, primes p = 1 (mod 24)
    F1p11F2,
}

pub const NEWMAN_SERIES: [NewmanSeriesId; 6] = [
    NewmanSeriesId::F1F7,
    NewmanSeriesId::F1F5,
    NewmanSeriesId::F1F2,
    NewmanSeriesId::F1p5F2,
    NewmanSeriesId::F1p9F2,
    NewmanSeriesId::F1p11F2,
];

impl NewmanSeriesId {
    pub fn label(self) -> &'static str {
        match self {
            NewmanSeriesId::F1F7 => "f1*f7",
            NewmanSeriesId::F1F5 => "f1*f5",
            NewmanSeriesId::F1F2 => "f1*f2",
            NewmanSeriesId::F1p5F2 => "f1^5*f2",
            NewmanSeriesId::F1p9F2 => "f1^9*f2",
            NewmanSeriesId::F1p11F2 => "f1^11*f2",
        }
    }

    pub fn eta_factors(self) -> Vec<(u64, i64)> {
        match self {
            NewmanSeriesId::F1F7 => vec![(1, 1), (7, 1)],
            NewmanSeriesId::F1F5 => vec![(1, 1), (5, 1)],
            NewmanSeriesId::F1F2 => vec![(1, 1), (2, 1)],
            NewmanSeriesId::F1p5F2 => vec![(1, 5), (2, 1)],
            NewmanSeriesId::F1p9F2 => vec![(1, 9), (2, 1)],
            NewmanSeriesId::F1p11F2 => vec![(1, 11), (2, 1)],
        }
    }

    /// Sum of delta * r over the factors; the recurrence shift is this times
    /// (p - 1)/24, so p must be 1 modulo 24/gcd(24, weight24) (and odd).
    pub fn weight24(self) -> u64 {
        self.eta_factors().iter().map(|&(d, r)| d * r as u64).sum()
    }

    /// Modulus of the admissible prime class p = 1 (mod class_modulus).
    pub fn class_modulus(self) -> u64 {
        match self {
            NewmanSeriesId::F1F7 => 6,
            NewmanSeriesId::F1F5 => 4,
            NewmanSeriesId::F1F2 => 8,
            NewmanSeriesId::F1p5F2 | NewmanSeriesId::F1p9F2 | NewmanSeriesId::F1p11F2 => 24,
        }
    }

    /// Shift d = weight24 * (p - 1)/24 for an admissible prime.
    pub fn shift(self, p: u64) -> Result<u64> {
        self.check_prime(p)?;
        Ok(self.weight24() * (p - 1) / 24)
    }

    /// The multiplier in front of c((n - d)/p).
    pub fn multiplier(self, p: u64) -> Result<i128> {
        self.check_prime(p)?;
        let m = match self {
            NewmanSeriesId::F1F7 => {
                let sign = if (p - 1) / 2 % 2 == 0 { 1 } else { -1 };
                (sign * legendre(7, p)?) as i128
            }
            NewmanSeriesId::F1F5 => legendre(5, p)? as i128,
            NewmanSeriesId::F1F2 => legendre(2, p)? as i128,
            NewmanSeriesId::F1p5F2 => (p as i128).pow(2),
            NewmanSeriesId::F1p9F2 => (p as i128).pow(4),
            NewmanSeriesId::F1p11F2 => (p as i128).pow(5),
        };
        Ok(m)
    }

    fn check_prime(self, p: u64) -> Result<()> {
        let m = self.class_modulus();
        if !is_prime(p) || p % m != 1 % m {
            return Err(QlabError::BadProgression { step: m, residue: p % m });
        }
        Ok(())
    }

    /// Integer q-expansion (no q-power prefactor) to the given truncation.
    pub fn expansion(self, trunc: usize) -> Result<QSeries> {
        let spec = EtaProductSpec::new(self.eta_factors(), 0)?;
        QSeries::eta_product(&spec, Ring::Integers, trunc)
    }
}

/// Verify c(pn + d) = c(d) c(n) - mult * c((n - d)/p) for n in 0..=n_max,
/// exactly over the integers.
pub fn newman1_verify(id: NewmanSeriesId, p: u64, n_max: u64) -> Result<VerificationReport> {
    let start = std::time::Instant::now();
    let d = id.shift(p)?;
    let mult = id.multiplier(p)?;
    let trunc = (p * n_max + d) as usize;
    let c = id.expansion(trunc)?;
    let cd = c.coeff(d as i64)? as i128;

    let mut report = VerificationReport::new(
        format!("newman-single/{}", id.label()),
        format!("p={p}, shift={d}, mult={mult}"),
    );
    report.n_max = n_max;
    for n in 0..=n_max {
        let lhs = c.coeff((p * n + d) as i64)? as i128;
        let back = c.coeff_ratio(n as i64 - d as i64, p as i64)? as i128;
        let rhs = cd * c.coeff(n as i64)? as i128 - mult * back;
        report.checked += 1;
        if lhs != rhs && report.witnesses.len() < 5 {
            report.witnesses.push(Witness { n, lhs: lhs.to_string(), rhs: rhs.to_string() });
        }
    }
    report.status = if report.witnesses.is_empty() { Status::Pass } else { Status::Fail };
    report.millis = start.elapsed().as_millis();
    Ok(report)
}

/// Parameters of a prime-square recurrence on f_1^r f_q^s.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NewmanIIParams {
    pub q: u64,
    pub r: u32,
    pub s: u32,
    pub p: u64,
}

impl NewmanIIParams {
    pub fn new(q: u64, r: u32, s: u32, p: u64) -> Result<Self> {
        if q < 2 {
            return Err(QlabError::InvalidSpec(format!("q={q} must be >= 2")));
        }
        if r == 0 || s == 0 {
            return Err(QlabError::InvalidSpec("exponents r, s must be positive".into()));
        }
        if (r + s) % 2 == 0 {
            return Err(QlabError::InvalidSpec(format!(
                "r + s = {} must be odd",
                r + s
            )));
        }
        if r + s < 3 {
            return Err(QlabError::InvalidSpec("r + s must be at least 3".into()));
        }
        if p < 5 || !is_prime(p) {
            return Err(QlabError::NotOddPrime(p));
        }
        let params = NewmanIIParams { q, r, s, p };
        if (params.r as u64 + params.s as u64 * q) * (p * p - 1) % 24 != 0 {
            return Err(QlabError::InvalidSpec(format!(
                "(r + s q)(p^2 - 1) = {} is not divisible by 24",
                (r as u64 + s as u64 * q) * (p * p - 1)
            )));
        }
        Ok(params)
    }

    pub fn label(&self) -> String {
        format!("f1^{}*f{}^{}", self.r, self.q, self.s)
    }

    /// The index shift D = (r + s q)(p^2 - 1)/24.
    pub fn delta(&self) -> u64 {
        (self.r as u64 + self.s as u64 * self.q) * (self.p * self.p - 1) / 24
    }

    /// theta = (-1)^{(r+s-1)/2} * 2 q^s; its symbol at p scales the
    /// Legendre-dependent part of g(n).
    pub fn theta(&self) -> Result<i64> {
        let sign: i64 = if (self.r + self.s - 1) / 2 % 2 == 0 { 1 } else { -1 };
        (self.q as i64)
            .checked_pow(self.s)
            .and_then(|x| x.checked_mul(2 * sign))
            .ok_or(QlabError::Overflow)
    }

    /// p^{(r+s-3)/2}, the magnitude of the Legendre-dependent part of g(n).
    pub fn half_power(&self) -> i128 {
        (self.p as i128).pow((self.r + self.s - 3) / 2)
    }

    /// Integer q-expansion of f_1^r f_q^s (no prefactor).
    pub fn expansion(&self, trunc: usize) -> Result<QSeries> {
        let spec = EtaProductSpec::new(
            vec![(1, self.r as i64), (self.q, self.s as i64)],
            0,
        )?;
        QSeries::eta_product(&spec, Ring::Integers, trunc)
    }

    /// The symbol-independent constant w of g(n) = w - (theta/p) p^{(r+s-3)/2}
    /// ((n - D)/p): calibrated so that g(0) = a(D), i.e.
    /// w = a(D) + (theta/p) p^{(r+s-3)/2} (-D/p).
    pub fn w_constant(&self, a: &QSeries) -> Result<i128> {
        let d = self.delta();
        let a_d = a.coeff(d as i64)? as i128;
        let sym = (legendre(self.theta()?, self.p)? * legendre(-(d as i64), self.p)?) as i128;
        Ok(a_d + sym * self.half_power())
    }

    fn gamma0(&self, w: i128, n: i64) -> Result<i128> {
        let d = self.delta() as i64;
        let sym = (legendre(self.theta()?, self.p)? * legendre(n - d, self.p)?) as i128;
        Ok(w - sym * self.half_power())
    }
}

/// Verify a(n p^2 + D) = g(n) a(n) - p^{r+s-2} a((n - D)/p^2) for
/// n in 0..=n_max, exactly over the integers, with g calibrated at n = 0 and
/// its shape cross-checked at n = 1.
pub fn newman2_verify(params: NewmanIIParams, n_max: u64) -> Result<VerificationReport> {
    let start = std::time::Instant::now();
    let p = params.p;
    let d = params.delta();
    if params.q % p == 0 {
        // The recurrence requires p coprime to q: at p | q the symbol
        // (theta/p) vanishes and the identity is numerically false (e.g.
        // q = 5, r = 2, s = 1, p = 5 fails at n = 7).
        let mut report = VerificationReport::new(
            format!("newman-square/{}", params.label()),
            format!("p={p}, delta={d}"),
        );
        report.skip_reason = Some(format!(
            "hypothesis p coprime to q unmet (p={p} divides q={})",
            params.q
        ));
        report.millis = start.elapsed().as_millis();
        return Ok(report);
    }
    let trunc = (n_max * p * p + d) as usize;
    let a = params.expansion(trunc)?;
    let w = params.w_constant(&a)?;
    let back_mult = (p as i128).pow(params.r + params.s - 2);

    let mut report = VerificationReport::new(
        format!("newman-square/{}", params.label()),
        format!("p={p}, delta={d}, w={w}"),
    );
    report.n_max = n_max;
    report.notes.push(format!("g(n) constant part w = {w} calibrated at n = 0"));

    // Independent consistency check: the n = 1 instance of the recurrence
    // must reproduce the same w (a(1) = r != 0, so it is solvable for g(1)).
    if n_max >= 1 && a.coeff(1)? != 0 {
        let lhs = a.coeff((p * p + d) as i64)? as i128;
        let sym = (legendre(params.theta()?, p)? * legendre(1 - d as i64, p)?) as i128;
        let g1 = params.gamma0(w, 1)?;
        let w_from_n1 = lhs / a.coeff(1)? as i128 + sym * params.half_power();
        if lhs % a.coeff(1)? as i128 == 0 && w_from_n1 == w {
            report.notes.push("w reconfirmed from the n = 1 instance".into());
        } else {
            report.notes.push(format!(
                "n = 1 instance implies g(1) = {} vs formula {g1}",
                lhs as f64 / a.coeff(1)? as f64
            ));
        }
    }

    for n in 0..=n_max {
        let lhs = a.coeff((n * p * p + d) as i64)? as i128;
        let back = a.coeff_ratio(n as i64 - d as i64, (p * p) as i64)? as i128;
        let rhs = params.gamma0(w, n as i64)? * a.coeff(n as i64)? as i128 - back_mult * back;
        report.checked += 1;
        if lhs != rhs && report.witnesses.len() < 5 {
            report.witnesses.push(Witness { n, lhs: lhs.to_string(), rhs: rhs.to_string() });
        }
    }
    report.status = if report.witnesses.is_empty() { Status::Pass } else { Status::Fail };
    report.millis = start.elapsed().as_millis();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shifts_and_classes() {
        assert_eq!(NewmanSeriesId::F1F7.shift(7).unwrap(), 2);
        assert_eq!(NewmanSeriesId::F1F7.shift(13).unwrap(), 4);
        assert_eq!(NewmanSeriesId::F1F5.shift(5).unwrap(), 1);
        assert_eq!(NewmanSeriesId::F1F2.shift(17).unwrap(), 2);
        assert_eq!(NewmanSeriesId::F1p5F2.shift(73).unwrap(), 21);
        assert_eq!(NewmanSeriesId::F1p9F2.shift(73).unwrap(), 33);
        assert_eq!(NewmanSeriesId::F1p11F2.shift(97).unwrap(), 52);
        // Primes outside the class are rejected.
        assert!(NewmanSeriesId::F1F7.shift(5).is_err());
        assert!(NewmanSeriesId::F1F2.shift(13).is_err());
        assert!(NewmanSeriesId::F1p5F2.shift(13).is_err());
    }

    #[test]
    fn single_prime_recurrences_hold() {
        let cases: &[(NewmanSeriesId, &[u64])] = &[
            (NewmanSeriesId::F1F7, &[7, 13, 19]),
            (NewmanSeriesId::F1F5, &[5, 13, 17]),
            (NewmanSeriesId::F1F2, &[17, 41]),
            (NewmanSeriesId::F1p5F2, &[73]),
            (NewmanSeriesId::F1p9F2, &[73]),
            (NewmanSeriesId::F1p11F2, &[97]),
        ];
        for &(id, primes) in cases {
            for &p in primes {
                let report = newman1_verify(id, p, 60).unwrap();
                assert_eq!(report.status, Status::Pass, "{} p={p}: {:?}", id.label(), report.witnesses);
                assert_eq!(report.checked, 61);
            }
        }
    }

    #[test]
    fn single_prime_recurrence_detects_perturbation() {
        // A wrong multiplier must produce witnesses: rebuild the check with
        // mult replaced by mult + 1 and confirm a mismatch exists.
        let id = NewmanSeriesId::F1F5;
        let p = 13u64;
        let d = id.shift(p).unwrap();
        let mult = id.multiplier(p).unwrap() + 1;
        let c = id.expansion((p * 60 + d) as usize).unwrap();
        let cd = c.coeff(d as i64).unwrap() as i128;
        let mismatch = (0..=60u64).any(|n| {
            let lhs = c.coeff((p * n + d) as i64).unwrap() as i128;
            let back = c.coeff_ratio(n as i64 - d as i64, p as i64).unwrap() as i128;
            lhs != cd * c.coeff(n as i64).unwrap() as i128 - mult * back
        });
        assert!(mismatch);
    }

    #[test]
    fn square_params_validation() {
        assert!(NewmanIIParams::new(3, 2, 1, 7).is_ok());
        assert!(NewmanIIParams::new(3, 6, 1, 7).is_ok());
        assert!(NewmanIIParams::new(5, 2, 1, 7).is_ok());
        assert!(NewmanIIParams::new(3, 2, 2, 7).is_err()); // r + s even
        assert!(NewmanIIParams::new(3, 1, 0, 7).is_err()); // s = 0
        assert!(NewmanIIParams::new(3, 2, 1, 4).is_err()); // p not prime
        assert!(NewmanIIParams::new(3, 2, 1, 3).is_err()); // p < 5
    }

    #[test]
    fn square_constants_by_hand() {
        // f1^2 f3 at p = 7: D = 5 * 48/24 = 10, theta = -6,
        // a(10) = 0, (-6/7) = 1, (-10/7) = 1, so w = 1.
        let params = NewmanIIParams::new(3, 2, 1, 7).unwrap();
        assert_eq!(params.delta(), 10);
        assert_eq!(params.theta().unwrap(), -6);
        let a = params.expansion(20).unwrap();
        assert_eq!(a.coeff(10).unwrap(), 0);
        assert_eq!(params.w_constant(&a).unwrap(), 1);

        // Same product at p = 5: D = 5, p | D kills the symbol term, w = a(5).
        let params5 = NewmanIIParams::new(3, 2, 1, 5).unwrap();
        assert_eq!(params5.delta(), 5);
        let a5 = params5.expansion(10).unwrap();
        assert_eq!(params5.w_constant(&a5).unwrap(), a5.coeff(5).unwrap() as i128);
    }

    #[test]
    fn prime_square_recurrences_hold() {
        for (q, r, s) in [(3u64, 2u32, 1u32), (3, 6, 1), (5, 2, 1)] {
            for p in [5u64, 7, 11, 13] {
                let params = NewmanIIParams::new(q, r, s, p).unwrap();
                let report = newman2_verify(params, 40).unwrap();
                if q == p {
                    // p coprime to q is a hypothesis of the identity; the
                    // p = q cell must skip, not pass or fail.
                    assert_eq!(report.status, Status::Skip);
                    assert!(report.skip_reason.is_some());
                    continue;
                }
                assert_eq!(
                    report.status,
                    Status::Pass,
                    "{} p={p}: {:?} notes={:?}",
                    params.label(),
                    report.witnesses,
                    report.notes
                );
                assert_eq!(report.checked, 41);
                assert!(report
                    .notes
                    .iter()
                    .any(|note| note.contains("reconfirmed") || note.contains("calibrated")));
            }
        }
    }
}
