//! Exact truncated formal power series over Z and Z/m.
//!
//! A [`QSeries`] stores coefficients a(0..=N) for a fixed truncation order N.
//! Arithmetic over `Integers` is checked: overflow is an error, never a wrap.
//! Over `ModM(m)` every stored coefficient lives in `[0, m)`.
//!
//! Eta-type infinite products expand through the pentagonal number theorem,
//! so `(q^d; q^d)_inf` is sparse; multiplication and division skip zero
//! coefficients of the sparser operand, which keeps `f_u f_v / f_1^2` at
//! truncation 10^5..10^6 tractable without any FFT machinery.

use serde::{Deserialize, Serialize};

use crate::error::{QlabError, Result};

/// Largest modulus accepted for `ModM`; keeps single products inside i64.
pub const MAX_MODULUS: u64 = 1 << 31;

/// Coefficient ring: exact integers or integers mod m.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ring {
    Integers,
    ModM(u64),
}

impl Ring {
    pub fn mod_m(m: u64) -> Result<Ring> {
        if !(2..=MAX_MODULUS).contains(&m) {
            return Err(QlabError::BadModulus(m));
        }
        Ok(Ring::ModM(m))
    }

    fn check(self) -> Result<Ring> {
        if let Ring::ModM(m) = self {
            if !(2..=MAX_MODULUS).contains(&m) {
                return Err(QlabError::BadModulus(m));
            }
        }
        Ok(self)
    }

    /// Reduce a wide intermediate into canonical form.
    fn reduce(self, v: i128) -> Result<i64> {
        match self {
            Ring::Integers => i64::try_from(v).map_err(|_| QlabError::Overflow),
            Ring::ModM(m) => Ok(v.rem_euclid(m as i128) as i64),
        }
    }

    fn reduce_i64(self, v: i64) -> i64 {
        match self {
            Ring::Integers => v,
            Ring::ModM(m) => v.rem_euclid(m as i64),
        }
    }

    /// Multiplicative inverse of a unit.
    fn inv(self, a: i64) -> Result<i64> {
        match self {
            Ring::Integers => match a {
                1 => Ok(1),
                -1 => Ok(-1),
                _ => Err(QlabError::NonUnitConstant(a, self)),
            },
            Ring::ModM(m) => {
                let (g, x, _) = ext_gcd(a.rem_euclid(m as i64), m as i64);
                if g != 1 {
                    return Err(QlabError::NonUnitConstant(a, self));
                }
                Ok(x.rem_euclid(m as i64))
            }
        }
    }
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// Truncated power series with exact coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    ring: Ring,
    coeffs: Vec<i64>,
}

/// One eta-type factor: `(q^delta; q^delta)_inf ^ r_delta`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EtaProductSpec {
    pub factors: Vec<(u64, i64)>,
    pub prefactor_exponent: u64,
}

impl EtaProductSpec {
    pub fn new(factors: Vec<(u64, i64)>, prefactor_exponent: u64) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for &(delta, r) in &factors {
            if delta == 0 || r == 0 {
                return Err(QlabError::InvalidSpec(format!(
                    "eta factor ({delta}, {r}) must have delta >= 1 and r != 0"
                )));
            }
            if !seen.insert(delta) {
                return Err(QlabError::DuplicateDelta(delta));
            }
        }
        Ok(EtaProductSpec { factors, prefactor_exponent })
    }
}

impl QSeries {
    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn trunc(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// Coefficient a(n). Negative n yields 0 by convention; n beyond the
    /// truncation order is an error, never a silent zero.
    pub fn coeff(&self, n: i64) -> Result<i64> {
        if n < 0 {
            return Ok(0);
        }
        let n = n as usize;
        if n >= self.coeffs.len() {
            return Err(QlabError::IndexBeyondTrunc(n as i64, self.trunc()));
        }
        Ok(self.coeffs[n])
    }

    /// Coefficient a(num/den): 0 when the argument is not a non-negative
    /// integer, matching the `a(n)=0 unless n is a non-negative integer`
    /// convention used by the Hecke and Newman operators.
    pub fn coeff_ratio(&self, num: i64, den: i64) -> Result<i64> {
        assert!(den > 0, "denominator must be positive");
        if num < 0 || num % den != 0 {
            return Ok(0);
        }
        self.coeff(num / den)
    }

    pub fn from_coeffs(ring: Ring, coeffs: Vec<i64>) -> Result<QSeries> {
        let ring = ring.check()?;
        assert!(!coeffs.is_empty(), "a series stores at least a(0)");
        let coeffs = coeffs.into_iter().map(|c| ring.reduce_i64(c)).collect();
        Ok(QSeries { ring, coeffs })
    }

    /// The multiplicative identity 1 + 0q + ... + 0q^trunc.
    pub fn one(ring: Ring, trunc: usize) -> Result<QSeries> {
        let ring = ring.check()?;
        let mut coeffs = vec![0; trunc + 1];
        coeffs[0] = 1;
        Ok(QSeries { ring, coeffs })
    }

    pub fn zero(ring: Ring, trunc: usize) -> Result<QSeries> {
        let ring = ring.check()?;
        Ok(QSeries { ring, coeffs: vec![0; trunc + 1] })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn nonzero(&self) -> Vec<(usize, i64)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c != 0)
            .map(|(i, &c)| (i, c))
            .collect()
    }

    /// Cauchy product, truncated at `min(self.trunc, other.trunc)`.
    pub fn mul(&self, other: &QSeries) -> Result<QSeries> {
        if self.ring != other.ring {
            return Err(QlabError::RingMismatch(self.ring, other.ring));
        }
        let trunc = self.trunc().min(other.trunc());
        let (sparse, dense) = if self.nonzero().len() <= other.nonzero().len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc = vec![0i128; trunc + 1];
        match self.ring {
            Ring::Integers => {
                for (i, a) in sparse.nonzero() {
                    if i > trunc {
                        break;
                    }
                    let a = a as i128;
                    for (j, &b) in dense.coeffs[..=trunc - i].iter().enumerate() {
                        if b != 0 {
                            let term = a.checked_mul(b as i128).ok_or(QlabError::Overflow)?;
                            acc[i + j] = acc[i + j].checked_add(term).ok_or(QlabError::Overflow)?;
                        }
                    }
                }
            }
            Ring::ModM(_) => {
                // every term < 2^62; i128 cannot overflow at any feasible trunc
                for (i, a) in sparse.nonzero() {
                    if i > trunc {
                        break;
                    }
                    let a = a as i128;
                    for (j, &b) in dense.coeffs[..=trunc - i].iter().enumerate() {
                        acc[i + j] += a * b as i128;
                    }
                }
            }
        }
        let mut coeffs = Vec::with_capacity(trunc + 1);
        for v in acc {
            coeffs.push(self.ring.reduce(v)?);
        }
        Ok(QSeries { ring: self.ring, coeffs })
    }

    /// Quotient `self / den` with `den(0)` a unit; truncation is the minimum
    /// of both inputs. Skips zero coefficients of the divisor, so division by
    /// a pentagonal-sparse Euler product runs in O(N sqrt N).
    pub fn div(&self, den: &QSeries) -> Result<QSeries> {
        if self.ring != den.ring {
            return Err(QlabError::RingMismatch(self.ring, den.ring));
        }
        let ring = self.ring;
        let lead_inv = ring.inv(den.coeffs[0])?;
        let trunc = self.trunc().min(den.trunc());
        let den_nz: Vec<(usize, i64)> =
            den.nonzero().into_iter().filter(|&(i, _)| i >= 1).collect();
        let mut out = vec![0i64; trunc + 1];
        match ring {
            Ring::Integers => {
                for n in 0..=trunc {
                    let mut acc = self.coeffs[n] as i128;
                    for &(i, d) in &den_nz {
                        if i > n {
                            break;
                        }
                        let term = (d as i128)
                            .checked_mul(out[n - i] as i128)
                            .ok_or(QlabError::Overflow)?;
                        acc = acc.checked_sub(term).ok_or(QlabError::Overflow)?;
                    }
                    acc = acc.checked_mul(lead_inv as i128).ok_or(QlabError::Overflow)?;
                    out[n] = ring.reduce(acc)?;
                }
            }
            Ring::ModM(m) => {
                let m = m as i128;
                for n in 0..=trunc {
                    let mut acc = self.coeffs[n] as i128;
                    for &(i, d) in &den_nz {
                        if i > n {
                            break;
                        }
                        acc -= d as i128 * out[n - i] as i128;
                    }
                    out[n] = ((acc.rem_euclid(m)) * lead_inv as i128).rem_euclid(m) as i64;
                }
            }
        }
        Ok(QSeries { ring, coeffs: out })
    }

    /// Multiplicative inverse up to the truncation order.
    pub fn invert(&self) -> Result<QSeries> {
        QSeries::one(self.ring, self.trunc())?.div(self)
    }

    /// Integer power; `pow(a, 0)` is the identity and negative exponents
    /// require a unit constant term.
    pub fn pow(&self, e: i64) -> Result<QSeries> {
        if e == 0 {
            return QSeries::one(self.ring, self.trunc());
        }
        let base = if e < 0 { self.invert()? } else { self.clone() };
        let mut acc = base.clone();
        for _ in 1..e.unsigned_abs() {
            acc = acc.mul(&base)?;
        }
        Ok(acc)
    }

    /// `(q^delta; q^delta)_inf` via the pentagonal number theorem: the
    /// coefficient at `delta * k(3k -/+ 1)/2` is `(-1)^k`.
    pub fn euler_product(delta: u64, ring: Ring, trunc: usize) -> Result<QSeries> {
        assert!(delta >= 1, "delta must be positive");
        let ring = ring.check()?;
        let mut coeffs = vec![0i64; trunc + 1];
        coeffs[0] = 1;
        let mut k: u64 = 1;
        loop {
            let g1 = k * (3 * k - 1) / 2;
            if g1.checked_mul(delta).map_or(true, |v| v > trunc as u64) {
                break;
            }
            let sign = if k % 2 == 1 { -1 } else { 1 };
            coeffs[(delta * g1) as usize] = ring.reduce_i64(sign);
            let g2 = k * (3 * k + 1) / 2;
            if delta * g2 <= trunc as u64 {
                coeffs[(delta * g2) as usize] = ring.reduce_i64(sign);
            }
            k += 1;
        }
        Ok(QSeries { ring, coeffs })
    }

    /// `q^prefactor * prod_delta (q^delta; q^delta)_inf ^ r_delta`, truncated.
    pub fn eta_product(spec: &EtaProductSpec, ring: Ring, trunc: usize) -> Result<QSeries> {
        let ring = ring.check()?;
        let mut acc = QSeries::one(ring, trunc)?;
        for &(delta, r) in &spec.factors {
            let factor = QSeries::euler_product(delta, ring, trunc)?;
            if r > 0 {
                for _ in 0..r {
                    acc = acc.mul(&factor)?;
                }
            } else {
                for _ in 0..(-r) {
                    acc = acc.div(&factor)?;
                }
            }
        }
        let shift = spec.prefactor_exponent as usize;
        if shift == 0 {
            return Ok(acc);
        }
        if shift > trunc {
            return QSeries::zero(ring, trunc);
        }
        let mut coeffs = vec![0i64; trunc + 1];
        coeffs[shift..].copy_from_slice(&acc.coeffs[..=trunc - shift]);
        Ok(QSeries { ring, coeffs })
    }

    /// Arithmetic-progression extraction: b(n) = a(step*n + residue).
    pub fn extract_progression(&self, step: u64, residue: u64) -> Result<QSeries> {
        if residue >= step {
            return Err(QlabError::BadProgression { step, residue });
        }
        let trunc = self.trunc() as u64;
        if residue > trunc {
            return Err(QlabError::IndexBeyondTrunc(residue as i64, self.trunc()));
        }
        let new_trunc = (trunc - residue) / step;
        let coeffs = (0..=new_trunc)
            .map(|n| self.coeffs[(step * n + residue) as usize])
            .collect();
        Ok(QSeries { ring: self.ring, coeffs })
    }

    /// Reduce an integer series into Z/m.
    pub fn reduce_mod(&self, m: u64) -> Result<QSeries> {
        assert_eq!(self.ring, Ring::Integers, "reduce_mod takes a series over Z");
        let ring = Ring::mod_m(m)?;
        let coeffs = self.coeffs.iter().map(|&c| ring.reduce_i64(c)).collect();
        Ok(QSeries { ring, coeffs })
    }

    /// JSON form: `{ring, trunc, coeffs}` with decimal-string coefficients.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "ring": self.ring,
            "trunc": self.trunc(),
            "coeffs": self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<QSeries> {
        #[derive(Deserialize)]
        struct Repr {
            ring: Ring,
            trunc: usize,
            coeffs: Vec<String>,
        }
        let repr: Repr = serde_json::from_value(value.clone())?;
        if repr.coeffs.len() != repr.trunc + 1 {
            return Err(QlabError::InvalidSpec(format!(
                "coefficient count {} does not match trunc {}",
                repr.coeffs.len(),
                repr.trunc
            )));
        }
        let coeffs = repr
            .coeffs
            .iter()
            .map(|s| s.parse::<i64>().map_err(|_| QlabError::InvalidSpec(format!("bad coefficient `{s}`"))))
            .collect::<Result<Vec<_>>>()?;
        QSeries::from_coeffs(repr.ring, coeffs)
    }

    /// CSV rows `n,a(n)` for plotting.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "n,a_n")?;
        for (n, c) in self.coeffs.iter().enumerate() {
            writeln!(w, "{n},{c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zring() -> Ring {
        Ring::Integers
    }

    #[test]
    fn one_examples() {
        assert_eq!(QSeries::one(zring(), 3).unwrap().coeffs(), &[1, 0, 0, 0]);
        assert_eq!(QSeries::one(Ring::mod_m(3).unwrap(), 0).unwrap().coeffs(), &[1]);
        assert_eq!(QSeries::one(Ring::mod_m(2).unwrap(), 2).unwrap().coeffs(), &[1, 0, 0]);
    }

    #[test]
    fn mul_examples() {
        let a = QSeries::from_coeffs(zring(), vec![1, 1, 0]).unwrap();
        let b = QSeries::from_coeffs(zring(), vec![1, -1, 0]).unwrap();
        assert_eq!(a.mul(&b).unwrap().coeffs(), &[1, 0, -1]);

        let f = QSeries::euler_product(1, zring(), 20).unwrap();
        assert_eq!(f.mul(&QSeries::one(zring(), 20).unwrap()).unwrap(), f);
    }

    #[test]
    fn mul_ring_mismatch() {
        let a = QSeries::one(zring(), 2).unwrap();
        let b = QSeries::one(Ring::mod_m(5).unwrap(), 2).unwrap();
        assert!(matches!(a.mul(&b), Err(QlabError::RingMismatch(_, _))));
    }

    #[test]
    fn invert_geometric() {
        let a = QSeries::from_coeffs(zring(), vec![1, -1, 0, 0, 0]).unwrap();
        assert_eq!(a.invert().unwrap().coeffs(), &[1, 1, 1, 1, 1]);
        let one = QSeries::one(zring(), 7).unwrap();
        assert_eq!(one.invert().unwrap(), one);
    }

    #[test]
    fn invert_partition_numbers() {
        // 1/(q;q)_inf generates p(n)
        let f = QSeries::euler_product(1, zring(), 10).unwrap();
        assert_eq!(f.invert().unwrap().coeffs(), &[1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]);
    }

    #[test]
    fn invert_requires_unit() {
        let a = QSeries::from_coeffs(zring(), vec![2, 1]).unwrap();
        assert!(matches!(a.invert(), Err(QlabError::NonUnitConstant(2, _))));
        let b = QSeries::from_coeffs(Ring::mod_m(6).unwrap(), vec![3, 1]).unwrap();
        assert!(b.invert().is_err());
    }

    #[test]
    fn mul_by_inverse_is_one() {
        let f = QSeries::euler_product(1, zring(), 50).unwrap();
        let inv = f.invert().unwrap();
        assert_eq!(f.mul(&inv).unwrap(), QSeries::one(zring(), 50).unwrap());
    }

    #[test]
    fn pow_examples() {
        let f = QSeries::euler_product(1, zring(), 5).unwrap();
        assert_eq!(f.pow(0).unwrap(), QSeries::one(zring(), 5).unwrap());
        let a = QSeries::from_coeffs(zring(), vec![1, -1, 0]).unwrap();
        assert_eq!(a.pow(2).unwrap().coeffs(), &[1, -2, 1]);
        // constant term of a product of units
        let m7 = Ring::mod_m(7).unwrap();
        let g = QSeries::euler_product(1, m7, 10)
            .unwrap()
            .pow(5)
            .unwrap()
            .mul(&QSeries::euler_product(2, m7, 10).unwrap())
            .unwrap();
        assert_eq!(g.coeff(0).unwrap(), 1);
    }

    #[test]
    fn pow_negative_exponent() {
        let f = QSeries::euler_product(1, zring(), 30).unwrap();
        let g = f.pow(-2).unwrap();
        assert_eq!(f.mul(&f).unwrap().mul(&g).unwrap(), QSeries::one(zring(), 30).unwrap());
    }

    #[test]
    fn euler_product_examples() {
        let f = QSeries::euler_product(1, zring(), 7).unwrap();
        assert_eq!(f.coeffs(), &[1, -1, -1, 0, 0, 1, 0, 1]);
        let f3 = QSeries::euler_product(3, zring(), 3).unwrap();
        assert_eq!(f3.coeffs(), &[1, 0, 0, -1]);
        // pentagonal index k=-2 gives exponent 5 with sign +1
        assert_eq!(f.coeff(5).unwrap(), 1);
    }

    #[test]
    fn euler_product_matches_direct_expansion() {
        // direct expansion of (1-q)(1-q^2)...(1-q^N)
        let n = 60usize;
        let mut direct = QSeries::one(zring(), n).unwrap();
        for m in 1..=n as u64 {
            let mut c = vec![0i64; n + 1];
            c[0] = 1;
            c[m as usize] = -1;
            direct = direct.mul(&QSeries::from_coeffs(zring(), c).unwrap()).unwrap();
        }
        assert_eq!(direct, QSeries::euler_product(1, zring(), n).unwrap());
    }

    #[test]
    fn eta_product_prefactor() {
        // q (q^3;q^3)(q^21;q^21) = q - q^4 - q^7 - ...
        let spec = EtaProductSpec::new(vec![(3, 1), (21, 1)], 1).unwrap();
        let s = QSeries::eta_product(&spec, zring(), 7).unwrap();
        assert_eq!(s.coeffs(), &[0, 1, 0, 0, -1, 0, 0, -1]);
    }

    #[test]
    fn eta_product_rejects_duplicate_delta() {
        assert!(matches!(
            EtaProductSpec::new(vec![(3, 1), (3, 2)], 0),
            Err(QlabError::DuplicateDelta(3))
        ));
    }

    #[test]
    fn extract_progression_examples() {
        let one = QSeries::one(zring(), 10).unwrap();
        assert_eq!(one.extract_progression(2, 0).unwrap(), QSeries::one(zring(), 5).unwrap());
        let a = QSeries::from_coeffs(zring(), vec![0, 1, 2, 3, 4, 5]).unwrap();
        assert_eq!(a.extract_progression(1, 0).unwrap(), a);
        assert_eq!(a.extract_progression(2, 1).unwrap().coeffs(), &[1, 3, 5]);
        assert!(matches!(
            a.extract_progression(2, 2),
            Err(QlabError::BadProgression { .. })
        ));
    }

    #[test]
    fn reduce_mod_examples() {
        let a = QSeries::from_coeffs(zring(), vec![1, -1, -1]).unwrap();
        assert_eq!(a.reduce_mod(3).unwrap().coeffs(), &[1, 2, 2]);
        let b = QSeries::from_coeffs(zring(), vec![7, 14]).unwrap();
        assert_eq!(b.reduce_mod(7).unwrap().coeffs(), &[0, 0]);
        assert!(matches!(a.reduce_mod(1), Err(QlabError::BadModulus(1))));
    }

    #[test]
    fn coeff_conventions() {
        let a = QSeries::from_coeffs(zring(), vec![5, 6]).unwrap();
        assert_eq!(a.coeff(-3).unwrap(), 0);
        assert_eq!(a.coeff(1).unwrap(), 6);
        assert!(matches!(a.coeff(2), Err(QlabError::IndexBeyondTrunc(2, 1))));
        assert_eq!(a.coeff_ratio(3, 2).unwrap(), 0);
        assert_eq!(a.coeff_ratio(2, 2).unwrap(), 6);
        assert_eq!(a.coeff_ratio(-4, 2).unwrap(), 0);
    }

    #[test]
    fn overflow_is_detected() {
        let big = QSeries::from_coeffs(zring(), vec![i64::MAX, i64::MAX]).unwrap();
        assert!(matches!(big.mul(&big), Err(QlabError::Overflow)));
    }

    #[test]
    fn json_round_trip() {
        let a = QSeries::euler_product(2, Ring::mod_m(5).unwrap(), 17).unwrap();
        let back = QSeries::from_json(&a.to_json()).unwrap();
        assert_eq!(a, back);
    }
}
