//! Hecke operators T_p on integer-weight q-expansions with a real quadratic
//! character, plus the three built-in two-factor eta products whose
//! expansions are eigenforms used by the recurrence identities.
//!
//! For a form sum a(n) q^n of weight k and character chi,
//!   (T_p f)(n) = a(pn) + chi(p) p^{k-1} a(n/p),
//! with the second term dropped when p does not divide n. For a normalized
//! eigenform (a(1) = 1) the eigenvalue is a(p).

use crate::error::{QlabError, Result};
use crate::eta::EtaQuotient;
use crate::number_theory::{is_prime, symbol};
use crate::series::{EtaProductSpec, QSeries, Ring};

/// Everything needed to apply T_p: weight, the collapsed discriminant of the
/// real character (chi(p) = (disc/p) as a Kronecker-extended symbol), the
/// prime, and the level (primes dividing the level get chi(p) = 0).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HeckeContext {
    pub weight: u32,
    pub chi_disc: i64,
    pub p: u64,
    pub level: u64,
}

impl HeckeContext {
    pub fn new(weight: u32, chi_disc: i64, p: u64, level: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(QlabError::InvalidSpec(format!("p={p} must be prime")));
        }
        Ok(HeckeContext { weight, chi_disc, p, level })
    }

    /// chi(p): zero at primes dividing the level, otherwise the quadratic
    /// symbol of the collapsed discriminant.
    pub fn chi_at_p(&self) -> Result<i64> {
        if self.level % self.p == 0 {
            return Ok(0);
        }
        symbol(self.chi_disc, self.p)
    }
}

/// Apply T_p to an integer series; the result is truncated at trunc/p.
pub fn apply_tp(ctx: HeckeContext, a: &QSeries) -> Result<QSeries> {
    if a.ring() != Ring::Integers {
        return Err(QlabError::RingMismatch(a.ring(), Ring::Integers));
    }
    let p = ctx.p as usize;
    if a.trunc() < p {
        return Err(QlabError::InsufficientTruncation { have: a.trunc(), need: p });
    }
    let out_trunc = a.trunc() / p;
    let chi_p = ctx.chi_at_p()? as i128;
    let p_pow = (ctx.p as i128)
        .checked_pow(ctx.weight.checked_sub(1).ok_or_else(|| {
            QlabError::InvalidSpec("weight must be >= 1 for T_p".into())
        })?)
        .ok_or(QlabError::Overflow)?;
    let mut coeffs = Vec::with_capacity(out_trunc + 1);
    for n in 0..=out_trunc {
        let mut value = a.coeff((n * p) as i64)? as i128;
        if n % p == 0 {
            value += chi_p * p_pow * a.coeff((n / p) as i64)? as i128;
        }
        let value = i64::try_from(value).map_err(|_| QlabError::Overflow)?;
        coeffs.push(value);
    }
    QSeries::from_coeffs(Ring::Integers, coeffs)
}

/// Check that a normalized series (a(1) = 1) is a T_p eigenform over the
/// usable range; returns the eigenvalue lambda = a(p).
pub fn eigen_check(ctx: HeckeContext, a: &QSeries) -> Result<i64> {
    let a1 = a.coeff(1)?;
    if a1 != 1 {
        return Err(QlabError::NotNormalized(a1));
    }
    let lambda = a.coeff(ctx.p as i64)?;
    let tp = apply_tp(ctx, a)?;
    for n in 0..=tp.trunc() as i64 {
        let lhs = tp.coeff(n)? as i128;
        let rhs = lambda as i128 * a.coeff(n)? as i128;
        if lhs != rhs {
            return Err(QlabError::InvalidSpec(format!(
                "not a T_{} eigenform: mismatch at n={n} ({lhs} vs {rhs})",
                ctx.p
            )));
        }
    }
    Ok(lambda)
}

/// The three built-in weight-1 eta products whose coefficients drive the
/// single-prime recurrences.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BuiltinForm {
    /// eta(3z) eta(21z), level 63, character collapsing to (-7/.).
    Eta3x21,
    /// eta(4z) eta(20z), level 80, character collapsing to (-5/.).
    Eta4x20,
    /// eta(8z) eta(16z), level 128, character collapsing to (-2/.).
    Eta8x16,
}

impl BuiltinForm {
    pub fn eta_factors(self) -> [(u64, i64); 2] {
        match self {
            BuiltinForm::Eta3x21 => [(3, 1), (21, 1)],
            BuiltinForm::Eta4x20 => [(4, 1), (20, 1)],
            BuiltinForm::Eta8x16 => [(8, 1), (16, 1)],
        }
    }

    pub fn level(self) -> u64 {
        match self {
            BuiltinForm::Eta3x21 => 63,
            BuiltinForm::Eta4x20 => 80,
            BuiltinForm::Eta8x16 => 128,
        }
    }

    /// Discriminant of the full (uncollapsed) character numerator -s.
    pub fn raw_disc(self) -> i64 {
        match self {
            BuiltinForm::Eta3x21 => -63,
            BuiltinForm::Eta4x20 => -80,
            BuiltinForm::Eta8x16 => -128,
        }
    }

    /// Squarefree-kernel discriminant the character collapses to away from
    /// the level.
    pub fn collapsed_disc(self) -> i64 {
        match self {
            BuiltinForm::Eta3x21 => -7,
            BuiltinForm::Eta4x20 => -5,
            BuiltinForm::Eta8x16 => -2,
        }
    }

    /// Modulus of the arithmetic progression carrying the nonzero
    /// coefficients' indices (the support lives on n = shift mod this).
    pub fn support_modulus(self) -> u64 {
        match self {
            BuiltinForm::Eta3x21 => 3,
            BuiltinForm::Eta4x20 => 4,
            BuiltinForm::Eta8x16 => 8,
        }
    }

    pub fn context(self, p: u64) -> Result<HeckeContext> {
        HeckeContext::new(1, self.collapsed_disc(), p, self.level())
    }

    /// q-expansion to the requested truncation (includes the leading shift
    /// from the eta arguments; the first nonzero term is at n = sum delta/24,
    /// which equals 1 for all three forms).
    pub fn expansion(self, trunc: usize) -> Result<QSeries> {
        let spec = EtaProductSpec::new(self.eta_factors().to_vec(), 1)?;
        QSeries::eta_product(&spec, Ring::Integers, trunc)
    }

    pub fn eta_quotient(self) -> Result<EtaQuotient> {
        EtaQuotient::new(self.level(), &self.eta_factors())
    }
}
