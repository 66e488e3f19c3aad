//! Declarative congruence families, the sweep engine that checks them
//! against coefficient tables, and the divisibility-density experiment.
//!
//! A family is data: which bipartition series and modulus it concerns, how
//! its coefficient table is realized, and a list of instances. Each instance
//! names an arithmetic progression (step, offset), a relation (vanishing or
//! proportionality to another progression), optional per-index admissibility
//! conditions, and hypotheses that gate the whole instance. Hypotheses are
//! evaluated before any conclusion; an unmet hypothesis yields SKIP, never
//! PASS.
//!
//! Coefficient tables come in three shapes, chosen per family so sweeps at
//! step sizes up to ~3*10^4 and 20000 indices stay cheap:
//!
//! - the generic engine series (exact division, any modulus),
//! - a dense byte table built by convolving two sparse pentagonal-support
//!   series (used for the mod-3 families, where the full bipartition series
//!   is congruent to a product of two Euler products),
//! - a parity table storing only two support sets (used for the mod-2
//!   families, where the series is congruent to a product of two sparse
//!   series with all-odd coefficients).
//!
//! Every reduced form is cross-checked coefficient-by-coefficient against
//! the generic engine in this module's tests.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::bipartitions::{bipartition_series, BipartitionParams};
use crate::error::{QlabError, Result};
use crate::newman::NewmanIIParams;
use crate::number_theory::{is_prime, symbol};
use crate::report::{Status, VerificationReport, Witness};
use crate::series::{QSeries, Ring};

/// Read-only access to series coefficients reduced into [0, modulus).
pub trait CoeffTable {
    fn modulus(&self) -> u64;
    fn max_index(&self) -> u64;
    fn coeff_at(&self, n: u64) -> u64;
}

impl CoeffTable for QSeries {
    fn modulus(&self) -> u64 {
        match self.ring() {
            Ring::ModM(m) => m,
            Ring::Integers => panic!("integer series has no fixed modulus"),
        }
    }

    fn max_index(&self) -> u64 {
        self.trunc() as u64
    }

    fn coeff_at(&self, n: u64) -> u64 {
        self.coeff(n as i64).expect("index within table") as u64
    }
}

/// Indices and coefficients of the nonzero terms of (q^delta; q^delta)_inf
/// up to max, via the pentagonal number theorem.
pub fn pentagonal_support(delta: u64, max: u64) -> Vec<(u64, i64)> {
    let mut out = vec![(0u64, 1i64)];
    let mut k: u64 = 1;
    loop {
        let g1 = delta * k * (3 * k - 1) / 2;
        if g1 > max {
            break;
        }
        let sign = if k % 2 == 1 { -1 } else { 1 };
        out.push((g1, sign));
        let g2 = delta * k * (3 * k + 1) / 2;
        if g2 <= max {
            out.push((g2, sign));
        }
        k += 1;
    }
    out.sort_unstable();
    out
}

/// Support of (q^2; q^2)_inf^3 modulo 2: the indices k(k+1), k >= 0 (from
/// the cube identity whose coefficients 2k+1 are all odd).
pub fn doubled_triangular_support(max: u64) -> Vec<(u64, i64)> {
    let mut out = Vec::new();
    let mut k: u64 = 0;
    while k * (k + 1) <= max {
        out.push((k * (k + 1), 1));
        k += 1;
    }
    out
}

/// Dense byte table of a product of two sparse series, reduced mod m.
pub struct DenseTable {
    modulus: u64,
    values: Vec<u8>,
}

impl DenseTable {
    pub fn from_sparse_pair(
        a: &[(u64, i64)],
        b: &[(u64, i64)],
        modulus: u64,
        max: u64,
    ) -> DenseTable {
        assert!((2..=255).contains(&modulus));
        let mut values = vec![0u8; max as usize + 1];
        for &(i, ci) in a {
            if i > max {
                break;
            }
            for &(j, cj) in b {
                if i + j > max {
                    break;
                }
                let cell = &mut values[(i + j) as usize];
                *cell = (*cell as i64 + ci * cj).rem_euclid(modulus as i64) as u8;
            }
        }
        DenseTable { modulus, values }
    }
}

impl CoeffTable for DenseTable {
    fn modulus(&self) -> u64 {
        self.modulus
    }

    fn max_index(&self) -> u64 {
        self.values.len() as u64 - 1
    }

    fn coeff_at(&self, n: u64) -> u64 {
        self.values[n as usize] as u64
    }
}

/// Parity of the coefficients of a product of two sparse series each with
/// all-odd coefficients: only the two supports are stored, and a query
/// counts representations n = i + j with i in A, j in B.
pub struct ParityPairTable {
    a: Vec<u64>,
    b: HashSet<u64>,
    max: u64,
}

impl ParityPairTable {
    pub fn new(a: Vec<u64>, b: Vec<u64>, max: u64) -> ParityPairTable {
        ParityPairTable { a, b: b.into_iter().collect(), max }
    }
}

impl CoeffTable for ParityPairTable {
    fn modulus(&self) -> u64 {
        2
    }

    fn max_index(&self) -> u64 {
        self.max
    }

    fn coeff_at(&self, n: u64) -> u64 {
        let mut parity = 0u64;
        for &i in &self.a {
            if i > n {
                break;
            }
            if self.b.contains(&(n - i)) {
                parity ^= 1;
            }
        }
        parity
    }
}

/// How a family's coefficient table is realized.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeriesForm {
    /// f_1 * f_other mod 3, congruent to the full series for the mod-3
    /// families; built as a sparse-pair dense table.
    Mod3Pair { other: u64 },
    /// f_2 * f_3 mod 2 (congruent to B_{4,3}).
    ParityF2F3,
    /// f_2^3 * f_3 mod 2 (congruent to B_{8,3}).
    ParityF2CubedF3,
    /// f_2 * f_5 mod 2 (congruent to B_{4,5}).
    ParityF2F5,
    /// The generic engine: f_u f_v / f_1^2 over Z/m.
    Engine { modulus: u64 },
}

impl SeriesForm {
    /// Largest index this form's table is allowed to reach, sized so builds
    /// stay within a few seconds and a few hundred MB.
    pub fn cap(&self) -> u64 {
        match self {
            SeriesForm::Mod3Pair { .. } => 600_000_000,
            SeriesForm::ParityF2F3 | SeriesForm::ParityF2CubedF3 | SeriesForm::ParityF2F5 => {
                1_000_000_000
            }
            SeriesForm::Engine { .. } => 600_000,
        }
    }
}

/// Build the coefficient table of a family's series up to max (inclusive).
pub fn build_table(params: BipartitionParams, form: &SeriesForm, max: u64) -> Result<Box<dyn CoeffTable>> {
    match form {
        SeriesForm::Mod3Pair { other } => {
            let a = pentagonal_support(1, max);
            let b = pentagonal_support(*other, max);
            Ok(Box::new(DenseTable::from_sparse_pair(&a, &b, 3, max)))
        }
        SeriesForm::ParityF2F3 => Ok(Box::new(ParityPairTable::new(
            pentagonal_support(2, max).into_iter().map(|(i, _)| i).collect(),
            pentagonal_support(3, max).into_iter().map(|(i, _)| i).collect(),
            max,
        ))),
        SeriesForm::ParityF2CubedF3 => Ok(Box::new(ParityPairTable::new(
            doubled_triangular_support(max).into_iter().map(|(i, _)| i).collect(),
            pentagonal_support(3, max).into_iter().map(|(i, _)| i).collect(),
            max,
        ))),
        SeriesForm::ParityF2F5 => Ok(Box::new(ParityPairTable::new(
            pentagonal_support(2, max).into_iter().map(|(i, _)| i).collect(),
            pentagonal_support(5, max).into_iter().map(|(i, _)| i).collect(),
            max,
        ))),
        SeriesForm::Engine { modulus } => {
            let series = bipartition_series(params, Ring::ModM(*modulus), max as usize)?;
            Ok(Box::new(series))
        }
    }
}

/// What the checked relation asserts about the coefficient at step*n+offset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    /// coefficient == 0 (mod m)
    Vanishing,
    /// coefficient == multiplier * coefficient(m2*n + r2) (mod m)
    Proportional { multiplier: i64, m2: u64, r2: u64 },
}

/// Per-index admissibility: some statements exclude indices n in a residue
/// class; excluded n are skipped, not failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PerN {
    All,
    /// Skip n whenever p divides a*n + b.
    NotDividesLinear { p: u64, a: i64, b: i64 },
}

impl PerN {
    fn admits(&self, n: u64) -> bool {
        match *self {
            PerN::All => true,
            PerN::NotDividesLinear { p, a, b } => {
                (a * n as i64 + b).rem_euclid(p as i64) != 0
            }
        }
    }
}

/// Instance-level hypotheses, evaluated before the sweep.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Hypothesis {
    /// The family's own coefficient at this index must vanish mod m.
    SeedVanishes { index: u64 },
    /// Parity of the calibration constant w of the prime-square recurrence
    /// on f_1^r f_q^s at p must match want_odd.
    WParity { q: u64, r: u32, s: u32, p: u64, want_odd: bool },
    /// The quadratic symbol (a/p) must equal want.
    SymbolEquals { a: i64, p: u64, want: i64 },
    /// d must not divide n (e.g. the sweep prime must stay coprime to the
    /// auxiliary product's prime, a hypothesis of the underlying recurrence).
    NotDivides { d: u64, n: u64 },
}

/// One parameter instantiation of a family's statement.
#[derive(Clone, Debug)]
pub struct Instance {
    pub label: String,
    pub m_step: u64,
    /// Offset of the progression; may exceed m_step (statements are kept in
    /// the exact shape they were given, not reduced).
    pub offset: u64,
    pub relation: Relation,
    pub per_n: PerN,
    pub n_min: u64,
    pub n_max: u64,
    pub hypotheses: Vec<Hypothesis>,
    /// Informational instances never flip aggregate exit codes.
    pub informational: bool,
}

impl Instance {
    fn new(label: impl Into<String>, m_step: u64, offset: u64, relation: Relation) -> Instance {
        Instance {
            label: label.into(),
            m_step,
            offset,
            relation,
            per_n: PerN::All,
            n_min: 0,
            n_max: 20_000,
            hypotheses: Vec::new(),
            informational: false,
        }
    }

    fn with_per_n(mut self, per_n: PerN) -> Instance {
        self.per_n = per_n;
        self
    }

    fn with_range(mut self, n_min: u64, n_max: u64) -> Instance {
        self.n_min = n_min;
        self.n_max = n_max;
        self
    }

    fn with_hypothesis(mut self, h: Hypothesis) -> Instance {
        self.hypotheses.push(h);
        self
    }

    fn informational(mut self) -> Instance {
        self.informational = true;
        self
    }

    /// Largest table index this instance touches at the given n_max.
    fn required_index(&self, n_max: u64) -> u64 {
        let lhs = self.m_step * n_max + self.offset;
        match self.relation {
            Relation::Vanishing => lhs,
            Relation::Proportional { m2, r2, .. } => lhs.max(m2 * n_max + r2),
        }
    }
}

/// A congruence family: series, modulus, table realization, instances.
#[derive(Debug)]
pub struct CongruenceFamily {
    pub id: String,
    pub description: String,
    pub params: BipartitionParams,
    pub modulus: u64,
    pub form: SeriesForm,
    pub instances: Vec<Instance>,
}

fn eval_hypothesis(h: &Hypothesis, prefix: Option<&dyn CoeffTable>) -> Result<(bool, String)> {
    match *h {
        Hypothesis::SeedVanishes { index } => {
            let table = prefix.expect("seed table present when seeds declared");
            let value = table.coeff_at(index);
            Ok((value == 0, format!("seed coefficient at {index} is {value} (mod {})", table.modulus())))
        }
        Hypothesis::WParity { q, r, s, p, want_odd } => {
            let params = NewmanIIParams::new(q, r, s, p)?;
            let a = params.expansion(params.delta() as usize)?;
            let w = params.w_constant(&a)?;
            let odd = w.rem_euclid(2) == 1;
            Ok((odd == want_odd, format!("w({p}) = {w} is {}", if odd { "odd" } else { "even" })))
        }
        Hypothesis::SymbolEquals { a, p, want } => {
            let value = symbol(a, p)?;
            Ok((value == want, format!("({a}/{p}) = {value}, required {want}")))
        }
        Hypothesis::NotDivides { d, n } => Ok((
            n % d != 0,
            format!(
                "{d} must not divide {n} (coprimality hypothesis of the underlying recurrence)"
            ),
        )),
    }
}

/// Sweep one instance against a table that must already cover its range.
pub fn sweep_instance(
    family: &CongruenceFamily,
    instance: &Instance,
    table: &dyn CoeffTable,
    n_max: u64,
) -> Result<VerificationReport> {
    let start = std::time::Instant::now();
    if table.max_index() < instance.required_index(n_max) {
        return Err(QlabError::InsufficientTruncation {
            have: table.max_index() as usize,
            need: instance.required_index(n_max) as usize,
        });
    }
    let m = family.modulus;
    let mut report = VerificationReport::new(family.id.clone(), instance.label.clone());
    report.informational = instance.informational;
    report.n_min = instance.n_min;
    report.n_max = n_max;
    for n in instance.n_min..=n_max {
        if !instance.per_n.admits(n) {
            continue;
        }
        let lhs = table.coeff_at(instance.m_step * n + instance.offset);
        let rhs = match instance.relation {
            Relation::Vanishing => 0,
            Relation::Proportional { multiplier, m2, r2 } => {
                (multiplier.rem_euclid(m as i64) as u64 * table.coeff_at(m2 * n + r2)) % m
            }
        };
        report.checked += 1;
        if lhs != rhs && report.witnesses.len() < 5 {
            report.witnesses.push(Witness {
                n,
                lhs: format!("a({}) = {lhs}", instance.m_step * n + instance.offset),
                rhs: rhs.to_string(),
            });
        }
    }
    report.status = if report.witnesses.is_empty() { Status::Pass } else { Status::Fail };
    report.millis = start.elapsed().as_millis();
    Ok(report)
}

/// Evaluate hypotheses, size and build the table, and sweep every instance
/// of a family. n_max_override replaces each instance's default bound before
/// clamping to the form's table cap.
pub fn verify_family(
    family: &CongruenceFamily,
    n_max_override: Option<u64>,
) -> Result<Vec<VerificationReport>> {
    // Seed hypotheses read the family's own small coefficients; build a
    // prefix table just large enough for them.
    let seed_max = family
        .instances
        .iter()
        .flat_map(|i| &i.hypotheses)
        .filter_map(|h| match h {
            Hypothesis::SeedVanishes { index } => Some(*index),
            _ => None,
        })
        .max();
    let prefix = match seed_max {
        Some(max) => Some(build_table(family.params, &family.form, max)?),
        None => None,
    };

    let cap = family.form.cap();
    let mut plans: Vec<(usize, u64, Vec<String>)> = Vec::new(); // (instance idx, n_max, notes)
    let mut reports: Vec<Option<VerificationReport>> = vec![None; family.instances.len()];
    let mut needed: u64 = 0;

    for (idx, instance) in family.instances.iter().enumerate() {
        let mut unmet: Option<String> = None;
        let mut notes = Vec::new();
        for h in &instance.hypotheses {
            let (ok, note) = eval_hypothesis(h, prefix.as_deref())?;
            notes.push(note.clone());
            if !ok && unmet.is_none() {
                unmet = Some(note);
            }
        }
        if let Some(reason) = unmet {
            let mut r = VerificationReport::new(family.id.clone(), instance.label.clone());
            r.informational = instance.informational;
            r.skip_reason = Some(format!("hypothesis unmet: {reason}"));
            r.notes = notes;
            reports[idx] = Some(r);
            continue;
        }
        let mut n_max = n_max_override.unwrap_or(instance.n_max);
        if instance.required_index(n_max) > cap {
            let clamped = (cap.saturating_sub(instance.offset)) / instance.m_step;
            notes.push(format!(
                "n_max clamped from {n_max} to {clamped} by the table cap {cap}"
            ));
            n_max = clamped;
        }
        if n_max < instance.n_min {
            let mut r = VerificationReport::new(family.id.clone(), instance.label.clone());
            r.informational = instance.informational;
            r.skip_reason = Some(format!(
                "table cap {cap} cannot reach any index of this instance (step {})",
                instance.m_step
            ));
            r.notes = notes;
            reports[idx] = Some(r);
            continue;
        }
        needed = needed.max(instance.required_index(n_max));
        plans.push((idx, n_max, notes));
    }

    if !plans.is_empty() {
        let table = build_table(family.params, &family.form, needed)?;
        for (idx, n_max, notes) in plans {
            let mut report = sweep_instance(family, &family.instances[idx], table.as_ref(), n_max)?;
            report.notes.extend(notes);
            reports[idx] = Some(report);
        }
    }
    Ok(reports.into_iter().map(|r| r.expect("every instance reported")).collect())
}

/// Run every builtin family with default bounds.
pub fn verify_all(n_max_override: Option<u64>) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    for family in builtin_families() {
        out.extend(verify_family(&family, n_max_override)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Builtin family construction
// ---------------------------------------------------------------------------

fn primes_up_to(bound: u64) -> Vec<u64> {
    (2..=bound).filter(|&p| is_prime(p)).collect()
}

/// Vanishing at step^... family with two-level prime products:
/// step p1^2...p_{k+1}^2, offset (p1^2...p_k^2 p_{k+1} (d j + p_{k+1}) - 1)/d,
/// for j >= 1, p_{k+1} not dividing j, offset < step (canonical j range).
fn squared_product_instances(d: u64, grid: &[u64]) -> Vec<Instance> {
    let mut out = Vec::new();
    let mut push = |primes: &[u64]| {
        let last = *primes.last().unwrap();
        let step: u64 = primes.iter().map(|p| p * p).product();
        let q = step / last;
        for j in 1.. {
            if j % last == 0 {
                continue;
            }
            let numerator = q * (d * j + last);
            if numerator % d != 1 % d {
                continue;
            }
            let offset = (numerator - 1) / d;
            if offset >= step {
                break;
            }
            out.push(Instance::new(
                format!("primes={primes:?}, j={j}"),
                step,
                offset,
                Relation::Vanishing,
            ));
        }
    };
    for &p1 in grid {
        push(&[p1]);
    }
    for &p1 in grid {
        for &p2 in grid {
            push(&[p1, p2]);
        }
    }
    out
}

/// step p^{2k+2}, offset p^{2k+1} j + (p^{2k+2}-1)/d, p not dividing j,
/// offset < step.
fn prime_power_shift_instances(d: u64, grid: &[u64]) -> Vec<Instance> {
    let mut out = Vec::new();
    for &p in grid {
        for k in 0..=1u32 {
            let step = p.pow(2 * k + 2);
            if (step - 1) % d != 0 {
                continue;
            }
            let base = (step - 1) / d;
            for j in 1.. {
                if j % p == 0 {
                    continue;
                }
                let offset = p.pow(2 * k + 1) * j + base;
                if offset >= step {
                    break;
                }
                out.push(Instance::new(
                    format!("p={p}, k={k}, j={j}"),
                    step,
                    offset,
                    Relation::Vanishing,
                ));
            }
        }
    }
    out
}

/// Smallest r >= 0 with p | d r + t and (d r + t)/p = 1 (mod d), so both
/// sides of the two-progression relation have integral indices.
fn minimal_r(d: u64, t: u64, p: u64) -> Option<u64> {
    (0..=d * p).find(|&r| {
        let v = d * r + t;
        v % p == 0 && (v / p) % d == 1
    })
}

/// Two-progression relation: a(p^{k+1} n + p r + (t p - 1)/d) ==
/// -(disc/p) a(p^{k-1} n + ((d r + t)/p - 1)/d) for positive n.
fn two_progression_instances(d: u64, t_of: impl Fn(u64) -> u64, disc: i64, grid: &[u64], n_max: u64) -> Vec<Instance> {
    let mut out = Vec::new();
    for &p in grid {
        let t = t_of(p);
        let Some(r) = minimal_r(d, t, p) else { continue };
        let multiplier = -symbol(disc, p).expect("symbol defined for primes");
        let r2 = ((d * r + t) / p - 1) / d;
        for k in 1..=2u32 {
            out.push(
                Instance::new(
                    format!("p={p}, k={k}, r={r}"),
                    p.pow(k + 1),
                    p * r + (t * p - 1) / d,
                    Relation::Proportional { multiplier, m2: p.pow(k - 1), r2 },
                )
                .with_range(1, n_max),
            );
        }
    }
    out
}

/// a(p^{2k} n + (p^{2k}-1)/d) == (-(disc/p))^k a(n) for positive n.
fn back_to_start_instances(d: u64, disc: i64, grid: &[u64], n_max: u64) -> Vec<Instance> {
    let mut out = Vec::new();
    for &p in grid {
        let base_mult = -symbol(disc, p).expect("symbol defined for primes");
        for k in 1..=2u32 {
            let step = p.pow(2 * k);
            if (step - 1) % d != 0 {
                continue;
            }
            out.push(
                Instance::new(
                    format!("p={p}, k={k}"),
                    step,
                    (step - 1) / d,
                    Relation::Proportional { multiplier: base_mult.pow(k), m2: 1, r2: 0 },
                )
                .with_range(1, n_max),
            );
        }
    }
    out
}

/// Seed-gated vanishing at p^{2a+1} n + (p^{2a+1}-1)/d for p = 1 (mod class),
/// gated on the series vanishing at (p-1)/d, excluding n with p | d n + 1.
fn seeded_odd_power_instances(d: u64, class: u64, scan_bound: u64) -> Vec<Instance> {
    let mut out = Vec::new();
    for p in primes_up_to(scan_bound) {
        if p % class != 1 {
            continue;
        }
        for alpha in 0..=1u32 {
            let step = p.pow(2 * alpha + 1);
            out.push(
                Instance::new(format!("p={p}, alpha={alpha}"), step, (step - 1) / d, Relation::Vanishing)
                    .with_per_n(PerN::NotDividesLinear { p, a: d as i64, b: 1 })
                    .with_hypothesis(Hypothesis::SeedVanishes { index: (p - 1) / d }),
            );
        }
    }
    out
}

/// Seed-gated vanishing at p^{2a+1} n + c (p^{2a+1}-1)/24 for p = 1 (mod 24),
/// gated on the series vanishing at c (p-1)/24, excluding n with
/// p | 24 n + t.
fn seeded_24_instances(c: u64, t: i64, scan_bound: u64, n_max: u64, informational: bool) -> Vec<Instance> {
    let mut out = Vec::new();
    for p in primes_up_to(scan_bound) {
        if p % 24 != 1 {
            continue;
        }
        for alpha in 0..=1u32 {
            let step = p.pow(2 * alpha + 1);
            let mut inst = Instance::new(
                format!("p={p}, alpha={alpha}{}", if informational { ", statement-form per-n condition" } else { "" }),
                step,
                c * (step - 1) / 24,
                Relation::Vanishing,
            )
            .with_range(0, n_max)
            .with_per_n(PerN::NotDividesLinear { p, a: 24, b: t })
            .with_hypothesis(Hypothesis::SeedVanishes { index: c * (p - 1) / 24 });
            if informational {
                inst = inst.informational();
            }
            out.push(inst);
        }
    }
    out
}

/// The three parity-gated branch shapes shared by the parity-gated families:
/// (q, r, s) identifies the auxiliary product whose constant w gates the
/// branches; c/den gives the offsets c (p^e - 1)/den; (a3, b3) the branch-3
/// per-index exclusion p | a3 n + b3.
#[allow(clippy::too_many_arguments)]
fn parity_gated_instances(
    q: u64,
    r: u32,
    s: u32,
    c: u64,
    den: u64,
    a3: i64,
    b3_of: impl Fn(u64) -> i64,
    grid: &[u64],
    n_max: u64,
) -> Vec<Instance> {
    let mut out = Vec::new();
    for &p in grid {
        // The underlying prime-square recurrence on f_1^r f_q^s needs p
        // coprime to q; at p = q the recurrence is numerically false.
        let coprime = Hypothesis::NotDivides { d: p, n: q };
        let even = Hypothesis::WParity { q, r, s, p, want_odd: false };
        let odd = Hypothesis::WParity { q, r, s, p, want_odd: true };
        // branch 1: w even, step p^3, offset c(p^4-1)/den, p not dividing n
        out.push(
            Instance::new(
                format!("p={p}, k=0, branch=w-even"),
                p.pow(3),
                c * (p.pow(4) - 1) / den,
                Relation::Vanishing,
            )
            .with_range(0, n_max)
            .with_per_n(PerN::NotDividesLinear { p, a: 1, b: 0 })
            .with_hypothesis(coprime.clone())
            .with_hypothesis(even),
        );
        // branch 2: w odd, step p^5, offset c(p^6-1)/den, p not dividing n
        out.push(
            Instance::new(
                format!("p={p}, k=0, branch=w-odd"),
                p.pow(5),
                c * (p.pow(6) - 1) / den,
                Relation::Vanishing,
            )
            .with_range(0, n_max)
            .with_per_n(PerN::NotDividesLinear { p, a: 1, b: 0 })
            .with_hypothesis(coprime.clone())
            .with_hypothesis(odd.clone()),
        );
        // branch 3: w odd, step p^2, offset c(p^2-1)/den, and the symbol
        // condition reduces (w odd) to p not dividing a3 n + b3
        out.push(
            Instance::new(
                format!("p={p}, k=0, branch=w-odd-symbol"),
                p.pow(2),
                c * (p.pow(2) - 1) / den,
                Relation::Vanishing,
            )
            .with_range(0, n_max)
            .with_per_n(PerN::NotDividesLinear { p, a: a3, b: b3_of(p) })
            .with_hypothesis(coprime)
            .with_hypothesis(odd),
        );
    }
    out
}

fn family(
    id: &str,
    description: &str,
    (u, v): (u64, u64),
    modulus: u64,
    form: SeriesForm,
    instances: Vec<Instance>,
) -> CongruenceFamily {
    CongruenceFamily {
        id: id.into(),
        description: description.into(),
        params: BipartitionParams::new(u, v).expect("builtin parameters valid"),
        modulus,
        form,
        instances,
    }
}

/// All builtin congruence families with their default desk-scale grids.
pub fn builtin_families() -> Vec<CongruenceFamily> {
    let mut out = Vec::new();

    // --- prior results on B_{3,7} and B_{3,11} -----------------------------
    out.push(family(
        "b37.4n1",
        "B_{3,7}(4n+1) == -B_{3,7}(n) mod 3",
        (3, 7),
        3,
        SeriesForm::Mod3Pair { other: 7 },
        vec![Instance::new("4n+1 vs n", 4, 1, Relation::Proportional { multiplier: -1, m2: 1, r2: 0 })],
    ));
    out.push(family(
        "b37.4n3",
        "B_{3,7}(4n+3) == 0 mod 3",
        (3, 7),
        3,
        SeriesForm::Mod3Pair { other: 7 },
        vec![Instance::new("4n+3", 4, 3, Relation::Vanishing)],
    ));
    out.push(family(
        "b37.2adic",
        "B_{3,7}(2^{2a} n + (5*2^{2a-1}-1)/3) == 0 mod 3",
        (3, 7),
        3,
        SeriesForm::Mod3Pair { other: 7 },
        (1..=3u32)
            .map(|alpha| {
                let step = 1u64 << (2 * alpha);
                let offset = (5 * (1u64 << (2 * alpha - 1)) - 1) / 3;
                Instance::new(format!("alpha={alpha}"), step, offset, Relation::Vanishing)
            })
            .collect(),
    ));
    out.push(family(
        "b311.3adic",
        "B_{3,11}(3^a n + (5*3^{a-1}-1)/2) == 0 mod 11",
        (3, 11),
        11,
        SeriesForm::Engine { modulus: 11 },
        (2..=3u32)
            .map(|alpha| {
                let step = 3u64.pow(alpha);
                let offset = (5 * 3u64.pow(alpha - 1) - 1) / 2;
                Instance::new(format!("alpha={alpha}"), step, offset, Relation::Vanishing)
            })
            .collect(),
    ));
    out.push(family(
        "b37.inert",
        "B_{3,7}(p^{2a+1} n + 8(p^{2a+2}-1)/24) == 0 mod 3 when (-7/p) = -1 and p does not divide n",
        (3, 7),
        3,
        SeriesForm::Mod3Pair { other: 7 },
        [5u64, 13, 17]
            .iter()
            .flat_map(|&p| {
                (0..=1u32).map(move |alpha| {
                    Instance::new(
                        format!("p={p}, alpha={alpha}"),
                        p.pow(2 * alpha + 1),
                        (p.pow(2 * alpha + 2) - 1) / 3,
                        Relation::Vanishing,
                    )
                    .with_per_n(PerN::NotDividesLinear { p, a: 1, b: 0 })
                    .with_hypothesis(Hypothesis::SymbolEquals { a: -7, p, want: -1 })
                })
            })
            .collect(),
    ));

    // --- squared prime-product vanishing families --------------------------
    out.push(family(
        "b37.sq",
        "B_{3,7} vanishing mod 3 at squared products of primes != 1 mod 3",
        (3, 7),
        3,
        SeriesForm::Mod3Pair { other: 7 },
        squared_product_instances(3, &[2, 5, 11]),
    ));
    out.push(family(
        "b35.sq",
        "B_{3,5} vanishing mod 3 at squared products of primes = 3 mod 4",
        (3, 5),
        3,
        SeriesForm::Mod3Pair { other: 5 },
        squared_product_instances(4, &[3, 7, 11]),
    ));
    out.push(family(
        "b32.sq",
        "B_{3,2} vanishing mod 3 at squared products of primes != 1 mod 8",
        (3, 2),
        3,
        SeriesForm::Mod3Pair { other: 2 },
        squared_product_instances(8, &[3, 5, 11, 13]),
    ));
    out.push(family(
        "b37.sqshift",
        "B_{3,7}(p^{2k+2} n + p^{2k+1} j + (p^{2k+2}-1)/3) == 0 mod 3",
        (3, 7),
        3,
        SeriesForm::Mod3Pair { other: 7 },
        prime_power_shift_instances(3, &[2, 5, 11]),
    ));
    out.push(family(
        "b35.sqshift",
        "B_{3,5}(p^{2k+2} n + p^{2k+1} j + (p^{2k+2}-1)/4) == 0 mod 3",
        (3, 5),
        3,
        SeriesForm::Mod3Pair { other: 5 },
        prime_power_shift_instances(4, &[3, 7, 11]),
    ));
    out.push(family(
        "b32.sqshift",
        "B_{3,2}(p^{2k+2} n + p^{2k+1} j + (p^{2k+2}-1)/8) == 0 mod 3",
        (3, 2),
        3,
        SeriesForm::Mod3Pair { other: 2 },
        prime_power_shift_instances(8, &[5, 11]),
    ));

    // --- seed-gated odd-power vanishing families ----------------------------
    out.push(family(
        "b37.seed",
        "B_{3,7}(p^{2a+1} n + (p^{2a+1}-1)/3) == 0 mod 3, gated on B_{3,7}((p-1)/3) == 0",
        (3, 7),
        3,
        SeriesForm::Mod3Pair { other: 7 },
        seeded_odd_power_instances(3, 6, 500),
    ));
    out.push(family(
        "b35.seed",
        "B_{3,5}(p^{2a+1} n + (p^{2a+1}-1)/4) == 0 mod 3, gated on B_{3,5}((p-1)/4) == 0",
        (3, 5),
        3,
        SeriesForm::Mod3Pair { other: 5 },
        seeded_odd_power_instances(4, 4, 500),
    ));
    out.push(family(
        "b32.seed",
        "B_{3,2}(p^{2a+1} n + (p^{2a+1}-1)/8) == 0 mod 3, gated on B_{3,2}((p-1)/8) == 0",
        (3, 2),
        3,
        SeriesForm::Mod3Pair { other: 2 },
        seeded_odd_power_instances(8, 8, 500),
    ));

    // --- two-progression relations and their iterated forms -------------------
    out.push(family(
        "b37.step",
        "B_{3,7}(p^{k+1} n + p r + (2p-1)/3) == -(-7/p) B_{3,7}(p^{k-1} n + (3r+2-p)/(3p)) mod 3",
        (3, 7),
        3,
        SeriesForm::Mod3Pair { other: 7 },
        two_progression_instances(3, |_| 2, -7, &[2, 5, 11], 20_000),
    ));
    out.push(family(
        "b35.step",
        "B_{3,5}(p^{k+1} n + p r + (3p-1)/4) == -(-5/p) B_{3,5}(p^{k-1} n + (4r+3-p)/(4p)) mod 3",
        (3, 5),
        3,
        SeriesForm::Mod3Pair { other: 5 },
        two_progression_instances(4, |_| 3, -5, &[3, 7, 11], 20_000),
    ));
    out.push(family(
        "b32.step",
        "B_{3,2}(p^{k+1} n + p r + (t p-1)/8) == -(-2/p) B_{3,2}(p^{k-1} n + (8r+t-p)/(8p)) mod 3, t = p mod 8",
        (3, 2),
        3,
        SeriesForm::Mod3Pair { other: 2 },
        two_progression_instances(8, |p| p % 8, -2, &[3, 5, 11, 13], 20_000),
    ));
    out.push(family(
        "b37.cycle",
        "B_{3,7}(p^{2k} n + (p^{2k}-1)/3) == (-(-7/p))^k B_{3,7}(n) mod 3",
        (3, 7),
        3,
        SeriesForm::Mod3Pair { other: 7 },
        back_to_start_instances(3, -7, &[2, 5, 11], 20_000),
    ));
    out.push(family(
        "b35.cycle",
        "B_{3,5}(p^{2k} n + (p^{2k}-1)/4) == (-(-5/p))^k B_{3,5}(n) mod 3",
        (3, 5),
        3,
        SeriesForm::Mod3Pair { other: 5 },
        back_to_start_instances(4, -5, &[3, 7, 11], 20_000),
    ));
    out.push(family(
        "b32.cycle",
        "B_{3,2}(p^{2k} n + (p^{2k}-1)/8) == (-(-2/p))^k B_{3,2}(n) mod 3",
        (3, 2),
        3,
        SeriesForm::Mod3Pair { other: 2 },
        back_to_start_instances(8, -2, &[3, 5, 11, 13], 20_000),
    ));

    // --- seed-gated families modulo 7, 11, 13 -------------------------------
    out.push(family(
        "b72.seed",
        "B_{7,2}(p^{2a+1} n + 7(p^{2a+1}-1)/24) == 0 mod 7, gated on B_{7,2}(7(p-1)/24) == 0, excluding p | 24n+7",
        (7, 2),
        7,
        SeriesForm::Engine { modulus: 7 },
        seeded_24_instances(7, 7, 500, 3_000, false),
    ));
    {
        // The per-index exclusion used here (p does not divide 24n+11)
        // matches the series' support; the looser published form
        // (p does not divide 24n+1) is swept informationally alongside.
        let mut instances = seeded_24_instances(11, 11, 500, 3_000, false);
        instances.extend(
            seeded_24_instances(11, 1, 500, 3_000, true),
        );
        out.push(family(
            "b112.seed",
            "B_{11,2}(p^{2a+1} n + 11(p^{2a+1}-1)/24) == 0 mod 11, gated on B_{11,2}(11(p-1)/24) == 0",
            (11, 2),
            11,
            SeriesForm::Engine { modulus: 11 },
            instances,
        ));
    }
    out.push(family(
        "b132.seed",
        "B_{13,2}(p^{2a+1} n + 13(p^{2a+1}-1)/24) == 0 mod 13, gated on B_{13,2}(13(p-1)/24) == 0, excluding p | 24n+13",
        (13, 2),
        13,
        SeriesForm::Engine { modulus: 13 },
        seeded_24_instances(13, 13, 500, 3_000, false),
    ));

    // --- parity families ----------------------------------------------------
    out.push(family(
        "b43.parity",
        "B_{4,3} parity branches gated on the parity of w(p) for f_1^2 f_3",
        (4, 3),
        2,
        SeriesForm::ParityF2F3,
        parity_gated_instances(3, 2, 1, 5, 24, 6, |p| 1 - ((p * p - 1) / 4) as i64, &[5, 7, 11], 500),
    ));
    out.push(family(
        "b83.parity",
        "B_{8,3} parity branches gated on the parity of w(p) for f_1^6 f_3",
        (8, 3),
        2,
        SeriesForm::ParityF2CubedF3,
        parity_gated_instances(3, 6, 1, 3, 8, 6, |p| 2 - ((p * p - 1) / 4) as i64, &[5, 7, 11], 500),
    ));
    out.push(family(
        "b45.parity",
        "B_{4,5} parity branches gated on the parity of w(p) for f_1^2 f_5",
        (4, 5),
        2,
        SeriesForm::ParityF2F5,
        parity_gated_instances(5, 2, 1, 7, 24, 10, |p| 2 - (11 * (p * p - 1) / 12) as i64, &[5, 7, 11], 500),
    ));
    out.push(family(
        "b43.343",
        "B_{4,3}(343 n + 49 r + 10) == 0 mod 2 for r in {0,1,2,4,5,6}",
        (4, 3),
        2,
        SeriesForm::ParityF2F3,
        [0u64, 1, 2, 4, 5, 6]
            .iter()
            .map(|&r| {
                Instance::new(format!("r={r}"), 343, 49 * r + 10, Relation::Vanishing)
                    .with_range(0, 200)
            })
            .collect(),
    ));

    out
}

pub fn family_by_id(id: &str) -> Result<CongruenceFamily> {
    builtin_families()
        .into_iter()
        .find(|f| f.id == id)
        .ok_or_else(|| QlabError::UnknownFamily(id.into()))
}

// ---------------------------------------------------------------------------
// Density experiment
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DensityCheckpoint {
    pub x: u64,
    /// Count of 1 <= n <= x with coefficient nonzero mod p.
    pub nonzero: u64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DensityCurve {
    pub p: u64,
    pub m: u64,
    pub checkpoints: Vec<DensityCheckpoint>,
}

fn smallest_prime_factor(n: u64) -> Option<u64> {
    if n < 2 {
        return None;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return Some(d);
        }
        d += 1;
    }
    Some(n)
}

/// Non-vanishing ratios of B_{p,m} mod p at increasing checkpoints, computed
/// with the generic engine (no congruent shortcut).
pub fn density_experiment(p: u64, m: u64, checkpoints: &[u64]) -> Result<DensityCurve> {
    if p < 5 || !is_prime(p) {
        return Err(QlabError::InvalidSpec(format!("p={p} must be a prime >= 5")));
    }
    if m == 0 || smallest_prime_factor(m).map(|q| q < 5) == Some(true) {
        return Err(QlabError::InvalidSpec(format!("m={m} must be a product of primes >= 5")));
    }
    if m % p == 0 {
        return Err(QlabError::NotCoprime(p, m));
    }
    let mut xs: Vec<u64> = checkpoints.to_vec();
    xs.sort_unstable();
    xs.dedup();
    if xs.is_empty() {
        return Err(QlabError::InvalidSpec("at least one checkpoint required".into()));
    }
    let max = *xs.last().unwrap();
    // m = 1 degenerates to p-regular partitions: f_p f_1 / f_1^2 = f_p / f_1.
    let series = if m == 1 {
        let fp = QSeries::euler_product(p, Ring::ModM(p), max as usize)?;
        let f1 = QSeries::euler_product(1, Ring::ModM(p), max as usize)?;
        fp.div(&f1)?
    } else {
        bipartition_series(BipartitionParams::new(p, m)?, Ring::ModM(p), max as usize)?
    };
    let mut curve = DensityCurve { p, m, checkpoints: Vec::new() };
    let mut nonzero = 0u64;
    let mut cursor = 1u64;
    for &x in &xs {
        while cursor <= x {
            if series.coeff(cursor as i64)? != 0 {
                nonzero += 1;
            }
            cursor += 1;
        }
        curve.checkpoints.push(DensityCheckpoint { x, nonzero, ratio: nonzero as f64 / x as f64 });
    }
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table_matches_engine(params: (u64, u64), modulus: u64, form: SeriesForm, trunc: u64) {
        let table = build_table(BipartitionParams::new(params.0, params.1).unwrap(), &form, trunc).unwrap();
        let engine = bipartition_series(
            BipartitionParams::new(params.0, params.1).unwrap(),
            Ring::ModM(modulus),
            trunc as usize,
        )
        .unwrap();
        for n in 0..=trunc {
            assert_eq!(
                table.coeff_at(n),
                engine.coeff(n as i64).unwrap() as u64,
                "{params:?} mod {modulus} at n={n}"
            );
        }
    }

    #[test]
    fn mod3_pair_tables_match_engine() {
        table_matches_engine((3, 7), 3, SeriesForm::Mod3Pair { other: 7 }, 30_000);
        table_matches_engine((3, 5), 3, SeriesForm::Mod3Pair { other: 5 }, 30_000);
        table_matches_engine((3, 2), 3, SeriesForm::Mod3Pair { other: 2 }, 30_000);
    }

    #[test]
    fn parity_tables_match_engine() {
        table_matches_engine((4, 3), 2, SeriesForm::ParityF2F3, 5_000);
        table_matches_engine((8, 3), 2, SeriesForm::ParityF2CubedF3, 5_000);
        table_matches_engine((4, 5), 2, SeriesForm::ParityF2F5, 5_000);
    }

    #[test]
    fn engine_tables_use_requested_modulus() {
        let table = build_table(
            BipartitionParams::new(7, 2).unwrap(),
            &SeriesForm::Engine { modulus: 7 },
            100,
        )
        .unwrap();
        assert_eq!(table.modulus(), 7);
        assert_eq!(table.coeff_at(0), 1);
    }

    #[test]
    fn pentagonal_support_is_sparse_and_correct() {
        let support = pentagonal_support(1, 1000);
        let dense = QSeries::euler_product(1, Ring::Integers, 1000).unwrap();
        let mut expected: Vec<(u64, i64)> = (0..=1000i64)
            .filter_map(|n| {
                let c = dense.coeff(n).unwrap();
                (c != 0).then_some((n as u64, c))
            })
            .collect();
        expected.sort_unstable();
        assert_eq!(support, expected);
    }

    #[test]
    fn known_small_families_pass() {
        for id in ["b37.4n1", "b37.4n3", "b37.2adic"] {
            let mut fam = family_by_id(id).unwrap();
            for inst in &mut fam.instances {
                inst.n_max = 2_000;
            }
            for report in verify_family(&fam, None).unwrap() {
                assert_eq!(report.status, Status::Pass, "{id}: {:?}", report.witnesses);
                assert!(report.checked > 0);
            }
        }
    }

    #[test]
    fn b311_3adic_passes_at_small_bound() {
        let fam = family_by_id("b311.3adic").unwrap();
        for report in verify_family(&fam, Some(2_000)).unwrap() {
            assert_eq!(report.status, Status::Pass, "{:?}", report.witnesses);
        }
    }

    #[test]
    fn perturbed_instance_fails_with_witness() {
        let fam = family(
            "bogus",
            "deliberately false: B_{3,7}(4n+2) == 0 mod 3",
            (3, 7),
            3,
            SeriesForm::Mod3Pair { other: 7 },
            vec![Instance::new("4n+2", 4, 2, Relation::Vanishing).with_range(0, 200)],
        );
        let reports = verify_family(&fam, None).unwrap();
        assert_eq!(reports[0].status, Status::Fail);
        assert!(!reports[0].witnesses.is_empty());
    }

    #[test]
    fn unmet_symbol_hypothesis_skips() {
        let fam = family(
            "gated",
            "gated on (-7/11) = -1, which is false",
            (3, 7),
            3,
            SeriesForm::Mod3Pair { other: 7 },
            vec![Instance::new("x", 4, 3, Relation::Vanishing)
                .with_hypothesis(Hypothesis::SymbolEquals { a: -7, p: 11, want: -1 })],
        );
        let reports = verify_family(&fam, None).unwrap();
        assert_eq!(reports[0].status, Status::Skip);
        assert!(reports[0].skip_reason.as_deref().unwrap().contains("hypothesis"));
    }

    #[test]
    fn specialization_contains_single_prime_shifts() {
        // Every (step, offset) generated with p repeated twice must appear
        // among the prime-power-shift instances with the same p at k = 0..1,
        // and vice versa at matched parameters: check the k=0 identification
        // (single prime squared) explicitly.
        let squared = squared_product_instances(3, &[2, 5, 11]);
        let shifted = prime_power_shift_instances(3, &[2, 5, 11]);
        for inst in shifted.iter().filter(|i| i.label.contains("k=0")) {
            assert!(
                squared
                    .iter()
                    .any(|s| s.m_step == inst.m_step && s.offset == inst.offset),
                "missing {} ({}, {})",
                inst.label,
                inst.m_step,
                inst.offset
            );
        }
        // The p=2, k=0, j=1 instance reproduces the 4n+3 vanishing.
        assert!(shifted.iter().any(|i| i.m_step == 4 && i.offset == 3));
        // The p=2, k=1, j=1 instance reproduces the 16n+13 vanishing.
        assert!(shifted.iter().any(|i| i.m_step == 16 && i.offset == 13));
    }

    #[test]
    fn two_progression_and_back_to_start_compose() {
        // Applying the k=1 back-to-start relation twice agrees with k=2 on
        // overlapping indices: ((-(d/p))^1)^2 = (-(d/p))^2 and the index maps
        // compose as p^2(p^2 n + e) + e' with e' = (p^2-1)/3.
        let fam = family_by_id("b37.cycle").unwrap();
        let k1 = fam.instances.iter().find(|i| i.label == "p=5, k=1").unwrap();
        let k2 = fam.instances.iter().find(|i| i.label == "p=5, k=2").unwrap();
        assert_eq!(k2.m_step, k1.m_step * k1.m_step);
        assert_eq!(k2.offset, k1.m_step * k1.offset + k1.offset);
        let (m1, m2) = match (&k1.relation, &k2.relation) {
            (
                Relation::Proportional { multiplier: m1, .. },
                Relation::Proportional { multiplier: m2, .. },
            ) => (*m1, *m2),
            _ => unreachable!(),
        };
        assert_eq!(m1 * m1, m2);
    }

    #[test]
    fn cycle_multipliers_reproduce_prior_result() {
        // p=2, k=1 must reproduce the proportional 4n+1 relation with
        // multiplier -1.
        let fam = family_by_id("b37.cycle").unwrap();
        let inst = fam.instances.iter().find(|i| i.label == "p=2, k=1").unwrap();
        assert_eq!(inst.m_step, 4);
        assert_eq!(inst.offset, 1);
        assert_eq!(
            inst.relation,
            Relation::Proportional { multiplier: -1, m2: 1, r2: 0 }
        );
    }

    #[test]
    fn builtin_family_count_and_lookup() {
        let families = builtin_families();
        assert!(families.len() >= 20, "{}", families.len());
        assert!(family_by_id("no_such").is_err());
    }

    #[test]
    fn small_parity_sweeps_pass() {
        let fam = family_by_id("b43.343").unwrap();
        for report in verify_family(&fam, Some(50)).unwrap() {
            assert_eq!(report.status, Status::Pass, "{}: {:?}", report.params, report.witnesses);
        }
    }

    #[test]
    fn parity_branch_gating_matches_w_parity() {
        // w(7) = 1 for the f_1^2 f_3 product, so at p=7 the even branch must
        // skip and the odd branches must run.
        let fam = family_by_id("b43.parity").unwrap();
        let reports = verify_family(&fam, Some(40)).unwrap();
        let even = reports.iter().find(|r| r.params == "p=7, k=0, branch=w-even").unwrap();
        assert_eq!(even.status, Status::Skip);
        let odd = reports.iter().find(|r| r.params == "p=7, k=0, branch=w-odd").unwrap();
        assert_eq!(odd.status, Status::Pass, "{:?}", odd.witnesses);
        for r in &reports {
            assert_ne!(r.status, Status::Fail, "{}: {:?}", r.params, r.witnesses);
        }
    }

    #[test]
    fn density_ratios_decrease_for_small_case() {
        let curve = density_experiment(5, 1, &[500, 2_000, 8_000]).unwrap();
        assert_eq!(curve.checkpoints.len(), 3);
        assert!(curve.checkpoints[0].ratio > curve.checkpoints[1].ratio);
        assert!(curve.checkpoints[1].ratio > curve.checkpoints[2].ratio);
        for c in &curve.checkpoints {
            assert!((0.0..=1.0).contains(&c.ratio));
        }
    }

    #[test]
    fn density_rejects_bad_parameters() {
        assert!(density_experiment(4, 1, &[100]).is_err());
        assert!(density_experiment(5, 6, &[100]).is_err());
        assert!(density_experiment(5, 5, &[100]).is_err());
        assert!(density_experiment(5, 7, &[]).is_err());
    }
}
