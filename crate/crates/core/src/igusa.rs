//! The Igusa cusp form χ₁₀ and the coefficients c(h,n,m) of 1/χ₁₀.
//!
//! χ₁₀ is built as the additive (Maass/Saito–Kurokawa) lift of the
//! weight-10 index-1 Jacobi cusp form φ₁₀,₁ = Θ²Δ:
//!
//! ```text
//! [χ₁₀]_{q^a p^ℓ q̃^b} = Σ_{d | gcd(a,ℓ,b)} d⁹ · c_φ(ab/d², ℓ/d)
//! ```
//!
//! The lift is not taken on faith: the expansion of 1/χ₁₀ is pinned against
//! two independent closed forms, DT₀ = −1/(Θ²Δ) and DT₁ = −24℘/Δ (the
//! `kkv` and `dt1` checks in [`crate::verify`]).
//!
//! Indexing follows the primitive relation
//! DT^{S×E}_{m,(β_h,n)} = (−1)^{m+1} c(h−1, n−1, m), i.e. the series DTₙ is
//! the q̃^{n−1} slice of −1/χ₁₀ with coefficients stored in the (−p)^m sign
//! convention.

use crate::error::{Result, SeriesError};
use crate::forms::phi_10_1;
use crate::qseries::QSeries;
use crate::rational::Rational;
use crate::triseries::TriSeries;
use crate::trunc::TruncationSpec;
use crate::window::ENTIRE;
use crate::CONVENTION_TAG;
use num_bigint::BigInt;
use num_integer::gcd;
use num_traits::Zero;
use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Coefficient table of the lift seed φ₁₀,₁ = Θ²Δ, certified for q-exponents
/// up to `a_max` (each slice is a fully-known Laurent polynomial, so all ℓ
/// are certified).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JacobiCoeffTable {
    entries: BTreeMap<(i64, i64), Rational>,
    a_max: i64,
}

impl JacobiCoeffTable {
    pub fn build(a_max: i64) -> JacobiCoeffTable {
        let phi = phi_10_1(&TruncationSpec::q_only(a_max.max(1), 0));
        let mut entries = BTreeMap::new();
        for (a, slice) in phi.slices() {
            for (l, c) in slice.terms() {
                entries.insert((a, l), c.clone());
            }
        }
        JacobiCoeffTable { entries, a_max }
    }

    /// Reassemble from persisted entries (cache load path).
    pub fn from_entries(a_max: i64, entries: BTreeMap<(i64, i64), Rational>) -> Self {
        JacobiCoeffTable { entries, a_max }
    }

    pub fn a_max(&self) -> i64 {
        self.a_max
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(i64, i64), &Rational)> {
        self.entries.iter()
    }

    /// c_φ(a, ℓ). Zero for a ≤ 0 (the seed has q-valuation 1); certified for
    /// a ≤ a_max; errors above.
    pub fn coeff(&self, a: i64, l: i64) -> Result<Rational> {
        if a <= 0 {
            return Ok(Rational::zero());
        }
        if a > self.a_max {
            return Err(SeriesError::insufficient(
                format!("phi_10_1 table certified to a <= {}, need a = {a}", self.a_max),
                TruncationSpec::q_only(a, l.abs()),
            ));
        }
        Ok(self
            .entries
            .get(&(a, l))
            .cloned()
            .unwrap_or_else(Rational::zero))
    }
}

fn phi_slot() -> &'static Mutex<Option<Arc<JacobiCoeffTable>>> {
    static TABLE: OnceLock<Mutex<Option<Arc<JacobiCoeffTable>>>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(None))
}

/// Shared φ-table: keeps the largest one built so far.
fn shared_phi_table(a_max: i64) -> Arc<JacobiCoeffTable> {
    let mut guard = phi_slot().lock().unwrap();
    if let Some(t) = guard.as_ref() {
        if t.a_max() >= a_max {
            return Arc::clone(t);
        }
    }
    let built = Arc::new(JacobiCoeffTable::build(a_max));
    *guard = Some(Arc::clone(&built));
    built
}

/// Install a previously persisted φ-table (cache load path); kept only if it
/// reaches further than what is already in memory.
pub fn seed_phi_table(table: JacobiCoeffTable) {
    let mut guard = phi_slot().lock().unwrap();
    let replace = match guard.as_ref() {
        Some(t) => t.a_max() < table.a_max(),
        None => true,
    };
    if replace {
        *guard = Some(Arc::new(table));
    }
}

/// The largest φ-table built or seeded so far, if any. The lift dominates
/// runtime, so persisting this (rather than a minimal slice) is what makes
/// cache extension cheap.
pub fn current_phi_table() -> Option<Arc<JacobiCoeffTable>> {
    phi_slot().lock().unwrap().clone()
}

/// Coefficient of q^a p^ℓ q̃^b in χ₁₀:
/// Σ_{d | gcd(a,ℓ,b)} d⁹ c_φ(ab/d², ℓ/d), with gcd(x, 0) = x.
pub fn maass_lift_coeff(table: &JacobiCoeffTable, a: i64, l: i64, b: i64) -> Result<Rational> {
    if b < 1 || a < 0 {
        return Err(SeriesError::Domain(format!(
            "maass_lift_coeff needs a >= 0, b >= 1; got (a={a}, l={l}, b={b})"
        )));
    }
    let g = gcd(gcd(a, l.abs()), b);
    let mut total = Rational::zero();
    for d in 1..=g {
        if g % d != 0 {
            continue;
        }
        let c = table.coeff(a * b / (d * d), l / d)?;
        if !c.is_zero() {
            total += c * Rational::from_integer(BigInt::from(d).pow(9));
        }
    }
    Ok(total)
}

/// χ₁₀ assembled slice by slice: q̃-valuation 1, leading q̃-slice exactly
/// φ₁₀,₁. Slices are fully known in p: lift coefficients vanish for
/// ℓ² > 4ab (cusp-form support, inherited from the seed).
pub fn chi10(trunc: &TruncationSpec) -> Result<TriSeries> {
    let t_max = trunc.t_max.max(1);
    let q_max = trunc.q_max.max(1);
    let table = shared_phi_table(q_max * t_max);
    let mut t_slices = Vec::new();
    for b in 1..=t_max {
        let mut q_slices = Vec::new();
        for a in 1..=q_max {
            let l_bound = 2 * ((a * b) as f64).sqrt() as i64 + 1;
            let mut terms = Vec::new();
            for l in -l_bound..=l_bound {
                if l * l > 4 * a * b {
                    continue;
                }
                let c = maass_lift_coeff(&table, a, l, b)?;
                if !c.is_zero() {
                    terms.push((l, c));
                }
            }
            q_slices.push((a, crate::plaurent::PLaurent::from_terms(&terms)));
        }
        t_slices.push((b, QSeries::from_slices(q_slices, 1, q_max)));
    }
    Ok(TriSeries::from_slices(t_slices, 1, t_max))
}

/// 1/χ₁₀, with the requested region certified exact: q̃ ∈ [−1, t_max],
/// q ∈ [−1, q_max], p ∈ [−p_window, p_window] on every slice.
///
/// Internally χ₁₀ is built at an enlarged truncation (inversion erodes
/// windows: the q̃-inversion convolves against 1/(Θ²Δ) whose slices lose
/// roughly two p-exponents per q-step); if the first enlargement guess
/// falls short the increments double. Results are cached per request.
pub fn inv_chi10(trunc: &TruncationSpec) -> Result<Arc<TriSeries>> {
    static CACHE: OnceLock<Mutex<Vec<Arc<TriSeries>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
    // held across the build: concurrent callers wait instead of duplicating
    // the lift
    let mut guard = cache.lock().unwrap();
    let q_req = trunc.q_max.max(0);
    let t_req = trunc.t_max.max(0);
    let p_req = trunc.p_window.max(1);
    for hit in guard.iter() {
        if covers_box(hit, t_req, q_req, p_req) {
            return Ok(Arc::clone(hit));
        }
    }

    // measured erosion slopes; doubled on each retry
    let mut dq = 2 * (t_req + 2) + 2;
    let mut dp_extra = 2 * t_req + 6;
    let mut last_err = None;
    for _ in 0..6 {
        let q_int = q_req + dq;
        let p_int = p_req + 2 * q_int + dp_extra;
        let build = TruncationSpec::new(q_int, t_req + 2, p_int);
        let chi = chi10(&build)?;
        let inv = chi.invert(&TruncationSpec::new(q_int - 2, t_req, p_int))?;
        if covers_box(&inv, t_req, q_req, p_req) {
            let arc = Arc::new(inv);
            guard.push(Arc::clone(&arc));
            return Ok(arc);
        }
        last_err = Some(SeriesError::insufficient(
            format!("inv_chi10 internal enlargement at {build} did not certify {trunc}"),
            build,
        ));
        dq *= 2;
        dp_extra = dp_extra * 2 + p_req;
    }
    Err(last_err.unwrap())
}

fn covers_box(inv: &TriSeries, t_max: i64, q_max: i64, p_window: i64) -> bool {
    if inv.t_high() < t_max {
        return false;
    }
    for t in -1..=t_max {
        if t < inv.t_low() {
            continue;
        }
        match inv.slice(t) {
            None => continue, // exactly-zero slice
            Some(s) => {
                if !s.covers(q_max, p_window) {
                    return false;
                }
            }
        }
    }
    true
}

/// The series DTₙ(p,q): the q̃^{n−1} slice of −1/χ₁₀. The stored coefficient
/// at (q^{h−1}, p^m) is DT^{S×E}_{m,(β_h,n)} · (−1)^m.
pub fn dt_series(n: i64, trunc: &TruncationSpec) -> Result<QSeries> {
    if n < 0 {
        return Err(SeriesError::Domain(format!("dt_series needs n >= 0, got {n}")));
    }
    let spec = TruncationSpec::new(trunc.q_max, trunc.t_max.max(n - 1).max(0), trunc.p_window);
    let inv = inv_chi10(&spec)?;
    let slice = match inv.slice(n - 1) {
        Some(s) => s.clone(),
        None => QSeries::zero_entire(),
    };
    Ok(slice.neg())
}

/// Persisted map (h, n, m) → c(h,n,m) over a certified box, together with
/// the per-(n,h) valuation bounds (below them the coefficient is exactly
/// zero, outside the box a lookup errors rather than returning 0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IgusaTable {
    entries: BTreeMap<(i64, i64, i64), Rational>,
    slice_lows: BTreeMap<(i64, i64), i64>,
    trunc: TruncationSpec,
    convention_tag: String,
}

impl IgusaTable {
    /// Harvest the certified box [−1, q_max] × [−1, t_max] × [−p_window, p_window]
    /// from the inverse expansion.
    pub fn build(trunc: &TruncationSpec) -> Result<IgusaTable> {
        let inv = inv_chi10(trunc)?;
        let mut entries = BTreeMap::new();
        let mut slice_lows = BTreeMap::new();
        for n in -1..=trunc.t_max {
            for h in -1..=trunc.q_max {
                let pl = inv
                    .slice(n)
                    .and_then(|s| s.slice(h))
                    .cloned()
                    .unwrap_or_else(crate::plaurent::PLaurent::zero_entire);
                slice_lows.insert((n, h), pl.exact_low());
                for m in pl.exact_low().max(-trunc.p_window)..=trunc.p_window {
                    let v = pl.coeff(m)?;
                    if !v.is_zero() {
                        entries.insert((h, n, m), v);
                    }
                }
            }
        }
        Ok(IgusaTable {
            entries,
            slice_lows,
            trunc: *trunc,
            convention_tag: CONVENTION_TAG.to_string(),
        })
    }

    pub fn from_parts(
        trunc: TruncationSpec,
        convention_tag: String,
        entries: BTreeMap<(i64, i64, i64), Rational>,
        slice_lows: BTreeMap<(i64, i64), i64>,
    ) -> Self {
        IgusaTable {
            entries,
            slice_lows,
            trunc,
            convention_tag,
        }
    }

    pub fn trunc(&self) -> &TruncationSpec {
        &self.trunc
    }

    pub fn convention_tag(&self) -> &str {
        &self.convention_tag
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(i64, i64, i64), &Rational)> {
        self.entries.iter()
    }

    pub fn slice_lows(&self) -> impl Iterator<Item = (&(i64, i64), &i64)> {
        self.slice_lows.iter()
    }

    /// c(h, n, m). Exact zero below the pole orders (h < −1 or n < −1) and
    /// below a slice's certified valuation; a hard "insufficient truncation"
    /// error outside the certificate.
    pub fn igusa_c(&self, h: i64, n: i64, m: i64) -> Result<Rational> {
        if h < -1 || n < -1 {
            return Ok(Rational::zero());
        }
        if h > self.trunc.q_max || n > self.trunc.t_max {
            return Err(SeriesError::insufficient(
                format!("c({h},{n},{m}) outside certified box"),
                self.trunc
                    .union(&TruncationSpec::new(h, n, m.abs())),
            ));
        }
        let low = self.slice_lows.get(&(n, h)).copied().unwrap_or(ENTIRE);
        if m < low {
            return Ok(Rational::zero());
        }
        if m > self.trunc.p_window {
            return Err(SeriesError::insufficient(
                format!("c({h},{n},{m}) above certified p-window"),
                self.trunc
                    .union(&TruncationSpec::new(h, n, m.abs())),
            ));
        }
        Ok(self
            .entries
            .get(&(h, n, m))
            .cloned()
            .unwrap_or_else(Rational::zero))
    }

    /// Rebuild at an enlarged truncation, checking that every previously
    /// certified entry is unchanged (extension monotonicity).
    pub fn extend(&self, trunc: &TruncationSpec) -> Result<IgusaTable> {
        let bigger = IgusaTable::build(&self.trunc.union(trunc))?;
        for ((h, n, m), v) in &self.entries {
            debug_assert_eq!(
                &bigger.igusa_c(*h, *n, *m).expect("inside certified box"),
                v,
                "extension changed certified c({h},{n},{m})"
            );
        }
        Ok(bigger)
    }
}
