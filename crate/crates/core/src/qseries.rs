//! Laurent series in q whose coefficients are windowed p-slices.
//!
//! This models the Jacobi-form-like objects of the theory: Θ², Δ⁻¹, G, the
//! Quot series Qₙ, the slice series DTₙ. The q-window `[q_low, q_high]`
//! follows the same semantics as the p-windows ([`crate::window`]); each
//! slice additionally carries its own p-window — windows genuinely differ
//! across slices after inversion, so truncation metadata is per slice, not
//! global.
//!
//! Values are immutable after construction; the type is `Send + Sync` and
//! safe for concurrent readers.

use crate::error::{Result, SeriesError};
use crate::plaurent::PLaurent;
use crate::rational::{rat, Rational};
use crate::trunc::TruncationSpec;
use crate::window::{wadd, ENTIRE};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSeries {
    slices: BTreeMap<i64, PLaurent>,
    q_low: i64,
    q_high: i64,
}

impl QSeries {
    /// Certified zero at every (q, p) exponent.
    pub fn zero_entire() -> Self {
        QSeries {
            slices: BTreeMap::new(),
            q_low: ENTIRE,
            q_high: ENTIRE,
        }
    }

    /// Exactly-known constant.
    pub fn constant(c: Rational) -> Self {
        if c.is_zero() {
            return QSeries::zero_entire();
        }
        let mut slices = BTreeMap::new();
        slices.insert(0, PLaurent::constant(c));
        QSeries {
            slices,
            q_low: 0,
            q_high: ENTIRE,
        }
    }

    pub fn one() -> Self {
        QSeries::constant(Rational::one())
    }

    /// Assemble from explicit slices. `q_low` must bound the support from
    /// below; with a finite `q_high`, missing slices inside the window count
    /// as exactly-zero slices.
    pub fn from_slices(slices: Vec<(i64, PLaurent)>, q_low: i64, q_high: i64) -> Self {
        let mut map = BTreeMap::new();
        for (j, s) in slices {
            debug_assert!(j >= q_low && j <= q_high);
            map.insert(j, s);
        }
        let mut out = QSeries {
            slices: map,
            q_low,
            q_high,
        };
        out.trim();
        out
    }

    pub fn q_low(&self) -> i64 {
        self.q_low
    }

    pub fn q_high(&self) -> i64 {
        self.q_high
    }

    /// Stored slice, or `None` meaning "exactly zero slice" (below q_low,
    /// or absent inside the window).
    pub fn slice(&self, j: i64) -> Option<&PLaurent> {
        self.slices.get(&j)
    }

    pub fn slices(&self) -> impl Iterator<Item = (i64, &PLaurent)> {
        self.slices.iter().map(|(&j, s)| (j, s))
    }

    pub fn is_zero(&self) -> bool {
        self.slices.values().all(|s| s.is_zero())
    }

    /// Certified coefficient of q^j p^k.
    pub fn coeff(&self, j: i64, k: i64) -> Result<Rational> {
        if j < self.q_low {
            return Ok(Rational::zero());
        }
        if j > self.q_high {
            return Err(SeriesError::insufficient(
                format!("q^{j} above q-window top {}", self.q_high),
                TruncationSpec::q_only(j, k.abs()),
            ));
        }
        match self.slices.get(&j) {
            Some(s) => s.coeff(k).map_err(|e| at_q(e, j)),
            None => Ok(Rational::zero()),
        }
    }

    /// True iff every slice in `q ∈ [lo_q, q_max]` is certified on
    /// `[-p_window, p_window]` (windows whose `exact_low` exceeds −p_window
    /// still qualify: below `exact_low` is certified zero).
    pub fn covers(&self, q_max: i64, p_window: i64) -> bool {
        if self.q_high < q_max {
            return false;
        }
        for (&j, s) in &self.slices {
            if j > q_max {
                continue;
            }
            if s.exact_high() < p_window {
                return false;
            }
        }
        true
    }

    fn trim(&mut self) {
        self.slices.retain(|_, s| !(s.is_zero() && s.is_entire()));
    }

    pub fn neg(&self) -> QSeries {
        self.map_slices(|s| s.neg())
    }

    pub fn scale(&self, c: &Rational) -> QSeries {
        self.map_slices(|s| s.scale(c))
    }

    fn map_slices(&self, f: impl Fn(&PLaurent) -> PLaurent) -> QSeries {
        QSeries {
            slices: self.slices.iter().map(|(&j, s)| (j, f(s))).collect(),
            q_low: self.q_low,
            q_high: self.q_high,
        }
    }

    /// Multiply by q^d.
    pub fn shift_q(&self, d: i64) -> QSeries {
        QSeries {
            slices: self.slices.iter().map(|(&j, s)| (j + d, s.clone())).collect(),
            q_low: wadd(self.q_low, d),
            q_high: wadd(self.q_high, d),
        }
    }

    pub fn add(&self, g: &QSeries) -> QSeries {
        let q_low = self.q_low.min(g.q_low);
        let q_high = self.q_high.min(g.q_high);
        let mut slices = BTreeMap::new();
        if q_high >= ENTIRE {
            // both entire: sparse union
            for (&j, s) in self.slices.iter().chain(g.slices.iter()) {
                let e = slices.entry(j).or_insert_with(PLaurent::zero_entire);
                *e = e.add(s);
            }
        } else {
            for j in q_low..=q_high {
                let a = self.slice_or_zero(j);
                let b = g.slice_or_zero(j);
                slices.insert(j, a.add(&b));
            }
        }
        let mut out = QSeries {
            slices,
            q_low,
            q_high,
        };
        out.trim();
        out
    }

    pub fn sub(&self, g: &QSeries) -> QSeries {
        self.add(&g.neg())
    }

    fn slice_or_zero(&self, j: i64) -> PLaurent {
        if j < self.q_low {
            return PLaurent::zero_entire();
        }
        match self.slices.get(&j) {
            Some(s) => s.clone(),
            None => PLaurent::zero_entire(),
        }
    }

    /// q-resolved product. Output q-window:
    /// [f.q_low + g.q_low, min(f.q_low + g.q_high, g.q_low + f.q_high)];
    /// each output slice is the convolution sum with p-windows propagated by
    /// [`PLaurent::add`]/[`PLaurent::mul`].
    pub fn mul(&self, g: &QSeries) -> QSeries {
        let q_low = wadd(self.q_low, g.q_low);
        let q_high = wadd(self.q_low, g.q_high).min(wadd(g.q_low, self.q_high));
        let mut slices = BTreeMap::new();
        if q_high >= ENTIRE {
            // both factors exactly known: convolve sparse supports
            for (&i, a) in &self.slices {
                for (&j, b) in &g.slices {
                    let t = a.mul(b);
                    let e = slices.entry(i + j).or_insert_with(PLaurent::zero_entire);
                    *e = e.add(&t);
                }
            }
        } else if q_high >= q_low {
            for out_j in q_low..=q_high {
                // splits with i > f.q_high have j < g.q_low and vanish exactly;
                // same on the other side, so this range is exhaustive
                let lo = self.q_low.max(out_j.saturating_sub(g.q_high).max(i64::MIN / 2));
                let hi = self.q_high.min(out_j - g.q_low);
                let mut acc: Option<PLaurent> = None;
                let mut i = lo;
                while i <= hi {
                    let a = self.slice_or_zero(i);
                    let b = g.slice_or_zero(out_j - i);
                    let t = a.mul(&b);
                    acc = Some(match acc {
                        None => t,
                        Some(prev) => prev.add(&t),
                    });
                    i += 1;
                }
                slices.insert(out_j, acc.unwrap_or_else(PLaurent::zero_entire));
            }
        }
        let mut out = QSeries {
            slices,
            q_low,
            q_high,
        };
        out.trim();
        out
    }

    /// Restrict the q-window top (sound: claims less).
    pub fn truncate_q(&self, q_max: i64) -> QSeries {
        if q_max >= self.q_high {
            return self.clone();
        }
        QSeries {
            slices: self
                .slices
                .iter()
                .filter(|(&j, _)| j <= q_max)
                .map(|(&j, s)| (j, s.clone()))
                .collect(),
            q_low: self.q_low,
            q_high: q_max,
        }
    }

    /// p d/dp, slice-wise. Windows unchanged.
    pub fn p_scale_derivative(&self) -> QSeries {
        self.map_slices(|s| s.p_scale_derivative())
    }

    /// Multiplicative inverse. The leading q-slice must be nonzero, and is
    /// inverted as an ascending-p series exact to `trunc.p_window`; the
    /// q-window of the result is min(q_high − 2·q_low, trunc.q_max).
    pub fn invert(&self, trunc: &TruncationSpec) -> Result<QSeries> {
        if self.q_low >= ENTIRE {
            return Err(SeriesError::NotInvertible(
                "cannot invert the zero series".into(),
            ));
        }
        let s = self.q_low;
        let lead = self
            .slices
            .get(&s)
            .ok_or_else(|| SeriesError::NotInvertible("zero leading slice".into()))?;
        let inv0 = lead.invert_ascending(trunc.p_window)?;
        let q_high = wadd(self.q_high, -2 * s).min(trunc.q_max);
        let mut out: BTreeMap<i64, PLaurent> = BTreeMap::new();
        out.insert(-s, inv0.clone());
        let mut t = 1i64;
        while -s + t <= q_high {
            // g_{-s+t} = -inv0 * sum_{u=1..t} f_{s+u} g_{-s+t-u}
            let mut acc: Option<PLaurent> = None;
            for u in 1..=t {
                if s + u > self.q_high {
                    break;
                }
                let fu = self.slice_or_zero(s + u);
                let gp = out
                    .get(&(-s + t - u))
                    .cloned()
                    .unwrap_or_else(PLaurent::zero_entire);
                let term = fu.mul(&gp);
                acc = Some(match acc {
                    None => term,
                    Some(prev) => prev.add(&term),
                });
            }
            let acc = acc.unwrap_or_else(PLaurent::zero_entire);
            out.insert(-s + t, inv0.mul(&acc.neg()));
            t += 1;
        }
        Ok(QSeries {
            slices: out,
            q_low: -s,
            q_high,
        })
    }

    /// ½ (p d/dp)[ (p d/dp f) / f ], the operator (p d/dp)² log applied to a
    /// square: for f = Θ² this is (p d/dp)² log Θ without ever materializing
    /// half-integer powers of p.
    pub fn log_derivative_sq(&self, trunc: &TruncationSpec) -> Result<QSeries> {
        let inv = self.invert(trunc)?;
        Ok(self
            .p_scale_derivative()
            .mul(&inv)
            .p_scale_derivative()
            .scale(&rat(1, 2)))
    }
}

/// Π_{n≥1} (1 − qⁿ)^exponent, exact to trunc.q_max, as a pure q-series
/// (every slice is a fully-known constant).
pub fn eta_power(exponent: i64, trunc: &TruncationSpec) -> QSeries {
    let qmax = trunc.q_max.max(0);
    let coeffs = eta_power_dense(exponent, qmax);
    let slices = coeffs
        .into_iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(j, c)| {
            (
                j as i64,
                PLaurent::constant(Rational::from_integer(c)),
            )
        })
        .collect();
    QSeries::from_slices(slices, 0, qmax)
}

/// Dense integer expansion of Π (1 − qⁿ)^e; factor by factor, each factor a
/// binomial series in qⁿ.
pub(crate) fn eta_power_dense(exponent: i64, qmax: i64) -> Vec<BigInt> {
    let n_terms = (qmax + 1) as usize;
    let mut acc = vec![BigInt::zero(); n_terms];
    acc[0] = BigInt::one();
    for n in 1..=qmax.max(0) {
        let mut fac: Vec<(usize, BigInt)> = Vec::new();
        if exponent >= 0 {
            // (1-q^n)^e = sum_j (-1)^j C(e,j) q^{nj}
            let mut c = BigInt::one();
            let mut j = 0i64;
            while j <= exponent && n * j <= qmax {
                fac.push((
                    (n * j) as usize,
                    if j % 2 == 0 { c.clone() } else { -c.clone() },
                ));
                c = c * BigInt::from(exponent - j) / BigInt::from(j + 1);
                j += 1;
            }
        } else {
            // (1-q^n)^{-E} = sum_j C(j+E-1, E-1) q^{nj}
            let e = -exponent;
            let mut c = BigInt::one();
            let mut j = 0i64;
            while n * j <= qmax {
                fac.push(((n * j) as usize, c.clone()));
                c = c * BigInt::from(j + e) / BigInt::from(j + 1);
                j += 1;
            }
        }
        if fac.len() == 1 {
            continue;
        }
        let mut next = vec![BigInt::zero(); n_terms];
        for (d, c) in &fac {
            for i in 0..n_terms - d {
                if !acc[i].is_zero() {
                    next[i + d] += &acc[i] * c;
                }
            }
        }
        acc = next;
    }
    acc
}

fn at_q(e: SeriesError, j: i64) -> SeriesError {
    match e {
        SeriesError::InsufficientTruncation { context, needed } => {
            SeriesError::InsufficientTruncation {
                context: format!("q^{j} slice: {context}"),
                needed: TruncationSpec::new(needed.q_max.max(j.abs()), needed.t_max, needed.p_window),
            }
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat_int;

    fn poly(terms: &[(i64, i64)]) -> QSeries {
        // exactly-known polynomial in q
        let slices = terms
            .iter()
            .map(|&(j, c)| (j, PLaurent::constant(rat_int(c))))
            .collect();
        let lo = terms.iter().map(|t| t.0).min().unwrap_or(0);
        QSeries::from_slices(slices, lo, ENTIRE)
    }

    #[test]
    fn polynomial_identity() {
        // (1+q)(1-q) = 1 - q^2
        let f = poly(&[(0, 1), (1, 1)]);
        let g = poly(&[(0, 1), (1, -1)]);
        let h = f.mul(&g);
        assert_eq!(h.coeff(0, 0).unwrap(), rat_int(1));
        assert_eq!(h.coeff(1, 0).unwrap(), rat_int(0));
        assert_eq!(h.coeff(2, 0).unwrap(), rat_int(-1));
        assert_eq!(h.coeff(7, 3).unwrap(), rat_int(0));
    }

    #[test]
    fn mul_takes_min_of_q_windows() {
        let f = QSeries::from_slices(vec![(0, PLaurent::constant(rat_int(1)))], 0, 4);
        let g = QSeries::from_slices(vec![(1, PLaurent::constant(rat_int(1)))], 1, 3);
        let h = f.mul(&g);
        assert_eq!(h.q_low(), 1);
        // min(0 + 3, 1 + 4) = 3
        assert_eq!(h.q_high(), 3);
        assert!(h.coeff(4, 0).is_err());
    }

    #[test]
    fn invert_geometric_series() {
        let f = poly(&[(0, 1), (1, -1)]);
        let inv = f.invert(&TruncationSpec::q_only(8, 4)).unwrap();
        for j in 0..=8 {
            assert_eq!(inv.coeff(j, 0).unwrap(), rat_int(1));
        }
        assert!(inv.coeff(9, 0).is_err());
        // two-sided within windows
        let lhs = f.mul(&inv);
        let rhs = inv.mul(&f);
        for j in 0..=lhs.q_high() {
            assert_eq!(lhs.coeff(j, 0).unwrap(), if j == 0 { rat_int(1) } else { rat_int(0) });
            assert_eq!(lhs.coeff(j, 0).unwrap(), rhs.coeff(j, 0).unwrap());
        }
    }

    #[test]
    fn eta_power_known_expansions() {
        let t = TruncationSpec::q_only(10, 0);
        // Ramanujan tau values (without the q prefactor)
        let e24 = eta_power(24, &t);
        let expect = [
            1i64, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920, 534612,
        ];
        for (j, v) in expect.iter().enumerate() {
            assert_eq!(e24.coeff(j as i64, 0).unwrap(), rat_int(*v));
        }
        // Göttsche numbers for K3
        let em24 = eta_power(-24, &t);
        let expect = [
            1i64, 24, 324, 3200, 25650, 176256, 1073720, 5930496, 30178575, 143184000, 639249300,
        ];
        for (j, v) in expect.iter().enumerate() {
            assert_eq!(em24.coeff(j as i64, 0).unwrap(), rat_int(*v));
        }
        // exponent 0 is the constant 1
        let e0 = eta_power(0, &t);
        assert_eq!(e0.coeff(0, 0).unwrap(), rat_int(1));
        assert!(!e0.is_zero());
        for j in 1..=10 {
            assert_eq!(e0.coeff(j, 0).unwrap(), rat_int(0));
        }
        // product of inverse pairs is 1
        let prod = e24.mul(&em24);
        for j in 0..=prod.q_high() {
            assert_eq!(
                prod.coeff(j, 0).unwrap(),
                if j == 0 { rat_int(1) } else { rat_int(0) }
            );
        }
    }

    #[test]
    fn log_derivative_additivity() {
        let t = TruncationSpec::q_only(6, 8);
        let f = poly(&[(0, 1), (1, -3)]);
        let g = poly(&[(0, 2), (1, 1), (2, 5)]);
        let lhs = f.mul(&g).log_derivative_sq(&t).unwrap();
        let rhs = f
            .log_derivative_sq(&t)
            .unwrap()
            .add(&g.log_derivative_sq(&t).unwrap());
        for j in 0..=lhs.q_high().min(rhs.q_high()) {
            assert_eq!(lhs.coeff(j, 0).unwrap(), rhs.coeff(j, 0).unwrap(), "q^{j}");
        }
        // log of a constant is zero
        let c = QSeries::constant(rat_int(7));
        let z = c.log_derivative_sq(&t).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn window_soundness_small_vs_large_truncation() {
        let small = TruncationSpec::q_only(4, 3);
        let large = TruncationSpec::q_only(9, 12);
        let f = poly(&[(0, 1), (1, -1), (2, 4)]);
        let a = f.invert(&small).unwrap();
        let b = f.invert(&large).unwrap();
        for j in a.q_low()..=a.q_high() {
            let s = a.slice(j).unwrap();
            for k in s.exact_low().min(0)..=s.exact_high().min(20) {
                assert_eq!(a.coeff(j, k).unwrap(), b.coeff(j, k).unwrap());
            }
        }
    }
}
