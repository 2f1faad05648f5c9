//! Laurent-polynomial slices in the variable p, with exactness windows.
//!
//! A `PLaurent` is one q-slice of a Jacobi-form-like object: finitely many
//! stored coefficients plus a window `[exact_low, exact_high]` in the sense
//! of [`crate::window`]. Querying below `exact_low` returns exact zero;
//! querying above `exact_high` is an error, never a silent zero.
//!
//! All p-poles are expanded ascending: 1/(p − 2 + p⁻¹) = p + 2p² + 3p³ + ….

use crate::error::{Result, SeriesError};
use crate::rational::{rat_int, Rational};
use crate::trunc::TruncationSpec;
use crate::window::{wadd, ENTIRE};
use num_traits::Zero;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PLaurent {
    coeffs: BTreeMap<i64, Rational>,
    exact_low: i64,
    exact_high: i64,
}

impl PLaurent {
    /// The zero slice, certified zero at every exponent.
    pub fn zero_entire() -> Self {
        PLaurent {
            coeffs: BTreeMap::new(),
            exact_low: ENTIRE,
            exact_high: ENTIRE,
        }
    }

    /// A zero slice about which only the window is known.
    pub fn zero_window(exact_low: i64, exact_high: i64) -> Self {
        PLaurent {
            coeffs: BTreeMap::new(),
            exact_low,
            exact_high,
        }
    }

    /// Fully-known Laurent polynomial: window is [valuation, ENTIRE].
    pub fn from_terms(terms: &[(i64, Rational)]) -> Self {
        let mut coeffs = BTreeMap::new();
        for (k, c) in terms {
            if !c.is_zero() {
                let e = coeffs.entry(*k).or_insert_with(Rational::zero);
                *e += c.clone();
            }
        }
        coeffs.retain(|_, c: &mut Rational| !c.is_zero());
        let exact_low = coeffs.keys().next().copied().unwrap_or(ENTIRE);
        PLaurent {
            coeffs,
            exact_low,
            exact_high: ENTIRE,
        }
    }

    pub fn constant(c: Rational) -> Self {
        PLaurent::from_terms(&[(0, c)])
    }

    pub fn monomial(k: i64, c: Rational) -> Self {
        PLaurent::from_terms(&[(k, c)])
    }

    /// Build with an explicit window; entries outside are dropped. The
    /// caller asserts the window is sound: no nonzero true coefficient below
    /// `exact_low`, and the given terms are the true ones up to `exact_high`.
    pub fn with_window(terms: &[(i64, Rational)], exact_low: i64, exact_high: i64) -> Self {
        let mut s = PLaurent::from_terms(terms);
        s.exact_low = exact_low;
        s.exact_high = exact_high;
        s.trim();
        s
    }

    pub fn exact_low(&self) -> i64 {
        self.exact_low
    }

    pub fn exact_high(&self) -> i64 {
        self.exact_high
    }

    pub fn is_entire(&self) -> bool {
        self.exact_high == ENTIRE
    }

    /// True if no stored coefficient is nonzero (the window may still carry
    /// information).
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest stored nonzero exponent. Within the window this is the true
    /// valuation of the slice.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_support(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rational)> {
        self.coeffs.iter().map(|(&k, c)| (k, c))
    }

    /// Certified coefficient of p^k.
    pub fn coeff(&self, k: i64) -> Result<Rational> {
        if k < self.exact_low {
            return Ok(Rational::zero());
        }
        if k > self.exact_high {
            return Err(SeriesError::insufficient(
                format!("p^{k} above exact window top {}", self.exact_high),
                TruncationSpec::q_only(0, k.abs()),
            ));
        }
        Ok(self.coeffs.get(&k).cloned().unwrap_or_else(Rational::zero))
    }

    /// Drop stored zeros and anything outside the window.
    fn trim(&mut self) {
        let lo = self.exact_low;
        let hi = self.exact_high;
        self.coeffs.retain(|&k, c| k >= lo && k <= hi && !c.is_zero());
    }

    pub fn neg(&self) -> PLaurent {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn scale(&self, s: &Rational) -> PLaurent {
        if s.is_zero() {
            // exact zero times anything certified-in-window is certified zero
            return PLaurent {
                coeffs: BTreeMap::new(),
                exact_low: self.exact_low,
                exact_high: self.exact_high,
            };
        }
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c *= s.clone();
        }
        out
    }

    pub fn add(&self, g: &PLaurent) -> PLaurent {
        let exact_low = self.exact_low.min(g.exact_low);
        let exact_high = self.exact_high.min(g.exact_high);
        let mut coeffs = self.coeffs.clone();
        for (&k, c) in &g.coeffs {
            let e = coeffs.entry(k).or_insert_with(Rational::zero);
            *e += c.clone();
        }
        let mut out = PLaurent {
            coeffs,
            exact_low,
            exact_high,
        };
        out.trim();
        out
    }

    pub fn sub(&self, g: &PLaurent) -> PLaurent {
        self.add(&g.neg())
    }

    /// Product with sound window propagation:
    /// low = f.low + g.low, high = min(f.low + g.high, g.low + f.high).
    /// Only coefficients inside the output window are computed.
    pub fn mul(&self, g: &PLaurent) -> PLaurent {
        let exact_low = wadd(self.exact_low, g.exact_low);
        let exact_high = wadd(self.exact_low, g.exact_high).min(wadd(g.exact_low, self.exact_high));
        let mut coeffs: BTreeMap<i64, Rational> = BTreeMap::new();
        if exact_high >= exact_low {
            for (&i, a) in &self.coeffs {
                for (&j, b) in &g.coeffs {
                    let k = i + j;
                    if k < exact_low || k > exact_high {
                        continue;
                    }
                    let e = coeffs.entry(k).or_insert_with(Rational::zero);
                    *e += a.clone() * b.clone();
                }
            }
            coeffs.retain(|_, c| !c.is_zero());
        }
        PLaurent {
            coeffs,
            exact_low,
            exact_high,
        }
    }

    /// p d/dp: coefficient of p^k scales by k. Windows unchanged.
    pub fn p_scale_derivative(&self) -> PLaurent {
        let mut coeffs = BTreeMap::new();
        for (&k, c) in &self.coeffs {
            if k != 0 {
                coeffs.insert(k, c.clone() * rat_int(k));
            }
        }
        PLaurent {
            coeffs,
            exact_low: self.exact_low,
            exact_high: self.exact_high,
        }
    }

    /// Ascending-p inverse, exact up to p^cap (or as far as the input window
    /// allows: high = min(cap, f.high − 2·valuation)).
    ///
    /// Requires a nonzero lowest term inside the window.
    pub fn invert_ascending(&self, cap: i64) -> Result<PLaurent> {
        let v = self.valuation().ok_or_else(|| {
            SeriesError::NotInvertible("zero leading slice at this truncation".into())
        })?;
        debug_assert!(v >= self.exact_low);
        let lead = self.coeffs[&v].clone();
        let inv_lead = Rational::from_integer(1.into()) / lead;
        if self.coeffs.len() == 1 && self.is_entire() {
            // exact monomial: inverse is the exact monomial p^{-v}/lead
            let mut coeffs = BTreeMap::new();
            coeffs.insert(-v, inv_lead);
            return Ok(PLaurent {
                coeffs,
                exact_low: -v,
                exact_high: ENTIRE,
            });
        }
        let exact_high = cap.min(wadd(self.exact_high, -2 * v));
        let mut out = BTreeMap::new();
        if -v <= exact_high {
            out.insert(-v, inv_lead.clone());
        }
        let mut k = -v + 1;
        while k <= exact_high {
            // g_k = -(1/f_v) * sum_{j>=1} f_{v+j} g_{k-j}
            let mut s = Rational::zero();
            for (&e, c) in self.coeffs.range(v + 1..) {
                let j = e - v;
                if j > k + v {
                    break;
                }
                if let Some(prev) = out.get(&(k - j)) {
                    s += c.clone() * prev.clone();
                }
            }
            if !s.is_zero() {
                out.insert(k, -(inv_lead.clone() * s));
            }
            k += 1;
        }
        Ok(PLaurent {
            coeffs: out,
            exact_low: -v,
            exact_high,
        })
    }
}

// Compact rendering for error messages and test failures.
impl fmt::Display for PLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            write!(f, "0")?;
        } else {
            let mut first = true;
            for (k, c) in &self.coeffs {
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                write!(f, "({c})p^{k}")?;
            }
        }
        let top = if self.exact_high >= ENTIRE {
            "entire".to_string()
        } else {
            self.exact_high.to_string()
        };
        write!(f, " [win {}..{}]", self.exact_low, top)
    }
}
