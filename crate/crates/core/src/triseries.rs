//! Laurent series in q̃ whose coefficients are [`QSeries`] values: the home
//! of χ₁₀ and −1/χ₁₀. The q̃-window semantics mirror the q- and p-levels;
//! the q̃-grading is the index n of the Hilbert scheme via exponent q̃^{n−1}.

use crate::error::{Result, SeriesError};
use crate::qseries::QSeries;
use crate::rational::Rational;
use crate::trunc::TruncationSpec;
use crate::window::{wadd, ENTIRE};
use num_bigint::BigInt;
use num_traits::One;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriSeries {
    slices: BTreeMap<i64, QSeries>,
    t_low: i64,
    t_high: i64,
}

impl TriSeries {
    pub fn zero_entire() -> Self {
        TriSeries {
            slices: BTreeMap::new(),
            t_low: ENTIRE,
            t_high: ENTIRE,
        }
    }

    pub fn one() -> Self {
        let mut slices = BTreeMap::new();
        slices.insert(0, QSeries::one());
        TriSeries {
            slices,
            t_low: 0,
            t_high: ENTIRE,
        }
    }

    pub fn from_slices(slices: Vec<(i64, QSeries)>, t_low: i64, t_high: i64) -> Self {
        let mut map = BTreeMap::new();
        for (t, s) in slices {
            debug_assert!(t >= t_low && t <= t_high);
            map.insert(t, s);
        }
        let mut out = TriSeries {
            slices: map,
            t_low,
            t_high,
        };
        out.trim();
        out
    }

    pub fn t_low(&self) -> i64 {
        self.t_low
    }

    pub fn t_high(&self) -> i64 {
        self.t_high
    }

    pub fn slice(&self, t: i64) -> Option<&QSeries> {
        self.slices.get(&t)
    }

    pub fn slices(&self) -> impl Iterator<Item = (i64, &QSeries)> {
        self.slices.iter().map(|(&t, s)| (t, s))
    }

    /// Certified coefficient of q̃^t q^j p^k.
    pub fn coeff(&self, t: i64, j: i64, k: i64) -> Result<Rational> {
        if t < self.t_low {
            return Ok(Rational::from_integer(0.into()));
        }
        if t > self.t_high {
            return Err(SeriesError::insufficient(
                format!("q̃^{t} above q̃-window top {}", self.t_high),
                TruncationSpec::new(j.abs(), t, k.abs()),
            ));
        }
        match self.slices.get(&t) {
            Some(s) => s.coeff(j, k),
            None => Ok(Rational::from_integer(0.into())),
        }
    }

    fn trim(&mut self) {
        self.slices
            .retain(|_, s| !(s.is_zero() && s.q_high() >= ENTIRE));
    }

    fn slice_or_zero(&self, t: i64) -> QSeries {
        match self.slices.get(&t) {
            Some(s) => s.clone(),
            None => QSeries::zero_entire(),
        }
    }

    pub fn neg(&self) -> TriSeries {
        TriSeries {
            slices: self.slices.iter().map(|(&t, s)| (t, s.neg())).collect(),
            t_low: self.t_low,
            t_high: self.t_high,
        }
    }

    pub fn scale(&self, c: &Rational) -> TriSeries {
        TriSeries {
            slices: self.slices.iter().map(|(&t, s)| (t, s.scale(c))).collect(),
            t_low: self.t_low,
            t_high: self.t_high,
        }
    }

    /// Multiply by q̃^d.
    pub fn shift_t(&self, d: i64) -> TriSeries {
        TriSeries {
            slices: self.slices.iter().map(|(&t, s)| (t + d, s.clone())).collect(),
            t_low: wadd(self.t_low, d),
            t_high: wadd(self.t_high, d),
        }
    }

    pub fn add(&self, g: &TriSeries) -> TriSeries {
        let t_low = self.t_low.min(g.t_low);
        let t_high = self.t_high.min(g.t_high);
        let mut slices = BTreeMap::new();
        if t_high >= ENTIRE {
            for (&t, s) in self.slices.iter().chain(g.slices.iter()) {
                let e = slices.entry(t).or_insert_with(QSeries::zero_entire);
                *e = e.add(s);
            }
        } else {
            for t in t_low..=t_high {
                slices.insert(t, self.slice_or_zero(t).add(&g.slice_or_zero(t)));
            }
        }
        let mut out = TriSeries {
            slices,
            t_low,
            t_high,
        };
        out.trim();
        out
    }

    pub fn sub(&self, g: &TriSeries) -> TriSeries {
        self.add(&g.neg())
    }

    /// q̃-graded analogue of [`QSeries::mul`].
    pub fn mul(&self, g: &TriSeries) -> TriSeries {
        let t_low = wadd(self.t_low, g.t_low);
        let t_high = wadd(self.t_low, g.t_high).min(wadd(g.t_low, self.t_high));
        let mut slices = BTreeMap::new();
        if t_high >= ENTIRE {
            for (&i, a) in &self.slices {
                for (&j, b) in &g.slices {
                    let t = a.mul(b);
                    let e = slices.entry(i + j).or_insert_with(QSeries::zero_entire);
                    *e = e.add(&t);
                }
            }
        } else if t_high >= t_low {
            for out_t in t_low..=t_high {
                let lo = self.t_low.max(out_t.saturating_sub(g.t_high));
                let hi = self.t_high.min(out_t - g.t_low);
                let mut acc: Option<QSeries> = None;
                let mut i = lo;
                while i <= hi {
                    let term = self.slice_or_zero(i).mul(&g.slice_or_zero(out_t - i));
                    acc = Some(match acc {
                        None => term,
                        Some(prev) => prev.add(&term),
                    });
                    i += 1;
                }
                slices.insert(out_t, acc.unwrap_or_else(QSeries::zero_entire));
            }
        }
        let mut out = TriSeries {
            slices,
            t_low,
            t_high,
        };
        out.trim();
        out
    }

    pub fn truncate_t(&self, t_max: i64) -> TriSeries {
        if t_max >= self.t_high {
            return self.clone();
        }
        TriSeries {
            slices: self
                .slices
                .iter()
                .filter(|(&t, _)| t <= t_max)
                .map(|(&t, s)| (t, s.clone()))
                .collect(),
            t_low: self.t_low,
            t_high: t_max,
        }
    }

    /// q̃-graded inverse; the leading q̃-slice inversion delegates to
    /// [`QSeries::invert`].
    pub fn invert(&self, trunc: &TruncationSpec) -> Result<TriSeries> {
        if self.t_low >= ENTIRE {
            return Err(SeriesError::NotInvertible(
                "cannot invert the zero series".into(),
            ));
        }
        let s = self.t_low;
        let lead = self
            .slices
            .get(&s)
            .ok_or_else(|| SeriesError::NotInvertible("zero leading q̃-slice".into()))?;
        let inv0 = lead.invert(trunc)?;
        let t_high = wadd(self.t_high, -2 * s).min(trunc.t_max);
        let mut out: BTreeMap<i64, QSeries> = BTreeMap::new();
        out.insert(-s, inv0.clone());
        let mut t = 1i64;
        while -s + t <= t_high {
            let mut acc: Option<QSeries> = None;
            for u in 1..=t {
                if s + u > self.t_high {
                    break;
                }
                let fu = self.slice_or_zero(s + u);
                let gp = out
                    .get(&(-s + t - u))
                    .cloned()
                    .unwrap_or_else(QSeries::zero_entire);
                let term = fu.mul(&gp);
                acc = Some(match acc {
                    None => term,
                    Some(prev) => prev.add(&term),
                });
            }
            let acc = acc.unwrap_or_else(QSeries::zero_entire);
            out.insert(-s + t, inv0.mul(&acc.neg()));
            t += 1;
        }
        Ok(TriSeries {
            slices: out,
            t_low: -s,
            t_high,
        })
    }
}

/// Π_{n≥1} (1 − xⁿ)⁻²⁴ for a series x of positive q̃-valuation, exact to
/// `trunc.t_max`. Only finitely many factors contribute: n·t_low ≤ t_max.
pub fn product_substitute_24(x: &TriSeries, trunc: &TruncationSpec) -> Result<TriSeries> {
    if x.t_low() <= 0 {
        return Err(SeriesError::NonConvergent(format!(
            "inner series has q̃-valuation bound {} <= 0",
            x.t_low()
        )));
    }
    let t_max = trunc.t_max;
    let step = x.t_low();
    // powers of x up to x^i with i*step <= t_max
    let mut powers: Vec<TriSeries> = vec![TriSeries::one()];
    let mut i = 1i64;
    while i * step <= t_max {
        let next = powers.last().unwrap().mul(x).truncate_t(t_max);
        powers.push(next);
        i += 1;
    }
    let mut result = TriSeries::one().truncate_t(t_max);
    let mut n = 1i64;
    while n * step <= t_max {
        // (1 - x^n)^{-24} = sum_j C(j+23, 23) x^{nj}
        let mut factor = TriSeries::one().truncate_t(t_max);
        let mut j = 1i64;
        while (n * j * step) <= t_max {
            let binom = binomial_big(j + 23, 23);
            let term = powers[(n * j) as usize].scale(&Rational::from_integer(binom));
            factor = factor.add(&term);
            j += 1;
        }
        result = result.mul(&factor).truncate_t(t_max);
        n += 1;
    }
    Ok(result)
}

fn binomial_big(n: i64, k: i64) -> BigInt {
    let mut c = BigInt::one();
    for i in 0..k {
        c = c * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    c
}
