//! Outward-rounded interval arithmetic over dyadic rationals.
//!
//! An [`Interval`] at precision `prec` is `[lo, hi] * 2^-prec` with big-integer
//! endpoints. Every operation rounds the lower endpoint toward `-inf` and the
//! upper toward `+inf`, so the exact real result is always enclosed. The
//! natural logarithm and `e` are evaluated from series with explicit remainder
//! bounds, never through machine floats.
//!
//! [`decide_lt`] re-runs a comparison at increasing precision until the two
//! enclosures separate.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{precondition, Error, Result};

/// Extra bits carried through series evaluation before the final rounding.
const GUARD_BITS: u32 = 32;

/// Precision ladder used by [`decide_lt`].
pub const PRECISION_LADDER: [u32; 8] = [64, 128, 256, 512, 1024, 2048, 4096, 8192];

fn floor_shr(x: &BigInt, bits: u32) -> BigInt {
    // `>>` on BigInt rounds toward negative infinity.
    x >> bits
}

fn ceil_shr(x: &BigInt, bits: u32) -> BigInt {
    -((-x) >> bits)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: BigInt,
    hi: BigInt,
    prec: u32,
}

impl Interval {
    fn from_raw(lo: BigInt, hi: BigInt, prec: u32) -> Self {
        debug_assert!(lo <= hi, "inverted interval");
        Interval { lo, hi, prec }
    }

    /// The exact integer `v`.
    pub fn int(v: impl Into<BigInt>, prec: u32) -> Self {
        let v = v.into() << prec;
        Interval::from_raw(v.clone(), v, prec)
    }

    /// An enclosure of `num / den`.
    pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>, prec: u32) -> Result<Self> {
        let (num, den) = (num.into(), den.into());
        if den.is_zero() {
            return Err(precondition("division by zero"));
        }
        let scaled = num << prec;
        let (lo, hi) = (scaled.div_floor(&den), scaled.div_ceil(&den));
        Ok(Interval::from_raw(
            lo.clone().min(hi.clone()),
            lo.max(hi),
            prec,
        ))
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    fn check_prec(&self, other: &Interval) {
        assert_eq!(self.prec, other.prec, "mixed-precision interval operation");
    }

    /// Lower endpoint rounded down to `f64` (display only).
    pub fn lower_f64(&self) -> f64 {
        to_f64(&self.lo, self.prec, false)
    }

    /// Upper endpoint rounded up to `f64` (display only).
    pub fn upper_f64(&self) -> f64 {
        to_f64(&self.hi, self.prec, true)
    }

    pub fn width_is_zero(&self) -> bool {
        self.lo == self.hi
    }

    pub fn add(&self, other: &Interval) -> Interval {
        self.check_prec(other);
        Interval::from_raw(&self.lo + &other.lo, &self.hi + &other.hi, self.prec)
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        self.check_prec(other);
        Interval::from_raw(&self.lo - &other.hi, &self.hi - &other.lo, self.prec)
    }

    pub fn neg(&self) -> Interval {
        Interval::from_raw(-&self.hi, -&self.lo, self.prec)
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        self.check_prec(other);
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let min = products.iter().min().expect("non-empty");
        let max = products.iter().max().expect("non-empty");
        Interval::from_raw(
            floor_shr(min, self.prec),
            ceil_shr(max, self.prec),
            self.prec,
        )
    }

    pub fn div(&self, other: &Interval) -> Result<Interval> {
        self.check_prec(other);
        if other.lo.sign() != other.hi.sign() || other.lo.is_zero() || other.hi.is_zero() {
            return Err(precondition("interval divisor contains zero"));
        }
        let mut lo: Option<BigInt> = None;
        let mut hi: Option<BigInt> = None;
        for a in [&self.lo, &self.hi] {
            for b in [&other.lo, &other.hi] {
                let scaled: BigInt = a << self.prec;
                let f = scaled.div_floor(b);
                let c = scaled.div_ceil(b);
                lo = Some(lo.map_or(f.clone(), |l| l.min(f)));
                hi = Some(hi.map_or(c.clone(), |h| h.max(c)));
            }
        }
        Ok(Interval::from_raw(
            lo.expect("set"),
            hi.expect("set"),
            self.prec,
        ))
    }

    pub fn powi(&self, exp: u32) -> Interval {
        let mut acc = Interval::int(1, self.prec);
        for _ in 0..exp {
            acc = acc.mul(self);
        }
        acc
    }

    /// Natural logarithm; the interval must be strictly positive.
    pub fn ln(&self) -> Result<Interval> {
        if !self.lo.is_positive() {
            return Err(precondition("logarithm of a non-positive interval"));
        }
        let (lo, _) = ln_point(&self.lo, self.prec);
        let (_, hi) = ln_point(&self.hi, self.prec);
        Ok(Interval::from_raw(lo, hi, self.prec))
    }

    /// `ln 2`.
    pub fn ln2(prec: u32) -> Interval {
        let w = prec + GUARD_BITS;
        let (l, u) = atanh_ratio(&BigInt::one(), &BigInt::from(3), w);
        Interval::from_raw(
            floor_shr(&(l << 1), GUARD_BITS),
            ceil_shr(&(u << 1), GUARD_BITS),
            prec,
        )
    }

    /// Euler's number `e = sum 1/k!`.
    pub fn e(prec: u32) -> Interval {
        let w = prec + GUARD_BITS;
        let unit = BigInt::one() << w;
        let mut term_lo = unit.clone();
        let mut term_hi = unit.clone();
        let mut sum_lo = &unit << 1;
        let mut sum_hi = &unit << 1;
        let mut k = 1u32;
        while term_hi > BigInt::one() {
            k += 1;
            term_lo = term_lo.div_floor(&BigInt::from(k));
            term_hi = term_hi.div_ceil(&BigInt::from(k));
            sum_lo += &term_lo;
            sum_hi += &term_hi;
        }
        // sum_{j > k} 1/j! < 1/(k! k) <= term_hi / k.
        sum_hi += term_hi + 1;
        Interval::from_raw(
            floor_shr(&sum_lo, GUARD_BITS),
            ceil_shr(&sum_hi, GUARD_BITS),
            prec,
        )
    }

    /// `Some(true)` if certainly `self < other`, `Some(false)` if certainly
    /// `self >= other`, `None` if the enclosures overlap.
    pub fn certainly_lt(&self, other: &Interval) -> Option<bool> {
        self.check_prec(other);
        if self.hi < other.lo {
            Some(true)
        } else if self.lo >= other.hi {
            Some(false)
        } else {
            None
        }
    }

    /// Whether the exact rational `num / den` lies inside the enclosure.
    pub fn contains_ratio(&self, num: i128, den: u128) -> bool {
        let x = BigInt::from(num) << self.prec;
        let den = BigInt::from(den);
        &self.lo * &den <= x && x <= &self.hi * &den
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.12e}, {:.12e}]", self.lower_f64(), self.upper_f64())
    }
}

fn to_f64(x: &BigInt, prec: u32, round_up: bool) -> f64 {
    // Keep 60 significant bits, then nudge one ulp outward.
    let bits = x.bits() as i64;
    let drop = (bits - 60).max(0) as u32;
    let mantissa = if round_up {
        ceil_shr(x, drop)
    } else {
        floor_shr(x, drop)
    };
    let m = mantissa.to_f64().unwrap_or(f64::NAN);
    let v = m * 2f64.powi(drop as i32 - prec as i32);
    if round_up {
        v.next_up()
    } else {
        v.next_down()
    }
}

/// Bounds (scaled by `2^w`) on `atanh(a / c) = sum t^(2i+1) / (2i+1)` for
/// `0 <= a / c <= 1/3`.
fn atanh_ratio(a: &BigInt, c: &BigInt, w: u32) -> (BigInt, BigInt) {
    debug_assert!(!a.is_negative() && c.is_positive() && a * 3 <= *c);
    let scaled = a << w;
    let t_lo = scaled.div_floor(c);
    let t_hi = scaled.div_ceil(c);
    let t2_lo = floor_shr(&(&t_lo * &t_lo), w);
    let t2_hi = ceil_shr(&(&t_hi * &t_hi), w);

    let mut pow_lo = t_lo;
    let mut pow_hi = t_hi;
    let mut sum_lo = BigInt::zero();
    let mut sum_hi = BigInt::zero();
    let mut d = 1u64;
    loop {
        let dd = BigInt::from(d);
        sum_lo += pow_lo.div_floor(&dd);
        sum_hi += pow_hi.div_ceil(&dd);
        pow_lo = floor_shr(&(&pow_lo * &t2_lo), w);
        pow_hi = ceil_shr(&(&pow_hi * &t2_hi), w);
        d += 2;
        if pow_hi <= BigInt::one() {
            break;
        }
    }
    // Tail: sum_{j >= i} t^(2j+1)/(2j+1) <= t^(2i+1) / (1 - t^2) <= 2 t^(2i+1).
    sum_hi += pow_hi << 1;
    (sum_lo, sum_hi)
}

/// Bounds on `ln(m * 2^-prec)` at precision `prec`, for `m > 0`.
fn ln_point(m: &BigInt, prec: u32) -> (BigInt, BigInt) {
    debug_assert!(m.is_positive());
    let w = prec + GUARD_BITS;
    let b = m.bits() - 1;
    let exponent = b as i64 - prec as i64;
    let pow = BigInt::one() << b;
    // m = 2^b y with y in [1, 2); ln y = 2 atanh((y - 1) / (y + 1)).
    let (y_lo, y_hi) = atanh_ratio(&(m - &pow), &(m + &pow), w);
    let (l2_lo, l2_hi) = atanh_ratio(&BigInt::one(), &BigInt::from(3), w);
    let k = BigInt::from(exponent);
    let (k_lo, k_hi) = match exponent.cmp(&0) {
        Ordering::Less => (&k * &l2_hi, &k * &l2_lo),
        _ => (&k * &l2_lo, &k * &l2_hi),
    };
    let lo = (k_lo + y_lo) << 1;
    let hi = (k_hi + y_hi) << 1;
    (floor_shr(&lo, GUARD_BITS), ceil_shr(&hi, GUARD_BITS))
}

/// Decides `lhs < rhs` where `build(prec)` returns enclosures of both sides,
/// escalating along [`PRECISION_LADDER`] until the enclosures separate.
pub fn decide_lt<F>(build: F) -> Result<bool>
where
    F: Fn(u32) -> Result<(Interval, Interval)>,
{
    for &prec in PRECISION_LADDER.iter() {
        if let Some(answer) = decide_lt_at(&build, prec)? {
            return Ok(answer);
        }
    }
    Err(Error::Undecided {
        max_precision: *PRECISION_LADDER.last().expect("non-empty"),
    })
}

/// One rung of [`decide_lt`].
pub fn decide_lt_at<F>(build: F, prec: u32) -> Result<Option<bool>>
where
    F: Fn(u32) -> Result<(Interval, Interval)>,
{
    let (lhs, rhs) = build(prec)?;
    Ok(lhs.certainly_lt(&rhs))
}

/// `log log n` for an integer `n >= 3`.
pub fn ln_ln(n: u64, prec: u32) -> Result<Interval> {
    if n < 3 {
        return Err(precondition(format!("log log n needs n >= 3, got {n}")));
    }
    Interval::int(n, prec).ln()?.ln()
}

impl Interval {
    /// Sign of the enclosure, when it does not straddle zero.
    pub fn sign(&self) -> Option<Sign> {
        if self.lo.is_positive() {
            Some(Sign::Plus)
        } else if self.hi.is_negative() {
            Some(Sign::Minus)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Sign::NoSign)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn encloses(iv: &Interval, x: f64) -> bool {
        iv.lower_f64() <= x && x <= iv.upper_f64()
    }

    #[test]
    fn constants_are_enclosed() {
        for prec in [64, 128, 512] {
            let ln2 = Interval::ln2(prec);
            assert!(encloses(&ln2, std::f64::consts::LN_2), "{ln2}");
            let e = Interval::e(prec);
            assert!(encloses(&e, std::f64::consts::E), "{e}");
        }
    }

    #[test]
    fn ln_is_enclosed_and_tight() {
        for v in [1u64, 2, 3, 10, 15, 20, 21, 200, 2980, 2981, 1 << 40] {
            let iv = Interval::int(v, 128).ln().unwrap();
            let x = (v as f64).ln();
            assert!(
                (iv.lower_f64() - x).abs() < 1e-12 && (iv.upper_f64() - x).abs() < 1e-12,
                "ln {v}: {iv}"
            );
            assert!(!iv.width_is_zero() || v == 1);
        }
        assert!(Interval::int(1, 64).ln().unwrap().width_is_zero());
    }

    #[test]
    fn ln_of_fraction_is_negative() {
        let half = Interval::ratio(1, 2, 96).unwrap();
        let ln = half.ln().unwrap();
        assert!(encloses(&ln, -std::f64::consts::LN_2), "{ln}");
        assert_eq!(ln.sign(), Some(Sign::Minus));
    }

    #[test]
    fn ln_rejects_non_positive() {
        assert!(Interval::int(0, 64).ln().is_err());
        assert!(Interval::int(-3, 64).ln().is_err());
    }

    #[test]
    fn e_digits() {
        // e = 2.71828182845904523536...
        let e = Interval::e(256);
        let lower = Interval::ratio(
            271_828_182_845_904_523_536i128,
            100_000_000_000_000_000_000i128,
            256,
        )
        .unwrap();
        let upper = Interval::ratio(
            271_828_182_845_904_523_537i128,
            100_000_000_000_000_000_000i128,
            256,
        )
        .unwrap();
        assert_eq!(lower.certainly_lt(&e), Some(true));
        assert_eq!(e.certainly_lt(&upper), Some(true));
    }

    #[test]
    fn arithmetic_encloses() {
        let a = Interval::ratio(1, 3, 80).unwrap();
        let b = Interval::ratio(-2, 7, 80).unwrap();
        assert!(encloses(&a.add(&b), 1.0 / 3.0 - 2.0 / 7.0));
        assert!(encloses(&a.sub(&b), 1.0 / 3.0 + 2.0 / 7.0));
        assert!(encloses(&a.mul(&b), -2.0 / 21.0));
        assert!(encloses(&a.div(&b).unwrap(), -7.0 / 6.0));
        assert!(encloses(&b.neg(), 2.0 / 7.0));
        assert!(encloses(&a.powi(3), 1.0 / 27.0));
        assert!(a.div(&Interval::int(0, 80)).is_err());
    }

    #[test]
    fn decide_escalates_until_separated() {
        // ln 3 vs 1.0986122886681098 (just above ln 3 = 1.09861228866810969...).
        let answer = decide_lt(|p| {
            Ok((
                Interval::int(3, p).ln()?,
                Interval::ratio(10_986_122_886_681_098i64, 10_000_000_000_000_000i64, p)?,
            ))
        })
        .unwrap();
        assert!(answer);
        let undecided = decide_lt(|p| Ok((Interval::ln2(p), Interval::ln2(p))));
        assert!(matches!(undecided, Err(Error::Undecided { .. })));
    }

    #[test]
    fn ln_ln_domain() {
        assert!(ln_ln(2, 64).is_err());
        let v = ln_ln(16, 64).unwrap();
        assert!(encloses(&v, (16f64).ln().ln()));
    }
}
