//! Exact rationals, the class partition used for coordinates, and a
//! deterministic fresh-value scan.
//!
//! The rationals are split into countably many classes, each dense in
//! the line: class `n` holds the positive integer `n` together with
//! every reduced fraction whose denominator's largest prime factor is
//! the `n`-th prime (so denominators `2^k` land in class 1, `3^k` and
//! `6^k` in class 2, and so on); non-positive integers land in class 1.
//! [`fresh_in_class`] picks a canonical member of a class inside an
//! open interval, which is what makes coordinate construction
//! deterministic.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// 1-based index of a rational's class.
pub type ClassIndex = u64;

/// Arbitrary-precision rational in reduced form with positive
/// denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(BigRational);

impl Rat {
    /// `numer/denom`; panics when `denom` is zero.
    pub fn new(numer: i64, denom: i64) -> Rat {
        assert!(denom != 0, "zero denominator");
        Rat(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_int(n: i64) -> Rat {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Rat {
        Rat(BigRational::from_integer(n))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub(crate) fn ratio(&self) -> &BigRational {
        &self.0
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rat({self})")
    }
}

/// Parses `a` or `a/b` with optional leading minus; `b` must be nonzero.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational {0:?}: expected `a` or `a/b` with nonzero b")]
pub struct RatParseError(pub String);

impl FromStr for Rat {
    type Err = RatParseError;

    fn from_str(s: &str) -> Result<Self, RatParseError> {
        let text = s.trim();
        let err = || RatParseError(s.to_owned());
        match text.split_once('/') {
            None => {
                let n: BigInt = text.parse().map_err(|_| err())?;
                Ok(Rat(BigRational::from_integer(n)))
            }
            Some((a, b)) => {
                let numer: BigInt = a.trim().parse().map_err(|_| err())?;
                let denom: BigInt = b.trim().parse().map_err(|_| err())?;
                if denom.is_zero() {
                    return Err(err());
                }
                Ok(Rat(BigRational::new(numer, denom)))
            }
        }
    }
}

// Growing prime table shared by class and freshness computations.
static PRIMES: Mutex<Vec<u64>> = Mutex::new(Vec::new());

fn with_primes<R>(f: impl FnOnce(&mut Vec<u64>) -> R) -> R {
    let mut primes = PRIMES.lock().unwrap();
    if primes.is_empty() {
        primes.extend([2, 3, 5, 7, 11, 13]);
    }
    f(&mut primes)
}

fn extend_primes(primes: &mut Vec<u64>) {
    let mut candidate = primes.last().unwrap() + 2;
    loop {
        let mut is_prime = true;
        for &p in primes.iter() {
            if p * p > candidate {
                break;
            }
            if candidate % p == 0 {
                is_prime = false;
                break;
            }
        }
        if is_prime {
            primes.push(candidate);
            return;
        }
        candidate += 2;
    }
}

/// The `n`-th prime, 1-based: `nth_prime(1) == 2`.
pub fn nth_prime(n: ClassIndex) -> u64 {
    assert!(n >= 1, "prime indices are 1-based");
    let n = usize::try_from(n).expect("prime index out of addressable range");
    with_primes(|primes| {
        while primes.len() < n {
            extend_primes(primes);
        }
        primes[n - 1]
    })
}

/// 1-based rank of a prime `p` in the ordered primes.
fn prime_index(p: u64) -> ClassIndex {
    with_primes(|primes| {
        while *primes.last().unwrap() < p {
            extend_primes(primes);
        }
        match primes.binary_search(&p) {
            Ok(i) => (i + 1) as ClassIndex,
            Err(_) => panic!("prime_index called on composite {p}"),
        }
    })
}

/// Largest prime factor of `n >= 2` by trial division.
fn largest_prime_factor(n: &BigUint) -> BigUint {
    let mut n = n.clone();
    let two = BigUint::from(2u32);
    let mut largest = BigUint::one();
    while (&n).is_even() {
        largest = two.clone();
        n /= &two;
    }
    let mut d = BigUint::from(3u32);
    while &d * &d <= n {
        while (&n % &d).is_zero() {
            largest = d.clone();
            n /= &d;
        }
        d += &two;
    }
    if n > BigUint::one() {
        largest = n;
    }
    largest
}

/// Class of `q`. Positive integers are their own class index,
/// non-positive integers share class 1, and a non-integer lands in the
/// class ranked by the largest prime factor of its denominator.
///
/// Panics when the index cannot be represented in a `u64`; see
/// [`try_class_of`] for the total variant.
pub fn class_of(q: &Rat) -> ClassIndex {
    try_class_of(q).expect("class index exceeds u64")
}

/// [`class_of`] returning `None` instead of panicking when the class
/// index does not fit in a `u64` (positive integers beyond `u64::MAX`,
/// or denominators whose largest prime factor is itself beyond `u64`).
pub fn try_class_of(q: &Rat) -> Option<ClassIndex> {
    if q.is_integer() {
        let n = q.numer();
        if n.sign() == Sign::Plus {
            n.to_u64()
        } else {
            Some(1)
        }
    } else {
        let denom = q.denom().magnitude();
        let p = largest_prime_factor(denom).to_u64()?;
        Some(prime_index(p))
    }
}

/// Smallest-denominator member of class `n` strictly inside the open
/// interval `(lower, upper)`, with `None` meaning unbounded.
///
/// The scan runs over fractions `a / p^k` (`p` the `n`-th prime,
/// `p` not dividing `a`): smallest `k` admitting a solution, then
/// smallest `|a|`, then the positive sign. It never returns an
/// endpoint, and panics if `lower < upper` fails.
pub fn fresh_in_class(n: ClassIndex, lower: Option<&Rat>, upper: Option<&Rat>) -> Rat {
    fresh_in_class_avoiding(n, lower, upper, &[])
}

/// [`fresh_in_class`] that additionally skips the values in `avoid`.
/// The scan order is unchanged; excluded values are passed over.
pub fn fresh_in_class_avoiding(
    n: ClassIndex,
    lower: Option<&Rat>,
    upper: Option<&Rat>,
    avoid: &[Rat],
) -> Rat {
    assert!(n >= 1, "class indices are 1-based");
    if let (Some(l), Some(u)) = (lower, upper) {
        assert!(l < u, "empty interval: {l} is not below {u}");
    }
    let p = BigInt::from(nth_prime(n));
    let mut denom = BigInt::one();
    loop {
        denom *= &p;
        // Strict bounds on the numerator: lower*denom < a < upper*denom.
        let lo = lower.map(|l| (l.ratio() * &denom).floor().to_integer() + 1);
        let hi = upper.map(|u| (u.ratio() * &denom).ceil().to_integer() - 1);
        if let (Some(lo), Some(hi)) = (&lo, &hi) {
            if lo > hi {
                continue;
            }
        }
        let admissible = |a: &BigInt| -> bool {
            if (a % &p).is_zero() {
                return false;
            }
            let value = BigRational::new(a.clone(), denom.clone());
            !avoid.iter().any(|r| *r.ratio() == value)
        };
        if let Some(a) = pick_numerator(lo.as_ref(), hi.as_ref(), &admissible) {
            return Rat(BigRational::new(a, denom));
        }
    }
}

/// Numerator in `[lo, hi]` minimizing `|a|`, positive on ties, among
/// those passing `admissible`. `None` bounds are unbounded sides.
fn pick_numerator(
    lo: Option<&BigInt>,
    hi: Option<&BigInt>,
    admissible: &dyn Fn(&BigInt) -> bool,
) -> Option<BigInt> {
    let one = BigInt::one();
    let below = |x: &BigInt, bound: Option<&BigInt>| bound.map_or(true, |b| x <= b);
    let above = |x: &BigInt, bound: Option<&BigInt>| bound.map_or(true, |b| x >= b);
    match (lo, hi) {
        (Some(lo), _) if lo > &BigInt::zero() => {
            // Entirely positive: smallest a from lo upward.
            let mut a = lo.clone();
            while below(&a, hi) {
                if admissible(&a) {
                    return Some(a);
                }
                a += &one;
            }
            None
        }
        (_, Some(hi)) if hi < &BigInt::zero() => {
            // Entirely negative: largest a from hi downward.
            let mut a = hi.clone();
            while above(&a, lo) {
                if admissible(&a) {
                    return Some(a);
                }
                a -= &one;
            }
            None
        }
        _ => {
            // Interval straddles zero: alternate +m, -m outward.
            let mut m = one.clone();
            loop {
                let pos_in = below(&m, hi);
                let neg = -&m;
                let neg_in = above(&neg, lo);
                if !pos_in && !neg_in {
                    return None;
                }
                if pos_in && admissible(&m) {
                    return Some(m);
                }
                if neg_in && admissible(&neg) {
                    return Some(neg);
                }
                m += &one;
            }
        }
    }
}

impl PartialOrd<i64> for Rat {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        Some(self.0.cmp(&BigRational::from_integer(BigInt::from(*other))))
    }
}

impl PartialEq<i64> for Rat {
    fn eq(&self, other: &i64) -> bool {
        self.0 == BigRational::from_integer(BigInt::from(*other))
    }
}
