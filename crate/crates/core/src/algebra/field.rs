//! Prime field arithmetic.
//!
//! The modulus is process-wide (set once by the CLI) with a per-thread
//! override used by tests that want to work over a tiny field such as F_7.

use std::cell::Cell;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// 2^61 - 1, a Mersenne prime. Products fit comfortably in a u128.
pub const DEFAULT_PRIME: u64 = (1u64 << 61) - 1;

static GLOBAL_PRIME: AtomicU64 = AtomicU64::new(DEFAULT_PRIME);

thread_local! {
    static LOCAL_PRIME: Cell<u64> = const { Cell::new(0) };
}

/// The modulus in effect on the current thread.
#[inline]
pub fn prime() -> u64 {
    let local = LOCAL_PRIME.with(|c| c.get());
    if local != 0 {
        local
    } else {
        GLOBAL_PRIME.load(Ordering::Relaxed)
    }
}

/// Set the process-wide modulus. Fails unless `p` is a prime below 2^63.
pub fn set_global_prime(p: u64) -> Result<()> {
    check_prime(p)?;
    GLOBAL_PRIME.store(p, Ordering::Relaxed);
    Ok(())
}

pub fn check_prime(p: u64) -> Result<()> {
    if p < 2 || p >= (1u64 << 63) || !is_prime(p) {
        return Err(Error::InvalidPrime(p));
    }
    Ok(())
}

/// Run `f` with `p` as the modulus on this thread, restoring the previous
/// setting afterwards (also on unwind).
pub fn with_prime<R>(p: u64, f: impl FnOnce() -> R) -> R {
    assert!(is_prime(p) && p < (1u64 << 63), "not a usable prime: {p}");
    struct Restore(u64);
    impl Drop for Restore {
        fn drop(&mut self) {
            LOCAL_PRIME.with(|c| c.set(self.0));
        }
    }
    let prev = LOCAL_PRIME.with(|c| c.replace(p));
    let _guard = Restore(prev);
    f()
}

fn mul_mod_raw(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_raw(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod_raw(r, b, m);
        }
        b = mul_mod_raw(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_raw(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_raw(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// An element of F_p for the thread's current p.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fp(u64);

impl Fp {
    pub const ZERO: Fp = Fp(0);

    pub fn new(v: u64) -> Fp {
        Fp(v % prime())
    }

    pub fn from_i64(v: i64) -> Fp {
        let p = prime() as i128;
        Fp(((v as i128).rem_euclid(p)) as u64)
    }

    pub fn from_i128(v: i128) -> Fp {
        let p = prime() as i128;
        Fp(v.rem_euclid(p) as u64)
    }

    pub fn one() -> Fp {
        Fp(1 % prime())
    }

    #[inline]
    pub fn value(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Signed representative in (-p/2, p/2], handy for display.
    pub fn signed(self) -> i128 {
        let p = prime();
        if self.0 > p / 2 {
            self.0 as i128 - p as i128
        } else {
            self.0 as i128
        }
    }

    pub fn pow(self, mut e: u64) -> Fp {
        let mut base = self;
        let mut acc = Fp::one();
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base *= base;
            e >>= 1;
        }
        acc
    }

    pub fn inv(self) -> Option<Fp> {
        if self.0 == 0 {
            return None;
        }
        let p = prime() as i128;
        let (mut r0, mut r1) = (p, self.0 as i128);
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        debug_assert_eq!(r0, 1);
        Some(Fp(s0.rem_euclid(p) as u64))
    }

    /// Parse a decimal integer (optionally negative) and reduce it.
    pub fn parse(s: &str) -> Option<Fp> {
        let s = s.trim();
        let (neg, digits) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let ten = Fp::new(10);
        let mut acc = Fp::ZERO;
        for b in digits.bytes() {
            acc = acc * ten + Fp::new((b - b'0') as u64);
        }
        Some(if neg { -acc } else { acc })
    }
}

#[inline]
fn reduce_m61(x: u128) -> u64 {
    let lo = (x as u64) & DEFAULT_PRIME;
    let hi = (x >> 61) as u64;
    let mut r = lo + (hi & DEFAULT_PRIME) + ((x >> 122) as u64);
    while r >= DEFAULT_PRIME {
        r -= DEFAULT_PRIME;
    }
    r
}

impl Add for Fp {
    type Output = Fp;
    #[inline]
    fn add(self, o: Fp) -> Fp {
        let p = prime();
        let s = self.0 + o.0;
        Fp(if s >= p { s - p } else { s })
    }
}

impl Sub for Fp {
    type Output = Fp;
    #[inline]
    fn sub(self, o: Fp) -> Fp {
        if self.0 >= o.0 {
            Fp(self.0 - o.0)
        } else {
            Fp(self.0 + prime() - o.0)
        }
    }
}

impl Mul for Fp {
    type Output = Fp;
    #[inline]
    fn mul(self, o: Fp) -> Fp {
        let p = prime();
        let x = self.0 as u128 * o.0 as u128;
        if p == DEFAULT_PRIME {
            Fp(reduce_m61(x))
        } else {
            Fp((x % p as u128) as u64)
        }
    }
}

impl Neg for Fp {
    type Output = Fp;
    #[inline]
    fn neg(self) -> Fp {
        if self.0 == 0 {
            self
        } else {
            Fp(prime() - self.0)
        }
    }
}

impl AddAssign for Fp {
    fn add_assign(&mut self, o: Fp) {
        *self = *self + o;
    }
}

impl SubAssign for Fp {
    fn sub_assign(&mut self, o: Fp) {
        *self = *self - o;
    }
}

impl MulAssign for Fp {
    fn mul_assign(&mut self, o: Fp) {
        *self = *self * o;
    }
}

impl<'a> Add<&'a Fp> for Fp {
    type Output = Fp;
    fn add(self, o: &Fp) -> Fp {
        self + *o
    }
}

impl<'a> Sub<&'a Fp> for Fp {
    type Output = Fp;
    fn sub(self, o: &Fp) -> Fp {
        self - *o
    }
}

impl<'a> Mul<&'a Fp> for Fp {
    type Output = Fp;
    fn mul(self, o: &Fp) -> Fp {
        self * *o
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Fp {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u64(self.0)
    }
}

impl<'de> Deserialize<'de> for Fp {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Fp, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        crate::formula::json::scalar_from_value(&v).map_err(serde::de::Error::custom)
    }
}

/// C(a, b) mod p with the convention C(a, b) = 0 for a < b.
pub fn binomial(a: u64, b: u64) -> Fp {
    if b > a {
        return Fp::ZERO;
    }
    let b = b.min(a - b);
    let mut num = Fp::one();
    let mut den = Fp::one();
    for i in 0..b {
        num *= Fp::new(a - i);
        den *= Fp::new(i + 1);
    }
    num * den.inv().expect("prime exceeds binomial arguments")
}
