use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{Field, Fp, Ring, Scalar, UniPoly};

/// A rational function num/den over F_p with a monic denominator coprime to
/// the numerator. Zero is 0/1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: UniPoly,
    den: UniPoly,
}

impl RatFunc {
    pub fn new(num: UniPoly, den: UniPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RatFunc::zero();
        }
        let g = UniPoly::gcd(&num, &den);
        let (mut num, mut den) = if g.degree() == Some(0) {
            (num, den)
        } else {
            (num.divrem(&g).0, den.divrem(&g).0)
        };
        let li = den.lead().inv().unwrap();
        if !li.is_one() {
            num = num.scale(li);
            den = den.scale(li);
        }
        RatFunc { num, den }
    }

    pub fn from_poly(p: UniPoly) -> Self {
        RatFunc {
            num: p,
            den: UniPoly::one(),
        }
    }

    /// t^e for any integer e.
    pub fn t_pow(e: i64) -> Self {
        if e >= 0 {
            Self::from_poly(UniPoly::monomial(Fp::one(), e as usize))
        } else {
            RatFunc {
                num: UniPoly::one(),
                den: UniPoly::monomial(Fp::one(), (-e) as usize),
            }
        }
    }

    pub fn num(&self) -> &UniPoly {
        &self.num
    }

    pub fn den(&self) -> &UniPoly {
        &self.den
    }

    /// Value at t = x, or None at a pole.
    pub fn eval(&self, x: Fp) -> Option<Fp> {
        let d = self.den.eval(x);
        d.inv().map(|di| self.num.eval(x) * di)
    }
}

impl Ring for RatFunc {
    fn zero() -> Self {
        RatFunc {
            num: UniPoly::zero(),
            den: UniPoly::one(),
        }
    }
    fn one() -> Self {
        Self::from_poly(UniPoly::one())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn from_fp(c: Fp) -> Self {
        Self::from_poly(UniPoly::constant(c))
    }
}

impl Field for RatFunc {
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(RatFunc::new(self.den.clone(), self.num.clone()))
    }
}

impl Scalar for RatFunc {
    type Dom = UniPoly;
    fn clear_row(row: &[Self]) -> Vec<UniPoly> {
        let mut l = UniPoly::one();
        for r in row {
            if r.den.degree() != Some(0) {
                let g = UniPoly::gcd(&l, &r.den);
                l = &l * &r.den.divrem(&g).0;
            }
        }
        row.iter().map(|r| &r.num * &l.divrem(&r.den).0).collect()
    }
}

impl Scalar for UniPoly {
    type Dom = UniPoly;
    fn clear_row(row: &[Self]) -> Vec<UniPoly> {
        row.to_vec()
    }
}

impl<'a> Add<&'a RatFunc> for RatFunc {
    type Output = RatFunc;
    fn add(self, o: &RatFunc) -> RatFunc {
        if self.den == o.den {
            return RatFunc::new(self.num + &o.num, self.den);
        }
        RatFunc::new(
            &self.num * &o.den + &(&o.num * &self.den),
            &self.den * &o.den,
        )
    }
}

impl<'a> Sub<&'a RatFunc> for RatFunc {
    type Output = RatFunc;
    fn sub(self, o: &RatFunc) -> RatFunc {
        self + &(-o.clone())
    }
}

impl<'a> Mul<&'a RatFunc> for RatFunc {
    type Output = RatFunc;
    fn mul(self, o: &RatFunc) -> RatFunc {
        if self.is_zero() || o.is_zero() {
            return RatFunc::zero();
        }
        RatFunc::new(&self.num * &o.num, &self.den * &o.den)
    }
}

impl Add for RatFunc {
    type Output = RatFunc;
    fn add(self, o: RatFunc) -> RatFunc {
        self + &o
    }
}

impl Sub for RatFunc {
    type Output = RatFunc;
    fn sub(self, o: RatFunc) -> RatFunc {
        self - &o
    }
}

impl Mul for RatFunc {
    type Output = RatFunc;
    fn mul(self, o: RatFunc) -> RatFunc {
        self * &o
    }
}

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -self.num,
            den: self.den,
        }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) {
            write!(f, "{:?}", self.num)
        } else {
            write!(f, "({:?})/({:?})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::with_prime;

    #[test]
    fn normalizes_on_construction() {
        with_prime(101, || {
            let f = UniPoly::from_i64(&[1, 1]);
            let r = RatFunc::new(
                &f * &UniPoly::from_i64(&[0, 2]),
                &f * &UniPoly::from_i64(&[3]),
            );
            assert_eq!(r.den(), &UniPoly::one());
            assert_eq!(
                r.num(),
                &UniPoly::from_i64(&[0, 2]).scale(Fp::new(3).inv().unwrap())
            );
        });
    }

    #[test]
    fn field_inverse() {
        with_prime(101, || {
            let r = RatFunc::new(UniPoly::from_i64(&[1, 2]), UniPoly::from_i64(&[0, 0, 1]));
            assert_eq!(r.clone() * r.inv().unwrap(), RatFunc::one());
        });
    }

    #[test]
    fn clear_row_lands_in_polys() {
        with_prime(101, || {
            let row = vec![
                RatFunc::t_pow(-2),
                RatFunc::from_poly(UniPoly::from_i64(&[1, 1])),
            ];
            let cleared = RatFunc::clear_row(&row);
            assert_eq!(cleared[0], UniPoly::one());
            assert_eq!(cleared[1], UniPoly::from_i64(&[0, 0, 1, 1]));
        });
    }
}
