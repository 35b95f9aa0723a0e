//! Legendre polynomials by the three-term recurrence
//! `(k+1) P_{k+1} = (2k+1) t P_k - k P_{k-1}`.
//!
//! Exact coefficient vectors are kept integer-valued as `Q_k = 2^k P_k`,
//! which satisfy `(k+1) Q_{k+1} = 2(2k+1) t Q_k - 4k Q_{k-1}` with exact
//! integer division.

use std::io::{Read, Write};

use rug::integer::Order;
use rug::{Assign, Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::numeric::BigRational;

/// Coefficient vectors of `Q_0, ..., Q_degree`; `q[k][j]` multiplies `t^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct LegendreTable {
    q: Vec<Vec<Integer>>,
}

const MAGIC: &[u8; 8] = b"SPLEGQ01";

impl LegendreTable {
    pub fn build(degree: usize) -> Self {
        let mut q: Vec<Vec<Integer>> = Vec::with_capacity(degree + 1);
        q.push(vec![Integer::from(1)]);
        if degree >= 1 {
            q.push(vec![Integer::new(), Integer::from(2)]);
        }
        for k in 1..degree {
            let (prev, cur) = (&q[k - 1], &q[k]);
            let a = 2 * (2 * k as u64 + 1);
            let b = 4 * k as u64;
            let mut next = vec![Integer::new(); k + 2];
            // Only coefficients with the parity of k+1 are nonzero.
            for j in ((k + 1) % 2..=k + 1).step_by(2) {
                let mut v = if j > 0 { Integer::from(&cur[j - 1] * a) } else { Integer::new() };
                if j < prev.len() {
                    v -= Integer::from(&prev[j] * b);
                }
                v.div_exact_u_mut((k + 1) as u32);
                next[j] = v;
            }
            q.push(next);
        }
        LegendreTable { q }
    }

    pub fn degree(&self) -> usize {
        self.q.len() - 1
    }

    /// Coefficients of `2^k P_k`.
    pub fn scaled(&self, k: usize) -> &[Integer] {
        &self.q[k]
    }

    /// Exact coefficients of `P_k`.
    pub fn coefficients(&self, k: usize) -> Vec<BigRational> {
        let scale = Integer::from(1) << k as u32;
        self.q[k]
            .iter()
            .map(|c| Rational::from((c.clone(), scale.clone())))
            .collect()
    }

    pub(crate) fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&(self.degree() as u64).to_le_bytes())?;
        for row in &self.q {
            for c in row {
                let bytes = c.to_digits::<u8>(Order::Lsf);
                w.write_all(&[u8::from(*c < 0)])?;
                w.write_all(&(bytes.len() as u64).to_le_bytes())?;
                w.write_all(&bytes)?;
            }
        }
        w.flush()
    }

    pub(crate) fn read_from<R: Read>(mut r: R) -> std::io::Result<Self> {
        let bad = |m: &str| std::io::Error::new(std::io::ErrorKind::InvalidData, m.to_string());
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(bad("not a Legendre coefficient cache file"));
        }
        let mut word = [0u8; 8];
        r.read_exact(&mut word)?;
        let degree = u64::from_le_bytes(word) as usize;
        let mut q = Vec::with_capacity(degree + 1);
        let mut buf = Vec::new();
        for k in 0..=degree {
            let mut row = Vec::with_capacity(k + 1);
            for _ in 0..=k {
                let mut sign = [0u8; 1];
                r.read_exact(&mut sign)?;
                r.read_exact(&mut word)?;
                let len = u64::from_le_bytes(word) as usize;
                buf.resize(len, 0);
                r.read_exact(&mut buf)?;
                let mut c = Integer::from_digits(&buf, Order::Lsf);
                if sign[0] == 1 {
                    c = -c;
                }
                row.push(c);
            }
            q.push(row);
        }
        Ok(LegendreTable { q })
    }
}

/// `P_0(u), ..., P_n(u)` exactly, for rational `u`.
///
/// With `u = p/r`, the integers `R_k = r^k Q_k(u)` obey
/// `(k+1) R_{k+1} = 2(2k+1) p R_k - 4k r^2 R_{k-1}`.
pub fn legendre_values(u: &BigRational, n: usize) -> Vec<BigRational> {
    let (p, r) = (u.numer(), u.denom());
    let r2 = Integer::from(r * r);
    let mut vals: Vec<Integer> = Vec::with_capacity(n + 1);
    vals.push(Integer::from(1));
    if n >= 1 {
        vals.push(Integer::from(p * 2u32));
    }
    for k in 1..n {
        let mut v = Integer::from(&vals[k] * p) * (2 * (2 * k as u64 + 1));
        v -= Integer::from(&vals[k - 1] * &r2) * (4 * k as u64);
        v.div_exact_u_mut((k + 1) as u32);
        vals.push(v);
    }
    let mut den = Integer::from(1);
    let step = Integer::from(r * 2u32);
    vals.into_iter()
        .map(|v| {
            let out = Rational::from((v, den.clone()));
            den *= &step;
            out
        })
        .collect()
}

/// `P_0(u), ..., P_n(u)` in `prec`-bit floats.
pub fn legendre_values_float(u: &Float, n: usize, prec: u32) -> Vec<Float> {
    let mut vals = Vec::with_capacity(n + 1);
    vals.push(Float::with_val(prec, 1));
    if n >= 1 {
        vals.push(Float::with_val(prec, u));
    }
    for k in 1..n {
        let mut v = Float::with_val(prec, &vals[k] * u);
        v *= 2 * k as u32 + 1;
        v -= Float::with_val(prec, &vals[k - 1] * k as u32);
        v /= k as u32 + 1;
        vals.push(v);
    }
    vals
}

fn check_degree(available: usize, degree: usize) -> Result<()> {
    if degree >= available {
        return Err(Error::InsufficientMoments {
            degree,
            needed: degree + 1,
            available,
        });
    }
    Ok(())
}

/// `m_k = <P_k(u)>` from `mu_j = <u^j>` for `k = 0..=degree`, exactly.
pub fn legendre_moments(mu: &[BigRational], degree: usize) -> Result<Vec<BigRational>> {
    check_degree(mu.len(), degree)?;
    let scaled = super::sequence::common_denominator(&mu[..=degree]);
    Ok(legendre_moments_scaled(&scaled.nums, &scaled.den, degree))
}

pub(crate) fn legendre_moments_scaled(nums: &[Integer], den: &Integer, degree: usize) -> Vec<BigRational> {
    let table = super::cache::table(degree);
    let mut out = Vec::with_capacity(degree + 1);
    let mut scale = den.clone();
    let mut acc = Integer::new();
    for k in 0..=degree {
        acc.assign(0);
        let qk = table.scaled(k);
        for j in (k % 2..=k).step_by(2) {
            acc += &qk[j] * &nums[j];
        }
        out.push(Rational::from((acc.clone(), scale.clone())));
        scale <<= 1;
    }
    out
}

/// Output of [`legendre_moments_float`].
#[derive(Debug, Clone)]
pub struct FloatMoments {
    pub moments: Vec<Float>,
    /// Multiply-adds spent on coefficient recurrences and dot products.
    pub coefficient_ops: u64,
}

/// `m_k = <P_k(u)>` with `prec`-bit float coefficient vectors carried by
/// the recurrence. The two terms of each coefficient update have the same
/// sign, so the recurrence itself loses no digits; the dot product with
/// `mu` does, roughly `1.27 k` bits at degree `k`, and callers choose
/// `prec` accordingly.
pub fn legendre_moments_float(mu: &[Float], degree: usize, prec: u32) -> Result<FloatMoments> {
    check_degree(mu.len(), degree)?;
    let mut ops = 0u64;
    let mut moments = Vec::with_capacity(degree + 1);
    let mut prev: Vec<Float> = Vec::new();
    let mut cur = vec![Float::with_val(prec, 1)];
    for k in 0..=degree {
        if k > 0 {
            let km1 = k - 1;
            let mut next = vec![Float::new(prec); k + 1];
            for j in (k % 2..=k).step_by(2) {
                let mut v = if j > 0 {
                    Float::with_val(prec, &cur[j - 1] * (2 * km1 as u32 + 1))
                } else {
                    Float::new(prec)
                };
                if j < prev.len() {
                    v -= Float::with_val(prec, &prev[j] * km1 as u32);
                }
                v /= k as u32;
                next[j] = v;
                ops += 1;
            }
            prev = std::mem::replace(&mut cur, next);
        }
        let mut acc = Float::new(prec);
        for j in (k % 2..=k).step_by(2) {
            acc += Float::with_val(prec, &cur[j] * &mu[j]);
            ops += 1;
        }
        moments.push(acc);
    }
    Ok(FloatMoments {
        moments,
        coefficient_ops: ops,
    })
}

/// Working precision for a float reconstruction at `degree` that should
/// carry `digits` correct digits.
pub fn float_working_bits(digits: usize, degree: usize) -> u32 {
    crate::numeric::bits_for_digits(digits) + (1.28 * degree as f64).ceil() as u32 + 32
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::ops::Pow;

    fn factorial(n: u32) -> Integer {
        Integer::from(Integer::factorial(n))
    }

    /// `P_k = 1/(2^k k!) d^k/dt^k (t^2 - 1)^k`, expanded term by term.
    fn rodrigues(k: u32) -> Vec<BigRational> {
        let mut c = vec![Rational::new(); k as usize + 1];
        let norm = Integer::from(Integer::from(1) << k) * factorial(k);
        for i in 0..=k {
            if 2 * i < k {
                continue;
            }
            let binom = Integer::from(Integer::binomial_u(k, i));
            let sign = if (k - i) % 2 == 0 { 1 } else { -1 };
            let falling = factorial(2 * i) / factorial(2 * i - k);
            let v = binom * falling * sign;
            c[(2 * i - k) as usize] = Rational::from((v, norm.clone()));
        }
        c
    }

    #[test]
    fn recurrence_matches_rodrigues() {
        let t = LegendreTable::build(10);
        for k in 0..=10 {
            assert_eq!(t.coefficients(k), rodrigues(k as u32), "k = {k}");
        }
    }

    #[test]
    fn endpoint_values() {
        let one = legendre_values(&Rational::from(1), 2000);
        let minus = legendre_values(&Rational::from(-1), 2000);
        for k in 0..=2000 {
            assert_eq!(one[k], 1);
            assert_eq!(minus[k], if k % 2 == 0 { 1 } else { -1 });
        }
    }

    #[test]
    fn values_match_coefficients() {
        let t = LegendreTable::build(25);
        let u = Rational::from((15, 17));
        let vals = legendre_values(&u, 25);
        for k in 0..=25 {
            let mut s = Rational::new();
            for (j, c) in t.coefficients(k).iter().enumerate() {
                s += Rational::from(c * Rational::from((&u).pow(j as i32)));
            }
            assert_eq!(vals[k], s);
        }
    }

    #[test]
    fn uniform_and_point_mass() {
        let uniform: Vec<_> = (0..5)
            .map(|j| if j % 2 == 1 { Rational::new() } else { Rational::from((1, j + 1)) })
            .collect();
        assert_eq!(legendre_moments(&uniform, 2).unwrap(), vec![Rational::from(1), Rational::new(), Rational::new()]);
        let ones = vec![Rational::from(1); 30];
        assert!(legendre_moments(&ones, 29).unwrap().iter().all(|m| *m == 1));
        assert!(matches!(
            legendre_moments(&ones, 30),
            Err(Error::InsufficientMoments { .. })
        ));
    }

    #[test]
    fn float_kernel_agrees_with_exact() {
        let mu: Vec<BigRational> = (0..60u32).map(|j| Rational::from((1, j + 2))).collect();
        let exact = legendre_moments(&mu, 59).unwrap();
        let prec = float_working_bits(30, 59);
        let muf: Vec<Float> = mu.iter().map(|m| Float::with_val(prec, m)).collect();
        let fl = legendre_moments_float(&muf, 59, prec).unwrap();
        for (e, f) in exact.iter().zip(&fl.moments) {
            let err = Rational::from(f.to_rational().unwrap() - e).abs();
            assert!(err < Rational::from((1, Integer::from(Integer::u_pow_u(10, 30)))));
        }
    }

    #[test]
    fn cache_file_round_trip() {
        let t = LegendreTable::build(40);
        let mut buf = Vec::new();
        t.write_to(&mut buf).unwrap();
        assert_eq!(LegendreTable::read_from(&buf[..]).unwrap(), t);
        assert!(LegendreTable::read_from(&b"garbage!"[..]).is_err());
    }
}
