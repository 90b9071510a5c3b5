use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::FieldError;
use crate::arith::{inv_mod_p, is_prime};

/// The field `K = Q(ζ_p)(π)` with `π^N = ζ - 1`, of degree `D = N(p-1)` over `Q`.
///
/// Elements are stored in the power basis `1, π, …, π^{D-1}`. The minimal polynomial of `π`
/// is `Φ_p(π^N + 1) = Σ_{i=1}^{p} C(p,i) π^{N(i-1)}`, which is Eisenstein, so the `π`-adic
/// valuation of a coordinate vector is `min_k (k + D·v_p(e_k))` and the minimum is attained once.
/// Coordinate `k = N·i + j` is also the coefficient of `λ^i π^j`, see [`RamifiedElt::grid`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ramification {
    p: u32,
    ram: u32,
}

impl Ramification {
    pub fn new(p: u32, ram: u32) -> Result<Self, FieldError> {
        if !is_prime(p as u64) {
            return Err(FieldError::NotPrime(p));
        }
        if ram == 0 {
            return Err(FieldError::ZeroRamification);
        }
        Ok(Ramification { p, ram })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// `N = v(λ)`.
    pub fn ram(&self) -> u32 {
        self.ram
    }

    /// `D = N(p-1)`, which is also `v(p)`.
    pub fn degree(&self) -> usize {
        self.ram as usize * (self.p as usize - 1)
    }

    pub fn v_p(&self) -> i64 {
        self.degree() as i64
    }

    pub fn zero(&self) -> RamifiedElt {
        RamifiedElt { field: *self, coeffs: vec![BigRational::zero(); self.degree()] }
    }

    pub fn from_rational(&self, r: BigRational) -> RamifiedElt {
        let mut x = self.zero();
        x.coeffs[0] = r;
        x
    }

    pub fn from_int(&self, n: i64) -> RamifiedElt {
        self.from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// Element with the given coordinates in the basis `π^k`, `0 ≤ k < N(p-1)`.
    pub fn from_coords(&self, coeffs: Vec<BigRational>) -> RamifiedElt {
        assert_eq!(coeffs.len(), self.degree(), "expected {} coordinates", self.degree());
        RamifiedElt { field: *self, coeffs }
    }

    pub fn one(&self) -> RamifiedElt {
        self.from_int(1)
    }

    pub fn pi(&self) -> RamifiedElt {
        self.pi_pow(1)
    }

    /// `π^k` for `k ≥ 0`.
    pub fn pi_pow(&self, k: u64) -> RamifiedElt {
        let d = self.degree() as u64;
        if k < d {
            let mut x = self.zero();
            x.coeffs[k as usize] = BigRational::one();
            return x;
        }
        // π^D is expressed through the minimal polynomial.
        let top = self.reduce_power_d();
        let mut x = top.pow(k / d);
        if !k.is_multiple_of(d) {
            x = &x * &self.pi_pow(k % d);
        }
        x
    }

    /// `λ = ζ - 1 = π^N`.
    pub fn lambda(&self) -> RamifiedElt {
        self.pi_pow(self.ram as u64)
    }

    pub fn zeta(&self) -> RamifiedElt {
        &self.one() + &self.lambda()
    }

    /// `ζ^e` for any integer `e`, using `ζ^p = 1`.
    pub fn zeta_pow(&self, e: i64) -> RamifiedElt {
        self.zeta().pow(e.rem_euclid(self.p as i64) as u64)
    }

    /// `ζ^{1/m}`, the exponent read as the inverse of `m` modulo `p`.
    pub fn zeta_root(&self, m: i64) -> RamifiedElt {
        self.zeta_pow(inv_mod_p(m, self.p) as i64)
    }

    /// Builds `Σ c_{ij} ζ^i π^j` from a grid indexed by `i ≤ p-2`, `j ≤ N-1`.
    pub fn from_zeta_pi_grid(&self, grid: &[Vec<BigRational>]) -> RamifiedElt {
        let mut acc = self.zero();
        let mut zi = self.one();
        for row in grid {
            for (j, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    acc = &acc + &(&zi * &self.pi_pow(j as u64)).scale(c);
                }
            }
            zi = &zi * &self.zeta();
        }
        acc
    }

    fn reduce_power_d(&self) -> RamifiedElt {
        let mut x = self.zero();
        let n = self.ram as usize;
        for (i, c) in binomials(self.p).into_iter().enumerate().skip(1) {
            if i < self.p as usize {
                x.coeffs[n * (i - 1)] = BigRational::from_integer(-c);
            }
        }
        x
    }
}

/// `C(p, i)` for `0 ≤ i ≤ p`.
fn binomials(p: u32) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for i in 1..=p as u64 {
        let prev = row[i as usize - 1].clone();
        row.push(prev * BigInt::from(p as u64 - i + 1) / BigInt::from(i));
    }
    row
}

/// `p`-adic valuation of a nonzero integer.
pub(crate) fn vp_int(n: &BigInt, p: u32) -> i64 {
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// `p`-adic valuation of a nonzero rational.
pub(crate) fn vp_rat(r: &BigRational, p: u32) -> i64 {
    vp_int(r.numer(), p) - vp_int(r.denom(), p)
}

/// Reduces a rational with `v_p(r) < s` modulo `p^s Z_(p)` to the representative `c / p^t`,
/// `0 ≤ c < p^{s+t}`, where `p^t` is the `p`-part of the denominator.
fn reduce_mod_p_power(r: &BigRational, p: u32, s: i64) -> BigRational {
    let pb = BigInt::from(p);
    let t = vp_int(r.denom(), p);
    let unit_den = r.denom() / pb.pow(t as u32);
    let modulus = pb.pow((s + t) as u32);
    let inv = mod_inverse(&unit_den, &modulus);
    let c = (r.numer() * inv).mod_floor(&modulus);
    BigRational::new(c, pb.pow(t as u32))
}

fn mod_inverse(a: &BigInt, modulus: &BigInt) -> BigInt {
    let g = a.extended_gcd(modulus);
    debug_assert!(g.gcd.is_one());
    g.x.mod_floor(modulus)
}

/// An element of [`Ramification`], with exact rational coordinates in the `π` power basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RamifiedElt {
    field: Ramification,
    coeffs: Vec<BigRational>,
}

impl RamifiedElt {
    pub fn field(&self) -> Ramification {
        self.field
    }

    /// Coordinates in the basis `π^k`, `0 ≤ k < N(p-1)`.
    pub fn coords(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// The coordinates as a `(p-1) × N` grid: entry `(i, j)` is the coefficient of `λ^i π^j`.
    pub fn grid(&self) -> Vec<Vec<BigRational>> {
        self.coeffs.chunks(self.field.ram as usize).map(|c| c.to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// `v(x)` with `v(π) = 1`; `None` stands for `v(0) = ∞`.
    pub fn valuation(&self) -> Option<i64> {
        let d = self.field.v_p();
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| k as i64 + d * vp_rat(c, self.field.p))
            .min()
    }

    pub fn is_integral(&self) -> bool {
        self.valuation().is_none_or(|v| v >= 0)
    }

    /// Canonical representative modulo `π^v`. Equal truncations mean congruence mod `π^v`.
    pub fn truncate(&self, v: i64) -> RamifiedElt {
        let d = self.field.v_p();
        let p = self.field.p;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if c.is_zero() {
                    return c.clone();
                }
                let s = Integer::div_ceil(&(v - k as i64), &d);
                if vp_rat(c, p) >= s {
                    BigRational::zero()
                } else {
                    reduce_mod_p_power(c, p, s)
                }
            })
            .collect();
        RamifiedElt { field: self.field, coeffs }
    }

    pub fn scale(&self, c: &BigRational) -> RamifiedElt {
        RamifiedElt { field: self.field, coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn pow(&self, mut e: u64) -> RamifiedElt {
        let mut acc = self.field.one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Multiplicative inverse, by solving the linear system of multiplication by `self`.
    pub fn inverse(&self) -> Option<RamifiedElt> {
        if self.is_zero() {
            return None;
        }
        let d = self.field.degree();
        // Column j of the system is self * π^j.
        let mut cols = Vec::with_capacity(d);
        let mut col = self.clone();
        for _ in 0..d {
            cols.push(col.coeffs.clone());
            col = &col * &self.field.pi();
        }
        let mut rows: Vec<Vec<BigRational>> = (0..d)
            .map(|i| {
                let mut row: Vec<BigRational> = (0..d).map(|j| cols[j][i].clone()).collect();
                row.push(if i == 0 { BigRational::one() } else { BigRational::zero() });
                row
            })
            .collect();
        for c in 0..d {
            let piv = (c..d).find(|&r| !rows[r][c].is_zero())?;
            rows.swap(c, piv);
            let inv = rows[c][c].recip();
            for x in rows[c].iter_mut() {
                *x = &*x * &inv;
            }
            for r in 0..d {
                if r != c && !rows[r][c].is_zero() {
                    let f = rows[r][c].clone();
                    let pivot = rows[c].clone();
                    for (x, y) in rows[r].iter_mut().zip(&pivot).skip(c) {
                        *x = &*x - &f * y;
                    }
                }
            }
        }
        Some(RamifiedElt { field: self.field, coeffs: rows.into_iter().map(|r| r[d].clone()).collect() })
    }

    fn check_field(&self, other: &RamifiedElt) {
        assert_eq!(self.field, other.field, "{}", FieldError::FieldMismatch);
    }
}

impl<'a> Add for &'a RamifiedElt {
    type Output = RamifiedElt;
    fn add(self, rhs: &'a RamifiedElt) -> RamifiedElt {
        self.check_field(rhs);
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect();
        RamifiedElt { field: self.field, coeffs }
    }
}

impl<'a> Sub for &'a RamifiedElt {
    type Output = RamifiedElt;
    fn sub(self, rhs: &'a RamifiedElt) -> RamifiedElt {
        self.check_field(rhs);
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect();
        RamifiedElt { field: self.field, coeffs }
    }
}

impl Neg for &RamifiedElt {
    type Output = RamifiedElt;
    fn neg(self) -> RamifiedElt {
        RamifiedElt { field: self.field, coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }
}

impl<'a> Mul for &'a RamifiedElt {
    type Output = RamifiedElt;
    fn mul(self, rhs: &'a RamifiedElt) -> RamifiedElt {
        self.check_field(rhs);
        let d = self.field.degree();
        let mut prod = vec![BigRational::zero(); 2 * d - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        let binom = binomials(self.field.p);
        let n = self.field.ram as usize;
        for k in (d..2 * d - 1).rev() {
            let c = std::mem::take(&mut prod[k]);
            if c.is_zero() {
                continue;
            }
            for (i, b) in binom.iter().enumerate().take(self.field.p as usize).skip(1) {
                prod[k - d + n * (i - 1)] -= &c * BigRational::from_integer(b.clone());
            }
        }
        prod.truncate(d);
        RamifiedElt { field: self.field, coeffs: prod }
    }
}

impl fmt::Debug for RamifiedElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RamifiedElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("{c}"),
                1 => format!("({c})π"),
                _ => format!("({c})π^{k}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// Converts a small integral coordinate into `i128`, if it has no denominator.
pub(crate) fn coord_to_i128(c: &BigRational) -> Option<i128> {
    if c.denom().is_one() {
        c.numer().to_i128()
    } else {
        None
    }
}
