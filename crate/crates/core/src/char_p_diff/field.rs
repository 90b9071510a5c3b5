use std::fmt;

use serde::{Deserialize, Serialize};

use super::CharPError;
use crate::arith::{is_prime, prime_factors};

/// Largest field size for which log/exp tables are built.
pub const MAX_FIELD_SIZE: u64 = 1 << 22;

/// An element of `F_{p^n}`: the base-`p` digits of the index are its coordinates in the
/// basis `1, x, …, x^{n-1}` modulo the field's defining polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FqElt(pub u32);

/// `F_{p^n}` defined by the lexicographically first monic irreducible polynomial of degree `n`
/// (non-leading coefficients read as base-`p` digits, constant term least significant).
#[derive(Clone)]
pub struct GaloisField {
    p: u32,
    n: u32,
    q: u32,
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl PartialEq for GaloisField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.n == other.n
    }
}

impl Eq for GaloisField {}

impl fmt::Debug for GaloisField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}) mod {:?}", self.p, self.n, self.modulus)
    }
}

/// Remainder of `a` by the monic `b` over `F_p`, coefficients low to high.
fn fp_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let c = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        if c != 0 {
            for (i, bi) in b.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - c * bi % p) % p;
            }
        }
        r.pop();
    }
    while r.last() == Some(&0) {
        r.pop();
    }
    r
}

fn digits(mut x: u64, p: u32, len: usize) -> Vec<u32> {
    (0..len)
        .map(|_| {
            let d = (x % p as u64) as u32;
            x /= p as u64;
            d
        })
        .collect()
}

/// Trial division by every monic polynomial of degree at most `n/2`.
fn is_irreducible(f: &[u32], p: u32) -> bool {
    let n = f.len() - 1;
    for d in 1..=n / 2 {
        for code in 0..(p as u64).pow(d as u32) {
            let mut g = digits(code, p, d);
            g.push(1);
            if fp_rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

impl GaloisField {
    pub fn new(p: u32, n: u32) -> Result<Self, CharPError> {
        if !is_prime(p as u64) {
            return Err(CharPError::NotPrime(p));
        }
        if n == 0 {
            return Err(CharPError::FieldTooLarge { p, n });
        }
        let q64 = (p as u64).checked_pow(n).filter(|q| *q <= MAX_FIELD_SIZE).ok_or(CharPError::FieldTooLarge { p, n })?;
        let q = q64 as u32;
        let modulus = (0..(p as u64).pow(n))
            .map(|code| {
                let mut f = digits(code, p, n as usize);
                f.push(1);
                f
            })
            .find(|f| is_irreducible(f, p))
            .expect("irreducible polynomials exist in every degree");
        let mut field = GaloisField { p, n, q, modulus, exp: Vec::new(), log: Vec::new() };
        field.build_tables();
        Ok(field)
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let n = self.n as usize;
        let (da, db) = (digits(a as u64, self.p, n), digits(b as u64, self.p, n));
        let mut prod = vec![0u32; 2 * n - 1];
        for (i, x) in da.iter().enumerate() {
            for (j, y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        let r = fp_rem(&prod, &self.modulus, self.p);
        r.iter().rev().fold(0, |acc, d| acc * self.p + d)
    }

    fn build_tables(&mut self) {
        let order = (self.q - 1) as u64;
        let factors = prime_factors(order);
        let pow_slow = |f: &Self, g: u32, mut e: u64| {
            let (mut acc, mut base) = (1u32, g);
            while e > 0 {
                if e & 1 == 1 {
                    acc = f.mul_slow(acc, base);
                }
                base = f.mul_slow(base, base);
                e >>= 1;
            }
            acc
        };
        let g = (1..self.q)
            .find(|&g| factors.iter().all(|r| pow_slow(self, g, order / r) != 1))
            .expect("multiplicative group is cyclic");
        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![0u32; self.q as usize];
        let mut x = 1u32;
        for i in 0..order as u32 {
            exp.push(x);
            log[x as usize] = i;
            x = self.mul_slow(x, g);
        }
        self.exp = exp;
        self.log = log;
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn size(&self) -> u32 {
        self.q
    }

    /// Defining polynomial over `F_p`, coefficients low to high.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn zero(&self) -> FqElt {
        FqElt(0)
    }

    pub fn one(&self) -> FqElt {
        FqElt(1)
    }

    /// The class of `x`, a generator of `F_{p^n}` over `F_p` (0 when `n = 1`).
    pub fn gen(&self) -> FqElt {
        if self.n == 1 {
            FqElt(0)
        } else {
            FqElt(self.p)
        }
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, a: i64) -> FqElt {
        FqElt(a.rem_euclid(self.p as i64) as u32)
    }

    /// The integer in `0..p` if `a` lies in the prime field.
    pub fn to_prime_field(&self, a: FqElt) -> Option<u32> {
        (a.0 < self.p).then_some(a.0)
    }

    pub fn elements(&self) -> impl Iterator<Item = FqElt> {
        (0..self.q).map(FqElt)
    }

    pub fn add(&self, a: FqElt, b: FqElt) -> FqElt {
        if self.p == 2 {
            return FqElt(a.0 ^ b.0);
        }
        let (mut x, mut y, mut out, mut place) = (a.0, b.0, 0u32, 1u32);
        while x > 0 || y > 0 {
            out += (x % self.p + y % self.p) % self.p * place;
            x /= self.p;
            y /= self.p;
            place *= self.p;
        }
        FqElt(out)
    }

    pub fn neg(&self, a: FqElt) -> FqElt {
        if self.p == 2 {
            return a;
        }
        let (mut x, mut out, mut place) = (a.0, 0u32, 1u32);
        while x > 0 {
            out += (self.p - x % self.p) % self.p * place;
            x /= self.p;
            place *= self.p;
        }
        FqElt(out)
    }

    pub fn sub(&self, a: FqElt, b: FqElt) -> FqElt {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FqElt, b: FqElt) -> FqElt {
        if a.0 == 0 || b.0 == 0 {
            return FqElt(0);
        }
        let e = (self.log[a.0 as usize] as u64 + self.log[b.0 as usize] as u64) % (self.q as u64 - 1);
        FqElt(self.exp[e as usize])
    }

    pub fn inv(&self, a: FqElt) -> Option<FqElt> {
        if a.0 == 0 {
            return None;
        }
        let order = self.q - 1;
        Some(FqElt(self.exp[((order - self.log[a.0 as usize]) % order) as usize]))
    }

    pub fn div(&self, a: FqElt, b: FqElt) -> Option<FqElt> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    /// `a^e` for any integer `e`; `0^e` is 0 for `e > 0`, 1 for `e = 0`, `None` for `e < 0`.
    pub fn pow(&self, a: FqElt, e: i64) -> Option<FqElt> {
        if a.0 == 0 {
            return match e {
                0 => Some(FqElt(1)),
                e if e > 0 => Some(FqElt(0)),
                _ => None,
            };
        }
        let order = (self.q - 1) as i64;
        let l = (self.log[a.0 as usize] as i64 * e.rem_euclid(order)).rem_euclid(order);
        Some(FqElt(self.exp[l as usize]))
    }

    /// Scalar multiple by an integer, through the prime field.
    pub fn mul_int(&self, a: FqElt, k: i64) -> FqElt {
        self.mul(a, self.from_int(k))
    }

    pub fn frobenius(&self, a: FqElt) -> FqElt {
        self.pow(a, self.p as i64).unwrap()
    }

    pub fn format(&self, a: FqElt) -> String {
        if self.n == 1 {
            return a.0.to_string();
        }
        let ds = digits(a.0 as u64, self.p, self.n as usize);
        let terms: Vec<String> = ds
            .iter()
            .enumerate()
            .filter(|(_, d)| **d != 0)
            .map(|(i, d)| match (i, d) {
                (0, d) => d.to_string(),
                (1, 1) => "x".to_string(),
                (1, d) => format!("{d}x"),
                (i, 1) => format!("x^{i}"),
                (i, d) => format!("{d}x^{i}"),
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moduli_are_lexicographically_first() {
        assert_eq!(GaloisField::new(2, 2).unwrap().modulus(), &[1, 1, 1]);
        assert_eq!(GaloisField::new(3, 2).unwrap().modulus(), &[1, 0, 1]);
        assert_eq!(GaloisField::new(2, 3).unwrap().modulus(), &[1, 1, 0, 1]);
        assert_eq!(GaloisField::new(5, 1).unwrap().modulus(), &[0, 1]);
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for (p, n) in [(2, 2), (3, 2), (5, 1), (2, 3)] {
            let k = GaloisField::new(p, n).unwrap();
            for a in k.elements() {
                assert_eq!(k.add(a, k.neg(a)), k.zero());
                if a != k.zero() {
                    assert_eq!(k.mul(a, k.inv(a).unwrap()), k.one());
                }
                for b in k.elements() {
                    assert_eq!(k.mul(a, b), FqElt(k.mul_slow(a.0, b.0)));
                    assert_eq!(k.frobenius(k.add(a, b)), k.add(k.frobenius(a), k.frobenius(b)));
                    assert_eq!(k.frobenius(k.mul(a, b)), k.mul(k.frobenius(a), k.frobenius(b)));
                }
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(GaloisField::new(4, 1).unwrap_err(), CharPError::NotPrime(4));
        assert!(matches!(GaloisField::new(2, 40), Err(CharPError::FieldTooLarge { .. })));
    }
}
