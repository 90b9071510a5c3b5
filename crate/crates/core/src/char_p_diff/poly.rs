use super::field::{FqElt, GaloisField};

/// Polynomial over `F_{p^n}`, coefficients low to high, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<FqElt>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<FqElt>) -> Self {
        while coeffs.last() == Some(&FqElt(0)) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: FqElt) -> Self {
        Poly::new(vec![c])
    }

    pub fn one() -> Self {
        Poly::constant(FqElt(1))
    }

    /// `t`.
    pub fn t() -> Self {
        Poly::new(vec![FqElt(0), FqElt(1)])
    }

    /// `t - c`.
    pub fn linear(k: &GaloisField, c: FqElt) -> Self {
        Poly::new(vec![k.neg(c), FqElt(1)])
    }

    pub fn coeffs(&self) -> &[FqElt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> FqElt {
        self.coeffs.last().copied().unwrap_or(FqElt(0))
    }

    pub fn coeff(&self, i: usize) -> FqElt {
        self.coeffs.get(i).copied().unwrap_or(FqElt(0))
    }

    pub fn add(&self, k: &GaloisField, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|i| k.add(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn neg(&self, k: &GaloisField) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| k.neg(*c)).collect())
    }

    pub fn sub(&self, k: &GaloisField, other: &Poly) -> Poly {
        self.add(k, &other.neg(k))
    }

    pub fn scale(&self, k: &GaloisField, c: FqElt) -> Poly {
        Poly::new(self.coeffs.iter().map(|x| k.mul(*x, c)).collect())
    }

    pub fn mul(&self, k: &GaloisField, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![FqElt(0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.0 == 0 {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = k.add(out[i + j], k.mul(*a, *b));
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, k: &GaloisField, mut e: u64) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(k, &base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(k, &base);
            }
        }
        acc
    }

    /// Quotient and remainder; `None` when dividing by zero.
    pub fn div_rem(&self, k: &GaloisField, d: &Poly) -> Option<(Poly, Poly)> {
        let dd = d.degree()?;
        let inv = k.inv(d.lead())?;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Some((Poly::zero(), self.clone()));
        }
        let mut q = vec![FqElt(0); r.len() - dd];
        while r.len() > dd {
            let c = k.mul(*r.last().unwrap(), inv);
            let shift = r.len() - 1 - dd;
            q[shift] = c;
            for (i, di) in d.coeffs.iter().enumerate() {
                r[shift + i] = k.sub(r[shift + i], k.mul(c, *di));
            }
            r.pop();
        }
        Some((Poly::new(q), Poly::new(r)))
    }

    pub fn monic(&self, k: &GaloisField) -> Poly {
        match k.inv(self.lead()) {
            Some(i) => self.scale(k, i),
            None => Poly::zero(),
        }
    }

    /// Monic greatest common divisor (zero only if both inputs are zero).
    pub fn gcd(&self, k: &GaloisField, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(k, &b).unwrap().1;
            a = b;
            b = r;
        }
        a.monic(k)
    }

    /// Formal derivative.
    pub fn derivative(&self, k: &GaloisField) -> Poly {
        Poly::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| k.mul_int(*c, i as i64)).collect())
    }

    pub fn eval(&self, k: &GaloisField, x: FqElt) -> FqElt {
        self.coeffs.iter().rev().fold(FqElt(0), |acc, c| k.add(k.mul(acc, x), *c))
    }

    /// `P(s + c)` as a polynomial in `s`.
    pub fn taylor_shift(&self, k: &GaloisField, c: FqElt) -> Poly {
        let mut a = self.coeffs.clone();
        let n = a.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                a[j] = k.add(a[j], k.mul(c, a[j + 1]));
            }
        }
        Poly::new(a)
    }

    /// Multiplicity of `c` as a root.
    pub fn root_multiplicity(&self, k: &GaloisField, c: FqElt) -> usize {
        if self.is_zero() {
            return usize::MAX;
        }
        let lin = Poly::linear(k, c);
        let mut f = self.clone();
        let mut m = 0;
        loop {
            let (q, r) = f.div_rem(k, &lin).unwrap();
            if !r.is_zero() {
                return m;
            }
            f = q;
            m += 1;
        }
    }

    /// Roots in the working field with multiplicities, and the degree of the part without roots.
    pub fn split(&self, k: &GaloisField) -> (Vec<(FqElt, usize)>, usize) {
        let mut f = self.clone();
        let mut roots = Vec::new();
        for c in k.elements() {
            if f.degree().unwrap_or(0) == 0 {
                break;
            }
            if f.eval(k, c).0 != 0 {
                continue;
            }
            let m = f.root_multiplicity(k, c);
            f = f.div_rem(k, &Poly::linear(k, c).pow(k, m as u64)).unwrap().0;
            roots.push((c, m));
        }
        (roots, f.degree().unwrap_or(0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_identity() {
        let k = GaloisField::new(5, 1).unwrap();
        let a = Poly::new([3, 0, 1, 4, 2].map(FqElt).to_vec());
        let b = Poly::new([1, 2, 1].map(FqElt).to_vec());
        let (q, r) = a.div_rem(&k, &b).unwrap();
        assert_eq!(q.mul(&k, &b).add(&k, &r), a);
        assert!(r.degree().unwrap_or(0) < 2);
    }

    #[test]
    fn taylor_shift_matches_evaluation() {
        let k = GaloisField::new(3, 2).unwrap();
        let a = Poly::new(vec![FqElt(4), FqElt(7), FqElt(0), FqElt(2)]);
        for c in k.elements() {
            let s = a.taylor_shift(&k, c);
            for x in k.elements() {
                assert_eq!(s.eval(&k, x), a.eval(&k, k.add(x, c)));
            }
        }
    }

    #[test]
    fn split_reports_leftover_degree() {
        let k = GaloisField::new(2, 1).unwrap();
        // t (t^2 + t + 1) over F_2.
        let f = Poly::new([0, 1, 1, 1].map(FqElt).to_vec());
        assert_eq!(f.split(&k), (vec![(FqElt(0), 1)], 2));
        let k4 = GaloisField::new(2, 2).unwrap();
        assert_eq!(f.split(&k4).1, 0);
    }

    #[test]
    fn derivative_kills_pth_powers() {
        let k = GaloisField::new(3, 1).unwrap();
        let f = Poly::new([1, 2, 1].map(FqElt).to_vec()).pow(&k, 3);
        assert!(f.derivative(&k).is_zero());
    }
}
