use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::field::{FqElt, GaloisField};
use super::poly::Poly;
use super::CharPError;

/// `num / den` with `den` monic and coprime to `num`; zero is `0 / 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(k: &GaloisField, num: Poly, den: Poly) -> Result<Self, CharPError> {
        if den.is_zero() {
            return Err(CharPError::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(RatFunc::zero());
        }
        let g = num.gcd(k, &den);
        let num = num.div_rem(k, &g).unwrap().0;
        let den = den.div_rem(k, &g).unwrap().0;
        let l = k.inv(den.lead()).unwrap();
        Ok(RatFunc { num: num.scale(k, l), den: den.scale(k, l) })
    }

    pub fn zero() -> Self {
        RatFunc { num: Poly::zero(), den: Poly::one() }
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }

    pub fn constant(c: FqElt) -> Self {
        RatFunc::from_poly(Poly::constant(c))
    }

    /// `t`.
    pub fn t() -> Self {
        RatFunc::from_poly(Poly::t())
    }

    /// `(t - c)^e` for any integer `e`.
    pub fn linear_power(k: &GaloisField, c: FqElt, e: i64) -> Self {
        let lin = Poly::linear(k, c).pow(k, e.unsigned_abs());
        if e >= 0 {
            RatFunc::from_poly(lin)
        } else {
            RatFunc { num: Poly::one(), den: lin }
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, k: &GaloisField, o: &RatFunc) -> RatFunc {
        let num = self.num.mul(k, &o.den).add(k, &o.num.mul(k, &self.den));
        RatFunc::new(k, num, self.den.mul(k, &o.den)).unwrap()
    }

    pub fn neg(&self, k: &GaloisField) -> RatFunc {
        RatFunc { num: self.num.neg(k), den: self.den.clone() }
    }

    pub fn sub(&self, k: &GaloisField, o: &RatFunc) -> RatFunc {
        self.add(k, &o.neg(k))
    }

    pub fn mul(&self, k: &GaloisField, o: &RatFunc) -> RatFunc {
        RatFunc::new(k, self.num.mul(k, &o.num), self.den.mul(k, &o.den)).unwrap()
    }

    pub fn inv(&self, k: &GaloisField) -> Result<RatFunc, CharPError> {
        if self.is_zero() {
            return Err(CharPError::ZeroInput);
        }
        RatFunc::new(k, self.den.clone(), self.num.clone())
    }

    pub fn div(&self, k: &GaloisField, o: &RatFunc) -> Result<RatFunc, CharPError> {
        Ok(self.mul(k, &o.inv(k)?))
    }

    pub fn pow(&self, k: &GaloisField, e: i64) -> Result<RatFunc, CharPError> {
        let base = if e < 0 { self.inv(k)? } else { self.clone() };
        let n = e.unsigned_abs();
        Ok(RatFunc { num: base.num.pow(k, n), den: base.den.pow(k, n) }.renormalize(k))
    }

    fn renormalize(self, k: &GaloisField) -> RatFunc {
        RatFunc::new(k, self.num, self.den).unwrap()
    }

    /// Formal derivative `(n'd - nd') / d^2`.
    pub fn derivative(&self, k: &GaloisField) -> RatFunc {
        let num = self.num.derivative(k).mul(k, &self.den).sub(k, &self.num.mul(k, &self.den.derivative(k)));
        RatFunc::new(k, num, self.den.mul(k, &self.den)).unwrap()
    }

    /// `f(1/x)` as a rational function of `x`.
    pub fn invert_variable(&self, k: &GaloisField) -> RatFunc {
        let (dn, dd) = (self.num.degree().unwrap_or(0), self.den.degree().unwrap_or(0));
        let top = dn.max(dd);
        // f(1/x) = x^{top-dn} rev(num) / (x^{top-dd} rev(den)).
        let rev = |p: &Poly, d: usize| {
            let mut c: Vec<FqElt> = vec![FqElt(0); top - d];
            c.extend(p.coeffs().iter().rev().copied());
            Poly::new(c)
        };
        if self.is_zero() {
            return RatFunc::zero();
        }
        RatFunc::new(k, rev(&self.num, dn), rev(&self.den, dd)).unwrap()
    }

    pub fn format(&self, k: &GaloisField) -> String {
        let fmt_poly = |p: &Poly| {
            if p.is_zero() {
                return "0".to_string();
            }
            let terms: Vec<String> = p
                .coeffs()
                .iter()
                .enumerate()
                .rev()
                .filter(|(_, c)| c.0 != 0)
                .map(|(i, c)| {
                    let cs = k.format(*c);
                    let cs = if cs.contains('+') { format!("({cs})") } else { cs };
                    match (i, c.0) {
                        (0, _) => cs,
                        (1, 1) => "t".into(),
                        (1, _) => format!("{cs}t"),
                        (_, 1) => format!("t^{i}"),
                        _ => format!("{cs}t^{i}"),
                    }
                })
                .collect();
            terms.join(" + ")
        };
        if self.den.degree() == Some(0) {
            fmt_poly(&self.num)
        } else {
            format!("({}) / ({})", fmt_poly(&self.num), fmt_poly(&self.den))
        }
    }
}

/// A point of the projective line over the working field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Point {
    Finite(FqElt),
    Infinity,
}

/// `ω = f dt`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffForm {
    pub f: RatFunc,
}

/// Finite formal sum of points with nonzero integer coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Divisor(pub BTreeMap<Point, i64>);

impl Divisor {
    pub fn from_pairs<I: IntoIterator<Item = (Point, i64)>>(pairs: I) -> Self {
        let mut map = BTreeMap::new();
        for (pt, c) in pairs {
            *map.entry(pt).or_insert(0) += c;
        }
        map.retain(|_, c| *c != 0);
        Divisor(map)
    }

    pub fn degree(&self) -> i64 {
        self.0.values().sum()
    }

    pub fn order_at(&self, pt: Point) -> i64 {
        self.0.get(&pt).copied().unwrap_or(0)
    }
}

impl DiffForm {
    pub fn is_zero(&self) -> bool {
        self.f.is_zero()
    }

    pub fn add(&self, k: &GaloisField, o: &DiffForm) -> DiffForm {
        DiffForm { f: self.f.add(k, &o.f) }
    }

    /// The form in the chart `x = 1/t`: `f(t) dt = -f(1/x) x^{-2} dx`; returns the coefficient of `dx`.
    pub fn chart_at_infinity(&self, k: &GaloisField) -> RatFunc {
        let x2 = RatFunc::linear_power(k, FqElt(0), -2);
        self.f.invert_variable(k).mul(k, &x2).neg(k)
    }

    /// Zeros and poles; every finite one must lie in the working field.
    pub fn divisor(&self, k: &GaloisField) -> Result<Divisor, CharPError> {
        if self.is_zero() {
            return Err(CharPError::ZeroInput);
        }
        let mut pairs = Vec::new();
        for (poly, sign) in [(&self.f.num, 1i64), (&self.f.den, -1)] {
            let (roots, rest) = poly.split(k);
            if rest > 0 {
                return Err(CharPError::UnsplitFactor(rest));
            }
            pairs.extend(roots.into_iter().map(|(c, m)| (Point::Finite(c), sign * m as i64)));
        }
        let dn = self.f.num.degree().unwrap() as i64;
        let dd = self.f.den.degree().unwrap() as i64;
        pairs.push((Point::Infinity, dd - dn - 2));
        Ok(Divisor::from_pairs(pairs))
    }

    /// Coefficient of `(t - c)^{-1} dt` at a finite point, or the residue in the chart at infinity.
    pub fn residue(&self, k: &GaloisField, pt: Point) -> FqElt {
        if self.is_zero() {
            return FqElt(0);
        }
        match pt {
            Point::Infinity => {
                // Expansion at infinity: f = poly + c_1/t + ..., residue of f dt is -c_1.
                let (_, r) = self.f.num.div_rem(k, &self.f.den).unwrap();
                let dd = self.f.den.degree().unwrap();
                if !r.is_zero() && r.degree().unwrap() + 1 == dd {
                    k.neg(k.div(r.lead(), self.f.den.lead()).unwrap())
                } else {
                    FqElt(0)
                }
            }
            Point::Finite(c) => {
                let mult = self.f.den.root_multiplicity(k, c);
                if mult == 0 {
                    return FqElt(0);
                }
                // f = A(s) / (s^mult B(s)) with s = t - c and B(0) != 0.
                let a = self.f.num.taylor_shift(k, c);
                let shifted = self.f.den.taylor_shift(k, c);
                let b = Poly::new(shifted.coeffs()[mult..].to_vec());
                series_coefficient(k, &a, &b, mult - 1)
            }
        }
    }
}

/// Coefficient of `s^n` in the power series `a(s) / b(s)`, `b(0) != 0`.
fn series_coefficient(k: &GaloisField, a: &Poly, b: &Poly, n: usize) -> FqElt {
    let b0inv = k.inv(b.coeff(0)).expect("unit constant term");
    let mut q: Vec<FqElt> = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut acc = a.coeff(i);
        for (j, qj) in q.iter().enumerate() {
            acc = k.sub(acc, k.mul(*qj, b.coeff(i - j)));
        }
        q.push(k.mul(acc, b0inv));
    }
    q[n]
}

/// `du / u`.
pub fn dlog(k: &GaloisField, u: &RatFunc) -> Result<DiffForm, CharPError> {
    if u.is_zero() {
        return Err(CharPError::ZeroInput);
    }
    Ok(DiffForm { f: u.derivative(k).div(k, u)? })
}

/// `du`.
pub fn dexact(k: &GaloisField, u: &RatFunc) -> DiffForm {
    DiffForm { f: u.derivative(k) }
}

/// Which differential a certificate prescribes: `du/u` or `du`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificateKind {
    Mult,
    Add,
}

/// One edge of a vertex together with its assigned point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeAssignment {
    pub point: Point,
    pub m: i64,
    pub h: u32,
}

/// Checks `Div(ω) = -Σ (m(a)+1)[j(a)]` and, for `Mult`, `res_{j(a)} ω = h(a)` for every edge,
/// where `ω = du/u` or `du`. A non-injective assignment or a zero form is rejected.
pub fn verify_certificate(
    k: &GaloisField,
    u: &RatFunc,
    edges: &[EdgeAssignment],
    kind: CertificateKind,
) -> Result<bool, CharPError> {
    let mut seen = std::collections::BTreeSet::new();
    if !edges.iter().all(|e| seen.insert(e.point)) {
        return Ok(false);
    }
    if u.is_zero() {
        return Ok(false);
    }
    let omega = match kind {
        CertificateKind::Mult => dlog(k, u)?,
        CertificateKind::Add => dexact(k, u),
    };
    if omega.is_zero() {
        return Ok(false);
    }
    let div = omega.divisor(k)?;
    let expected = Divisor::from_pairs(edges.iter().map(|e| (e.point, -(e.m + 1))));
    if div != expected {
        return Ok(false);
    }
    if kind == CertificateKind::Mult {
        for e in edges {
            if omega.residue(k, e.point) != k.from_int(e.h as i64) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> GaloisField {
        GaloisField::new(5, 1).unwrap()
    }

    fn lin(k: &GaloisField, c: u32, e: i64) -> RatFunc {
        RatFunc::linear_power(k, FqElt(c), e)
    }

    #[test]
    fn dlog_of_t() {
        let k = f5();
        let w = dlog(&k, &RatFunc::t()).unwrap();
        assert_eq!(w.f, lin(&k, 0, -1));
        assert_eq!(w.divisor(&k).unwrap(), Divisor::from_pairs([(Point::Finite(FqElt(0)), -1), (Point::Infinity, -1)]));
        assert_eq!(w.residue(&k, Point::Finite(FqElt(0))), FqElt(1));
        assert_eq!(w.residue(&k, Point::Infinity), FqElt(4));
    }

    #[test]
    fn dt_has_double_pole_at_infinity() {
        let k = f5();
        let w = dexact(&k, &RatFunc::t());
        assert_eq!(w.divisor(&k).unwrap(), Divisor::from_pairs([(Point::Infinity, -2)]));
    }

    #[test]
    fn dlog_two_points() {
        let k = f5();
        let u = lin(&k, 1, 1).mul(&k, &lin(&k, 2, 4));
        let w = dlog(&k, &u).unwrap();
        // ((t-2) + 4(t-1)) / ((t-1)(t-2)) = (5t - 6)/(...) = 4/(...) in F_5.
        assert_eq!(w.f.num(), &Poly::constant(FqElt(4)));
        assert_eq!(
            w.divisor(&k).unwrap(),
            Divisor::from_pairs([(Point::Finite(FqElt(1)), -1), (Point::Finite(FqElt(2)), -1)])
        );
        let res: Vec<FqElt> = [Point::Finite(FqElt(1)), Point::Finite(FqElt(2)), Point::Infinity]
            .iter()
            .map(|pt| w.residue(&k, *pt))
            .collect();
        assert_eq!(res, vec![FqElt(1), FqElt(4), FqElt(0)]);
    }

    #[test]
    fn dexact_of_inverse() {
        let k = GaloisField::new(3, 1).unwrap();
        let w = dexact(&k, &lin(&k, 0, -1));
        assert_eq!(w.f, lin(&k, 0, -2).neg(&k));
    }

    #[test]
    fn higher_order_pole_residue() {
        let k = f5();
        // (t+1)/t^3 = t^-2 + t^-3: no t^-1 term; (t^2+3)/t^3 has residue 1.
        let a = RatFunc::new(&k, Poly::new(vec![FqElt(1), FqElt(1)]), Poly::t().pow(&k, 3)).unwrap();
        assert_eq!(DiffForm { f: a }.residue(&k, Point::Finite(FqElt(0))), FqElt(0));
        let b = RatFunc::new(&k, Poly::new(vec![FqElt(3), FqElt(0), FqElt(1)]), Poly::t().pow(&k, 3)).unwrap();
        assert_eq!(DiffForm { f: b }.residue(&k, Point::Finite(FqElt(0))), FqElt(1));
    }

    #[test]
    fn chart_change_at_infinity() {
        let k = f5();
        // dt = -x^-2 dx.
        let w = dexact(&k, &RatFunc::t());
        assert_eq!(w.chart_at_infinity(&k), lin(&k, 0, -2).neg(&k));
    }

    #[test]
    fn unsplit_factor_is_reported() {
        let k = GaloisField::new(2, 1).unwrap();
        let u = RatFunc::from_poly(Poly::new(vec![FqElt(1), FqElt(1), FqElt(1)]));
        assert_eq!(dlog(&k, &u).unwrap().divisor(&k), Err(CharPError::UnsplitFactor(2)));
    }

    #[test]
    fn certificate_examples() {
        let k = f5();
        let u = lin(&k, 1, 1).mul(&k, &lin(&k, 2, 4));
        let edges = |h1| {
            vec![
                EdgeAssignment { point: Point::Infinity, m: -1, h: 0 },
                EdgeAssignment { point: Point::Finite(FqElt(1)), m: 0, h: h1 },
                EdgeAssignment { point: Point::Finite(FqElt(2)), m: 0, h: 4 },
            ]
        };
        assert!(verify_certificate(&k, &u, &edges(1), CertificateKind::Mult).unwrap());
        assert!(!verify_certificate(&k, &u, &edges(2), CertificateKind::Mult).unwrap());

        let k2 = GaloisField::new(2, 1).unwrap();
        let u2 = lin(&k2, 0, 1).mul(&k2, &lin(&k2, 1, 1));
        let e2 = [
            EdgeAssignment { point: Point::Infinity, m: -1, h: 0 },
            EdgeAssignment { point: Point::Finite(FqElt(0)), m: 0, h: 1 },
            EdgeAssignment { point: Point::Finite(FqElt(1)), m: 0, h: 1 },
        ];
        assert!(verify_certificate(&k2, &u2, &e2, CertificateKind::Mult).unwrap());
        let dup = [e2[0], e2[1], e2[1]];
        assert!(!verify_certificate(&k2, &u2, &dup, CertificateKind::Mult).unwrap());
    }
}
