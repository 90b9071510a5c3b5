use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::elt::{Ramification, RamifiedElt};
use super::series::BoundarySeries;
use super::FieldError;

/// Boundary normal forms of an order-p automorphism, with generator exponent 1.
///
/// Exponents `1/m` on `ζ` are inverses modulo `p`; exponents `1/m` on series are binomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum BoundaryKind {
    /// `σZ = ζ^{1/h} Z`.
    MultResidue { h: i64 },
    /// `σZ = ζ^{1/m} Z (1 + λζ^{-1} Z^{-m})^{1/m}`, so that `σ(Z^m) = ζZ^m + λ`.
    MultExact { m: i64 },
    /// `σZ = ζ^{1/m} Z (1 + π^{N-n} ζ^{-1} Z^{-m})^{1/m}`, so that `σ(Z^m) = ζZ^m + π^{N-n}`.
    Additive { m: i64, n: i64 },
    /// `σX = ζ^{-1/m} X (1 + π^{N-n} X^m)^{-1/m}` on the boundary of an open disk.
    DiskNormalForm { m: i64, n: i64 },
}

/// Truncation parameters: number of monomials kept and `π`-adic cutoff.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesPrecision {
    pub terms: i64,
    pub val_cutoff: i64,
}

impl SeriesPrecision {
    /// 24 monomials and `V = 4N(p-1) + 4`.
    pub fn default_for(field: Ramification) -> Self {
        SeriesPrecision { terms: 24, val_cutoff: 4 * field.v_p() + 4 }
    }
}

/// Where the non-constant part of `σZ/Z - 1` lives: exponents `step·k`, `k ≥ 1`, with
/// coefficient valuation at least `k·rate`, and nothing beyond `k = 1` when `finite`.
#[derive(Clone, Copy, Debug)]
struct Tail {
    step: i64,
    rate: i64,
    finite: bool,
}

#[derive(Clone, Debug)]
pub struct BoundaryAutomorphism {
    field: Ramification,
    kind: Option<BoundaryKind>,
    image: BoundarySeries,
    tail: Option<Tail>,
}

fn check_conductor(m: i64, p: u32) -> Result<(), FieldError> {
    if m == 0 || m.rem_euclid(p as i64) == 0 {
        Err(FieldError::BadConductor(m))
    } else {
        Ok(())
    }
}

fn check_level(n: i64, field: Ramification) -> Result<(), FieldError> {
    if n <= 0 || n > field.ram() as i64 {
        Err(FieldError::BadLevel { n, ram: field.ram() })
    } else {
        Ok(())
    }
}

impl BoundaryAutomorphism {
    pub fn new(field: Ramification, kind: BoundaryKind, precision: SeriesPrecision) -> Result<Self, FieldError> {
        let p = field.p();
        let big_n = field.ram() as i64;
        let v = precision.val_cutoff;
        let w = precision.terms.max(2);
        // A correction in Z^{-|m|} keeps the series exact above, one in Z^{+|m|} exact below.
        // The inner factor is computed one step wider so that multiplying by Z loses nothing.
        let window = |correction_step: i64| if correction_step < 0 { (1 - w, 1) } else { (0, w) };
        let z_times = |c: RamifiedElt, window: (i64, i64), inner: Option<(i64, RamifiedElt, i64)>| {
            let z = BoundarySeries::monomial(field, c.clone(), 1, window, v);
            match inner {
                None => Ok(z),
                Some((step, coeff, root)) => {
                    let wide = (window.0 - 1, window.1 + 1);
                    let unit = BoundarySeries::from_terms(field, [(0, field.one()), (step, coeff)], wide, v);
                    let factor = unit.binomial_power(&BigRational::new(BigInt::from(1), BigInt::from(root)))?;
                    Ok(factor.scale(&c)?.shift(1).restrict(window))
                }
            }
        };
        let (image, tail) = match kind {
            BoundaryKind::MultResidue { h } => {
                if h.rem_euclid(p as i64) == 0 {
                    return Err(FieldError::BadResidue(h));
                }
                (z_times(field.zeta_root(h), window(-1), None)?, None)
            }
            BoundaryKind::MultExact { m } => {
                check_conductor(m, p)?;
                let coeff = &field.lambda() * &field.zeta_pow(-1);
                let img = z_times(field.zeta_root(m), window(-m), Some((-m, coeff, m)))?;
                (img, Some(Tail { step: -m, rate: big_n, finite: m == 1 }))
            }
            BoundaryKind::Additive { m, n } => {
                check_conductor(m, p)?;
                check_level(n, field)?;
                let coeff = &field.pi_pow((big_n - n) as u64) * &field.zeta_pow(-1);
                let img = z_times(field.zeta_root(m), window(-m), Some((-m, coeff, m)))?;
                (img, Some(Tail { step: -m, rate: big_n - n, finite: m == 1 }))
            }
            BoundaryKind::DiskNormalForm { m, n } => {
                check_conductor(m, p)?;
                check_level(n, field)?;
                let coeff = field.pi_pow((big_n - n) as u64);
                let img = z_times(field.zeta_root(-m), window(m), Some((m, coeff, -m)))?;
                (img, Some(Tail { step: m, rate: big_n - n, finite: m == -1 }))
            }
        };
        Ok(BoundaryAutomorphism { field, kind: Some(kind), image, tail })
    }

    /// The identity `σZ = Z`; a degenerate input for the différente computations.
    pub fn identity(field: Ramification, precision: SeriesPrecision) -> Self {
        let image = BoundarySeries::z(field, (1 - precision.terms.max(2), 1), precision.val_cutoff);
        BoundaryAutomorphism { field, kind: None, image, tail: None }
    }

    pub fn field(&self) -> Ramification {
        self.field
    }

    pub fn kind(&self) -> Option<BoundaryKind> {
        self.kind
    }

    /// The image `σZ`.
    pub fn image(&self) -> &BoundarySeries {
        &self.image
    }

    /// `σ(f) = f(σZ)`.
    pub fn apply(&self, f: &BoundarySeries) -> Result<BoundarySeries, FieldError> {
        f.compose(&self.image)
    }

    /// Whether `σ^p Z = Z` on the whole window, modulo `π^V`.
    pub fn iterate_check_order_p(&self) -> Result<bool, FieldError> {
        let mut iterate = self.image.clone();
        for _ in 1..self.field.p() {
            iterate = self.apply(&iterate)?;
        }
        let z = BoundarySeries::z(self.field, self.image.z_window(), self.image.val_cutoff());
        iterate.agrees_with(&z)
    }

    /// `σZ/Z - 1`.
    pub fn unit_part(&self) -> Result<BoundarySeries, FieldError> {
        let one = BoundarySeries::one(self.field, self.image.z_window(), self.image.val_cutoff());
        self.image.shift(-1).sub(&one)
    }

    /// Exponent of the dominant correction monomial in `σZ/Z - 1` (0 for a constant).
    pub fn leading_exponent(&self) -> i64 {
        self.tail.map_or(0, |t| t.step)
    }

    /// `d_η = (p-1)·v_η(σZ/Z - 1)`.
    pub fn boundary_differente(&self) -> Result<i64, FieldError> {
        let d = self.differente_profile(&[Rational64::zero()])?[0];
        Ok(d.to_integer())
    }

    /// `d_ρ = (p-1)·v_ρ(σZ/Z - 1)` for each `ρ ≥ 0`, certified against every dropped term.
    ///
    /// Fails with [`FieldError::OutsideConvergence`] when the dropped tail is unbounded at `ρ`
    /// and with [`FieldError::PrecisionExhausted`] when the stored terms do not decide the minimum.
    pub fn differente_profile(&self, rhos: &[Rational64]) -> Result<Vec<Rational64>, FieldError> {
        let u = self.unit_part()?;
        if u.is_empty() {
            return Err(FieldError::AllTermsTruncated);
        }
        let p1 = Rational64::from_integer(self.field.p() as i64 - 1);
        rhos.iter()
            .map(|&rho| {
                if rho < Rational64::zero() {
                    return Err(FieldError::OutsideConvergence(rho.to_string()));
                }
                let stored = u.gauss_valuation(rho)?;
                if let Some(bound) = self.unknown_bound(&u, rho)? {
                    if stored > bound {
                        return Err(FieldError::PrecisionExhausted(format!(
                            "dropped terms may reach {bound} below the stored minimum {stored} at rho = {rho}"
                        )));
                    }
                }
                Ok(stored * p1)
            })
            .collect()
    }

    /// Lower bound for `v(a_i) + iρ` over the terms of `σZ/Z - 1` that are not stored.
    fn unknown_bound(&self, u: &BoundarySeries, rho: Rational64) -> Result<Option<Rational64>, FieldError> {
        let Some(tail) = self.tail else {
            return Ok(None);
        };
        let v = u.val_cutoff();
        let a = rho * tail.step;
        let last_stored = u
            .terms()
            .keys()
            .filter(|e| **e != 0 && e.signum() == tail.step.signum())
            .map(|e| e / tail.step)
            .max()
            .unwrap_or(0);
        let (lo, hi) = u.known_range();
        let open_side = if tail.step < 0 { lo.is_none() } else { hi.is_none() };
        let mut best: Option<Rational64> = None;
        let mut consider = |x: Rational64| best = Some(best.map_or(x, |b: Rational64| b.min(x)));
        for k in 1.. {
            if tail.finite && k > 1 {
                break;
            }
            let e = tail.step * k;
            if !u.is_known_at(e) {
                if tail.finite {
                    consider(Rational64::from_integer(tail.rate) + a);
                    break;
                }
                // Every later k is dropped too: k·(rate + step·ρ) must stay bounded below.
                let slope = Rational64::from_integer(tail.rate) + a;
                if slope < Rational64::zero() {
                    return Err(FieldError::OutsideConvergence(rho.to_string()));
                }
                consider(Rational64::from_integer(k) * slope);
                break;
            }
            if u.coefficient(e).is_some() {
                continue;
            }
            if open_side && k > last_stored && !tail.finite {
                consider(known_family_min(k, tail.rate, v, a).ok_or_else(|| FieldError::OutsideConvergence(rho.to_string()))?);
                break;
            }
            consider(Rational64::from_integer(v.max(k * tail.rate)) + a * k);
        }
        Ok(best)
    }
}

/// `min_{k ≥ k1} max(V, k·r) + a·k`, or `None` when unbounded below.
fn known_family_min(k1: i64, r: i64, v: i64, a: Rational64) -> Option<Rational64> {
    let f = |k: i64| Rational64::from_integer(v.max(k * r)) + a * k;
    if a >= Rational64::zero() {
        return Some(f(k1));
    }
    if Rational64::from_integer(r) + a < Rational64::zero() {
        return None;
    }
    let kc = if r > 0 { (v / r).max(k1) } else { k1 };
    Some([k1, kc, kc + 1].into_iter().map(f).min().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(p: u32, n: u32) -> Ramification {
        Ramification::new(p, n).unwrap()
    }

    fn auto(p: u32, n: u32, kind: BoundaryKind) -> BoundaryAutomorphism {
        let f = field(p, n);
        BoundaryAutomorphism::new(f, kind, SeriesPrecision::default_for(f)).unwrap()
    }

    #[test]
    fn mult_residue_is_zeta_z() {
        let s = auto(5, 1, BoundaryKind::MultResidue { h: 1 });
        let f = field(5, 1);
        assert_eq!(s.image().terms().len(), 1);
        assert_eq!(s.image().coefficient(1), Some(&f.zeta()));
        assert!(s.iterate_check_order_p().unwrap());
        assert_eq!(s.boundary_differente().unwrap(), 4);
    }

    #[test]
    fn mult_exact_small_case() {
        let f = field(3, 2);
        let s = BoundaryAutomorphism::new(f, BoundaryKind::MultExact { m: 2 }, SeriesPrecision { terms: 12, val_cutoff: 8 })
            .unwrap();
        assert!(s.iterate_check_order_p().unwrap());
        assert_eq!(s.boundary_differente().unwrap(), 4);
    }

    #[test]
    fn additive_small_case() {
        let s = auto(2, 2, BoundaryKind::Additive { m: 1, n: 1 });
        assert!(s.iterate_check_order_p().unwrap());
        assert_eq!(s.boundary_differente().unwrap(), 1);
        let prof = s
            .differente_profile(&[0, 1, 2].map(Rational64::from_integer))
            .unwrap();
        assert_eq!(prof, [1, 0, -1].map(Rational64::from_integer));
    }

    #[test]
    fn parameter_errors() {
        let f = field(3, 2);
        let pr = SeriesPrecision::default_for(f);
        assert_eq!(
            BoundaryAutomorphism::new(f, BoundaryKind::MultExact { m: 3 }, pr).unwrap_err(),
            FieldError::BadConductor(3)
        );
        assert_eq!(
            BoundaryAutomorphism::new(f, BoundaryKind::Additive { m: 1, n: 3 }, pr).unwrap_err(),
            FieldError::BadLevel { n: 3, ram: 2 }
        );
        assert_eq!(
            BoundaryAutomorphism::new(f, BoundaryKind::MultResidue { h: 6 }, pr).unwrap_err(),
            FieldError::BadResidue(6)
        );
    }

    #[test]
    fn identity_has_no_differente() {
        let f = field(3, 1);
        let id = BoundaryAutomorphism::identity(f, SeriesPrecision::default_for(f));
        assert_eq!(id.boundary_differente(), Err(FieldError::AllTermsTruncated));
        assert!(id.iterate_check_order_p().unwrap());
    }

    #[test]
    fn profile_outside_convergence_is_rejected() {
        let s = auto(3, 1, BoundaryKind::MultExact { m: 2 });
        assert!(matches!(
            s.differente_profile(&[Rational64::from_integer(1)]),
            Err(FieldError::OutsideConvergence(_))
        ));
    }
}
