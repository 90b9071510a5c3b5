use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};

use super::elt::{coord_to_i128, Ramification, RamifiedElt};
use super::FieldError;

/// A truncated Laurent series `Σ a_i Z^i` over the valuation ring of a [`Ramification`].
///
/// Coefficients are exact modulo `π^V` (`V = val_cutoff`) at every exponent of the known range.
/// The known range is unbounded on a side unless terms were dropped there, in which case it
/// stops at the edge of `z_window`. Products and compositions only claim exponents that no
/// dropped term can reach; anything else raises [`FieldError::PrecisionExhausted`].
#[derive(Clone, PartialEq, Eq)]
pub struct BoundarySeries {
    field: Ramification,
    terms: BTreeMap<i64, RamifiedElt>,
    z_window: (i64, i64),
    known_lo: Option<i64>,
    known_hi: Option<i64>,
    val_cutoff: i64,
}

fn max_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) | (None, x) => x,
    }
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) | (None, x) => x,
    }
}

impl BoundarySeries {
    pub fn zero(field: Ramification, z_window: (i64, i64), val_cutoff: i64) -> Self {
        BoundarySeries { field, terms: BTreeMap::new(), z_window, known_lo: None, known_hi: None, val_cutoff }
    }

    /// Builds an exact series from finitely many terms; terms outside `z_window` are dropped
    /// and make the corresponding side unknown.
    pub fn from_terms<I>(field: Ramification, terms: I, z_window: (i64, i64), val_cutoff: i64) -> Self
    where
        I: IntoIterator<Item = (i64, RamifiedElt)>,
    {
        let mut raw: BTreeMap<i64, RamifiedElt> = BTreeMap::new();
        for (e, c) in terms {
            assert_eq!(c.field(), field, "{}", FieldError::FieldMismatch);
            match raw.get_mut(&e) {
                Some(acc) => *acc = &*acc + &c,
                None => {
                    raw.insert(e, c);
                }
            }
        }
        Self::finish(field, raw, z_window, None, None, val_cutoff)
    }

    pub fn monomial(field: Ramification, c: RamifiedElt, e: i64, z_window: (i64, i64), val_cutoff: i64) -> Self {
        Self::from_terms(field, [(e, c)], z_window, val_cutoff)
    }

    /// The series `Z`.
    pub fn z(field: Ramification, z_window: (i64, i64), val_cutoff: i64) -> Self {
        Self::monomial(field, field.one(), 1, z_window, val_cutoff)
    }

    pub fn one(field: Ramification, z_window: (i64, i64), val_cutoff: i64) -> Self {
        Self::monomial(field, field.one(), 0, z_window, val_cutoff)
    }

    fn finish(
        field: Ramification,
        raw: BTreeMap<i64, RamifiedElt>,
        z_window: (i64, i64),
        mut known_lo: Option<i64>,
        mut known_hi: Option<i64>,
        val_cutoff: i64,
    ) -> Self {
        let (lo, hi) = z_window;
        let mut terms = BTreeMap::new();
        let mut dropped_below = false;
        let mut dropped_above = false;
        for (e, c) in raw {
            if known_lo.is_some_and(|l| e < l) || known_hi.is_some_and(|h| e > h) {
                continue;
            }
            let c = c.truncate(val_cutoff);
            if c.is_zero() {
                continue;
            }
            if e < lo {
                dropped_below = true;
            } else if e > hi {
                dropped_above = true;
            } else {
                terms.insert(e, c);
            }
        }
        if dropped_below {
            known_lo = max_opt(known_lo, Some(lo));
        }
        if dropped_above {
            known_hi = min_opt(known_hi, Some(hi));
        }
        BoundarySeries { field, terms, z_window, known_lo, known_hi, val_cutoff }
    }

    pub fn field(&self) -> Ramification {
        self.field
    }

    pub fn terms(&self) -> &BTreeMap<i64, RamifiedElt> {
        &self.terms
    }

    pub fn coefficient(&self, e: i64) -> Option<&RamifiedElt> {
        self.terms.get(&e)
    }

    pub fn z_window(&self) -> (i64, i64) {
        self.z_window
    }

    pub fn val_cutoff(&self) -> i64 {
        self.val_cutoff
    }

    /// Exponent range on which the coefficients are exact mod `π^V`; `None` means unbounded.
    pub fn known_range(&self) -> (Option<i64>, Option<i64>) {
        (self.known_lo, self.known_hi)
    }

    pub fn is_known_at(&self, e: i64) -> bool {
        self.known_lo.is_none_or(|l| e >= l) && self.known_hi.is_none_or(|h| e <= h)
    }

    /// No stored terms; says nothing about exponents outside the known range.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The same series with storage limited to `z_window`; dropped terms shrink the known range.
    pub fn restrict(&self, z_window: (i64, i64)) -> Self {
        Self::finish(self.field, self.terms.clone(), z_window, self.known_lo, self.known_hi, self.val_cutoff)
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(RamifiedElt::is_integral)
    }

    fn combined_window(&self, other: &Self) -> (i64, i64) {
        (self.z_window.0.max(other.z_window.0), self.z_window.1.min(other.z_window.1))
    }

    fn check_field(&self, other: &Self) -> Result<(), FieldError> {
        if self.field != other.field {
            Err(FieldError::FieldMismatch)
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, FieldError> {
        self.check_field(other)?;
        let mut raw = self.terms.clone();
        for (e, c) in &other.terms {
            match raw.get_mut(e) {
                Some(acc) => *acc = &*acc + c,
                None => {
                    raw.insert(*e, c.clone());
                }
            }
        }
        Ok(Self::finish(
            self.field,
            raw,
            self.combined_window(other),
            max_opt(self.known_lo, other.known_lo),
            min_opt(self.known_hi, other.known_hi),
            self.val_cutoff.min(other.val_cutoff),
        ))
    }

    pub fn neg(&self) -> Self {
        let raw = self.terms.iter().map(|(e, c)| (*e, -c)).collect();
        Self::finish(self.field, raw, self.z_window, self.known_lo, self.known_hi, self.val_cutoff)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, FieldError> {
        self.add(&other.neg())
    }

    /// Multiplies by an integral constant.
    pub fn scale(&self, c: &RamifiedElt) -> Result<Self, FieldError> {
        if !c.is_integral() {
            return Err(FieldError::NonIntegral(0));
        }
        let raw = self.terms.iter().map(|(e, a)| (*e, a * c)).collect();
        Ok(Self::finish(self.field, raw, self.z_window, self.known_lo, self.known_hi, self.val_cutoff))
    }

    /// Multiplies by `Z^k`.
    pub fn shift(&self, k: i64) -> Self {
        let raw = self.terms.iter().map(|(e, a)| (e + k, a.clone())).collect();
        Self::finish(
            self.field,
            raw,
            self.z_window,
            self.known_lo.map(|l| l + k),
            self.known_hi.map(|h| h + k),
            self.val_cutoff,
        )
    }

    /// Largest exponent that the true series can carry (`None` for unbounded, `Some(MIN)` for zero).
    fn true_top(&self) -> Option<i64> {
        if self.known_hi.is_some() {
            return None;
        }
        let stored = self.terms.keys().next_back().copied();
        let below = self.known_lo.map(|l| l - 1);
        Some(stored.into_iter().chain(below).max().unwrap_or(i64::MIN))
    }

    fn true_bottom(&self) -> Option<i64> {
        if self.known_lo.is_some() {
            return None;
        }
        let stored = self.terms.keys().next().copied();
        let above = self.known_hi.map(|h| h + 1);
        Some(stored.into_iter().chain(above).min().unwrap_or(i64::MAX))
    }

    /// Known range of a product, from where the unknown parts of either factor can land.
    fn product_range(&self, other: &Self) -> Result<(Option<i64>, Option<i64>), FieldError> {
        let mut lo: Option<i64> = None;
        let mut hi: Option<i64> = None;
        for (a, b) in [(self, other), (other, self)] {
            if let Some(l) = a.known_lo {
                match b.true_top() {
                    None => return Err(FieldError::PrecisionExhausted(
                        "product of a series truncated below with one truncated above".into(),
                    )),
                    Some(i64::MIN) => {}
                    Some(t) => lo = max_opt(lo, Some(l + t)),
                }
            }
            if let Some(h) = a.known_hi {
                match b.true_bottom() {
                    None => return Err(FieldError::PrecisionExhausted(
                        "product of a series truncated above with one truncated below".into(),
                    )),
                    Some(i64::MAX) => {}
                    Some(t) => hi = min_opt(hi, Some(h + t)),
                }
            }
        }
        Ok((lo, hi))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, FieldError> {
        self.check_field(other)?;
        for s in [self, other] {
            if let Some((e, _)) = s.terms.iter().find(|(_, c)| !c.is_integral()) {
                return Err(FieldError::NonIntegral(*e));
            }
        }
        let (known_lo, known_hi) = self.product_range(other)?;
        let v = self.val_cutoff.min(other.val_cutoff);
        let window = self.combined_window(other);
        let in_range = |e: i64| known_lo.is_none_or(|l| e >= l) && known_hi.is_none_or(|h| e <= h);
        let raw = match ModKernel::new(self.field, v) {
            Some(k) => k.convolve(&self.terms, &other.terms, &in_range),
            None => convolve_exact(&self.terms, &other.terms, &in_range),
        };
        Ok(Self::finish(self.field, raw, window, known_lo, known_hi, v))
    }

    /// Reference product over exact rationals, used to cross-check the modular kernel.
    pub fn mul_exact(&self, other: &Self) -> Result<Self, FieldError> {
        self.check_field(other)?;
        let (known_lo, known_hi) = self.product_range(other)?;
        let in_range = |e: i64| known_lo.is_none_or(|l| e >= l) && known_hi.is_none_or(|h| e <= h);
        let raw = convolve_exact(&self.terms, &other.terms, &in_range);
        let v = self.val_cutoff.min(other.val_cutoff);
        Ok(Self::finish(self.field, raw, self.combined_window(other), known_lo, known_hi, v))
    }

    pub fn pow(&self, e: u32) -> Result<Self, FieldError> {
        let mut acc = Self::one(self.field, self.z_window, self.val_cutoff);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Writes `self = c·Z^k·(1 + g)` with `c` a unit and `g` supported strictly on one side:
    /// below `k` when `negative` (needs an exact top), above `k` otherwise.
    fn unit_decomposition(&self, negative: bool) -> Result<(RamifiedElt, i64, Self), FieldError> {
        let lead = if negative {
            if self.known_hi.is_some() {
                return Err(FieldError::PrecisionExhausted("leading term lies above the known range".into()));
            }
            self.terms.iter().next_back()
        } else {
            if self.known_lo.is_some() {
                return Err(FieldError::PrecisionExhausted("leading term lies below the known range".into()));
            }
            self.terms.iter().next()
        };
        let (k, c) = lead.ok_or(FieldError::AllTermsTruncated)?;
        if c.valuation() != Some(0) {
            return Err(FieldError::NotPrincipalUnit(format!("leading coefficient {c} is not a unit")));
        }
        let cinv = c.inverse().expect("unit");
        let g = self.scale(&cinv)?.shift(-k).sub(&Self::one(self.field, self.z_window, self.val_cutoff))?;
        Ok((cinv, *k, g))
    }

    fn leading_side(&self) -> Result<bool, FieldError> {
        if self.known_hi.is_none() {
            Ok(true)
        } else if self.known_lo.is_none() {
            Ok(false)
        } else {
            Err(FieldError::PrecisionExhausted("series is truncated on both sides".into()))
        }
    }

    /// Multiplicative inverse as a Laurent series on the side where `self` is exact.
    pub fn inverse(&self) -> Result<Self, FieldError> {
        let negative = self.leading_side()?;
        let (cinv, k, g) = self.unit_decomposition(negative)?;
        let inv = g.binomial_series(&BigRational::from_integer(BigInt::from(-1)))?;
        Ok(inv.scale(&cinv)?.shift(-k))
    }

    /// `(1 + g)^α` for `self = 1 + g` and `α` a `p`-integral rational, as `Σ C(α, j) g^j`.
    pub fn binomial_power(&self, alpha: &BigRational) -> Result<Self, FieldError> {
        let g = self.sub(&Self::one(self.field, self.z_window, self.val_cutoff))?;
        g.binomial_series(alpha)
    }

    /// `m`-th root of a principal unit: `h` with `h^m = self` within the cutoffs.
    pub fn binomial_root_series(&self, m: i64) -> Result<Self, FieldError> {
        if m == 0 || m.rem_euclid(self.field.p() as i64) == 0 {
            return Err(FieldError::BadConductor(m));
        }
        self.binomial_power(&BigRational::new(BigInt::one(), BigInt::from(m)))
    }

    /// `Σ_j C(α, j) self^j`. Terminates when `self` is topologically nilpotent: its unit
    /// coefficients all sit strictly on one side of `Z^0`.
    fn binomial_series(&self, alpha: &BigRational) -> Result<Self, FieldError> {
        let units_below = self.terms.iter().any(|(e, c)| *e < 0 && c.valuation() == Some(0));
        let units_above = self.terms.iter().any(|(e, c)| *e > 0 && c.valuation() == Some(0));
        let unit_constant = self.terms.get(&0).is_some_and(|c| c.valuation().unwrap() <= 0);
        if unit_constant || (units_below && units_above) {
            return Err(FieldError::NotPrincipalUnit(
                "f - 1 has unit coefficients on both sides or in degree 0".into(),
            ));
        }
        if let Some((e, _)) = self.terms.iter().find(|(_, c)| !c.is_integral()) {
            return Err(FieldError::NonIntegral(*e));
        }
        let mut acc = Self::one(self.field, self.z_window, self.val_cutoff);
        let mut power = acc.clone();
        let mut binom = BigRational::one();
        let width = (self.z_window.1 - self.z_window.0).max(0);
        let cap = 4 * (self.val_cutoff.max(1) + width) + 16;
        for j in 1.. {
            if j > cap {
                return Err(FieldError::PrecisionExhausted("binomial series did not terminate".into()));
            }
            power = power.mul(self)?;
            binom = binom * (alpha - BigRational::from_integer(BigInt::from(j - 1))) / BigRational::from_integer(BigInt::from(j));
            if power.is_empty() {
                // Later terms are multiples of this one and cannot reach its known range.
                acc = acc.add(&power)?;
                break;
            }
            if binom.is_zero() {
                // α is a nonnegative integer and every later coefficient vanishes.
                break;
            }
            let c = self.field.from_rational(binom.clone());
            acc = acc.add(&power.scale(&c)?)?;
        }
        Ok(acc)
    }

    /// `self(s) = Σ a_i s^i`.
    pub fn compose(&self, s: &Self) -> Result<Self, FieldError> {
        self.check_field(s)?;
        let mut known_lo: Option<i64> = None;
        let mut known_hi: Option<i64> = None;
        // Where the unknown parts of self land after substitution.
        if let Some(l) = self.known_lo {
            let (_, k, _) = s
                .unit_decomposition(true)
                .map_err(|_| FieldError::PrecisionExhausted("cannot bound the tail below after substitution".into()))?;
            if k < 1 {
                return Err(FieldError::PrecisionExhausted("substituted series has no positive leading degree".into()));
            }
            known_lo = Some(k * (l - 1) + 1);
        }
        if let Some(h) = self.known_hi {
            let (_, k, _) = s
                .unit_decomposition(false)
                .map_err(|_| FieldError::PrecisionExhausted("cannot bound the tail above after substitution".into()))?;
            if k < 1 {
                return Err(FieldError::PrecisionExhausted("substituted series has no positive leading degree".into()));
            }
            known_hi = Some(k * (h + 1) - 1);
        }
        let mut acc = Self::zero(self.field, self.combined_window(s), self.val_cutoff.min(s.val_cutoff));
        acc.known_lo = known_lo;
        acc.known_hi = known_hi;
        let top = self.terms.keys().next_back().copied().unwrap_or(0).max(0);
        let bottom = self.terms.keys().next().copied().unwrap_or(0).min(0);
        let mut pos = Self::one(self.field, s.z_window, s.val_cutoff);
        for i in 0..=top {
            if i > 0 {
                pos = pos.mul(s)?;
            }
            if let Some(a) = self.terms.get(&i) {
                acc = acc.add(&pos.scale(a)?)?;
            }
        }
        if bottom < 0 {
            let sinv = s.inverse()?;
            let mut neg = Self::one(self.field, s.z_window, s.val_cutoff);
            for i in (bottom..0).rev() {
                neg = neg.mul(&sinv)?;
                if let Some(a) = self.terms.get(&i) {
                    acc = acc.add(&neg.scale(a)?)?;
                }
            }
        }
        if let (Some(l), Some(h)) = acc.known_range() {
            if l > h {
                return Err(FieldError::PrecisionExhausted("composition leaves no known exponent".into()));
            }
        }
        Ok(acc)
    }

    /// `min_i v(a_i) + i·ρ` over the stored terms.
    pub fn gauss_valuation(&self, rho: Rational64) -> Result<Rational64, FieldError> {
        self.terms
            .iter()
            .map(|(e, c)| Rational64::from_integer(c.valuation().expect("stored terms are nonzero")) + rho * *e)
            .min()
            .ok_or(FieldError::AllTermsTruncated)
    }

    /// Whether `self` and `other` agree on the whole `z_window` modulo `π^V`.
    pub fn agrees_with(&self, other: &Self) -> Result<bool, FieldError> {
        let diff = self.sub(other)?;
        let (lo, hi) = diff.z_window;
        if !diff.is_known_at(lo) || !diff.is_known_at(hi) {
            return Err(FieldError::PrecisionExhausted(format!(
                "difference is only known on {:?}, window is {:?}",
                diff.known_range(),
                diff.z_window
            )));
        }
        Ok(diff.is_empty())
    }
}

fn convolve_exact(
    a: &BTreeMap<i64, RamifiedElt>,
    b: &BTreeMap<i64, RamifiedElt>,
    in_range: &dyn Fn(i64) -> bool,
) -> BTreeMap<i64, RamifiedElt> {
    let mut raw: BTreeMap<i64, RamifiedElt> = BTreeMap::new();
    for (i, x) in a {
        for (j, y) in b {
            let e = i + j;
            if !in_range(e) {
                continue;
            }
            let prod = x * y;
            match raw.get_mut(&e) {
                Some(acc) => *acc = &*acc + &prod,
                None => {
                    raw.insert(e, prod);
                }
            }
        }
    }
    raw
}

/// Multiplication of integral elements modulo `p^S ⊆ π^V Z`, in machine integers.
struct ModKernel {
    field: Ramification,
    modulus: i128,
    reduction: Vec<(usize, i128)>,
}

impl ModKernel {
    fn new(field: Ramification, v: i64) -> Option<Self> {
        let d = field.degree() as i64;
        let s = num_integer::Integer::div_ceil(&v.max(1), &d);
        let p = field.p() as i128;
        let mut modulus: i128 = 1;
        for _ in 0..s {
            modulus = modulus.checked_mul(p)?;
            if modulus >= 1 << 62 {
                return None;
            }
        }
        let n = field.ram() as usize;
        let mut binom: i128 = 1;
        let mut reduction = Vec::new();
        for i in 1..field.p() as i128 {
            binom = binom * (p - i + 1) / i;
            reduction.push((n * (i as usize - 1), (-binom).rem_euclid(modulus)));
        }
        Some(ModKernel { field, modulus, reduction })
    }

    fn lift(&self, x: &RamifiedElt) -> Vec<i128> {
        x.coords()
            .iter()
            .map(|c| coord_to_i128(c).expect("canonical integral coordinates").rem_euclid(self.modulus))
            .collect()
    }

    fn mul(&self, a: &[i128], b: &[i128], out: &mut [i128]) {
        let d = a.len();
        let m = self.modulus;
        let mut prod = vec![0i128; 2 * d - 1];
        for (i, x) in a.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if *y != 0 {
                    prod[i + j] = (prod[i + j] + x * y % m) % m;
                }
            }
        }
        for k in (d..2 * d - 1).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            for &(off, r) in &self.reduction {
                let t = k - d + off;
                prod[t] = (prod[t] + c * r % m) % m;
            }
        }
        for (o, x) in out.iter_mut().zip(&prod) {
            *o = (*o + x) % m;
        }
    }

    fn convolve(
        &self,
        a: &BTreeMap<i64, RamifiedElt>,
        b: &BTreeMap<i64, RamifiedElt>,
        in_range: &dyn Fn(i64) -> bool,
    ) -> BTreeMap<i64, RamifiedElt> {
        let d = self.field.degree();
        let la: Vec<(i64, Vec<i128>)> = a.iter().map(|(e, x)| (*e, self.lift(x))).collect();
        let lb: Vec<(i64, Vec<i128>)> = b.iter().map(|(e, x)| (*e, self.lift(x))).collect();
        let mut acc: BTreeMap<i64, Vec<i128>> = BTreeMap::new();
        for (i, x) in &la {
            for (j, y) in &lb {
                let e = i + j;
                if in_range(e) {
                    self.mul(x, y, acc.entry(e).or_insert_with(|| vec![0; d]));
                }
            }
        }
        acc.into_iter()
            .map(|(e, v)| {
                let coords = v.into_iter().map(|c| BigRational::from_integer(BigInt::from(c))).collect();
                (e, self.field.from_coords(coords))
            })
            .collect()
    }
}

impl fmt::Debug for BoundarySeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for BoundarySeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self.terms.iter().rev().map(|(e, c)| format!("({c})Z^{e}")).collect();
        let body = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
        write!(f, "{body}")?;
        if self.known_lo.is_some() || self.known_hi.is_some() {
            write!(f, " [known on {:?}..{:?}]", self.known_lo, self.known_hi)?;
        }
        write!(f, " mod π^{}", self.val_cutoff)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(p: u32, n: u32) -> Ramification {
        Ramification::new(p, n).unwrap()
    }

    #[test]
    fn gauss_valuation_examples() {
        let f = k(3, 2);
        let s = BoundarySeries::from_terms(f, [(-2, f.pi_pow(3)), (1, f.pi())], (-10, 10), 20);
        assert_eq!(s.gauss_valuation(Rational64::from_integer(0)).unwrap(), Rational64::from_integer(1));
        let zm = BoundarySeries::monomial(f, f.one(), 3, (-10, 10), 20);
        assert_eq!(zm.gauss_valuation(Rational64::new(5, 2)).unwrap(), Rational64::new(15, 2));
        let zero = BoundarySeries::zero(f, (-10, 10), 20);
        assert_eq!(zero.gauss_valuation(Rational64::from_integer(0)), Err(FieldError::AllTermsTruncated));
    }

    #[test]
    fn kernel_matches_exact_product() {
        let f = k(5, 2);
        let a = BoundarySeries::from_terms(f, [(0, f.zeta()), (-1, f.pi()), (-3, f.lambda())], (-12, 2), 17);
        let b = BoundarySeries::from_terms(f, [(1, f.zeta_pow(3)), (-2, f.pi_pow(5))], (-12, 2), 17);
        assert_eq!(a.mul(&b).unwrap(), a.mul_exact(&b).unwrap());
    }

    #[test]
    fn inverse_of_negative_mode_series() {
        let f = k(3, 1);
        let s = BoundarySeries::from_terms(f, [(1, f.zeta()), (0, f.one())], (-15, 1), 8);
        let inv = s.inverse().unwrap();
        assert_eq!(inv.known_range(), (Some(-15), None));
        // The unknown tail of the inverse reaches exponent -15 + 1 in the product.
        let prod = s.mul(&inv).unwrap();
        assert_eq!(prod.known_range(), (Some(-14), None));
        let diff = prod.sub(&BoundarySeries::one(f, (-15, 1), 8)).unwrap();
        assert!(diff.is_empty());
        assert!(matches!(prod.agrees_with(&BoundarySeries::one(f, (-15, 1), 8)), Err(FieldError::PrecisionExhausted(_))));
    }

    #[test]
    fn binomial_root_squares_back() {
        let f = k(3, 2);
        let one_plus = BoundarySeries::from_terms(f, [(0, f.one()), (-1, f.pi())], (-20, 1), 16);
        let h = one_plus.binomial_root_series(2).unwrap();
        assert!(h.mul(&h).unwrap().agrees_with(&one_plus).unwrap());
        assert_eq!(one_plus.binomial_root_series(3), Err(FieldError::BadConductor(3)));
        assert!(one_plus.binomial_root_series(1).unwrap().agrees_with(&one_plus).unwrap());
    }

    #[test]
    fn non_principal_unit_rejected() {
        let f = k(3, 1);
        let s = BoundarySeries::from_terms(f, [(0, f.one()), (1, f.one()), (-1, f.one())], (-5, 5), 4);
        assert!(matches!(s.binomial_root_series(2), Err(FieldError::NotPrincipalUnit(_))));
    }
}
