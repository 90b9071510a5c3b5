//! Small integer helpers shared by the modules.

/// Trial-division primality test; inputs are tiny residue characteristics.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime factors in increasing order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Inverse of `a` modulo the prime `p`; `a` must be nonzero mod `p`.
pub fn inv_mod_p(a: i64, p: u32) -> u32 {
    let p = p as i64;
    let a = a.rem_euclid(p);
    assert!(a != 0, "no inverse of 0 mod {p}");
    let mut r = 1i64;
    let mut base = a;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    r as u32
}

/// Reduces an integer into `0..p`.
pub fn mod_p(a: i64, p: u32) -> u32 {
    a.rem_euclid(p as i64) as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        let ps: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(ps, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(prime_factors(24), vec![2, 3]);
        assert_eq!(prime_factors(1), Vec::<u64>::new());
    }

    #[test]
    fn inverses() {
        for p in [2u32, 3, 5, 7] {
            for a in 1..p as i64 {
                assert_eq!(a * inv_mod_p(a, p) as i64 % p as i64, 1);
            }
        }
        assert_eq!(inv_mod_p(-1, 5), 4);
    }
}
