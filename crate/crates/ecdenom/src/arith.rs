//! Arbitrary-precision integer utilities: gcd, exact integer square root,
//! primality testing, factoring.
//!
//! Everything here is a pure function on immutable values and safe to call
//! from any number of threads. Denominators of high multiples reach hundreds
//! of digits, so primality must be fast on big inputs: below 2^64 the test is
//! a deterministic Miller-Rabin base set, above it a Baillie-PSW-style test
//! (strong base-2 probable prime plus strong Lucas). No composite passing
//! Baillie-PSW is known; the verdict is still reported as plain
//! prime/composite.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

pub type Integer = BigInt;
pub type Natural = BigUint;
pub type Rational = num_rational::BigRational;

/// Non-negative greatest common divisor; gcd(0, 0) = 0.
pub fn gcd(a: &Integer, b: &Integer) -> Natural {
    a.gcd(b).magnitude().clone()
}

/// Floor of the square root, plus whether the input is a perfect square.
pub fn isqrt_exact(n: &Natural) -> (Natural, bool) {
    let root = n.sqrt();
    let exact = &root * &root == *n;
    (root, exact)
}

/// Natural logarithm of a natural number, usable far beyond f64 range.
pub fn ln(n: &Natural) -> f64 {
    if n.is_zero() || n.is_one() {
        return 0.0;
    }
    let bits = n.bits();
    if bits <= 1023 {
        return n.to_f64().expect("fits in f64 range").ln();
    }
    // Split off the top 64 bits: ln(m * 2^k) = ln m + k ln 2.
    let shift = bits - 64;
    let top = (n >> shift).to_u64().expect("top word fits u64");
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

const SMALL_PRIMES: [u64; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

/// Primality test: deterministic for n < 2^64, Baillie-PSW above.
pub fn is_prime(n: &Natural) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    for &p in &SMALL_PRIMES {
        if (n % p).is_zero() {
            return false; // n > 2^64, so n != p
        }
    }
    strong_probable_prime_base2(n) && strong_lucas_probable_prime(n)
}

fn mulmod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod_u64(acc, base, m);
        }
        base = mulmod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for the full u64 range (the first twelve prime
/// bases are a proven witness set well past 2^64).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Strong probable-prime test to base 2. Caller guarantees n odd, n > 2.
fn strong_probable_prime_base2(n: &Natural) -> bool {
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().expect("n odd, so n-1 > 0");
    let d = &n_minus_1 >> s;
    let mut x = Natural::from(2u32).modpow(&d, n);
    if x.is_one() || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n_minus_1 {
            return true;
        }
    }
    false
}

/// Jacobi symbol (a/n) for odd n > 0.
fn jacobi(a: &BigInt, n: &Natural) -> i32 {
    debug_assert!(n.is_odd());
    let mut a = a.mod_floor(&BigInt::from(n.clone())).magnitude().clone();
    let mut n = n.clone();
    let mut t = 1i32;
    while !a.is_zero() {
        let tz = a.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            a >>= tz;
            let r = (&n % 8u32).to_u32().unwrap();
            if (tz % 2 == 1) && (r == 3 || r == 5) {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if (&a % 4u32).to_u32().unwrap() == 3 && (&n % 4u32).to_u32().unwrap() == 3 {
            t = -t;
        }
        a %= &n;
    }
    if n.is_one() {
        t
    } else {
        0
    }
}

/// Strong Lucas probable-prime test with Selfridge's parameter choice
/// (method A): first D in 5, -7, 9, -11, ... with (D/n) = -1, then P = 1,
/// Q = (1 - D) / 4. Caller guarantees n odd with no prime factor <= 97.
fn strong_lucas_probable_prime(n: &Natural) -> bool {
    let (_, square) = isqrt_exact(n);
    if square {
        return false; // a square has (D/n) != -1 for every D
    }
    let mut d = BigInt::from(5);
    loop {
        match jacobi(&d, n) {
            -1 => break,
            0 => return false, // shares a factor 5 <= |D| < n with n
            _ => {}
        }
        d = if d.is_positive() { -(d + 2) } else { -(d - 2) };
    }
    let n_int = BigInt::from(n.clone());
    let q = (BigInt::one() - &d) / 4;
    let q_mod = q.mod_floor(&n_int).magnitude().clone();
    let d_mod = d.mod_floor(&n_int).magnitude().clone();

    let n_plus_1 = n + 1u32;
    let s = n_plus_1.trailing_zeros().expect("n odd, so n+1 even");
    let t = &n_plus_1 >> s;

    // Binary ladder for U_t, V_t, Q^t (mod n), P = 1.
    let mut u = Natural::one(); // U_1
    let mut v = Natural::one(); // V_1 = P
    let mut qk = q_mod.clone(); // Q^1
    let half = |x: Natural| -> Natural {
        if x.is_even() {
            x >> 1
        } else {
            (x + n) >> 1
        }
    };
    let bits = t.bits();
    for i in (0..bits - 1).rev() {
        // (U_k, V_k) -> (U_2k, V_2k): U <- UV, V <- V^2 - 2 Q^k
        u = (&u * &v) % n;
        v = ((&v * &v) + (n - &qk) * 2u32) % n;
        qk = (&qk * &qk) % n;
        if t.bit(i) {
            // -> (U_2k+1, V_2k+1): U <- (U + V)/2, V <- (D U + V)/2
            let nu = half((&u + &v) % n);
            let nv = half((&d_mod * &u + &v) % n);
            u = nu;
            v = nv;
            qk = (&qk * &q_mod) % n;
        }
    }

    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..s {
        v = ((&v * &v) + (n - &qk) * 2u32) % n;
        qk = (&qk * &qk) % n;
        if v.is_zero() {
            return true;
        }
    }
    false
}

/// Iteration budget for Pollard rho. The census must not stall on one hard
/// composite, so factoring gives up with `FactoringTimeout` instead of
/// searching forever.
#[derive(Debug, Clone, Copy)]
pub struct FactorBudget {
    /// Total rho iterations across all attempts for one composite.
    pub rho_iterations: u64,
}

impl Default for FactorBudget {
    fn default() -> Self {
        // enough for prime factors up to roughly 12 digits
        FactorBudget {
            rho_iterations: 1 << 22,
        }
    }
}

/// Prime factorization as sorted (prime, exponent) pairs, default budget.
pub fn factor(n: &Natural) -> Result<Vec<(Natural, u32)>, Error> {
    factor_with_budget(n, FactorBudget::default())
}

/// Prime factorization with an explicit Pollard-rho budget.
///
/// Trial division strips primes below 10^4, Pollard rho (with Floyd cycle
/// detection and batched gcds) splits the rest recursively. Intended for
/// inputs up to ~40 digits; harder composites exhaust the budget and error.
pub fn factor_with_budget(n: &Natural, budget: FactorBudget) -> Result<Vec<(Natural, u32)>, Error> {
    assert!(!n.is_zero(), "factor() requires n >= 1");
    let mut factors: Vec<(Natural, u32)> = Vec::new();
    let mut rest = n.clone();

    if let Some(v) = n.to_u64() {
        for (p, e) in factor_u64(v, budget)? {
            factors.push((Natural::from(p), e));
        }
        return Ok(factors);
    }

    let mut small = 2u64;
    while small < 10_000 {
        if rest.is_one() {
            break;
        }
        if (&rest % small).is_zero() {
            let mut e = 0;
            while (&rest % small).is_zero() {
                rest /= small;
                e += 1;
            }
            factors.push((Natural::from(small), e));
        }
        small = if small == 2 { 3 } else { small + 2 };
    }

    if !rest.is_one() {
        let mut stack = vec![rest];
        while let Some(m) = stack.pop() {
            if let Some(v) = m.to_u64() {
                for (p, e) in factor_u64(v, budget)? {
                    factors.push((Natural::from(p), e));
                }
                continue;
            }
            if is_prime(&m) {
                factors.push((m, 1));
                continue;
            }
            let d = split_composite(&m, budget)?;
            stack.push(&m / &d);
            stack.push(d);
        }
    }

    factors.sort();
    let mut merged: Vec<(Natural, u32)> = Vec::with_capacity(factors.len());
    for (p, e) in factors {
        match merged.last_mut() {
            Some((q, f)) if *q == p => *f += e,
            _ => merged.push((p, e)),
        }
    }
    debug_assert_eq!(
        merged
            .iter()
            .fold(Natural::one(), |acc, (p, e)| acc * p.pow(*e)),
        *n
    );
    Ok(merged)
}

/// Native-width factorization; n >= 1.
fn factor_u64(mut n: u64, budget: FactorBudget) -> Result<Vec<(u64, u32)>, Error> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d < 10_000 && d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d = if d == 2 { 3 } else { d + 2 };
    }
    if n > 1 {
        let mut stack = vec![n];
        while let Some(m) = stack.pop() {
            if is_prime_u64(m) {
                out.push((m, 1));
                continue;
            }
            let root = (m as f64).sqrt() as u64;
            let d = if root.saturating_mul(root) == m {
                root
            } else {
                rho_u64(m, budget.rho_iterations).ok_or(Error::FactoringTimeout {
                    digits: m.to_string().len(),
                })?
            };
            stack.push(m / d);
            stack.push(d);
        }
    }
    out.sort_unstable();
    let mut merged: Vec<(u64, u32)> = Vec::with_capacity(out.len());
    for (p, e) in out {
        match merged.last_mut() {
            Some((q, f)) if *q == p => *f += e,
            _ => merged.push((p, e)),
        }
    }
    Ok(merged)
}

/// One nontrivial divisor of a composite with no factors below 10^4.
fn split_composite(m: &Natural, budget: FactorBudget) -> Result<Natural, Error> {
    let (root, exact) = isqrt_exact(m);
    if exact {
        return Ok(root);
    }
    rho_big(m, budget.rho_iterations).ok_or(Error::FactoringTimeout {
        digits: m.to_string().len(),
    })
}

/// Pollard rho with Floyd cycle detection and batched gcds. Returns a
/// nontrivial divisor of composite n, or None when the budget runs out.
fn rho_u64(n: u64, budget: u64) -> Option<u64> {
    let mut spent = 0u64;
    for c in 1..20u64 {
        let step = |v: u64| ((mulmod_u64(v, v, n) as u128 + c as u128) % n as u128) as u64;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut prod = 1u64;
        let mut count = 0u64;
        while spent < budget {
            x = step(x);
            y = step(step(y));
            spent += 1;
            count += 1;
            prod = mulmod_u64(prod, x.abs_diff(y), n);
            if prod == 0 {
                // x = y (cycle met exactly); check the direct difference
                let g = num_integer::gcd(x.abs_diff(y), n);
                if g > 1 && g < n {
                    return Some(g);
                }
                break; // degenerate cycle, try the next polynomial
            }
            if count % 128 == 0 {
                let g = num_integer::gcd(prod, n);
                if g > 1 && g < n {
                    return Some(g);
                }
            }
        }
        let g = num_integer::gcd(prod, n);
        if g > 1 && g < n {
            return Some(g);
        }
    }
    None
}

fn rho_big(n: &Natural, budget: u64) -> Option<Natural> {
    let mut spent = 0u64;
    for c in 1..8u32 {
        let cb = Natural::from(c);
        let step = |v: &Natural| (v * v + &cb) % n;
        let mut x = Natural::from(2u32);
        let mut y = x.clone();
        let mut prod = Natural::one();
        let mut count = 0u64;
        while spent < budget {
            x = step(&x);
            y = step(&step(&y));
            spent += 1;
            count += 1;
            let diff = if x > y { &x - &y } else { &y - &x };
            prod = (prod * diff) % n;
            if prod.is_zero() {
                let g = if x > y { &x - &y } else { &y - &x }.gcd(n);
                if !g.is_one() && g != *n {
                    return Some(g);
                }
                break;
            }
            if count % 64 == 0 {
                let g = prod.gcd(n);
                if !g.is_one() && g != *n {
                    return Some(g);
                }
            }
        }
        let g = prod.gcd(n);
        if !g.is_one() && g != *n {
            return Some(g);
        }
    }
    None
}
