//! Prime sieves.

/// Smallest-prime-factor sieve together with μ and Ω.
///
/// Linear (Euler) sieve: every composite is struck exactly once, by its
/// smallest prime factor, which makes μ and Ω fall out of the same pass.
pub(crate) struct LinearSieve {
    pub primes: Vec<u32>,
    pub spf: Vec<u32>,
    pub mu: Vec<i8>,
    pub omega: Vec<u8>,
}

pub(crate) fn linear_sieve(limit: usize) -> LinearSieve {
    let mut spf = vec![0u32; limit + 1];
    let mut mu = vec![0i8; limit + 1];
    let mut omega = vec![0u8; limit + 1];
    let mut primes: Vec<u32> = Vec::with_capacity(estimate_prime_count(limit as u64));
    if limit >= 1 {
        mu[1] = 1;
        spf[1] = 1;
    }
    for i in 2..=limit {
        if spf[i] == 0 {
            spf[i] = i as u32;
            mu[i] = -1;
            omega[i] = 1;
            primes.push(i as u32);
        }
        let spf_i = spf[i];
        for &p in &primes {
            let ip = i * p as usize;
            if p > spf_i || ip > limit {
                break;
            }
            spf[ip] = p;
            omega[ip] = omega[i] + 1;
            mu[ip] = if p == spf_i { 0 } else { -mu[i] };
        }
    }
    LinearSieve {
        primes,
        spf,
        mu,
        omega,
    }
}

const SEGMENT: u64 = 1 << 18;

/// All primes up to `limit` with a segmented sieve of Eratosthenes.
///
/// Working memory is `O(sqrt(limit) + SEGMENT)` besides the output.
pub fn segmented_primes(limit: u64) -> Vec<u32> {
    if limit < 2 {
        return Vec::new();
    }
    let root = (limit as f64).sqrt() as u64 + 1;
    let base = simple_sieve(root);
    let mut primes: Vec<u32> = Vec::with_capacity(estimate_prime_count(limit));
    let mut seg = vec![true; SEGMENT as usize];
    let mut lo = 2u64;
    while lo <= limit {
        let hi = (lo + SEGMENT - 1).min(limit);
        let len = (hi - lo + 1) as usize;
        seg[..len].iter_mut().for_each(|b| *b = true);
        for &p in &base {
            let p = p as u64;
            if p * p > hi {
                break;
            }
            let start = (p * p).max(lo.div_ceil(p) * p);
            let mut m = start;
            while m <= hi {
                seg[(m - lo) as usize] = false;
                m += p;
            }
        }
        primes.extend(
            seg[..len]
                .iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(i, _)| (lo + i as u64) as u32),
        );
        lo = hi + 1;
    }
    primes
}

fn simple_sieve(limit: u64) -> Vec<u32> {
    let n = limit as usize;
    let mut is = vec![true; n + 1];
    is[0] = false;
    if n >= 1 {
        is[1] = false;
    }
    let mut i = 2;
    while i * i <= n {
        if is[i] {
            let mut m = i * i;
            while m <= n {
                is[m] = false;
                m += i;
            }
        }
        i += 1;
    }
    is.iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i as u32)
        .collect()
}

fn estimate_prime_count(limit: u64) -> usize {
    if limit < 17 {
        return 8;
    }
    let x = limit as f64;
    (1.26 * x / x.ln()) as usize
}
