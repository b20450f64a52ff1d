//! Identities linking word counts to permutation counts, and closed forms.
//!
//! Every check here is exact: integers and rationals only.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::combinat::{binomial, factorial, pow, signed};
use crate::error::{Error, Result};
use crate::provider::CountProvider;
use crate::transfer::Rational;
use crate::word::{Pattern, PatternSet};

fn alternating(sign_exp: u64) -> BigInt {
    if sign_exp.is_multiple_of(2) {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

/// `Σ_{k=1}^{n} (-1)^{n-k} C(n,k) f_r([k]^n)`, which equals `f_r(S_n)`.
pub fn perms_from_words<P: CountProvider + ?Sized>(set: &PatternSet, r: u64, n: u32, provider: &mut P) -> Result<BigInt> {
    if n == 0 {
        return Err(Error::InvalidArgument("permutation length must be at least 1".into()));
    }
    let mut sum = BigInt::zero();
    for k in 1..=n {
        let f = provider.word_count(set, k, n, r)?;
        sum += alternating((n - k) as u64) * signed(binomial(n as u64, k as u64)) * signed(f);
    }
    Ok(sum)
}

/// Power series truncated at a fixed order, exact rational coefficients.
/// `coeff(i)` is the coefficient of `x^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesTruncation {
    coeffs: Vec<Rational>,
}

impl SeriesTruncation {
    pub fn zero(order: usize) -> Self {
        SeriesTruncation {
            coeffs: alloc::vec![Rational::zero(); order + 1],
        }
    }

    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty());
        SeriesTruncation { coeffs }
    }

    /// Highest power carried.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// `f(x) -> f(-x)`.
    pub fn negate_argument(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| if i % 2 == 1 { -c.clone() } else { c.clone() })
            .collect();
        SeriesTruncation { coeffs }
    }

    /// `d/dx`; one order of precision is lost.
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return SeriesTruncation::zero(0);
        }
        let coeffs = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(i, c)| c * Rational::from_integer(BigInt::from(i + 1)))
            .collect();
        SeriesTruncation { coeffs }
    }

    /// `c·x^shift·f(x)`, keeping powers up to `order`.
    pub fn scale_shift(&self, c: &Rational, shift: usize, order: usize) -> Self {
        let mut out = SeriesTruncation::zero(order);
        for (i, a) in self.coeffs.iter().enumerate() {
            if i + shift <= order {
                out.coeffs[i + shift] = a * c;
            }
        }
        out
    }

    /// Adds `other`; both must be known through this series' order.
    pub fn add_assign(&mut self, other: &SeriesTruncation) {
        assert!(other.order() >= self.order(), "adding a less precise series");
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EgfCheck {
    /// `Σ f_r(S_n) x^n / n!`.
    pub lhs: SeriesTruncation,
    /// `Σ_k (-x)^k/k! · D^k W_k(-x)`.
    pub rhs: SeriesTruncation,
    pub holds: bool,
    /// Largest `m` with coefficients `1..=m` equal on both sides.
    pub max_order_verified: usize,
}

/// Exponential generating function of `f_r([k]^n)`, `n = 1..=order`.
pub fn word_egf<P: CountProvider + ?Sized>(set: &PatternSet, r: u64, k: u32, order: usize, provider: &mut P) -> Result<SeriesTruncation> {
    let mut s = SeriesTruncation::zero(order);
    for n in 1..=order {
        let f = provider.word_count(set, k, n as u32, r)?;
        s.coeffs[n] = Rational::new(f.into(), factorial(n as u64).into());
    }
    Ok(s)
}

pub fn egf_identity_check<P: CountProvider + ?Sized>(set: &PatternSet, r: u64, order: usize, provider: &mut P) -> Result<EgfCheck> {
    let mut lhs = SeriesTruncation::zero(order);
    for n in 1..=order {
        let f = provider.perm_count(set, n as u32, r)?;
        lhs.coeffs[n] = Rational::new(f.into(), factorial(n as u64).into());
    }

    let mut rhs = SeriesTruncation::zero(order);
    // the k-th term starts at x^k, so k > order contributes nothing
    for k in 1..=order {
        // the k-th derivative of the composite x -> W_k(-x)
        let mut term = word_egf(set, r, k as u32, order, provider)?.negate_argument();
        for _ in 0..k {
            term = term.derivative();
        }
        let c = Rational::new(alternating(k as u64), factorial(k as u64).into());
        rhs.add_assign(&term.scale_shift(&c, k, order));
    }

    let max_order_verified = (1..=order)
        .take_while(|&i| lhs.coeff(i) == rhs.coeff(i))
        .last()
        .unwrap_or(0);
    Ok(EgfCheck {
        holds: max_order_verified == order,
        lhs,
        rhs,
        max_order_verified,
    })
}

pub fn catalan(n: u64) -> BigUint {
    binomial(2 * n, n) / (n + 1)
}

/// `C(n+k-1, n)`: the number of weakly increasing words in `[k]^n`.
pub fn weak_words_closed_form(k: u64, n: u64) -> BigUint {
    if k == 0 {
        return BigUint::from(u32::from(n == 0));
    }
    binomial(n + k - 1, n)
}

/// Closed form for the number of 123-avoiding (equivalently
/// 132-avoiding) words in `[k]^n`:
///
/// `δ_{k,1} + 2^{n-2(k-2)} Σ_{j=0}^{k-2} C(n+2j, n) Σ_{m=j}^{k-2} Cat(m)·C(2(k-2-m), k-2-m)`.
///
/// The power of two has a negative exponent when `n < 2(k-2)`, so the sum
/// is evaluated over the rationals and must come out integral.
pub fn burstein_closed_form(k: u32, n: u32) -> Result<BigUint> {
    if k == 0 {
        return Err(Error::InvalidArgument("alphabet size must be at least 1".into()));
    }
    let delta = Rational::from_integer(BigInt::from(u32::from(k == 1)));
    let top = k as i64 - 2;
    let mut sum = BigInt::zero();
    for j in 0..=top {
        let mut inner = BigInt::zero();
        for m in j..=top {
            let rest = (top - m) as u64;
            inner += signed(catalan(m as u64) * binomial(2 * rest, rest));
        }
        sum += signed(binomial(n as u64 + 2 * j as u64, n as u64)) * inner;
    }
    let exp = n as i64 - 2 * top;
    let two_power = if exp >= 0 {
        Rational::from_integer(signed(pow(2, exp as u64)))
    } else {
        Rational::new(BigInt::one(), signed(pow(2, (-exp) as u64)))
    };
    let value = delta + two_power * Rational::from_integer(sum);
    if !value.is_integer() || value.is_negative() {
        return Err(Error::IdentityViolation(alloc::format!(
            "closed form for k={k}, n={n} is not a non-negative integer: {value}"
        )));
    }
    Ok(value.to_integer().to_biguint().expect("non-negative"))
}

/// `Σ_{k=1}^{n} (-1)^{n-k} C(n,k) C(n+k-1,n)`; the identity says it is 1.
pub fn binomial_identity_value(n: u64) -> BigInt {
    (1..=n)
        .map(|k| alternating(n - k) * signed(binomial(n, k)) * signed(binomial(n + k - 1, n)))
        .sum()
}

pub fn binomial_identity_check(n: u64) -> bool {
    n >= 1 && binomial_identity_value(n).is_one()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SdiscCheck {
    /// `f_0([n]^n)`.
    pub lhs: BigUint,
    /// `Σ_{i=1}^{n} C(n,i)^2 f_0([i]^{n-i}) f_0(S_i)`.
    pub rhs: BigUint,
    pub holds: bool,
}

/// Bound of the avoiders of `[n]^n` by avoiders of shorter words times
/// avoiding permutations. Empty words avoid everything, so `f_0([n]^0) = 1`.
pub fn sdisc_check<P: CountProvider + ?Sized>(v: &Pattern, n: u32, provider: &mut P) -> Result<SdiscCheck> {
    let set = PatternSet::from(v.clone());
    let lhs = provider.avoiders(v, n, n)?;
    let mut rhs = BigUint::zero();
    for i in 1..=n {
        let c = binomial(n as u64, i as u64);
        let words = provider.avoiders(v, i, n - i)?;
        let perms = provider.perm_count(&set, i, 0)?;
        rhs += &c * &c * words * perms;
    }
    Ok(SdiscCheck {
        holds: lhs <= rhs,
        lhs,
        rhs,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YnaCheck {
    /// `f_r(Y_n([a]))` from the words that use every letter of `[a]`.
    pub direct: BigUint,
    /// `Σ_{j=0}^{a-1} (-1)^j C(a,j) f_r([a-j]^n)`.
    pub inclusion_exclusion: BigInt,
    /// `f_r([a]^n)`.
    pub all_words: BigUint,
    /// `Σ_{j=0}^{a-1} C(a,j) f_r(Y_n([a-j]))`, the partition by letter set.
    pub partition_sum: BigUint,
    pub holds: bool,
}

/// Checks the inclusion-exclusion over letter sets behind the word to
/// permutation identity, for words over `[a]` using all `a` letters.
pub fn yna_decomposition_check<P: CountProvider + ?Sized>(set: &PatternSet, r: u64, a: u32, n: u32, provider: &mut P) -> Result<YnaCheck> {
    if a == 0 || n == 0 {
        return Err(Error::InvalidArgument("need a >= 1 and n >= 1".into()));
    }
    let direct = provider.surjective_table(set, a, n, Some(r))?.get(r);
    let mut inclusion_exclusion = BigInt::zero();
    let mut partition_sum = BigUint::zero();
    for j in 0..a {
        let c = binomial(a as u64, j as u64);
        inclusion_exclusion += alternating(j as u64) * signed(c.clone()) * signed(provider.word_count(set, a - j, n, r)?);
        partition_sum += c * provider.surjective_table(set, a - j, n, Some(r))?.get(r);
    }
    let all_words = provider.word_count(set, a, n, r)?;
    Ok(YnaCheck {
        holds: signed(direct.clone()) == inclusion_exclusion && all_words == partition_sum,
        direct,
        inclusion_exclusion,
        all_words,
        partition_sum,
    })
}
