//! Lower bounds on the packing chromatic number of `S^n_k` for `k >= 4`.

use num_bigint::BigInt;

use crate::error::{Error, Result};

/// Which form of the growth recurrence to iterate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Recurrence {
    /// `a_{n+1} = k a_n - 2^{n+1}(k-1) + 2(k-1)`, matching the closed form.
    #[default]
    Canonical,
    /// `a_{n+1} = k a_n - 2^{n+1}(k-1) + (k-1)`, a weaker variant.
    Literal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundSequence {
    pub k: u32,
    /// `values[i]` is `a_{i+1}`.
    pub values: Vec<BigInt>,
}

impl BoundSequence {
    /// `a_n`, 1-based.
    pub fn get(&self, n: usize) -> Option<&BigInt> {
        n.checked_sub(1).and_then(|i| self.values.get(i))
    }
}

fn check_base(k: u32) -> Result<()> {
    if k <= 3 {
        return Err(Error::BaseTooSmall(k));
    }
    Ok(())
}

fn pow2(e: usize) -> BigInt {
    BigInt::from(1) << e
}

/// `a_1..a_N` with `a_1 = k`.
pub fn lower_bound_sequence(k: u32, big_n: usize, rule: Recurrence) -> Result<BoundSequence> {
    check_base(k)?;
    let kk = BigInt::from(k);
    let km1 = BigInt::from(k - 1);
    let extra = match rule {
        Recurrence::Canonical => &km1 * 2,
        Recurrence::Literal => km1.clone(),
    };
    let mut values = Vec::with_capacity(big_n);
    let mut a = kk.clone();
    for n in 1..=big_n {
        values.push(a.clone());
        a = &kk * &a - pow2(n + 1) * &km1 + &extra;
    }
    Ok(BoundSequence { k, values })
}

/// `a_n = ((4-k) k^n - 2(2-k) - 2^{n+1}(k-1)) / (2-k)`.
pub fn lower_bound_closed_form(k: u32, n: usize) -> Result<BigInt> {
    check_base(k)?;
    let kk = BigInt::from(k);
    let two_minus_k = BigInt::from(2) - &kk;
    let num = (BigInt::from(4) - &kk) * kk.pow(n as u32)
        - BigInt::from(2) * &two_minus_k
        - pow2(n + 1) * (&kk - 1);
    debug_assert_eq!(&num % &two_minus_k, BigInt::from(0));
    Ok(num / two_minus_k)
}

/// Whether `a_n < a_{n+1}` for every `n < N`, cross-checked against `2^{n+1} > (4-k) k^n`.
pub fn monotonicity_check(k: u32, big_n: usize) -> Result<bool> {
    let seq = lower_bound_sequence(k, big_n, Recurrence::Canonical)?;
    let kk = BigInt::from(k);
    for n in 1..big_n {
        let increasing = seq.values[n - 1] < seq.values[n];
        let criterion = pow2(n + 1) > (BigInt::from(4) - &kk) * kk.pow(n as u32);
        if increasing != criterion || !increasing {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k4_values() {
        let s = lower_bound_sequence(4, 4, Recurrence::Canonical).unwrap();
        let v: Vec<BigInt> = [4, 10, 22, 46].into_iter().map(BigInt::from).collect();
        assert_eq!(s.values, v);
        assert_eq!(s.get(1), Some(&BigInt::from(4)));
    }

    #[test]
    fn closed_form_points() {
        assert_eq!(lower_bound_closed_form(4, 1).unwrap(), BigInt::from(4));
        assert_eq!(lower_bound_closed_form(4, 3).unwrap(), BigInt::from(22));
        let s = lower_bound_sequence(5, 2, Recurrence::Canonical).unwrap();
        assert_eq!(lower_bound_closed_form(5, 2).unwrap(), s.values[1]);
        assert_eq!(s.values[0], BigInt::from(5));
    }

    #[test]
    fn literal_is_weaker() {
        let c = lower_bound_sequence(6, 8, Recurrence::Canonical).unwrap();
        let l = lower_bound_sequence(6, 8, Recurrence::Literal).unwrap();
        assert_eq!(c.values[0], l.values[0]);
        for (a, b) in c.values.iter().zip(&l.values).skip(1) {
            assert!(b < a);
        }
    }

    #[test]
    fn small_base_rejected() {
        assert!(matches!(
            lower_bound_sequence(3, 2, Recurrence::Canonical),
            Err(Error::BaseTooSmall(3))
        ));
        assert!(lower_bound_closed_form(2, 2).is_err());
        assert!(monotonicity_check(3, 2).is_err());
    }

    #[test]
    fn monotone() {
        assert!(monotonicity_check(4, 20).unwrap());
        assert!(monotonicity_check(8, 20).unwrap());
        assert!(monotonicity_check(5, 1).unwrap());
    }
}
