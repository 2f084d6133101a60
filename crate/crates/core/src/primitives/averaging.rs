//! Leader-seeded averaging in isolation, with the `Φ = Σ |ave − M/n|` potential.
//!
//! Values are held as `u128`; `n · M` must fit. Φ is tracked scaled by `n`
//! so it stays an integer: `n·Φ = Σ |n·ave − M|`.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::rng::RandomSource;

/// `Φ = Σ |ave_i − M/n|` as an exact rational.
pub fn potential_phi(aves: &[u128], m: u128, n: u64) -> BigRational {
    assert_eq!(aves.len() as u64, n, "need exactly n values");
    let n_big = BigInt::from(n);
    let m_big = BigInt::from(m);
    let scaled: BigInt = aves
        .iter()
        .map(|&a| {
            let d = BigInt::from(a) * &n_big - &m_big;
            if d < BigInt::from(0) {
                -d
            } else {
                d
            }
        })
        .sum();
    BigRational::new(scaled, n_big)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AveragingRun {
    pub n: u64,
    pub m: u128,
    pub final_aves: Vec<u128>,
    /// Interactions until every value was in `{⌊M/n⌋, ⌈M/n⌉}`.
    pub interactions: u64,
    /// Interactions until every value was within `n` of `M/n`.
    pub close_interactions: u64,
    /// `n·Φ` before the first interaction and after each one.
    pub phi_scaled: Vec<u128>,
    /// `Σ ave` before the first interaction and after each one.
    pub totals: Vec<u128>,
}

impl AveragingRun {
    pub fn phi_nonincreasing(&self) -> bool {
        self.phi_scaled.windows(2).all(|w| w[1] <= w[0])
    }

    pub fn sum_conserved(&self) -> bool {
        self.totals.iter().all(|&t| t == self.m)
    }

    pub fn close_parallel_time(&self) -> f64 {
        self.close_interactions as f64 / self.n as f64
    }
}

#[inline]
fn abs_diff(a: u128, b: u128) -> u128 {
    a.abs_diff(b)
}

/// Runs floor/ceiling averaging from one agent holding `M` and `n − 1`
/// holding 0 until every value is `⌊M/n⌋` or `⌈M/n⌉`.
pub fn averaging_isolated_run(n: u32, m: u128, src: &mut RandomSource) -> Result<AveragingRun> {
    if n < 2 {
        return Err(Error::PopulationTooSmall(n as u64));
    }
    if m == 0 {
        return Err(Error::ZeroScale);
    }
    let nn = n as u128;
    nn.checked_mul(m)
        .and_then(|x| x.checked_mul(2))
        .ok_or(Error::AveragingOverflow { n: n as u64, m })?;

    let floor = m / nn;
    let ceil = m.div_ceil(nn);
    let band = nn * nn; // |n·ave − M| ≤ n² ⇔ |ave − M/n| ≤ n
    let dev = |a: u128| abs_diff(a * nn, m);
    let settled = |a: u128| a == floor || a == ceil;

    let mut aves = vec![0u128; n as usize];
    aves[0] = m;
    let mut phi: u128 = aves.iter().map(|&a| dev(a)).sum();
    let mut total = m;
    let mut n_settled = aves.iter().filter(|&&a| settled(a)).count() as u32;
    let mut n_close = aves.iter().filter(|&&a| dev(a) <= band).count() as u32;
    let mut phi_scaled = vec![phi];
    let mut totals = vec![total];
    let mut interactions = 0u64;
    let mut close_interactions = (n_close == n).then_some(0);

    while n_settled < n {
        let (r, s) = src.ordered_pair(n);
        let (r, s) = (r as usize, s as usize);
        let (a, b) = (aves[r], aves[s]);
        let sum = a + b;
        let (na, nb) = (sum.div_ceil(2), sum / 2);
        aves[r] = na;
        aves[s] = nb;
        interactions += 1;

        total = total - a - b + na + nb;
        phi = phi - dev(a) - dev(b) + dev(na) + dev(nb);
        n_settled = n_settled - settled(a) as u32 - settled(b) as u32 + settled(na) as u32 + settled(nb) as u32;
        n_close = n_close - (dev(a) <= band) as u32 - (dev(b) <= band) as u32
            + (dev(na) <= band) as u32
            + (dev(nb) <= band) as u32;
        if close_interactions.is_none() && n_close == n {
            close_interactions = Some(interactions);
        }
        phi_scaled.push(phi);
        totals.push(total);
    }

    Ok(AveragingRun {
        n: n as u64,
        m,
        final_aves: aves,
        interactions,
        close_interactions: close_interactions.unwrap_or(interactions),
        phi_scaled,
        totals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn sorted(mut v: Vec<u128>) -> Vec<u128> {
        v.sort_unstable();
        v
    }

    #[test]
    fn phi_examples() {
        let r = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
        assert_eq!(potential_phi(&[192, 0, 0], 192, 3), r(256, 1));
        assert!(potential_phi(&[64, 64, 64], 192, 3).is_zero());
        assert_eq!(potential_phi(&[3, 3, 2, 2], 10, 4), r(2, 1));
    }

    #[test]
    fn terminal_multisets() {
        for seed in 0..20 {
            let run = averaging_isolated_run(3, 192, &mut RandomSource::new(seed)).unwrap();
            assert_eq!(run.final_aves, vec![64, 64, 64]);
            let run = averaging_isolated_run(4, 10, &mut RandomSource::new(seed)).unwrap();
            assert_eq!(sorted(run.final_aves.clone()), vec![2, 2, 3, 3]);
        }
    }

    #[test]
    fn traces_conserve_sum_and_phi_decreases() {
        for seed in 0..30 {
            let run = averaging_isolated_run(25, 3 * 25u128.pow(3), &mut RandomSource::new(seed)).unwrap();
            assert!(run.sum_conserved());
            assert!(run.phi_nonincreasing());
            assert_eq!(run.phi_scaled.len() as u64, run.interactions + 1);
            assert!(run.close_interactions <= run.interactions);
            // the scaled potential agrees with the exact rational at the end
            let last = *run.phi_scaled.last().unwrap();
            assert_eq!(
                potential_phi(&run.final_aves, run.m, run.n),
                BigRational::new(BigInt::from(last), BigInt::from(run.n))
            );
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut src = RandomSource::new(0);
        assert_eq!(
            averaging_isolated_run(1, 5, &mut src),
            Err(Error::PopulationTooSmall(1))
        );
        assert_eq!(averaging_isolated_run(3, 0, &mut src), Err(Error::ZeroScale));
        assert!(matches!(
            averaging_isolated_run(4, u128::MAX / 2, &mut src),
            Err(Error::AveragingOverflow { .. })
        ));
    }
}
