//! Mobility-adjusted BFT quorum arithmetic and the sampling diagnostics
//! around its claimed count law.

use rand::Rng;

use crate::churn::sample_churn_delta;
use crate::error::{Error, Result};
use crate::randutil::poisson_count;

/// Inputs to the mobility-adjusted quorum rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuorumInput {
    pub faulty: u64,
    pub delta_legit: i64,
    pub delta_faulty: i64,
}

/// Minimum node count that keeps the network Byzantine fault tolerant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuorumRequirement {
    pub n_min: u64,
}

/// n_min = max(1, 3f - delta_legit + delta_faulty + 1).
///
/// With zero churn this reduces to the classic 3f + 1; negative results from
/// large legitimate inflows are clamped to 1.
pub fn required_nodes(input: QuorumInput) -> QuorumRequirement {
    let raw = 3 * input.faulty as i128 - input.delta_legit as i128 + input.delta_faulty as i128 + 1;
    QuorumRequirement {
        n_min: raw.max(1) as u64,
    }
}

/// True iff `total >= 3 * faulty + 1`.
pub fn is_bft_feasible(total: u64, faulty: u64) -> Result<bool> {
    if faulty > total {
        return Err(Error::ParameterDomain(format!(
            "faulty count {faulty} exceeds total {total}"
        )));
    }
    Ok(total >= 3 * faulty + 1)
}

/// One sampled draw of the quorum rule's inputs and output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuorumSample {
    pub faulty: u64,
    pub delta_legit: i64,
    pub delta_faulty: i64,
    pub n_min: u64,
}

/// Samples the required node count: f ~ Poisson(faulty_mean), churn deltas
/// in count mode, then the quorum rule per trial.
pub fn sample_required_nodes<R: Rng + ?Sized>(
    faulty_mean: f64,
    legit_churn: (f64, f64),
    faulty_churn: (f64, f64),
    trials: u64,
    rng: &mut R,
) -> Result<Vec<QuorumSample>> {
    if trials == 0 {
        return Err(Error::ParameterDomain("trials must be >= 1".into()));
    }
    if !(faulty_mean >= 0.0) || !faulty_mean.is_finite() {
        return Err(Error::ParameterDomain(format!(
            "faulty mean must be nonnegative, got {faulty_mean}"
        )));
    }
    let mut samples = Vec::with_capacity(trials as usize);
    for _ in 0..trials {
        let faulty = poisson_count(rng, faulty_mean);
        let legit = sample_churn_delta(legit_churn.0, legit_churn.1, rng)?;
        let faulty_delta = sample_churn_delta(faulty_churn.0, faulty_churn.1, rng)?;
        let n_min = required_nodes(QuorumInput {
            faulty,
            delta_legit: legit.net,
            delta_faulty: faulty_delta.net,
        })
        .n_min;
        samples.push(QuorumSample {
            faulty,
            delta_legit: legit.net,
            delta_faulty: faulty_delta.net,
            n_min,
        });
    }
    Ok(samples)
}

/// Sample mean, unbiased variance, and variance-to-mean ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dispersion {
    pub mean: f64,
    pub variance: f64,
    pub index: f64,
}

/// Dispersion diagnostic: Poisson counts have index 1; the quorum samples
/// under churn come out overdispersed (Skellam contribution).
pub fn dispersion_diagnostic<T: Into<f64> + Copy>(samples: &[T]) -> Result<Dispersion> {
    if samples.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "dispersion needs >= 2 samples, got {}",
            samples.len()
        )));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().map(|&x| x.into()).sum::<f64>() / n;
    let variance = samples
        .iter()
        .map(|&x| (x.into() - mean).powi(2))
        .sum::<f64>()
        / (n - 1.0);
    let index = if mean == 0.0 { 0.0 } else { variance / mean };
    Ok(Dispersion {
        mean,
        variance,
        index,
    })
}

/// Sampled-law CSV: `trial,f,delta_N,delta_f,n_min`.
pub fn samples_to_csv(samples: &[QuorumSample]) -> String {
    let mut out = String::from("trial,f,delta_N,delta_f,n_min\n");
    for (trial, s) in samples.iter().enumerate() {
        out.push_str(&format!(
            "{trial},{},{},{},{}\n",
            s.faulty, s.delta_legit, s.delta_faulty, s.n_min
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn n_min(f: u64, dn: i64, df: i64) -> u64 {
        required_nodes(QuorumInput {
            faulty: f,
            delta_legit: dn,
            delta_faulty: df,
        })
        .n_min
    }

    #[test]
    fn classic_reduction() {
        for f in 0..=100 {
            assert_eq!(n_min(f, 0, 0), 3 * f + 1);
        }
    }

    #[test]
    fn direct_substitution() {
        assert_eq!(n_min(1, 0, 0), 4);
        assert_eq!(n_min(0, 0, 0), 1);
        assert_eq!(n_min(6, 3, 5), 21);
    }

    #[test]
    fn clamps_to_one() {
        assert_eq!(n_min(0, 50, 0), 1);
        assert_eq!(n_min(1, 100, -3), 1);
    }

    #[test]
    fn feasibility_threshold() {
        assert!(is_bft_feasible(4, 1).unwrap());
        assert!(!is_bft_feasible(3, 1).unwrap());
        assert!(is_bft_feasible(1, 0).unwrap());
        assert!(is_bft_feasible(2, 1).is_err() == false);
        assert!(is_bft_feasible(1, 2).is_err());
    }

    #[test]
    fn dispersion_of_constant_samples() {
        let d = dispersion_diagnostic(&[5.0f64, 5.0, 5.0, 5.0]).unwrap();
        assert_eq!((d.mean, d.variance, d.index), (5.0, 0.0, 0.0));
        assert!(dispersion_diagnostic(&[1.0f64]).is_err());
    }

    #[test]
    fn zero_means_give_constant_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let samples = sample_required_nodes(0.0, (0.0, 0.0), (0.0, 0.0), 100, &mut rng).unwrap();
        assert!(samples.iter().all(|s| s.n_min == 1));
    }

    #[test]
    fn mean_law_and_overdispersion() {
        // E[n_min] = 3*25 - 2 + 1 + 1 = 75 at legit net mean 2, faulty net mean 1
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let trials = 100_000u64;
        let samples =
            sample_required_nodes(25.0, (3.0, 1.0), (2.0, 1.0), trials, &mut rng).unwrap();
        let vals: Vec<f64> = samples.iter().map(|s| s.n_min as f64).collect();
        let d = dispersion_diagnostic(&vals).unwrap();
        // var = 9*25 + (3+1) + (2+1) = 232
        let se = (232.0f64 / trials as f64).sqrt();
        assert!((d.mean - 75.0).abs() < 3.0 * se, "mean={}", d.mean);

        // symmetric churn means 4: mean 76, var 241 -> clearly overdispersed
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let samples =
            sample_required_nodes(25.0, (4.0, 4.0), (4.0, 4.0), trials, &mut rng).unwrap();
        let shifted: Vec<f64> = samples.iter().map(|s| (s.n_min - 1) as f64).collect();
        let d = dispersion_diagnostic(&shifted).unwrap();
        assert!(d.index > 1.05, "index={}", d.index);
    }

    #[test]
    fn poisson_samples_have_unit_dispersion() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let vals: Vec<f64> = (0..100_000)
            .map(|_| crate::randutil::poisson_count(&mut rng, 10.0) as f64)
            .collect();
        let d = dispersion_diagnostic(&vals).unwrap();
        assert!((0.95..=1.05).contains(&d.index), "index={}", d.index);
    }

    #[test]
    fn csv_shape() {
        let samples = vec![QuorumSample {
            faulty: 2,
            delta_legit: -1,
            delta_faulty: 3,
            n_min: 11,
        }];
        assert_eq!(
            samples_to_csv(&samples),
            "trial,f,delta_N,delta_f,n_min\n0,2,-1,3,11\n"
        );
    }

    proptest! {
        #[test]
        fn monotone_in_inputs(f in 0u64..1000, dn in -500i64..500, df in -500i64..500) {
            let base = n_min(f, dn, df);
            prop_assert!(n_min(f + 1, dn, df) >= base);
            prop_assert!(n_min(f, dn, df + 1) >= base);
            prop_assert!(n_min(f, dn + 1, df) <= base);
            prop_assert!(base >= 1);
        }
    }
}
