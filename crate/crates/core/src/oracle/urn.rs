use rand::Rng;
use serde::{Deserialize, Serialize};

/// How many balls of the drawn colour are added back.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Replacement {
    /// One extra ball (subtree sizes under uniform attachment).
    Classic,
    /// Two extra balls (subtree degree sums under preferential attachment).
    Diag2,
}

impl Replacement {
    fn increment(self) -> u64 {
        match self {
            Replacement::Classic => 1,
            Replacement::Diag2 => 2,
        }
    }
}

/// Two-colour urn contents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UrnState {
    pub a: u64,
    pub b: u64,
    pub replacement: Replacement,
}

impl UrnState {
    pub fn new(a: u64, b: u64, replacement: Replacement) -> Self {
        assert!(a >= 1 && b >= 1, "urn needs at least one ball of each colour");
        UrnState { a, b, replacement }
    }

    pub fn proportion(&self) -> f64 {
        self.a as f64 / (self.a + self.b) as f64
    }

    pub fn draw<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let inc = self.replacement.increment();
        if rng.random_range(0..self.a + self.b) < self.a {
            self.a += inc;
        } else {
            self.b += inc;
        }
    }
}

/// Run the urn for `steps` draws and return the proportion of the first
/// colour before the first draw and after each draw.
pub fn polya_run<R: Rng + ?Sized>(init: UrnState, steps: usize, rng: &mut R) -> Vec<f64> {
    let mut urn = init;
    let mut trajectory = Vec::with_capacity(steps + 1);
    trajectory.push(urn.proportion());
    for _ in 0..steps {
        urn.draw(rng);
        trajectory.push(urn.proportion());
    }
    trajectory
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{beta_cdf, ks_one_sample};
    use crate::rng::RngSpec;

    #[test]
    fn zero_steps() {
        let mut rng = RngSpec::new(0).rng();
        assert_eq!(
            polya_run(UrnState::new(3, 5, Replacement::Classic), 0, &mut rng),
            vec![3.0 / 8.0]
        );
    }

    #[test]
    fn totals_grow_by_increment() {
        let mut rng = RngSpec::new(1).rng();
        let mut urn = UrnState::new(1, 2, Replacement::Diag2);
        for step in 1..=50 {
            urn.draw(&mut rng);
            assert_eq!(urn.a + urn.b, 3 + 2 * step);
        }
    }

    #[test]
    fn classic_uniform_limit() {
        let root = RngSpec::new(7);
        let finals: Vec<f64> = (0..10_000)
            .map(|i| {
                *polya_run(UrnState::new(1, 1, Replacement::Classic), 1000, &mut root.substream(i).rng())
                    .last()
                    .unwrap()
            })
            .collect();
        let mean = finals.iter().sum::<f64>() / finals.len() as f64;
        // martingale: mean stays at 1/2; sd of a uniform is 1/sqrt(12)
        assert!((mean - 0.5).abs() < 3.0 * (1.0 / 12.0f64).sqrt() / 100.0);
        let ks = ks_one_sample(&finals, |x| x.clamp(0.0, 1.0));
        assert!(ks.p_value > 0.01, "{ks:?}");
    }

    #[test]
    fn beta_limits() {
        let root = RngSpec::new(8);
        let classic: Vec<f64> = (0..3000)
            .map(|i| *polya_run(UrnState::new(3, 2, Replacement::Classic), 2000, &mut root.substream(i).rng()).last().unwrap())
            .collect();
        let ks = ks_one_sample(&classic, |x| beta_cdf(3.0, 2.0, x));
        assert!(ks.p_value > 0.01, "{ks:?}");
        // (2a-1, 2b-1) with a = 3, b = 2 converges to Beta(5/2, 3/2)
        let diag: Vec<f64> = (0..3000)
            .map(|i| *polya_run(UrnState::new(5, 3, Replacement::Diag2), 2000, &mut root.substream(10_000 + i).rng()).last().unwrap())
            .collect();
        let ks = ks_one_sample(&diag, |x| beta_cdf(2.5, 1.5, x));
        assert!(ks.p_value > 0.01, "{ks:?}");
    }
}
