use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::perception::frame::ProximalFrame;
use crate::units::NEWTONS_PER_LBF;

/// Standard deviation of zero-mean Gaussian noise per sensor channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Base force, N.
    pub force: f64,
    /// Base torque, N·mm.
    pub torque: f64,
    /// Cable tension, N.
    pub tension: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::none()
    }
}

impl NoiseModel {
    pub fn none() -> Self {
        Self {
            force: 0.0,
            torque: 0.0,
            tension: 0.0,
        }
    }

    /// Resolution-level noise of the reference sensors: 1/320 N, 1/64 N·mm, 1/100 lbf.
    pub fn hardware() -> Self {
        Self {
            force: 1.0 / 320.0,
            torque: 1.0 / 64.0,
            tension: 0.01 * NEWTONS_PER_LBF,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.force == 0.0 && self.torque == 0.0 && self.tension == 0.0
    }

    pub fn is_valid(&self) -> bool {
        [self.force, self.torque, self.tension].iter().all(|s| s.is_finite() && *s >= 0.0)
    }

    /// Adds noise to every sensor channel of `frame`; measured tensions stay non-negative.
    pub fn apply<R: Rng + ?Sized>(&self, frame: &mut ProximalFrame, rng: &mut R) {
        let draw = |sigma: f64, rng: &mut R| {
            if sigma > 0.0 {
                Normal::new(0.0, sigma).expect("finite sigma").sample(rng)
            } else {
                0.0
            }
        };
        for f in &mut frame.wrench.force {
            *f += draw(self.force, rng);
        }
        for t in &mut frame.wrench.torque {
            *t += draw(self.torque, rng);
        }
        for t in &mut frame.tensions {
            *t = (*t + draw(self.tension, rng)).max(0.0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perception::frame::BaseWrench;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sample_statistics_match_sigma() {
        let model = NoiseModel::hardware();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 100_000;
        let (mut sum, mut sq) = (0.0, 0.0);
        let (mut tsum, mut tsq) = (0.0, 0.0);
        for _ in 0..n {
            let mut f = ProximalFrame {
                timestamp: 0.0,
                wrench: BaseWrench::default(),
                tensions: [10.0, 10.0],
                set_lengths: [21.0, 21.0],
            };
            model.apply(&mut f, &mut rng);
            sum += f.wrench.force[0];
            sq += f.wrench.force[0].powi(2);
            tsum += f.wrench.torque[1];
            tsq += f.wrench.torque[1].powi(2);
        }
        let nf = n as f64;
        let sd = (sq / nf - (sum / nf).powi(2)).sqrt();
        assert!((sd / model.force - 1.0).abs() < 0.05);
        assert!((sum / nf).abs() < 0.05 * model.force);
        let tsd = (tsq / nf - (tsum / nf).powi(2)).sqrt();
        assert!((tsd / model.torque - 1.0).abs() < 0.05);
    }

    #[test]
    fn zero_noise_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f0 = ProximalFrame {
            timestamp: 0.5,
            wrench: BaseWrench { force: [0.1, 0.2, 0.3], torque: [1.0, 2.0, 3.0] },
            tensions: [0.5, 0.0],
            set_lengths: [20.5, 21.5],
        };
        let mut f = f0;
        NoiseModel::none().apply(&mut f, &mut rng);
        assert_eq!(f, f0);
    }
}
