//! Capstan friction along the cable path.

/// Length change below which a cable segment is considered stationary, mm.
pub const LENGTH_HOLD_TOLERANCE: f64 = 1e-6;

/// Quasi-static friction coefficient of one cable segment from its length history.
///
/// A shortening segment takes `+u`, a lengthening one `-u`, a stationary one
/// keeps its previous value and a slack cable carries no friction.
pub fn friction_sign_update(prev_sign: f64, l_now: f64, l_prev: f64, tension: f64, u: f64) -> f64 {
    friction_sign_update_with_tolerance(prev_sign, l_now, l_prev, tension, u, LENGTH_HOLD_TOLERANCE)
}

pub fn friction_sign_update_with_tolerance(
    prev_sign: f64,
    l_now: f64,
    l_prev: f64,
    tension: f64,
    u: f64,
    tolerance: f64,
) -> f64 {
    if tension <= 0.0 {
        return 0.0;
    }
    let dl = l_now - l_prev;
    if dl.abs() <= tolerance {
        prev_sign.clamp(-u, u)
    } else if dl < 0.0 {
        u
    } else {
        -u
    }
}

/// One frictional contact on the cable path: wrap angle and friction coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wrap {
    pub angle: f64,
    pub sign: f64,
}

impl Wrap {
    pub fn new(angle: f64, sign: f64) -> Self {
        Self { angle, sign }
    }
}

/// Tension after a sequence of capstan contacts: `T_in · exp(Σ sign·φ)`.
pub fn capstan_propagate(t_in: f64, wraps: &[Wrap]) -> f64 {
    t_in * capstan_exponent(wraps).exp()
}

pub fn capstan_exponent(wraps: &[Wrap]) -> f64 {
    wraps.iter().map(|w| w.sign * w.angle).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_update_branches() {
        let u = 0.33;
        assert_eq!(friction_sign_update(0.0, 2.0, 2.1, 1.0, u), 0.33);
        assert_eq!(friction_sign_update(0.0, 2.1, 2.0, 1.0, u), -0.33);
        assert_eq!(friction_sign_update(0.33, 2.0, 2.1, 0.0, u), 0.0);
        assert_eq!(friction_sign_update(0.33, 2.1, 2.1, 1.0, u), 0.33);
        assert_eq!(friction_sign_update(-0.1, 2.1 + 5e-7, 2.1, 1.0, u), -0.1);
    }

    #[test]
    fn capstan_examples() {
        assert_eq!(capstan_propagate(2.5, &[Wrap::new(0.4, 0.0), Wrap::new(0.1, 0.0)]), 2.5);
        let t = capstan_propagate(1.0, &[Wrap::new(0.1, 0.33)]);
        assert!((t - 0.033f64.exp()).abs() < 1e-15);
        assert!((t - 1.03355).abs() < 1e-5);
        let two = capstan_propagate(1.0, &[Wrap::new(0.1, 0.33), Wrap::new(0.2, 0.33)]);
        let one = capstan_propagate(1.0, &[Wrap::new(0.3, 0.33)]);
        assert!((two - one).abs() < 1e-14);
    }
}
