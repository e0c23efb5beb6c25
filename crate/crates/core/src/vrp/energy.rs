//! Aerial-vehicle power and battery recharge models.

use crate::error::{Error, Result};

pub const UAV_MAX_SPEED: f64 = 30.0;

/// Cubic power draw of the UAV at airspeed `v` (m/s), in watts.
pub fn uav_power(v: f64) -> Result<f64> {
    if !(0.0..=UAV_MAX_SPEED).contains(&v) {
        return Err(Error::OutOfRange {
            what: "uav speed",
            value: v,
            lo: 0.0,
            hi: UAV_MAX_SPEED,
        });
    }
    Ok(0.046 * v.powi(3) - 0.583 * v.powi(2) - 1.876 * v + 229.6)
}

/// Energy (J) spent flying for `travel_s` seconds at constant speed `v`.
pub fn edge_energy(travel_s: f64, v: f64) -> Result<f64> {
    Ok(uav_power(v)? * travel_s)
}

/// Piecewise charging profile: constant power up to the knee, then a
/// linearly tapering tail until the battery is within `cutoff` of full.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RechargeModel {
    /// J
    pub capacity: f64,
    /// J; constant-power phase ends here.
    pub knee: f64,
    /// W
    pub constant_power: f64,
    /// W per kJ of headroom in the tail.
    pub taper: f64,
    /// J short of capacity at which charging is considered complete.
    pub cutoff: f64,
}

impl Default for RechargeModel {
    fn default() -> Self {
        Self {
            capacity: 287_700.0,
            knee: 270_400.0,
            constant_power: 310.8,
            taper: 17.9,
            cutoff: 100.0,
        }
    }
}

impl RechargeModel {
    /// Charging power (W) at stored energy `e` (J).
    pub fn power_at(&self, e: f64) -> f64 {
        if e <= self.knee {
            self.constant_power
        } else {
            self.taper * (self.capacity - e) / 1000.0
        }
    }

    /// Seconds to charge from `e` joules to `capacity − cutoff`.
    pub fn recharge_time(&self, e: f64) -> Result<f64> {
        if !(0.0..=self.capacity).contains(&e) {
            return Err(Error::OutOfRange {
                what: "stored energy",
                value: e,
                lo: 0.0,
                hi: self.capacity,
            });
        }
        Ok(self.recharge_time_clamped(e))
    }

    /// Like [`recharge_time`](Self::recharge_time) but clamps `e` into range.
    pub fn recharge_time_clamped(&self, e: f64) -> f64 {
        let e = e.clamp(0.0, self.capacity);
        let full = self.capacity - self.cutoff;
        if e >= full {
            return 0.0;
        }
        let constant = if e < self.knee {
            (self.knee - e) / self.constant_power
        } else {
            0.0
        };
        let tail_start = e.max(self.knee);
        // dE/dt = taper·(capacity − E)/1000 integrates to a logarithm.
        let tail = (1000.0 / self.taper) * ((self.capacity - tail_start) / self.cutoff).ln();
        constant + tail
    }
}

/// Recharge time with the default charging profile.
pub fn recharge_time(e: f64) -> Result<f64> {
    RechargeModel::default().recharge_time(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_values() {
        assert_eq!(uav_power(0.0).unwrap(), 229.6);
        assert!((uav_power(10.0).unwrap() - 198.54).abs() < 1e-9);
        // 0.046·125 − 0.583·25 − 1.876·5 + 229.6
        assert!((uav_power(5.0).unwrap() - 211.395).abs() < 1e-9);
        assert!(uav_power(31.0).is_err());
        assert!(uav_power(-1.0).is_err());
    }

    #[test]
    fn edge_energy_values() {
        assert_eq!(edge_energy(0.0, 10.0).unwrap(), 0.0);
        assert!((edge_energy(100.0, 10.0).unwrap() - 19_854.0).abs() < 1e-6);
        let endurance = 287_700.0 / uav_power(10.0).unwrap();
        assert!((endurance - 1449.0).abs() < 0.5);
        assert!((endurance * 10.0 / 1000.0 - 14.5).abs() < 0.05);
    }

    #[test]
    fn recharge_endpoints() {
        assert_eq!(recharge_time(287_700.0).unwrap(), 0.0);
        assert!((recharge_time(270_400.0).unwrap() - 287.9).abs() < 0.5);
        assert!((recharge_time(0.0).unwrap() - 1157.9).abs() < 0.5);
        assert!(recharge_time(-1.0).is_err());
        assert!(recharge_time(300_000.0).is_err());
    }

    /// Integrates dt = dE / P(E) numerically and compares to the closed form.
    #[test]
    fn recharge_matches_quadrature() {
        let m = RechargeModel::default();
        for &e0 in &[0.0, 100_000.0, 270_400.0, 280_000.0, 287_000.0] {
            let full = m.capacity - m.cutoff;
            let steps = 200_000;
            let h = (full - e0) / steps as f64;
            let mut t = 0.0;
            for k in 0..steps {
                let e = e0 + (k as f64 + 0.5) * h;
                t += h / m.power_at(e);
            }
            let closed = m.recharge_time(e0).unwrap();
            assert!((t - closed).abs() < 0.05, "e0={e0}: {t} vs {closed}");
        }
    }

    #[test]
    fn recharge_decreasing_and_knee_gap() {
        let m = RechargeModel::default();
        let mut prev = f64::INFINITY;
        let mut e = 0.0;
        while e < m.capacity - m.cutoff {
            let t = m.recharge_time(e).unwrap();
            assert!(t < prev);
            prev = t;
            e += 517.0;
        }
        let gap = (m.power_at(m.knee) - m.power_at(m.knee + 1e-6)).abs();
        assert!(gap <= 1.13 + 1e-3, "{gap}");
    }
}
