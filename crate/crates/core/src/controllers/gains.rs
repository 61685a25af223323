use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::blocks::{PdGains, PiGains};
use crate::error::{ParamError};
use crate::params::Side;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlMode {
    /// Dual-port GFM, each MMC regulating its own DC terminal.
    EnergyBalancing,
    /// Offshore MMC regulates the estimated onshore DC voltage.
    Holistic,
}

impl ControlMode {
    pub const ALL: [ControlMode; 2] = [ControlMode::EnergyBalancing, ControlMode::Holistic];

    pub fn name(self) -> &'static str {
        match self {
            ControlMode::EnergyBalancing => "energy_balancing",
            ControlMode::Holistic => "holistic",
        }
    }
}

impl fmt::Display for ControlMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownMode(pub String);

impl fmt::Display for UnknownMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown control mode `{}` (expected energy_balancing or holistic)", self.0)
    }
}

impl std::error::Error for UnknownMode {}

impl FromStr for ControlMode {
    type Err = UnknownMode;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "energy_balancing" | "eb" => Ok(ControlMode::EnergyBalancing),
            "holistic" | "hol" => Ok(ControlMode::Holistic),
            _ => Err(UnknownMode(s.to_string())),
        }
    }
}

/// Gains of one MMC: frequency PD, DC-voltage reference PD, DC-voltage PI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SideGains {
    pub pd_freq: PdGains,
    pub pd_udc: PdGains,
    pub pi_dc: PiGains,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerGains {
    pub mode: ControlMode,
    pub onshore: SideGains,
    pub offshore: SideGains,
}

impl ControllerGains {
    pub fn new(mode: ControlMode, onshore: SideGains, offshore: SideGains) -> Result<Self, ParamError> {
        let g = Self { mode, onshore, offshore };
        g.validate()?;
        Ok(g)
    }

    /// Reference gains. Energy-balancing control uses the same values.
    pub fn defaults(mode: ControlMode) -> Self {
        Self {
            mode,
            onshore: SideGains {
                pd_freq: PdGains::new(1.0, 0.025),
                pd_udc: PdGains::new(1.0, 0.025),
                pi_dc: PiGains { kp: 11.914, ki: 2382.9 },
            },
            offshore: SideGains {
                pd_freq: PdGains::new(0.33, 0.0),
                pd_udc: PdGains::new(0.33, 0.025),
                pi_dc: PiGains { kp: 11.914, ki: 2382.9 },
            },
        }
    }

    pub fn side(&self, side: Side) -> &SideGains {
        match side {
            Side::On => &self.onshore,
            Side::Off => &self.offshore,
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        for (side, g) in [(Side::On, &self.onshore), (Side::Off, &self.offshore)] {
            let pre = format!("control.{}.{}", self.mode.name(), side.name());
            g.pd_freq.validate(&format!("{pre}.pd_freq"))?;
            g.pd_udc.validate(&format!("{pre}.pd_udc"))?;
            g.pi_dc.validate(&format!("{pre}.pi_dc"))?;
        }
        let nonzero = [
            ("p1", self.onshore.pd_freq.p),
            ("p3", self.offshore.pd_freq.p),
            ("p4", self.offshore.pd_udc.p),
        ];
        for (name, v) in nonzero {
            if v == 0.0 {
                return Err(ParamError::new(
                    format!("control.{}.{name}", self.mode.name()),
                    v,
                    "nonzero",
                ));
            }
        }
        Ok(())
    }

    /// Onshore DC-voltage to frequency ratio, P_2/P_1.
    pub fn k1(&self) -> f64 {
        self.onshore.pd_udc.p / self.onshore.pd_freq.p
    }

    /// Offshore frequency to DC-voltage ratio, P_3/P_4.
    pub fn k2(&self) -> f64 {
        self.offshore.pd_freq.p / self.offshore.pd_udc.p
    }

    /// Whether P_2/P_1 = P_4/P_3 within 1e-9 relative.
    pub fn synchronizing(&self) -> bool {
        let lhs = self.k1();
        let rhs = self.offshore.pd_udc.p / self.offshore.pd_freq.p;
        (lhs - rhs).abs() <= 1e-9 * lhs.abs().max(rhs.abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_values() {
        let g = ControllerGains::defaults(ControlMode::Holistic);
        assert_eq!((g.onshore.pd_freq.p, g.onshore.pd_freq.d), (1.0, 0.025));
        assert_eq!((g.onshore.pd_udc.p, g.onshore.pd_udc.d), (1.0, 0.025));
        assert_eq!((g.onshore.pi_dc.kp, g.onshore.pi_dc.ki), (11.914, 2382.9));
        assert_eq!((g.offshore.pd_freq.p, g.offshore.pd_freq.d), (0.33, 0.0));
        assert_eq!((g.offshore.pd_udc.p, g.offshore.pd_udc.d), (0.33, 0.025));
        assert_eq!((g.offshore.pi_dc.kp, g.offshore.pi_dc.ki), (11.914, 2382.9));
        g.validate().unwrap();
    }

    #[test]
    fn defaults_are_synchronizing() {
        let g = ControllerGains::defaults(ControlMode::Holistic);
        assert!(g.synchronizing());
        assert_eq!(g.k1(), 1.0);
        assert_eq!(g.k2(), 1.0);
    }

    #[test]
    fn detuned_gains_not_synchronizing() {
        let mut g = ControllerGains::defaults(ControlMode::Holistic);
        g.offshore.pd_udc.p *= 2.0;
        assert!(!g.synchronizing());
        assert!((g.k2() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn zero_p4_rejected() {
        let mut g = ControllerGains::defaults(ControlMode::EnergyBalancing);
        g.offshore.pd_udc.p = 0.0;
        assert_eq!(g.validate().unwrap_err().field, "control.energy_balancing.p4");
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("holistic".parse::<ControlMode>().unwrap(), ControlMode::Holistic);
        assert_eq!(
            "energy-balancing".parse::<ControlMode>().unwrap(),
            ControlMode::EnergyBalancing
        );
        assert!("cbc".parse::<ControlMode>().is_err());
    }
}
