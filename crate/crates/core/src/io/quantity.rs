//! Physical quantities written as `"<number> <unit>"` strings in input files.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::units::{NEWTONS_PER_GF, NEWTONS_PER_LBF};

fn parse_quantity(text: &str, kind: &str, units: &[(&str, f64)]) -> Result<f64, String> {
    let text = text.trim();
    let split = text
        .find(|c: char| c.is_whitespace() || (c.is_alphabetic() && c != 'e' && c != 'E'))
        .ok_or_else(|| format!("{kind} `{text}` needs a unit ({})", unit_list(units)))?;
    let (number, unit) = text.split_at(split);
    let value: f64 = number
        .trim()
        .parse()
        .map_err(|_| format!("`{}` is not a number", number.trim()))?;
    if !value.is_finite() {
        return Err(format!("{kind} must be finite"));
    }
    let unit = unit.trim().replace('·', "*");
    let scale = units
        .iter()
        .find(|(u, _)| *u == unit)
        .map(|(_, s)| *s)
        .ok_or_else(|| format!("unknown {kind} unit `{unit}`, expected one of {}", unit_list(units)))?;
    Ok(if scale == 1.0 { value } else { value * scale })
}

fn unit_list(units: &[(&str, f64)]) -> String {
    units.iter().map(|(u, _)| *u).collect::<Vec<_>>().join(", ")
}

macro_rules! quantity {
    ($(#[$doc:meta])* $name:ident, $kind:literal, [$(($unit:literal, $scale:expr)),+ $(,)?]) => {
        $(#[$doc])*
        #[derive(Debug, Clone, Copy, PartialEq)]
        pub struct $name(pub f64);

        impl $name {
            const UNITS: &'static [(&'static str, f64)] = &[$(($unit, $scale)),+];

            /// Unit used when printing.
            pub fn unit() -> &'static str {
                Self::UNITS[0].0
            }

            pub fn parse(text: &str) -> Result<Self, String> {
                parse_quantity(text, $kind, Self::UNITS).map(Self)
            }
        }

        impl std::fmt::Display for $name {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                write!(f, "{} {}", self.0, Self::unit())
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let text = String::deserialize(d)?;
                Self::parse(&text).map_err(serde::de::Error::custom)
            }
        }
    };
}

quantity!(
    /// Length, printed in mm.
    Length, "length", [("mm", 1.0), ("um", 1e-3), ("cm", 10.0), ("m", 1e3), ("in", 25.4)]
);
quantity!(
    /// Elastic modulus, printed in GPa.
    Modulus, "modulus", [("GPa", 1.0), ("MPa", 1e-3)]
);
quantity!(
    /// Second moment of area, printed in mm^4.
    SecondMoment, "second moment", [("mm^4", 1.0), ("m^4", 1e12)]
);
quantity!(
    /// Force, printed in N.
    Force, "force", [("N", 1.0), ("mN", 1e-3), ("gf", NEWTONS_PER_GF), ("lbf", NEWTONS_PER_LBF)]
);
quantity!(
    /// Torque, printed in N*mm.
    Torque, "torque", [("N*mm", 1.0), ("mN*m", 1.0), ("N*m", 1e3)]
);
