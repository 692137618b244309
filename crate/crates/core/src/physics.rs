//! Physical constants and the Landauer erasure bound.
//!
//! Erasing one bit of information into a heat sink at temperature `T`
//! dissipates at least `k_B · T · ln 2` joules. Every energy figure in the
//! crate is a bit count pushed through [`erasure_energy`].

use serde::{Deserialize, Serialize};

use crate::error::{domain, ensure_non_negative, Result};

/// Boltzmann constant, J/K (exact since the 2019 SI redefinition).
pub const BOLTZMANN_K: f64 = 1.380649e-23;

/// Natural logarithm of 2.
pub const LN_2: f64 = std::f64::consts::LN_2;

/// Room temperature used as the default heat sink.
pub const ROOM_TEMPERATURE_K: f64 = 293.0;

/// Heat-sink temperature in kelvin. Always strictly positive and finite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct TemperatureK(f64);

impl TemperatureK {
    pub fn new(kelvin: f64) -> Result<Self> {
        if kelvin.is_finite() && kelvin > 0.0 {
            Ok(Self(kelvin))
        } else {
            Err(domain(format!(
                "temperature must be positive and finite, got {kelvin} K"
            )))
        }
    }

    pub fn room() -> Self {
        Self(ROOM_TEMPERATURE_K)
    }

    pub fn kelvin(self) -> f64 {
        self.0
    }
}

impl Default for TemperatureK {
    fn default() -> Self {
        Self::room()
    }
}

impl TryFrom<f64> for TemperatureK {
    type Error = crate::error::ModelError;

    fn try_from(kelvin: f64) -> Result<Self> {
        Self::new(kelvin)
    }
}

impl From<TemperatureK> for f64 {
    fn from(t: TemperatureK) -> f64 {
        t.0
    }
}

/// Bits erased at a given temperature and the minimum energy that costs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErasureLedger {
    pub bits_erased: f64,
    pub temperature: TemperatureK,
    pub energy_joules: f64,
}

/// Minimum energy to erase a single bit, `k_B · T · ln 2`, in joules.
pub fn landauer_bit_energy(temperature: TemperatureK) -> f64 {
    BOLTZMANN_K * temperature.kelvin() * LN_2
}

/// Landauer minimum for erasing `bits` bits. Bit counts are real-valued
/// because per-gate erasure is fractional (0.625 bits per NAND gate).
pub fn erasure_energy(bits: f64, temperature: TemperatureK) -> Result<ErasureLedger> {
    let bits = ensure_non_negative("bits erased", bits)?;
    Ok(ErasureLedger {
        bits_erased: bits,
        temperature,
        energy_joules: bits * landauer_bit_energy(temperature),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn t(k: f64) -> TemperatureK {
        TemperatureK::new(k).unwrap()
    }

    #[test]
    fn bit_energy_at_room_temperature() {
        // 1.380649e-23 * 293 * 0.6931471805599453, by hand
        assert_relative_eq!(
            landauer_bit_energy(t(293.0)),
            2.804e-21,
            max_relative = 1e-3
        );
        assert_relative_eq!(
            landauer_bit_energy(t(300.0)),
            2.871e-21,
            max_relative = 1e-3
        );
    }

    #[test]
    fn bit_energy_is_linear_in_temperature() {
        assert_relative_eq!(
            landauer_bit_energy(t(586.0)),
            2.0 * landauer_bit_energy(t(293.0)),
            max_relative = 1e-15
        );
    }

    #[test]
    fn rejects_bad_temperatures() {
        for k in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(TemperatureK::new(k).is_err(), "{k}");
        }
    }

    #[test]
    fn erasure_energy_of_published_block() {
        let ledger = erasure_energy(4.72e20, t(293.0)).unwrap();
        assert_relative_eq!(ledger.energy_joules, 1.324, max_relative = 1e-3);
        let out = erasure_energy(512.0, t(293.0)).unwrap();
        assert_relative_eq!(out.energy_joules, 1.4336e-18, max_relative = 1e-2);
        assert_eq!(erasure_energy(0.0, t(293.0)).unwrap().energy_joules, 0.0);
    }

    #[test]
    fn erasure_energy_rejects_negative_bits() {
        assert!(erasure_energy(-1.0, TemperatureK::room()).is_err());
        assert!(erasure_energy(f64::NAN, TemperatureK::room()).is_err());
    }

    #[test]
    fn temperature_deserializes_with_validation() {
        let ok: TemperatureK = serde_json::from_str("300.5").unwrap();
        assert_eq!(ok.kelvin(), 300.5);
        assert!(serde_json::from_str::<TemperatureK>("-3").is_err());
    }

    proptest::proptest! {
        #[test]
        fn erasure_is_additive_and_linear(a in 0.0f64..1e24, b in 0.0f64..1e24, k in 1.0f64..1e4) {
            let temp = t(k);
            let ea = erasure_energy(a, temp).unwrap().energy_joules;
            let eb = erasure_energy(b, temp).unwrap().energy_joules;
            let eab = erasure_energy(a + b, temp).unwrap().energy_joules;
            proptest::prop_assert!((eab - (ea + eb)).abs() <= 1e-12 * eab.max(f64::MIN_POSITIVE));
            if a > 0.0 {
                let per_bit = ea / a;
                proptest::prop_assert!((per_bit / landauer_bit_energy(temp) - 1.0).abs() <= 1e-12);
            }
            let doubled = erasure_energy(a, t(2.0 * k)).unwrap().energy_joules;
            proptest::prop_assert!((doubled - 2.0 * ea).abs() <= 1e-12 * doubled.max(f64::MIN_POSITIVE));
        }
    }
}
