//! Classical ASIC miner model: erasures per hash, Landauer minimum per
//! block, attribution of network energy to a single device, and the
//! actual-to-ideal efficiency ratio.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{check_positive_field, ensure_positive, invalid, ModelError, Result};
use crate::physics::{erasure_energy, ErasureLedger, TemperatureK};

/// Terahashes to hashes.
pub const TERA: f64 = 1e12;

/// Characteristics of one classical mining device.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsicSpec {
    pub hashrate_th_per_s: f64,
    pub nameplate_power_w: f64,
    /// Manufacturer figure already expressed as joules per block.
    pub nameplate_energy_per_block_j: f64,
    pub nand_per_hash: u64,
    pub bits_per_nand: f64,
    /// Replaces the computed bits-per-block when set.
    pub bits_per_block_override: Option<f64>,
}

impl AsicSpec {
    pub fn validate(&self) -> Result<()> {
        check_positive_field("hashrate_th_per_s", self.hashrate_th_per_s)?;
        check_positive_field("nameplate_power_w", self.nameplate_power_w)?;
        check_positive_field(
            "nameplate_energy_per_block_j",
            self.nameplate_energy_per_block_j,
        )?;
        if self.nand_per_hash == 0 {
            return Err(invalid("nand_per_hash", "must be a positive integer"));
        }
        check_positive_field("bits_per_nand", self.bits_per_nand)?;
        if let Some(bits) = self.bits_per_block_override {
            if !(bits.is_finite() && bits >= 0.0) {
                return Err(invalid(
                    "bits_per_block_override",
                    format!("must be non-negative and finite, got {bits}"),
                ));
            }
        }
        Ok(())
    }
}

/// Blockchain-wide parameters at one point in time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSnapshot {
    pub difficulty: f64,
    pub network_hashrate_th_per_s: f64,
    pub block_time_s: f64,
    pub network_energy_per_block_j: f64,
    pub max_target: BigUint,
    /// Hash output width; the search space is `2^search_space_bits`.
    pub search_space_bits: u32,
    pub annual_consumption_twh: Option<f64>,
}

impl NetworkSnapshot {
    pub fn validate(&self) -> Result<()> {
        check_positive_field("difficulty", self.difficulty)?;
        check_positive_field("network_hashrate_th_per_s", self.network_hashrate_th_per_s)?;
        check_positive_field("block_time_s", self.block_time_s)?;
        check_positive_field(
            "network_energy_per_block_j",
            self.network_energy_per_block_j,
        )?;
        if self.search_space_bits == 0 || self.search_space_bits > 256 {
            return Err(invalid(
                "search_space_bits",
                format!("must be in 1..=256, got {}", self.search_space_bits),
            ));
        }
        if self.max_target.is_zero() {
            return Err(invalid("max_target", "must be positive"));
        }
        if self.max_target >= BigUint::one() << 256u32 {
            return Err(invalid("max_target", "must be below 2^256"));
        }
        if let Some(twh) = self.annual_consumption_twh {
            check_positive_field("annual_consumption_twh", twh)?;
        }
        Ok(())
    }

    /// Size of the nonce/hash search space, `2^search_space_bits`.
    pub fn search_space(&self) -> BigUint {
        BigUint::one() << self.search_space_bits
    }
}

/// Ratio of a device's actual energy to its Landauer minimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyRatio {
    pub actual_j: f64,
    pub landauer_j: f64,
    pub ratio: f64,
}

impl EfficiencyRatio {
    /// Below 1 the device would beat the Landauer bound.
    pub fn is_physical(&self) -> bool {
        self.ratio >= 1.0
    }
}

/// How the real energy of one device per block is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EnergyMethod {
    /// Device's share of the whole network's per-block energy. With `share`
    /// unset the share is `hashrate / network_hashrate`.
    NetworkAttribution { share: Option<f64> },
    /// Manufacturer's per-block figure.
    Nameplate,
}

impl FromStr for EnergyMethod {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "network-attribution" | "network" => Ok(Self::NetworkAttribution { share: None }),
            "nameplate" => Ok(Self::Nameplate),
            other => Err(ModelError::Domain(format!(
                "unknown energy method `{other}` (expected network-attribution or nameplate)"
            ))),
        }
    }
}

impl fmt::Display for EnergyMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NetworkAttribution { .. } => f.write_str("network-attribution"),
            Self::Nameplate => f.write_str("nameplate"),
        }
    }
}

/// Hashes one device computes in a block interval.
pub fn hashes_per_block(spec: &AsicSpec, snap: &NetworkSnapshot) -> f64 {
    spec.hashrate_th_per_s * TERA * snap.block_time_s
}

pub fn bits_erased_per_hash(spec: &AsicSpec) -> f64 {
    spec.nand_per_hash as f64 * spec.bits_per_nand
}

/// Landauer minimum for one block interval of the device.
pub fn classical_landauer_per_block(
    spec: &AsicSpec,
    snap: &NetworkSnapshot,
    temperature: TemperatureK,
) -> Result<ErasureLedger> {
    let bits = spec
        .bits_per_block_override
        .unwrap_or_else(|| hashes_per_block(spec, snap) * bits_erased_per_hash(spec));
    erasure_energy(bits, temperature)
}

/// Fraction of the network hash rate the device provides.
pub fn network_share(spec: &AsicSpec, snap: &NetworkSnapshot) -> f64 {
    spec.hashrate_th_per_s / snap.network_hashrate_th_per_s
}

pub fn actual_energy_per_block(
    spec: &AsicSpec,
    snap: &NetworkSnapshot,
    method: EnergyMethod,
) -> Result<f64> {
    match method {
        EnergyMethod::NetworkAttribution { share } => {
            let share = share.unwrap_or_else(|| network_share(spec, snap));
            if !(share.is_finite() && share >= 0.0) {
                return Err(ModelError::Domain(format!(
                    "network share must be non-negative, got {share}"
                )));
            }
            Ok(snap.network_energy_per_block_j * share)
        }
        EnergyMethod::Nameplate => Ok(spec.nameplate_energy_per_block_j),
    }
}

pub fn efficiency_ratio(actual_j: f64, landauer_j: f64) -> Result<EfficiencyRatio> {
    ensure_positive("actual energy", actual_j)?;
    ensure_positive("Landauer energy", landauer_j)?;
    Ok(EfficiencyRatio {
        actual_j,
        landauer_j,
        ratio: actual_j / landauer_j,
    })
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hashes_in_a_ten_minute_block() {
        let snap = network();
        assert_relative_eq!(
            hashes_per_block(&s19xp(None), &snap),
            8.4e16,
            max_relative = 1e-12
        );
        let slow = AsicSpec {
            hashrate_th_per_s: 0.001,
            ..s19xp(None)
        };
        assert_relative_eq!(hashes_per_block(&slow, &snap), 6e11, max_relative = 1e-12);
    }

    #[test]
    fn zero_block_time_is_rejected() {
        let snap = NetworkSnapshot {
            block_time_s: 0.0,
            ..network()
        };
        let err = snap.validate().unwrap_err();
        assert!(err.to_string().contains("block_time_s"), "{err}");
    }

    #[test]
    fn oversized_max_target_is_rejected() {
        let snap = NetworkSnapshot {
            max_target: BigUint::one() << 256u32,
            ..network()
        };
        assert!(snap.validate().is_err());
    }

    #[test]
    fn erasures_per_hash() {
        assert_eq!(bits_erased_per_hash(&s19xp(None)), 5367.5);
        let one = AsicSpec {
            nand_per_hash: 1,
            ..s19xp(None)
        };
        assert_eq!(bits_erased_per_hash(&one), 0.625);
        let unit = AsicSpec {
            bits_per_nand: 1.0,
            ..s19xp(None)
        };
        assert_eq!(bits_erased_per_hash(&unit), 8588.0);
    }

    #[test]
    fn landauer_per_block_with_and_without_override() {
        let snap = network();
        let t = TemperatureK::room();
        let quoted = classical_landauer_per_block(&s19xp(Some(4.72e20)), &snap, t).unwrap();
        assert_relative_eq!(quoted.energy_joules, 1.324, max_relative = 1e-3);

        let derived = classical_landauer_per_block(&s19xp(None), &snap, t).unwrap();
        assert_relative_eq!(derived.bits_erased, 8.4e16 * 5367.5, max_relative = 1e-12);
        assert_relative_eq!(derived.energy_joules, 1.264, max_relative = 1e-3);

        let zero = classical_landauer_per_block(&s19xp(Some(0.0)), &snap, t).unwrap();
        assert_eq!(zero.energy_joules, 0.0);
    }

    #[test]
    fn share_of_network() {
        let snap = network();
        assert_relative_eq!(
            network_share(&s19xp(None), &snap),
            6.965e-7,
            max_relative = 1e-3
        );
        let doubled = NetworkSnapshot {
            network_hashrate_th_per_s: 402e6,
            ..network()
        };
        assert_relative_eq!(
            network_share(&s19xp(None), &doubled),
            3.48e-7,
            max_relative = 1e-3
        );
        let whole = NetworkSnapshot {
            network_hashrate_th_per_s: 140.0,
            ..network()
        };
        assert_eq!(network_share(&s19xp(None), &whole), 1.0);
    }

    #[test]
    fn actual_energy_methods() {
        let snap = network();
        let spec = s19xp(None);
        let attributed = actual_energy_per_block(
            &spec,
            &snap,
            EnergyMethod::NetworkAttribution {
                share: Some(7.0e-7),
            },
        )
        .unwrap();
        assert_relative_eq!(attributed, 2258.69, max_relative = 1e-9);
        assert_eq!(
            actual_energy_per_block(&spec, &snap, EnergyMethod::Nameplate).unwrap(),
            502.0
        );
        assert_eq!(
            actual_energy_per_block(
                &spec,
                &snap,
                EnergyMethod::NetworkAttribution { share: Some(0.0) }
            )
            .unwrap(),
            0.0
        );
    }

    #[test]
    fn unknown_method_is_a_usage_error() {
        assert!("nameplate".parse::<EnergyMethod>().is_ok());
        assert!("magic".parse::<EnergyMethod>().is_err());
    }

    #[test]
    fn efficiency_ratios() {
        let r = efficiency_ratio(2258.69, 1.324).unwrap();
        assert_relative_eq!(r.ratio, 1706.0, max_relative = 1e-3);
        let r = efficiency_ratio(502.0, 1.324).unwrap();
        assert_relative_eq!(r.ratio, 379.0, max_relative = 1e-3);
        assert_eq!(efficiency_ratio(3.5, 3.5).unwrap().ratio, 1.0);
        assert!(efficiency_ratio(0.0, 1.0).is_err());
        assert!(efficiency_ratio(1.0, -1.0).is_err());
        assert!(!efficiency_ratio(0.5, 1.0).unwrap().is_physical());
    }

    proptest::proptest! {
        #[test]
        fn ratio_times_landauer_recovers_actual(a in 1e-30f64..1e30, b in 1e-30f64..1e30) {
            let r = efficiency_ratio(a, b).unwrap();
            proptest::prop_assert!((r.ratio * b / a - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn attribution_is_linear(share in 0.0f64..1.0, energy in 1.0f64..1e12, k in 0.1f64..10.0) {
            let spec = s19xp(None);
            let snap = NetworkSnapshot { network_energy_per_block_j: energy, ..network() };
            let base = actual_energy_per_block(&spec, &snap, EnergyMethod::NetworkAttribution { share: Some(share) }).unwrap();
            let scaled_share = actual_energy_per_block(&spec, &snap, EnergyMethod::NetworkAttribution { share: Some(share * k) }).unwrap();
            let snap_k = NetworkSnapshot { network_energy_per_block_j: energy * k, ..network() };
            let scaled_energy = actual_energy_per_block(&spec, &snap_k, EnergyMethod::NetworkAttribution { share: Some(share) }).unwrap();
            let tol = 1e-12 * (base * k).max(f64::MIN_POSITIVE);
            proptest::prop_assert!((scaled_share - base * k).abs() <= tol);
            proptest::prop_assert!((scaled_energy - base * k).abs() <= tol);
        }

        #[test]
        fn share_is_a_fraction(own in 1e-6f64..1e3, extra in 0.0f64..1e9) {
            let spec = AsicSpec { hashrate_th_per_s: own, ..s19xp(None) };
            let snap = NetworkSnapshot { network_hashrate_th_per_s: own + extra, ..network() };
            let share = network_share(&spec, &snap);
            proptest::prop_assert!(share > 0.0 && share <= 1.0);
        }
    }
}
