//! JSON descriptors and deterministic number formatting.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::channel::{PauliChannel, PauliLiouvillian};
use crate::collision::{default_initial_state, CollisionConfig};
use crate::channel::BlochVector;
use crate::error::{Error, Result};
use crate::matcore::{CMat, C64};
use crate::pauli::PauliString;
use crate::physdil::PhysicalDilation;

/// Significant digits for printed reals.
pub const SIG_DIGITS: usize = 12;

/// Rounds to 12 significant digits; `-0` becomes `0`.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{:.*e}", SIG_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Positional notation in `[1e-4, 1e15)`, exponent notation otherwise.
pub fn fmt_real(x: f64) -> String {
    let r = round_sig(x);
    let a = r.abs();
    if r == 0.0 || (1e-4..1e15).contains(&a) || !r.is_finite() {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

pub fn json_real(x: f64) -> Value {
    json!(round_sig(x))
}

/// `[re, im]`.
pub fn json_complex(z: C64) -> Value {
    json!([round_sig(z.re), round_sig(z.im)])
}

/// Row-major nested `[re, im]` pairs.
pub fn json_matrix(m: &CMat) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array((0..m.cols()).map(|j| json_complex(m[(i, j)])).collect()))
            .collect(),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelDescriptor {
    Pauli { p: [f64; 4] },
    PhaseDamping { p: f64 },
    Depolarizing { p: f64 },
    Liouvillian { gamma: [f64; 3] },
}

impl ChannelDescriptor {
    /// The channel; a Liouvillian is evaluated at time `t`.
    pub fn to_channel(&self, t: f64) -> Result<PauliChannel> {
        match *self {
            Self::Pauli { p } => PauliChannel::new(p),
            Self::PhaseDamping { p } => {
                check_unit(p)?;
                PauliChannel::phase_damping(p)
            }
            Self::Depolarizing { p } => {
                check_unit(p)?;
                PauliChannel::depolarizing(p)
            }
            Self::Liouvillian { gamma } => PauliLiouvillian::new(gamma)?.semigroup_channel(t),
        }
    }
}

fn check_unit(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbabilities(format!("p = {p} outside [0, 1]")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuilderKind {
    PhaseDamping,
    Depolarizing,
    Generic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DilationDescriptor {
    Builder {
        builder: BuilderKind,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        a: Option<[f64; 3]>,
    },
    Hamiltonian {
        hamiltonian: Vec<(String, f64)>,
        #[serde(rename = "psiE")]
        psi_e: String,
    },
}

impl DilationDescriptor {
    pub fn to_dilation(&self) -> Result<PhysicalDilation> {
        match self {
            Self::Builder { builder, a } => match (builder, a) {
                (BuilderKind::PhaseDamping, None) => Ok(PhysicalDilation::phase_damping()),
                (BuilderKind::Depolarizing, None) => Ok(PhysicalDilation::depolarizing()),
                (BuilderKind::Generic, Some(a)) => {
                    if a.iter().any(|x| !x.is_finite()) {
                        return Err(Error::InvalidConfig("weights a must be finite".into()));
                    }
                    Ok(PhysicalDilation::generic(*a))
                }
                (BuilderKind::Generic, None) => Err(Error::InvalidConfig(
                    "generic builder needs weights \"a\"".into(),
                )),
                (_, Some(_)) => Err(Error::InvalidConfig(
                    "weights \"a\" only apply to the generic builder".into(),
                )),
            },
            Self::Hamiltonian { hamiltonian, psi_e } => {
                let terms = hamiltonian
                    .iter()
                    .map(|(s, c)| Ok((s.parse::<PauliString>()?, *c)))
                    .collect::<Result<Vec<_>>>()?;
                if terms.iter().any(|(_, c)| !c.is_finite()) {
                    return Err(Error::InvalidConfig("non-finite coefficient".into()));
                }
                PhysicalDilation::from_terms(&terms, psi_e)
            }
        }
    }
}

/// Collision study: a configuration plus optional sweep settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollisionDescriptor {
    pub a: [f64; 3],
    pub zeta: f64,
    pub dt: f64,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dts: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bloch: Option<[f64; 3]>,
}

impl CollisionDescriptor {
    pub fn config(&self) -> Result<CollisionConfig> {
        let cfg = CollisionConfig {
            a: self.a,
            zeta: self.zeta,
            dt: self.dt,
            n: self.n,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `t_final = n·dt`.
    pub fn t_final(&self) -> f64 {
        self.n as f64 * self.dt
    }

    /// Defaults to `[dt, dt/2, dt/4, dt/8]`.
    pub fn dts(&self) -> Vec<f64> {
        self.dts
            .clone()
            .unwrap_or_else(|| (0..4).map(|k| self.dt / f64::from(1 << k)).collect())
    }

    pub fn initial_state(&self) -> Result<CMat> {
        match self.bloch {
            None => Ok(default_initial_state()),
            Some(r) => {
                let b = BlochVector(r);
                if !(b.norm() <= 1.0 + 1e-12) {
                    return Err(Error::InvalidDensityMatrix(format!(
                        "Bloch vector {r:?} lies outside the unit ball"
                    )));
                }
                Ok(b.to_density())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommutantDescriptor {
    pub generators: Vec<String>,
    pub qubits: usize,
}

impl CommutantDescriptor {
    pub fn generators(&self) -> Result<Vec<PauliString>> {
        self.generators.iter().map(|s| s.parse()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(fmt_real(0.1 + 0.2), "0.3");
        assert_eq!(fmt_real(-0.0), "0");
        assert_eq!(fmt_real(-1e-300 * 1e-300), "0");
        assert_eq!(fmt_real(1.0), "1");
        assert_eq!(fmt_real(2f64.sqrt()), "1.41421356237");
        assert_eq!(fmt_real(-2.220446049250313e-16), "-2.22044604925e-16");
        assert_eq!(fmt_real(1e-4), "0.0001");
        assert_eq!(json_complex(C64::new(-0.0, 0.5)).to_string(), "[0.0,0.5]");
    }

    #[test]
    fn channel_descriptors() {
        let d: ChannelDescriptor = serde_json::from_str(r#"{"type":"phase_damping","p":0.3}"#).unwrap();
        let l = d.to_channel(1.0).unwrap().bloch_scaling();
        assert!((l[0] - 0.4).abs() < 1e-15 && l[2] == 1.0);
        let d: ChannelDescriptor =
            serde_json::from_str(r#"{"type":"liouvillian","gamma":[0,0,0.5]}"#).unwrap();
        let p = d.to_channel(1.0).unwrap().probabilities();
        assert!((p[3] - 0.5 * (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert!(serde_json::from_str::<ChannelDescriptor>(r#"{"type":"amplitude","p":0.3}"#).is_err());
        let d: ChannelDescriptor = serde_json::from_str(r#"{"type":"depolarizing","p":1.5}"#).unwrap();
        assert!(d.to_channel(0.0).is_err());
    }

    #[test]
    fn dilation_descriptors() {
        let d: DilationDescriptor =
            serde_json::from_str(r#"{"hamiltonian":[["ZX",1.0]],"psiE":"1"}"#).unwrap();
        assert_eq!(d.to_dilation().unwrap(), PhysicalDilation::phase_damping());
        let d: DilationDescriptor = serde_json::from_str(r#"{"builder":"depolarizing"}"#).unwrap();
        assert_eq!(d.to_dilation().unwrap(), PhysicalDilation::depolarizing());
        let d: DilationDescriptor =
            serde_json::from_str(r#"{"builder":"generic","a":[1,1,1]}"#).unwrap();
        assert_eq!(d.to_dilation().unwrap(), PhysicalDilation::depolarizing());
        let d: DilationDescriptor = serde_json::from_str(r#"{"builder":"generic"}"#).unwrap();
        assert!(d.to_dilation().is_err());
        let d: DilationDescriptor =
            serde_json::from_str(r#"{"hamiltonian":[["ZQ",1.0]],"psiE":"1"}"#).unwrap();
        assert!(d.to_dilation().is_err());
    }

    #[test]
    fn collision_descriptor() {
        let d: CollisionDescriptor =
            serde_json::from_str(r#"{"a":[0,0,1],"zeta":1,"dt":0.1,"n":10}"#).unwrap();
        assert_eq!(d.dts(), vec![0.1, 0.05, 0.025, 0.0125]);
        assert!((d.t_final() - 1.0).abs() < 1e-15);
        let d: CollisionDescriptor =
            serde_json::from_str(r#"{"a":[0,0,1],"zeta":1,"dt":0.1,"n":0}"#).unwrap();
        assert!(d.config().is_err());
    }
}
