//! JSON documents for states, embeddings and unitaries.
//!
//! ```json
//! { "type": "gp_finite", "n": 2, "k": 2, "z": [[0.7071, 0], [0.7071, 0], [0, 0]] }
//! { "type": "cuntz", "n": 2, "z": [[0.6, 0], [0, 0.8]] }
//! { "type": "gp_infinite", "n": 2, "family": "none", "z": [[0.6, 0]], "tail_bound": 0.64 }
//! { "type": "gp_infinite", "n": 2, "family": "geometric", "family_args": { "seed": [[0.6, 0], [0.8, 0]] } }
//! { "type": "gp_infinite", "n": 2, "family": "zeta", "family_args": { "x": 2.0 } }
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::embedding::{GpEmbedding, Order};
use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::params::{CuntzParam, FiniteGpParam, GpState, L2Family, L2GpParam};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateType {
    GpFinite,
    GpInfinite,
    Cuntz,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyTag {
    None,
    Geometric,
    Zeta,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyArgs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    #[serde(rename = "type")]
    pub kind: StateType,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub z: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyTag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family_args: Option<FamilyArgs>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_bound: Option<f64>,
}

fn to_complex(v: &[[f64; 2]]) -> Vec<Complex64> {
    v.iter().map(|&[re, im]| Complex64::new(re, im)).collect()
}

fn from_complex(v: &[Complex64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

impl StateSpec {
    pub fn to_state(&self) -> Result<GpState<f64>> {
        let z = to_complex(&self.z);
        match self.kind {
            StateType::GpFinite => {
                let k = self
                    .k
                    .ok_or_else(|| Error::Parse("gp_finite requires \"k\"".into()))?;
                Ok(GpState::Finite(FiniteGpParam::new(self.n, k, z)?))
            }
            StateType::Cuntz => Ok(GpState::Cuntz(CuntzParam::new(self.n, z)?)),
            StateType::GpInfinite => {
                let args = self.family_args.clone().unwrap_or_default();
                let p = match self.family.unwrap_or(FamilyTag::None) {
                    FamilyTag::None => {
                        let bound = self.tail_bound.ok_or_else(|| {
                            Error::Parse("family \"none\" requires \"tail_bound\"".into())
                        })?;
                        L2GpParam::explicit(self.n, z, bound)?
                    }
                    FamilyTag::Geometric => {
                        let seed = args.seed.ok_or_else(|| {
                            Error::Parse("geometric family requires family_args.seed".into())
                        })?;
                        L2GpParam::geometric(self.n, to_complex(&seed))?
                    }
                    FamilyTag::Zeta => {
                        if self.n != 2 {
                            return Err(Error::InvalidParameter("zeta family lives on O_2".into()));
                        }
                        let x = args.x.ok_or_else(|| {
                            Error::Parse("zeta family requires family_args.x".into())
                        })?;
                        let [re, im] = args.phase.unwrap_or([1.0, 0.0]);
                        L2GpParam::zeta(x, Complex64::new(re, im))?
                    }
                };
                Ok(GpState::Infinite(p))
            }
        }
    }

    pub fn from_state(state: &GpState<f64>) -> StateSpec {
        let base = StateSpec {
            kind: StateType::Cuntz,
            n: state.n(),
            k: None,
            z: Vec::new(),
            family: None,
            family_args: None,
            tail_bound: None,
        };
        match state {
            GpState::Cuntz(y) => StateSpec {
                z: from_complex(y.y()),
                ..base
            },
            GpState::Finite(p) => StateSpec {
                kind: StateType::GpFinite,
                k: Some(p.k()),
                z: from_complex(p.z()),
                ..base
            },
            GpState::Infinite(p) => {
                let mut spec = StateSpec {
                    kind: StateType::GpInfinite,
                    ..base
                };
                match p.family() {
                    L2Family::Explicit {
                        prefix,
                        tail_norm_sq_bound,
                    } => {
                        spec.family = Some(FamilyTag::None);
                        spec.z = from_complex(prefix);
                        spec.tail_bound = Some(*tail_norm_sq_bound);
                    }
                    L2Family::Geometric { seed } => {
                        spec.family = Some(FamilyTag::Geometric);
                        spec.family_args = Some(FamilyArgs {
                            seed: Some(from_complex(seed)),
                            ..FamilyArgs::default()
                        });
                    }
                    L2Family::Zeta { x, phase, .. } => {
                        spec.family = Some(FamilyTag::Zeta);
                        spec.family_args = Some(FamilyArgs {
                            x: Some(*x),
                            phase: Some([phase.re, phase.im]),
                            ..FamilyArgs::default()
                        });
                    }
                }
                spec
            }
        }
    }
}

pub fn parse_state(text: &str) -> Result<GpState<f64>> {
    let spec: StateSpec = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    spec.to_state()
}

pub fn emit_state(state: &GpState<f64>) -> String {
    serde_json::to_string(&StateSpec::from_state(state)).expect("spec serializes")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OrderSpec {
    Finite(usize),
    Named(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingSpec {
    pub n: usize,
    pub order: OrderSpec,
}

pub fn parse_order(text: &str) -> Result<Order> {
    match text.trim() {
        "inf" | "infinite" => Ok(Order::Infinite),
        t => t.parse().map(Order::Finite).map_err(|_| {
            Error::Parse(format!(
                "order must be a positive integer or \"infinite\", got {t:?}"
            ))
        }),
    }
}

pub fn parse_embedding(text: &str) -> Result<GpEmbedding> {
    let spec: EmbeddingSpec =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let order = match spec.order {
        OrderSpec::Finite(k) => Order::Finite(k),
        OrderSpec::Named(s) => parse_order(&s)?,
    };
    GpEmbedding::new(spec.n, order)
}

/// A matrix as rows of `[re, im]` pairs.
pub fn parse_unitary(text: &str) -> Result<SquareMatrix<Complex64>> {
    let rows: Vec<Vec<[f64; 2]>> =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    SquareMatrix::from_rows(rows.iter().map(|r| to_complex(r)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::make_zeta_param;

    #[test]
    fn round_trips() {
        let docs = [
            r#"{"type":"gp_finite","n":2,"k":2,"z":[[0.6,0],[0,0.8],[0,0]]}"#,
            r#"{"type":"cuntz","n":3,"z":[[0,0],[0,1],[0,0]]}"#,
            r#"{"type":"gp_infinite","n":2,"family":"none","z":[[0.6,0]],"tail_bound":0.64}"#,
            r#"{"type":"gp_infinite","n":2,"family":"geometric","family_args":{"seed":[[0.6,0],[0.8,0]]}}"#,
            r#"{"type":"gp_infinite","n":2,"family":"zeta","family_args":{"x":2.5,"phase":[0,1]}}"#,
        ];
        for d in docs {
            let s = parse_state(d).unwrap();
            let again = parse_state(&emit_state(&s)).unwrap();
            assert_eq!(s, again, "{d}");
        }
        let z = GpState::Infinite(make_zeta_param(3.0).unwrap());
        assert_eq!(parse_state(&emit_state(&z)).unwrap(), z);
    }

    #[test]
    fn rejects_malformed() {
        assert!(matches!(
            parse_state(r#"{"type":"gp_finite","n":2,"k":2,"z":[[1,0],[1,0],[0,0]]}"#),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            parse_state(r#"{"type":"gp_finite","n":2,"z":[]}"#),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            parse_state(r#"{"type":"weird","n":2}"#),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            parse_state(r#"{"type":"cuntz","n":2,"z":[[1,0],[0,0]],"extra":1}"#),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn embeddings_and_unitaries() {
        assert_eq!(
            parse_embedding(r#"{"n":3,"order":2}"#).unwrap(),
            GpEmbedding::finite(3, 2).unwrap()
        );
        assert_eq!(
            parse_embedding(r#"{"n":2,"order":"infinite"}"#).unwrap(),
            GpEmbedding::infinite(2).unwrap()
        );
        assert!(parse_embedding(r#"{"n":2,"order":"many"}"#).is_err());
        let g = parse_unitary("[[[0,0],[1,0]],[[1,0],[0,0]]]").unwrap();
        assert_eq!(g.dim(), 2);
    }
}
