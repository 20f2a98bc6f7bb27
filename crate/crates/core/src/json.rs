//! JSON document formats read and written by the command-line tool.
//!
//! Laws: `{"atoms":[{"v":-1,"p":0.5},…]}` or `{"uniform":[…]}`.
//! Capacities are tagged by `kind`; explicit tables key subsets by
//! bitmask, written in decimal or as `0b…` (bit `i` is atom `i`).

use std::collections::BTreeMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::capacities::{Capacity, PiecewiseLinear, Subset};
use crate::collapse::{Expectation, ExpectedShortfall, Functional, Negated, PhiExample, RhoExample};
use crate::error::{Error, Result};
use crate::laws::{DiscreteLaw, UniformSample};
use crate::optimizer::{DomainSpec, FeasibleQuadruple};
use crate::riskmeasures::{ConsistentRiskMeasure, LawInvariantSet};

pub const SCHEMA: &str = "1";

pub fn read_doc<D: DeserializeOwned>(path: impl AsRef<Path>) -> Result<D> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct AtomDoc {
    pub v: f64,
    pub p: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged, deny_unknown_fields)]
pub enum LawDoc {
    Atoms { atoms: Vec<AtomDoc> },
    Uniform { uniform: Vec<f64> },
}

impl LawDoc {
    pub fn to_law(&self) -> Result<DiscreteLaw<f64>> {
        match self {
            LawDoc::Atoms { atoms } => DiscreteLaw::new(atoms.iter().map(|a| (a.v, a.p))),
            LawDoc::Uniform { uniform } => DiscreteLaw::uniform(uniform),
        }
    }

    pub fn from_law(law: &DiscreteLaw<f64>) -> Self {
        LawDoc::Atoms {
            atoms: law.atoms().map(|(v, p)| AtomDoc { v, p }).collect(),
        }
    }

    /// The atoms in listed order, when given as a uniform sample.
    pub fn to_sample(&self) -> Result<UniformSample<f64>> {
        match self {
            LawDoc::Uniform { uniform } => UniformSample::new(uniform.clone()),
            LawDoc::Atoms { .. } => Err(Error::Parse("expected {\"uniform\":[…]} for a sample".into())),
        }
    }
}

fn laws(docs: &[LawDoc]) -> Result<Vec<DiscreteLaw<f64>>> {
    docs.iter().map(LawDoc::to_law).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CapacityDoc {
    Distortion { n: usize, knots: Vec<[f64; 2]> },
    Densities { n: Option<usize>, d: Vec<Vec<f64>> },
    Jp { alpha: f64, nu: Box<CapacityDoc> },
    Explicit { n: usize, values: BTreeMap<String, f64> },
    Dual { of: Box<CapacityDoc> },
}

fn parse_subset(key: &str) -> Result<Subset> {
    let parsed = match key.strip_prefix("0b") {
        Some(bits) => Subset::from_str_radix(bits, 2),
        None => key.parse(),
    };
    parsed.map_err(|_| Error::Parse(format!("bad subset key {key:?}")))
}

impl CapacityDoc {
    pub fn to_capacity(&self) -> Result<Capacity<f64>> {
        match self {
            CapacityDoc::Distortion { n, knots } => {
                let t = PiecewiseLinear::new(knots.iter().map(|k| (k[0], k[1])).collect())?;
                Capacity::distortion(*n, t)
            }
            CapacityDoc::Densities { n, d } => {
                let n = n.or_else(|| d.first().map(Vec::len)).unwrap_or(0);
                Capacity::densities(n, d.clone())
            }
            CapacityDoc::Jp { alpha, nu } => Capacity::jp(nu.to_capacity()?, *alpha),
            CapacityDoc::Explicit { n, values } => {
                let pairs = values
                    .iter()
                    .map(|(k, &v)| parse_subset(k).map(|a| (a, v)))
                    .collect::<Result<Vec<_>>>()?;
                Capacity::explicit(*n, pairs)
            }
            CapacityDoc::Dual { of } => Ok(of.to_capacity()?.dual()),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GeneratorsDoc {
    pub generators: Vec<LawDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CrmDoc {
    pub crm: GeneratorsDoc,
}

impl CrmDoc {
    pub fn to_crm(&self) -> Result<ConsistentRiskMeasure<f64>> {
        ConsistentRiskMeasure::new(laws(&self.crm.generators)?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SetBody {
    pub generators: Vec<LawDoc>,
    #[serde(default)]
    pub rays: Vec<LawDoc>,
    #[serde(default)]
    pub increasing: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SetDoc {
    pub set: SetBody,
}

impl SetDoc {
    pub fn to_set(&self) -> Result<LawInvariantSet<f64>> {
        LawInvariantSet::new(laws(&self.set.generators)?, laws(&self.set.rays)?, self.set.increasing)
    }
}

/// Objective or functional. Risk measures are losses; wrap them in
/// `negated` to maximise `-ρ(-X)`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PhiDoc {
    Mean,
    Es { p: f64 },
    Crm { generators: Vec<LawDoc> },
    Rho,
    PhiExample,
    Negated { of: Box<PhiDoc> },
}

impl PhiDoc {
    pub fn to_functional(&self) -> Result<Box<dyn Functional<f64>>> {
        Ok(match self {
            PhiDoc::Mean => Box::new(Expectation),
            PhiDoc::Es { p } => Box::new(ExpectedShortfall::new(*p)?),
            PhiDoc::Crm { generators } => Box::new(ConsistentRiskMeasure::new(laws(generators)?)?),
            PhiDoc::Rho => Box::new(RhoExample),
            PhiDoc::PhiExample => Box::new(PhiExample),
            PhiDoc::Negated { of } => Box::new(Negated(of.to_functional()?)),
        })
    }
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DomainDoc {
    Rearrangement {
        generators: Vec<LawDoc>,
        #[serde(default)]
        allow_shift: bool,
        #[serde(default = "default_true")]
        increasing: bool,
    },
    Interval { a: f64, b: f64 },
    MeanHalfSpace { bound: f64 },
    PreferenceBounded { top: LawDoc },
}

impl DomainDoc {
    pub fn to_domain(&self) -> Result<DomainSpec<f64>> {
        match self {
            DomainDoc::Rearrangement {
                generators,
                allow_shift,
                increasing,
            } => DomainSpec::rearrangement_closure(laws(generators)?, *allow_shift, *increasing),
            DomainDoc::Interval { a, b } => DomainSpec::interval(*a, *b),
            DomainDoc::MeanHalfSpace { bound } => Ok(DomainSpec::MeanHalfSpace { bound: *bound }),
            DomainDoc::PreferenceBounded { top } => Ok(DomainSpec::PreferenceBounded { top: top.to_law()? }),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProblemDoc {
    pub phi: PhiDoc,
    pub domain: DomainDoc,
    pub d: Vec<f64>,
    pub p: f64,
}

impl ProblemDoc {
    pub fn to_quadruple(&self) -> Result<FeasibleQuadruple<f64>> {
        FeasibleQuadruple::new(
            self.phi.to_functional()?,
            self.domain.to_domain()?,
            UniformSample::new(self.d.clone())?,
            self.p,
        )
    }
}
