//! Versioned JSON documents for constructed rules.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cbc::CbcTrace;
use crate::error::{Result, RqmcError};
use crate::gfpoly::GFPoly;
use crate::korobov::{LatticeRule, Weights};
use crate::walsh::PolyLatticeRule;

pub const SCHEMA: &str = "rqmc/1";

/// Construction inputs recorded next to a rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub tau: f64,
    pub alpha: f64,
    pub weights: Weights,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeDocument {
    pub schema: String,
    #[serde(rename = "N")]
    pub n: u64,
    pub z: Vec<u64>,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(flatten)]
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<CbcTrace>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyLatticeDocument {
    pub schema: String,
    pub b: u32,
    pub m: usize,
    /// Coefficients `p_0,p_1,...` in ascending degree.
    pub p: String,
    pub q: Vec<String>,
    #[serde(flatten)]
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<CbcTrace>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum RuleDocument {
    #[serde(rename = "lattice")]
    Lattice(LatticeDocument),
    #[serde(rename = "polylattice")]
    PolyLattice(PolyLatticeDocument),
}

/// A rule of either kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Rule {
    Lattice(LatticeRule),
    PolyLattice(PolyLatticeRule),
}

impl Rule {
    pub fn dim(&self) -> usize {
        match self {
            Rule::Lattice(r) => r.dim(),
            Rule::PolyLattice(r) => r.dim(),
        }
    }
}

impl RuleDocument {
    pub fn lattice(rule: &LatticeRule, m: Option<u64>, provenance: Provenance, trace: Option<CbcTrace>) -> Self {
        RuleDocument::Lattice(LatticeDocument {
            schema: SCHEMA.into(),
            n: rule.n,
            z: rule.z.clone(),
            m,
            provenance,
            trace,
        })
    }

    pub fn poly_lattice(rule: &PolyLatticeRule, provenance: Provenance, trace: Option<CbcTrace>) -> Self {
        RuleDocument::PolyLattice(PolyLatticeDocument {
            schema: SCHEMA.into(),
            b: rule.base,
            m: rule.m,
            p: rule.p.to_coeff_string(),
            q: rule.q.iter().map(GFPoly::to_coeff_string).collect(),
            provenance,
            trace,
        })
    }

    pub fn provenance(&self) -> &Provenance {
        match self {
            RuleDocument::Lattice(d) => &d.provenance,
            RuleDocument::PolyLattice(d) => &d.provenance,
        }
    }

    /// The validated rule.
    pub fn rule(&self) -> Result<Rule> {
        let schema = match self {
            RuleDocument::Lattice(d) => &d.schema,
            RuleDocument::PolyLattice(d) => &d.schema,
        };
        if schema != SCHEMA {
            return Err(RqmcError::InvalidRule(format!("schema {schema:?}, expected {SCHEMA:?}")));
        }
        match self {
            RuleDocument::Lattice(d) => Ok(Rule::Lattice(LatticeRule::new(d.n, d.z.clone())?)),
            RuleDocument::PolyLattice(d) => {
                let p = GFPoly::parse(d.b, &d.p)?;
                let q = d.q.iter().map(|t| GFPoly::parse(d.b, t)).collect::<Result<Vec<_>>>()?;
                let rule = PolyLatticeRule::new(p, q)?;
                if rule.m != d.m {
                    return Err(RqmcError::InvalidRule(format!("m = {} but deg(p) = {}", d.m, rule.m)));
                }
                Ok(Rule::PolyLattice(rule))
            }
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| RqmcError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cbc::{construct_lattice, construct_poly_lattice, RandomSource};
    use crate::korobov::SpaceParams;

    fn prov() -> Provenance {
        Provenance { seed: 42, tau: 0.5, alpha: 2.0, weights: Weights::Poly(2.0) }
    }

    #[test]
    fn lattice_round_trip() {
        let p = SpaceParams::new(2.0, Weights::Poly(2.0), 5).unwrap();
        let (rule, trace) = construct_lattice(&p, 127, 0.5, &mut RandomSource::new(42)).unwrap();
        let doc = RuleDocument::lattice(&rule, Some(127), prov(), Some(trace));
        let text = doc.to_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["kind"], "lattice");
        assert_eq!(v["schema"], "rqmc/1");
        assert_eq!(v["N"], rule.n);
        assert_eq!(v["z"][0], 1);
        assert_eq!(v["weights"], "poly:2");
        let back = RuleDocument::from_json(&text).unwrap();
        assert_eq!(back.rule().unwrap(), Rule::Lattice(rule));
    }

    #[test]
    fn poly_round_trip() {
        let p = SpaceParams::new(1.0, Weights::Poly(1.0), 3).unwrap();
        let (rule, trace) = construct_poly_lattice(&p, 2, 6, 0.5, &mut RandomSource::new(1)).unwrap();
        let doc = RuleDocument::poly_lattice(&rule, prov(), Some(trace));
        let text = doc.to_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["kind"], "polylattice");
        assert_eq!(v["q"][0], "1");
        assert_eq!(RuleDocument::from_json(&text).unwrap().rule().unwrap(), Rule::PolyLattice(rule));
    }

    #[test]
    fn rejects_bad_documents() {
        let bad_schema = r#"{"kind":"lattice","schema":"rqmc/0","N":7,"z":[1],"seed":1,"tau":0.5,"alpha":2,"weights":"poly:2"}"#;
        assert!(RuleDocument::from_json(bad_schema).unwrap().rule().is_err());
        let bad_z = r#"{"kind":"lattice","schema":"rqmc/1","N":7,"z":[7],"seed":1,"tau":0.5,"alpha":2,"weights":"poly:2"}"#;
        assert!(RuleDocument::from_json(bad_z).unwrap().rule().is_err());
        assert!(RuleDocument::from_json(r#"{"kind":"net"}"#).is_err());
        let bad_m = r#"{"kind":"polylattice","schema":"rqmc/1","b":2,"m":4,"p":"1,1,0,1","q":["1"],"seed":1,"tau":0.5,"alpha":2,"weights":"poly:2"}"#;
        assert!(RuleDocument::from_json(bad_m).unwrap().rule().is_err());
    }
}
