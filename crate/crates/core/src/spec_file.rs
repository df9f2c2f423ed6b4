//! JSON domain-spec files and point strings.
//!
//! ```json
//! { "factors": [
//!     { "kind": "annulus", "r": 0.25 },
//!     { "kind": "punctured_disk", "punctures": [[0.0, 0.0], [0.5, 0.0]] },
//!     { "kind": "disk" },
//!     { "kind": "ball", "n": 2 }
//! ] }
//! ```

use std::path::Path;

use num_complex::Complex64 as C64;
use serde::Deserialize;

use crate::domains::{BallFactor, Factor, PlanarFactor, ProductDomain};
use crate::error::{Error, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainSpecFile {
    factors: Vec<FactorSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FactorSpec {
    kind: String,
    punctures: Option<Vec<[f64; 2]>>,
    r: Option<f64>,
    n: Option<usize>,
}

impl FactorSpec {
    fn into_factor(self, i: usize) -> Result<Factor> {
        let field_err = |field: &str, msg: String| Error::Parse(format!("factors[{i}].{field}: {msg}"));
        let forbid = |field: &str, present: bool| {
            if present {
                Err(field_err(field, format!("not allowed for kind {:?}", self.kind)))
            } else {
                Ok(())
            }
        };
        let factor = match self.kind.as_str() {
            "disk" => {
                forbid("punctures", self.punctures.is_some())?;
                forbid("r", self.r.is_some())?;
                forbid("n", self.n.is_some())?;
                PlanarFactor::unit_disk().into()
            }
            "punctured_disk" => {
                forbid("r", self.r.is_some())?;
                forbid("n", self.n.is_some())?;
                let ps = self.punctures.as_ref().ok_or_else(|| field_err("punctures", "missing".into()))?;
                if ps.is_empty() {
                    return Err(field_err("punctures", "must list at least one point".into()));
                }
                let ps = ps.iter().map(|&[re, im]| C64::new(re, im)).collect();
                PlanarFactor::punctured_disk(ps).map_err(|e| field_err("punctures", e.to_string()))?.into()
            }
            "annulus" => {
                forbid("punctures", self.punctures.is_some())?;
                forbid("n", self.n.is_some())?;
                let r = self.r.ok_or_else(|| field_err("r", "missing".into()))?;
                PlanarFactor::annulus(r).map_err(|e| field_err("r", e.to_string()))?.into()
            }
            "ball" => {
                forbid("punctures", self.punctures.is_some())?;
                forbid("r", self.r.is_some())?;
                let n = self.n.ok_or_else(|| field_err("n", "missing".into()))?;
                BallFactor::new(n).map_err(|e| field_err("n", e.to_string()))?.into()
            }
            other => return Err(field_err("kind", format!("unknown kind {other:?}"))),
        };
        Ok(factor)
    }
}

pub fn parse_domain_spec(text: &str) -> Result<ProductDomain> {
    let file: DomainSpecFile = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("spec file: {e}")))?;
    if file.factors.is_empty() {
        return Err(Error::Parse("factors: must list at least one factor".into()));
    }
    let factors = file
        .factors
        .into_iter()
        .enumerate()
        .map(|(i, f)| f.into_factor(i))
        .collect::<Result<_>>()?;
    ProductDomain::new(factors)
}

pub fn load_domain_spec(path: &Path) -> Result<ProductDomain> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_domain_spec(&text)
}

/// Parses `"re,im;re,im;..."`; a ball factor of dimension `n` consumes `n` entries.
pub fn parse_point(s: &str) -> Result<Vec<C64>> {
    s.split(';')
        .map(|entry| {
            let parts: Vec<&str> = entry.split(',').map(str::trim).collect();
            let [re, im] = parts.as_slice() else {
                return Err(Error::Parse(format!("point entry {entry:?} is not re,im")));
            };
            let num = |t: &str| t.parse::<f64>().map_err(|e| Error::Parse(format!("bad number {t:?} in point: {e}")));
            Ok(C64::new(num(re)?, num(im)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::FactorKind;

    #[test]
    fn parses_all_kinds() {
        let d = parse_domain_spec(
            r#"{"factors": [
                {"kind": "annulus", "r": 0.25},
                {"kind": "punctured_disk", "punctures": [[0, 0], [0.5, 0]]},
                {"kind": "disk"},
                {"kind": "ball", "n": 2}
            ]}"#,
        )
        .unwrap();
        assert_eq!(d.len(), 4);
        assert_eq!(d.dim(), 5);
        assert!(matches!(d.factors()[0].as_planar().unwrap().kind(), FactorKind::Annulus { r } if *r == 0.25));
        assert_eq!(d.factors()[1].as_planar().unwrap().punctures().len(), 2);
    }

    #[test]
    fn diagnostics_name_the_field() {
        let err = parse_domain_spec(r#"{"factors": [{"kind": "disk"}, {"kind": "annulus", "r": 1.5}]}"#).unwrap_err();
        assert!(err.to_string().contains("factors[1].r"), "{err}");
        let err = parse_domain_spec(r#"{"factors": [{"kind": "annulus"}]}"#).unwrap_err();
        assert!(err.to_string().contains("factors[0].r: missing"), "{err}");
        let err = parse_domain_spec(r#"{"factors": [{"kind": "hexagon"}]}"#).unwrap_err();
        assert!(err.to_string().contains("factors[0].kind"), "{err}");
        let err = parse_domain_spec(r#"{"factors": [{"kind": "disk", "r": 0.1}]}"#).unwrap_err();
        assert!(err.to_string().contains("factors[0].r"), "{err}");
        let err = parse_domain_spec("{\n  \"factors\": [\n    {\"kind\": }\n]}").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
        assert!(parse_domain_spec(r#"{"factors": []}"#).is_err());
        assert!(parse_domain_spec(r#"{"factors": [{"kind": "disk", "colour": 1}]}"#).is_err());
    }

    #[test]
    fn point_strings() {
        assert_eq!(parse_point("0.5,0;0.3,-0.1").unwrap(), vec![C64::new(0.5, 0.0), C64::new(0.3, -0.1)]);
        assert_eq!(parse_point(" 0.4 , 0 ").unwrap(), vec![C64::new(0.4, 0.0)]);
        assert!(parse_point("0.5").is_err());
        assert!(parse_point("0.5,x").is_err());
        assert!(parse_point("0.5,0,1").is_err());
    }
}
