//! JSON descriptions of stacks and cavities.
//!
//! A stack is either explicit,
//! `{"ambient": 1.0, "substrate": 1.5098, "layers": [{"n": 2.04, "d_nm": 104.4}]}`,
//! or a quarter-wave shorthand,
//! `{"quarter_wave": {"nH": 2.0411, "nL": 1.455, "n_sub": 1.5098, "pairs": 18, "center_nm": 852}}`.
//! Either form accepts `"surface_scatter_ppm"`. Indices may be a number or
//! `{"n": .., "k": ..}`. A cavity gives `"mirror"` (used for both sides) or
//! `"mirror_a"` and `"mirror_b"`, plus `"gap_nm"` and optional
//! `"roc_a_cm"`/`"roc_b_cm"`.

use serde::{Deserialize, Serialize};

use crate::cavity::CavityAssembly;
use crate::dispersion::MeasuredPair;
use crate::error::{domain, Error, Result};
use crate::stack::{quarter_wave_stack, DielectricStack, Layer, MediumIndex};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IndexDescription {
    Real(f64),
    Complex { n: f64, #[serde(default)] k: f64 },
}

impl IndexDescription {
    pub fn to_index(self) -> Result<MediumIndex<f64>> {
        match self {
            Self::Real(n) => MediumIndex::new(n, 0.0),
            Self::Complex { n, k } => MediumIndex::new(n, k),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerDescription {
    pub n: f64,
    #[serde(default)]
    pub k: f64,
    pub d_nm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuarterWaveDescription {
    #[serde(rename = "nH")]
    pub n_high: f64,
    #[serde(rename = "nL")]
    pub n_low: f64,
    pub n_sub: f64,
    pub pairs: usize,
    pub center_nm: f64,
    #[serde(default = "unit")]
    pub thickness_scale: f64,
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StackDescription {
    QuarterWave {
        quarter_wave: QuarterWaveDescription,
        #[serde(default)]
        surface_scatter_ppm: f64,
    },
    Explicit {
        #[serde(default = "vacuum")]
        ambient: IndexDescription,
        substrate: IndexDescription,
        layers: Vec<LayerDescription>,
        #[serde(default)]
        surface_scatter_ppm: f64,
    },
}

fn vacuum() -> IndexDescription {
    IndexDescription::Real(1.0)
}

impl StackDescription {
    pub fn build(&self) -> Result<DielectricStack<f64>> {
        let (stack, scatter) = match self {
            Self::QuarterWave { quarter_wave: q, surface_scatter_ppm } => (
                quarter_wave_stack(
                    MediumIndex::new(q.n_high, 0.0)?,
                    MediumIndex::new(q.n_low, 0.0)?,
                    MediumIndex::new(q.n_sub, 0.0)?,
                    q.pairs,
                    q.center_nm / 1e9,
                    q.thickness_scale,
                )?,
                *surface_scatter_ppm,
            ),
            Self::Explicit { ambient, substrate, layers, surface_scatter_ppm } => {
                let layers = layers
                    .iter()
                    .map(|l| Layer::new(MediumIndex::new(l.n, l.k)?, l.d_nm / 1e9))
                    .collect::<Result<Vec<_>>>()?;
                (
                    DielectricStack::new(ambient.to_index()?, layers, substrate.to_index()?),
                    *surface_scatter_ppm,
                )
            }
        };
        stack.with_surface_scatter(scatter / 1e6)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavityDescription {
    #[serde(default)]
    pub mirror: Option<StackDescription>,
    #[serde(default)]
    pub mirror_a: Option<StackDescription>,
    #[serde(default)]
    pub mirror_b: Option<StackDescription>,
    pub gap_nm: f64,
    #[serde(default)]
    pub roc_a_cm: Option<f64>,
    #[serde(default)]
    pub roc_b_cm: Option<f64>,
}

impl CavityDescription {
    pub fn build(&self) -> Result<CavityAssembly<f64>> {
        let (a, b) = match (&self.mirror, &self.mirror_a, &self.mirror_b) {
            (Some(m), None, None) => {
                let m = m.build()?;
                (m.clone(), m)
            }
            (None, Some(a), Some(b)) => (a.build()?, b.build()?),
            _ => return Err(domain("give either \"mirror\" or both \"mirror_a\" and \"mirror_b\"")),
        };
        let cavity = CavityAssembly::new(a, b, self.gap_nm / 1e9)?;
        let roc = |r: Option<f64>| r.map_or(f64::INFINITY, |cm| cm / 1e2);
        match (self.roc_a_cm, self.roc_b_cm) {
            (None, None) => Ok(cavity),
            (ra, rb) => cavity.with_curvature(roc(ra), roc(rb)),
        }
    }
}

/// Parse failure with the position serde reports.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> std::result::Result<T, ParseError> {
    serde_json::from_str(text).map_err(|e| ParseError { line: e.line(), column: e.column(), message: e.to_string() })
}

pub fn parse_stack(text: &str) -> std::result::Result<StackDescription, ParseError> {
    parse(text)
}

pub fn parse_cavity(text: &str) -> std::result::Result<CavityDescription, ParseError> {
    parse(text)
}

#[derive(Debug, Deserialize)]
struct PairRecord {
    lambda1_nm: f64,
    lambda2_nm: f64,
    #[serde(default)]
    sigma_nm: Option<f64>,
}

/// Wavelength uncertainty used when a pairs file has no `sigma_nm` column.
pub const DEFAULT_SIGMA_NM: f64 = 0.01;

/// Reads resonance pairs from CSV with header `lambda1_nm,lambda2_nm` and an
/// optional `sigma_nm` column.
pub fn parse_pairs_csv(text: &str) -> std::result::Result<Vec<MeasuredPair>, ParseError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let position = |e: &csv::Error| {
        let line = e.position().map_or(0, |p| p.line() as usize);
        let column = match e.kind() {
            csv::ErrorKind::Deserialize { err, .. } => err.field().map_or(0, |f| f as usize + 1),
            _ => 0,
        };
        ParseError { line, column, message: e.to_string() }
    };
    reader
        .deserialize::<PairRecord>()
        .map(|r| {
            let r = r.map_err(|e| position(&e))?;
            Ok(MeasuredPair {
                lambda_1: r.lambda1_nm / 1e9,
                lambda_2: r.lambda2_nm / 1e9,
                sigma: r.sigma_nm.unwrap_or(DEFAULT_SIGMA_NM) / 1e9,
            })
        })
        .collect()
}

impl From<ParseError> for Error {
    fn from(e: ParseError) -> Self {
        domain(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shorthand_matches_builder() {
        let d = parse_stack(r#"{"quarter_wave": {"nH": 2.0411, "nL": 1.455, "n_sub": 1.5098, "pairs": 18, "center_nm": 852}}"#)
            .unwrap();
        let s = d.build().unwrap();
        let direct = quarter_wave_stack(
            MediumIndex::new(2.0411, 0.0).unwrap(),
            MediumIndex::new(1.455, 0.0).unwrap(),
            MediumIndex::new(1.5098, 0.0).unwrap(),
            18,
            852e-9,
            1.0,
        )
        .unwrap();
        assert_eq!(s, direct);
    }

    #[test]
    fn explicit_with_complex_index_and_scatter() {
        let d = parse_stack(
            r#"{"substrate": {"n": 1.5, "k": 0}, "layers": [{"n": 2.0, "k": 1e-5, "d_nm": 100}], "surface_scatter_ppm": 2}"#,
        )
        .unwrap();
        let s = d.build().unwrap();
        assert_eq!(s.layers.len(), 1);
        assert!((s.surface_scatter_loss() - 2e-6).abs() < 1e-18);
        assert!(!s.is_lossless());
    }

    #[test]
    fn empty_layers_is_a_bare_interface() {
        let s = parse_stack(r#"{"substrate": 1.5098, "layers": []}"#).unwrap().build().unwrap();
        let t = s.transmission(852e-9).unwrap();
        assert!((t - 4.0 * 1.5098 / 2.5098f64.powi(2)).abs() < 1e-14);
    }

    #[test]
    fn cavity_forms() {
        let m = r#"{"quarter_wave": {"nH": 2.0411, "nL": 1.455, "n_sub": 1.5098, "pairs": 18, "center_nm": 852}}"#;
        let c = parse_cavity(&format!(r#"{{"mirror": {m}, "gap_nm": 10000, "roc_a_cm": 20, "roc_b_cm": 20}}"#))
            .unwrap()
            .build()
            .unwrap();
        assert!((c.gap() - 1e-5).abs() < 1e-18);
        assert!((c.roc_a - 0.2).abs() < 1e-15);
        let flat = parse_cavity(&format!(r#"{{"mirror_a": {m}, "mirror_b": {m}, "gap_nm": 5000}}"#))
            .unwrap()
            .build()
            .unwrap();
        assert!(flat.roc_a.is_infinite());
        assert!(parse_cavity(&format!(r#"{{"mirror": {m}, "mirror_a": {m}, "gap_nm": 1}}"#)).unwrap().build().is_err());
    }

    #[test]
    fn pairs_csv() {
        let p = parse_pairs_csv("lambda1_nm,lambda2_nm\n870.5, 835.25\n").unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].lambda_1, 870.5e-9);
        assert!((p[0].sigma - 1e-11).abs() < 1e-25);
        let e = parse_pairs_csv("lambda1_nm,lambda2_nm,sigma_nm\n870,835,0.01\n860,oops,0.01\n").unwrap_err();
        assert_eq!((e.line, e.column), (3, 2));
    }

    #[test]
    fn parse_errors_carry_position() {
        let e = parse_stack("{\n  \"substrate\": 1.5,\n  \"layers\": [ {\"n\": 2.0 ]\n}").unwrap_err();
        assert_eq!(e.line, 3);
        assert!(e.column > 0);
    }
}
