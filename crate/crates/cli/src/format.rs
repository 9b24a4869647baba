//! JSON file formats. Coordinates and heights are exact rational strings.

use std::path::Path;

use hyperflip::geometry::{format_rational, parse_rational};
use hyperflip::{
    k_fold_sums, Flip, FlipType, GkzVector, HeightFunction, Hypertriangulation, KFoldConfig, Label, LabeledTriangle,
    NonTriangularReport, Point2, PointConfig,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub type LabelJson = Vec<usize>;
pub type TriangleJson = [LabelJson; 3];

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PointsFile {
    pub points: Vec<[String; 2]>,
}

impl PointsFile {
    pub fn from_config(base: &PointConfig) -> Self {
        PointsFile { points: base.points().iter().map(point_json).collect() }
    }

    pub fn to_config(&self) -> Result<PointConfig, CliError> {
        let pts = self.points.iter().map(parse_point).collect::<Result<Vec<_>, _>>()?;
        Ok(PointConfig::new(pts)?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TriFile {
    pub n: usize,
    pub k: usize,
    pub triangles: Vec<TriangleJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gkz: Option<Vec<String>>,
}

impl TriFile {
    pub fn from_tri(t: &Hypertriangulation) -> Self {
        TriFile { n: t.n(), k: t.k(), triangles: t.iter().map(triangle_json).collect(), gkz: None }
    }

    pub fn to_tri(&self, base: &PointConfig) -> Result<Hypertriangulation, CliError> {
        if self.n != base.n() {
            return Err(CliError::invalid(format!("file has n = {} but the point set has {}", self.n, base.n())));
        }
        let cfg = k_fold_sums(base, self.k)?;
        Ok(Hypertriangulation::new(cfg, &self.triples()?)?)
    }

    pub fn triples(&self) -> Result<Vec<[Label; 3]>, CliError> {
        self.triangles.iter().map(|t| Ok([label(&t[0])?, label(&t[1])?, label(&t[2])?])).collect()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HeightsFile {
    pub heights: Vec<String>,
}

impl HeightsFile {
    pub fn to_heights(&self) -> Result<HeightFunction, CliError> {
        let h = self.heights.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?;
        Ok(HeightFunction::new(h))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FlipJson {
    #[serde(rename = "type")]
    pub kind: String,
    pub direction: String,
    pub before: Vec<TriangleJson>,
    pub after: Vec<TriangleJson>,
}

impl FlipJson {
    pub fn from_flip(f: &Flip) -> Self {
        FlipJson {
            kind: f.kind().to_string(),
            direction: format!("{:?}", f.direction()).to_lowercase(),
            before: f.before().iter().map(triangle_json).collect(),
            after: f.after().iter().map(triangle_json).collect(),
        }
    }

    pub fn to_flip(&self) -> Result<Flip, CliError> {
        let kind: FlipType = self.kind.parse()?;
        let side = |ts: &[TriangleJson]| -> Result<Vec<LabeledTriangle>, CliError> {
            ts.iter().map(|t| Ok(LabeledTriangle::new(label(&t[0])?, label(&t[1])?, label(&t[2])?)?)).collect()
        };
        Ok(Flip::new(kind, side(&self.before)?, side(&self.after)?))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FlipsFile {
    pub flips: Vec<FlipJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SumEntry {
    pub label: LabelJson,
    pub x: String,
    pub y: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SumsFile {
    pub n: usize,
    pub k: usize,
    pub points: Vec<SumEntry>,
}

impl SumsFile {
    pub fn from_config(cfg: &KFoldConfig) -> Self {
        let points = cfg
            .entries()
            .map(|(l, p)| SumEntry { label: label_json(l), x: format_rational(&p.x), y: format_rational(&p.y) })
            .collect();
        SumsFile { n: cfg.n(), k: cfg.k(), points }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NonTriangularFile {
    pub non_triangular: Vec<Vec<LabelJson>>,
}

impl NonTriangularFile {
    pub fn from_report(r: &NonTriangularReport) -> Self {
        NonTriangularFile { non_triangular: r.faces.iter().map(|f| f.iter().map(|&l| label_json(l)).collect()).collect() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphFile {
    pub nodes: Vec<String>,
    pub edges: Vec<(usize, usize, String)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OverlapFile {
    pub trial: usize,
    /// Readable as a points file.
    pub points: Vec<[String; 2]>,
    pub hypertriangulation: TriFile,
    pub overlaps: Vec<[TriangleJson; 2]>,
}

pub fn label_json(l: Label) -> LabelJson {
    l.indices().collect()
}

pub fn label(v: &[usize]) -> Result<Label, CliError> {
    Ok(Label::new(v)?)
}

pub fn triangle_json(t: &LabeledTriangle) -> TriangleJson {
    t.labels().map(label_json)
}

pub fn point_json(p: &Point2) -> [String; 2] {
    [format_rational(&p.x), format_rational(&p.y)]
}

pub fn parse_point(p: &[String; 2]) -> Result<Point2, CliError> {
    Ok(Point2::new(parse_rational(&p[0])?, parse_rational(&p[1])?))
}

pub fn gkz_json(v: &GkzVector) -> Vec<String> {
    v.coords.iter().map(format_rational).collect()
}

/// Indented JSON with short object-free arrays kept on one line, plus a
/// trailing newline; identical inputs give identical bytes.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("serializable");
    let mut s = String::new();
    write_value(&v, 0, &mut s);
    s.push('\n');
    s
}

const INLINE_WIDTH: usize = 60;

fn has_object(v: &serde_json::Value) -> bool {
    match v {
        serde_json::Value::Object(_) => true,
        serde_json::Value::Array(a) => a.iter().any(has_object),
        _ => false,
    }
}

fn write_value(v: &serde_json::Value, depth: usize, out: &mut String) {
    use serde_json::Value;
    let pad = |d: usize| "  ".repeat(d);
    match v {
        Value::Object(map) if !map.is_empty() => {
            out.push_str("{\n");
            for (i, (k, val)) in map.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                out.push_str(&serde_json::to_string(k).unwrap());
                out.push_str(": ");
                write_value(val, depth + 1, out);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push('}');
        }
        Value::Array(items) if !items.is_empty() => {
            let compact = serde_json::to_string(v).unwrap();
            if !has_object(v) && compact.len() <= INLINE_WIDTH {
                out.push_str(&compact);
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                write_value(item, depth + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push(']');
        }
        other => out.push_str(&serde_json::to_string(other).unwrap()),
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::invalid(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
}

pub fn read_points(path: &Path) -> Result<PointConfig, CliError> {
    read_json::<PointsFile>(path)?.to_config()
}

pub fn read_tri(path: &Path, base: &PointConfig) -> Result<Hypertriangulation, CliError> {
    read_json::<TriFile>(path)?.to_tri(base)
}
