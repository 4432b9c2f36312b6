//! File formats: CSV matrices with a `-inf` token, winners and types
//! files, the JSON result document, and the n=3 projective SVG view.

use crate::tropical::{ExtendedReal, TropMatrix, TropVector};
use crate::{Result, TropError};
use serde::Serialize;
use std::path::Path;

fn parse_cell(token: &str) -> Option<ExtendedReal> {
    let t = token.trim();
    if t.eq_ignore_ascii_case("-inf") {
        return Some(ExtendedReal::BOTTOM);
    }
    t.parse::<f64>().ok().filter(|v| v.is_finite()).map(ExtendedReal::new)
}

/// Parses a CSV matrix. Cells are decimal numbers or the token `-inf`
/// (case-insensitive); an optional header row is skipped when its cells
/// are not numeric.
pub fn parse_matrix_str(text: &str) -> Result<TropMatrix> {
    let mut rows: Vec<Vec<ExtendedReal>> = Vec::new();
    let mut width = None;
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<Option<ExtendedReal>> =
            line.split(',').map(parse_cell).collect();
        if cells.iter().any(Option::is_none) {
            if lineno == 0 && rows.is_empty() {
                continue; // header row
            }
            return Err(TropError::Parse(format!(
                "line {}: unparsable cell in {line:?}",
                lineno + 1
            )));
        }
        let row: Vec<ExtendedReal> = cells.into_iter().map(Option::unwrap).collect();
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(TropError::Parse(format!(
                    "line {}: expected {} cells, got {}",
                    lineno + 1,
                    w,
                    row.len()
                )))
            }
            _ => {}
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(TropError::Parse("empty matrix file".into()));
    }
    let ncols = width.unwrap();
    Ok(TropMatrix::new(
        rows.len(),
        ncols,
        rows.into_iter().flatten().collect(),
    ))
}

pub fn parse_matrix(path: &Path) -> Result<TropMatrix> {
    parse_matrix_str(&std::fs::read_to_string(path)?)
}

/// Decimal CSV text for a matrix; round-trips through `parse_matrix_str`.
pub fn emit_matrix(v: &TropMatrix) -> String {
    let mut out = String::new();
    for i in 0..v.nrows() {
        let row: Vec<String> = (0..v.ncols())
            .map(|k| {
                let e = v.get(i, k);
                if e.is_bottom() {
                    "-inf".to_string()
                } else {
                    format_decimal(e.value())
                }
            })
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn format_decimal(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        let s = format!("{v}");
        s
    }
}

/// Types CSV: `column_index,type` pairs, both 1-based, optional header.
/// Returns the 0-based type per column.
pub fn parse_types_str(text: &str, ncols: usize) -> Result<Vec<usize>> {
    let pairs = parse_index_pairs(text)?;
    let mut types = vec![None; ncols];
    for (col, ty) in pairs {
        if col == 0 || col > ncols {
            return Err(TropError::Parse(format!("column index {col} out of range")));
        }
        if ty == 0 {
            return Err(TropError::Parse("type indices are 1-based".into()));
        }
        types[col - 1] = Some(ty - 1);
    }
    types
        .into_iter()
        .enumerate()
        .map(|(k, t)| {
            t.ok_or_else(|| TropError::Parse(format!("column {} has no type", k + 1)))
        })
        .collect()
}

/// Winners CSV: `tender_id,firm_id` pairs, both 1-based, optional header.
pub fn parse_winners_str(text: &str, q: usize) -> Result<Vec<usize>> {
    let pairs = parse_index_pairs(text)?;
    let mut winners = vec![None; q];
    for (tender, firm) in pairs {
        if tender == 0 || tender > q || firm == 0 {
            return Err(TropError::Parse(format!(
                "bad winners entry ({tender},{firm})"
            )));
        }
        winners[tender - 1] = Some(firm - 1);
    }
    winners
        .into_iter()
        .enumerate()
        .map(|(j, w)| {
            w.ok_or_else(|| TropError::Parse(format!("tender {} has no winner", j + 1)))
        })
        .collect()
}

fn parse_index_pairs(text: &str) -> Result<Vec<(usize, usize)>> {
    let mut pairs = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != 2 {
            return Err(TropError::Parse(format!(
                "line {}: expected two columns",
                lineno + 1
            )));
        }
        match (cells[0].parse::<usize>(), cells[1].parse::<usize>()) {
            (Ok(a), Ok(b)) => pairs.push((a, b)),
            _ if lineno == 0 && pairs.is_empty() => continue, // header
            _ => {
                return Err(TropError::Parse(format!(
                    "line {}: unparsable pair {line:?}",
                    lineno + 1
                )))
            }
        }
    }
    if pairs.is_empty() {
        return Err(TropError::Parse("empty pair file".into()));
    }
    Ok(pairs)
}

// ---------------------------------------------------------------------------
// JSON result document.

/// A number that serializes -inf/+inf as the strings "-inf"/"inf".
#[derive(Clone, Copy, Debug)]
pub struct JsonNum(pub f64);

impl Serialize for JsonNum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0 == f64::INFINITY {
            s.serialize_str("inf")
        } else if self.0 == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Bounds {
    pub lower: JsonNum,
    pub upper: JsonNum,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verification {
    pub sub_ok: bool,
    pub super_ok: bool,
    pub residual: JsonNum,
}

/// The structured result emitted by the CLI with `--json`.
#[derive(Clone, Debug, Serialize)]
pub struct ResultDocument {
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<JsonNum>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<JsonNum>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub apex: Option<Vec<JsonNum>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<JsonNum>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<JsonNum>,
    /// 1-based witness column per sector
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<Vec<usize>>,
    pub bounds: Bounds,
    pub iterations: usize,
    pub verification: Verification,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(flatten)]
    pub extra: serde_json::Map<String, serde_json::Value>,
}

impl ResultDocument {
    pub fn new(method: &str) -> Self {
        ResultDocument {
            method: method.to_string(),
            rho: None,
            value: None,
            apex: None,
            center: None,
            radius: None,
            witnesses: None,
            bounds: Bounds {
                lower: JsonNum(f64::NEG_INFINITY),
                upper: JsonNum(f64::INFINITY),
            },
            iterations: 0,
            verification: Verification {
                sub_ok: false,
                super_ok: false,
                residual: JsonNum(f64::INFINITY),
            },
            warnings: Vec::new(),
            extra: serde_json::Map::new(),
        }
    }
}

pub fn vec_json(x: &TropVector) -> Vec<JsonNum> {
    x.entries().iter().map(|e| JsonNum(e.value())).collect()
}

// ---------------------------------------------------------------------------
// SVG rendering of the projective triangle view (n = 3 only).

/// Plane coordinates of a projective point, as in the barycentric view
/// used throughout: x = -sqrt(3)/2 (a - b), y = -(a + b)/2 + c.
fn plane(p: &[f64; 3]) -> (f64, f64) {
    let x = -(3f64.sqrt()) / 2.0 * (p[0] - p[1]);
    let y = -0.5 * (p[0] + p[1]) + p[2];
    (x, y)
}

/// Renders the 3 x p configuration with the hyperplane of the given apex
/// parameter and a Hilbert ball of the given radius around the apex
/// point. Output is deterministic for identical inputs. Points or rays
/// involving -inf coordinates are skipped and noted in the returned
/// warnings.
pub fn render_svg(v: &TropMatrix, apex: &TropVector, radius: f64) -> Result<(String, Vec<String>)> {
    if v.nrows() != 3 || apex.len() != 3 {
        return Err(TropError::InvalidArgument(format!(
            "SVG rendering supports 3 coordinates, got {}",
            v.nrows()
        )));
    }
    let mut warnings = Vec::new();
    let mut pts = Vec::new();
    for (k, col) in v.columns().enumerate() {
        if col.is_finite() {
            pts.push(plane(&[col[0].value(), col[1].value(), col[2].value()]));
        } else {
            warnings.push(format!("point {} has a -inf coordinate; skipped", k + 1));
        }
    }
    // apex of H_a is the projective point -a
    let apex_pt = if apex.is_finite() {
        Some(plane(&[-apex[0].value(), -apex[1].value(), -apex[2].value()]))
    } else {
        warnings.push("apex has a -inf coordinate; rays drawn for finite coordinates only".into());
        None
    };
    // directions of the three sector rays: images of the unit vectors
    let dirs = [
        plane(&[1.0, 0.0, 0.0]),
        plane(&[0.0, 1.0, 0.0]),
        plane(&[0.0, 0.0, 1.0]),
    ];
    let (mut xs, mut ys): (Vec<f64>, Vec<f64>) = pts.iter().cloned().unzip();
    if let Some((x, y)) = apex_pt {
        xs.push(x);
        ys.push(y);
    }
    if xs.is_empty() {
        return Err(TropError::Degenerate("nothing to draw".into()));
    }
    let (xmin, xmax) = (
        xs.iter().cloned().fold(f64::INFINITY, f64::min) - 2.0,
        xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 2.0,
    );
    let (ymin, ymax) = (
        ys.iter().cloned().fold(f64::INFINITY, f64::min) - 2.0,
        ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 2.0,
    );
    let scale = 60.0;
    let width = (xmax - xmin) * scale;
    let height = (ymax - ymin) * scale;
    let tx = |x: f64| (x - xmin) * scale;
    let ty = |y: f64| (ymax - y) * scale;
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.4} {height:.4}\">\n"
    ));
    if let Some((ax, ay)) = apex_pt {
        // the hexagonal Hilbert ball around the apex point
        if radius > 0.0 {
            let mut verts: Vec<(f64, f64)> = Vec::new();
            for s in [1.0, -1.0] {
                for d in &dirs {
                    verts.push((ax + s * radius * d.0, ay + s * radius * d.1));
                }
            }
            let (cx, cy) = (ax, ay);
            verts.sort_by(|a, b| {
                let aa = (a.1 - cy).atan2(a.0 - cx);
                let ab = (b.1 - cy).atan2(b.0 - cx);
                aa.partial_cmp(&ab).unwrap()
            });
            let path: Vec<String> = verts
                .iter()
                .map(|&(x, y)| format!("{:.4},{:.4}", tx(x), ty(y)))
                .collect();
            svg.push_str(&format!(
                "  <polygon points=\"{}\" fill=\"#cfe8ff\" stroke=\"#5588cc\" stroke-width=\"1\"/>\n",
                path.join(" ")
            ));
        }
        let reach = (xmax - xmin).max(ymax - ymin);
        for d in &dirs {
            let (ex, ey) = (ax + d.0 * reach, ay + d.1 * reach);
            svg.push_str(&format!(
                "  <line x1=\"{:.4}\" y1=\"{:.4}\" x2=\"{:.4}\" y2=\"{:.4}\" stroke=\"#2255aa\" stroke-width=\"1.5\"/>\n",
                tx(ax), ty(ay), tx(ex), ty(ey)
            ));
        }
        svg.push_str(&format!(
            "  <circle cx=\"{:.4}\" cy=\"{:.4}\" r=\"4\" fill=\"#2255aa\"/>\n",
            tx(ax),
            ty(ay)
        ));
    } else {
        // degenerate apex: draw only the rays of the finite coordinates,
        // from the centroid of the drawn points
        let cx = xs.iter().sum::<f64>() / xs.len() as f64;
        let cy = ys.iter().sum::<f64>() / ys.len() as f64;
        let reach = (xmax - xmin).max(ymax - ymin);
        for (i, d) in dirs.iter().enumerate() {
            if apex[i].is_finite() {
                svg.push_str(&format!(
                    "  <line x1=\"{:.4}\" y1=\"{:.4}\" x2=\"{:.4}\" y2=\"{:.4}\" stroke=\"#2255aa\" stroke-width=\"1.5\" stroke-dasharray=\"4 3\"/>\n",
                    tx(cx), ty(cy), tx(cx + d.0 * reach), ty(cy + d.1 * reach)
                ));
            }
        }
    }
    for &(x, y) in &pts {
        svg.push_str(&format!(
            "  <circle cx=\"{:.4}\" cy=\"{:.4}\" r=\"3\" fill=\"#cc3333\"/>\n",
            tx(x),
            ty(y)
        ));
    }
    svg.push_str("</svg>\n");
    Ok((svg, warnings))
}
