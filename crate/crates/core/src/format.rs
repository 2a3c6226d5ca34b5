//! Plain-text fixture format.
//!
//! One directive per line, `#` starts a comment:
//!
//! ```text
//! dim 4                 # ambient dimension, must come before any `v`
//! v 1.0 0.0 0.0 0.0     # vertex
//! t 0 1 2               # oriented triangle, 0-based
//! strength 1.0          # membrane strength C
//! c 0 1 2 3 closed      # curve through the listed vertices (or `open`)
//! f 0.25                # sheet potential, one per vertex in order
//! a 0 1 0.25            # sheet 1-form on the oriented edge 0 -> 1
//! df 0.1                # fiber spacing of a fibration (one `c` per fiber)
//! ```
//!
//! Point-vortex configurations use `pv x y kappa` lines. Tangent fields for
//! the form evaluators use `V x1 .. xn` and `W x1 .. xn` lines.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::{DiscreteCurve, DiscreteMembrane, TriMesh};
use crate::pointvortex2d::VortexConfig2D;
use crate::symplectic::{SheetFibration, VortexSheet};
use crate::Vector;

/// Raw contents of a geometry file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GeometryFile {
    pub dim: Option<usize>,
    pub vertices: Vec<Vector>,
    pub triangles: Vec<[usize; 3]>,
    pub strength: Option<f64>,
    pub curves: Vec<(Vec<usize>, bool)>,
    pub potential: Vec<f64>,
    pub edge_values: Vec<(usize, usize, f64)>,
    pub df: Option<f64>,
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn float(tok: &str, line: usize) -> Result<f64> {
    let x: f64 = tok
        .parse()
        .map_err(|_| perr(line, format!("expected a number, found {tok:?}")))?;
    if !x.is_finite() {
        return Err(perr(line, format!("non-finite number {tok:?}")));
    }
    Ok(x)
}

fn index(tok: &str, line: usize) -> Result<usize> {
    tok.parse()
        .map_err(|_| perr(line, format!("expected a vertex index, found {tok:?}")))
}

/// Non-empty, comment-stripped lines with their 1-based numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(k, l)| {
        let body = l.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        (!toks.is_empty()).then_some((k + 1, toks))
    })
}

pub fn parse_geometry(text: &str) -> Result<GeometryFile> {
    let mut g = GeometryFile::default();
    for (ln, toks) in lines(text) {
        let args = &toks[1..];
        let one = |what: &str| -> Result<&str> {
            match args {
                [x] => Ok(*x),
                _ => Err(perr(ln, format!("`{what}` takes exactly one value"))),
            }
        };
        match toks[0] {
            "dim" => {
                if g.dim.is_some() {
                    return Err(perr(ln, "`dim` given twice"));
                }
                let n = index(one("dim")?, ln)?;
                if !(2..=64).contains(&n) {
                    return Err(perr(ln, format!("dimension {n} out of range 2..=64")));
                }
                g.dim = Some(n);
            }
            "v" => {
                let n = g.dim.ok_or_else(|| perr(ln, "`v` before `dim`"))?;
                if args.len() != n {
                    return Err(perr(ln, format!("vertex needs {n} coordinates, found {}", args.len())));
                }
                let xs = args.iter().map(|t| float(t, ln)).collect::<Result<Vec<_>>>()?;
                g.vertices.push(Vector::from_vec(xs));
            }
            "t" => {
                if args.len() != 3 {
                    return Err(perr(ln, "triangle needs 3 indices"));
                }
                g.triangles
                    .push([index(args[0], ln)?, index(args[1], ln)?, index(args[2], ln)?]);
            }
            "strength" => {
                if g.strength.is_some() {
                    return Err(perr(ln, "`strength` given twice"));
                }
                g.strength = Some(float(one("strength")?, ln)?);
            }
            "c" => {
                let (last, idx) = args
                    .split_last()
                    .ok_or_else(|| perr(ln, "curve needs indices and closed|open"))?;
                let closed = match *last {
                    "closed" => true,
                    "open" => false,
                    other => return Err(perr(ln, format!("expected closed|open, found {other:?}"))),
                };
                let idx = idx.iter().map(|t| index(t, ln)).collect::<Result<Vec<_>>>()?;
                g.curves.push((idx, closed));
            }
            "f" => g.potential.push(float(one("f")?, ln)?),
            "a" => {
                if args.len() != 3 {
                    return Err(perr(ln, "`a` takes two indices and a value"));
                }
                g.edge_values
                    .push((index(args[0], ln)?, index(args[1], ln)?, float(args[2], ln)?));
            }
            "df" => {
                if g.df.is_some() {
                    return Err(perr(ln, "`df` given twice"));
                }
                g.df = Some(float(one("df")?, ln)?);
            }
            other => return Err(perr(ln, format!("unknown directive {other:?}"))),
        }
    }
    if g.dim.is_none() {
        return Err(perr(0, "missing `dim` line"));
    }
    Ok(g)
}

impl GeometryFile {
    pub fn mesh(&self) -> Result<TriMesh> {
        TriMesh::new(self.vertices.clone(), self.triangles.clone())
    }

    /// Membrane; strength defaults to 1 when absent.
    pub fn membrane(&self) -> Result<DiscreteMembrane> {
        DiscreteMembrane::new(self.mesh()?, self.strength.unwrap_or(1.0))
    }

    pub fn curves(&self) -> Result<Vec<DiscreteCurve>> {
        self.curves
            .iter()
            .map(|(idx, closed)| {
                let pts = idx
                    .iter()
                    .map(|&i| {
                        self.vertices
                            .get(i)
                            .cloned()
                            .ok_or_else(|| Error::invalid(format!("curve references missing vertex {i}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                DiscreteCurve::new(pts, *closed)
            })
            .collect()
    }

    /// The single curve of the file; with no `c` line, all vertices in order
    /// as a closed curve.
    pub fn curve(&self) -> Result<DiscreteCurve> {
        match self.curves.len() {
            0 => DiscreteCurve::closed(self.vertices.clone()),
            1 => Ok(self.curves()?.remove(0)),
            k => Err(Error::invalid(format!("expected one curve, found {k}"))),
        }
    }

    pub fn sheet(&self) -> Result<VortexSheet> {
        let mesh = self.mesh()?;
        match (self.potential.is_empty(), self.edge_values.is_empty()) {
            (false, true) => VortexSheet::exact(mesh, self.potential.clone()),
            (true, false) => VortexSheet::from_edge_values(mesh, &self.edge_values),
            (true, true) => Err(Error::invalid("sheet needs `f` or `a` lines")),
            (false, false) => Err(Error::invalid("sheet mixes `f` and `a` lines")),
        }
    }

    pub fn fibration(&self) -> Result<SheetFibration> {
        let df = self.df.ok_or_else(|| Error::invalid("fibration needs a `df` line"))?;
        SheetFibration::new(self.curves()?, df)
    }
}

fn push_vertices(out: &mut String, vs: &[Vector]) {
    let dim = vs.first().map_or(0, |v| v.len());
    let _ = writeln!(out, "dim {dim}");
    for v in vs {
        out.push('v');
        for x in v.iter() {
            let _ = write!(out, " {x}");
        }
        out.push('\n');
    }
}

pub fn write_mesh(mesh: &TriMesh) -> String {
    let mut out = String::new();
    push_vertices(&mut out, mesh.vertices());
    for [a, b, c] in mesh.triangles() {
        let _ = writeln!(out, "t {a} {b} {c}");
    }
    out
}

pub fn write_membrane(mem: &DiscreteMembrane) -> String {
    let mut out = write_mesh(mem.mesh());
    let _ = writeln!(out, "strength {}", mem.strength());
    out
}

fn push_curve(out: &mut String, start: usize, len: usize, closed: bool) {
    out.push('c');
    for i in start..start + len {
        let _ = write!(out, " {i}");
    }
    out.push_str(if closed { " closed\n" } else { " open\n" });
}

pub fn write_curve(curve: &DiscreteCurve) -> String {
    let mut out = String::new();
    push_vertices(&mut out, curve.points());
    push_curve(&mut out, 0, curve.len(), curve.is_closed());
    out
}

pub fn write_sheet(sheet: &VortexSheet) -> String {
    let mut out = write_mesh(sheet.mesh());
    match sheet.potential() {
        Some(f) => {
            for x in f {
                let _ = writeln!(out, "f {x}");
            }
        }
        None => {
            for (&(i, j), a) in sheet.mesh().edges().iter().zip(sheet.alpha()) {
                let _ = writeln!(out, "a {i} {j} {a}");
            }
        }
    }
    out
}

pub fn write_fibration(fib: &SheetFibration) -> String {
    let mut out = String::new();
    let all: Vec<Vector> = fib.fibers().iter().flat_map(|c| c.points().iter().cloned()).collect();
    push_vertices(&mut out, &all);
    let mut start = 0;
    for c in fib.fibers() {
        push_curve(&mut out, start, c.len(), true);
        start += c.len();
    }
    let _ = writeln!(out, "df {}", fib.df());
    out
}

pub fn parse_vortices(text: &str) -> Result<VortexConfig2D> {
    let mut pos = Vec::new();
    let mut kappa = Vec::new();
    for (ln, toks) in lines(text) {
        match toks.as_slice() {
            ["pv", x, y, k] => {
                pos.push([float(x, ln)?, float(y, ln)?]);
                let k = float(k, ln)?;
                if k == 0.0 {
                    return Err(perr(ln, "vortex strength must be nonzero"));
                }
                kappa.push(k);
            }
            ["pv", ..] => return Err(perr(ln, "`pv` takes x y kappa")),
            [other, ..] => return Err(perr(ln, format!("unknown directive {other:?}"))),
            [] => unreachable!(),
        }
    }
    if pos.is_empty() {
        return Err(perr(0, "no `pv` lines"));
    }
    VortexConfig2D::new(pos, kappa)
}

pub fn write_vortices(cfg: &VortexConfig2D) -> String {
    let mut out = String::new();
    for (p, k) in cfg.positions().iter().zip(cfg.strengths()) {
        let _ = writeln!(out, "pv {} {} {k}", p[0], p[1]);
    }
    out
}

/// Paired tangent fields for the form evaluators.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Fields {
    pub v: Vec<Vector>,
    pub w: Vec<Vector>,
}

/// Reads `V`/`W` lines; every vector must have `dim` components.
pub fn parse_fields(text: &str, dim: usize) -> Result<Fields> {
    let mut fields = Fields::default();
    for (ln, toks) in lines(text) {
        let target = match toks[0] {
            "V" => &mut fields.v,
            "W" => &mut fields.w,
            other => return Err(perr(ln, format!("unknown directive {other:?}"))),
        };
        if toks.len() - 1 != dim {
            return Err(perr(ln, format!("field vector needs {dim} components, found {}", toks.len() - 1)));
        }
        let xs = toks[1..].iter().map(|t| float(t, ln)).collect::<Result<Vec<_>>>()?;
        target.push(Vector::from_vec(xs));
    }
    Ok(fields)
}

pub fn write_fields(fields: &Fields) -> String {
    let mut out = String::new();
    for (tag, vs) in [("V", &fields.v), ("W", &fields.w)] {
        for v in vs {
            out.push_str(tag);
            for x in v.iter() {
                let _ = write!(out, " {x}");
            }
            out.push('\n');
        }
    }
    out
}
