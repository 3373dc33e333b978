//! The plain-text representation config format.
//!
//! Whitespace-separated fields, `#` starts a comment, one directive per
//! line:
//!
//! ```text
//! field qp 3          # or: field laurent 5
//! dim 2
//! surface 1 1         # genus, boundary components
//! gen a 3 0 0 1       # d*d entries, row-major, in presentation order
//! gen b 1 -4 2 -5
//! boundary 1 abAB     # optional override of the j-th boundary word
//! invert 1            # optional: invert the j-th boundary word
//! cutoff 12
//! window 3
//! ```

use std::fmt::Write as _;

use basmajian_core::error::{Error, Result};
use basmajian_core::field::parse::parse_element;
use basmajian_core::identity::Representation;
use basmajian_core::linalg::ProjMatrix;
use basmajian_core::words::{SurfaceType, Word};
use basmajian_core::{FieldModel, ModelKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigFile {
    pub kind: ModelKind,
    pub p: u64,
    pub dim: usize,
    pub genus: u32,
    pub boundary_count: u32,
    /// Generator name and row-major entry tokens, presentation order.
    pub gens: Vec<(char, Vec<String>)>,
    pub boundary_overrides: Vec<(usize, String)>,
    pub inverts: Vec<usize>,
    pub cutoff: Option<usize>,
    pub window: Option<usize>,
}

fn parse_err(line_no: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("line {line_no}: {msg}"))
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<ConfigFile> {
        let mut field: Option<(ModelKind, u64)> = None;
        let mut dim: Option<usize> = None;
        let mut surface: Option<(u32, u32)> = None;
        let mut gens: Vec<(char, Vec<String>)> = Vec::new();
        let mut boundary_overrides: Vec<(usize, String)> = Vec::new();
        let mut inverts: Vec<usize> = Vec::new();
        let mut cutoff: Option<usize> = None;
        let mut window: Option<usize> = None;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("");
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.is_empty() {
                continue;
            }
            match toks[0] {
                "field" => {
                    if toks.len() != 3 {
                        return Err(parse_err(line_no, "expected `field <qp|laurent> <p>`"));
                    }
                    let kind = match toks[1] {
                        "qp" => ModelKind::Qp,
                        "laurent" => ModelKind::Laurent,
                        other => return Err(parse_err(line_no, format!("unknown field model `{other}`"))),
                    };
                    let p: u64 = toks[2]
                        .parse()
                        .map_err(|e| parse_err(line_no, format!("bad prime: {e}")))?;
                    field = Some((kind, p));
                }
                "dim" => {
                    if toks.len() != 2 {
                        return Err(parse_err(line_no, "expected `dim <d>`"));
                    }
                    dim = Some(
                        toks[1]
                            .parse()
                            .map_err(|e| parse_err(line_no, format!("bad dimension: {e}")))?,
                    );
                }
                "surface" => {
                    if toks.len() != 3 {
                        return Err(parse_err(line_no, "expected `surface <g> <m>`"));
                    }
                    let g = toks[1]
                        .parse()
                        .map_err(|e| parse_err(line_no, format!("bad genus: {e}")))?;
                    let m = toks[2]
                        .parse()
                        .map_err(|e| parse_err(line_no, format!("bad boundary count: {e}")))?;
                    surface = Some((g, m));
                }
                "gen" => {
                    let d = dim.ok_or_else(|| parse_err(line_no, "`gen` before `dim`"))?;
                    if toks.len() != 2 + d * d {
                        return Err(parse_err(
                            line_no,
                            format!("expected `gen <name>` followed by {} entries", d * d),
                        ));
                    }
                    let name = toks[1];
                    if name.len() != 1 || !name.chars().next().unwrap().is_ascii_lowercase() {
                        return Err(parse_err(line_no, "generator name must be one lowercase letter"));
                    }
                    gens.push((
                        name.chars().next().unwrap(),
                        toks[2..].iter().map(|s| s.to_string()).collect(),
                    ));
                }
                "boundary" => {
                    if toks.len() != 3 {
                        return Err(parse_err(line_no, "expected `boundary <j> <word>`"));
                    }
                    let j: usize = toks[1]
                        .parse()
                        .map_err(|e| parse_err(line_no, format!("bad index: {e}")))?;
                    boundary_overrides.push((j, toks[2].to_string()));
                }
                "invert" => {
                    if toks.len() != 2 {
                        return Err(parse_err(line_no, "expected `invert <j>`"));
                    }
                    inverts.push(
                        toks[1]
                            .parse()
                            .map_err(|e| parse_err(line_no, format!("bad index: {e}")))?,
                    );
                }
                "cutoff" => {
                    if toks.len() != 2 {
                        return Err(parse_err(line_no, "expected `cutoff <n>`"));
                    }
                    cutoff = Some(
                        toks[1]
                            .parse()
                            .map_err(|e| parse_err(line_no, format!("bad cutoff: {e}")))?,
                    );
                }
                "window" => {
                    if toks.len() != 2 {
                        return Err(parse_err(line_no, "expected `window <n>`"));
                    }
                    window = Some(
                        toks[1]
                            .parse()
                            .map_err(|e| parse_err(line_no, format!("bad window: {e}")))?,
                    );
                }
                other => return Err(parse_err(line_no, format!("unknown directive `{other}`"))),
            }
        }

        let (kind, p) = field.ok_or_else(|| Error::Parse("missing `field` line".into()))?;
        let dim = dim.ok_or_else(|| Error::Parse("missing `dim` line".into()))?;
        let (genus, boundary_count) =
            surface.ok_or_else(|| Error::Parse("missing `surface` line".into()))?;
        let rank = 2 * genus as usize + boundary_count as usize - 1;
        if gens.len() != rank {
            return Err(Error::Parse(format!(
                "surface of rank {rank} needs {rank} `gen` lines, found {}",
                gens.len()
            )));
        }
        for (i, (name, _)) in gens.iter().enumerate() {
            let expected = (b'a' + i as u8) as char;
            if *name != expected {
                return Err(Error::Parse(format!(
                    "generator {} must be named `{expected}`, found `{name}`",
                    i + 1
                )));
            }
        }
        Ok(ConfigFile {
            kind,
            p,
            dim,
            genus,
            boundary_count,
            gens,
            boundary_overrides,
            inverts,
            cutoff,
            window,
        })
    }

    pub fn print(&self) -> String {
        let mut out = String::new();
        let model = match self.kind {
            ModelKind::Qp => "qp",
            ModelKind::Laurent => "laurent",
        };
        writeln!(out, "field {model} {}", self.p).unwrap();
        writeln!(out, "dim {}", self.dim).unwrap();
        writeln!(out, "surface {} {}", self.genus, self.boundary_count).unwrap();
        for (name, entries) in &self.gens {
            writeln!(out, "gen {name} {}", entries.join(" ")).unwrap();
        }
        for (j, w) in &self.boundary_overrides {
            writeln!(out, "boundary {j} {w}").unwrap();
        }
        for j in &self.inverts {
            writeln!(out, "invert {j}").unwrap();
        }
        if let Some(c) = self.cutoff {
            writeln!(out, "cutoff {c}").unwrap();
        }
        if let Some(w) = self.window {
            writeln!(out, "window {w}").unwrap();
        }
        out
    }

    pub fn model(&self) -> Result<FieldModel> {
        match self.kind {
            ModelKind::Qp => FieldModel::qp(self.p),
            ModelKind::Laurent => FieldModel::laurent(self.p),
        }
    }

    pub fn to_representation(&self) -> Result<Representation> {
        let model = self.model()?;
        let surface = SurfaceType::new(self.genus, self.boundary_count)?;
        let mut images = Vec::with_capacity(self.gens.len());
        for (_, entries) in &self.gens {
            let mut rows = Vec::with_capacity(self.dim);
            for r in 0..self.dim {
                let mut row = Vec::with_capacity(self.dim);
                for c in 0..self.dim {
                    row.push(parse_element(model, &entries[r * self.dim + c])?);
                }
                rows.push(row);
            }
            images.push(ProjMatrix::new(model, rows)?);
        }
        let mut rep = Representation::new(model, surface, images)?;
        for (j, w) in &self.boundary_overrides {
            rep.override_boundary(*j, Word::parse(w, surface.rank())?);
        }
        for j in &self.inverts {
            rep.invert_boundary(*j);
        }
        if let Some(c) = self.cutoff {
            rep = rep.with_cutoff(c);
        }
        if let Some(w) = self.window {
            rep = rep.with_window(w);
        }
        Ok(rep)
    }

    /// Config mirroring a built representation (used by `preset`).
    pub fn from_representation(rep: &Representation) -> ConfigFile {
        let gens = rep
            .images
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let name = (b'a' + i as u8) as char;
                let mut entries = Vec::with_capacity(rep.d * rep.d);
                for r in 0..rep.d {
                    for c in 0..rep.d {
                        entries.push(m.entry(r, c).to_string());
                    }
                }
                (name, entries)
            })
            .collect();
        ConfigFile {
            kind: rep.model.kind,
            p: rep.model.p,
            dim: rep.d,
            genus: rep.surface.genus,
            boundary_count: rep.surface.boundaries,
            gens,
            boundary_overrides: Vec::new(),
            inverts: Vec::new(),
            cutoff: Some(rep.cutoff),
            window: Some(rep.window),
        }
    }
}
