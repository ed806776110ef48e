use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};

use crate::cccp::{DenseCccp, SmoothTerm};
use crate::matcone::{BlockShape, ConeBlock, ConeProduct, MatconeError, ProxSpec, SymMatrix};
use crate::qsdp::{EMap, HOperator, QsdpData};

use super::{build_example1, build_example2, build_ncm, gen_random_ncm, InstanceError, Result};

fn parse_err(file: &Path, line: Option<usize>, message: impl Into<String>) -> InstanceError {
    InstanceError::Parse { file: file.display().to_string(), line, message: message.into() }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| InstanceError::Io { path: path.display().to_string(), source })
}

/// Parses a Matrix Market `array` or `coordinate` file of real numbers.
/// A `symmetric` qualifier mirrors the stored lower triangle.
pub fn parse_matrix_market(text: &str, file: &Path) -> Result<DMatrix<f64>> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (hl, header) = lines.next().ok_or_else(|| parse_err(file, Some(1), "empty file"))?;
    let words: Vec<String> = header.split_whitespace().map(|w| w.to_ascii_lowercase()).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(parse_err(file, Some(hl), "expected '%%MatrixMarket matrix <format> real <symmetry>'"));
    }
    let coordinate = match words[2].as_str() {
        "array" => false,
        "coordinate" => true,
        other => return Err(parse_err(file, Some(hl), format!("unsupported format '{other}'"))),
    };
    if words[3] != "real" && words[3] != "integer" {
        return Err(parse_err(file, Some(hl), format!("unsupported field '{}'", words[3])));
    }
    let symmetric = match words[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(parse_err(file, Some(hl), format!("unsupported symmetry '{other}'"))),
    };
    let mut data = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (sl, size) = data.next().ok_or_else(|| parse_err(file, None, "missing size line"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| parse_err(file, Some(sl), format!("bad size entry '{t}'"))))
        .collect::<Result<_>>()?;
    let want = if coordinate { 3 } else { 2 };
    if dims.len() != want {
        return Err(parse_err(file, Some(sl), format!("size line needs {want} integers")));
    }
    let (rows, cols) = (dims[0], dims[1]);
    if symmetric && rows != cols {
        return Err(parse_err(file, Some(sl), format!("symmetric matrix must be square, got {rows}x{cols}")));
    }
    let mut m = DMatrix::zeros(rows, cols);
    let number = |t: &str, line: usize| -> Result<f64> {
        t.parse::<f64>().map_err(|_| parse_err(file, Some(line), format!("bad number '{t}'")))
    };
    if coordinate {
        let mut count = 0;
        for (line, l) in data {
            let t: Vec<&str> = l.split_whitespace().collect();
            if t.len() != 3 {
                return Err(parse_err(file, Some(line), "coordinate entry needs 'i j value'"));
            }
            let idx = |s: &str, bound: usize| -> Result<usize> {
                match s.parse::<usize>() {
                    Ok(v) if v >= 1 && v <= bound => Ok(v - 1),
                    _ => Err(parse_err(file, Some(line), format!("index '{s}' out of range 1..={bound}"))),
                }
            };
            let (i, j, v) = (idx(t[0], rows)?, idx(t[1], cols)?, number(t[2], line)?);
            m[(i, j)] = v;
            if symmetric {
                m[(j, i)] = v;
            }
            count += 1;
        }
        if count != dims[2] {
            return Err(parse_err(file, None, format!("expected {} entries, found {count}", dims[2])));
        }
    } else {
        let positions: Vec<(usize, usize)> = if symmetric {
            (0..cols).flat_map(|j| (j..rows).map(move |i| (i, j))).collect()
        } else {
            (0..cols).flat_map(|j| (0..rows).map(move |i| (i, j))).collect()
        };
        let mut values = Vec::with_capacity(positions.len());
        for (line, l) in data {
            for t in l.split_whitespace() {
                values.push(number(t, line)?);
            }
        }
        if values.len() != positions.len() {
            return Err(parse_err(
                file,
                None,
                format!("expected {} values for a {rows}x{cols} array, found {}", positions.len(), values.len()),
            ));
        }
        for ((i, j), v) in positions.into_iter().zip(values) {
            m[(i, j)] = v;
            if symmetric {
                m[(j, i)] = v;
            }
        }
    }
    Ok(m)
}

pub fn read_matrix_market(path: &Path) -> Result<DMatrix<f64>> {
    parse_matrix_market(&read_text(path)?, path)
}

/// Matrix Market `array` text; exactly symmetric square matrices are
/// written with the `symmetric` qualifier. Values round-trip bit-exactly.
pub fn matrix_market_string(m: &DMatrix<f64>) -> String {
    let symmetric = m.is_square() && m == &m.transpose();
    let mut out = format!(
        "%%MatrixMarket matrix array real {}\n{} {}\n",
        if symmetric { "symmetric" } else { "general" },
        m.nrows(),
        m.ncols()
    );
    for j in 0..m.ncols() {
        let start = if symmetric { j } else { 0 };
        for i in start..m.nrows() {
            let _ = writeln!(out, "{:e}", m[(i, j)]);
        }
    }
    out
}

pub fn write_matrix_market(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    fs::write(path, matrix_market_string(m))
        .map_err(|source| InstanceError::Io { path: path.display().to_string(), source })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InstanceKind {
    Example1,
    Example2,
    Ncm,
    QsdpFile,
    CccpFile,
}

impl InstanceKind {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "example1" => InstanceKind::Example1,
            "example2" => InstanceKind::Example2,
            "ncm" => InstanceKind::Ncm,
            "qsdp-file" => InstanceKind::QsdpFile,
            "cccp-file" => InstanceKind::CccpFile,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            InstanceKind::Example1 => "example1",
            InstanceKind::Example2 => "example2",
            InstanceKind::Ncm => "ncm",
            InstanceKind::QsdpFile => "qsdp-file",
            InstanceKind::CccpFile => "cccp-file",
        }
    }
}

/// A parsed `key = value` manifest. Blank lines and lines starting with `#`
/// are ignored; keys are unique. Keys the loader does not use (solver
/// settings, for instance) are kept for the caller.
#[derive(Clone, Debug)]
pub struct InstanceManifest {
    path: PathBuf,
    kind: InstanceKind,
    entries: BTreeMap<String, (String, usize)>,
}

impl InstanceManifest {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| parse_err(path, Some(i + 1), format!("expected key = value, got '{line}'")))?;
            let (k, v) = (k.trim().to_string(), v.trim().to_string());
            if k.is_empty() {
                return Err(parse_err(path, Some(i + 1), "empty key"));
            }
            if entries.insert(k.clone(), (v, i + 1)).is_some() {
                return Err(parse_err(path, Some(i + 1), format!("duplicate key '{k}'")));
            }
        }
        let (kind_str, line) = entries.get("kind").ok_or_else(|| parse_err(path, None, "missing field 'kind'"))?;
        let kind = InstanceKind::parse(kind_str)
            .ok_or_else(|| parse_err(path, Some(*line), format!("field 'kind': unknown instance kind '{kind_str}'")))?;
        Ok(InstanceManifest { path: path.to_path_buf(), kind, entries })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&read_text(path)?, path)
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn kind(&self) -> InstanceKind {
        self.kind
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    fn require(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| parse_err(&self.path, None, format!("missing field '{key}'")))
    }

    /// Parses field `key`, reporting its line on failure.
    pub fn parse_field<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse()
                .map(Some)
                .map_err(|_| parse_err(&self.path, Some(*line), format!("field '{key}': cannot parse '{v}'"))),
        }
    }

    /// Path of file field `key`, relative to the manifest's directory.
    pub fn file(&self, key: &str) -> Result<PathBuf> {
        let rel = self.require(key)?;
        Ok(self.path.parent().unwrap_or(Path::new(".")).join(rel))
    }

    fn matrix(&self, key: &str) -> Result<DMatrix<f64>> {
        read_matrix_market(&self.file(key)?)
    }

    fn sym(&self, key: &str) -> Result<SymMatrix> {
        let path = self.file(key)?;
        let m = read_matrix_market(&path)?;
        if !m.is_square() {
            return Err(parse_err(&path, None, format!("expected a square matrix, got {}x{}", m.nrows(), m.ncols())));
        }
        SymMatrix::new(m).map_err(|e| match e {
            MatconeError::NonSymmetric { max_asym } => InstanceError::InvariantViolation(format!(
                "symmetry: '{key}' ({}) has asymmetry {max_asym:e}",
                path.display()
            )),
            other => other.into(),
        })
    }

    fn vector(&self, key: &str) -> Result<DVector<f64>> {
        let path = self.file(key)?;
        let m = read_matrix_market(&path)?;
        if m.ncols() != 1 {
            return Err(parse_err(&path, None, format!("expected a column vector, got {}x{}", m.nrows(), m.ncols())));
        }
        Ok(m.column(0).into_owned())
    }
}

/// A problem ready for one of the two solver engines.
#[derive(Clone, Debug)]
pub enum Instance {
    Cccp(DenseCccp),
    Qsdp(QsdpData),
}

/// Reads a manifest and builds the instance it describes.
///
/// Recognized fields per kind:
/// - `ncm`: `g` and `mask` files, or `n`, `seed`, `missing_fraction`;
/// - `qsdp-file`: `h_weights`, `c`, `b` files (diagonal `E`);
/// - `cccp-file`: `blocks`, `prox`, `cone`, files `bmat`, `b`, `c`,
///   optional `a` and `shift` (the latter selects `h = 1/2||w - shift||^2`).
pub fn load_instance(path: &Path) -> Result<(InstanceManifest, Instance)> {
    let manifest = InstanceManifest::from_file(path)?;
    let instance = instance_from_manifest(&manifest)?;
    Ok((manifest, instance))
}

pub fn instance_from_manifest(mf: &InstanceManifest) -> Result<Instance> {
    Ok(match mf.kind {
        InstanceKind::Example1 => Instance::Cccp(build_example1()),
        InstanceKind::Example2 => Instance::Cccp(build_example2()),
        InstanceKind::Ncm => {
            let (g, mask) = if mf.get("g").is_some() {
                (mf.sym("g")?, mf.sym("mask")?)
            } else {
                let n = mf.parse_field("n")?.ok_or_else(|| parse_err(&mf.path, None, "missing field 'n' (or 'g')"))?;
                let seed = mf.parse_field("seed")?.unwrap_or(0);
                let frac = mf.parse_field("missing_fraction")?.unwrap_or(0.0);
                gen_random_ncm(n, seed, frac)?
            };
            Instance::Qsdp(build_ncm(&g, &mask)?)
        }
        InstanceKind::QsdpFile => {
            let w = mf.sym("h_weights")?;
            let c = mf.sym("c")?;
            let b = mf.vector("b")?;
            if w.order() != c.order() || b.len() != c.order() {
                return Err(InstanceError::InvariantViolation(format!(
                    "dimensions: h_weights {}, c {}, b {}",
                    w.order(),
                    c.order(),
                    b.len()
                )));
            }
            Instance::Qsdp(QsdpData::new(HOperator::Hadamard { weights: w }, EMap::Diagonal, c, b)?)
        }
        InstanceKind::CccpFile => Instance::Cccp(load_cccp(mf)?),
    })
}

fn split_spec<'a>(mf: &'a InstanceManifest, key: &str) -> Result<Vec<(&'a str, Option<usize>)>> {
    let line = mf.entries.get(key).map(|(_, l)| *l);
    mf.require(key)?
        .split(',')
        .map(|item| {
            let item = item.trim();
            match item.split_once(':') {
                None => Ok((item, None)),
                Some((name, d)) => d
                    .trim()
                    .parse()
                    .map(|d| (name.trim(), Some(d)))
                    .map_err(|_| parse_err(&mf.path, line, format!("field '{key}': bad size in '{item}'"))),
            }
        })
        .collect()
}

fn load_cccp(mf: &InstanceManifest) -> Result<DenseCccp> {
    let line = |k: &str| mf.entries.get(k).map(|(_, l)| *l);
    let bad = |k: &str, item: &str| parse_err(&mf.path, line(k), format!("field '{k}': unknown item '{item}'"));
    let shapes = split_spec(mf, "blocks")?
        .into_iter()
        .map(|(name, d)| match (name, d) {
            ("vec", Some(d)) => Ok(BlockShape::Vector(d)),
            ("sym", Some(d)) => Ok(BlockShape::Sym(d)),
            _ => Err(bad("blocks", name)),
        })
        .collect::<Result<Vec<_>>>()?;
    let prox = split_spec(mf, "prox")?
        .into_iter()
        .zip(&shapes)
        .map(|((name, _), shape)| match (name, *shape) {
            ("zero", _) => Ok(ProxSpec::ZeroFunction),
            ("psd", BlockShape::Sym(n)) => Ok(ProxSpec::IndicatorPsd(n)),
            ("nonneg", BlockShape::Vector(d)) => Ok(ProxSpec::IndicatorCone(ConeBlock::Nonneg(d))),
            ("nonpos", BlockShape::Vector(d)) => Ok(ProxSpec::IndicatorCone(ConeBlock::Nonpos(d))),
            _ => Err(bad("prox", name)),
        })
        .collect::<Result<Vec<_>>>()?;
    if prox.len() != shapes.len() {
        return Err(parse_err(&mf.path, line("prox"), "field 'prox': one entry per block required"));
    }
    let cone = split_spec(mf, "cone")?
        .into_iter()
        .map(|(name, d)| match (name, d) {
            ("zero", Some(d)) => Ok(ConeBlock::Zero(d)),
            ("nonneg", Some(d)) => Ok(ConeBlock::Nonneg(d)),
            ("nonpos", Some(d)) => Ok(ConeBlock::Nonpos(d)),
            ("psd", Some(d)) => Ok(ConeBlock::Psd(d)),
            _ => Err(bad("cone", name)),
        })
        .collect::<Result<Vec<_>>>()?;
    let cone = ConeProduct::new(cone)?;
    let bmat = mf.matrix("bmat")?;
    let n = bmat.ncols();
    let a = if mf.get("a").is_some() { mf.matrix("a")? } else { DMatrix::zeros(0, n) };
    let smooth =
        if mf.get("shift").is_some() { SmoothTerm::Quadratic { shift: mf.vector("shift")? } } else { SmoothTerm::Zero };
    DenseCccp::new(shapes, prox, cone, a, bmat, mf.vector("b")?, mf.vector("c")?, smooth)
        .map_err(|e| InstanceError::InvariantViolation(format!("dimensions: {e}")))
}

/// Writes `g.mtx`, `mask.mtx` and `<name>.manifest` into `dir` and returns
/// the manifest path.
pub fn write_ncm_instance(dir: &Path, name: &str, g: &SymMatrix, mask: &SymMatrix) -> Result<PathBuf> {
    let g_name = format!("{name}_g.mtx");
    let mask_name = format!("{name}_mask.mtx");
    write_matrix_market(&dir.join(&g_name), g.as_matrix())?;
    write_matrix_market(&dir.join(&mask_name), mask.as_matrix())?;
    let path = dir.join(format!("{name}.manifest"));
    let text = format!("kind = ncm\ng = {g_name}\nmask = {mask_name}\n");
    fs::write(&path, text).map_err(|source| InstanceError::Io { path: path.display().to_string(), source })?;
    Ok(path)
}
