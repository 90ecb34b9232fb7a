//! Text formats: `key = value` files, CSV field dumps, the configuration
//! container and gnuplot grids.
//!
//! A field dump is
//!
//! ```text
//! # field = psi1
//! i,j,x1,x2,re,im
//! 0,0,0e0,0e0,1.4142135623730951e0,0e0
//! ...
//! ```
//!
//! in row-major order (`i` indexes `x₁`). Numbers are written in shortest
//! round-trip form, so reading a dump back is exact.
//!
//! A configuration container is a manifest of `key = value` lines followed by
//! one `[field <name>]` section per field, each holding a dump.

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SwError};
use crate::fields::Configuration;
use crate::surface::{ScalarField, TorusGrid, C64};

/// Ordered `key = value` pairs. Blank lines and `#` comments are skipped;
/// duplicate keys are rejected.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| SwError::Config(format!("line {}: expected `key = value`, got {raw:?}", lineno + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(SwError::Config(format!("line {}: empty key", lineno + 1)));
        }
        if out.iter().any(|(seen, _)| seen == k) {
            return Err(SwError::Config(format!("line {}: duplicate key {k:?}", lineno + 1)));
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}

pub fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| SwError::Config(format!("invalid value {value:?} for {key}")))
}

pub fn write_field_csv(mut w: impl Write, name: &str, f: &ScalarField) -> Result<()> {
    let g = f.grid();
    let mut s = String::with_capacity(64 * g.len());
    writeln!(s, "# field = {name}").unwrap();
    writeln!(s, "i,j,x1,x2,re,im").unwrap();
    for i in 0..g.n() {
        for j in 0..g.n() {
            let idx = g.index(i, j);
            let (x1, x2) = g.coords(idx);
            let v = f.values()[idx];
            writeln!(s, "{i},{j},{x1:e},{x2:e},{:e},{:e}", v.re, v.im).unwrap();
        }
    }
    w.write_all(s.as_bytes())?;
    Ok(())
}

/// Reads a dump produced by [`write_field_csv`]; returns the field name.
pub fn read_field_csv(text: &str, grid: TorusGrid) -> Result<(String, ScalarField)> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let name = lines
        .next()
        .and_then(|l| l.strip_prefix('#'))
        .and_then(|l| l.split_once('='))
        .filter(|(k, _)| k.trim() == "field")
        .map(|(_, v)| v.trim().to_string())
        .ok_or_else(|| SwError::Parse("field dump must start with `# field = <name>`".into()))?;
    if lines.next() != Some("i,j,x1,x2,re,im") {
        return Err(SwError::Parse(format!("field {name}: missing column header i,j,x1,x2,re,im")));
    }
    let mut values = vec![C64::new(f64::NAN, f64::NAN); grid.len()];
    let mut count = 0;
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 6 {
            return Err(SwError::Parse(format!("field {name}: expected 6 columns in {line:?}")));
        }
        let num = |k: usize| -> Result<f64> {
            cols[k].trim().parse().map_err(|_| SwError::Parse(format!("field {name}: bad number {:?}", cols[k])))
        };
        let idx = |k: usize| -> Result<usize> {
            let v: usize =
                cols[k].trim().parse().map_err(|_| SwError::Parse(format!("field {name}: bad index {:?}", cols[k])))?;
            if v >= grid.n() {
                return Err(SwError::Parse(format!("field {name}: index {v} outside grid n = {}", grid.n())));
            }
            Ok(v)
        };
        values[grid.index(idx(0)?, idx(1)?)] = C64::new(num(4)?, num(5)?);
        count += 1;
    }
    if count != grid.len() || values.iter().any(|v| v.re.is_nan()) {
        return Err(SwError::Parse(format!("field {name}: expected {} distinct samples, got {count}", grid.len())));
    }
    Ok((name, ScalarField::from_values(grid, values)?))
}

/// Manifest of a configuration container.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub n: usize,
    pub side: f64,
    /// How the fields were produced, e.g. `explicit`, `perturbed`, `solve`.
    pub provenance: String,
    pub seed: Option<u64>,
    pub c2: Option<f64>,
    pub phase: Option<f64>,
}

impl Manifest {
    pub fn new(grid: &TorusGrid, provenance: &str) -> Self {
        Self { n: grid.n(), side: grid.side(), provenance: provenance.into(), seed: None, c2: None, phase: None }
    }
}

const FIELD_NAMES: [&str; 4] = ["a", "psi1", "psi2", "phi"];

pub fn write_configuration(mut w: impl Write, c: &Configuration, m: &Manifest) -> Result<()> {
    if m.n != c.grid().n() || m.side != c.grid().side() {
        return Err(SwError::GridMismatch);
    }
    writeln!(w, "# swred configuration")?;
    writeln!(w, "n = {}", m.n)?;
    writeln!(w, "side = {:e}", m.side)?;
    writeln!(w, "provenance = {}", m.provenance)?;
    if let Some(s) = m.seed {
        writeln!(w, "seed = {s}")?;
    }
    if let Some(v) = m.c2 {
        writeln!(w, "c2 = {v:e}")?;
    }
    if let Some(v) = m.phase {
        writeln!(w, "phase = {v:e}")?;
    }
    for (name, f) in FIELD_NAMES.iter().zip([c.a(), c.psi1(), c.psi2(), c.phi()]) {
        writeln!(w, "[field {name}]")?;
        write_field_csv(&mut w, name, f)?;
    }
    Ok(())
}

pub fn read_configuration(text: &str) -> Result<(Configuration, Manifest)> {
    let (head, rest) = match text.find("\n[field ") {
        Some(k) => (&text[..k], &text[k + 1..]),
        None => return Err(SwError::Parse("configuration has no [field ...] sections".into())),
    };
    let mut n = None;
    let mut side = None;
    let mut m = Manifest { n: 0, side: 0.0, provenance: String::new(), seed: None, c2: None, phase: None };
    for (k, v) in parse_key_values(head)? {
        match k.as_str() {
            "n" => n = Some(parse_value::<usize>(&k, &v)?),
            "side" => side = Some(parse_value::<f64>(&k, &v)?),
            "provenance" => m.provenance = v,
            "seed" => m.seed = Some(parse_value(&k, &v)?),
            "c2" => m.c2 = Some(parse_value(&k, &v)?),
            "phase" => m.phase = Some(parse_value(&k, &v)?),
            other => return Err(SwError::Config(format!("unknown manifest key {other:?}"))),
        }
    }
    let (n, side) = (
        n.ok_or_else(|| SwError::Config("manifest lacks n".into()))?,
        side.ok_or_else(|| SwError::Config("manifest lacks side".into()))?,
    );
    let grid = TorusGrid::new(n, side)?;
    (m.n, m.side) = (n, side);

    let mut fields: [Option<ScalarField>; 4] = Default::default();
    for section in rest.split("[field ").filter(|s| !s.trim().is_empty()) {
        let (label, body) = section
            .split_once(']')
            .ok_or_else(|| SwError::Parse("unterminated [field ...] header".into()))?;
        let slot = FIELD_NAMES
            .iter()
            .position(|&f| f == label.trim())
            .ok_or_else(|| SwError::Parse(format!("unknown field section {label:?}")))?;
        let (name, f) = read_field_csv(body, grid)?;
        if name != label.trim() {
            return Err(SwError::Parse(format!("section {label:?} holds field {name:?}")));
        }
        if fields[slot].replace(f).is_some() {
            return Err(SwError::Parse(format!("duplicate field section {label:?}")));
        }
    }
    let [Some(a), Some(psi1), Some(psi2), Some(phi)] = fields else {
        return Err(SwError::Parse("configuration must hold fields a, psi1, psi2, phi".into()));
    };
    Ok((Configuration::new(a, psi1, psi2, phi)?, m))
}

pub fn save_configuration(path: &Path, c: &Configuration, m: &Manifest) -> Result<()> {
    let mut buf = Vec::new();
    write_configuration(&mut buf, c, m)?;
    std::fs::write(path, buf)?;
    Ok(())
}

pub fn load_configuration(path: &Path) -> Result<(Configuration, Manifest)> {
    read_configuration(&std::fs::read_to_string(path)?)
}

/// Real samples in gnuplot `splot` layout: `x1 x2 value`, one blank line
/// after each `x₁` row.
pub fn write_gnuplot_grid(mut w: impl Write, grid: &TorusGrid, values: &[f64]) -> Result<()> {
    if values.len() != grid.len() {
        return Err(SwError::GridMismatch);
    }
    let mut s = String::new();
    for i in 0..grid.n() {
        for j in 0..grid.n() {
            let idx = grid.index(i, j);
            let (x1, x2) = grid.coords(idx);
            writeln!(s, "{x1} {x2} {}", values[idx]).unwrap();
        }
        s.push('\n');
    }
    w.write_all(s.as_bytes())?;
    Ok(())
}

/// Writes `|ψ₁|`, `|ψ₂|`, `|φ|` and the residual energy density as `.dat`
/// grids into `dir`; returns the file names.
pub fn write_plot_data(dir: &Path, c: &Configuration) -> Result<Vec<String>> {
    std::fs::create_dir_all(dir)?;
    let r = crate::equations::ResidualBundle::evaluate(c);
    let density: Vec<f64> = (0..c.grid().len())
        .map(|k| {
            r.r1.f.values()[k].norm_sqr()
                + r.r2.f.values()[k].norm_sqr()
                + r.r3a.values()[k].norm_sqr()
                + r.r3b.values()[k].norm_sqr()
        })
        .collect();
    let abs = |f: &ScalarField| f.values().iter().map(|v| v.norm()).collect::<Vec<_>>();
    let mut names = Vec::new();
    for (name, values) in [
        ("psi1_abs.dat", abs(c.psi1())),
        ("psi2_abs.dat", abs(c.psi2())),
        ("phi_abs.dat", abs(c.phi())),
        ("residual_density.dat", density),
    ] {
        let file = std::fs::File::create(dir.join(name))?;
        write_gnuplot_grid(std::io::BufWriter::new(file), c.grid(), &values)?;
        names.push(name.to_string());
    }
    Ok(names)
}

/// Reads `key = value` text from a reader.
pub fn read_key_values(r: impl BufRead) -> Result<Vec<(String, String)>> {
    let mut text = String::new();
    for line in r.lines() {
        text.push_str(&line?);
        text.push('\n');
    }
    parse_key_values(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{explicit_torus_solution, random_bandlimited_configuration};

    #[test]
    fn key_values_skip_comments_and_reject_duplicates() {
        let kv = parse_key_values("# top\nn = 16\n\nside=6.5 # trailing\n").unwrap();
        assert_eq!(kv, vec![("n".into(), "16".into()), ("side".into(), "6.5".into())]);
        assert!(parse_key_values("n = 1\nn = 2").is_err());
        assert!(parse_key_values("just text").is_err());
        assert!(parse_key_values(" = 3").is_err());
        assert!(parse_value::<usize>("n", "x").is_err());
    }

    #[test]
    fn field_dump_round_trips_exactly() {
        let g = TorusGrid::new(8, 3.0).unwrap();
        let c = random_bandlimited_configuration(g, 4, 2, 1.0).unwrap();
        let mut buf = Vec::new();
        write_field_csv(&mut buf, "psi2", c.psi2()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# field = psi2"));
        assert_eq!(lines.next(), Some("i,j,x1,x2,re,im"));
        assert!(lines.next().unwrap().starts_with("0,0,"));
        assert!(lines.next().unwrap().starts_with("0,1,"));
        let (name, f) = read_field_csv(&text, g).unwrap();
        assert_eq!(name, "psi2");
        assert_eq!(&f, c.psi2());
    }

    #[test]
    fn truncated_dump_is_rejected() {
        let g = TorusGrid::square(8).unwrap();
        let mut buf = Vec::new();
        write_field_csv(&mut buf, "a", &ScalarField::zeros(g)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let short: String = text.lines().take(10).map(|l| format!("{l}\n")).collect();
        assert!(read_field_csv(&short, g).is_err());
        assert!(read_field_csv(&text, TorusGrid::square(4).unwrap()).is_err());
        assert!(read_field_csv("i,j,x1,x2,re,im\n", g).is_err());
    }

    #[test]
    fn configuration_round_trips() {
        let g = TorusGrid::square(8).unwrap();
        let c = explicit_torus_solution(g, 1.0, 0.3).unwrap();
        let m = Manifest { seed: Some(7), c2: Some(1.0), phase: Some(0.3), ..Manifest::new(&g, "explicit") };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.cfg");
        save_configuration(&path, &c, &m).unwrap();
        let (back, m2) = load_configuration(&path).unwrap();
        assert_eq!(back, c);
        assert_eq!(m2, m);
    }

    #[test]
    fn configuration_errors() {
        let g = TorusGrid::square(4).unwrap();
        let c = Configuration::zeros(g);
        let mut buf = Vec::new();
        write_configuration(&mut buf, &c, &Manifest::new(&g, "zeros")).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(read_configuration(&text.replace("provenance", "origin")).is_err());
        let missing_phi = &text[..text.find("[field phi]").unwrap()];
        assert!(read_configuration(missing_phi).is_err());
        assert!(read_configuration("n = 4\nside = 1\n").is_err());
        assert!(write_configuration(Vec::new(), &c, &Manifest::new(&TorusGrid::square(8).unwrap(), "x")).is_err());
    }

    #[test]
    fn gnuplot_layout() {
        let g = TorusGrid::square(4).unwrap();
        let mut buf = Vec::new();
        write_gnuplot_grid(&mut buf, &g, &[1.0; 16]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 16 + 4);
        assert_eq!(text.lines().nth(4), Some(""));
        let dir = tempfile::tempdir().unwrap();
        let names = write_plot_data(dir.path(), &explicit_torus_solution(g, 1.0, 0.0).unwrap()).unwrap();
        assert_eq!(names.len(), 4);
        assert!(dir.path().join("residual_density.dat").exists());
    }
}
