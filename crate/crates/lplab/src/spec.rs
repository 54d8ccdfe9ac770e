//! Text grammar for space specifications, e.g. `besov:s=-0.5,p=6,q=inf` or
//! `cn:base=lebesgue:p=3,N=4`.

use std::collections::BTreeMap;
use std::path::Path;

use lplab_core::eta::EtaSequence;
use lplab_core::geometry::PointSet;
use lplab_core::norms::{Exp, SpaceSpec};
use lplab_core::Grid;

use crate::error::{parse_err, AppError, AppResult};

/// Splits on commas outside parentheses.
fn split_top(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

fn keyvals(rest: &str, allowed: &[&str]) -> AppResult<BTreeMap<String, String>> {
    let mut m = BTreeMap::new();
    if rest.trim().is_empty() {
        return Ok(m);
    }
    for part in split_top(rest) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| AppError::Parse(format!("expected key=value, found '{part}'")))?;
        let k = k.trim();
        if !allowed.contains(&k) {
            return parse_err(format!("unknown key '{k}'"));
        }
        if m.insert(k.to_string(), v.trim().to_string()).is_some() {
            return parse_err(format!("duplicate key '{k}'"));
        }
    }
    Ok(m)
}

pub fn parse_f64(s: &str) -> AppResult<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| AppError::Parse(format!("not a number: '{s}'")))?;
    if !v.is_finite() {
        return parse_err(format!("not a finite number: '{s}'"));
    }
    Ok(v)
}

pub fn parse_exp(s: &str) -> AppResult<Exp> {
    match s.trim() {
        "inf" | "infinity" | "∞" => Ok(Exp::Inf),
        other => Ok(Exp::Finite(parse_f64(other)?)),
    }
}

fn need<'a>(m: &'a BTreeMap<String, String>, k: &str) -> AppResult<&'a str> {
    m.get(k)
        .map(|s| s.as_str())
        .ok_or_else(|| AppError::Parse(format!("missing key '{k}'")))
}

/// η values from a CSV file: one value per line, or `n,value` rows (first n sets the start).
pub fn read_eta_csv(path: &Path) -> AppResult<EtaSequence> {
    let text = std::fs::read_to_string(path)?;
    let mut n_lo = None;
    let mut values = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(|c| c.trim()).collect();
        let parsed: Result<Vec<f64>, _> = cols.iter().map(|c| c.parse::<f64>()).collect();
        let Ok(nums) = parsed else {
            if values.is_empty() {
                continue; // header
            }
            return parse_err(format!("bad eta row '{line}'"));
        };
        match nums.as_slice() {
            [v] => values.push(*v),
            [n, v] => {
                if n_lo.is_none() {
                    n_lo = Some(*n as i32);
                }
                values.push(*v);
            }
            _ => return parse_err(format!("bad eta row '{line}'")),
        }
    }
    Ok(EtaSequence::new(n_lo.unwrap_or(0), values)?)
}

/// Point-set file: JSON list of coordinate arrays (2 or 3 entries each).
pub fn read_point_set(path: &Path) -> AppResult<PointSet> {
    let pts: Vec<Vec<f64>> = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let mut out = Vec::with_capacity(pts.len());
    for p in pts {
        if p.len() < 2 || p.len() > 3 {
            return parse_err("point coordinates must have 2 or 3 entries");
        }
        let mut q = [0.0; 3];
        q[..p.len()].copy_from_slice(&p);
        out.push(q);
    }
    Ok(PointSet::from_points(out))
}

/// `point(x,y[,z])`, `plane(axis[,offset])` or `file(path)`.
pub fn parse_set(s: &str, grid: &Grid) -> AppResult<PointSet> {
    let s = s.trim();
    let (head, inner) = s
        .split_once('(')
        .and_then(|(h, r)| r.strip_suffix(')').map(|i| (h.trim(), i)))
        .ok_or_else(|| AppError::Parse(format!("bad set '{s}'")))?;
    match head {
        "point" => {
            let c: Vec<f64> = inner.split(',').map(parse_f64).collect::<AppResult<_>>()?;
            if c.len() < 2 || c.len() > 3 {
                return parse_err("point needs 2 or 3 coordinates");
            }
            let mut p = [0.0; 3];
            p[..c.len()].copy_from_slice(&c);
            Ok(PointSet::point(p))
        }
        "plane" => {
            let parts: Vec<&str> = inner.split(',').collect();
            let axis: usize = parts[0]
                .trim()
                .parse()
                .map_err(|_| AppError::Parse("plane axis must be an integer".into()))?;
            if axis >= grid.dim {
                return parse_err("plane axis outside the grid dimension");
            }
            let offset = if parts.len() > 1 {
                parse_f64(parts[1])?
            } else {
                0.0
            };
            Ok(PointSet::plane(grid, axis, offset))
        }
        "file" => read_point_set(Path::new(inner.trim())),
        _ => parse_err(format!("unknown set kind '{head}'")),
    }
}

/// Parses and validates a space specification; `grid` resolves plane sets.
pub fn parse_space(s: &str, grid: &Grid) -> AppResult<SpaceSpec> {
    let s = s.trim();
    let (name, rest) = s.split_once(':').unwrap_or((s, ""));
    let spec = match name {
        "lebesgue" => {
            let m = keyvals(rest, &["p"])?;
            SpaceSpec::Lebesgue {
                p: parse_exp(need(&m, "p")?)?,
            }
        }
        "lorentz" => {
            let m = keyvals(rest, &["p", "q"])?;
            SpaceSpec::Lorentz {
                p: parse_f64(need(&m, "p")?)?,
                q: parse_exp(need(&m, "q")?)?,
            }
        }
        "besov" => {
            let m = keyvals(rest, &["s", "p", "q"])?;
            SpaceSpec::BesovHom {
                s: parse_f64(need(&m, "s")?)?,
                p: parse_exp(need(&m, "p")?)?,
                q: parse_exp(need(&m, "q")?)?,
            }
        }
        "triebel" => {
            let m = keyvals(rest, &["s", "p", "q"])?;
            SpaceSpec::TriebelHom {
                s: parse_f64(need(&m, "s")?)?,
                p: parse_f64(need(&m, "p")?)?,
                q: parse_f64(need(&m, "q")?)?,
            }
        }
        "morrey" => {
            let m = keyvals(rest, &["p", "q"])?;
            SpaceSpec::Morrey {
                p: parse_f64(need(&m, "p")?)?,
                q: parse_f64(need(&m, "q")?)?,
            }
        }
        "bom" => {
            let m = keyvals(rest, &["p", "q", "r"])?;
            SpaceSpec::BesovOverMorrey {
                p: parse_f64(need(&m, "p")?)?,
                q: parse_f64(need(&m, "q")?)?,
                r: parse_exp(need(&m, "r")?)?,
            }
        }
        "fq" => {
            let m = keyvals(rest, &["q"])?;
            SpaceSpec::FourierFq {
                q: parse_exp(need(&m, "q")?)?,
            }
        }
        "meta" => {
            let m = keyvals(rest, &["eta"])?;
            SpaceSpec::MetaEta {
                eta: read_eta_csv(Path::new(need(&m, "eta")?))?,
            }
        }
        "micro" => {
            let m = keyvals(rest, &["sp", "set"])?;
            SpaceSpec::TwoMicrolocal {
                sp: parse_f64(need(&m, "sp")?)?,
                set: parse_set(need(&m, "set")?, grid)?,
            }
        }
        "cn" | "bn" => {
            let body = rest
                .strip_prefix("base=")
                .ok_or_else(|| AppError::Parse(format!("{name} needs base=<spec> first")))?;
            let (base, n) = match body.rfind(",N=") {
                Some(i) => (&body[..i], &body[i + 3..]),
                None => (body, "4"),
            };
            let n: u32 = n
                .trim()
                .parse()
                .map_err(|_| AppError::Parse(format!("bad N '{n}'")))?;
            let base = Box::new(parse_space(base, grid)?);
            if name == "cn" {
                SpaceSpec::DerivedCN { base, n }
            } else {
                SpaceSpec::DerivedBN { base, n }
            }
        }
        _ => return parse_err(format!("unknown space '{name}'")),
    };
    spec.validate()?;
    Ok(spec)
}
