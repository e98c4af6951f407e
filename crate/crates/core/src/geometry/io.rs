//! Shape literals and the plain-text domain file format.
//!
//! A domain file is a small header followed by the node mask:
//!
//! ```text
//! # comments are allowed in the header
//! h 0.015625
//! nx 68
//! ny 68
//! origin -0.03125 -0.03125
//! convex 1
//! 0000…0000        <- row j = 0 (lowest y), nx characters
//! …                <- ny rows in total
//! ```
//!
//! Mask rows hold one `0`/`1` character per node and run from the lowest to the highest
//! `y`; the outermost rows and columns must be `0`.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};

use super::GridDomain;

/// A domain given either as a shape literal or as a mask file.
#[derive(Clone, Debug, PartialEq)]
pub enum DomainSpec {
    /// `disk:r=<radius>`, centred at the origin.
    Disk { radius: f64 },
    /// `rect:w=<width>,h=<height>`, the rectangle `(0,w) × (0,h)`.
    Rect { width: f64, height: f64 },
    /// `lshape:s=<side>`, the hexagon `[0,2s]² \ [s,2s]²`.
    LShape { side: f64 },
    /// `poly:x1,y1;x2,y2;…`
    Polygon(Vec<[f64; 2]>),
    /// Path to a domain file; the file fixes its own grid spacing.
    File(PathBuf),
}

impl DomainSpec {
    pub fn build(&self, h: f64) -> Result<GridDomain> {
        match self {
            DomainSpec::Disk { radius } => GridDomain::disk(*radius, h),
            DomainSpec::Rect { width, height } => GridDomain::rectangle(*width, *height, h),
            DomainSpec::LShape { side } => GridDomain::l_shape(*side, h),
            DomainSpec::Polygon(v) => GridDomain::polygon(v, h),
            DomainSpec::File(path) => read_domain(path),
        }
    }

    /// The same shape dilated by `t` about the origin.
    pub fn scaled(&self, t: f64) -> Option<DomainSpec> {
        Some(match self {
            DomainSpec::Disk { radius } => DomainSpec::Disk { radius: radius * t },
            DomainSpec::Rect { width, height } => DomainSpec::Rect {
                width: width * t,
                height: height * t,
            },
            DomainSpec::LShape { side } => DomainSpec::LShape { side: side * t },
            DomainSpec::Polygon(v) => {
                DomainSpec::Polygon(v.iter().map(|p| [p[0] * t, p[1] * t]).collect())
            }
            DomainSpec::File(_) => return None,
        })
    }

    pub fn is_file(&self) -> bool {
        matches!(self, DomainSpec::File(_))
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainSpec::Disk { radius } => write!(f, "disk:r={radius}"),
            DomainSpec::Rect { width, height } => write!(f, "rect:w={width},h={height}"),
            DomainSpec::LShape { side } => write!(f, "lshape:s={side}"),
            DomainSpec::Polygon(v) => {
                let pts: Vec<String> = v.iter().map(|p| format!("{},{}", p[0], p[1])).collect();
                write!(f, "poly:{}", pts.join(";"))
            }
            DomainSpec::File(p) => write!(f, "{}", p.display()),
        }
    }
}

fn parse_number(s: &str) -> Result<f64> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (f64, f64) = (
                a.trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad number `{s}`")))?,
                b.trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad number `{s}`")))?,
            );
            a / b
        }
        None => s
            .parse()
            .map_err(|_| Error::Parse(format!("bad number `{s}`")))?,
    };
    if !v.is_finite() {
        return Err(Error::Parse(format!("number `{s}` is not finite")));
    }
    Ok(v)
}

fn parse_params(body: &str, keys: &[&str]) -> Result<Vec<f64>> {
    let mut out = vec![None; keys.len()];
    for part in body.split(',') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got `{part}`")))?;
        let slot = keys
            .iter()
            .position(|key| *key == k.trim())
            .ok_or_else(|| Error::Parse(format!("unknown parameter `{k}`")))?;
        out[slot] = Some(parse_number(v)?);
    }
    out.into_iter()
        .zip(keys)
        .map(|(v, k)| v.ok_or_else(|| Error::Parse(format!("missing parameter `{k}`"))))
        .collect()
}

impl FromStr for DomainSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let Some((kind, body)) = s.split_once(':') else {
            return Ok(DomainSpec::File(PathBuf::from(s)));
        };
        match kind {
            "disk" => {
                let v = parse_params(body, &["r"])?;
                Ok(DomainSpec::Disk { radius: v[0] })
            }
            "rect" => {
                let v = parse_params(body, &["w", "h"])?;
                Ok(DomainSpec::Rect {
                    width: v[0],
                    height: v[1],
                })
            }
            "lshape" => {
                let v = parse_params(body, &["s"])?;
                Ok(DomainSpec::LShape { side: v[0] })
            }
            "poly" => {
                let vertices = body
                    .split(';')
                    .filter(|p| !p.trim().is_empty())
                    .map(|p| {
                        let (x, y) = p
                            .split_once(',')
                            .ok_or_else(|| Error::Parse(format!("bad vertex `{p}`")))?;
                        Ok([parse_number(x)?, parse_number(y)?])
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(DomainSpec::Polygon(vertices))
            }
            _ if Path::new(s).exists() => Ok(DomainSpec::File(PathBuf::from(s))),
            _ => Err(Error::Parse(format!("unknown shape `{kind}`"))),
        }
    }
}

/// Serializes a domain in the text format described in the module docs.
pub fn write_domain_string(dom: &GridDomain) -> String {
    let mut out = String::new();
    out.push_str(&format!("h {:?}\n", dom.h()));
    out.push_str(&format!("nx {}\n", dom.nx()));
    out.push_str(&format!("ny {}\n", dom.ny()));
    out.push_str(&format!(
        "origin {:?} {:?}\n",
        dom.origin()[0],
        dom.origin()[1]
    ));
    out.push_str(&format!("convex {}\n", dom.is_convex() as u8));
    for row in dom.mask().chunks(dom.nx()) {
        out.extend(row.iter().map(|&b| if b { '1' } else { '0' }));
        out.push('\n');
    }
    out
}

pub fn write_domain(dom: &GridDomain, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, write_domain_string(dom))?;
    Ok(())
}

pub fn read_domain(path: impl AsRef<Path>) -> Result<GridDomain> {
    let text = fs::read_to_string(path)?;
    parse_domain(&text)
}

pub fn parse_domain(text: &str) -> Result<GridDomain> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let mut header = |key: &str| -> Result<Vec<String>> {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("missing `{key}` line")))?;
        let mut parts = line.split_whitespace();
        if parts.next() != Some(key) {
            return Err(Error::Parse(format!("expected `{key}`, got `{line}`")));
        }
        Ok(parts.map(String::from).collect())
    };
    let single = |v: Vec<String>, key: &str| -> Result<String> {
        match v.as_slice() {
            [x] => Ok(x.clone()),
            _ => Err(Error::Parse(format!("`{key}` takes one value"))),
        }
    };
    let h = parse_number(&single(header("h")?, "h")?)?;
    let nx: usize = single(header("nx")?, "nx")?
        .parse()
        .map_err(|_| Error::Parse("bad `nx`".into()))?;
    let ny: usize = single(header("ny")?, "ny")?
        .parse()
        .map_err(|_| Error::Parse("bad `ny`".into()))?;
    let origin = header("origin")?;
    if origin.len() != 2 {
        return Err(Error::Parse("`origin` takes two values".into()));
    }
    let origin = [parse_number(&origin[0])?, parse_number(&origin[1])?];
    let convex = match single(header("convex")?, "convex")?.as_str() {
        "0" => false,
        "1" => true,
        other => return Err(Error::Parse(format!("bad convex flag `{other}`"))),
    };

    let mut mask = Vec::with_capacity(nx * ny);
    let mut rows = 0;
    for line in lines {
        if line.chars().count() != nx {
            return Err(Error::Parse(format!(
                "mask row {rows} has {} characters, expected {nx}",
                line.chars().count()
            )));
        }
        for c in line.chars() {
            mask.push(match c {
                '0' => false,
                '1' => true,
                _ => return Err(Error::Parse(format!("bad mask character `{c}`"))),
            });
        }
        rows += 1;
    }
    if rows != ny {
        return Err(Error::Parse(format!("mask has {rows} rows, expected {ny}")));
    }
    GridDomain::from_mask(h, origin, nx, ny, mask, convex)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_literals() {
        assert_eq!(
            "disk:r=1".parse::<DomainSpec>().unwrap(),
            DomainSpec::Disk { radius: 1.0 }
        );
        assert_eq!(
            "rect:w=8,h=1".parse::<DomainSpec>().unwrap(),
            DomainSpec::Rect {
                width: 8.0,
                height: 1.0
            }
        );
        assert_eq!(
            "poly:0,0;1,0;0,1".parse::<DomainSpec>().unwrap(),
            DomainSpec::Polygon(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        );
        assert_eq!(
            "disk:r=1/2".parse::<DomainSpec>().unwrap(),
            DomainSpec::Disk { radius: 0.5 }
        );
        assert!("disk:q=1".parse::<DomainSpec>().is_err());
        assert!("rect:w=1".parse::<DomainSpec>().is_err());
        assert!("blob:r=1".parse::<DomainSpec>().is_err());
        assert!("poly:0,0;1".parse::<DomainSpec>().is_err());
    }

    #[test]
    fn file_roundtrip() {
        let d = GridDomain::l_shape(1.0, 1.0 / 16.0).unwrap();
        let back = parse_domain(&write_domain_string(&d)).unwrap();
        assert_eq!(back.mask(), d.mask());
        assert_eq!(back.h(), d.h());
        assert_eq!(back.origin(), d.origin());
        assert_eq!(back.is_convex(), d.is_convex());
    }

    #[test]
    fn malformed_files() {
        let good = write_domain_string(&GridDomain::rectangle(1.0, 1.0, 0.125).unwrap());
        assert!(parse_domain(&good).is_ok());
        let short: String = good.lines().take(8).collect::<Vec<_>>().join("\n");
        assert!(parse_domain(&short).is_err());
        assert!(parse_domain(&good.replacen("nx", "nz", 1)).is_err());
        let bad_char = good.replacen("0000", "00x0", 1);
        assert!(parse_domain(&bad_char).is_err());
    }
}
