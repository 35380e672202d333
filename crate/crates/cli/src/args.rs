//! Parsers for the compact command-line value formats.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use elastiscat::forward::{cube_face_directions, IncidentWave};
use elastiscat::geometry::{bean, cushion, ellipsoid, sphere, SurfaceParam};
use elastiscat::inverse::FrequencySchedule;
use elastiscat::vec3::{cross, norm, Vec3};
use serde::{Deserialize, Serialize};

fn floats(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',').map(|t| t.trim().parse::<f64>().with_context(|| format!("bad number {t:?} in {what} {s:?}"))).collect()
}

/// `λ,μ`
pub fn parse_medium(s: &str) -> Result<(f64, f64)> {
    match *floats(s, "medium")?.as_slice() {
        [l, m] if m > 0.0 && l + 2.0 * m > 0.0 => Ok((l, m)),
        [_, _] => bail!("medium {s:?} needs μ > 0 and λ + 2μ > 0"),
        _ => bail!("medium must be given as λ,μ, got {s:?}"),
    }
}

/// `a:b:step`, a single value, or a comma list.
pub fn parse_freqs(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let out = match parts.as_slice() {
        [a, b, step] => {
            let p = |t: &str| t.trim().parse::<f64>().with_context(|| format!("bad frequency range {s:?}"));
            FrequencySchedule::range(p(a)?, p(b)?, p(step)?)?
        }
        [list] => floats(list, "frequency list")?,
        _ => bail!("frequencies must be a:b:step or a comma list, got {s:?}"),
    };
    if out.is_empty() || out.iter().any(|w| !(*w > 0.0)) {
        bail!("frequencies must be positive, got {s:?}");
    }
    Ok(out)
}

fn unit(v: Vec3) -> Result<Vec3> {
    let n = norm(&v);
    if !(n > 0.0) || !n.is_finite() {
        bail!("direction {v:?} has no length");
    }
    Ok(v.map(|c| c / n))
}

pub fn parse_vec3(s: &str) -> Result<Vec3> {
    match floats(s, "vector")?.as_slice() {
        &[x, y, z] => Ok([x, y, z]),
        _ => bail!("expected x,y,z, got {s:?}"),
    }
}

#[derive(Deserialize)]
struct DirectionFile {
    schema: u32,
    directions: Vec<Vec3>,
}

/// `preset:cube-faces`, `x,y,z`, or a JSON file `{"schema":1,"directions":[[x,y,z],…]}`.
/// Directions are normalised.
pub fn parse_directions(s: &str) -> Result<Vec<Vec3>> {
    let raw = if let Some(name) = s.strip_prefix("preset:") {
        match name {
            "cube-faces" => cube_face_directions(),
            "single" => vec![[0.0, 1.0, 0.0]],
            _ => bail!("unknown direction preset {name:?} (known: cube-faces, single)"),
        }
    } else if Path::new(s).is_file() {
        let text = std::fs::read_to_string(s).with_context(|| format!("reading {s}"))?;
        let f: DirectionFile = serde_json::from_str(&text).with_context(|| format!("parsing direction file {s}"))?;
        if f.schema != 1 {
            bail!("unsupported direction file schema {}", f.schema);
        }
        f.directions
    } else {
        vec![parse_vec3(s).with_context(|| format!("{s:?} is neither a preset, a file, nor x,y,z"))?]
    };
    if raw.is_empty() {
        bail!("no incident directions in {s:?}");
    }
    raw.into_iter().map(unit).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum WaveArg {
    /// Compressional wave along the direction.
    P,
    /// Shear wave polarized along `d × e_z` (or `d × e_x` for vertical `d`).
    S,
}

pub fn incident(kind: WaveArg, d: Vec3) -> Result<IncidentWave> {
    Ok(match kind {
        WaveArg::P => IncidentWave::compressional(d)?,
        WaveArg::S => {
            let axis = if d[2].abs() > 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 0.0, 1.0] };
            IncidentWave::shear(d, unit(cross(&d, &axis))?)?
        }
    })
}

/// Surface from a JSON file or `preset:NAME:ARGS`, e.g. `preset:ellipsoid:0.6,0.75,0.9`,
/// `preset:sphere:0.5`, `preset:bean:0.8`, `preset:cushion:0.5`. `order` sets the
/// harmonic order of presets that are not exactly representable.
pub fn parse_surface(s: &str, order: usize) -> Result<SurfaceParam> {
    if let Some(rest) = s.strip_prefix("preset:") {
        let (name, params) = rest.split_once(':').unwrap_or((rest, ""));
        let vals = if params.is_empty() { Vec::new() } else { floats(params, "surface preset")? };
        let one = |default: f64| match vals.as_slice() {
            [] => Ok(default),
            [v] if *v > 0.0 => Ok(*v),
            _ => Err(anyhow!("preset {name} takes one positive parameter, got {params:?}")),
        };
        return Ok(match name {
            "sphere" => sphere(1, one(0.5)?),
            "ellipsoid" => match vals.as_slice() {
                &[a, b, c] if a > 0.0 && b > 0.0 && c > 0.0 => ellipsoid(1, [a, b, c]),
                _ => bail!("preset ellipsoid needs three positive semi-axes, got {params:?}"),
            },
            "bean" => bean(order, one(0.8)?),
            "cushion" => cushion(order, one(0.5)?),
            _ => bail!("unknown surface preset {name:?} (known: sphere, ellipsoid, bean, cushion)"),
        });
    }
    let text = std::fs::read_to_string(s).with_context(|| format!("reading surface {s}"))?;
    serde_json::from_str(&text).with_context(|| format!("parsing surface {s}"))
}

/// Expands directories into their `data_*.json` files (sorted).
pub fn expand_data_paths(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(p)
                .with_context(|| format!("listing {}", p.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|q| {
                    let name = q.file_name().and_then(|n| n.to_str()).unwrap_or("");
                    name.starts_with("data_") && name.ends_with(".json")
                })
                .collect();
            found.sort();
            if found.is_empty() {
                bail!("no data_*.json files in {}", p.display());
            }
            out.extend(found);
        } else if p.is_file() {
            out.push(p.clone());
        } else {
            bail!("data path {} does not exist", p.display());
        }
    }
    if out.is_empty() {
        bail!("no measurement files given");
    }
    Ok(out)
}

/// Creates the output directory, failing early if that is impossible.
pub fn prepare_out_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
