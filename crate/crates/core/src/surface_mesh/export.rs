use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::Mesh;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MeshFormat {
    Obj,
    Ply,
}

/// Writes an ASCII OBJ or PLY file with 17 significant digits per coordinate.
pub fn export(m: &Mesh, format: MeshFormat, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    match format {
        MeshFormat::Obj => {
            writeln!(
                out,
                "# {} patch, n = {}, theta = {} deg",
                m.meta.domain,
                m.meta.n,
                m.meta.theta.degrees()
            )?;
            for v in &m.vertices {
                writeln!(out, "v {:.16e} {:.16e} {:.16e}", v[0], v[1], v[2])?;
            }
            for t in &m.triangles {
                writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
            }
        }
        MeshFormat::Ply => {
            writeln!(out, "ply")?;
            writeln!(out, "format ascii 1.0")?;
            writeln!(out, "element vertex {}", m.vertices.len())?;
            for axis in ["x", "y", "z"] {
                writeln!(out, "property double {axis}")?;
            }
            writeln!(out, "element face {}", m.triangles.len())?;
            writeln!(out, "property list uchar int vertex_indices")?;
            writeln!(out, "end_header")?;
            for v in &m.vertices {
                writeln!(out, "{:.16e} {:.16e} {:.16e}", v[0], v[1], v[2])?;
            }
            for t in &m.triangles {
                writeln!(out, "3 {} {} {}", t[0], t[1], t[2])?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

/// Reads the `v` and `f` records of an OBJ file written by [`export`].
pub fn read_obj(path: &Path) -> Result<(Vec<[f64; 3]>, Vec<[usize; 3]>)> {
    let bad = |line: &str| Error::Io(format!("malformed OBJ record: {line}"));
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for line in BufReader::new(File::open(path)?).lines() {
        let line = line?;
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("v") => {
                let xs: Vec<f64> = parts
                    .map(|s| s.parse().map_err(|_| bad(&line)))
                    .collect::<Result<_>>()?;
                let [x, y, z] = xs[..] else {
                    return Err(bad(&line));
                };
                vertices.push([x, y, z]);
            }
            Some("f") => {
                let is: Vec<usize> = parts
                    .map(|s| {
                        s.split('/')
                            .next()
                            .unwrap_or("")
                            .parse::<usize>()
                            .map_err(|_| bad(&line))
                    })
                    .collect::<Result<_>>()?;
                let [a, b, c] = is[..] else {
                    return Err(bad(&line));
                };
                faces.push([a - 1, b - 1, c - 1]);
            }
            _ => {}
        }
    }
    Ok((vertices, faces))
}
