//! Deformed mid-surfaces as OBJ meshes with a CSV twin.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use cylbuck::fields::{Component, DisplacementField, Point};
use cylbuck::{Error, Result};

/// Samples of the deformed mid-surface on a uniform (θ, z) grid, θ periodic.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceMesh {
    pub n_theta: usize,
    pub n_z: usize,
    pub amplitude: f64,
    /// (θ, z, u_r, u_z) per vertex, θ fastest.
    pub samples: Vec<[f64; 4]>,
    pub vertices: Vec<[f64; 3]>,
}

impl SurfaceMesh {
    /// Quads with 0-based vertex indices, wrapping in θ.
    pub fn faces(&self) -> Vec<[usize; 4]> {
        let nt = self.n_theta;
        let mut f = Vec::with_capacity(nt * (self.n_z - 1));
        for j in 0..self.n_z - 1 {
            for i in 0..nt {
                let a = j * nt + i;
                let b = j * nt + (i + 1) % nt;
                f.push([a, b, b + nt, a + nt]);
            }
        }
        f
    }

    pub fn write_obj<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# deformed mid-surface, amplitude {}", self.amplitude)?;
        for v in &self.vertices {
            writeln!(w, "v {} {} {}", v[0], v[1], v[2])?;
        }
        for f in self.faces() {
            writeln!(w, "f {} {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1, f[3] + 1)?;
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> std::io::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["theta", "z", "u_r", "u_z", "x", "y", "z_deformed"])?;
        for (s, v) in self.samples.iter().zip(&self.vertices) {
            out.write_record([s[0], s[1], s[2], s[3], v[0], v[1], v[2]].map(|x| x.to_string()))?;
        }
        out.flush()
    }
}

/// Evaluate ((1+ε u_r) cos θ, (1+ε u_r) sin θ, z + ε u_z) at r = 1.
pub fn deform_surface(
    field: &dyn DisplacementField,
    amplitude: f64,
    n_theta: usize,
    n_z: usize,
    l: f64,
) -> Result<SurfaceMesh> {
    if !(amplitude > 0.0) || !amplitude.is_finite() {
        return Err(Error::Domain {
            param: "amplitude",
            reason: format!("{amplitude} must be positive"),
        });
    }
    if n_theta < 3 || n_z < 2 {
        return Err(Error::Domain {
            param: "grid",
            reason: format!("need n_theta >= 3 and n_z >= 2, got {n_theta} x {n_z}"),
        });
    }
    let mut samples = Vec::with_capacity(n_theta * n_z);
    let mut vertices = Vec::with_capacity(n_theta * n_z);
    for j in 0..n_z {
        let z = l * j as f64 / (n_z - 1) as f64;
        for i in 0..n_theta {
            let theta = 2.0 * PI * i as f64 / n_theta as f64;
            let p = Point { r: 1.0, theta, z };
            let (ur, uz) = (field.value(Component::R, p), field.value(Component::Z, p));
            let rad = 1.0 + amplitude * ur;
            samples.push([theta, z, ur, uz]);
            vertices.push([rad * theta.cos(), rad * theta.sin(), z + amplitude * uz]);
        }
    }
    Ok(SurfaceMesh {
        n_theta,
        n_z,
        amplitude,
        samples,
        vertices,
    })
}

/// Write the mesh to `path` as OBJ and to the same stem with a .csv extension.
pub fn export_surface(
    field: &dyn DisplacementField,
    amplitude: f64,
    n_theta: usize,
    n_z: usize,
    l: f64,
    path: &Path,
) -> Result<Vec<PathBuf>> {
    let mesh = deform_surface(field, amplitude, n_theta, n_z, l)?;
    let csv_path = path.with_extension("csv");
    if csv_path == path {
        return Err(Error::Domain {
            param: "export",
            reason: "the OBJ path must not end in .csv".into(),
        });
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = BufWriter::new(File::create(path)?);
    mesh.write_obj(&mut w)?;
    w.flush()?;
    mesh.write_csv(BufWriter::new(File::create(&csv_path)?))?;
    Ok(vec![path.to_path_buf(), csv_path])
}

/// `stem_<tag>.ext` when several surfaces share one export path.
pub fn tagged_path(path: &Path, tag: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_{tag}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{tag}"),
    };
    path.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use cylbuck::fields::SeparableField;

    #[test]
    fn zero_field_is_the_cylinder() {
        let m = deform_surface(&SeparableField::zero(), 0.5, 12, 5, 2.0).unwrap();
        assert_eq!(m.vertices.len(), 60);
        assert_eq!(m.faces().len(), 48);
        for v in &m.vertices {
            assert!((v[0].hypot(v[1]) - 1.0).abs() < 1e-15);
            assert!((0.0..=2.0).contains(&v[2]));
        }
        assert_eq!(m.vertices.last().unwrap()[2], 2.0);
    }

    #[test]
    fn rejects_bad_amplitude() {
        let f = SeparableField::zero();
        assert!(deform_surface(&f, 0.0, 12, 5, 1.0).is_err());
        assert!(deform_surface(&f, -1.0, 12, 5, 1.0).is_err());
        assert!(deform_surface(&f, 1.0, 2, 5, 1.0).is_err());
    }

    #[test]
    fn tagged_paths() {
        assert_eq!(
            tagged_path(Path::new("a/out.obj"), "m3"),
            PathBuf::from("a/out_m3.obj")
        );
        assert_eq!(tagged_path(Path::new("out"), "h0"), PathBuf::from("out_h0"));
    }

    #[test]
    fn faces_wrap_in_theta() {
        let m = deform_surface(&SeparableField::zero(), 1.0, 4, 2, 1.0).unwrap();
        assert_eq!(
            m.faces(),
            vec![[0, 1, 5, 4], [1, 2, 6, 5], [2, 3, 7, 6], [3, 0, 4, 7]]
        );
    }
}
