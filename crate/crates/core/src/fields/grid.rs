use crate::algebra::KForm;
use crate::error::{Error, Result};
use crate::multi_index::{basis, binomial};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

const MAGIC: &[u8; 8] = b"EXTCGF01";

/// Periodic `[0,1)ⁿ` (node spacing `1/N`) or closed `[0,1]ⁿ` (spacing `1/(N−1)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Torus,
    Box,
}

impl Domain {
    fn tag(self) -> u8 {
        match self {
            Domain::Torus => 0,
            Domain::Box => 1,
        }
    }

    fn from_tag(t: u8) -> Result<Self> {
        match t {
            0 => Ok(Domain::Torus),
            1 => Ok(Domain::Box),
            _ => Err(Error::InvalidInput(format!("unknown domain tag {t}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    #[serde(rename = "N")]
    pub size: usize,
    pub domain: Domain,
}

impl GridSpec {
    pub fn new(n: usize, size: usize, domain: Domain) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("grid dimension must be positive".into()));
        }
        if size < 2 {
            return Err(Error::Precondition("a grid needs N ≥ 2 points per axis".into()));
        }
        size.checked_pow(n as u32)
            .filter(|&m| m <= 1 << 28)
            .ok_or_else(|| Error::Precondition(format!("grid {size}^{n} is too large")))?;
        Ok(Self { n, size, domain })
    }

    pub fn torus(n: usize, size: usize) -> Result<Self> {
        Self::new(n, size, Domain::Torus)
    }

    pub fn unit_box(n: usize, size: usize) -> Result<Self> {
        Self::new(n, size, Domain::Box)
    }

    pub fn h(&self) -> f64 {
        match self.domain {
            Domain::Torus => 1.0 / self.size as f64,
            Domain::Box => 1.0 / (self.size - 1) as f64,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.size.pow(self.n as u32)
    }

    /// Index stride of axis `j` (the first axis varies slowest).
    pub fn stride(&self, j: usize) -> usize {
        self.size.pow((self.n - 1 - j) as u32)
    }

    /// Integer coordinate of `node` along axis `j`.
    pub fn coord(&self, node: usize, j: usize) -> usize {
        (node / self.stride(j)) % self.size
    }

    pub fn position(&self, node: usize) -> Vec<f64> {
        let h = self.h();
        (0..self.n).map(|j| self.coord(node, j) as f64 * h).collect()
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        self.domain == Domain::Box
            && (0..self.n).any(|j| matches!(self.coord(node, j), 0) || self.coord(node, j) == self.size - 1)
    }

    /// Nodes that carry a cell of the energy quadrature: all nodes on the
    /// torus, those with every coordinate `< N − 1` on the box.
    pub fn is_cell(&self, node: usize) -> bool {
        self.domain == Domain::Torus || (0..self.n).all(|j| self.coord(node, j) < self.size - 1)
    }

    /// Quadrature weight of a cell (`hⁿ`), so torus sums are grid means.
    pub fn cell_weight(&self) -> f64 {
        self.h().powi(self.n as i32)
    }
}

/// A `k`-form valued field: `values[node · C(n,k) + component]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    spec: GridSpec,
    k: usize,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    schema_version: u32,
    n: usize,
    k: usize,
    #[serde(rename = "N")]
    size: usize,
    domain: Domain,
    h: f64,
    layout: String,
    components: Vec<String>,
}

impl GridField {
    pub fn zeros(spec: GridSpec, k: usize) -> Result<Self> {
        if k > spec.n {
            return Err(Error::DegreeOverflow { degree: k, n: spec.n });
        }
        let len = spec.num_nodes() * binomial(spec.n, k);
        Ok(Self {
            spec,
            k,
            values: vec![0.0; len],
        })
    }

    pub fn from_values(spec: GridSpec, k: usize, values: Vec<f64>) -> Result<Self> {
        let mut f = Self::zeros(spec, k)?;
        if values.len() != f.values.len() {
            return Err(Error::CoefficientLength {
                expected: f.values.len(),
                found: values.len(),
            });
        }
        f.values = values;
        Ok(f)
    }

    /// Samples `g(x)` (a coefficient vector of length `C(n,k)`) at every node.
    pub fn from_fn(spec: GridSpec, k: usize, g: impl Fn(&[f64]) -> Vec<f64>) -> Result<Self> {
        let mut f = Self::zeros(spec, k)?;
        let comps = f.components();
        for node in 0..spec.num_nodes() {
            let v = g(&spec.position(node));
            if v.len() != comps {
                return Err(Error::CoefficientLength {
                    expected: comps,
                    found: v.len(),
                });
            }
            f.node_mut(node).copy_from_slice(&v);
        }
        Ok(f)
    }

    /// Constant field with value `x` at every node.
    pub fn constant(spec: GridSpec, x: &KForm) -> Result<Self> {
        Self::from_fn(spec, x.degree(), |_| x.coeffs().to_vec())
    }

    /// Random smooth periodic field: each component is a sum of `modes`
    /// plane waves `a sin(2π m·x + φ)`, `m ∈ {−1,0,1}ⁿ \ {0}`, scaled so that
    /// every wave has gradient amplitude `amplitude / √modes`.
    pub fn random_smooth<R: Rng + ?Sized>(
        spec: GridSpec,
        k: usize,
        modes: usize,
        amplitude: f64,
        rng: &mut R,
    ) -> Result<Self> {
        let comps = binomial(spec.n, k);
        let mut waves = Vec::with_capacity(comps * modes);
        for _ in 0..comps {
            let mut comp = Vec::with_capacity(modes);
            for _ in 0..modes {
                let m: Vec<f64> = loop {
                    let m: Vec<f64> = (0..spec.n).map(|_| rng.gen_range(-1i32..=1) as f64).collect();
                    if m.iter().any(|&v| v != 0.0) {
                        break m;
                    }
                };
                let freq = TAU * m.iter().map(|v| v * v).sum::<f64>().sqrt();
                let a = rng.gen_range(-1.0..1.0) * amplitude / ((modes as f64).sqrt() * freq);
                comp.push((m, a, rng.gen_range(0.0..TAU)));
            }
            waves.push(comp);
        }
        Self::from_fn(spec, k, |x| {
            waves
                .iter()
                .map(|comp| {
                    comp.iter()
                        .map(|(m, a, phase)| {
                            let dot: f64 = m.iter().zip(x).map(|(mi, xi)| mi * xi).sum();
                            a * (TAU * dot + phase).sin()
                        })
                        .sum()
                })
                .collect()
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn components(&self) -> usize {
        binomial(self.spec.n, self.k)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn node(&self, node: usize) -> &[f64] {
        let c = self.components();
        &self.values[node * c..(node + 1) * c]
    }

    pub fn node_mut(&mut self, node: usize) -> &mut [f64] {
        let c = self.components();
        &mut self.values[node * c..(node + 1) * c]
    }

    pub fn node_form(&self, node: usize) -> KForm {
        KForm::from_coeffs(self.spec.n, self.k, self.node(node).to_vec()).expect("consistent layout")
    }

    /// Plain Euclidean dot product of the value arrays.
    pub fn dot(&self, other: &Self) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Mean of each component over the cells (every node on the torus).
    pub fn mean(&self) -> KForm {
        let comps = self.components();
        let mut acc = vec![0.0; comps];
        let mut cells = 0usize;
        for (node, chunk) in self.values.chunks(comps).enumerate() {
            if !self.spec.is_cell(node) {
                continue;
            }
            cells += 1;
            for (a, v) in acc.iter_mut().zip(chunk) {
                *a += v;
            }
        }
        let m = cells.max(1) as f64;
        KForm::from_coeffs(self.spec.n, self.k, acc.into_iter().map(|a| a / m).collect()).expect("consistent layout")
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::InvalidInput("fields live on different grids".into()));
        }
        if self.k != other.k {
            return Err(Error::DegreeMismatch {
                expected: self.k,
                found: other.k,
            });
        }
        Ok(())
    }

    fn sidecar_path(path: &Path) -> PathBuf {
        path.with_extension("json")
    }

    /// Writes the binary file and its JSON sidecar (same stem, `.json`).
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::with_capacity(21 + 8 * self.values.len());
        buf.extend_from_slice(MAGIC);
        for v in [self.spec.n, self.k, self.spec.size] {
            buf.extend_from_slice(&(v as u32).to_le_bytes());
        }
        buf.push(self.spec.domain.tag());
        for v in &self.values {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        std::fs::File::create(path)?.write_all(&buf)?;
        let sidecar = Sidecar {
            schema_version: 1,
            n: self.spec.n,
            k: self.k,
            size: self.spec.size,
            domain: self.spec.domain,
            h: self.spec.h(),
            layout: "row-major nodes, first axis slowest, components innermost, little-endian f64".into(),
            components: basis(self.spec.n, self.k)
                .iter()
                .map(|i| i.iter().map(usize::to_string).collect::<Vec<_>>().join(","))
                .collect(),
        };
        std::fs::write(Self::sidecar_path(path), serde_json::to_string_pretty(&sidecar)? + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        if bytes.len() < 21 || &bytes[..8] != MAGIC {
            return Err(Error::InvalidInput(format!(
                "{}: not a grid field file",
                path.display()
            )));
        }
        let word = |i: usize| u32::from_le_bytes(bytes[8 + 4 * i..12 + 4 * i].try_into().unwrap()) as usize;
        let (n, k, size) = (word(0), word(1), word(2));
        let spec = GridSpec::new(n, size, Domain::from_tag(bytes[20])?)?;
        let payload = &bytes[21..];
        if payload.len() % 8 != 0 {
            return Err(Error::InvalidInput(format!("{}: truncated payload", path.display())));
        }
        let values = payload
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Self::from_values(spec, k, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn spec_geometry() {
        let t = GridSpec::torus(2, 4).unwrap();
        assert_eq!(t.h(), 0.25);
        assert_eq!(t.num_nodes(), 16);
        assert_eq!(t.position(6), vec![0.25, 0.5]);
        let b = GridSpec::unit_box(2, 5).unwrap();
        assert_eq!(b.h(), 0.25);
        assert!(b.is_boundary(0) && !b.is_boundary(6));
        assert!(b.is_cell(18) && !b.is_cell(4));
        assert!(GridSpec::torus(2, 1).is_err());
    }

    #[test]
    fn binary_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("w.bin");
        let spec = GridSpec::unit_box(3, 4).unwrap();
        let f = GridField::random_smooth(spec, 2, 3, 1.0, &mut stream(1, 0)).unwrap();
        f.write(&path).unwrap();
        assert_eq!(GridField::read(&path).unwrap(), f);
        let meta: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("w.json")).unwrap()).unwrap();
        assert_eq!(meta["domain"], "box");
        assert_eq!(meta["components"][0], "1,2");
        std::fs::write(&path, b"garbage").unwrap();
        assert!(GridField::read(&path).is_err());
    }
}
