use num_complex::Complex64;
use serde::Serialize;

use super::chirp::ChirpTransform;
use super::sums::{exp_sum_with, CharacterTable};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fp::{FpVector, PointSet, PrimeModulus};

/// Default bound on `p^d` for full transforms.
pub const DEFAULT_DFT_CAP: u64 = 1 << 26;

/// Relative tolerance: `τ = TOLERANCE_FACTOR · |I|`.
pub const TOLERANCE_FACTOR: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DftAlgorithm {
    /// Pick by the cost model.
    #[default]
    Auto,
    /// `O(p^d · |I|)` direct evaluation.
    Naive,
    /// Axis-by-axis chirp transform, `O(d · p^d · log p)`.
    Chirp,
}

#[derive(Clone, Copy, Debug)]
pub struct DftOptions {
    pub algorithm: DftAlgorithm,
    pub exec: Execution,
    pub cap: u64,
}

impl Default for DftOptions {
    fn default() -> Self {
        Self {
            algorithm: DftAlgorithm::Auto,
            exec: Execution::Parallel,
            cap: DEFAULT_DFT_CAP,
        }
    }
}

/// `|S(ξ)| = |Σ_{x∈I} e_p(ξ·x)|` for every `ξ ∈ F_p^d`, indexed by rank.
#[derive(Clone, Debug)]
pub struct SpectrumField {
    modulus: PrimeModulus,
    dim: usize,
    magnitudes: Vec<f64>,
    source: PointSet,
    tolerance: f64,
    algorithm: DftAlgorithm,
}

impl SpectrumField {
    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn magnitudes(&self) -> &[f64] {
        &self.magnitudes
    }

    pub fn magnitude(&self, xi: &FpVector) -> f64 {
        self.magnitudes[xi.rank_index() as usize]
    }

    pub fn source(&self) -> &PointSet {
        &self.source
    }

    pub fn source_size(&self) -> usize {
        self.source.len()
    }

    /// Absolute tolerance `τ`.
    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// The path actually taken.
    pub fn algorithm(&self) -> DftAlgorithm {
        self.algorithm
    }

    pub fn len(&self) -> usize {
        self.magnitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.magnitudes.is_empty()
    }

    /// `max_{ξ≠0} |S(ξ)| / |I|`; zero when `F_p^d` has no nonzero frequency.
    pub fn max_nonzero_ratio(&self) -> f64 {
        let n = self.source_size() as f64;
        self.magnitudes[1..].iter().fold(0.0f64, |a, &b| a.max(b)) / n
    }

    /// `|Σ_ξ |S(ξ)|² − p^d |I|| / (p^d |I|)`.
    pub fn parseval_relative_error(&self) -> f64 {
        let energy: f64 = self.magnitudes.iter().map(|m| m * m).sum();
        let want = self.magnitudes.len() as f64 * self.source_size() as f64;
        (energy - want).abs() / want
    }

    /// `max_ξ ||S(−ξ)| − |S(ξ)||`.
    pub fn symmetry_error(&self) -> f64 {
        let m = self.modulus;
        (0..self.magnitudes.len() as u64)
            .map(|i| {
                let neg = FpVector::from_index(m, self.dim, i).neg().rank_index() as usize;
                (self.magnitudes[i as usize] - self.magnitudes[neg]).abs()
            })
            .fold(0.0, f64::max)
    }

    /// `||S(0)| − |I||`.
    pub fn origin_error(&self) -> f64 {
        (self.magnitudes[0] - self.source_size() as f64).abs()
    }
}

/// Relative costs of the two paths; the crossover constant was measured with the
/// `parallel_vs_sequential` bench.
fn prefer_chirp(p: u64, d: usize, points: usize) -> bool {
    const CHIRP_WEIGHT: f64 = 6.0;
    let m = (2 * p - 1).next_power_of_two() as f64;
    let chirp_per_cell = d as f64 * CHIRP_WEIGHT * m * m.log2() / p as f64;
    let naive_per_cell = points as f64 * (1.0 + d as f64 * 0.5);
    naive_per_cell > chirp_per_cell
}

/// Full transform of the indicator of `points`.
pub fn dft_full(points: &PointSet, opts: DftOptions) -> Result<SpectrumField> {
    let m = points.modulus();
    let d = points.dim();
    if points.is_empty() {
        return Err(Error::InvalidArgument(
            "exponential sum over an empty set".into(),
        ));
    }
    let size = m.space_size(d).unwrap_or(u64::MAX);
    if size > opts.cap {
        return Err(Error::cap("full transform (p^d)", opts.cap, size));
    }
    let algorithm = match opts.algorithm {
        DftAlgorithm::Auto if prefer_chirp(m.as_u64(), d, points.len()) => DftAlgorithm::Chirp,
        DftAlgorithm::Auto => DftAlgorithm::Naive,
        a => a,
    };
    let magnitudes = match algorithm {
        DftAlgorithm::Naive => naive_magnitudes(points, size as usize, opts.exec),
        _ => chirp_magnitudes(points, size as usize, opts.exec),
    };
    Ok(SpectrumField {
        modulus: m,
        dim: d,
        magnitudes,
        source: points.clone(),
        tolerance: TOLERANCE_FACTOR * points.len() as f64,
        algorithm,
    })
}

fn naive_magnitudes(points: &PointSet, size: usize, exec: Execution) -> Vec<f64> {
    let m = points.modulus();
    let d = points.dim();
    let table = CharacterTable::new(m);
    let pts = points.to_vectors();
    exec.map_range(size, |i| {
        exp_sum_with(&table, &pts, &FpVector::from_index(m, d, i as u64)).norm()
    })
}

fn chirp_magnitudes(points: &PointSet, size: usize, exec: Execution) -> Vec<f64> {
    let p = points.modulus().get() as usize;
    let d = points.dim();
    let transform = ChirpTransform::new(p);
    let mut data = vec![Complex64::new(0.0, 0.0); size];
    for &i in points.indices() {
        data[i as usize] = Complex64::new(1.0, 0.0);
    }
    let rows = size / p;
    let mut rotated = vec![Complex64::new(0.0, 0.0); size];
    // Each pass transforms the fastest axis, then rotates the axes by one so that
    // after `d` passes every axis has been transformed and the layout is restored.
    for _ in 0..d {
        exec.for_each_chunk(&mut data, p, |line| {
            let mut scratch = transform.make_scratch();
            transform.process(line, &mut scratch);
        });
        let src = &data;
        exec.for_each_chunk_indexed(&mut rotated, rows, |c, col| {
            for (r, z) in col.iter_mut().enumerate() {
                *z = src[r * p + c];
            }
        });
        std::mem::swap(&mut data, &mut rotated);
    }
    data.iter().map(|z| z.norm()).collect()
}
