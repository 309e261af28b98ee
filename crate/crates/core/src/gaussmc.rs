//! Seeded Monte Carlo checks of the Gaussian identities for finite boxes.
//!
//! Every distance and supremum over a box `∏ [0, ℓ_j]` separates by
//! coordinate, so the integrands are exact and only sampling error remains.
//!
//! Worker `w` of `W` owns the sample indices `≡ w (mod W)` and draws them from
//! its own ChaCha8 stream `(seed, w)`. Shard statistics are merged in worker
//! order, so a fixed `(seed, n, W)` gives bit-identical results however the
//! shards are scheduled.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, StandardUniform};

use crate::special::kappa;
use crate::volseq::VolumeSequence;
use crate::{Error, Result};

pub const MIN_SAMPLES: u64 = 1000;

/// `dist(x, ∏ [0, ℓ_j])`.
pub fn dist_to_box(x: &[f64], sides: &[f64]) -> Result<f64> {
    if x.len() != sides.len() {
        return Err(Error::DimensionMismatch {
            expected: sides.len(),
            got: x.len(),
        });
    }
    Ok(libm::sqrt(
        x.iter().zip(sides).map(|(&xi, &l)| sq(clamp_excess(xi, l))).sum(),
    ))
}

#[inline]
fn clamp_excess(x: f64, l: f64) -> f64 {
    (x - l).max(0.0).max(-x)
}

#[inline]
fn sq(x: f64) -> f64 {
    x * x
}

/// `vol(K + λB) = Σ_{k ≤ d} κ_{d−k} V_k λ^{d−k}`.
pub fn steiner_polynomial_value(v: &VolumeSequence, d: usize, lambda: f64) -> Result<f64> {
    if !(lambda >= 0.0) || lambda.is_infinite() {
        return Err(Error::InvalidArgument(format!(
            "lambda must be finite and >= 0, got {lambda}"
        )));
    }
    let finite_dim = match v.dimension() {
        Some(dim) => dim <= d,
        None => v.is_terminating() && v.last_finite() <= d,
    };
    if !finite_dim {
        return Err(Error::InvalidArgument(format!(
            "sequence is not known to live in dimension {d}"
        )));
    }
    let mut acc = 0.0;
    for k in 0..=d.min(v.k_max()) {
        acc += kappa(d - k) * v.value(k) * libm::pow(lambda, (d - k) as f64);
    }
    Ok(acc)
}

/// Which identity a run checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McMethod {
    Tube,
    Wills,
    Tsirelson,
}

impl McMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            McMethod::Tube => "tube",
            McMethod::Wills => "wills",
            McMethod::Tsirelson => "tsirelson",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
}

impl McConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        McConfig {
            samples,
            seed,
            workers: 1,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < MIN_SAMPLES {
            return Err(Error::InvalidArgument(format!(
                "need at least {MIN_SAMPLES} samples, got {}",
                self.samples
            )));
        }
        if self.workers == 0 {
            return Err(Error::InvalidArgument("workers must be at least 1".into()));
        }
        Ok(())
    }

    /// Number of sample indices owned by `worker`.
    pub fn shard_len(&self, worker: usize) -> u64 {
        let w = self.workers as u64;
        let i = worker as u64;
        if i >= self.samples {
            0
        } else {
            (self.samples - i).div_ceil(w)
        }
    }

    /// The generator of `worker`.
    pub fn rng(&self, worker: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(worker as u64);
        rng
    }
}

/// Running moments of one shard (Welford), plus weight sums for the
/// effective sample size.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ShardStats {
    pub n: u64,
    pub mean: f64,
    pub m2: f64,
    pub sum_sq: f64,
}

impl ShardStats {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
        self.sum_sq += x * x;
    }

    /// Chan's pairwise merge.
    pub fn merge(&self, other: &ShardStats) -> ShardStats {
        if self.n == 0 {
            return *other;
        }
        if other.n == 0 {
            return *self;
        }
        let n = self.n + other.n;
        let (na, nb) = (self.n as f64, other.n as f64);
        let d = other.mean - self.mean;
        ShardStats {
            n,
            mean: self.mean + d * nb / n as f64,
            m2: self.m2 + other.m2 + d * d * na * nb / n as f64,
            sum_sq: self.sum_sq + other.sum_sq,
        }
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }
}

/// Merges shards in index order.
pub fn combine(shards: &[ShardStats]) -> ShardStats {
    shards.iter().fold(ShardStats::default(), |a, b| a.merge(b))
}

/// One draw of an integrand.
pub trait McKernel: Sync {
    fn method(&self) -> McMethod;
    fn lambda(&self) -> Option<f64>;
    fn sample(&self, rng: &mut ChaCha8Rng) -> f64;
    /// Turns merged statistics into an estimate.
    fn finish(&self, stats: &ShardStats, cfg: &McConfig) -> McEstimate {
        McEstimate::from_stats(self.method(), self.lambda(), stats, cfg)
    }
}

/// Result of a Monte Carlo run.
#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    /// Sample standard deviation over `√n`.
    pub stderr: f64,
    pub n_samples: u64,
    pub seed: u64,
    pub workers: usize,
    pub method: McMethod,
    pub lambda: Option<f64>,
    /// `(Σw)² / Σw²` for importance-sampled runs.
    pub ess: Option<f64>,
    pub warnings: Vec<String>,
}

impl McEstimate {
    fn from_stats(method: McMethod, lambda: Option<f64>, stats: &ShardStats, cfg: &McConfig) -> Self {
        McEstimate {
            value: stats.mean,
            stderr: libm::sqrt(stats.variance() / stats.n as f64),
            n_samples: stats.n,
            seed: cfg.seed,
            workers: cfg.workers,
            method,
            lambda,
            ess: None,
            warnings: Vec::new(),
        }
    }

    /// `|value − target| / stderr`, infinite if they differ at zero stderr.
    pub fn z_score(&self, target: f64) -> f64 {
        let d = libm::fabs(self.value - target);
        if d == 0.0 {
            0.0
        } else {
            d / self.stderr
        }
    }
}

/// Runs the indices owned by `worker`.
pub fn run_shard<K: McKernel + ?Sized>(kernel: &K, cfg: &McConfig, worker: usize) -> ShardStats {
    let mut rng = cfg.rng(worker);
    let mut st = ShardStats::default();
    for _ in 0..cfg.shard_len(worker) {
        st.push(kernel.sample(&mut rng));
    }
    st
}

/// Runs every shard on the calling thread.
pub fn estimate<K: McKernel + ?Sized>(kernel: &K, cfg: &McConfig) -> Result<McEstimate> {
    cfg.validate()?;
    let shards: Vec<ShardStats> = (0..cfg.workers).map(|w| run_shard(kernel, cfg, w)).collect();
    Ok(kernel.finish(&combine(&shards), cfg))
}

fn check_sides(sides: &[f64]) -> Result<()> {
    if sides.is_empty() {
        return Err(Error::InvalidSpec("box needs at least one side".into()));
    }
    if let Some(s) = sides.iter().find(|s| !(**s >= 0.0) || s.is_infinite()) {
        return Err(Error::InvalidSpec(format!("side length {s} must be finite and >= 0")));
    }
    Ok(())
}

/// Uniform points on `∏ [−λ, ℓ_j + λ]`, counting those within `λ` of the box.
#[derive(Debug, Clone, PartialEq)]
pub struct TubeKernel {
    sides: Vec<f64>,
    lambda: f64,
    volume: f64,
}

impl TubeKernel {
    pub fn new(sides: &[f64], lambda: f64) -> Result<Self> {
        check_sides(sides)?;
        if !(lambda > 0.0) || lambda.is_infinite() {
            return Err(Error::InvalidArgument(format!("tube radius must be > 0, got {lambda}")));
        }
        Ok(TubeKernel {
            sides: sides.to_vec(),
            lambda,
            volume: sides.iter().map(|l| l + 2.0 * lambda).product(),
        })
    }

    /// Volume of the sampling box.
    pub fn bounding_volume(&self) -> f64 {
        self.volume
    }
}

impl McKernel for TubeKernel {
    fn method(&self) -> McMethod {
        McMethod::Tube
    }

    fn lambda(&self) -> Option<f64> {
        Some(self.lambda)
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        let mut d2 = 0.0;
        for &l in &self.sides {
            let u: f64 = StandardUniform.sample(rng);
            let x = -self.lambda + u * (l + 2.0 * self.lambda);
            d2 += sq(clamp_excess(x, l));
        }
        if d2 <= self.lambda * self.lambda {
            1.0
        } else {
            0.0
        }
    }

    /// Binomial standard error of the hit fraction, scaled by the volume.
    fn finish(&self, stats: &ShardStats, cfg: &McConfig) -> McEstimate {
        let p = stats.mean;
        let mut e = McEstimate::from_stats(McMethod::Tube, Some(self.lambda), stats, cfg);
        e.value = p * self.volume;
        e.stderr = self.volume * libm::sqrt(p * (1.0 - p) / stats.n as f64);
        e
    }
}

/// Importance sampling of the Gaussian tube volume
/// `∫ (2π)^{−d/2} e^{−dist²(y,B)/2} dy = Σ_k (2π)^{−k/2} V_k(B)` under an
/// isotropic Gaussian proposal centered on the box `B`.
#[derive(Debug, Clone, PartialEq)]
pub struct WillsKernel {
    sides: Vec<f64>,
    scale: f64,
    log_scale_d: f64,
}

impl WillsKernel {
    /// Gaussian tube volume of the box itself. `proposal_scale` defaults to
    /// `max ℓ / 2 + 3`.
    pub fn gaussian_tube(sides: &[f64], proposal_scale: Option<f64>) -> Result<Self> {
        check_sides(sides)?;
        let scale = proposal_scale.unwrap_or_else(|| sides.iter().copied().fold(0.0, f64::max) / 2.0 + 3.0);
        if !(scale > 0.0) || scale.is_infinite() {
            return Err(Error::InvalidArgument(format!(
                "proposal scale must be > 0, got {scale}"
            )));
        }
        Ok(WillsKernel {
            sides: sides.to_vec(),
            scale,
            log_scale_d: sides.len() as f64 * libm::log(scale),
        })
    }

    /// `W(K) = ∫ e^{−π dist²(x,K)} dx`, sampled as the Gaussian tube volume of
    /// `√(2π) K`. The proposal scale is in those dilated coordinates.
    pub fn new(sides: &[f64], proposal_scale: Option<f64>) -> Result<Self> {
        check_sides(sides)?;
        let c = libm::sqrt(2.0 * PI);
        let scaled: Vec<f64> = sides.iter().map(|l| c * l).collect();
        Self::gaussian_tube(&scaled, proposal_scale)
    }

    pub fn proposal_scale(&self) -> f64 {
        self.scale
    }
}

impl McKernel for WillsKernel {
    fn method(&self) -> McMethod {
        McMethod::Wills
    }

    fn lambda(&self) -> Option<f64> {
        None
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        let mut d2 = 0.0;
        let mut z2 = 0.0;
        for &l in &self.sides {
            let z: f64 = StandardNormal.sample(rng);
            let x = 0.5 * l + self.scale * z;
            d2 += sq(clamp_excess(x, l));
            z2 += z * z;
        }
        // target / proposal; the (2π)^{-d/2} factors cancel
        libm::exp(self.log_scale_d - 0.5 * d2 + 0.5 * z2)
    }

    fn finish(&self, stats: &ShardStats, cfg: &McConfig) -> McEstimate {
        let mut e = McEstimate::from_stats(McMethod::Wills, None, stats, cfg);
        let n = stats.n as f64;
        let ess = n * n * stats.mean * stats.mean / stats.sum_sq;
        e.ess = Some(ess);
        if ess < n / 100.0 {
            e.warnings.push(format!(
                "effective sample size {ess:.0} is below n/100; proposal scale {} is too narrow",
                self.scale
            ));
        }
        e
    }
}

/// `E exp(sup_{t ∈ K} [√(2π) λ ξ(t) − π λ² |t|²])` with the supremum taken
/// coordinate-wise in closed form. Each sample averages an antithetic pair
/// `(N, −N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TsirelsonKernel {
    sides: Vec<f64>,
    lambda: f64,
}

impl TsirelsonKernel {
    pub fn new(sides: &[f64], lambda: f64) -> Result<Self> {
        check_sides(sides)?;
        if !(lambda >= 0.0) || lambda.is_infinite() {
            return Err(Error::InvalidArgument(format!(
                "lambda must be finite and >= 0, got {lambda}"
            )));
        }
        Ok(TsirelsonKernel {
            sides: sides.to_vec(),
            lambda,
        })
    }

    /// `max_{t ∈ [0, ℓ]} (a t − b t²)`.
    fn coordinate_max(a: f64, b: f64, l: f64) -> f64 {
        let t = (a / (2.0 * b)).clamp(0.0, l);
        a * t - b * t * t
    }
}

impl McKernel for TsirelsonKernel {
    fn method(&self) -> McMethod {
        McMethod::Tsirelson
    }

    fn lambda(&self) -> Option<f64> {
        Some(self.lambda)
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        let c = libm::sqrt(2.0 * PI) * self.lambda;
        let b = PI * self.lambda * self.lambda;
        let (mut plus, mut minus) = (0.0, 0.0);
        for &l in &self.sides {
            let n: f64 = StandardNormal.sample(rng);
            plus += Self::coordinate_max(c * n, b, l);
            minus += Self::coordinate_max(-c * n, b, l);
        }
        0.5 * (libm::exp(plus) + libm::exp(minus))
    }
}

/// Tube volume `vol(K + λB)` by hit-or-miss.
pub fn tube_volume_mc(sides: &[f64], lambda: f64, cfg: &McConfig) -> Result<McEstimate> {
    estimate(&TubeKernel::new(sides, lambda)?, cfg)
}

/// `Σ_k (2π)^{−k/2} V_k(K)`, the standard Gaussian measure of the tube
/// integrand around `K` itself.
pub fn gaussian_tube_mc(sides: &[f64], proposal_scale: Option<f64>, cfg: &McConfig) -> Result<McEstimate> {
    estimate(&WillsKernel::gaussian_tube(sides, proposal_scale)?, cfg)
}

/// Wills functional `W(K)` by importance sampling.
pub fn wills_mc(sides: &[f64], proposal_scale: Option<f64>, cfg: &McConfig) -> Result<McEstimate> {
    estimate(&WillsKernel::new(sides, proposal_scale)?, cfg)
}

/// `f_K(λ)` from the Gaussian side. At `λ = 0` returns exactly 1 without sampling.
pub fn tsirelson_mc(sides: &[f64], lambda: f64, cfg: &McConfig) -> Result<McEstimate> {
    let k = TsirelsonKernel::new(sides, lambda)?;
    if lambda == 0.0 {
        cfg.validate()?;
        return Ok(McEstimate {
            value: 1.0,
            stderr: 0.0,
            n_samples: 0,
            seed: cfg.seed,
            workers: cfg.workers,
            method: McMethod::Tsirelson,
            lambda: Some(0.0),
            ess: None,
            warnings: Vec::new(),
        });
    }
    estimate(&k, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::volseq::{box_volume_sequence, BoxSpec};

    const SIDES: [f64; 3] = [1.0, 0.5, 0.25];

    #[test]
    fn distances() {
        assert_eq!(dist_to_box(&[0.5, 0.2, 0.1], &SIDES).unwrap(), 0.0);
        assert_eq!(dist_to_box(&[2.0], &[1.0]).unwrap(), 1.0);
        let d = dist_to_box(&[2.0, -1.0, 0.1], &SIDES).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-15);
        assert!(matches!(
            dist_to_box(&[0.0, 0.0], &SIDES),
            Err(Error::DimensionMismatch { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn steiner_polynomial() {
        let v = box_volume_sequence(&BoxSpec::explicit(SIDES.to_vec()).unwrap(), 3).unwrap();
        assert!((steiner_polynomial_value(&v, 3, 0.0).unwrap() - 0.125).abs() < 1e-15);
        let want = 4.0 * PI / 3.0 * 0.125 + PI * 1.75 * 0.25 + 2.0 * 0.875 * 0.5 + 0.125;
        assert!((steiner_polynomial_value(&v, 3, 0.5).unwrap() - want).abs() < 1e-14);
        assert!((want - 2.898_045).abs() < 1e-6);
        let seg = box_volume_sequence(&BoxSpec::explicit(alloc::vec![1.0]).unwrap(), 1).unwrap();
        assert!((steiner_polynomial_value(&seg, 1, 1.0).unwrap() - 3.0).abs() < 1e-15);
        let sp = crate::volseq::spiral_volume_sequence(5);
        assert!(steiner_polynomial_value(&sp, 3, 1.0).is_err());
    }

    #[test]
    fn shards_partition_indices() {
        let cfg = McConfig::new(1003, 1).with_workers(4);
        let total: u64 = (0..4).map(|w| cfg.shard_len(w)).sum();
        assert_eq!(total, 1003);
        assert_eq!(cfg.shard_len(0), 251);
        assert_eq!(cfg.shard_len(3), 250);
    }

    #[test]
    fn merge_matches_single_pass() {
        let xs: Vec<f64> = (0..100).map(|i| ((i * 37) % 11) as f64 * 0.3).collect();
        let mut all = ShardStats::default();
        xs.iter().for_each(|x| all.push(*x));
        let mut a = ShardStats::default();
        let mut b = ShardStats::default();
        xs[..40].iter().for_each(|x| a.push(*x));
        xs[40..].iter().for_each(|x| b.push(*x));
        let m = a.merge(&b);
        assert!((m.mean - all.mean).abs() < 1e-14 && (m.m2 - all.m2).abs() < 1e-11);
    }

    #[test]
    fn tube_segment() {
        let e = tube_volume_mc(&[1.0], 1.0, &McConfig::new(20_000, 3)).unwrap();
        // the sampling box is exactly the tube
        assert_eq!(e.value, 3.0);
        assert_eq!(e.stderr, 0.0);
    }

    #[test]
    fn tube_small_box() {
        let e = tube_volume_mc(&SIDES, 0.5, &McConfig::new(200_000, 11)).unwrap();
        assert!(e.z_score(2.898_045) <= 3.0, "{e:?}");
    }

    #[test]
    fn tube_large_radius_is_ball() {
        let lam = 20.0;
        let tiny = [1e-3, 1e-3, 1e-3];
        let e = tube_volume_mc(&tiny, lam, &McConfig::new(100_000, 5)).unwrap();
        let v = box_volume_sequence(&BoxSpec::explicit(tiny.to_vec()).unwrap(), 3).unwrap();
        let exact = steiner_polynomial_value(&v, 3, lam).unwrap();
        assert!(e.z_score(exact) <= 3.0);
        assert!((exact / (kappa(3) * lam.powi(3)) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn wills_point_and_box() {
        let e = wills_mc(&[0.0], None, &McConfig::new(50_000, 2)).unwrap();
        assert!(e.z_score(1.0) <= 3.0);
        let e = wills_mc(&SIDES, None, &McConfig::new(100_000, 2)).unwrap();
        assert!(e.z_score(3.75) <= 3.0);
        assert!(e.warnings.is_empty());
    }

    #[test]
    fn gaussian_tube_of_segment() {
        // 1-D: ∫ (2π)^{-1/2} e^{-dist²/2} dx = 1 + ℓ/√(2π)
        let e = gaussian_tube_mc(&[1.0], None, &McConfig::new(100_000, 4)).unwrap();
        assert!(e.z_score(1.0 + 1.0 / (2.0 * PI).sqrt()) <= 3.0, "{e:?}");
    }

    #[test]
    fn wills_narrow_proposal_warns() {
        let e = wills_mc(&[10.0, 10.0], Some(0.3), &McConfig::new(20_000, 2)).unwrap();
        assert!(!e.warnings.is_empty());
    }

    #[test]
    fn tsirelson_zero_and_positive() {
        let e = tsirelson_mc(&SIDES, 0.0, &McConfig::new(1000, 1)).unwrap();
        assert_eq!((e.value, e.stderr), (1.0, 0.0));
        let e = tsirelson_mc(&SIDES, 0.5, &McConfig::new(100_000, 9)).unwrap();
        assert!(e.z_score(2.109_375) <= 4.0);
    }

    #[test]
    fn coordinate_max_is_a_max() {
        for (a, b, l) in [(1.0, 2.0, 1.0), (-1.0, 0.5, 2.0), (10.0, 0.1, 0.3)] {
            let best = TsirelsonKernel::coordinate_max(a, b, l);
            for i in 0..=100 {
                let t = l * i as f64 / 100.0;
                assert!(a * t - b * t * t <= best + 1e-14);
            }
        }
    }

    #[test]
    fn reproducible_and_worker_dependent_only_by_sharding() {
        let cfg = McConfig::new(10_000, 42).with_workers(3);
        let a = tsirelson_mc(&SIDES, 1.0, &cfg).unwrap();
        let b = tsirelson_mc(&SIDES, 1.0, &cfg).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
    }

    #[test]
    fn input_checks() {
        let cfg = McConfig::new(999, 1);
        assert!(tube_volume_mc(&SIDES, 0.5, &cfg).is_err());
        let cfg = McConfig::new(1000, 1);
        assert!(tube_volume_mc(&SIDES, 0.0, &cfg).is_err());
        assert!(tube_volume_mc(&[], 0.5, &cfg).is_err());
        assert!(wills_mc(&[-1.0], None, &cfg).is_err());
        assert!(tsirelson_mc(&SIDES, -1.0, &cfg).is_err());
        assert!(estimate(
            &TubeKernel::new(&SIDES, 0.5).unwrap(),
            &McConfig::new(1000, 1).with_workers(0)
        )
        .is_err());
    }
}
