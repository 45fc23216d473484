//! Classical information functionals on quadrature distributions:
//! differential entropy, negentropy, Kullback-Leibler divergence, and their
//! coarse-grained (binned) counterparts. All entropies are in nats.

use crate::error::{Error, Result};
use crate::quadrature::{simpson_integral, QuadratureDistribution};

/// Densities below this contribute nothing to p ln p.
const DENSITY_FLOOR: f64 = 1e-300;

/// H(X) = −∫ p ln p with 0·ln 0 := 0, by composite Simpson.
pub fn differential_entropy(dist: &QuadratureDistribution) -> Result<f64> {
    let integral = dist.integral();
    if (integral - 1.0).abs() > 1e-9 {
        return Err(Error::NormalizationError(integral));
    }
    Ok(entropy_integral(&dist.density, dist.grid.step()))
}

/// Entropy plus a grid-refinement error estimate: the difference against the
/// same integral evaluated at half resolution.
pub fn differential_entropy_with_error(dist: &QuadratureDistribution) -> Result<(f64, f64)> {
    let full = differential_entropy(dist)?;
    let half: Vec<f64> = dist.density.iter().step_by(2).cloned().collect();
    let coarse = entropy_integral(&half, 2.0 * dist.grid.step());
    Ok((full, (full - coarse).abs()))
}

fn entropy_integral(density: &[f64], dx: f64) -> f64 {
    let vals: Vec<f64> = density
        .iter()
        .map(|&p| if p > DENSITY_FLOOR { -p * p.ln() } else { 0.0 })
        .collect();
    simpson_integral(&vals, dx)
}

/// J(X) = H(X_G) − H(X) where X_G is the Gaussian with the same mean and
/// variance; H(X_G) = ln(2πe·Var)/2. Clipped at zero (integration noise on
/// exact Gaussians comes out at ~1e-12 of either sign).
pub fn negentropy(dist: &QuadratureDistribution) -> Result<f64> {
    Ok(negentropy_unclipped(dist)?.max(0.0))
}

/// The raw, possibly slightly negative value.
pub fn negentropy_unclipped(dist: &QuadratureDistribution) -> Result<f64> {
    let h = differential_entropy(dist)?;
    let var = dist.moments.variance;
    if var <= 0.0 {
        return Err(Error::DomainError("negentropy needs positive variance".into()));
    }
    Ok(0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * var).ln() - h)
}

/// D_KL(p‖q) = ∫ p ln(p/q) on a shared grid.
pub fn kl_divergence(p: &QuadratureDistribution, q: &QuadratureDistribution) -> Result<f64> {
    if p.grid != q.grid {
        return Err(Error::ShapeError("KL divergence needs a shared grid".into()));
    }
    let p_peak = p.density.iter().cloned().fold(0.0, f64::max);
    let mut vals = vec![0.0; p.density.len()];
    for (i, (v, (&pi, &qi))) in vals
        .iter_mut()
        .zip(p.density.iter().zip(q.density.iter()))
        .enumerate()
    {
        if pi <= DENSITY_FLOOR {
            continue;
        }
        if qi <= DENSITY_FLOOR {
            if pi > 1e-12 * p_peak {
                return Err(Error::SupportError {
                    x: p.grid.x(i),
                    p: pi,
                    q: qi,
                });
            }
            continue;
        }
        *v = pi * (pi / qi).ln();
    }
    Ok(simpson_integral(&vals, p.grid.step()))
}

/// A probability mass function on the bin lattice [kσ, (k+1)σ), k ∈ ℤ.
///
/// Anchoring every binning to the same global lattice makes bins of width σ
/// exact unions of bins of width σ/M, so refinement redistributes mass
/// exactly.
#[derive(Debug, Clone)]
pub struct BinnedDistribution {
    pub width: f64,
    /// Lattice index of `masses[0]`.
    pub first_index: i64,
    pub masses: Vec<f64>,
    /// Probability mass that fell outside the source grid.
    pub deficit: f64,
}

impl BinnedDistribution {
    pub fn origin(&self) -> f64 {
        self.first_index as f64 * self.width
    }

    /// Merge groups of `factor` consecutive lattice bins (exact inverse of
    /// refining the binning of the same distribution).
    pub fn coarsen(&self, factor: usize) -> BinnedDistribution {
        assert!(factor >= 1);
        let f = factor as i64;
        let first_coarse = self.first_index.div_euclid(f);
        let last_fine = self.first_index + self.masses.len() as i64 - 1;
        let last_coarse = last_fine.div_euclid(f);
        let mut masses = vec![0.0; (last_coarse - first_coarse + 1) as usize];
        for (i, &m) in self.masses.iter().enumerate() {
            let k = self.first_index + i as i64;
            masses[(k.div_euclid(f) - first_coarse) as usize] += m;
        }
        BinnedDistribution {
            width: self.width * factor as f64,
            first_index: first_coarse,
            masses,
            deficit: self.deficit,
        }
    }
}

/// Coarse-grain a distribution to bins of the given width.
///
/// Bin masses are CDF differences of the piecewise-linear interpolant of the
/// density (trapezoid cumulative), renormalized; the uncaptured mass is
/// logged in `deficit`.
pub fn bin(dist: &QuadratureDistribution, width: f64) -> Result<BinnedDistribution> {
    if width <= 0.0 {
        return Err(Error::DomainError("bin width must be positive".into()));
    }
    let g = dist.grid.points;
    let dx = dist.grid.step();
    let x0 = dist.grid.x(0);
    // cumulative trapezoid with the Gregory h²/12 slope correction, which
    // lifts the partial sums from O(h²) to O(h⁴)
    let slope = |i: usize| -> f64 {
        if i == 0 {
            (dist.density[1] - dist.density[0]) / dx
        } else if i == g - 1 {
            (dist.density[g - 1] - dist.density[g - 2]) / dx
        } else {
            (dist.density[i + 1] - dist.density[i - 1]) / (2.0 * dx)
        }
    };
    let mut cdf = vec![0.0; g];
    let mut trap = 0.0;
    let s0 = slope(0);
    for (i, c) in cdf.iter_mut().enumerate().skip(1) {
        trap += 0.5 * (dist.density[i - 1] + dist.density[i]) * dx;
        *c = trap - dx * dx / 12.0 * (slope(i) - s0);
    }
    let total = cdf[g - 1];
    let cdf_at = |x: f64| -> f64 {
        if x <= x0 {
            return 0.0;
        }
        let t = (x - x0) / dx;
        let i = t.floor() as usize;
        if i >= g - 1 {
            return total;
        }
        let frac = t - i as f64;
        // linear density between samples integrates to a quadratic CDF piece
        let p0 = dist.density[i];
        let p1 = dist.density[i + 1];
        cdf[i] + dx * (p0 * frac + 0.5 * (p1 - p0) * frac * frac)
    };

    let first_index = (x0 / width).floor() as i64;
    let last_index = (dist.grid.x(g - 1) / width).floor() as i64;
    let mut masses = Vec::with_capacity((last_index - first_index + 1) as usize);
    for k in first_index..=last_index {
        let lo = k as f64 * width;
        let hi = lo + width;
        masses.push((cdf_at(hi) - cdf_at(lo)).max(0.0));
    }
    let captured: f64 = masses.iter().sum();
    let deficit = (1.0 - captured).max(0.0);
    if captured <= 0.0 {
        return Err(Error::DegenerateInput("no mass captured by binning".into()));
    }
    for m in masses.iter_mut() {
        *m /= captured;
    }
    Ok(BinnedDistribution {
        width,
        first_index,
        masses,
        deficit,
    })
}

/// Σ pₙ ln(pₙ/qₙ) over a shared binning; 0·ln(0/q) := 0 and a positive-p,
/// zero-q bin yields +∞.
pub fn binned_kl(p: &BinnedDistribution, q: &BinnedDistribution) -> Result<f64> {
    if (p.width - q.width).abs() > 1e-12 * p.width {
        return Err(Error::ShapeError(format!(
            "bin widths differ: {} vs {}",
            p.width, q.width
        )));
    }
    let lo = p.first_index.min(q.first_index);
    let hi = (p.first_index + p.masses.len() as i64).max(q.first_index + q.masses.len() as i64);
    let fetch = |b: &BinnedDistribution, k: i64| -> f64 {
        let idx = k - b.first_index;
        if idx < 0 || idx as usize >= b.masses.len() {
            0.0
        } else {
            b.masses[idx as usize]
        }
    };
    let mut acc = 0.0;
    for k in lo..hi {
        let pk = fetch(p, k);
        if pk <= 0.0 {
            continue;
        }
        let qk = fetch(q, k);
        if qk <= 0.0 {
            return Ok(f64::INFINITY);
        }
        acc += pk * (pk / qk).ln();
    }
    Ok(acc)
}

/// Histogram plug-in negentropy from homodyne samples.
#[derive(Debug, Clone)]
pub struct SampleNegentropy {
    pub nats: f64,
    /// 95% asymptotic confidence half-width of the entropy estimate.
    pub ci_half_width: f64,
    /// Miller-Madow bias correction that was added to the entropy.
    pub bias_correction: f64,
}

/// Estimate J from raw samples with `bins` equal-width histogram bins.
pub fn sample_negentropy(samples: &[f64], bins: usize) -> Result<SampleNegentropy> {
    const MIN_SAMPLES: usize = 1000;
    if samples.len() < MIN_SAMPLES {
        return Err(Error::SampleSizeError {
            required: MIN_SAMPLES,
            got: samples.len(),
        });
    }
    if bins < 2 {
        return Err(Error::DomainError("need at least 2 bins".into()));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    if var <= 0.0 {
        return Err(Error::DegenerateInput("zero sample variance".into()));
    }
    let lo = samples.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w = (hi - lo) / bins as f64 * (1.0 + 1e-12);
    let mut counts = vec![0usize; bins];
    for &x in samples {
        let k = (((x - lo) / w) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let mut h = 0.0;
    let mut h2 = 0.0;
    let mut occupied = 0usize;
    for &cnt in &counts {
        if cnt == 0 {
            continue;
        }
        occupied += 1;
        let p = cnt as f64 / n;
        let log_density = (p / w).ln();
        h -= p * log_density;
        h2 += p * log_density * log_density;
    }
    let bias = (occupied.saturating_sub(1)) as f64 / (2.0 * n);
    let h_corrected = h + bias;
    let entropy_var = (h2 - h * h).max(0.0);
    let ci = 1.96 * (entropy_var / n).sqrt();
    let gauss = 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * var).ln();
    Ok(SampleNegentropy {
        nats: gauss - h_corrected,
        ci_half_width: ci,
        bias_correction: bias,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{QuadratureDistribution, QuadratureGrid};

    const EULER_GAMMA: f64 = 0.5772156649015329;

    fn gaussian_dist(mean: f64, var: f64, grid: QuadratureGrid) -> QuadratureDistribution {
        let density: Vec<f64> = grid
            .xs()
            .iter()
            .map(|&x| {
                let d = x - mean;
                (-d * d / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
            })
            .collect();
        QuadratureDistribution::from_density(grid, density, 1e-14).unwrap()
    }

    fn fock1_dist(grid: QuadratureGrid) -> QuadratureDistribution {
        let density: Vec<f64> = grid
            .xs()
            .iter()
            .map(|&x| 2.0 * x * x * (-x * x).exp() / std::f64::consts::PI.sqrt())
            .collect();
        QuadratureDistribution::from_density(grid, density, 1e-14).unwrap()
    }

    #[test]
    fn gaussian_entropies_match_closed_forms() {
        let grid = QuadratureGrid::new(0.0, 12.0, 4096).unwrap();
        let h_half = differential_entropy(&gaussian_dist(0.0, 0.5, grid)).unwrap();
        let want_half = 0.5 * (std::f64::consts::PI * std::f64::consts::E).ln();
        assert!((h_half - want_half).abs() < 1e-10, "{h_half} vs {want_half}");
        assert!((want_half - 1.07236).abs() < 1e-5);

        let h_three_halves = differential_entropy(&gaussian_dist(0.4, 1.5, grid)).unwrap();
        let want = 0.5 * (3.0 * std::f64::consts::PI * std::f64::consts::E).ln();
        assert!((h_three_halves - want).abs() < 1e-10);
        assert!((want - 1.62167).abs() < 1e-5);
    }

    #[test]
    fn fock_one_entropy_pinned_by_two_independent_oracles() {
        // refine-until-stable: two resolutions agree before the value is
        // trusted; the closed form H₁ = ln2 + lnπ/2 + γ − 1/2 double-checks.
        // The integrand's x²ln|x| kink at the node needs the high-resolution
        // grids for 1e-8 stability.
        let coarse = fock1_dist(QuadratureGrid::new(0.0, 10.0, 16384).unwrap());
        let fine = fock1_dist(QuadratureGrid::new(0.0, 10.0, 32768).unwrap());
        let h_coarse = differential_entropy(&coarse).unwrap();
        let h_fine = differential_entropy(&fine).unwrap();
        assert!((h_coarse - h_fine).abs() < 1e-8);
        let closed = 2.0f64.ln() + 0.5 * std::f64::consts::PI.ln() + EULER_GAMMA - 0.5;
        assert!((h_fine - closed).abs() < 1e-9, "{h_fine} vs {closed}");
        let (h, err) = differential_entropy_with_error(&fine).unwrap();
        assert!((h - closed).abs() < 1e-9);
        assert!(err < 1e-7);
    }

    #[test]
    fn negentropy_of_gaussian_is_zero() {
        let grid = QuadratureGrid::new(0.0, 12.0, 4096).unwrap();
        for (m, v) in [(0.0, 0.5), (1.3, 2.0)] {
            let j = negentropy(&gaussian_dist(m, v, grid)).unwrap();
            assert!(j < 1e-7, "J = {j}");
            assert!(negentropy_unclipped(&gaussian_dist(m, v, grid)).unwrap().abs() < 1e-7);
        }
    }

    #[test]
    fn fock_one_negentropy_matches_fixture() {
        // J₁ = 1 + ln3/2 − ln2 − γ
        let grid = QuadratureGrid::new(0.0, 10.0, 32768).unwrap();
        let j = negentropy(&fock1_dist(grid)).unwrap();
        let want = 1.0 + 0.5 * 3.0f64.ln() - 2.0f64.ln() - EULER_GAMMA;
        assert!((j - want).abs() < 1e-9, "{j} vs {want}");
        // default-resolution value stays within the engine's working accuracy
        let j_default = negentropy(&fock1_dist(QuadratureGrid::new(0.0, 10.0, 4096).unwrap())).unwrap();
        assert!((j_default - want).abs() < 1e-7);
        assert!((want - 0.2789433).abs() < 1e-7);
    }

    #[test]
    fn negentropy_is_affine_invariant() {
        let grid = QuadratureGrid::new(0.0, 10.0, 4096).unwrap();
        let p = fock1_dist(grid);
        let j0 = negentropy(&p).unwrap();
        for (a, b) in [(2.0, 0.0), (0.5, 1.7), (3.1, -0.4)] {
            // Y = (X − b)/a has density a·p(a y + b)
            let new_grid =
                QuadratureGrid::new((grid.center - b) / a, grid.half_width / a, grid.points)
                    .unwrap();
            let density: Vec<f64> = (0..grid.points).map(|i| a * p.density[i]).collect();
            let q = QuadratureDistribution::from_density(new_grid, density, 1e-14).unwrap();
            let j = negentropy(&q).unwrap();
            assert!((j - j0).abs() < 1e-7, "a={a} b={b}: {j} vs {j0}");
        }
    }

    #[test]
    fn kl_of_identical_is_zero_and_gaussian_pair_matches_closed_form() {
        let grid = QuadratureGrid::new(0.0, 12.0, 4096).unwrap();
        let p = gaussian_dist(0.0, 0.5, grid);
        assert!(kl_divergence(&p, &p).unwrap().abs() < 1e-12);
        let q = gaussian_dist(0.0, 1.0, grid);
        let kl = kl_divergence(&p, &q).unwrap();
        let want = 0.5 * (2.0f64.ln() - 0.5);
        assert!((kl - want).abs() < 1e-10);
        assert!((want - 0.09657).abs() < 1e-5);
    }

    #[test]
    fn kl_against_moment_matched_gaussian_equals_negentropy() {
        let grid = QuadratureGrid::new(0.0, 10.0, 4096).unwrap();
        let p = fock1_dist(grid);
        let q = gaussian_dist(p.moments.mean, p.moments.variance, grid);
        let kl = kl_divergence(&p, &q).unwrap();
        let j = negentropy(&p).unwrap();
        assert!((kl - j).abs() < 1e-7, "kl={kl} j={j}");
    }

    #[test]
    fn kl_flags_support_violation() {
        let grid = QuadratureGrid::new(0.0, 10.0, 4096).unwrap();
        let p = gaussian_dist(0.0, 0.5, grid);
        // q supported only on x > 0
        let density: Vec<f64> = grid
            .xs()
            .iter()
            .map(|&x| if x > 0.0 { (-x).exp() } else { 0.0 })
            .collect();
        let q = QuadratureDistribution::from_density(grid, density, 1e-14).unwrap();
        assert!(matches!(
            kl_divergence(&p, &q),
            Err(Error::SupportError { .. })
        ));
    }

    #[test]
    fn vacuum_bin_masses_match_integration_oracle() {
        let grid = QuadratureGrid::new(0.0, 10.0, 16384).unwrap();
        let p = gaussian_dist(0.0, 0.5, grid);
        let binned = bin(&p, 0.5).unwrap();
        assert!((binned.masses.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        // oracle: high-resolution Simpson of the Gaussian over each bin
        for (i, &m) in binned.masses.iter().enumerate() {
            let k = binned.first_index + i as i64;
            let lo = k as f64 * 0.5;
            let n = 2001;
            let h = 0.5 / (n - 1) as f64;
            let vals: Vec<f64> = (0..n)
                .map(|j| {
                    let x = lo + j as f64 * h;
                    (-x * x).exp() / std::f64::consts::PI.sqrt()
                })
                .collect();
            let want = simpson_integral(&vals, h);
            assert!((m - want).abs() < 1e-8, "bin {k}: {m} vs {want}");
        }
    }

    #[test]
    fn coarsen_round_trip_is_exact() {
        let grid = QuadratureGrid::new(0.3, 10.0, 4096).unwrap();
        let p = fock1_dist(grid);
        for factor in [2usize, 4, 8] {
            let fine = bin(&p, 0.4 / factor as f64).unwrap();
            let direct = bin(&p, 0.4).unwrap();
            let merged = fine.coarsen(factor);
            assert_eq!(merged.first_index, direct.first_index);
            for (a, b) in merged.masses.iter().zip(direct.masses.iter()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn binned_kl_refinement_monotone_and_converges() {
        let grid = QuadratureGrid::new(0.0, 10.0, 4096).unwrap();
        let p = fock1_dist(grid);
        let q = gaussian_dist(p.moments.mean, p.moments.variance, grid);
        let continuous = kl_divergence(&p, &q).unwrap();
        let sigma = 1.0;
        let mut prev = binned_kl(&bin(&p, sigma).unwrap(), &bin(&q, sigma).unwrap()).unwrap();
        for m in [2.0, 4.0, 8.0] {
            let cur = binned_kl(&bin(&p, sigma / m).unwrap(), &bin(&q, sigma / m).unwrap()).unwrap();
            assert!(cur >= prev - 1e-12, "refinement must not decrease KL");
            prev = cur;
        }
        // σ → 0 limit: half_width/2¹²
        let tiny = grid.half_width / 4096.0;
        let fine = binned_kl(&bin(&p, tiny).unwrap(), &bin(&q, tiny).unwrap()).unwrap();
        assert!(
            (fine - continuous).abs() < 1e-4,
            "binned {fine} vs continuous {continuous}"
        );
    }

    #[test]
    fn binned_kl_zero_q_is_infinite() {
        let grid = QuadratureGrid::new(0.0, 10.0, 4096).unwrap();
        let p = gaussian_dist(0.0, 0.5, grid);
        let b = bin(&p, 0.5).unwrap();
        let mut q = b.clone();
        // drop a populated bin from q's range entirely
        q.masses.truncate(q.masses.len() / 2);
        let total: f64 = q.masses.iter().sum();
        for m in q.masses.iter_mut() {
            *m /= total;
        }
        assert!(binned_kl(&b, &q).unwrap().is_infinite());
        assert!(binned_kl(&b, &b).unwrap().abs() < 1e-14);
    }

    #[test]
    fn sample_negentropy_gaussian_and_fock_one() {
        use crate::rng::SplitMix64;
        // Gaussian samples → J ≈ 0 within the reported CI (plus bias slack)
        let mut rng = SplitMix64::new(99);
        let samples: Vec<f64> = (0..100_000).map(|_| 1.5 * rng.next_gaussian()).collect();
        let est = sample_negentropy(&samples, 100).unwrap();
        assert!(
            est.nats.abs() < est.ci_half_width + 0.01,
            "J = {} ± {}",
            est.nats,
            est.ci_half_width
        );

        // |1⟩ samples by inverse CDF of P₁(x) = 2x²e^{−x²}/√π
        let grid = QuadratureGrid::new(0.0, 8.0, 8192).unwrap();
        let p = fock1_dist(grid);
        let dx = grid.step();
        let mut cdf = vec![0.0; grid.points];
        for i in 1..grid.points {
            cdf[i] = cdf[i - 1] + 0.5 * (p.density[i - 1] + p.density[i]) * dx;
        }
        let norm = cdf[grid.points - 1];
        let mut rng = SplitMix64::new(7);
        let samples: Vec<f64> = (0..1_000_000)
            .map(|_| {
                let u = rng.next_f64() * norm;
                let idx = cdf.partition_point(|&c| c < u).min(grid.points - 1);
                grid.x(idx)
            })
            .collect();
        let est = sample_negentropy(&samples, 200).unwrap();
        let want = 1.0 + 0.5 * 3.0f64.ln() - 2.0f64.ln() - EULER_GAMMA;
        assert!((est.nats - want).abs() < 0.01, "J = {} vs {want}", est.nats);

        // determinism for a fixed seed
        let mut rng2 = SplitMix64::new(7);
        let again: Vec<f64> = (0..1000)
            .map(|_| {
                let u = rng2.next_f64() * norm;
                let idx = cdf.partition_point(|&c| c < u).min(grid.points - 1);
                grid.x(idx)
            })
            .collect();
        assert_eq!(&samples[..1000], &again[..]);
    }

    #[test]
    fn sample_negentropy_rejects_small_samples() {
        assert!(matches!(
            sample_negentropy(&[0.0; 999], 10),
            Err(Error::SampleSizeError { .. })
        ));
    }
}
