//! Monte Carlo estimates of separability probabilities and bivariate
//! determinantal moments.
//!
//! The sample index space is cut into fixed blocks; each block is reduced on
//! its own and the partial results are merged in block order. Results
//! therefore do not depend on the thread count, only on `(seed, samples)`.

use serde::{Deserialize, Serialize};

use super::matrix::{ring_determinant, Ring};
use super::sampler::{sample_density_counted, sample_stream, DensityMatrix};
use crate::error::{Error, Result};
use crate::numeric::format_rational;

const BLOCK: u64 = 4096;

/// Slack on the support bounds of sampled determinants.
pub const SUPPORT_TOL: f64 = 1e-12;
/// Lower end of the support of `det(rho^PT)`.
pub const PPT_DET_MIN: f64 = -1.0 / 16.0;
/// Upper end of the support of both `det(rho)` and `det(rho^PT)`.
pub const DET_MAX: f64 = 1.0 / 256.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McResult {
    pub ensemble: Ring,
    pub alpha: String,
    pub samples: u64,
    pub seed: u64,
    pub estimate: f64,
    pub std_error: f64,
    /// Zero-trace Ginibre draws that were discarded and redrawn.
    pub degenerate_draws: u64,
}

/// `(det(rho^PT), det(rho))` for one sampled matrix, with ring-appropriate
/// determinants and the support check applied.
pub fn determinant_pair(rho: &DensityMatrix) -> Result<(f64, f64)> {
    let m = rho.matrix();
    let pt = m.block_swap();
    let d_pt = ring_determinant(&pt)?;
    let d = ring_determinant(m)?;
    if !(PPT_DET_MIN - SUPPORT_TOL..=DET_MAX + SUPPORT_TOL).contains(&d_pt) {
        return Err(Error::Numerical(format!(
            "partial-transpose determinant {d_pt:e} outside [-1/16, 1/256]"
        )));
    }
    if !(-SUPPORT_TOL..=DET_MAX + SUPPORT_TOL).contains(&d) {
        return Err(Error::Numerical(format!("determinant {d:e} outside [0, 1/256]")));
    }
    Ok((d_pt, d))
}

/// Runs `work` over every block of `0..samples` on `threads` workers and
/// returns the per-block results in block order.
fn run_blocks<T, F>(samples: u64, threads: usize, work: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, u64) -> Result<T> + Sync,
{
    let n_blocks = samples.div_ceil(BLOCK) as usize;
    let threads = threads.clamp(1, n_blocks.max(1));
    let work = &work;
    let mut slots: Vec<Option<Result<T>>> = (0..n_blocks).map(|_| None).collect();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                scope.spawn(move || {
                    (t..n_blocks)
                        .step_by(threads)
                        .map(|b| {
                            let start = b as u64 * BLOCK;
                            let end = (start + BLOCK).min(samples);
                            (b, work(start, end))
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (b, r) in h.join().expect("Monte Carlo worker panicked") {
                slots[b] = Some(r);
            }
        }
    });
    slots.into_iter().map(|s| s.expect("every block computed")).collect()
}

fn check_args(samples: u64, threads: usize) -> Result<()> {
    if samples == 0 {
        return Err(Error::Invalid("samples must be at least 1".into()));
    }
    if threads == 0 {
        return Err(Error::Invalid("threads must be at least 1".into()));
    }
    Ok(())
}

/// Fraction of sampled `rho` with `det(rho^PT) >= 0`.
pub fn mc_separability(ring: Ring, samples: u64, seed: u64, threads: usize) -> Result<McResult> {
    check_args(samples, threads)?;
    let blocks = run_blocks(samples, threads, |start, end| {
        let mut hits = 0u64;
        let mut degenerate = 0u64;
        for i in start..end {
            let (rho, rejected) = sample_density_counted(ring, &mut sample_stream(seed, i));
            degenerate += rejected;
            let (d_pt, _) = determinant_pair(&rho)?;
            if d_pt >= 0.0 {
                hits += 1;
            }
        }
        Ok((hits, degenerate))
    })?;
    let (hits, degenerate_draws) = blocks
        .into_iter()
        .fold((0, 0), |(h, d), (bh, bd)| (h + bh, d + bd));
    let estimate = hits as f64 / samples as f64;
    Ok(McResult {
        ensemble: ring,
        alpha: format_rational(&ring.alpha()),
        samples,
        seed,
        estimate,
        std_error: (estimate * (1.0 - estimate) / samples as f64).sqrt(),
        degenerate_draws,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentEntry {
    pub n: u32,
    pub k: u32,
    pub mean: f64,
    pub std_error: f64,
}

/// Sample estimates of `<det(rho^PT)^n det(rho)^k>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BivariateMomentTable {
    pub ensemble: Ring,
    pub alpha: String,
    pub samples: u64,
    pub seed: u64,
    pub max_n: u32,
    pub max_k: u32,
    pub entries: Vec<MomentEntry>,
    /// Smallest and largest observed `det(rho^PT)`.
    pub ppt_det_range: (f64, f64),
}

impl BivariateMomentTable {
    pub fn get(&self, n: u32, k: u32) -> Option<&MomentEntry> {
        self.entries.iter().find(|e| e.n == n && e.k == k)
    }
}

struct MomentBlock {
    sums: Vec<f64>,
    squares: Vec<f64>,
    lo: f64,
    hi: f64,
}

pub fn empirical_moments(
    ring: Ring,
    samples: u64,
    max_n: u32,
    max_k: u32,
    seed: u64,
    threads: usize,
) -> Result<BivariateMomentTable> {
    check_args(samples, threads)?;
    let width = (max_k + 1) as usize;
    let cells = (max_n as usize + 1) * width;
    let blocks = run_blocks(samples, threads, |start, end| {
        let mut b = MomentBlock {
            sums: vec![0.0; cells],
            squares: vec![0.0; cells],
            lo: f64::INFINITY,
            hi: f64::NEG_INFINITY,
        };
        for i in start..end {
            let (rho, _) = sample_density_counted(ring, &mut sample_stream(seed, i));
            let (d_pt, d) = determinant_pair(&rho)?;
            b.lo = b.lo.min(d_pt);
            b.hi = b.hi.max(d_pt);
            let mut pn = 1.0;
            for n in 0..=max_n as usize {
                let mut v = pn;
                for k in 0..width {
                    b.sums[n * width + k] += v;
                    b.squares[n * width + k] += v * v;
                    v *= d;
                }
                pn *= d_pt;
            }
        }
        Ok(b)
    })?;
    let mut sums = vec![0.0; cells];
    let mut squares = vec![0.0; cells];
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for b in blocks {
        for c in 0..cells {
            sums[c] += b.sums[c];
            squares[c] += b.squares[c];
        }
        lo = lo.min(b.lo);
        hi = hi.max(b.hi);
    }
    let nf = samples as f64;
    let mut entries = Vec::with_capacity(cells);
    for n in 0..=max_n {
        for k in 0..=max_k {
            let c = n as usize * width + k as usize;
            let (mean, std_error) = if n == 0 && k == 0 {
                (1.0, 0.0)
            } else {
                let mean = sums[c] / nf;
                let var = if samples > 1 {
                    ((squares[c] - nf * mean * mean) / (nf - 1.0)).max(0.0)
                } else {
                    0.0
                };
                (mean, (var / nf).sqrt())
            };
            entries.push(MomentEntry { n, k, mean, std_error });
        }
    }
    Ok(BivariateMomentTable {
        ensemble: ring,
        alpha: format_rational(&ring.alpha()),
        samples,
        seed,
        max_n,
        max_k,
        entries,
        ppt_det_range: (lo, hi),
    })
}
