//! Dyadic partition of unity on frequency space and Littlewood-Paley
//! decompositions f^j = F^{-1}(phi_j F f).
//!
//! The base cutoff psi is the exponential-bump blend
//!   psi(t) = 1 for t <= 1, 0 for t >= 3/2,
//!   psi(t) = h(3/2 - t) / (h(3/2 - t) + h(t - 1)),  h(s) = exp(-1/s),
//! and the ladder is phi_0 = psi, phi_j(t) = psi(2^-j t) - psi(2^-j+1 t).
//! On a grid the ladder is finite: the top block is 1 minus the partial sum,
//! so the partition identity holds exactly on every representable frequency.
//! Block indices use physical frequency |2 pi k / L|, which keeps them
//! grid-resolution independent.

use crate::error::{Error, Result};
use crate::grid::{check_specs, fft, GridFunction, GridSpec, SpectralField};
use num_complex::Complex64;

/// The exponential smoothstep: 1 on t <= 1, 0 on t >= 3/2, smooth and
/// non-increasing in between.
pub fn smoothstep(t: f64) -> f64 {
    if t <= 1.0 {
        1.0
    } else if t >= 1.5 {
        0.0
    } else {
        let a = bump(1.5 - t);
        let b = bump(t - 1.0);
        a / (a + b)
    }
}

fn bump(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

/// The family {phi_j} of radial frequency-space cutoffs for one grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionOfUnity {
    pub spec: GridSpec,
    /// Top block index: the smallest j with 2^(j-1) >= max grid frequency.
    pub j_max: usize,
}

impl PartitionOfUnity {
    pub fn build(spec: GridSpec) -> PartitionOfUnity {
        let max_freq = spec.max_freq();
        let mut j = 0usize;
        while pow2(j as i32 - 1) < max_freq {
            j += 1;
        }
        PartitionOfUnity { spec, j_max: j }
    }

    /// Number of blocks, j = 0 ..= j_max.
    pub fn block_count(&self) -> usize {
        self.j_max + 1
    }

    /// phi_j evaluated at frequency magnitude t.
    pub fn phi(&self, j: usize, t: f64) -> f64 {
        if j == 0 {
            smoothstep(t)
        } else if j < self.j_max {
            smoothstep(t * pow2(-(j as i32))) - smoothstep(t * pow2(-(j as i32) + 1))
        } else {
            1.0 - self.partial_sum(self.j_max - 1, t)
        }
    }

    /// Sum of phi_0 .. phi_m, accumulated in ascending order. For m < j_max
    /// this telescopes to psi(2^-m t) exactly.
    pub fn partial_sum(&self, m: usize, t: f64) -> f64 {
        let mut sum = smoothstep(t);
        for j in 1..=m {
            sum += self.phi(j, t);
        }
        sum
    }

    /// Frequency magnitudes |2 pi k / L| for every coefficient slot.
    pub fn freq_magnitudes(&self) -> Vec<f64> {
        let spec = self.spec;
        let mut mags = vec![0.0; spec.node_count()];
        spec.for_each_index(|flat, idx| {
            mags[flat] = SpectralField::freq_norm_sq(&spec, idx).sqrt();
        });
        mags
    }
}

#[inline]
fn pow2(e: i32) -> f64 {
    (2.0f64).powi(e)
}

/// Ordered blocks f^0 .. f^{j_max} of one input function.
#[derive(Debug, Clone)]
pub struct DyadicDecomposition {
    pub partition: PartitionOfUnity,
    pub blocks: Vec<GridFunction>,
}

impl DyadicDecomposition {
    /// Pointwise sum of the blocks.
    pub fn reconstruct(&self) -> GridFunction {
        let mut out = GridFunction::zeros(self.partition.spec);
        for b in &self.blocks {
            out.add_assign(b);
        }
        out
    }
}

/// Compute every dyadic block of `f`.
pub fn decompose(f: &GridFunction, part: &PartitionOfUnity) -> Result<DyadicDecomposition> {
    check_specs(f.spec, part.spec)?;
    let hat = f.forward_transform();
    let mut blocks = Vec::with_capacity(part.block_count());
    for_each_block(&hat, part, |_, block| blocks.push(block.clone()));
    Ok(DyadicDecomposition {
        partition: *part,
        blocks,
    })
}

/// Stream the blocks of an already-transformed field without materializing
/// the whole decomposition. The closure receives each block in order.
pub fn for_each_block(
    hat: &SpectralField,
    part: &PartitionOfUnity,
    mut visit: impl FnMut(usize, &GridFunction),
) {
    let spec = hat.spec;
    let mags = part.freq_magnitudes();
    let dims = spec.dims();
    let mut buf = vec![Complex64::default(); hat.coeffs.len()];
    for j in 0..part.block_count() {
        let mut any = false;
        for (slot, (&c, &m)) in buf.iter_mut().zip(hat.coeffs.iter().zip(mags.iter())) {
            let w = part.phi(j, m);
            if w != 0.0 && c != Complex64::default() {
                *slot = c * w;
                any = true;
            } else {
                *slot = Complex64::default();
            }
        }
        if any {
            fft::inverse(&mut buf, &dims);
            let block = GridFunction {
                spec,
                samples: buf.iter().map(|c| c.re).collect(),
            };
            visit(j, &block);
        } else {
            visit(j, &GridFunction::zeros(spec));
        }
    }
}

/// Spectral energy per block index of `f` (squares of L2 norms of blocks).
pub fn block_energies(f: &GridFunction, part: &PartitionOfUnity) -> Result<Vec<f64>> {
    check_specs(f.spec, part.spec)?;
    let hat = f.forward_transform();
    let vol = f.spec.cell_volume();
    let mut energies = Vec::with_capacity(part.block_count());
    for_each_block(&hat, part, |_, block| {
        energies.push(block.samples.iter().map(|v| v * v).sum::<f64>() * vol);
    });
    Ok(energies)
}
