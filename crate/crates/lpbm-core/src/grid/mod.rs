//! Periodic grid representation of scalar fields, spectral transforms,
//! derivatives, and the Poisson solver the rest of the crate builds on.
//!
//! The domain is the flat torus [0, L)^n sampled at N points per axis.
//! All differential operators are exact spectral multipliers, so solver
//! error never masks the function-space phenomena under test. The forward
//! transform divides by N^n, so `coeffs[0]` equals the mean of the field;
//! the physical frequency of integer mode k is 2*pi*k/L.

pub mod fft;
pub mod io;

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Descriptor of a periodic n-dimensional sampling grid.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GridSpec {
    /// Spatial dimension, 2 or 3.
    pub dim: usize,
    /// Samples per axis; a power of two, at least 8.
    pub size: usize,
    /// Side length of the periodic box.
    pub len: f64,
}

impl GridSpec {
    pub fn new(dim: usize, size: usize, len: f64) -> Result<Self> {
        if !(dim == 2 || dim == 3) {
            return Err(Error::InvalidSpec(format!("dimension must be 2 or 3, got {dim}")));
        }
        if size < 8 || !size.is_power_of_two() {
            return Err(Error::InvalidSpec(format!(
                "grid size must be a power of two >= 8, got {size}"
            )));
        }
        if !(len > 0.0) || !len.is_finite() {
            return Err(Error::InvalidSpec(format!("box length must be positive, got {len}")));
        }
        Ok(GridSpec { dim, size, len })
    }

    /// Standard box [0, 2*pi)^dim.
    pub fn unit_torus(dim: usize, size: usize) -> Result<Self> {
        GridSpec::new(dim, size, 2.0 * PI)
    }

    pub fn node_count(&self) -> usize {
        self.size.pow(self.dim as u32)
    }

    pub fn spacing(&self) -> f64 {
        self.len / self.size as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Row-major shape, `dim` entries of `size`.
    pub fn dims(&self) -> Vec<usize> {
        vec![self.size; self.dim]
    }

    /// Integer frequency of per-axis index i; lies in [-N/2, N/2).
    #[inline]
    pub fn freq_int(&self, i: usize) -> i64 {
        if 2 * i < self.size {
            i as i64
        } else {
            i as i64 - self.size as i64
        }
    }

    /// Physical frequency 2*pi*k/L of per-axis index i.
    #[inline]
    pub fn freq(&self, i: usize) -> f64 {
        2.0 * PI * self.freq_int(i) as f64 / self.len
    }

    /// Physical frequency with the Nyquist mode zeroed; used for odd
    /// multipliers (derivatives) to keep transforms of real fields real.
    #[inline]
    pub fn freq_deriv(&self, i: usize) -> f64 {
        if 2 * i == self.size {
            0.0
        } else {
            self.freq(i)
        }
    }

    /// Largest |xi| over the grid frequency lattice.
    pub fn max_freq(&self) -> f64 {
        let half = self.size as f64 / 2.0;
        2.0 * PI * half * (self.dim as f64).sqrt() / self.len
    }

    /// Call `f(flat_index, multi_index)` for every node, row-major order.
    pub fn for_each_index(&self, mut f: impl FnMut(usize, &[usize])) {
        let mut idx = [0usize; 3];
        let dim = self.dim;
        let total = self.node_count();
        for flat in 0..total {
            f(flat, &idx[..dim]);
            for a in (0..dim).rev() {
                idx[a] += 1;
                if idx[a] < self.size {
                    break;
                }
                idx[a] = 0;
            }
        }
    }
}

/// Real-valued samples of a scalar field on a periodic grid, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub spec: GridSpec,
    pub samples: Vec<f64>,
}

impl GridFunction {
    pub fn new(spec: GridSpec, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != spec.node_count() {
            return Err(Error::InvalidSpec(format!(
                "expected {} samples, got {}",
                spec.node_count(),
                samples.len()
            )));
        }
        if let Some(index) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample { index });
        }
        Ok(GridFunction { spec, samples })
    }

    pub fn zeros(spec: GridSpec) -> Self {
        GridFunction {
            spec,
            samples: vec![0.0; spec.node_count()],
        }
    }

    pub fn constant(spec: GridSpec, value: f64) -> Self {
        GridFunction {
            spec,
            samples: vec![value; spec.node_count()],
        }
    }

    pub fn linf(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    pub fn scale(&self, c: f64) -> GridFunction {
        GridFunction {
            spec: self.spec,
            samples: self.samples.iter().map(|v| c * v).collect(),
        }
    }

    pub fn add(&self, other: &GridFunction) -> Result<GridFunction> {
        check_specs(self.spec, other.spec)?;
        Ok(GridFunction {
            spec: self.spec,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        check_specs(self.spec, other.spec)?;
        Ok(GridFunction {
            spec: self.spec,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Pointwise product of the sample values.
    pub fn mul_pointwise(&self, other: &GridFunction) -> Result<GridFunction> {
        check_specs(self.spec, other.spec)?;
        Ok(GridFunction {
            spec: self.spec,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    pub fn add_assign(&mut self, other: &GridFunction) {
        debug_assert_eq!(self.spec, other.spec);
        for (a, b) in self.samples.iter_mut().zip(&other.samples) {
            *a += b;
        }
    }

    /// Unitary-normalized discrete Fourier coefficients of the field.
    pub fn forward_transform(&self) -> SpectralField {
        let mut data: Vec<Complex64> = self
            .samples
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        fft::forward(&mut data, &self.spec.dims());
        SpectralField {
            spec: self.spec,
            coeffs: data,
        }
    }

    /// Spectral partial derivative along `axis` (multiplier i*2*pi*k/L,
    /// Nyquist mode zeroed).
    pub fn partial_derivative(&self, axis: usize) -> Result<GridFunction> {
        if axis >= self.spec.dim {
            return Err(Error::AxisOutOfRange {
                axis,
                dim: self.spec.dim,
            });
        }
        let mut hat = self.forward_transform();
        hat.derivative_in_place(axis);
        Ok(hat.inverse_transform())
    }
}

pub(crate) fn check_specs(a: GridSpec, b: GridSpec) -> Result<()> {
    if a != b {
        return Err(Error::SpecMismatch(a, b));
    }
    Ok(())
}

/// Complex Fourier coefficients of a grid function, indexed by integer
/// frequencies k in [-N/2, N/2)^n (row-major over the shifted index).
#[derive(Debug, Clone)]
pub struct SpectralField {
    pub spec: GridSpec,
    pub coeffs: Vec<Complex64>,
}

impl SpectralField {
    /// Inverse transform; the imaginary residue of a Hermitian-symmetric
    /// spectrum is rounding noise and is dropped.
    pub fn inverse_transform(&self) -> GridFunction {
        let mut data = self.coeffs.clone();
        fft::inverse(&mut data, &self.spec.dims());
        GridFunction {
            spec: self.spec,
            samples: data.iter().map(|c| c.re).collect(),
        }
    }

    /// Multiply coefficient-wise by `m(multi_index)`.
    pub fn apply_multiplier(&mut self, mut m: impl FnMut(&GridSpec, &[usize]) -> Complex64) {
        let spec = self.spec;
        let mut idx = [0usize; 3];
        let dim = spec.dim;
        for flat in 0..self.coeffs.len() {
            self.coeffs[flat] *= m(&spec, &idx[..dim]);
            for a in (0..dim).rev() {
                idx[a] += 1;
                if idx[a] < spec.size {
                    break;
                }
                idx[a] = 0;
            }
        }
    }

    pub fn derivative_in_place(&mut self, axis: usize) {
        self.apply_multiplier(|spec, idx| Complex64::new(0.0, spec.freq_deriv(idx[axis])));
    }

    /// Squared physical frequency |2*pi*k/L|^2 at a multi-index.
    pub fn freq_norm_sq(spec: &GridSpec, idx: &[usize]) -> f64 {
        idx.iter().map(|&i| spec.freq(i).powi(2)).sum()
    }

    /// Max deviation from Hermitian symmetry coeffs(-k) = conj(coeffs(k)).
    pub fn hermitian_defect(&self) -> f64 {
        let spec = self.spec;
        let dims = spec.dims();
        let mut worst = 0.0f64;
        spec.for_each_index(|flat, idx| {
            let mut mirror = 0usize;
            for (a, &i) in idx.iter().enumerate() {
                let m = if i == 0 { 0 } else { spec.size - i };
                mirror = mirror * dims[a] + m;
            }
            let d = (self.coeffs[flat].conj() - self.coeffs[mirror]).norm();
            worst = worst.max(d);
        });
        worst
    }
}

/// Solve -Delta u = f - mean(f) on the torus with mean(u) = 0.
///
/// Requires |mean(f)| <= mean_tol * ||f||_inf; a larger mean signals an RHS
/// that is not a valid torus Poisson datum.
pub fn solve_poisson(f: &GridFunction, mean_tol: f64) -> Result<GridFunction> {
    let mean = f.mean();
    let bound = mean_tol * f.linf();
    if mean.abs() > bound {
        return Err(Error::MeanNotZero { mean, bound });
    }
    let mut hat = f.forward_transform();
    hat.coeffs[0] = Complex64::new(0.0, 0.0);
    hat.apply_multiplier(|spec, idx| {
        let k2 = SpectralField::freq_norm_sq(spec, idx);
        if k2 == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(1.0 / k2, 0.0)
        }
    });
    Ok(hat.inverse_transform())
}

/// Sample an evaluator at the grid nodes x = (L/N) * index.
pub fn sample(spec: GridSpec, eval: impl Fn(&[f64]) -> f64) -> Result<GridFunction> {
    let h = spec.spacing();
    let mut samples = vec![0.0; spec.node_count()];
    let mut bad = None;
    let mut x = [0.0f64; 3];
    spec.for_each_index(|flat, idx| {
        for (a, &i) in idx.iter().enumerate() {
            x[a] = h * i as f64;
        }
        let v = eval(&x[..spec.dim]);
        samples[flat] = v;
        if !v.is_finite() && bad.is_none() {
            bad = Some(flat);
        }
    });
    if let Some(index) = bad {
        return Err(Error::NonFiniteSample { index });
    }
    Ok(GridFunction { spec, samples })
}

/// Embed an N-grid spectrum into the 2N grid (same box). The Nyquist plane
/// splits evenly between +N/2 and -N/2 so the padded spectrum stays
/// Hermitian-symmetric.
pub(crate) fn pad_spectrum(field: &SpectralField) -> (Vec<Complex64>, Vec<usize>) {
    let spec = field.spec;
    let n = spec.size;
    let big_n = 2 * n;
    let dim = spec.dim;
    let big_dims = vec![big_n; dim];
    let mut big = vec![Complex64::default(); big_n.pow(dim as u32)];

    // Per-axis targets: index i maps to one slot, except the Nyquist index
    // which maps to two with weight 1/2.
    let mut targets: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
    for i in 0..n {
        let k = spec.freq_int(i);
        if 2 * i == n {
            targets.push(vec![(n / 2, 0.5), (big_n - n / 2, 0.5)]);
        } else if k >= 0 {
            targets.push(vec![(i, 1.0)]);
        } else {
            targets.push(vec![((k + big_n as i64) as usize, 1.0)]);
        }
    }

    spec.for_each_index(|flat, idx| {
        let c = field.coeffs[flat];
        if c == Complex64::default() {
            return;
        }
        // Cartesian product of per-axis targets (at most 2^dim entries).
        let mut slots = [(0usize, 1.0f64); 8];
        let mut count = 1usize;
        slots[0] = (0, 1.0);
        for (a, &i) in idx.iter().enumerate() {
            let opts = &targets[i];
            let _ = a;
            let mut next = [(0usize, 1.0f64); 8];
            let mut next_count = 0;
            for s in 0..count {
                for &(t, w) in opts {
                    next[next_count] = (slots[s].0 * big_n + t, slots[s].1 * w);
                    next_count += 1;
                }
            }
            slots = next;
            count = next_count;
        }
        for &(pos, w) in &slots[..count] {
            big[pos] += c * w;
        }
    });
    (big, big_dims)
}

/// Restrict a 2N-grid spectrum back to the N grid (adjoint of `pad_spectrum`
/// on the retained band; the Nyquist planes fold together).
pub(crate) fn truncate_spectrum(big: &[Complex64], spec: GridSpec) -> SpectralField {
    let n = spec.size;
    let big_n = 2 * n;
    let mut coeffs = vec![Complex64::default(); spec.node_count()];
    let mut sources: Vec<Vec<usize>> = Vec::with_capacity(n);
    for i in 0..n {
        let k = spec.freq_int(i);
        if 2 * i == n {
            sources.push(vec![n / 2, big_n - n / 2]);
        } else if k >= 0 {
            sources.push(vec![i]);
        } else {
            sources.push(vec![(k + big_n as i64) as usize]);
        }
    }
    spec.for_each_index(|flat, idx| {
        let mut slots = [0usize; 8];
        let mut count = 1usize;
        for &i in idx {
            let opts = &sources[i];
            let mut next = [0usize; 8];
            let mut next_count = 0;
            for s in 0..count {
                for &t in opts {
                    next[next_count] = slots[s] * big_n + t;
                    next_count += 1;
                }
            }
            slots = next;
            count = next_count;
        }
        let mut acc = Complex64::default();
        for &pos in &slots[..count] {
            acc += big[pos];
        }
        coeffs[flat] = acc;
    });
    SpectralField { spec, coeffs }
}

/// Product of two fields computed on the zero-padded 2N grid, truncated back
/// to the represented band. Exact convolution for that band: no aliasing.
pub fn dealiased_product(f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    check_specs(f.spec, g.spec)?;
    let (mut pf, big_dims) = pad_spectrum(&f.forward_transform());
    fft::inverse(&mut pf, &big_dims);
    {
        let (mut pg, _) = pad_spectrum(&g.forward_transform());
        fft::inverse(&mut pg, &big_dims);
        for (a, b) in pf.iter_mut().zip(pg.iter()) {
            *a = Complex64::new(a.re * b.re, 0.0);
        }
    }
    fft::forward(&mut pf, &big_dims);
    Ok(truncate_spectrum(&pf, f.spec).inverse_transform())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec2(n: usize) -> GridSpec {
        GridSpec::unit_torus(2, n).unwrap()
    }

    fn random_field(spec: GridSpec, seed: u64) -> GridFunction {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let samples = (0..spec.node_count())
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        GridFunction::new(spec, samples).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(GridSpec::new(2, 16, 1.0).is_ok());
        assert!(GridSpec::new(4, 16, 1.0).is_err());
        assert!(GridSpec::new(2, 12, 1.0).is_err());
        assert!(GridSpec::new(2, 4, 1.0).is_err());
        assert!(GridSpec::new(3, 16, 0.0).is_err());
    }

    #[test]
    fn transform_of_constant_is_dc() {
        let f = GridFunction::constant(spec2(16), 1.0);
        let hat = f.forward_transform();
        assert!((hat.coeffs[0] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!(hat.coeffs[1..].iter().all(|c| c.norm() < 1e-13));
    }

    #[test]
    fn transform_of_single_mode() {
        // sin(2 pi x_1 / L) has coefficients -i/2 at k=(1,0) and +i/2 at k=(-1,0).
        let spec = spec2(32);
        let f = sample(spec, |x| (2.0 * PI * x[0] / spec.len).sin()).unwrap();
        let hat = f.forward_transform();
        let size = spec.size;
        let plus = 1 * size + 0; // k = (1, 0)
        let minus = (size - 1) * size + 0; // k = (-1, 0)
        assert!((hat.coeffs[plus] - Complex64::new(0.0, -0.5)).norm() < 1e-13);
        assert!((hat.coeffs[minus] - Complex64::new(0.0, 0.5)).norm() < 1e-13);
        let rest: f64 = hat
            .coeffs
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != plus && *i != minus)
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max);
        assert!(rest < 1e-13);
    }

    #[test]
    fn roundtrip_and_hermitian_symmetry() {
        let f = random_field(spec2(32), 7);
        let hat = f.forward_transform();
        assert!(hat.hermitian_defect() < 1e-13);
        let back = hat.inverse_transform();
        let err = f.sub(&back).unwrap().linf();
        assert!(err < 1e-12 * f.linf());
    }

    #[test]
    fn parseval_identity() {
        let spec = spec2(32);
        let f = random_field(spec, 11);
        let hat = f.forward_transform();
        let phys: f64 = f.samples.iter().map(|v| v * v).sum::<f64>() * spec.cell_volume();
        let spect: f64 =
            hat.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() * spec.len.powi(spec.dim as i32);
        assert!((phys - spect).abs() < 1e-10 * phys.max(1.0));
    }

    #[test]
    fn derivative_of_sine_is_cosine() {
        let spec = GridSpec::new(2, 64, 3.0).unwrap();
        let w = 2.0 * PI / spec.len;
        let f = sample(spec, |x| (w * x[0]).sin()).unwrap();
        let d = f.partial_derivative(0).unwrap();
        let expect = sample(spec, |x| w * (w * x[0]).cos()).unwrap();
        assert!(d.sub(&expect).unwrap().linf() < 1e-10);
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        let f = GridFunction::constant(spec2(16), 4.2);
        assert!(f.partial_derivative(0).unwrap().linf() < 1e-13);
        assert!(f.partial_derivative(2).is_err());
    }

    #[test]
    fn mixed_partials_commute() {
        let f = random_field(spec2(32), 3);
        let dxy = f
            .partial_derivative(0)
            .unwrap()
            .partial_derivative(1)
            .unwrap();
        let dyx = f
            .partial_derivative(1)
            .unwrap()
            .partial_derivative(0)
            .unwrap();
        let scale = dxy.linf().max(1.0);
        assert!(dxy.sub(&dyx).unwrap().linf() < 1e-12 * scale);
    }

    #[test]
    fn poisson_eigenfunction() {
        // -Delta u = sin(2 pi x / L)  =>  u = (L / 2 pi)^2 sin(2 pi x / L).
        let spec = GridSpec::new(2, 32, 5.0).unwrap();
        let w = 2.0 * PI / spec.len;
        let f = sample(spec, |x| (w * x[0]).sin()).unwrap();
        let u = solve_poisson(&f, 1e-10).unwrap();
        let expect = f.scale(1.0 / (w * w));
        assert!(u.sub(&expect).unwrap().linf() < 1e-12 * expect.linf());
    }

    #[test]
    fn poisson_zero_and_residual() {
        let z = GridFunction::zeros(spec2(16));
        assert!(solve_poisson(&z, 1e-10).unwrap().linf() == 0.0);

        let spec = spec2(32);
        let f0 = random_field(spec, 5);
        let f = f0.sub(&GridFunction::constant(spec, f0.mean())).unwrap();
        let u = solve_poisson(&f, 1e-10).unwrap();
        // Residual check: -Delta u must reproduce f - mean(f).
        let mut hat = u.forward_transform();
        hat.apply_multiplier(|s, idx| Complex64::new(SpectralField::freq_norm_sq(s, idx), 0.0));
        let lap = hat.inverse_transform();
        assert!(lap.sub(&f).unwrap().linf() < 1e-10 * f.linf());
        assert!(u.mean().abs() < 1e-12 * f.linf());
    }

    #[test]
    fn poisson_rejects_nonzero_mean() {
        let f = GridFunction::constant(spec2(16), 1.0);
        match solve_poisson(&f, 1e-10) {
            Err(Error::MeanNotZero { .. }) => {}
            other => panic!("expected MeanNotZero, got {other:?}"),
        }
    }

    #[test]
    fn sample_ramp_matches_nodes() {
        let spec = spec2(16);
        let f = sample(spec, |x| x[0]).unwrap();
        let h = spec.spacing();
        spec.for_each_index(|flat, idx| {
            assert_eq!(f.samples[flat], h * idx[0] as f64);
        });
    }

    #[test]
    fn sample_rejects_non_finite() {
        let spec = spec2(16);
        assert!(matches!(
            sample(spec, |x| 1.0 / x[0]),
            Err(Error::NonFiniteSample { index: 0 })
        ));
    }

    #[test]
    fn dealiased_product_of_modes() {
        // cos(k x) * cos(k x) = 1/2 + cos(2 k x) / 2 lies in band for 2k < N/2.
        let spec = spec2(32);
        let w = 2.0 * PI / spec.len;
        let f = sample(spec, |x| (3.0 * w * x[0]).cos()).unwrap();
        let p = dealiased_product(&f, &f).unwrap();
        let expect = sample(spec, |x| 0.5 + 0.5 * (6.0 * w * x[0]).cos()).unwrap();
        assert!(p.sub(&expect).unwrap().linf() < 1e-12);
    }

    #[test]
    fn dealiased_product_drops_out_of_band_content() {
        // With k = 3N/8, the product's 2k mode exceeds the band: only the
        // constant part survives, while the pointwise product keeps an
        // aliased image.
        let spec = spec2(16);
        let w = 2.0 * PI / spec.len;
        let k = 6.0; // 2k = 12 > N/2 = 8
        let f = sample(spec, |x| (k * w * x[0]).cos()).unwrap();
        let p = dealiased_product(&f, &f).unwrap();
        let expect = GridFunction::constant(spec, 0.5);
        assert!(p.sub(&expect).unwrap().linf() < 1e-12);
    }

    #[test]
    fn pad_truncate_roundtrip() {
        let f = random_field(spec2(16), 9);
        let hat = f.forward_transform();
        let (big, big_dims) = pad_spectrum(&hat);
        assert_eq!(big.len(), 32 * 32);
        assert_eq!(big_dims, vec![32, 32]);
        let back = truncate_spectrum(&big, f.spec);
        let err: f64 = hat
            .coeffs
            .iter()
            .zip(&back.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-14);
        // The padded field evaluates to the same values at the coarse nodes.
        let mut big_phys = big.clone();
        fft::inverse(&mut big_phys, &big_dims);
        let coarse = hat.inverse_transform();
        f.spec.for_each_index(|flat, idx| {
            let pos = (2 * idx[0]) * 32 + 2 * idx[1];
            assert!((big_phys[pos].re - coarse.samples[flat]).abs() < 1e-12);
        });
    }
}
