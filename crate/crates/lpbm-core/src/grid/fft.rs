//! In-place n-dimensional FFT on row-major complex data, built on rustfft.
//!
//! The forward transform divides by the total node count, so coefficient 0
//! of a transformed field is its mean. The inverse applies no scaling.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

thread_local! {
    static PLANS: RefCell<HashMap<(usize, bool), Arc<dyn Fft<f64>>>> =
        RefCell::new(HashMap::new());
}

fn plan(len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cell| {
        cell.borrow_mut()
            .entry((len, forward))
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                if forward {
                    planner.plan_fft_forward(len)
                } else {
                    planner.plan_fft_inverse(len)
                }
            })
            .clone()
    })
}

/// Transform every line of `data` along `axis`. `dims` is the row-major shape.
fn transform_axis(data: &mut [Complex64], dims: &[usize], axis: usize, forward: bool) {
    let len = dims[axis];
    let inner: usize = dims[axis + 1..].iter().product();
    let outer: usize = dims[..axis].iter().product();
    let fft = plan(len, forward);
    let mut line = vec![Complex64::default(); len];
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    for o in 0..outer {
        let base_o = o * len * inner;
        for i in 0..inner {
            let base = base_o + i;
            if inner == 1 {
                fft.process_with_scratch(&mut data[base..base + len], &mut scratch);
            } else {
                for (j, v) in line.iter_mut().enumerate() {
                    *v = data[base + j * inner];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (j, v) in line.iter().enumerate() {
                    data[base + j * inner] = *v;
                }
            }
        }
    }
}

/// In-place forward DFT over all axes, normalized by 1/len(data).
pub fn forward(data: &mut [Complex64], dims: &[usize]) {
    debug_assert_eq!(data.len(), dims.iter().product::<usize>());
    for axis in 0..dims.len() {
        transform_axis(data, dims, axis, true);
    }
    let scale = 1.0 / data.len() as f64;
    for v in data.iter_mut() {
        *v *= scale;
    }
}

/// In-place inverse DFT over all axes (no scaling).
pub fn inverse(data: &mut [Complex64], dims: &[usize]) {
    debug_assert_eq!(data.len(), dims.iter().product::<usize>());
    for axis in 0..dims.len() {
        transform_axis(data, dims, axis, false);
    }
}
