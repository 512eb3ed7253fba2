//! Axis-wise transforms on flat row-major complex arrays.
//!
//! Every line is processed independently, so results do not depend on the
//! number of worker threads.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

fn planner() -> &'static Mutex<(FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn Fft<f64>>>)> {
    static P: OnceLock<Mutex<(FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn Fft<f64>>>)>> =
        OnceLock::new();
    P.get_or_init(|| Mutex::new((FftPlanner::new(), HashMap::new())))
}

pub fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut guard = planner().lock().expect("fft planner poisoned");
    let (pl, cache) = &mut *guard;
    cache
        .entry((n, inverse))
        .or_insert_with(|| if inverse { pl.plan_fft_inverse(n) } else { pl.plan_fft_forward(n) })
        .clone()
}

/// Apply `f(base, line)` to every line along `axis`. `base` is the flat
/// index of the line's first element; element k sits at `base + k*stride`.
pub fn map_lines<F>(data: &mut [C64], shape: &[usize], axis: usize, f: F)
where
    F: Fn(usize, &mut [C64]) + Sync,
{
    let n = shape[axis];
    let stride: usize = shape[axis + 1..].iter().product();
    if stride == 1 {
        data.par_chunks_mut(n).enumerate().for_each(|(l, line)| f(l * n, line));
        return;
    }
    let block = n * stride;
    let mut tmp = vec![C64::default(); data.len()];
    {
        let src = &*data;
        tmp.par_chunks_mut(n).enumerate().for_each(|(l, line)| {
            let base = (l / stride) * block + l % stride;
            for (k, v) in line.iter_mut().enumerate() {
                *v = src[base + k * stride];
            }
            f(base, line);
        });
    }
    data.par_chunks_mut(stride).enumerate().for_each(|(r, row)| {
        let (o, k) = (r / n, r % n);
        for (i, v) in row.iter_mut().enumerate() {
            *v = tmp[(o * stride + i) * n + k];
        }
    });
}

/// Unnormalised forward / normalised inverse DFT along one axis.
pub fn fft_axis(data: &mut [C64], shape: &[usize], axis: usize, inverse: bool) {
    let n = shape[axis];
    let p = plan(n, inverse);
    let scale = 1.0 / n as f64;
    map_lines(data, shape, axis, |_, line| {
        p.process(line);
        if inverse {
            line.iter_mut().for_each(|v| *v *= scale);
        }
    });
}

pub fn fft_axes(data: &mut [C64], shape: &[usize], axes: &[usize], inverse: bool) {
    for &a in axes {
        fft_axis(data, shape, a, inverse);
    }
}

/// Signed DFT mode index for position m of an n-point transform.
#[inline]
pub fn signed_mode(m: usize, n: usize) -> i64 {
    if m < n.div_ceil(2) {
        m as i64
    } else {
        m as i64 - n as i64
    }
}

/// True for the unpaired Nyquist mode of an even-length transform.
#[inline]
pub fn is_nyquist(m: usize, n: usize) -> bool {
    n % 2 == 0 && m == n / 2
}
