//! Deterministic parallel reduction of per-sample complex summands.
//!
//! Samples are grouped in fixed blocks of [`BLOCK`] indices. Each block is
//! summed sequentially, and block partial sums are combined by a pairwise
//! tree in block order. The tree shape depends only on the sample count,
//! so the result does not depend on how many worker threads ran.

use num_complex::Complex;
use rayon::prelude::*;

pub const BLOCK: u64 = 1024;

/// Running sums of one complex output.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Moments {
    pub sum: Complex<f64>,
    pub sum_sq_re: f64,
    pub sum_sq_im: f64,
    pub count: u64,
}

impl Moments {
    fn push(&mut self, x: Complex<f64>) {
        self.sum += x;
        self.sum_sq_re += x.re * x.re;
        self.sum_sq_im += x.im * x.im;
        self.count += 1;
    }

    fn merge(a: &Moments, b: &Moments) -> Moments {
        Moments {
            sum: a.sum + b.sum,
            sum_sq_re: a.sum_sq_re + b.sum_sq_re,
            sum_sq_im: a.sum_sq_im + b.sum_sq_im,
            count: a.count + b.count,
        }
    }

    pub fn mean(&self) -> Complex<f64> {
        self.sum / self.count as f64
    }

    /// Standard errors of the real and imaginary parts of the mean.
    pub fn stderr(&self) -> (f64, f64) {
        let n = self.count as f64;
        if self.count < 2 {
            return (f64::INFINITY, f64::INFINITY);
        }
        let m = self.mean();
        let var_re = ((self.sum_sq_re - n * m.re * m.re) / (n - 1.0)).max(0.0);
        let var_im = ((self.sum_sq_im - n * m.im * m.im) / (n - 1.0)).max(0.0);
        ((var_re / n).sqrt(), (var_im / n).sqrt())
    }
}

fn tree_reduce(mut level: Vec<Vec<Moments>>) -> Vec<Moments> {
    while level.len() > 1 {
        let mut next = Vec::with_capacity(level.len().div_ceil(2));
        let mut it = level.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(a.iter().zip(&b).map(|(x, y)| Moments::merge(x, y)).collect()),
                None => next.push(a),
            }
        }
        level = next;
    }
    level.pop().unwrap_or_default()
}

/// Evaluates `f(sample_index)` (which writes `n_out` values into its
/// buffer) for indices `0..n_samples` and reduces the moments.
///
/// `threads = None` uses the global rayon pool.
pub fn reduce_samples<F>(n_samples: u64, n_out: usize, threads: Option<usize>, f: F) -> Vec<Moments>
where
    F: Fn(u64, &mut [Complex<f64>]) + Sync,
{
    let n_blocks = n_samples.div_ceil(BLOCK);
    let run = || {
        (0..n_blocks)
            .into_par_iter()
            .map(|b| {
                let mut acc = vec![Moments::default(); n_out];
                let mut buf = vec![Complex::new(0.0, 0.0); n_out];
                let end = ((b + 1) * BLOCK).min(n_samples);
                for i in b * BLOCK..end {
                    f(i, &mut buf);
                    for (a, x) in acc.iter_mut().zip(&buf) {
                        a.push(*x);
                    }
                }
                acc
            })
            .collect::<Vec<_>>()
    };
    let blocks = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(run),
        None => run(),
    };
    let mut out = tree_reduce(blocks);
    if out.is_empty() {
        out = vec![Moments::default(); n_out];
    }
    out
}
