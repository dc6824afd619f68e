//! Structured random orthogonal mixing `Ω = D F S D̃ F S̃`.
//!
//! `S̃`, `S` are uniformly random permutations, `F` the unitary discrete
//! Fourier transform and `D̃`, `D` diagonal matrices of uniformly random
//! unit-modulus phases. Real vectors of even length `n` are viewed as `n/2`
//! complex numbers by pairing consecutive entries `(x[2j], x[2j+1])` as real
//! and imaginary parts; the resulting real-linear map is orthogonal because
//! every stage is unitary.
//!
//! Odd lengths cannot be paired. For those the operator falls back to the
//! same two-stage chain with an orthonormal DCT-II in place of `F` and
//! random signs in place of the phases.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{invalid, Result};
use crate::matrix::SmallDense;
use crate::rng::{fisher_yates, seeded_rng, stream};

/// Which transform family the operator uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParityMode {
    /// Even `n`: complex pairing with FFTs.
    Complex,
    /// Odd `n`: real cosine transform with random signs.
    Real,
}

/// One `D·F·S` factor.
#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    /// Unit-modulus diagonal; purely real `±1` in [`ParityMode::Real`].
    pub phases: Vec<Complex64>,
    /// Gather permutation: slot `i` receives input slot `perm[i]`.
    pub perm: Vec<usize>,
}

#[derive(Clone)]
enum Transform {
    Fourier {
        forward: Arc<dyn Fft<f64>>,
        inverse: Arc<dyn Fft<f64>>,
        scale: f64,
    },
    /// Row-major orthonormal DCT-II matrix.
    Cosine(Arc<Vec<f64>>),
}

/// The random orthogonal operator applied along the short dimension.
#[derive(Clone)]
pub struct MixingOperator {
    n: usize,
    /// Applied first (`D̃ F S̃`).
    inner: Stage,
    /// Applied second (`D F S`).
    outer: Stage,
    parity: ParityMode,
    transform: Transform,
}

impl fmt::Debug for MixingOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MixingOperator")
            .field("n", &self.n)
            .field("parity", &self.parity)
            .field("inner", &self.inner)
            .field("outer", &self.outer)
            .finish()
    }
}

impl PartialEq for MixingOperator {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.parity == other.parity
            && self.inner == other.inner
            && self.outer == other.outer
    }
}

fn draw_stage<R: Rng>(slots: usize, parity: ParityMode, rng: &mut R) -> Stage {
    let phases = (0..slots)
        .map(|_| match parity {
            ParityMode::Complex => {
                let theta = std::f64::consts::TAU * rng.random::<f64>();
                Complex64::from_polar(1.0, theta)
            }
            ParityMode::Real => {
                if rng.random::<bool>() {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(-1.0, 0.0)
                }
            }
        })
        .collect();
    let perm = fisher_yates(slots, rng);
    Stage { phases, perm }
}

fn dct_matrix(n: usize) -> Vec<f64> {
    // Row k holds frequency k: y = C x.
    let first = (1.0 / n as f64).sqrt();
    let rest = (2.0 / n as f64).sqrt();
    let mut c = vec![0.0; n * n];
    for k in 0..n {
        for i in 0..n {
            c[k * n + i] = if k == 0 {
                first
            } else {
                // (2i+1)k reduced modulo 4n keeps the cosine argument small.
                let t = ((2 * i + 1) * k) % (4 * n);
                rest * (std::f64::consts::PI * t as f64 / (2 * n) as f64).cos()
            };
        }
    }
    c
}

impl MixingOperator {
    /// Draws an operator of dimension `n ≥ 2` from `seed`.
    pub fn build(n: usize, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!("mixing needs dimension at least 2, got {n}")));
        }
        let parity = if n.is_multiple_of(2) {
            ParityMode::Complex
        } else {
            ParityMode::Real
        };
        let slots = match parity {
            ParityMode::Complex => n / 2,
            ParityMode::Real => n,
        };
        let mut rng = seeded_rng(seed, stream::MIXING);
        let inner = draw_stage(slots, parity, &mut rng);
        let outer = draw_stage(slots, parity, &mut rng);
        let transform = match parity {
            ParityMode::Complex => {
                let mut planner = FftPlanner::new();
                Transform::Fourier {
                    forward: planner.plan_fft_forward(slots),
                    inverse: planner.plan_fft_inverse(slots),
                    scale: 1.0 / (slots as f64).sqrt(),
                }
            }
            ParityMode::Real => Transform::Cosine(Arc::new(dct_matrix(n))),
        };
        Ok(Self {
            n,
            inner,
            outer,
            parity,
            transform,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parity(&self) -> ParityMode {
        self.parity
    }

    /// The stage applied first (`D̃`, `S̃`).
    pub fn inner_stage(&self) -> &Stage {
        &self.inner
    }

    /// The stage applied last (`D`, `S`).
    pub fn outer_stage(&self) -> &Stage {
        &self.outer
    }

    /// `Ω x` for every column of `x`.
    pub fn apply(&self, x: &SmallDense) -> Result<SmallDense> {
        self.check_rows(x)?;
        Ok(self.apply_to_rows(&x.transpose())?.transpose())
    }

    /// `Ω⁻¹ x = Ωᵀ x` for every column of `x`.
    pub fn apply_inverse(&self, x: &SmallDense) -> Result<SmallDense> {
        self.check_rows(x)?;
        Ok(self.apply_inverse_to_rows(&x.transpose())?.transpose())
    }

    /// Replaces every row `r` of `x` with `(Ω rᵀ)ᵀ`, i.e. returns `x Ωᵀ`.
    pub fn apply_to_rows(&self, x: &SmallDense) -> Result<SmallDense> {
        self.map_rows(x, false)
    }

    /// Returns `x Ω`, the row-wise inverse of [`Self::apply_to_rows`].
    pub fn apply_inverse_to_rows(&self, x: &SmallDense) -> Result<SmallDense> {
        self.map_rows(x, true)
    }

    /// `Ω` as a dense real `n × n` matrix.
    pub fn materialize(&self) -> SmallDense {
        self.apply(&SmallDense::identity(self.n))
            .expect("identity has n rows")
    }

    fn check_rows(&self, x: &SmallDense) -> Result<()> {
        if x.rows() != self.n {
            return Err(invalid(format!(
                "mixing operator of dimension {} applied to {} rows",
                self.n,
                x.rows()
            )));
        }
        Ok(())
    }

    fn map_rows(&self, x: &SmallDense, inverse: bool) -> Result<SmallDense> {
        if x.cols() != self.n {
            return Err(invalid(format!(
                "mixing operator of dimension {} applied to vectors of length {}",
                self.n,
                x.cols()
            )));
        }
        let mut out = x.clone();
        match &self.transform {
            Transform::Fourier {
                forward,
                inverse: inv_plan,
                scale,
            } => {
                let slots = self.n / 2;
                let plan = if inverse { inv_plan } else { forward };
                let mut buf = vec![Complex64::new(0.0, 0.0); slots];
                let mut tmp = buf.clone();
                let mut scratch =
                    vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
                for i in 0..out.rows() {
                    let row = out.row_mut(i);
                    for (j, c) in buf.iter_mut().enumerate() {
                        *c = Complex64::new(row[2 * j], row[2 * j + 1]);
                    }
                    let mut fft = |v: &mut [Complex64]| {
                        plan.process_with_scratch(v, &mut scratch);
                        for c in v.iter_mut() {
                            *c *= *scale;
                        }
                    };
                    if inverse {
                        for stage in [&self.outer, &self.inner] {
                            for (c, p) in buf.iter_mut().zip(&stage.phases) {
                                *c *= p.conj();
                            }
                            fft(&mut buf);
                            for (k, &p) in stage.perm.iter().enumerate() {
                                tmp[p] = buf[k];
                            }
                            std::mem::swap(&mut buf, &mut tmp);
                        }
                    } else {
                        for stage in [&self.inner, &self.outer] {
                            for (k, &p) in stage.perm.iter().enumerate() {
                                tmp[k] = buf[p];
                            }
                            std::mem::swap(&mut buf, &mut tmp);
                            fft(&mut buf);
                            for (c, p) in buf.iter_mut().zip(&stage.phases) {
                                *c *= p;
                            }
                        }
                    }
                    for (j, c) in buf.iter().enumerate() {
                        row[2 * j] = c.re;
                        row[2 * j + 1] = c.im;
                    }
                }
            }
            Transform::Cosine(c) => {
                let n = self.n;
                let mut buf = vec![0.0; n];
                let mut tmp = vec![0.0; n];
                let dct = |src: &[f64], dst: &mut [f64], transpose: bool| {
                    for (k, d) in dst.iter_mut().enumerate() {
                        *d = if transpose {
                            (0..n).map(|i| c[i * n + k] * src[i]).sum()
                        } else {
                            c[k * n..(k + 1) * n].iter().zip(src).map(|(a, b)| a * b).sum()
                        };
                    }
                };
                for i in 0..out.rows() {
                    let row = out.row_mut(i);
                    buf.copy_from_slice(row);
                    if inverse {
                        for stage in [&self.outer, &self.inner] {
                            for (v, p) in buf.iter_mut().zip(&stage.phases) {
                                *v *= p.re;
                            }
                            dct(&buf, &mut tmp, true);
                            for (k, &p) in stage.perm.iter().enumerate() {
                                buf[p] = tmp[k];
                            }
                        }
                    } else {
                        for stage in [&self.inner, &self.outer] {
                            for (k, &p) in stage.perm.iter().enumerate() {
                                tmp[k] = buf[p];
                            }
                            dct(&tmp, &mut buf, false);
                            for (v, p) in buf.iter_mut().zip(&stage.phases) {
                                *v *= p.re;
                            }
                        }
                    }
                    row.copy_from_slice(&buf);
                }
            }
        }
        Ok(out)
    }
}
