//! Dense complex-amplitude state representations for one and two registers.
//!
//! Two shapes cover every algorithm in this crate:
//!
//! * [`TwoRegisterState`] — amplitudes over the L² basis `|x⟩|y⟩`,
//!   `1 ≤ x, y ≤ L`, stored x-major (all `y` for `x = 1`, then `x = 2`, …).
//! * [`SingleRegisterState`] — amplitudes over the N basis `|z⟩`, `1 ≤ z ≤ N`.
//!
//! Both are plain owned values: no interior sharing, safe to move across
//! threads. Every operator in this crate maps unit-norm states to unit-norm
//! states within an absolute tolerance of `1e-9` (see [`NORM_TOLERANCE`]);
//! exact probabilities are always read from amplitudes, with seeded sampling
//! available for demonstrations only.

use std::io::Write;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// One complex amplitude; double precision throughout (not negotiable, so
/// serialized outputs are comparable across implementations).
pub type ComplexAmplitude = num_complex::Complex64;

/// Absolute tolerance on the squared norm of any state after any operation.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Formats a float with 17 significant digits, enough to round-trip any f64.
/// Shared by state dumps and the results CSV.
pub(crate) fn decimal17(value: f64) -> String {
    format!("{value:.16e}")
}

fn check_dim(dim: u32) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidDimension { dim });
    }
    Ok(())
}

fn check_index(index: u32, dim: u32) -> Result<()> {
    if index < 1 || index > dim {
        return Err(Error::IndexOutOfRange { index, dim });
    }
    Ok(())
}

/// Validates raw amplitude data and rescales it to unit norm.
fn normalized(amps: Vec<ComplexAmplitude>) -> Result<Vec<ComplexAmplitude>> {
    if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
        return Err(Error::InvalidAmplitudes {
            reason: "non-finite amplitude".into(),
        });
    }
    let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if norm_sq <= 0.0 || !norm_sq.is_finite() {
        return Err(Error::InvalidAmplitudes {
            reason: format!("squared norm {norm_sq} is not a positive finite number"),
        });
    }
    let scale = norm_sq.sqrt().recip();
    let mut amps = amps;
    for a in &mut amps {
        *a *= scale;
    }
    Ok(amps)
}

/// Draws `shots` flat indices from a probability vector, deterministically
/// for a fixed seed (ChaCha8 keyed by `seed`, inverse-CDF per shot).
pub(crate) fn sample_flat(probabilities: &[f64], shots: u32, seed: u64) -> Vec<usize> {
    let mut cumulative = Vec::with_capacity(probabilities.len());
    let mut acc = 0.0;
    for p in probabilities {
        acc += p;
        cumulative.push(acc);
    }
    let total = acc.max(f64::MIN_POSITIVE);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..shots)
        .map(|_| {
            let u: f64 = rng.random_range(0.0..total);
            cumulative.partition_point(|&c| c <= u).min(probabilities.len() - 1)
        })
        .collect()
}

/// Dense state over the two-register basis `|x⟩|y⟩`, `1 ≤ x, y ≤ L`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoRegisterState {
    l: u32,
    /// x-major: amplitude of `|x⟩|y⟩` lives at `(x-1)*L + (y-1)`.
    pub(crate) amps: Vec<ComplexAmplitude>,
}

impl TwoRegisterState {
    /// The uniform superposition `|s⟩|s⟩`: every amplitude is `1/L`.
    pub fn uniform(l: u32) -> Result<Self> {
        check_dim(l)?;
        let amp = ComplexAmplitude::new(1.0 / f64::from(l), 0.0);
        Ok(Self {
            l,
            amps: vec![amp; (l as usize).pow(2)],
        })
    }

    /// The basis state `|x⟩|y⟩`.
    pub fn basis(l: u32, x: u32, y: u32) -> Result<Self> {
        check_dim(l)?;
        check_index(x, l)?;
        check_index(y, l)?;
        let mut amps = vec![ComplexAmplitude::ZERO; (l as usize).pow(2)];
        amps[(x as usize - 1) * l as usize + (y as usize - 1)] = ComplexAmplitude::ONE;
        Ok(Self { l, amps })
    }

    /// The product state `|x⟩|s⟩`: register one definite, register two uniform.
    pub fn basis_x_uniform_y(l: u32, x: u32) -> Result<Self> {
        check_dim(l)?;
        check_index(x, l)?;
        let mut amps = vec![ComplexAmplitude::ZERO; (l as usize).pow(2)];
        let amp = ComplexAmplitude::new(1.0 / f64::from(l).sqrt(), 0.0);
        let row = (x as usize - 1) * l as usize;
        for slot in &mut amps[row..row + l as usize] {
            *slot = amp;
        }
        Ok(Self { l, amps })
    }

    /// Builds a state from raw amplitudes in x-major order, rescaling to unit
    /// norm. Rejects wrong lengths, non-finite entries, and the zero vector.
    pub fn from_amplitudes(l: u32, amps: Vec<ComplexAmplitude>) -> Result<Self> {
        check_dim(l)?;
        if amps.len() != (l as usize).pow(2) {
            return Err(Error::InvalidAmplitudes {
                reason: format!("expected {} amplitudes for L={l}, got {}", (l as usize).pow(2), amps.len()),
            });
        }
        Ok(Self {
            l,
            amps: normalized(amps)?,
        })
    }

    /// Register dimension L.
    pub fn l(&self) -> u32 {
        self.l
    }

    /// Read-only view of the amplitudes in x-major order.
    pub fn amplitudes(&self) -> &[ComplexAmplitude] {
        &self.amps
    }

    pub(crate) fn index_of(&self, x: u32, y: u32) -> usize {
        (x as usize - 1) * self.l as usize + (y as usize - 1)
    }

    /// Amplitude of the basis state `|x⟩|y⟩`.
    pub fn amplitude(&self, x: u32, y: u32) -> Result<ComplexAmplitude> {
        check_index(x, self.l)?;
        check_index(y, self.l)?;
        Ok(self.amps[self.index_of(x, y)])
    }

    /// Squared modulus of the amplitude at `(x, y)`.
    pub fn probability_of(&self, x: u32, y: u32) -> Result<f64> {
        Ok(self.amplitude(x, y)?.norm_sqr())
    }

    /// Measurement distribution of the first register: entry `x-1` holds
    /// `p(x) = Σ_y |amp(x,y)|²`. Sums to 1 within [`NORM_TOLERANCE`] for a
    /// normalized state.
    pub fn marginal_x(&self) -> Vec<f64> {
        self.amps
            .chunks_exact(self.l as usize)
            .map(|row| row.iter().map(|a| a.norm_sqr()).sum())
            .collect()
    }

    /// `Σ conj(a)·b` over the joint basis. Errors on dimension mismatch.
    pub fn inner_product(&self, other: &Self) -> Result<ComplexAmplitude> {
        if self.l != other.l {
            return Err(Error::DimensionMismatch {
                left: self.l,
                right: other.l,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `Σ |amp|²`; 1 within [`NORM_TOLERANCE`] for any state this crate emits.
    pub fn squared_norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// True when every amplitude component is finite (no NaN/Inf).
    pub fn all_finite(&self) -> bool {
        self.amps.iter().all(|a| a.re.is_finite() && a.im.is_finite())
    }

    /// Writes the dump format: one line per basis index, `x,y,re,im`,
    /// x-major order, 17-significant-digit floats.
    pub fn write_dump<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let l = self.l as usize;
        for (flat, amp) in self.amps.iter().enumerate() {
            let x = flat / l + 1;
            let y = flat % l + 1;
            writeln!(out, "{x},{y},{},{}", decimal17(amp.re), decimal17(amp.im))?;
        }
        Ok(())
    }

    /// Draws `shots` measurement outcomes `(x, y)` from the joint
    /// distribution, deterministically for a fixed seed. Demonstration aid;
    /// exact probabilities are the primary interface.
    pub fn sample(&self, shots: u32, seed: u64) -> Vec<(u32, u32)> {
        let probabilities: Vec<f64> = self.amps.iter().map(|a| a.norm_sqr()).collect();
        sample_flat(&probabilities, shots, seed)
            .into_iter()
            .map(|flat| {
                let x = (flat / self.l as usize) as u32 + 1;
                let y = (flat % self.l as usize) as u32 + 1;
                (x, y)
            })
            .collect()
    }
}

/// Dense state over the single-register basis `|z⟩`, `1 ≤ z ≤ N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleRegisterState {
    n: u32,
    pub(crate) amps: Vec<ComplexAmplitude>,
}

impl SingleRegisterState {
    /// The uniform superposition: every amplitude is `1/√N`.
    pub fn uniform(n: u32) -> Result<Self> {
        check_dim(n)?;
        let amp = ComplexAmplitude::new(f64::from(n).sqrt().recip(), 0.0);
        Ok(Self {
            n,
            amps: vec![amp; n as usize],
        })
    }

    /// The basis state `|z⟩`.
    pub fn basis(n: u32, z: u32) -> Result<Self> {
        check_dim(n)?;
        check_index(z, n)?;
        let mut amps = vec![ComplexAmplitude::ZERO; n as usize];
        amps[z as usize - 1] = ComplexAmplitude::ONE;
        Ok(Self { n, amps })
    }

    /// Builds a state from raw amplitudes (index 0 ↔ z = 1), rescaling to
    /// unit norm; same validation as the two-register constructor.
    pub fn from_amplitudes(n: u32, amps: Vec<ComplexAmplitude>) -> Result<Self> {
        check_dim(n)?;
        if amps.len() != n as usize {
            return Err(Error::InvalidAmplitudes {
                reason: format!("expected {n} amplitudes, got {}", amps.len()),
            });
        }
        Ok(Self {
            n,
            amps: normalized(amps)?,
        })
    }

    /// Register dimension N.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Read-only view of the amplitudes (index 0 ↔ z = 1).
    pub fn amplitudes(&self) -> &[ComplexAmplitude] {
        &self.amps
    }

    /// Amplitude of the basis state `|z⟩`.
    pub fn amplitude(&self, z: u32) -> Result<ComplexAmplitude> {
        check_index(z, self.n)?;
        Ok(self.amps[z as usize - 1])
    }

    /// Squared modulus of the amplitude at `z`.
    pub fn probability_of(&self, z: u32) -> Result<f64> {
        Ok(self.amplitude(z)?.norm_sqr())
    }

    /// Full measurement distribution: entry `z-1` holds `|amp(z)|²`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `Σ conj(a)·b`. Errors on dimension mismatch.
    pub fn inner_product(&self, other: &Self) -> Result<ComplexAmplitude> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `Σ |amp|²`.
    pub fn squared_norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// True when every amplitude component is finite.
    pub fn all_finite(&self) -> bool {
        self.amps.iter().all(|a| a.re.is_finite() && a.im.is_finite())
    }

    /// Writes the dump format: one line per basis index, `z,re,im`.
    pub fn write_dump<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (flat, amp) in self.amps.iter().enumerate() {
            writeln!(out, "{},{},{}", flat + 1, decimal17(amp.re), decimal17(amp.im))?;
        }
        Ok(())
    }

    /// Draws `shots` outcomes `z` from the measurement distribution,
    /// deterministically for a fixed seed.
    pub fn sample(&self, shots: u32, seed: u64) -> Vec<u32> {
        sample_flat(&self.probabilities(), shots, seed)
            .into_iter()
            .map(|flat| flat as u32 + 1)
            .collect()
    }
}
