//! Seeded test instances.
//!
//! The stream is SplitMix64 (increment `0x9E3779B97F4A7C15`, mix multipliers
//! `0xBF58476D1CE4E5B9` and `0x94D049BB133111EB`) with the seed as initial
//! state. Draws are mapped as follows:
//!
//! - uniform on `[-1, 1)`: `2 · (u >> 11) · 2⁻⁵³ − 1`
//! - integer on `[-3, 3]`: `((u >> 32) · 7) >> 32`, minus 3
//! - index below `m`: `((u >> 32) · m) >> 32`
//!
//! Factors are filled row-major in the order `A(1) … A(N)`, `X`, `Y`.
//! Profile-specific extra draws come after the base draws of the factor
//! they modify, and a target index (SINGULAR_A) is drawn before everything.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::KronRankOneInstance;
use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;

/// Offset applied to column 0 to build the near-duplicate last column of
/// ILL_CONDITIONED factors.
pub const ILL_CONDITIONED_EPS: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, clap::ValueEnum)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
#[value(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Profile {
    /// Entries uniform on `[-1, 1)`.
    Uniform,
    /// Integer entries in `[-3, 3]`.
    IntegerSmall,
    /// Uniform entries; every factor of size ≥ 2 gets a last column within
    /// `1e-7` of its first.
    IllConditioned,
    /// Integer entries; one `A(k)` singular, all other factors nonsingular.
    SingularA,
    /// Integer entries; `X` singular, all other factors nonsingular.
    SingularX,
    /// Integer entries; `Y` singular, all other factors nonsingular.
    SingularY,
    /// `A(n) = I_F`, `X = Y = I_N`.
    Identity,
}

impl Profile {
    pub const ALL: [Profile; 7] = [
        Profile::Uniform,
        Profile::IntegerSmall,
        Profile::IllConditioned,
        Profile::SingularA,
        Profile::SingularX,
        Profile::SingularY,
        Profile::Identity,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Profile::Uniform => "UNIFORM",
            Profile::IntegerSmall => "INTEGER_SMALL",
            Profile::IllConditioned => "ILL_CONDITIONED",
            Profile::SingularA => "SINGULAR_A",
            Profile::SingularX => "SINGULAR_X",
            Profile::SingularY => "SINGULAR_Y",
            Profile::Identity => "IDENTITY",
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase().replace('-', "_");
        Profile::ALL
            .into_iter()
            .find(|p| p.name() == key)
            .ok_or_else(|| Error::Parse(format!("unknown profile {s:?}")))
    }
}

struct Draws(SplitMix64);

impl Draws {
    fn new(seed: u64) -> Self {
        Draws(SplitMix64::from_seed(seed.to_le_bytes()))
    }

    fn uniform(&mut self) -> f64 {
        let unit = (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        2.0 * unit - 1.0
    }

    fn below(&mut self, m: u64) -> u64 {
        ((self.0.next_u64() >> 32) * m) >> 32
    }

    fn small_int(&mut self) -> f64 {
        self.below(7) as f64 - 3.0
    }

    fn matrix(&mut self, m: usize, mut draw: impl FnMut(&mut Self) -> f64) -> DenseMatrix<f64> {
        DenseMatrix::from_fn(m, m, |_, _| draw(self))
    }

    fn nonsingular_int_matrix(&mut self, m: usize) -> DenseMatrix<f64> {
        loop {
            let candidate = self.matrix(m, Draws::small_int);
            if !exact_det_is_zero(&candidate) {
                return candidate;
            }
        }
    }

    /// Integer matrix whose last column is a nonzero multiple of its first
    /// (the zero matrix when `m == 1`).
    fn singular_int_matrix(&mut self, m: usize) -> DenseMatrix<f64> {
        let mut base = self.matrix(m, Draws::small_int);
        if m == 1 {
            return DenseMatrix::zeros(1, 1);
        }
        let multiplier = [-2.0, -1.0, 1.0, 2.0][self.below(4) as usize];
        for i in 0..m {
            base[(i, m - 1)] = multiplier * base[(i, 0)];
        }
        base
    }

    fn near_duplicate_last_column(&mut self, mut base: DenseMatrix<f64>) -> DenseMatrix<f64> {
        let m = base.rows();
        if m >= 2 {
            for i in 0..m {
                base[(i, m - 1)] = base[(i, 0)] + ILL_CONDITIONED_EPS * self.uniform();
            }
        }
        base
    }
}

fn exact_det_is_zero(m: &DenseMatrix<f64>) -> bool {
    BigRational::determinant(&m.convert()).sign_log.is_zero()
}

/// Deterministic instance for `(n, f, seed, profile)`, built in `f64` and
/// converted exactly into `T`.
pub fn random_instance<T: Scalar>(n: usize, f: usize, seed: u64, profile: Profile) -> Result<KronRankOneInstance<T>> {
    Ok(random_instance_f64(n, f, seed, profile)?.convert())
}

pub fn random_instance_f64(n: usize, f: usize, seed: u64, profile: Profile) -> Result<KronRankOneInstance<f64>> {
    if n == 0 || f == 0 {
        return Err(Error::Shape(format!("N and F must be positive, got N={n}, F={f}")));
    }
    let mut d = Draws::new(seed);
    let (a, x, y) = match profile {
        Profile::Identity => return Ok(KronRankOneInstance::identity(n, f)),
        Profile::Uniform => (
            (0..n).map(|_| d.matrix(f, Draws::uniform)).collect(),
            d.matrix(n, Draws::uniform),
            d.matrix(n, Draws::uniform),
        ),
        Profile::IntegerSmall => (
            (0..n).map(|_| d.matrix(f, Draws::small_int)).collect(),
            d.matrix(n, Draws::small_int),
            d.matrix(n, Draws::small_int),
        ),
        Profile::IllConditioned => {
            let a = (0..n)
                .map(|_| {
                    let base = d.matrix(f, Draws::uniform);
                    d.near_duplicate_last_column(base)
                })
                .collect();
            let x = d.matrix(n, Draws::uniform);
            let x = d.near_duplicate_last_column(x);
            let y = d.matrix(n, Draws::uniform);
            let y = d.near_duplicate_last_column(y);
            (a, x, y)
        }
        Profile::SingularA => {
            let target = d.below(n as u64) as usize;
            let a = (0..n)
                .map(|k| {
                    if k == target {
                        d.singular_int_matrix(f)
                    } else {
                        d.nonsingular_int_matrix(f)
                    }
                })
                .collect();
            (a, d.nonsingular_int_matrix(n), d.nonsingular_int_matrix(n))
        }
        Profile::SingularX => (
            (0..n).map(|_| d.nonsingular_int_matrix(f)).collect(),
            d.singular_int_matrix(n),
            d.nonsingular_int_matrix(n),
        ),
        Profile::SingularY => (
            (0..n).map(|_| d.nonsingular_int_matrix(f)).collect(),
            d.nonsingular_int_matrix(n),
            d.singular_int_matrix(n),
        ),
    };
    KronRankOneInstance::new(f, n, a, x, y)
}
