//! Truncated Fourier lattice of the 3-torus.
//!
//! Modes live on the integer cube `{-N..N}^3`; the zero mode is carried in
//! storage but excluded from every homogeneous sum. The dealiasing rule
//! decides which modes take part in products and triad sums: `TwoThirds`
//! keeps the ball `|k_i| <= floor(2N/3)`, `None` keeps the whole cube (with
//! products evaluated on a padded grid so they stay exact convolutions).

use crate::error::{Error, Result};
use std::fmt;

/// Dealiasing rule attached to a lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dealias {
    /// Keep the full cube; products are computed on a zero-padded grid so
    /// they remain exact truncated convolutions.
    None,
    /// Two-thirds rule: modes with any `|k_i| > floor(2N/3)` are dropped.
    TwoThirds,
}

impl Dealias {
    pub fn parse(text: &str) -> Result<Self> {
        match text.trim() {
            "none" => Ok(Dealias::None),
            "two-thirds" | "two_thirds" => Ok(Dealias::TwoThirds),
            other => Err(Error::Config(format!(
                "unknown dealias rule '{other}' (expected 'none' or 'two-thirds')"
            ))),
        }
    }
}

impl fmt::Display for Dealias {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dealias::None => write!(f, "none"),
            Dealias::TwoThirds => write!(f, "two-thirds"),
        }
    }
}

/// Integer wavevector on the lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WaveVector {
    pub x: i32,
    pub y: i32,
    pub z: i32,
}

impl WaveVector {
    pub const fn new(x: i32, y: i32, z: i32) -> Self {
        WaveVector { x, y, z }
    }

    pub fn is_zero(self) -> bool {
        self.x == 0 && self.y == 0 && self.z == 0
    }

    pub fn neg(self) -> Self {
        WaveVector::new(-self.x, -self.y, -self.z)
    }

    pub fn norm_sq(self) -> f64 {
        let (x, y, z) = (self.x as f64, self.y as f64, self.z as f64);
        x * x + y * y + z * z
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Canonical representative of the Hermitian pair: first nonzero
    /// coordinate positive. The zero vector is not canonical.
    pub fn is_canonical(self) -> bool {
        if self.x != 0 {
            self.x > 0
        } else if self.y != 0 {
            self.y > 0
        } else {
            self.z > 0
        }
    }

    pub fn as_f64(self) -> [f64; 3] {
        [self.x as f64, self.y as f64, self.z as f64]
    }
}

impl fmt::Display for WaveVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.x, self.y, self.z)
    }
}

/// Cubic Fourier truncation `{-N..N}^3` plus its dealiasing rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lattice {
    n: i32,
    dealias: Dealias,
}

impl Lattice {
    pub fn new(n: usize, dealias: Dealias) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "lattice resolution N must be at least 1".into(),
            ));
        }
        if n > 512 {
            return Err(Error::InvalidArgument(format!(
                "lattice resolution N = {n} is unreasonably large"
            )));
        }
        let lattice = Lattice {
            n: n as i32,
            dealias,
        };
        if dealias == Dealias::TwoThirds && lattice.max_retained() < 1 {
            return Err(Error::InvalidArgument(format!(
                "two-thirds rule at N = {n} retains no modes; use N >= 2"
            )));
        }
        Ok(lattice)
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn dealias(&self) -> Dealias {
        self.dealias
    }

    /// Modes per axis, `2N + 1`.
    pub fn side(&self) -> usize {
        2 * self.n as usize + 1
    }

    /// Collocation grid points per axis, `2N + 2`.
    pub fn grid(&self) -> usize {
        2 * self.n as usize + 2
    }

    /// Total stored modes including k = 0.
    pub fn modes(&self) -> usize {
        let s = self.side();
        s * s * s
    }

    /// Largest retained `|k_i|` under the dealiasing rule.
    pub fn max_retained(&self) -> i32 {
        match self.dealias {
            Dealias::None => self.n,
            Dealias::TwoThirds => 2 * self.n / 3,
        }
    }

    pub fn contains(&self, k: WaveVector) -> bool {
        k.x.abs() <= self.n && k.y.abs() <= self.n && k.z.abs() <= self.n
    }

    /// Nonzero mode kept by the dealiasing mask.
    pub fn is_retained(&self, k: WaveVector) -> bool {
        let m = self.max_retained();
        !k.is_zero() && k.x.abs() <= m && k.y.abs() <= m && k.z.abs() <= m
    }

    /// Flat storage index of a cube mode.
    #[inline]
    pub fn index(&self, k: WaveVector) -> usize {
        debug_assert!(self.contains(k));
        let s = self.side();
        let n = self.n;
        (((k.x + n) as usize) * s + (k.y + n) as usize) * s + (k.z + n) as usize
    }

    pub fn wavevector(&self, index: usize) -> WaveVector {
        let s = self.side();
        let n = self.n;
        let z = (index % s) as i32 - n;
        let y = ((index / s) % s) as i32 - n;
        let x = (index / (s * s)) as i32 - n;
        WaveVector::new(x, y, z)
    }

    /// Every stored mode, k = 0 included, in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = WaveVector> + '_ {
        let n = self.n;
        (-n..=n).flat_map(move |x| {
            (-n..=n).flat_map(move |y| (-n..=n).map(move |z| WaveVector::new(x, y, z)))
        })
    }

    /// Every nonzero stored mode in lexicographic order.
    pub fn iter_nonzero(&self) -> impl Iterator<Item = WaveVector> + '_ {
        self.iter().filter(|k| !k.is_zero())
    }

    /// Nonzero retained modes in lexicographic order.
    pub fn retained(&self) -> Vec<WaveVector> {
        let m = self.max_retained();
        let mut out = Vec::new();
        for x in -m..=m {
            for y in -m..=m {
                for z in -m..=m {
                    let k = WaveVector::new(x, y, z);
                    if !k.is_zero() {
                        out.push(k);
                    }
                }
            }
        }
        out
    }

    /// Canonical nonzero modes (one per Hermitian pair) in lexicographic order.
    pub fn iter_canonical(&self) -> impl Iterator<Item = WaveVector> + '_ {
        self.iter_nonzero().filter(|k| k.is_canonical())
    }

    pub fn same_as(&self, other: &Lattice) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::LatticeMismatch(format!(
                "N={} dealias={} vs N={} dealias={}",
                self.n(),
                self.dealias,
                other.n(),
                other.dealias
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerates_full_cube_without_zero() {
        let lat = Lattice::new(2, Dealias::None).unwrap();
        let all: Vec<_> = lat.iter_nonzero().collect();
        assert_eq!(all.len(), 5 * 5 * 5 - 1);
        assert!(all.iter().all(|k| !k.is_zero()));
        assert!(all.iter().all(|k| lat.contains(*k)));
    }

    #[test]
    fn two_thirds_mask_threshold() {
        let lat = Lattice::new(8, Dealias::TwoThirds).unwrap();
        assert_eq!(lat.max_retained(), 5);
        assert!(lat.is_retained(WaveVector::new(5, -5, 0)));
        assert!(!lat.is_retained(WaveVector::new(6, 0, 0)));
        assert!(!lat.is_retained(WaveVector::new(0, 0, 0)));
    }

    #[test]
    fn index_round_trip() {
        let lat = Lattice::new(3, Dealias::None).unwrap();
        for (i, k) in lat.iter().enumerate() {
            assert_eq!(lat.index(k), i);
            assert_eq!(lat.wavevector(i), k);
        }
    }

    #[test]
    fn canonical_covers_half() {
        let lat = Lattice::new(2, Dealias::None).unwrap();
        let canon: Vec<_> = lat.iter_canonical().collect();
        assert_eq!(canon.len(), (5 * 5 * 5 - 1) / 2);
        for k in canon {
            assert!(k.is_canonical());
            assert!(!k.neg().is_canonical());
        }
    }

    #[test]
    fn rejects_degenerate_lattices() {
        assert!(Lattice::new(0, Dealias::None).is_err());
        assert!(Lattice::new(1, Dealias::TwoThirds).is_err());
        assert!(Lattice::new(2, Dealias::TwoThirds).is_ok());
    }
}
