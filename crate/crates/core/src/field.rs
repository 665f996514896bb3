//! The configuration `omega`: a product-Bernoulli random field on `Z^d`
//! evaluated lazily from a counter-based hash.
//!
//! Each site gets one uniform value in `[0, 1)` derived from
//! `(seed, x_1, ..., x_d)`; the site is open at parameter `p` iff its value
//! is below `p`. Using a single value per site couples every `p` on the
//! same seed monotonically.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Identifier of the site hash, recorded in run manifests.
pub const MIXER_ID: &str = "gosp-mix64-v1";

/// Largest supported lattice dimension.
pub const MAX_DIM: usize = 8;

const SEED_SALT: u64 = 0x9E37_79B9_7F4A_7C15;
const ROUND_MUL: u64 = 0xBF58_476D_1CE4_E5B9;
const SPRINKLE_SALT: u64 = 0xD6E8_FEB8_6659_FD93;
const UNIT: f64 = 1.0 / (1u64 << 53) as f64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("open probability {0} is outside [0, 1]")]
    BadProbability(f64),
    #[error("sprinkle probability {eps} is outside [0, 1 - p] for p = {p}")]
    BadSprinkle { p: f64, eps: f64 },
    #[error("site has {got} coordinates, field is {expected}-dimensional")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("field has no sprinkling parameter")]
    SprinkleUnset,
}

/// Read access to a configuration of open sites.
pub trait SiteField: Sync {
    fn is_open(&self, site: &[i64]) -> bool;

    /// True only if no site is open.
    fn never_open(&self) -> bool {
        false
    }
}

impl<F: SiteField + ?Sized> SiteField for &F {
    fn is_open(&self, site: &[i64]) -> bool {
        (**self).is_open(site)
    }

    fn never_open(&self) -> bool {
        (**self).never_open()
    }
}

/// murmur3 64-bit finaliser.
#[inline]
fn fmix64(mut h: u64) -> u64 {
    h ^= h >> 33;
    h = h.wrapping_mul(0xFF51_AFD7_ED55_8CCD);
    h ^= h >> 33;
    h = h.wrapping_mul(0xC4CE_B9FE_1A85_EC53);
    h ^= h >> 33;
    h
}

/// The `gosp-mix64-v1` site hash: one multiply-xorshift round per
/// coordinate followed by the murmur3 finaliser.
#[inline]
pub fn mix_site(seed: u64, site: &[i64]) -> u64 {
    let mut h = fmix64(seed ^ SEED_SALT);
    for &c in site {
        h = (h ^ c as u64).wrapping_mul(ROUND_MUL);
        h ^= h >> 31;
    }
    fmix64(h)
}

/// 53-bit uniform integer for a site.
#[inline]
fn uniform_bits(seed: u64, site: &[i64]) -> u64 {
    mix_site(seed, site) >> 11
}

fn threshold(p: f64) -> u64 {
    // exact: scaling by a power of two
    (p * (1u64 << 53) as f64).ceil() as u64
}

/// Derives an independent stream seed, e.g. for replica `index` of a run.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    fmix64(fmix64(master ^ SEED_SALT).wrapping_add(index.wrapping_mul(ROUND_MUL)) ^ index)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSpec {
    d: usize,
    seed: u64,
    p: f64,
    sprinkle_eps: Option<f64>,
    #[serde(skip)]
    cut: u64,
    #[serde(skip)]
    extra_cut: u64,
}

impl FieldSpec {
    pub fn new(d: usize, seed: u64, p: f64) -> Result<Self, FieldError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(FieldError::BadProbability(p));
        }
        Ok(Self {
            d,
            seed,
            p,
            sprinkle_eps: None,
            cut: threshold(p),
            extra_cut: 0,
        })
    }

    /// Adds an independent field of extra open sites so that the composite
    /// (base OR extra) is Bernoulli(`p + eps`). Extra sites are open with
    /// probability `eps / (1 - p)`, independently of the base field.
    pub fn with_sprinkle(mut self, eps: f64) -> Result<Self, FieldError> {
        if !(0.0..=1.0).contains(&eps) || self.p + eps > 1.0 + 1e-12 {
            return Err(FieldError::BadSprinkle { p: self.p, eps });
        }
        let q = if self.p >= 1.0 { 0.0 } else { (eps / (1.0 - self.p)).min(1.0) };
        self.sprinkle_eps = Some(eps);
        self.extra_cut = threshold(q);
        Ok(self)
    }

    /// Same seed and hash at another parameter.
    pub fn at_p(&self, p: f64) -> Result<Self, FieldError> {
        let f = Self::new(self.d, self.seed, p)?;
        match self.sprinkle_eps {
            Some(e) => f.with_sprinkle(e.min(1.0 - p)),
            None => Ok(f),
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        let mut f = self.clone();
        f.seed = seed;
        f
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn sprinkle_eps(&self) -> Option<f64> {
        self.sprinkle_eps
    }

    fn check(&self, site: &[i64]) -> Result<(), FieldError> {
        if site.len() != self.d {
            return Err(FieldError::DimensionMismatch {
                got: site.len(),
                expected: self.d,
            });
        }
        Ok(())
    }

    /// Uniform value in `[0, 1)` attached to a site.
    pub fn uniform(&self, site: &[i64]) -> f64 {
        uniform_bits(self.seed, site) as f64 * UNIT
    }

    pub fn site_open(&self, site: &[i64]) -> Result<bool, FieldError> {
        self.check(site)?;
        Ok(self.open_unchecked(site))
    }

    #[inline]
    pub fn open_unchecked(&self, site: &[i64]) -> bool {
        uniform_bits(self.seed, site) < self.cut
    }

    pub(crate) fn extra_open(&self, site: &[i64]) -> bool {
        uniform_bits(self.seed ^ SPRINKLE_SALT, site) < self.extra_cut
    }

    /// Whether the site belongs to the sprinkled set `eta` (independent of
    /// the base field).
    pub fn sprinkle_open(&self, site: &[i64]) -> Result<bool, FieldError> {
        self.check(site)?;
        if self.sprinkle_eps.is_none() {
            return Err(FieldError::SprinkleUnset);
        }
        Ok(self.extra_open(site))
    }

    /// Site state under the coupled parameter `p + eps`.
    pub fn sprinkled_open(&self, site: &[i64]) -> Result<bool, FieldError> {
        self.check(site)?;
        if self.sprinkle_eps.is_none() {
            return Err(FieldError::SprinkleUnset);
        }
        Ok(self.open_unchecked(site) || self.extra_open(site))
    }

    /// View of the composite `p + eps` field.
    pub fn sprinkled(&self) -> Result<Sprinkled<'_>, FieldError> {
        if self.sprinkle_eps.is_none() {
            return Err(FieldError::SprinkleUnset);
        }
        Ok(Sprinkled(self))
    }
}

impl SiteField for FieldSpec {
    #[inline]
    fn is_open(&self, site: &[i64]) -> bool {
        self.open_unchecked(site)
    }

    fn never_open(&self) -> bool {
        self.cut == 0
    }
}

/// The composite field `base OR extra`.
#[derive(Debug, Clone, Copy)]
pub struct Sprinkled<'a>(&'a FieldSpec);

impl SiteField for Sprinkled<'_> {
    fn is_open(&self, site: &[i64]) -> bool {
        self.0.open_unchecked(site) || self.0.extra_open(site)
    }

    fn never_open(&self) -> bool {
        self.0.cut == 0 && self.0.extra_cut == 0
    }
}

/// A field viewed through a translation: site `z` reads `inner` at `z + shift`.
#[derive(Debug, Clone)]
pub struct Shifted<F> {
    inner: F,
    shift: [i64; MAX_DIM],
    d: usize,
}

impl<F: SiteField> Shifted<F> {
    pub fn new(inner: F, shift: &[i64]) -> Self {
        assert!(shift.len() <= MAX_DIM);
        let mut s = [0; MAX_DIM];
        s[..shift.len()].copy_from_slice(shift);
        Self {
            inner,
            shift: s,
            d: shift.len(),
        }
    }
}

impl<F: SiteField> SiteField for Shifted<F> {
    #[inline]
    fn is_open(&self, site: &[i64]) -> bool {
        let mut buf = [0i64; MAX_DIM];
        for (i, &c) in site.iter().enumerate() {
            buf[i] = c + self.shift[i];
        }
        self.inner.is_open(&buf[..self.d.max(site.len())])
    }

    fn never_open(&self) -> bool {
        self.inner.never_open()
    }
}

/// A finite explicit configuration: listed sites are open, all others closed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExplicitField {
    open: HashSet<Vec<i64>>,
}

impl ExplicitField {
    pub fn new(open: impl IntoIterator<Item = Vec<i64>>) -> Self {
        Self {
            open: open.into_iter().collect(),
        }
    }

    pub fn open_sites(&self) -> impl Iterator<Item = &Vec<i64>> {
        self.open.iter()
    }
}

impl SiteField for ExplicitField {
    fn is_open(&self, site: &[i64]) -> bool {
        self.open.contains(site)
    }
}

/// Every site open (`p = 1`).
#[derive(Debug, Clone, Copy, Default)]
pub struct AllOpen;

impl SiteField for AllOpen {
    fn is_open(&self, _site: &[i64]) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extreme_parameters() {
        let closed = FieldSpec::new(2, 7, 0.0).unwrap();
        let open = FieldSpec::new(2, 7, 1.0).unwrap();
        for x in -50..50 {
            for t in 0..20 {
                assert!(!closed.site_open(&[x, t]).unwrap());
                assert!(open.site_open(&[x, t]).unwrap());
            }
        }
    }

    #[test]
    fn purity_and_dimension_check() {
        let f = FieldSpec::new(3, 99, 0.5).unwrap();
        let a: Vec<bool> = (0..100).map(|i| f.site_open(&[i, -i, 3]).unwrap()).collect();
        let b: Vec<bool> = (0..100).rev().map(|i| f.site_open(&[i, -i, 3]).unwrap()).collect();
        assert_eq!(a, b.into_iter().rev().collect::<Vec<_>>());
        assert_eq!(
            f.site_open(&[1, 2]),
            Err(FieldError::DimensionMismatch { got: 2, expected: 3 })
        );
        assert!(FieldSpec::new(2, 0, 1.5).is_err());
    }

    #[test]
    fn sprinkling_contract() {
        let f = FieldSpec::new(2, 5, 0.5).unwrap();
        assert_eq!(f.sprinkled_open(&[0, 0]), Err(FieldError::SprinkleUnset));
        assert!(f.clone().with_sprinkle(0.6).is_err());
        let zero = f.clone().with_sprinkle(0.0).unwrap();
        let s = f.clone().with_sprinkle(0.2).unwrap();
        for x in -200..200 {
            for t in 0..5 {
                let site = [x, t];
                assert_eq!(zero.sprinkled_open(&site).unwrap(), f.site_open(&site).unwrap());
                if f.site_open(&site).unwrap() {
                    assert!(s.sprinkled_open(&site).unwrap());
                }
            }
        }
        let full = f.clone().with_sprinkle(0.5).unwrap();
        assert!((0..100).all(|x| full.sprinkle_open(&[x, 1]).unwrap()));
    }

    #[test]
    fn sprinkled_frequency() {
        // binomial standard error for 10^6 sites at 0.7
        let f = FieldSpec::new(2, 2024, 0.5).unwrap().with_sprinkle(0.2).unwrap();
        let n = 1_000_000i64;
        let hits = (0..n)
            .filter(|&i| f.sprinkled_open(&[i % 1000, i / 1000]).unwrap())
            .count() as f64;
        let freq = hits / n as f64;
        let se = (0.7f64 * 0.3 / n as f64).sqrt();
        assert!((freq - 0.7).abs() < 3.0 * se, "freq {freq}");
    }

    #[test]
    fn monotone_in_p() {
        let ps = [0.1, 0.3, 0.5, 0.7, 0.9];
        let fields: Vec<FieldSpec> = ps.iter().map(|&p| FieldSpec::new(2, 11, p).unwrap()).collect();
        for x in -300..300 {
            for t in 0..10 {
                let bits: Vec<bool> = fields.iter().map(|f| f.is_open(&[x, t])).collect();
                assert!(bits.windows(2).all(|w| !w[0] || w[1]));
            }
        }
    }

    #[test]
    fn uniformity_chi_square() {
        // 10^6 sites into 100 bins; the 0.999 quantile of chi^2 with 99 dof is 148.23
        let f = FieldSpec::new(2, 31337, 0.5).unwrap();
        let bins = 100usize;
        let mut counts = vec![0u64; bins];
        for x in 0..1000i64 {
            for t in 0..1000i64 {
                let u = f.uniform(&[x, t]);
                counts[(u * bins as f64) as usize] += 1;
            }
        }
        let expected = 1e6 / bins as f64;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        assert!(chi2 < 148.23, "chi2 = {chi2}");
    }

    #[test]
    fn neighbouring_sites_are_uncorrelated() {
        let f = FieldSpec::new(2, 8, 0.5).unwrap();
        let n = 200_000;
        let mut both = 0;
        for i in 0..n {
            if f.is_open(&[i, 0]) && f.is_open(&[i + 1, 0]) {
                both += 1;
            }
        }
        let freq = both as f64 / n as f64;
        let se = (0.25f64 * 0.75 / n as f64).sqrt();
        assert!((freq - 0.25).abs() < 4.0 * se, "freq {freq}");
    }

    #[test]
    fn shifted_view() {
        let f = FieldSpec::new(2, 3, 0.5).unwrap();
        let s = Shifted::new(&f, &[0, 10]);
        for x in -20..20 {
            assert_eq!(s.is_open(&[x, 1]), f.is_open(&[x, 11]));
        }
    }

    #[test]
    fn derived_seeds_differ() {
        let seeds: HashSet<u64> = (0..10_000).map(|i| derive_seed(42, i)).collect();
        assert_eq!(seeds.len(), 10_000);
    }
}
