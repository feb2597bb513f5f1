//! Water-pouring over interval-valued noise spectra.
//!
//! A [`NoiseGrid`] splits `[0, B]` into bands; in band `i` the noise takes
//! values in `N_i` (and, optionally, `∫_band ln N` is known in closed form).
//! All results enclose the capacity of every spectrum compatible with the grid.

mod constructed;

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::dyadic::{Dyadic, Round};
use crate::elementary::ln;
use crate::error::{Error, Result};
use crate::interval::Interval;

pub use constructed::{capacity_constructed_f1, capacity_high_power, p_star, spectrum_grid};
pub(crate) use constructed::constructed_f1;

/// Bisection steps are never refined below this many fractional bits.
const MAX_LEVEL_BITS: u32 = 200;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Band {
    pub center: Dyadic,
    pub width: Dyadic,
    pub noise: Interval,
    /// Enclosure of `∫_band ln N`, when known independently of `noise`.
    pub log_integral: Option<Interval>,
}

impl Band {
    pub fn new(center: Dyadic, width: Dyadic, noise: Interval) -> Self {
        Band { center, width, noise, log_integral: None }
    }

    pub fn start(&self) -> Dyadic {
        &self.center - &self.width.half()
    }

    pub fn end(&self) -> Dyadic {
        &self.center + &self.width.half()
    }

    /// Power poured at level `nu`, enclosed over all noise values in the band.
    fn power_at(&self, nu: &Dyadic) -> (Dyadic, Dyadic) {
        let lo = (nu - self.noise.hi()).max(Dyadic::zero());
        let hi = (nu - self.noise.lo()).max(Dyadic::zero());
        (&lo * &self.width, &hi * &self.width)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NoiseGrid {
    bandwidth: Dyadic,
    bands: Vec<Band>,
}

impl NoiseGrid {
    /// Bands must be nonempty, have positive widths, tile `[0, B]` in order and
    /// carry nonnegative noise.
    pub fn new(bands: Vec<Band>) -> Result<Self> {
        if bands.is_empty() {
            return Err(Error::param("noise grid has no bands"));
        }
        let mut edge = Dyadic::zero();
        for (i, b) in bands.iter().enumerate() {
            if !b.width.is_positive() {
                return Err(Error::param(format!("band {i} has nonpositive width {}", b.width)));
            }
            if b.start() != edge {
                return Err(Error::param(format!(
                    "band {i} starts at {} but the previous band ends at {edge}",
                    b.start()
                )));
            }
            if b.noise.lo().is_negative() {
                return Err(Error::param(format!("band {i} has negative noise {}", b.noise.lo())));
            }
            edge = b.end();
        }
        Ok(NoiseGrid { bandwidth: edge, bands })
    }

    /// One band of constant noise `level` over `[0, B]`.
    pub fn flat(bandwidth: Dyadic, level: Dyadic) -> Result<Self> {
        Self::new(vec![Band::new(bandwidth.half(), bandwidth, Interval::point(level))])
    }

    /// `n` equal bands; `range(lo, hi)` must enclose the noise over `[lo, hi]`.
    pub fn from_ranges<F>(bandwidth: &Dyadic, n: usize, range: F) -> Result<Self>
    where
        F: Fn(&Dyadic, &Dyadic) -> Interval + Sync,
    {
        let edges = uniform_edges(bandwidth, n)?;
        let bands = (0..n)
            .into_par_iter()
            .map(|i| {
                let (a, b) = (&edges[i], &edges[i + 1]);
                Band::new((a + b).half(), b - a, range(a, b))
            })
            .collect();
        Self::new(bands)
    }

    /// `n` equal bands with the noise sampled at each band center. This is a
    /// model of the spectrum, not an enclosure of it.
    pub fn from_center_samples<F>(bandwidth: &Dyadic, n: usize, sample: F) -> Result<Self>
    where
        F: Fn(&Dyadic) -> Interval + Sync,
    {
        let edges = uniform_edges(bandwidth, n)?;
        let bands = (0..n)
            .into_par_iter()
            .map(|i| {
                let c = (&edges[i] + &edges[i + 1]).half();
                let noise = sample(&c);
                Band::new(c, &edges[i + 1] - &edges[i], noise)
            })
            .collect();
        Self::new(bands)
    }

    /// Parses `f_center,delta_f,N_lo,N_hi` rows (header required). Numbers must
    /// be exact dyadic decimals.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let headers = reader.headers().map_err(|e| Error::Parse(format!("noise grid header: {e}")))?;
        let expected = ["f_center", "delta_f", "N_lo", "N_hi"];
        if headers.iter().collect::<Vec<_>>() != expected {
            return Err(Error::Parse(format!(
                "noise grid header must be `{}`, got `{}`",
                expected.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut bands = Vec::new();
        for (row, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse(format!("noise grid row {}: {e}", row + 1)))?;
            if rec.len() != 4 {
                return Err(Error::Parse(format!("noise grid row {} has {} fields", row + 1, rec.len())));
            }
            let field = |i: usize| {
                Dyadic::from_decimal_str(&rec[i]).map_err(|e| Error::Parse(format!("noise grid row {}: {e}", row + 1)))
            };
            let noise = Interval::new(field(2)?, field(3)?)?;
            bands.push(Band::new(field(0)?, field(1)?, noise));
        }
        Self::new(bands)
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("reading {}: {e}", path.display())))?;
        Self::from_csv(&text)
    }

    pub fn bandwidth(&self) -> &Dyadic {
        &self.bandwidth
    }

    pub fn bands(&self) -> &[Band] {
        &self.bands
    }

    pub fn len(&self) -> usize {
        self.bands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bands.is_empty()
    }

    /// Copy with every noise value and log integral transformed.
    pub fn map_noise(&self, f: impl Fn(&Interval) -> Interval) -> Self {
        let bands = self
            .bands
            .iter()
            .map(|b| Band { noise: f(&b.noise), log_integral: None, ..b.clone() })
            .collect();
        NoiseGrid { bandwidth: self.bandwidth.clone(), bands }
    }
}

fn uniform_edges(bandwidth: &Dyadic, n: usize) -> Result<Vec<Dyadic>> {
    if n == 0 || !bandwidth.is_positive() {
        return Err(Error::param("need a positive bandwidth and at least one band"));
    }
    let n_d = Dyadic::from(n as u64);
    Ok((0..=n)
        .map(|i| {
            let x = bandwidth * &Dyadic::from(i as u64);
            if n.is_power_of_two() {
                x.mul_pow2(-(n.trailing_zeros() as i64))
            } else {
                // non-dyadic band edges are rounded; the grid still tiles [0, B]
                x.div(&n_d, 64, Round::Down).expect("n > 0")
            }
        })
        .collect())
}

/// Enclosure of `Σ Δ_i · max(ν - N_i, 0)` over all noise values in the grid.
pub fn total_power_at_level(nu: &Dyadic, grid: &NoiseGrid) -> Interval {
    let (lo, hi) = grid.bands.iter().fold((Dyadic::zero(), Dyadic::zero()), |(lo, hi), b| {
        let (l, h) = b.power_at(nu);
        (&lo + &l, &hi + &h)
    });
    Interval::ordered(lo, hi)
}

/// Bracket `[ν_lo, ν_hi]` of the water level for total power `p`.
///
/// Two monotone bisections: `ν_lo` is the largest level found whose power is
/// certainly at most `p`, `ν_hi` the smallest whose power is certainly at
/// least `p`. For point-valued noise the bracket is at most `tol` wide; with
/// interval noise it also carries the uncertainty of the grid itself.
pub fn solve_nu(p: &Dyadic, grid: &NoiseGrid, tol: &Dyadic) -> Result<Interval> {
    if p.is_negative() {
        return Err(Error::param(format!("power must be nonnegative, got {p}")));
    }
    if !tol.is_positive() {
        return Err(Error::param(format!("tolerance must be positive, got {tol}")));
    }
    let floor = grid.bands.iter().map(|b| b.noise.lo().clone()).min().expect("nonempty grid");
    let top = grid.bands.iter().map(|b| b.noise.hi().clone()).max().expect("nonempty grid");
    let tol_bits = (-tol.msb().unwrap_or(0) + 8).clamp(64, MAX_LEVEL_BITS as i64) as u32;
    let ceiling = &top + &p.div(&grid.bandwidth, tol_bits, Round::Up)?;
    let step = tol.half();

    let bisect = |accept_low: &dyn Fn(&Interval) -> bool| {
        let (mut a, mut b) = (floor.clone(), ceiling.clone());
        while &b - &a > step {
            let m = (&a + &b).half();
            if accept_low(&total_power_at_level(&m, grid)) {
                a = m;
            } else {
                b = m;
            }
        }
        (a, b)
    };
    let (nu_lo, _) = bisect(&|pw: &Interval| pw.hi() <= p);
    let (_, nu_hi) = bisect(&|pw: &Interval| pw.lo() < p);
    Ok(Interval::ordered(nu_lo.clone().min(nu_hi.clone()), nu_lo.max(nu_hi)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Allocation {
    pub nu: Interval,
    /// Enclosure of `max(ν - N_i, 0)` per band.
    pub per_band: Vec<Interval>,
}

pub fn allocate(grid: &NoiseGrid, nu: &Interval) -> Allocation {
    let per_band = grid
        .bands
        .iter()
        .map(|b| {
            let lo = (nu.lo() - b.noise.hi()).max(Dyadic::zero());
            let hi = (nu.hi() - b.noise.lo()).max(Dyadic::zero());
            Interval::ordered(lo, hi)
        })
        .collect();
    Allocation { nu: nu.clone(), per_band }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Default)]
pub struct CapacityMeta {
    pub subbands: Option<usize>,
    pub precision_bits: u32,
    pub terms: Option<usize>,
    /// Bound on the unseen part of the series that was added to the upper endpoint.
    pub tail_majorant: Option<Dyadic>,
}

/// Capacity in nats.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CapacityEnclosure {
    pub value: Interval,
    pub meta: CapacityMeta,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Waterfill {
    pub capacity: CapacityEnclosure,
    pub allocation: Allocation,
}

/// Water-filling capacity `Σ ∫_band ln(1 + P*(f)/N(f)) df`.
pub fn capacity_discrete(grid: &NoiseGrid, p: &Dyadic, tol: &Dyadic, prec: u32) -> Result<Waterfill> {
    let nu = solve_nu(p, grid, tol)?;
    let allocation = allocate(grid, &nu);
    let meta = CapacityMeta { subbands: Some(grid.len()), precision_bits: prec, ..Default::default() };
    if p.is_zero() {
        return Ok(Waterfill { capacity: CapacityEnclosure { value: Interval::zero(), meta }, allocation });
    }
    if !nu.lo().is_positive() {
        return Err(Error::domain("water level is not certifiably positive"));
    }
    let ln_nu = ln(&nu, prec)?;
    let terms: Vec<Interval> = grid
        .bands
        .par_iter()
        .enumerate()
        .map(|(i, b)| band_capacity(i, b, &nu, &ln_nu, prec))
        .collect::<Result<_>>()?;
    let value = terms.iter().fold(Interval::zero(), |acc, t| &acc + t).round_out(prec + 4);
    let value = value.max_with(&Dyadic::zero());
    Ok(Waterfill { capacity: CapacityEnclosure { value, meta }, allocation })
}

/// `∫_band max(ln ν - ln N, 0)`.
fn band_capacity(i: usize, b: &Band, nu: &Interval, ln_nu: &Interval, prec: u32) -> Result<Interval> {
    let zero_noise = !b.noise.lo().is_positive();
    if nu.hi() <= b.noise.lo() {
        return Ok(Interval::zero());
    }
    let flooded = nu.lo() >= b.noise.hi();
    match (&b.log_integral, flooded) {
        (Some(li), true) => Ok(&ln_nu.scale(&b.width) - li),
        (None, true) if !zero_noise => Ok((ln_nu - &ln(&b.noise, prec)?).scale(&b.width)),
        (Some(li), false) if zero_noise => {
            // (x)+ = x + (-x)+, and ln N - ln ν <= ln N_hi - ln ν_lo on the band
            let excess = (&ln(&Interval::point(b.noise.hi().clone()), prec)? - ln_nu).hi().clone();
            let v = &ln_nu.scale(&b.width) - li;
            let hi = v.hi() + &(&excess.max(Dyadic::zero()) * &b.width);
            Ok(Interval::ordered(Dyadic::zero(), hi.max(Dyadic::zero())))
        }
        (_, false) if !zero_noise => {
            let top = (&Interval::point(ln_nu.hi().clone()) - &ln(&Interval::point(b.noise.lo().clone()), prec)?)
                .hi()
                .clone();
            Ok(Interval::ordered(Dyadic::zero(), (&top * &b.width).max(Dyadic::zero())))
        }
        _ => Err(Error::domain(format!(
            "band {i} at f = {} has zero noise and receives power (infinite capacity)",
            b.center
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    fn two_band() -> NoiseGrid {
        NoiseGrid::new(vec![
            Band::new(d("0.5"), d("1"), Interval::from_int(1)),
            Band::new(d("1.5"), d("1"), Interval::from_int(3)),
        ])
        .unwrap()
    }

    #[test]
    fn power_at_level_examples() {
        let g = two_band();
        assert_eq!(total_power_at_level(&Dyadic::zero(), &g), Interval::zero());
        assert_eq!(total_power_at_level(&d("0.5"), &g), Interval::zero());
        assert_eq!(total_power_at_level(&d("2"), &g), Interval::from_int(1));
    }

    #[test]
    fn grid_must_tile_the_band() {
        let gap = NoiseGrid::new(vec![
            Band::new(d("0.5"), d("1"), Interval::one()),
            Band::new(d("2"), d("1"), Interval::one()),
        ]);
        assert!(gap.is_err());
        assert!(NoiseGrid::new(vec![]).is_err());
        let neg = NoiseGrid::new(vec![Band::new(d("0.5"), d("1"), Interval::from_int(-1))]);
        assert!(neg.is_err());
    }

    #[test]
    fn flat_fill_level() {
        let g = NoiseGrid::flat(d("2"), d("1")).unwrap();
        let nu = solve_nu(&d("1"), &g, &Dyadic::pow2(-30)).unwrap();
        assert!(nu.contains(&d("1.5")));
        assert!(nu.width() <= Dyadic::pow2(-30));
    }

    #[test]
    fn zero_power_gives_zero_capacity() {
        let w = capacity_discrete(&two_band(), &Dyadic::zero(), &Dyadic::pow2(-20), 64).unwrap();
        assert_eq!(w.capacity.value, Interval::zero());
        assert!(w.allocation.nu.hi() <= &(&Dyadic::one() + &Dyadic::pow2(-20)));
    }

    #[test]
    fn bad_tolerance_or_power() {
        assert!(solve_nu(&d("1"), &two_band(), &Dyadic::zero()).is_err());
        assert!(solve_nu(&d("-1"), &two_band(), &Dyadic::pow2(-4)).is_err());
    }

    #[test]
    fn zero_noise_band_with_water_is_a_domain_error() {
        let g = NoiseGrid::new(vec![
            Band::new(d("0.5"), d("1"), Interval::zero()),
            Band::new(d("1.5"), d("1"), Interval::one()),
        ])
        .unwrap();
        assert!(matches!(capacity_discrete(&g, &d("1"), &Dyadic::pow2(-20), 64), Err(Error::Domain(_))));
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let g = NoiseGrid::from_csv("f_center,delta_f,N_lo,N_hi\n0.5,1,1,1\n1.5, 1, 3, 3\n").unwrap();
        assert_eq!(g, two_band());
        assert!(NoiseGrid::from_csv("f,df,lo,hi\n0.5,1,1,1\n").is_err());
        let err = NoiseGrid::from_csv("f_center,delta_f,N_lo,N_hi\n0.5,1,0.1,1\n").unwrap_err();
        assert!(err.to_string().contains("nearest dyadic"), "{err}");
        assert!(NoiseGrid::from_csv("f_center,delta_f,N_lo,N_hi\n0.5,1,2,1\n").is_err());
    }
}
