//! The constructed noise spectrum.
//!
//! With `c = B/2`, `u = |f - c|` and a listing `φ` of a set of positive
//! integers,
//!
//! ```text
//! G_n(f)  = -min(n, 1/u)
//! C1_n    = 2 (1 + ln(n B / 2))
//! N_M(f)  = u² · exp(Σ_{j=1..M} 2^-φ(j) · G_{n_j}(f) / C1_{n_j}),   n_j = n0 + j - 1
//! ```
//!
//! and `N` is the limit as `M → ∞`. Everything the rest of the crate needs
//! about `N` (point values, `∫ ln N`, `∫ N`) is computed here with certified
//! bounds on the part of the series not yet known.

use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::dyadic::{Dyadic, Round};
use crate::elementary::{exp, ln_point};
use crate::enumerator::EnumerationState;
use crate::error::{Error, Result};
use crate::interval::Interval;

pub const DEFAULT_PREC: u32 = 64;

/// Bits carried beyond the requested precision inside a model.
const GUARD_BITS: u32 = 16;

/// Quadrature of `N` stops once the enclosure of `∫ N` is this narrow (as a power of two)...
pub const DEFAULT_QUADRATURE_BITS: u32 = 28;
/// ...or once it has this many leaves.
const MAX_QUADRATURE_LEAVES: usize = 1 << 15;
const INITIAL_QUADRATURE_LEAVES: usize = 16;

/// Precisions tried in turn by [`eval_n`] until a requested width is met.
const PRECISION_LADDER: [u32; 4] = [64, 128, 256, 512];

#[derive(Debug, Clone)]
pub struct SpectrumParams {
    bandwidth: Dyadic,
    n0: u64,
    terms: usize,
    enumeration: Arc<EnumerationState>,
}

impl SpectrumParams {
    /// Requires `B > 0`, `n0 · B > 2` (that is `1/n0 < B/2`) and `1 <= terms <= count`.
    pub fn new(bandwidth: Dyadic, n0: u64, enumeration: Arc<EnumerationState>, terms: usize) -> Result<Self> {
        if !bandwidth.is_positive() {
            return Err(Error::param(format!("bandwidth must be positive, got {bandwidth}")));
        }
        if &Dyadic::from(n0) * &bandwidth <= Dyadic::from(2) {
            return Err(Error::param(format!(
                "n0 = {n0} violates 1/n0 < B/2 for B = {bandwidth} (smallest valid n0 is {})",
                Self::min_n0(&bandwidth)
            )));
        }
        if terms == 0 {
            return Err(Error::param("at least one term is required"));
        }
        if terms > enumeration.count() {
            return Err(Error::InsufficientEnumeration { requested: terms, available: enumeration.count() });
        }
        Ok(SpectrumParams { bandwidth, n0, terms, enumeration })
    }

    /// Smallest `n0` with `n0 · B > 2`.
    pub fn min_n0(bandwidth: &Dyadic) -> u64 {
        let two = Dyadic::from(2);
        let est = two.div(bandwidth, 64, Round::Down).map(|q| q.floor()).unwrap_or_default();
        let mut n = u64::try_from(est).unwrap_or(u64::MAX - 1).max(1);
        while &Dyadic::from(n) * bandwidth <= two {
            n += 1;
        }
        while n > 1 && &Dyadic::from(n - 1) * bandwidth > two {
            n -= 1;
        }
        n
    }

    pub fn with_terms(&self, terms: usize) -> Result<Self> {
        Self::new(self.bandwidth.clone(), self.n0, self.enumeration.clone(), terms)
    }

    pub fn bandwidth(&self) -> &Dyadic {
        &self.bandwidth
    }

    pub fn half_band(&self) -> Dyadic {
        self.bandwidth.half()
    }

    pub fn n0(&self) -> u64 {
        self.n0
    }

    pub fn terms(&self) -> usize {
        self.terms
    }

    pub fn enumeration(&self) -> &EnumerationState {
        &self.enumeration
    }

    fn check_frequency(&self, f: &Dyadic) -> Result<()> {
        if f.is_negative() || f > &self.bandwidth {
            return Err(Error::domain(format!("frequency {f} outside [0, {}]", self.bandwidth)));
        }
        Ok(())
    }
}

/// `-min(n, 1/u)` for `u >= 0`.
fn neg_min_recip(n: u64, u: &Dyadic, prec: u32) -> Interval {
    if &Dyadic::from(n) * u <= Dyadic::one() {
        Interval::from_int(-(n as i64))
    } else {
        -Interval::point(u.clone()).recip(prec).expect("u > 1/n > 0")
    }
}

/// `G_n(f)`.
pub fn g_n(n: u64, f: &Dyadic, params: &SpectrumParams, prec: u32) -> Result<Interval> {
    params.check_frequency(f)?;
    if n < params.n0 {
        return Err(Error::param(format!("G_n needs n >= n0 = {}, got {n}", params.n0)));
    }
    let u = (f - &params.half_band()).abs();
    Ok(neg_min_recip(n, &u, prec))
}

/// `C1_n = 2 (1 + ln(n B / 2))`; requires `n B / 2 >= 1`.
pub fn c_n1(n: u64, params: &SpectrumParams, prec: u32) -> Result<Interval> {
    c1_at(n, &params.half_band(), prec)
}

fn c1_at(n: u64, half_band: &Dyadic, prec: u32) -> Result<Interval> {
    let x = &Dyadic::from(n) * half_band;
    if x < Dyadic::one() {
        return Err(Error::domain(format!("n·B/2 = {x} is below 1")));
    }
    Ok((&ln_point(&x, prec + 2)? + &Interval::one()).mul_pow2(1))
}

/// `floor(1/u) + 1`, the smallest integer `L` with `1/L < u`.
fn recip_bound(u: &Dyadic) -> BigInt {
    debug_assert!(u.is_positive());
    let floor = if u.exponent() > 0 {
        BigInt::from(0)
    } else {
        (BigInt::from(1) << (-u.exponent()) as u64) / u.mantissa()
    };
    floor + 1
}

/// `F(t) = 2 (t ln|t| - t)`, the antiderivative of `ln t²` with `F(0) = 0`.
fn log_square_antiderivative(t: &Dyadic, w: u32) -> Interval {
    if t.is_zero() {
        return Interval::zero();
    }
    let l = ln_point(&t.abs(), w).expect("t != 0");
    (&l.scale(t) - &Interval::point(t.clone())).mul_pow2(1).round_out(w)
}

/// Point value enclosure of the constructed spectrum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpectrumEnclosure {
    pub f: Dyadic,
    pub value: Interval,
    pub truncation_order: usize,
    /// Width added to the truncated value to cover the unknown part of the series.
    pub tail_bound: Dyadic,
    pub precision_bits: u32,
    pub met_target: bool,
}

/// Per-precision tables for one parameter set.
#[derive(Debug, Clone)]
pub struct SpectrumModel {
    params: SpectrumParams,
    prec: u32,
    work: u32,
    c: Dyadic,
    ln_c: Interval,
    ns: Vec<u64>,
    weights: Vec<Dyadic>,
    /// `Σ_{j<p} ratio_j · n_j` for `p = 0..=M`.
    small_u_coeff: Vec<Interval>,
    /// `Σ_{j>=p} ratio_j` for `p = 0..=M`.
    large_u_coeff: Vec<Interval>,
    weight_prefix: Vec<Dyadic>,
    remaining: Dyadic,
    c1_next: Interval,
    quadrature_bits: u32,
}

impl SpectrumModel {
    pub fn new(params: &SpectrumParams, prec: u32) -> Result<Self> {
        let work = prec + GUARD_BITS;
        let c = params.half_band();
        let m = params.terms;
        let st = params.enumeration();
        let ns: Vec<u64> = (0..m as u64).map(|j| params.n0 + j).collect();
        let weights: Vec<Dyadic> =
            st.elements()[..m].iter().map(|&k| Dyadic::pow2(-(k as i64))).collect();
        let ratios: Vec<Interval> = ns
            .par_iter()
            .zip(weights.par_iter())
            .map(|(&n, w)| {
                let c1 = c1_at(n, &c, work)?;
                Interval::point(w.clone()).div(&c1, work)
            })
            .collect::<Result<_>>()?;
        let mut small_u_coeff = vec![Interval::zero()];
        for (r, &n) in ratios.iter().zip(&ns) {
            let next = (small_u_coeff.last().unwrap() + &r.scale(&Dyadic::from(n))).round_out(work);
            small_u_coeff.push(next);
        }
        let mut large_u_coeff = vec![Interval::zero(); m + 1];
        for j in (0..m).rev() {
            large_u_coeff[j] = (&large_u_coeff[j + 1] + &ratios[j]).round_out(work);
        }
        let mut weight_prefix = vec![Dyadic::zero()];
        for w in &weights {
            let next = weight_prefix.last().unwrap() + w;
            weight_prefix.push(next);
        }
        Ok(SpectrumModel {
            ln_c: ln_point(&c, work)?,
            c1_next: c1_at(params.n0 + m as u64, &c, work)?,
            remaining: st.remaining_mass(m)?,
            params: params.clone(),
            prec,
            work,
            c,
            ns,
            weights,
            small_u_coeff,
            large_u_coeff,
            weight_prefix,
            quadrature_bits: DEFAULT_QUADRATURE_BITS,
        })
    }

    /// Sets the width target `2^-bits` for the quadrature of `∫ N`.
    pub fn with_quadrature_bits(mut self, bits: u32) -> Self {
        self.quadrature_bits = bits;
        self
    }

    pub fn params(&self) -> &SpectrumParams {
        &self.params
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// Upper bound on the total weight of the series terms beyond `M`.
    pub fn remaining_mass(&self) -> &Dyadic {
        &self.remaining
    }

    /// `S_M`.
    pub fn weight_sum(&self) -> &Dyadic {
        self.weight_prefix.last().unwrap()
    }

    pub fn weights(&self) -> &[Dyadic] {
        &self.weights
    }

    /// `C1` of the first index beyond the truncation.
    pub fn c1_next(&self) -> &Interval {
        &self.c1_next
    }

    /// Number of terms whose index satisfies `n_j · u < 1` (they are constant near `u`).
    fn split(&self, u: &Dyadic) -> usize {
        self.ns.partition_point(|&n| &Dyadic::from(n) * u < Dyadic::one())
    }

    /// Number of terms with `n_j · u <= 1`.
    fn split_closed(&self, u: &Dyadic) -> usize {
        self.ns.partition_point(|&n| &Dyadic::from(n) * u <= Dyadic::one())
    }

    /// Truncated exponent `ψ_M` at offset `u = |f - c|`.
    pub fn psi(&self, u: &Dyadic) -> Interval {
        let p = self.split(u);
        let mut v = -&self.small_u_coeff[p];
        if p < self.ns.len() {
            let inv = Interval::point(u.clone()).recip(self.work).expect("u > 1/n_j > 0");
            v = &v - &(&self.large_u_coeff[p] * &inv);
        }
        v.round_out(self.work)
    }

    /// `N_M(c + u)` for `u >= 0`.
    fn eval_offset(&self, u: &Dyadic) -> Interval {
        if u.is_zero() {
            return Interval::zero();
        }
        let e = exp(&self.psi(u), self.work);
        e.scale(&(u * u)).round_out(self.work)
    }

    /// `N_M(f)`.
    pub fn eval_nm(&self, f: &Dyadic) -> Result<Interval> {
        self.params.check_frequency(f)?;
        Ok(self.eval_offset(&(f - &self.c).abs()))
    }

    /// Enclosure of the limit spectrum `N(f)`.
    pub fn eval_n(&self, f: &Dyadic) -> Result<SpectrumEnclosure> {
        self.params.check_frequency(f)?;
        let u = (f - &self.c).abs();
        let (value, tail_bound) = self.eval_offset_limit(&u);
        Ok(SpectrumEnclosure {
            f: f.clone(),
            value,
            truncation_order: self.params.terms,
            tail_bound,
            precision_bits: self.prec,
            met_target: true,
        })
    }

    /// `N(c + u)` and the width added for the unknown tail.
    fn eval_offset_limit(&self, u: &Dyadic) -> (Interval, Dyadic) {
        let nm = self.eval_offset(u);
        if u.is_zero() {
            return (nm, Dyadic::zero());
        }
        // every unseen term contributes at least -L·w/C1_next to the exponent
        let l = Dyadic::from_int(recip_bound(u));
        let t = Interval::point(&l * &self.remaining).div(&self.c1_next, self.work).expect("C1 > 0");
        let factor = exp(&Interval::point(-t.hi()), self.work);
        let lo = (nm.lo() * factor.lo()).round(self.work, Round::Down);
        let tail = nm.lo() - &lo;
        (Interval::ordered(lo, nm.hi().clone()), tail)
    }

    /// `Ψ(x) = ∫_0^x ψ_M`, assembled from closed-form termwise antiderivatives.
    ///
    /// Left of `c`: `u·Σ_{j<p} ratio_j n_j - ½ Σ_{j<p} w_j - ln(c/u)·Σ_{j>=p} ratio_j`.
    /// Right of `c` the mirror image is subtracted from `-S_M`.
    fn psi_antiderivative(&self, x: &Dyadic) -> Interval {
        let total = self.weight_sum();
        if x.is_zero() {
            return Interval::zero();
        }
        if x == &self.params.bandwidth {
            return Interval::point(-total);
        }
        let right = x > &self.c;
        let u = (x - &self.c).abs();
        let p = self.split(&u);
        let half_w = self.weight_prefix[p].half();
        let linear = self.small_u_coeff[p].scale(&u);
        let log_part = if p == self.ns.len() || u == self.c {
            Interval::zero()
        } else {
            let l = &self.ln_c - &ln_point(&u, self.work).expect("u > 0");
            &l * &self.large_u_coeff[p]
        };
        let v = if right {
            &(&Interval::point(&half_w - total) - &linear) + &log_part
        } else {
            &(&linear - &Interval::point(half_w)) - &log_part
        };
        v.round_out(self.work)
    }

    /// `∫_a^b ψ_M`. Over `[0, B]` this is exactly `-S_M`.
    pub fn integral_psi(&self, a: &Dyadic, b: &Dyadic) -> Result<Interval> {
        self.check_range(a, b)?;
        Ok(&self.psi_antiderivative(b) - &self.psi_antiderivative(a))
    }

    /// `∫_a^b ln (f - c)² df`.
    pub fn singular_integral(&self, a: &Dyadic, b: &Dyadic) -> Result<Interval> {
        self.check_range(a, b)?;
        let fb = log_square_antiderivative(&(b - &self.c), self.work);
        let fa = log_square_antiderivative(&(a - &self.c), self.work);
        Ok(&fb - &fa)
    }

    /// `∫_a^b ln N_M`.
    pub fn integral_ln_nm(&self, a: &Dyadic, b: &Dyadic) -> Result<Interval> {
        Ok(&self.singular_integral(a, b)? + &self.integral_psi(a, b)?)
    }

    /// `∫_a^b ln N`: the truncated integral plus `[-R·β, 0]`, where `R` bounds
    /// the unseen weights and `β = min(1, (b-a)/(d·C1_next))` when `[a, b]`
    /// stays at distance `d > 0` from `c`.
    pub fn integral_ln_n(&self, a: &Dyadic, b: &Dyadic) -> Result<Interval> {
        let v = self.integral_ln_nm(a, b)?;
        Ok(Interval::ordered(v.lo() - &self.log_tail(a, b), v.hi().clone()))
    }

    /// Largest possible drop of `∫_a^b ln N` below `∫_a^b ln N_M`.
    fn log_tail(&self, a: &Dyadic, b: &Dyadic) -> Dyadic {
        if a == b || self.remaining.is_zero() {
            return Dyadic::zero();
        }
        let d = if b <= &self.c {
            &self.c - b
        } else if a >= &self.c {
            a - &self.c
        } else {
            Dyadic::zero()
        };
        if d.is_zero() {
            return self.remaining.clone();
        }
        let denom = &Interval::point(d) * &self.c1_next;
        let beta = Interval::point(b - a).div(&denom, self.work).expect("positive").hi().clone();
        (&self.remaining * &beta.min(Dyadic::one())).round(self.work, Round::Up)
    }

    fn check_range(&self, a: &Dyadic, b: &Dyadic) -> Result<()> {
        self.params.check_frequency(a)?;
        self.params.check_frequency(b)?;
        if a > b {
            return Err(Error::param(format!("integration bounds out of order: {a} > {b}")));
        }
        Ok(())
    }

    /// `∫_{c-f1}^{c+f1} N`.
    ///
    /// On each side of `c` the spectrum is convex in `u` (every factor of `N'`
    /// is nonnegative and nondecreasing), so on a leaf the midpoint rule is a
    /// lower bound and the trapezoid rule an upper bound. Leaves are refined
    /// until the enclosure of `∫ N_M` meets the quadrature target; the unseen
    /// tail lowers the result by at most `R·f1²/C1_next`.
    pub fn integral_n_window(&self, f1: &Dyadic) -> Result<Interval> {
        self.check_offset(f1)?;
        if f1.is_zero() {
            return Ok(Interval::zero());
        }
        let half = self.integral_offsets(f1);
        let truncated = half.mul_pow2(1);
        let drop = Interval::point(&self.remaining * &(f1 * f1))
            .div(&self.c1_next, self.work)
            .expect("C1 > 0");
        Ok(Interval::ordered(truncated.lo() - drop.hi(), truncated.hi().clone()))
    }

    fn check_offset(&self, f1: &Dyadic) -> Result<()> {
        if f1.is_negative() || f1 > &self.c {
            return Err(Error::domain(format!("offset {f1} outside [0, B/2 = {}]", self.c)));
        }
        Ok(())
    }

    /// Enclosure of `∫_0^{f1} N_M(c + u) du`.
    fn integral_offsets(&self, f1: &Dyadic) -> Interval {
        let target = Dyadic::pow2(-(self.quadrature_bits as i64));
        let n = INITIAL_QUADRATURE_LEAVES;
        let points: Vec<Dyadic> =
            (0..=2 * n).map(|i| (f1 * &Dyadic::from(i as u64)).mul_pow2(-(((2 * n).trailing_zeros()) as i64))).collect();
        let values: Vec<Interval> = points.par_iter().map(|u| self.eval_offset(u)).collect();
        let mut leaves: Vec<Leaf> = (0..n)
            .map(|i| {
                let [fa, fm, fb] = [&values[2 * i], &values[2 * i + 1], &values[2 * i + 2]].map(Clone::clone);
                self.leaf(points[2 * i].clone(), points[2 * i + 2].clone(), fa, fm, fb)
            })
            .collect();
        loop {
            let total = leaves.iter().fold(Dyadic::zero(), |acc, l| &acc + &l.width());
            if total <= target || leaves.len() >= MAX_QUADRATURE_LEAVES {
                break;
            }
            // refine every leaf above its share of the target
            let share_bits = (usize::BITS - leaves.len().leading_zeros()) as i64;
            let share = target.mul_pow2(-share_bits);
            let split: Vec<bool> = leaves.iter().map(|l| l.width() > share).collect();
            let quarters: Vec<Dyadic> = leaves
                .iter()
                .zip(&split)
                .filter(|(_, s)| **s)
                .flat_map(|(l, _)| {
                    let m = l.mid();
                    [(&l.a + &m).half(), (&m + &l.b).half()]
                })
                .collect();
            let qv: Vec<Interval> = quarters.par_iter().map(|u| self.eval_offset(u)).collect();
            let halves: Vec<(Dyadic, Dyadic, Interval, Interval, Interval)> = leaves
                .iter()
                .zip(&split)
                .filter(|(_, s)| **s)
                .zip(qv.chunks(2))
                .flat_map(|((l, _), q)| {
                    let m = l.mid();
                    [
                        (l.a.clone(), m.clone(), l.fa.clone(), q[0].clone(), l.fm.clone()),
                        (m, l.b.clone(), l.fm.clone(), q[1].clone(), l.fb.clone()),
                    ]
                })
                .collect();
            let mut fresh = halves
                .into_par_iter()
                .map(|(a, b, fa, fm, fb)| self.leaf(a, b, fa, fm, fb))
                .collect::<Vec<_>>()
                .into_iter();
            let mut next = Vec::with_capacity(leaves.len() + qv.len());
            for (leaf, s) in leaves.into_iter().zip(split) {
                if s {
                    next.extend(fresh.by_ref().take(2));
                } else {
                    next.push(leaf);
                }
            }
            leaves = next;
        }
        let (lo, hi) =
            leaves.iter().fold((Dyadic::zero(), Dyadic::zero()), |(lo, hi), l| (&lo + &l.lo, &hi + &l.hi));
        Interval::ordered(lo, hi)
    }

    /// Bounds on `∫_a^b N_M(c + u) du` from the values at both ends and the midpoint.
    ///
    /// Convexity gives the midpoint rule from below and the two-chord trapezoid
    /// rule from above. When no breakpoint `1/n_j` falls inside `(a, b)` the
    /// integrand is `K u² e^{-β/u}` there, and the midpoint remainder
    /// `h³ N''(ξ)/24` is bounded using `N'' = N/u² · (2 + 2β/u + β²/u²)`.
    fn leaf(&self, a: Dyadic, b: Dyadic, fa: Interval, fm: Interval, fb: Interval) -> Leaf {
        let w = self.work;
        let h = &b - &a;
        let mut lo = (&h * fm.lo()).round(w, Round::Down);
        let chords = &(fa.hi() + fb.hi()) + &fm.hi().mul_pow2(1);
        let mut hi = (&h * &chords).mul_pow2(-2).round(w, Round::Up);
        let p = self.split(&a);
        if a.is_positive() && p == self.split_closed(&b) {
            let beta = &self.large_u_coeff[p];
            let curvature = |scale: &Dyadic, at: &Dyadic, beta: &Dyadic| -> Option<Interval> {
                let inv = Interval::point(at.clone()).recip(w).ok()?;
                let x = &inv.scale(beta);
                let poly = &(&Interval::point(Dyadic::from(2)) + &x.mul_pow2(1)) + &(x * x);
                Interval::point(scale.clone()).div_dyadic(&(at * at), w).ok().map(|s| &s * &poly)
            };
            // N/u² increases with u, so its extremes sit at the ends
            let low = curvature(fa.lo(), &b, beta.lo());
            let high = curvature(fb.hi(), &a, beta.hi());
            if let (Some(low), Some(high)) = (low, high) {
                let cube = (&(&h * &h) * &h).mul_pow2(-3);
                let rem_lo = Interval::point(cube.clone()).scale(low.lo()).div_dyadic(&Dyadic::from(3), w);
                let rem_hi = Interval::point(cube).scale(high.hi()).div_dyadic(&Dyadic::from(3), w);
                if let (Ok(rl), Ok(rh)) = (rem_lo, rem_hi) {
                    let refined = (&lo + rl.lo()).round(w, Round::Down);
                    lo = lo.max(refined);
                    let mid_hi = (&h * fm.hi()).round(w, Round::Up);
                    hi = hi.min((&mid_hi + rh.hi()).round(w, Round::Up));
                }
            }
        }
        Leaf { a, b, fa, fm, fb, lo, hi }
    }

    /// `P_{f1} = ∫_{c-f1}^{c+f1} (N(c+f1) - N(f)) df`.
    pub fn power_pf1(&self, f1: &Dyadic) -> Result<Interval> {
        self.check_offset(f1)?;
        if f1.is_zero() {
            return Ok(Interval::zero());
        }
        let (level, _) = self.eval_offset_limit(f1);
        let window = self.integral_n_window(f1)?;
        Ok(&level.scale(&f1.mul_pow2(1)) - &window)
    }

    /// CSV rows `f, N_lo, N_hi, M, tail_bound` over `2^k + 1` equispaced points.
    pub fn export_grid_csv(&self, k: u32) -> Result<String> {
        let rows = self.grid(k)?;
        let mut out = String::from("f,N_lo,N_hi,M,tail_bound\n");
        for e in rows {
            let (lo, hi) = e.value.to_f64_bounds();
            writeln!(out, "{},{},{},{},{}", e.f.to_f64(), lo, hi, e.truncation_order, e.tail_bound.to_f64_up())
                .expect("writing to a String");
        }
        Ok(out)
    }

    /// Enclosures at `f_i = i·B/2^k`, `i = 0..=2^k`.
    pub fn grid(&self, k: u32) -> Result<Vec<SpectrumEnclosure>> {
        let n = 1u64.checked_shl(k).filter(|_| k <= 24).ok_or_else(|| Error::param("grid exponent too large"))?;
        let b = &self.params.bandwidth;
        (0..=n)
            .into_par_iter()
            .map(|i| self.eval_n(&(b * &Dyadic::from(i)).mul_pow2(-(k as i64))))
            .collect()
    }
}

#[derive(Debug, Clone)]
struct Leaf {
    a: Dyadic,
    b: Dyadic,
    fa: Interval,
    fm: Interval,
    fb: Interval,
    lo: Dyadic,
    hi: Dyadic,
}

impl Leaf {
    fn mid(&self) -> Dyadic {
        (&self.a + &self.b).half()
    }

    fn width(&self) -> Dyadic {
        &self.hi - &self.lo
    }
}

/// `N_M(f)` at `prec` bits.
pub fn eval_nm(f: &Dyadic, params: &SpectrumParams, prec: u32) -> Result<Interval> {
    SpectrumModel::new(params, prec)?.eval_nm(f)
}

/// `N(f)`, raising the working precision until the enclosure is at most
/// `target_width` wide. When the tail of the series alone exceeds the target,
/// the best enclosure is returned with `met_target = false`.
pub fn eval_n(f: &Dyadic, params: &SpectrumParams, target_width: &Dyadic) -> Result<SpectrumEnclosure> {
    params.check_frequency(f)?;
    let mut best = None;
    for prec in PRECISION_LADDER {
        let mut e = SpectrumModel::new(params, prec)?.eval_n(f)?;
        e.met_target = &e.value.width() <= target_width;
        let done = e.met_target || &e.tail_bound > target_width;
        best = Some(e);
        if done {
            break;
        }
    }
    Ok(best.expect("ladder is nonempty"))
}

/// `∫_a^b ln N`.
pub fn integral_ln_n(a: &Dyadic, b: &Dyadic, params: &SpectrumParams, prec: u32) -> Result<Interval> {
    SpectrumModel::new(params, prec)?.integral_ln_n(a, b)
}

/// `P_{f1}`; requires `0 < f1 <= B/2`.
pub fn power_pf1(f1: &Dyadic, params: &SpectrumParams, prec: u32) -> Result<Interval> {
    if !f1.is_positive() {
        return Err(Error::domain(format!("f1 must be positive, got {f1}")));
    }
    SpectrumModel::new(params, prec)?.power_pf1(f1)
}
