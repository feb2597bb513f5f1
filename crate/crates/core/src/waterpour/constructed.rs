//! Capacity of the constructed spectrum via its closed forms.

use rayon::prelude::*;

use crate::dyadic::Dyadic;
use crate::elementary::{ln, ln_point};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::spectrum::{SpectrumModel, SpectrumParams};

use super::{Band, CapacityEnclosure, CapacityMeta, NoiseGrid};

fn meta(model: &SpectrumModel) -> CapacityMeta {
    CapacityMeta {
        subbands: None,
        precision_bits: model.precision(),
        terms: Some(model.params().terms()),
        tail_majorant: Some(model.remaining_mass().clone()),
    }
}

/// Capacity at the power `P_{f1}` that fills exactly `[c - f1, c + f1]`:
/// `2 f1 ln N(c + f1) - ∫_{c-f1}^{c+f1} ln N`.
///
/// The truncated value is exact up to rounding. Each unseen series term adds
/// between 0 and its weight, so the upper endpoint is raised by the bound on
/// the unseen weights.
pub fn capacity_constructed_f1(f1: &Dyadic, params: &SpectrumParams, prec: u32) -> Result<CapacityEnclosure> {
    let model = SpectrumModel::new(params, prec)?;
    constructed_f1(&model, f1)
}

pub(crate) fn constructed_f1(model: &SpectrumModel, f1: &Dyadic) -> Result<CapacityEnclosure> {
    let c = model.params().half_band();
    if !f1.is_positive() || f1 > &c {
        return Err(Error::domain(format!("f1 = {f1} outside (0, B/2 = {c}]")));
    }
    let w = model.precision() + 8;
    let ln_edge = &ln_point(f1, w)?.mul_pow2(1) + &model.psi(f1);
    let window = model.integral_ln_nm(&(&c - f1), &(&c + f1))?;
    let truncated = (&ln_edge.scale(&f1.mul_pow2(1)) - &window).round_out(w);
    let hi = truncated.hi() + model.remaining_mass();
    Ok(CapacityEnclosure { value: Interval::ordered(truncated.lo().clone(), hi), meta: meta(model) })
}

/// `P_* = ∫_0^B (N(0) - N(f)) df`, the smallest power that floods the whole band.
pub fn p_star(params: &SpectrumParams, prec: u32) -> Result<Interval> {
    SpectrumModel::new(params, prec)?.power_pf1(&params.half_band())
}

/// Capacity for `P > P_*`, where water covers `[0, B]`:
/// `B ln ν - ∫_0^B ln N` with `ν = (P + ∫_0^B N) / B`.
pub fn capacity_high_power(p: &Dyadic, params: &SpectrumParams, prec: u32) -> Result<CapacityEnclosure> {
    let model = SpectrumModel::new(params, prec)?;
    high_power(&model, p)
}

pub(crate) fn high_power(model: &SpectrumModel, p: &Dyadic) -> Result<CapacityEnclosure> {
    let params = model.params();
    let b = params.bandwidth();
    let c = params.half_band();
    let threshold = model.power_pf1(&c)?;
    if p <= threshold.hi() {
        return Err(Error::Precondition(format!(
            "P = {} is not certifiably above P_* <= {}: gap {} <= 0",
            p.to_f64(),
            threshold.hi().to_f64_up(),
            (p - threshold.hi()).to_f64_up()
        )));
    }
    let w = model.precision() + 8;
    let integral_n = model.integral_n_window(&c)?;
    let nu = (&Interval::point(p.clone()) + &integral_n).div_dyadic(b, w)?;
    let log_integral = model.integral_ln_nm(&Dyadic::zero(), b)?;
    let truncated = (&ln(&nu, w)?.scale(b) - &log_integral).round_out(w);
    let hi = truncated.hi() + model.remaining_mass();
    Ok(CapacityEnclosure { value: Interval::ordered(truncated.lo().clone(), hi), meta: meta(model) })
}

/// `2^k` equal bands over `[0, B]` (k >= 1, so `B/2` is a band edge). Each band
/// carries the range of `N` over it, from endpoint enclosures and monotonicity
/// on each side of `B/2`, and the closed-form enclosure of `∫_band ln N`.
pub fn spectrum_grid(model: &SpectrumModel, k: u32) -> Result<NoiseGrid> {
    if k == 0 {
        return Err(Error::param("grid exponent must be at least 1"));
    }
    let points = model.grid(k)?;
    let bands: Vec<Band> = points
        .par_windows(2)
        .map(|pair| {
            let (a, b) = (&pair[0], &pair[1]);
            let noise = a.value.hull(&b.value);
            let log_integral = model.integral_ln_n(&a.f, &b.f)?;
            Ok(Band {
                center: (&a.f + &b.f).half(),
                width: &b.f - &a.f,
                noise: noise.round_out(model.precision() + 8),
                log_integral: Some(log_integral),
            })
        })
        .collect::<Result<_>>()?;
    NoiseGrid::new(bands)
}
