//! Experiments on bound sequences: lower bounds that keep improving, certified
//! upper bounds that stop at the tail majorant, prefix-minimum envelopes and
//! agreement between the closed-form and grid solvers.

use rayon::prelude::*;
use serde::Serialize;

use crate::dyadic::Dyadic;
use crate::enumerator::EnumerationState;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::spectrum::{SpectrumModel, SpectrumParams};
use crate::waterpour::{capacity_discrete, constructed_f1, spectrum_grid};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundRow {
    pub m: usize,
    /// Best lower endpoint over all orders up to `m`.
    pub lower: Dyadic,
    /// Certified upper endpoint at order `m`.
    pub upper: Dyadic,
    pub width: Dyadic,
    /// Bound on the unseen series weight used for `upper`.
    pub remaining_mass: Dyadic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundSequenceReport {
    pub f1: Dyadic,
    pub halting_backend: bool,
    pub rows: Vec<BoundRow>,
    /// Certified lower bound on every width: the weight of candidates known
    /// never to enter the set, all of which the upper endpoints must still allow.
    pub majorant_floor: Dyadic,
}

impl BoundSequenceReport {
    pub fn indices(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.m).collect()
    }

    pub fn widths(&self) -> Vec<Dyadic> {
        self.rows.iter().map(|r| r.width.clone()).collect()
    }

    /// Rows whose lower bound strictly improved on the previous row.
    pub fn improvements(&self) -> usize {
        self.rows.windows(2).filter(|w| w[1].lower > w[0].lower).count()
    }

    pub fn last(&self) -> &BoundRow {
        self.rows.last().expect("reports are nonempty")
    }

    /// CSV `M,lower,upper,width,majorant_floor`, endpoints rounded outward to f64.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["M", "lower", "upper", "width", "majorant_floor"]).expect("in-memory write");
        let floor = self.majorant_floor.to_f64_down().to_string();
        for r in &self.rows {
            w.write_record([
                r.m.to_string(),
                r.lower.to_f64_down().to_string(),
                r.upper.to_f64_up().to_string(),
                r.width.to_f64_up().to_string(),
                floor.clone(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
    }
}

/// Constructed-spectrum capacity at window half-width `f1` for each truncation
/// order in `orders` (ascending, each at most the enumerated count).
///
/// Lower endpoints are replaced by their running maximum. Every width is at
/// least [`EnumerationState::excluded_mass`]: the upper endpoint adds the full
/// remaining mass, while the true value can only absorb the mass of elements
/// that are really in the set.
pub fn lower_bound_sequence(
    f1: &Dyadic,
    params: &SpectrumParams,
    orders: &[usize],
    prec: u32,
) -> Result<BoundSequenceReport> {
    if orders.is_empty() {
        return Err(Error::param("no truncation orders given"));
    }
    if orders.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::param("truncation orders must be strictly increasing"));
    }
    let enclosures: Vec<(Interval, Dyadic)> = orders
        .par_iter()
        .map(|&m| {
            let model = SpectrumModel::new(&params.with_terms(m)?, prec)?;
            let c = constructed_f1(&model, f1)?;
            Ok((c.value, model.remaining_mass().clone()))
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(orders.len());
    let mut best: Option<Dyadic> = None;
    for (&m, (value, remaining_mass)) in orders.iter().zip(enclosures) {
        let lower = match best {
            Some(b) => b.max(value.lo().clone()),
            None => value.lo().clone(),
        };
        best = Some(lower.clone());
        let upper = value.hi().clone();
        rows.push(BoundRow { m, width: &upper - &lower, lower, upper, remaining_mass });
    }
    let st = params.enumeration();
    Ok(BoundSequenceReport {
        f1: f1.clone(),
        halting_backend: st.is_halting_backend(),
        rows,
        majorant_floor: st.excluded_mass(),
    })
}

/// Prefix minima `û_n = min_{k<=n} u_k`.
pub fn upper_envelope(u: &[Dyadic]) -> Result<Vec<Dyadic>> {
    let (first, rest) = u.split_first().ok_or_else(|| Error::param("envelope of an empty sequence"))?;
    let mut out = vec![first.clone()];
    for x in rest {
        let next = out.last().unwrap().clone().min(x.clone());
        out.push(next);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrossCheck {
    pub f1: Dyadic,
    pub power_window: Interval,
    /// Power handed to the grid solver: the midpoint of `power_window`.
    pub power: Dyadic,
    pub grid_exponent: u32,
    pub constructed: Interval,
    pub waterfill: Interval,
    pub overlap: bool,
}

/// Capacity at `f1` by the closed form and by water-filling a `2^k`-band grid
/// of the same spectrum at the power that fills exactly that window.
pub fn cross_check(f1: &Dyadic, params: &SpectrumParams, grid_exponent: u32, prec: u32) -> Result<CrossCheck> {
    let model = SpectrumModel::new(params, prec)?;
    let constructed = constructed_f1(&model, f1)?.value;
    let power_window = model.power_pf1(f1)?;
    let power = power_window.mid().max(Dyadic::zero());
    let grid = spectrum_grid(&model, grid_exponent)?;
    let tol = Dyadic::pow2(-(prec as i64));
    let waterfill = capacity_discrete(&grid, &power, &tol, prec)?.capacity.value;
    Ok(CrossCheck {
        f1: f1.clone(),
        overlap: constructed.overlaps(&waterfill),
        power_window,
        power,
        grid_exponent,
        constructed,
        waterfill,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitStatus {
    /// Membership is decidable, so the limit is approached at a known rate.
    Computable,
    /// Only a lower semi-decision is available; the gap to the limit is bounded
    /// by the tail majorant, which need not tend to zero.
    Enumerable,
}

/// `U(M) = -S_M` for a range of orders.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct XiReport {
    pub indices: Vec<usize>,
    pub u: Vec<Dyadic>,
    /// `U(M) - limit` lies in `[0, remaining_mass(M)]`.
    pub remaining_mass: Vec<Dyadic>,
    pub limit: LimitStatus,
}

pub fn xi_partial_sums(state: &EnumerationState, orders: &[usize]) -> Result<XiReport> {
    let sums = state.partial_sums();
    let mut u = Vec::with_capacity(orders.len());
    let mut remaining = Vec::with_capacity(orders.len());
    for &m in orders {
        remaining.push(state.remaining_mass(m)?);
        u.push(-&sums[m]);
    }
    let limit = if state.is_halting_backend() { LimitStatus::Enumerable } else { LimitStatus::Computable };
    Ok(XiReport { indices: orders.to_vec(), u, remaining_mass: remaining, limit })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    #[test]
    fn envelope_examples() {
        let e = upper_envelope(&[d("3"), d("1"), d("2")]).unwrap();
        assert_eq!(e, vec![d("3"), d("1"), d("1")]);
        let fixed = vec![d("5"), d("4"), d("4"), d("-1")];
        assert_eq!(upper_envelope(&fixed).unwrap(), fixed);
        assert!(upper_envelope(&[]).is_err());
    }
}
