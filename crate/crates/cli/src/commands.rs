use std::fmt::Write as _;
use std::sync::Arc;

use rigcap::enumerator::{EnumerationState, EnumeratorSpec};
use rigcap::lab::lower_bound_sequence;
use rigcap::spectrum::{SpectrumModel, SpectrumParams};
use rigcap::waterpour::{
    capacity_constructed_f1, capacity_discrete, capacity_high_power, spectrum_grid, CapacityEnclosure, NoiseGrid,
};
use rigcap::{Dyadic, Error, Interval};
use serde_json::{json, Value};

use crate::{
    CapacityCmd, Command, ConstructedArgs, DemoCmd, EnumArgs, EnumCmd, Format, HighpowerArgs, ModelArgs, OutputArgs,
    SpectrumArgs, SpectrumCmd, StallArgs, WaterfillArgs,
};

/// Step budget when `RIGCAP_STEP_BUDGET` is unset.
const DEFAULT_STEP_BUDGET: u64 = 100_000;
const BUDGET_CHUNK: u64 = 1024;
const MAX_GRID_EXPONENT: u32 = 24;
const PRECISION_RANGE: std::ops::RangeInclusive<u32> = 16..=4096;

#[derive(Debug)]
pub enum Failure {
    Config(String),
    Resource(String),
    Internal(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Resource(_) => 3,
            Failure::Internal(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Resource(m) | Failure::Internal(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InsufficientEnumeration { .. } => Failure::Resource(e.to_string()),
            Error::Invariant(_) | Error::Handle { .. } => Failure::Internal(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

type Outcome<T = ()> = std::result::Result<T, Failure>;

fn config<T>(msg: impl Into<String>) -> Outcome<T> {
    Err(Failure::Config(msg.into()))
}

pub fn dispatch(command: Command) -> Outcome {
    match command {
        Command::Spectrum(SpectrumCmd::Eval(a)) => spectrum_eval(a),
        Command::Spectrum(SpectrumCmd::ExportGrid(a)) => spectrum_export(a),
        Command::Capacity(CapacityCmd::Waterfill(a)) => waterfill(a),
        Command::Capacity(CapacityCmd::Constructed(a)) => constructed(a),
        Command::Capacity(CapacityCmd::Highpower(a)) => highpower(a),
        Command::Demo(DemoCmd::Stall(a)) => stall(a),
        Command::Enum(EnumCmd::Run(a)) => enum_run(a),
    }
}

fn step_budget() -> Outcome<u64> {
    match std::env::var("RIGCAP_STEP_BUDGET") {
        Err(_) => Ok(DEFAULT_STEP_BUDGET),
        Ok(s) => s
            .trim()
            .parse()
            .or_else(|_| config(format!("RIGCAP_STEP_BUDGET must be a nonnegative integer, got `{s}`"))),
    }
}

/// Model arguments checked against every precondition that does not need the enumeration.
struct Validated {
    bandwidth: Dyadic,
    n0: u64,
    terms: usize,
    spec: EnumeratorSpec,
    prec: u32,
}

fn validate_model(m: &ModelArgs) -> Outcome<Validated> {
    if !m.bandwidth.is_positive() {
        return config(format!("--bandwidth must be positive, got {}", m.bandwidth));
    }
    let n0 = m.n0.unwrap_or_else(|| SpectrumParams::min_n0(&m.bandwidth));
    if &Dyadic::from(n0) * &m.bandwidth <= Dyadic::from(2) {
        return config(format!(
            "--n0 {n0} violates 1/n0 < B/2 for B = {} (need n0 >= {})",
            m.bandwidth,
            SpectrumParams::min_n0(&m.bandwidth)
        ));
    }
    if m.terms == 0 {
        return config("--terms must be at least 1");
    }
    check_precision(m.precision_bits)?;
    let spec: EnumeratorSpec = m.enumerator.parse()?;
    Ok(Validated { bandwidth: m.bandwidth.clone(), n0, terms: m.terms, spec, prec: m.precision_bits })
}

fn check_precision(bits: u32) -> Outcome {
    if !PRECISION_RANGE.contains(&bits) {
        return config(format!(
            "--precision-bits must lie in {}..={}, got {bits}",
            PRECISION_RANGE.start(),
            PRECISION_RANGE.end()
        ));
    }
    Ok(())
}

fn check_grid(k: u32) -> Outcome {
    if k == 0 || k > MAX_GRID_EXPONENT {
        return config(format!("--grid must lie in 1..={MAX_GRID_EXPONENT}, got {k}"));
    }
    Ok(())
}

/// Runs the enumerator until `count` elements are listed or the budget is spent.
fn enumerate(spec: &EnumeratorSpec, count: usize) -> Outcome<EnumerationState> {
    let budget = step_budget()?;
    let mut state = spec.build()?.start();
    if !state.advance_until_count(count, budget, BUDGET_CHUNK) {
        return Err(Failure::Resource(format!(
            "{spec} listed {} of the {count} elements required within {} steps (raise RIGCAP_STEP_BUDGET)",
            state.count(),
            state.steps_used()
        )));
    }
    Ok(state)
}

fn params(v: &Validated, terms: usize) -> Outcome<SpectrumParams> {
    let state = enumerate(&v.spec, terms)?;
    Ok(SpectrumParams::new(v.bandwidth.clone(), v.n0, Arc::new(state), terms)?)
}

fn format_or(output: &OutputArgs, default: Format, allowed: &[Format]) -> Outcome<Format> {
    let f = output.format.unwrap_or(default);
    if !allowed.contains(&f) {
        return config(format!("--format {f:?} is not available for this command").to_lowercase());
    }
    Ok(f)
}

fn emit(output: &OutputArgs, text: &str) -> Outcome {
    match &output.out {
        Some(path) => std::fs::write(path, text)
            .or_else(|e| config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn interval_json(iv: &Interval) -> Value {
    json!({ "lo": iv.lo(), "hi": iv.hi() })
}

fn spectrum_eval(a: SpectrumArgs) -> Outcome {
    let v = validate_model(&a.model)?;
    check_grid(a.grid)?;
    let format = format_or(&a.output, Format::Csv, &[Format::Csv, Format::Json])?;
    let model = SpectrumModel::new(&params(&v, v.terms)?, v.prec)?;
    let text = match format {
        Format::Csv => model.export_grid_csv(a.grid)?,
        Format::Json => json_text(&json!({
            "bandwidth": v.bandwidth,
            "terms": v.terms,
            "precision_bits": v.prec,
            "points": model.grid(a.grid)?,
        })),
    };
    emit(&a.output, &text)
}

fn spectrum_export(a: SpectrumArgs) -> Outcome {
    let v = validate_model(&a.model)?;
    check_grid(a.grid)?;
    let format = format_or(&a.output, Format::Csv, &[Format::Csv, Format::Json])?;
    let model = SpectrumModel::new(&params(&v, v.terms)?, v.prec)?;
    let grid = spectrum_grid(&model, a.grid)?;
    let text = match format {
        Format::Csv => {
            let mut s = String::from("f_center,delta_f,N_lo,N_hi\n");
            for b in grid.bands() {
                writeln!(s, "{},{},{},{}", b.center, b.width, b.noise.lo(), b.noise.hi()).expect("String write");
            }
            s
        }
        Format::Json => json_text(&serde_json::to_value(&grid).expect("grid serializes")),
    };
    emit(&a.output, &text)
}

/// Capacity JSON shared by the three modes.
fn capacity_json(mode: &str, c: &CapacityEnclosure, requested: &Dyadic, extra: Value) -> Value {
    let width = c.value.width();
    let (lo, hi) = c.value.to_f64_bounds();
    let mut v = json!({
        "mode": mode,
        "capacity": interval_json(&c.value),
        "capacity_nats_f64": { "lo": lo, "hi": hi },
        "capacity_bits_f64": { "lo": lo / std::f64::consts::LN_2, "hi": hi / std::f64::consts::LN_2 },
        "achieved_width": width,
        "requested_width": requested,
        "met_request": &width <= requested,
        "meta": c.meta,
    });
    if let (Value::Object(map), Value::Object(more)) = (&mut v, extra) {
        map.extend(more);
    }
    v
}

fn requested(r: &Option<Dyadic>, terms: usize) -> Outcome<Dyadic> {
    match r {
        Some(w) if !w.is_positive() => config(format!("--request-width must be positive, got {w}")),
        Some(w) => Ok(w.clone()),
        None => Ok(Dyadic::pow2(1 - terms as i64)),
    }
}

fn waterfill(a: WaterfillArgs) -> Outcome {
    format_or(&a.output, Format::Json, &[Format::Json])?;
    if a.power.is_negative() {
        return config(format!("--power must be nonnegative, got {}", a.power));
    }
    let request = requested(&a.request_width, a.model.terms)?;
    check_precision(a.model.precision_bits)?;
    let prec = a.model.precision_bits;
    let (grid, source) = match &a.noise_csv {
        Some(path) => (NoiseGrid::from_csv_path(path)?, json!({ "noise_csv": path.display().to_string() })),
        None => {
            let v = validate_model(&a.model)?;
            check_grid(a.grid)?;
            let model = SpectrumModel::new(&params(&v, v.terms)?, prec)?;
            (spectrum_grid(&model, a.grid)?, json!({ "enum": v.spec.to_string(), "grid": a.grid }))
        }
    };
    let tol = Dyadic::pow2(-(prec as i64));
    let w = capacity_discrete(&grid, &a.power, &tol, prec)?;
    let extra = json!({
        "source": source,
        "power": a.power,
        "nu": interval_json(&w.allocation.nu),
        "allocation": w.allocation.per_band.iter().map(interval_json).collect::<Vec<_>>(),
    });
    emit(&a.output, &json_text(&capacity_json("waterfill", &w.capacity, &request, extra)))
}

fn constructed(a: ConstructedArgs) -> Outcome {
    format_or(&a.output, Format::Json, &[Format::Json])?;
    let v = validate_model(&a.model)?;
    let request = requested(&a.request_width, v.terms)?;
    let half = v.bandwidth.half();
    if !a.f1.is_positive() || a.f1 > half {
        return config(format!("--f1 must satisfy 0 < f1 <= B/2 = {half}, got {}", a.f1));
    }
    let p = params(&v, v.terms)?;
    let c = capacity_constructed_f1(&a.f1, &p, v.prec)?;
    let window = SpectrumModel::new(&p, v.prec)?.power_pf1(&a.f1)?;
    let extra = json!({
        "enum": v.spec.to_string(),
        "f1": a.f1,
        "power_window": interval_json(&window),
        "power_mid": window.mid(),
    });
    emit(&a.output, &json_text(&capacity_json("constructed", &c, &request, extra)))
}

fn highpower(a: HighpowerArgs) -> Outcome {
    format_or(&a.output, Format::Json, &[Format::Json])?;
    let v = validate_model(&a.model)?;
    let request = requested(&a.request_width, v.terms)?;
    if !a.power.is_positive() {
        return config(format!("--power must be positive, got {}", a.power));
    }
    let c = capacity_high_power(&a.power, &params(&v, v.terms)?, v.prec)?;
    let extra = json!({ "enum": v.spec.to_string(), "power": a.power });
    emit(&a.output, &json_text(&capacity_json("highpower", &c, &request, extra)))
}

fn stall(a: StallArgs) -> Outcome {
    let v = validate_model(&a.model)?;
    let format = format_or(&a.output, Format::Csv, &[Format::Csv, Format::Json])?;
    if a.expect_stall && !v.spec.is_halting() {
        return config(format!("--expect-stall needs a halting backend, but {} is decidable", v.spec));
    }
    if a.min_terms == 0 || a.min_terms > v.terms {
        return config(format!("--min-terms must lie in 1..={}, got {}", v.terms, a.min_terms));
    }
    let f1 = a.f1.clone().unwrap_or_else(|| v.bandwidth.mul_pow2(-2));
    if !f1.is_positive() || f1 > v.bandwidth.half() {
        return config(format!("--f1 must satisfy 0 < f1 <= B/2, got {f1}"));
    }
    let p = params(&v, v.terms)?;
    let orders: Vec<usize> = (a.min_terms..=v.terms).collect();
    let report = lower_bound_sequence(&f1, &p, &orders, v.prec)?;
    if report.rows.iter().any(|r| r.width < report.majorant_floor) {
        return Err(Failure::Internal("a certified width fell below the majorant floor".into()));
    }
    let last = report.last();
    let stalled = report.majorant_floor.is_positive();
    let text = match format {
        Format::Csv => report.to_csv(),
        Format::Json => json_text(&json!({ "enum": v.spec.to_string(), "stalled": stalled, "report": report })),
    };
    emit(&a.output, &text)?;
    eprintln!(
        "final lower {:.12}, final width {:.6e}, majorant floor {:.6e}, stalled {}",
        last.lower.to_f64_down(),
        last.width.to_f64_up(),
        report.majorant_floor.to_f64_down(),
        stalled
    );
    Ok(())
}

fn enum_run(a: EnumArgs) -> Outcome {
    let spec: EnumeratorSpec = a.enumerator.parse()?;
    let format = format_or(&a.output, Format::Json, &[Format::Csv, Format::Json])?;
    let state = match a.terms {
        Some(0) => return config("--terms must be at least 1"),
        Some(m) => enumerate(&spec, m)?,
        None => {
            let budget = step_budget()?;
            spec.build()?.start().advance(budget)
        }
    };
    let sums = state.partial_sums();
    let text = match format {
        Format::Json => json_text(&json!({
            "enum": spec.to_string(),
            "steps_used": state.steps_used(),
            "elements": state.elements(),
            "partial_sum": sums.last(),
            "tail_majorant": state.tail_majorant(),
            "excluded_mass": state.excluded_mass(),
        })),
        Format::Csv => {
            let mut s = String::from("j,element,partial_sum\n");
            for (j, (k, sum)) in state.elements().iter().zip(&sums[1..]).enumerate() {
                writeln!(s, "{},{k},{sum}", j + 1).expect("String write");
            }
            s
        }
    };
    emit(&a.output, &text)
}
