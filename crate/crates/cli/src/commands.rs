//! Subcommand implementations. Each builds its complete output before
//! anything is printed, so a failing run emits diagnostics only.

use rayon::prelude::*;

use spectral_phase::analysis::{count_bound_check, pp_nonempty_certificate, witness_report};
use spectral_phase::asymptotics::{ba_coefficients, descriptor, Variant, DEFAULT_VARIANT_TOL};
use spectral_phase::degenerate::{DegenerateSpec, DegenerateVariant};
use spectral_phase::eigensolve::{count_below, truncation};
use spectral_phase::model::{bands, classify, discriminant, ModulationParams, RegionTag};
use spectral_phase::recurrence::{backward_minimal, forward_solve, SolutionTrace};
use spectral_phase::{Error, Result};

use crate::output::{csv_number, JsonObject};

/// Relative agreement required between consecutive downward runs.
const BACKWARD_REL_TOL: f64 = 1e-10;

/// Matches the bisection split cap of the eigenvalue solver.
const MAX_BISECT: usize = 200;

/// Axis points allowed in one grid sweep.
const MAX_GRID_POINTS: usize = 20_001;

fn region_name(tag: RegionTag) -> &'static str {
    match tag {
        RegionTag::PureAc => "pure-ac",
        RegionTag::CriticalB => "critical-b",
        RegionTag::CriticalC => "critical-c",
        RegionTag::Discrete => "discrete",
        RegionTag::Degenerate => "degenerate",
    }
}

fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|_| Error::InvalidInput("could not build the worker thread pool"))
}

pub fn classify_cmd(c1: f64, c2: f64, tol: f64) -> Result<String> {
    let params = ModulationParams::new(c1, c2)?;
    let region = classify(&params, tol)?;
    let mut obj = JsonObject::new().string("region", region_name(region.tag));
    obj = match discriminant(&params, 0.0) {
        Ok(d0) => obj.number("d0", d0),
        Err(_) => obj.null("d0"),
    };
    obj = match ba_coefficients(&params, 0.0) {
        Ok(coeffs) => obj.number("a0", coeffs.a0),
        Err(_) => obj.null("a0"),
    };
    obj = if params.is_degenerate() {
        obj.null("bands")
    } else {
        obj.numbers("bands", &bands(&params).edges())
    };
    let as_pair = |iv: spectral_phase::model::Interval<f64>| (iv.lo, iv.hi);
    Ok(obj
        .optional_interval("ac_interval", region.ac_interval.map(as_pair))
        .optional_interval("pp_interval", region.pp_interval.map(as_pair))
        .finish())
}

fn trace_csv(trace: &SolutionTrace<f64>) -> String {
    let mut out = String::from("n,sign,log10_abs\n");
    for (i, v) in trace.values().iter().enumerate() {
        let log10_abs = v.ln_abs() / std::f64::consts::LN_10;
        out.push_str(&format!("{},{},{}\n", i + 1, v.sign(), csv_number(log10_abs)));
    }
    out
}

pub fn solve_cmd(
    c1: f64,
    c2: f64,
    lambda: f64,
    n: usize,
    forward: bool,
    u1: f64,
    u2: f64,
) -> Result<String> {
    let params = ModulationParams::new(c1, c2)?;
    let trace = if forward {
        forward_solve(&params, lambda, u1, u2, n)?
    } else {
        backward_minimal(&params, lambda, n, BACKWARD_REL_TOL)?
    };
    Ok(trace_csv(&trace))
}

pub fn asym_cmd(c1: f64, c2: f64, lambda: f64) -> Result<String> {
    let params = ModulationParams::new(c1, c2)?;
    let desc = descriptor(&params, lambda, DEFAULT_VARIANT_TOL)?;
    Ok(JsonObject::new()
        .string(
            "variant",
            match desc.variant {
                Variant::PowerLaw => "power-law",
                Variant::ExpSqrt => "exp-sqrt",
            },
        )
        .complex("alpha_plus", desc.alpha_plus.re, desc.alpha_plus.im)
        .complex("alpha_minus", desc.alpha_minus.re, desc.alpha_minus.im)
        .complex("beta_plus", desc.beta_plus.re, desc.beta_plus.im)
        .complex("beta_minus", desc.beta_minus.re, desc.beta_minus.im)
        .optional_complex("delta_plus", desc.delta_plus.map(|z| (z.re, z.im)))
        .complex("coupling_plus", desc.coupling_plus.re, desc.coupling_plus.im)
        .complex(
            "coupling_minus",
            desc.coupling_minus.re,
            desc.coupling_minus.im,
        )
        .boolean("subordinate_exists", desc.subordinate_exists)
        .finish())
}

pub fn spectrum_cmd(
    c1: f64,
    c2: f64,
    size: usize,
    lo: f64,
    hi: f64,
    tol: f64,
    threads: Option<usize>,
) -> Result<String> {
    let params = ModulationParams::new(c1, c2)?;
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::NonFinite("interval endpoint"));
    }
    if lo > hi {
        return Err(Error::InvalidInput("interval must satisfy lo <= hi"));
    }
    let mut out = String::from("lambda\n");
    if lo == hi {
        return Ok(out);
    }
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidInput("bisection tolerance must be > 0"));
    }
    let trunc = truncation(&params, size)?;
    let base = count_below(&trunc, lo);
    let top = count_below(&trunc, hi);
    // Per-index bisection in the fixed bracket [lo, hi): identical results
    // for every thread count, ordered by eigenvalue index.
    let values: Vec<f64> = pool(threads)?.install(|| {
        (base..top)
            .into_par_iter()
            .map(|j| {
                let mut a = lo;
                let mut b = hi;
                for _ in 0..MAX_BISECT {
                    if b - a <= tol {
                        break;
                    }
                    let mid = (a + b) / 2.0;
                    if mid <= a || mid >= b {
                        break;
                    }
                    if count_below(&trunc, mid) <= j {
                        a = mid;
                    } else {
                        b = mid;
                    }
                }
                (a + b) / 2.0
            })
            .collect()
    });
    for v in values {
        out.push_str(&csv_number(v));
        out.push('\n');
    }
    Ok(out)
}

pub fn phase_diagram_cmd(
    min: f64,
    max: f64,
    step: f64,
    tol: f64,
    threads: Option<usize>,
) -> Result<String> {
    if !min.is_finite() || !max.is_finite() || !step.is_finite() {
        return Err(Error::NonFinite("grid bounds"));
    }
    if !(step > 0.0) {
        return Err(Error::InvalidInput("grid step must be > 0"));
    }
    if min > max {
        return Err(Error::InvalidInput("grid needs min <= max"));
    }
    let cells = ((max - min) / step + 1e-9).floor();
    if !(cells >= 0.0) || cells >= MAX_GRID_POINTS as f64 {
        return Err(Error::InvalidInput("grid has too many points"));
    }
    let coords: Vec<f64> = (0..=cells as usize).map(|i| min + step * i as f64).collect();
    let rows: Result<Vec<String>> = pool(threads)?.install(|| {
        coords
            .par_iter()
            .map(|&c1| {
                let mut block = String::new();
                for &c2 in &coords {
                    let region = classify(&ModulationParams::new(c1, c2)?, tol)?;
                    block.push_str(&format!(
                        "{},{},{}\n",
                        csv_number(c1),
                        csv_number(c2),
                        region.tag.code()
                    ));
                }
                Ok(block)
            })
            .collect()
    });
    let mut out = String::from("c1,c2,region_code\n");
    for block in rows? {
        out.push_str(&block);
    }
    Ok(out)
}

pub fn witness_cmd(c1: f64, c2: f64, n_max: usize) -> Result<String> {
    let params = ModulationParams::new(c1, c2)?;
    let found = pp_nonempty_certificate(&params, n_max)?;
    // Report the certifying depth, or the deepest tested one when the
    // search came up empty.
    let depth = found.unwrap_or_else(|| {
        let mut last = 2;
        while last * 2 <= n_max {
            last *= 2;
        }
        last
    });
    let report = witness_report(&params, depth)?;
    Ok(JsonObject::new()
        .optional_integer("found_n", found)
        .number("lhs", report.lhs)
        .number("rhs", report.rhs)
        .finish())
}

pub fn count_cmd(c1: f64, c2: f64, eps: f64, size: usize) -> Result<String> {
    let params = ModulationParams::new(c1, c2)?;
    let report = count_bound_check(&params, eps, size)?;
    Ok(JsonObject::new()
        .integer("count", report.count)
        .number("bound", report.bound)
        .boolean("ok", report.within)
        .finish())
}

pub fn degenerate_cmd(c: f64, c1_zero: bool, n_max: usize) -> Result<String> {
    let variant = if c1_zero {
        DegenerateVariant::C1Zero
    } else {
        DegenerateVariant::C2Zero
    };
    let spec = DegenerateSpec::new(variant, c)?;
    let mut out = String::from("lambda\n");
    for v in spec.spectrum(n_max)? {
        out.push_str(&csv_number(v));
        out.push('\n');
    }
    Ok(out)
}
