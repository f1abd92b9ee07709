use std::io::Write;
use std::path::Path;

use icbounds::genie::{eta1_range, eta2_range};
use icbounds::multiuser::find_rho;
use icbounds::optim::bisect_last_true;
use icbounds::{
    build_inner_region, build_outer_region, classify as classify_channel, db_to_linear, eval_constraint2,
    eval_constraint3, linear_to_db, optimize_constraint1, oracle_grid_feasibility, symmetric_noisy_threshold,
    symmetric_threshold, tdm_fdm_sum_rate, tin_rates, Execution, HalfPlane, MUserChannel, MUserVerdict, RatePoint,
    RateRegion, TwoUserChannel, VerdictKind,
};
use serde_json::{json, Value};

use crate::config::ChannelConfig;
use crate::output::{csv, number, svg, Series};
use crate::{ChannelArgs, ClassifyArgs, CliError, Metric, MurateArgs, RegionArgs, SweepArgs, SweepParam, ThresholdArgs};

impl ChannelArgs {
    fn scalars(&self) -> [Option<f64>; 4] {
        let gain = |g: Option<f64>| g.map(|g| if self.db { db_to_linear(g) } else { g });
        [gain(self.a), gain(self.b), self.p1, self.p2]
    }

    pub fn resolve(&self) -> Result<ChannelConfig, CliError> {
        if let Some(path) = &self.config {
            return ChannelConfig::load(path);
        }
        match self.scalars() {
            [Some(a), Some(b), Some(p1), Some(p2)] => Ok(ChannelConfig::TwoUser(TwoUserChannel::new(a, b, p1, p2)?)),
            _ => Err(CliError::BadInput("give --a, --b, --p1 and --p2, or --config".into())),
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::BadInput(format!("cannot write {}: {e}", path.display()))
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| io_error(path, e)),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Internal(format!("cannot write output: {e}"))),
    }
}

fn emit_json(value: &Value, stdout: &mut dyn Write) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
    text.push('\n');
    emit(&text, None, stdout)
}

fn kind_name(kind: VerdictKind) -> String {
    serde_json::to_value(kind).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
}

fn multi_user_report(ch: &MUserChannel, v: &MUserVerdict) -> Value {
    let kind = if v.feasible { VerdictKind::NoisyInterference } else { VerdictKind::Unknown };
    json!({
        "users": ch.users(),
        "kind": kind,
        "feasible": v.feasible,
        "sum_capacity": v.sum_capacity,
        "rho": v.rho,
        "slacks": v.slacks,
        "max_slack": v.max_slack,
        "provably_infeasible": v.provably_infeasible,
        "evaluations": v.evaluations,
    })
}

pub fn classify(args: &ClassifyArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let report = match args.channel.resolve()? {
        ChannelConfig::MultiUser(ch) if ch.users() != 2 => {
            let v = find_rho(&ch)?;
            multi_user_report(&ch, &v)
        }
        cfg => {
            let ch = cfg.two_user()?;
            let v = classify_channel(&ch);
            json!({
                "users": 2,
                "channel": { "a": ch.a(), "b": ch.b(), "p1": ch.p1(), "p2": ch.p2() },
                "kind": v.kind,
                "sum_capacity": v.sum_capacity,
                "certificate": v.certificate,
                "condition_slack": v.condition_slack,
                "noisy_slack": v.noisy_slack,
                "mixed_slack": v.mixed_slack,
            })
        }
    };
    emit_json(&report, stdout)
}

fn parse_constraints(path: &Path) -> Result<RateRegion, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::BadInput(format!("cannot read {}: {e}", path.display())))?;
    let rows: Vec<[f64; 3]> =
        serde_json::from_str(&text).map_err(|e| CliError::BadInput(format!("invalid constraints: {e}")))?;
    let planes = rows.iter().map(|&[c1, c2, v]| HalfPlane::new(c1, c2, v)).collect::<Result<Vec<_>, _>>()?;
    Ok(RateRegion::new(planes)?)
}

pub fn region(args: &RegionArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let mut curves: Vec<(&str, Vec<RatePoint>)> = Vec::new();
    if let Some(path) = &args.constraints {
        let region = parse_constraints(path)?;
        let pts = region.boundary_points().map_err(|e| CliError::BadInput(e.to_string()))?;
        curves.push(("custom", pts));
    } else {
        let ch = args.channel.resolve()?.two_user()?;
        let outer = build_outer_region(&ch, args.mu_grid, args.eta_grid)?;
        curves.push(("outer", outer.boundary_points()?));
        curves.push(("inner", build_inner_region(&ch).boundary_points()?));
    }
    let rows = curves
        .iter()
        .flat_map(|(kind, pts)| pts.iter().map(move |p| vec![number(p.r1), number(p.r2), (*kind).to_owned()]));
    emit(&csv(&["r1_bits", "r2_bits", "kind"], rows), args.out.as_deref(), stdout)?;
    if let Some(path) = &args.svg {
        let colors = ["#c0392b", "#2471a3"];
        let series: Vec<Series> = curves
            .iter()
            .zip(colors)
            .map(|((label, pts), color)| Series { label, color, points: pts })
            .collect();
        std::fs::write(path, svg(&series)).map_err(|e| io_error(path, e))?;
    }
    Ok(())
}

/// Smallest bound on `R1 + R2` from the genie families whose gain
/// requirements the channel meets, or `None` when none applies.
///
/// The correlated-genie bound at `μ = 1` needs both gains in `(0, 1)`. The
/// codeword-genie line with `η1 ≥ 1` bounds the sum rate on its own, and a
/// convex combination of it with the `η2 ≤ 1` line gives unit weights.
pub fn sum_upper_bound(ch: &TwoUserChannel) -> Result<Option<f64>, CliError> {
    let mut best: Option<f64> = None;
    let mut offer = |v: f64| best = Some(best.map_or(v, |b: f64| b.min(v)));
    if ch.in_weak_regime() {
        offer(optimize_constraint1(ch, 1.0)?.value);
    }
    if let Ok((eta1, _)) = eta1_range(ch) {
        let line1 = eval_constraint2(ch, eta1)?;
        offer(line1.value);
        if let Ok((_, eta2)) = eta2_range(ch) {
            let line2 = eval_constraint3(ch, eta2)?;
            let lambda = (1.0 - eta2) / (eta1 - eta2);
            offer(lambda * line1.value + (1.0 - lambda) * line2.value);
        }
    }
    Ok(best)
}

fn apply_param(base: [Option<f64>; 4], param: SweepParam, x: f64) -> Result<TwoUserChannel, CliError> {
    let [mut a, mut b, mut p1, mut p2] = base;
    match param {
        SweepParam::A => a = Some(x),
        SweepParam::B => b = Some(x),
        SweepParam::P1 => p1 = Some(x),
        SweepParam::P2 => p2 = Some(x),
        SweepParam::SymmetricA => (a, b) = (Some(x), Some(x)),
        SweepParam::SymmetricP => (p1, p2) = (Some(x), Some(x)),
    }
    match [a, b, p1, p2] {
        [Some(a), Some(b), Some(p1), Some(p2)] => Ok(TwoUserChannel::new(a, b, p1, p2)?),
        _ => Err(CliError::BadInput("the base channel is missing a parameter the sweep does not set".into())),
    }
}

fn metric_cell(ch: &TwoUserChannel, metric: Metric) -> Result<String, CliError> {
    Ok(match metric {
        Metric::SumUpper => sum_upper_bound(ch)?.map_or_else(|| "n/a".to_owned(), number),
        Metric::SumTin => number(tin_rates(ch).sum()),
        Metric::TdmBest => number(tdm_fdm_sum_rate(ch, ch.p1() / (ch.p1() + ch.p2()))?),
        Metric::Verdict => kind_name(classify_channel(ch).kind),
    })
}

fn param_name(param: SweepParam) -> &'static str {
    match param {
        SweepParam::A => "a",
        SweepParam::B => "b",
        SweepParam::P1 => "p1",
        SweepParam::P2 => "p2",
        SweepParam::SymmetricA => "symmetric_a",
        SweepParam::SymmetricP => "symmetric_p",
    }
}

fn metric_name(metric: Metric) -> &'static str {
    match metric {
        Metric::SumUpper => "sum_upper_bits",
        Metric::SumTin => "sum_tin_bits",
        Metric::TdmBest => "tdm_best_bits",
        Metric::Verdict => "verdict",
    }
}

/// `points` values from `from` to `to`, both included.
pub fn sweep_grid(from: f64, to: f64, points: usize, log: bool) -> Result<Vec<f64>, CliError> {
    if !(from.is_finite() && to.is_finite() && from < to) {
        return Err(CliError::BadInput(format!("sweep range needs from < to, got [{from}, {to}]")));
    }
    if points < 2 {
        return Err(CliError::BadInput(format!("sweep needs at least 2 points, got {points}")));
    }
    if log && from <= 0.0 {
        return Err(CliError::BadInput("a log-spaced sweep needs from > 0".into()));
    }
    let last = (points - 1) as f64;
    Ok((0..points)
        .map(|k| {
            let t = k as f64 / last;
            if k == 0 {
                from
            } else if k + 1 == points {
                to
            } else if log {
                (from.ln() + t * (to.ln() - from.ln())).exp()
            } else {
                from + t * (to - from)
            }
        })
        .collect())
}

pub fn sweep(args: &SweepArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let base = match &args.channel.config {
        Some(path) => {
            let ch = ChannelConfig::load(path)?.two_user()?;
            [Some(ch.a()), Some(ch.b()), Some(ch.p1()), Some(ch.p2())]
        }
        None => args.channel.scalars(),
    };
    let grid = sweep_grid(args.from, args.to, args.points, args.log)?;
    let cells = Execution::default().map(&grid, |&x| {
        let ch = apply_param(base, args.param, x)?;
        metric_cell(&ch, args.metric)
    });
    let mut rows = Vec::with_capacity(grid.len());
    for (x, cell) in grid.iter().zip(cells) {
        rows.push(vec![number(*x), cell?]);
    }
    let text = csv(&[param_name(args.param), metric_name(args.metric)], rows);
    emit(&text, args.out.as_deref(), stdout)
}

pub fn murate(args: &MurateArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let ch = args.channel.resolve()?.multi_user();
    let search = find_rho(&ch)?;
    let oracle = match args.oracle_resolution {
        Some(res) => Some(multi_user_report(&ch, &oracle_grid_feasibility(&ch, res)?)),
        None => None,
    };
    emit_json(&json!({ "search": multi_user_report(&ch, &search), "oracle": oracle }), stdout)
}

/// Largest uniform gain `c` with `symmetric_threshold(m, c) ≥ p`.
fn gain_threshold(m: usize, p: f64) -> Result<f64, CliError> {
    if m == 2 {
        return Ok(symmetric_noisy_threshold(p)?);
    }
    if !(p > 0.0 && p.is_finite()) {
        return Err(CliError::BadInput(format!("power {p} must be positive and finite")));
    }
    let hi = 1.0 / (4.0 * (m - 1) as f64);
    let meets = |c: f64| symmetric_threshold(m, c).map(|limit| limit >= p).unwrap_or(false);
    let mut lo = hi;
    while !meets(lo) {
        lo *= 0.5;
        if lo < 1e-300 {
            return Err(CliError::Internal("no positive gain meets the power".into()));
        }
    }
    Ok(bisect_last_true(meets, lo, hi, 1e-15))
}

pub fn threshold(args: &ThresholdArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    if args.m < 2 {
        return Err(CliError::BadInput(format!("thresholds need m >= 2, got {}", args.m)));
    }
    if args.p.is_none() && args.c.is_none() {
        return Err(CliError::BadInput("give --p, --c or both".into()));
    }
    let gain = args.p.map(|p| gain_threshold(args.m, p)).transpose()?;
    let power = args.c.map(|c| symmetric_threshold(args.m, c)).transpose()?;
    if args.json {
        return emit_json(
            &json!({
                "users": args.m,
                "power": args.p,
                "max_gain": gain,
                "max_gain_db": gain.map(linear_to_db),
                "gain": args.c,
                "max_power": power,
            }),
            stdout,
        );
    }
    let mut text = String::new();
    if let (Some(p), Some(g)) = (args.p, gain) {
        text.push_str(&format!("max gain at P={p}: {} ({:.4} dB)\n", number(g), linear_to_db(g)));
    }
    if let (Some(c), Some(pw)) = (args.c, power) {
        text.push_str(&format!("max power at c={c}: {}\n", number(pw)));
    }
    emit(&text, None, stdout)
}
