use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use clap::{Args, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tailgf::limits::{
    critical_expansion, near_critical_params, survival_expansion, termination_limit, w_transform,
    w_transform_classical, yaglom as yaglom_law, NearCriticalFamily,
};
use tailgf::sim::{
    estimate_killed, estimate_pgf, estimate_w, simulate as run_sim, SimConfig, State,
};
use tailgf::verify::{run_suite, Suite};
use tailgf::{
    f_closed, f_implicit, f_ode, f_ode_with_tol, profile as law_profile, tail_gf, OffspringLaw,
    PsiKernel,
};

use crate::output::{num, Output, Table};
use crate::{LawArg, SpecError};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_law(arg: &LawArg) -> Result<OffspringLaw> {
    let text = read(&arg.law)?;
    OffspringLaw::from_json(&text).with_context(|| format!("parsing law {}", arg.law.display()))
}

fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

pub fn eval(law: &LawArg, s: &[f64], points: &[f64]) -> Result<Output> {
    let law = load_law(law)?;
    if !points.is_empty() {
        let value = tail_gf(&law, points)?;
        return Ok(Output::record(
            json!({"points": nums(points), "value": num(value)}),
        ));
    }
    if s.is_empty() {
        return Err(SpecError("eval needs --s or --points".into()).into());
    }
    let mut table = Table::new(&["s", "value"]);
    for &x in s {
        table.push(vec![num(x), num(law.evaluate(x)?)]);
    }
    Ok(Output::grid(table))
}

pub fn profile(law: &LawArg) -> Result<Output> {
    let law = load_law(law)?;
    Ok(Output::record(serde_json::to_value(law_profile(&law)?)?))
}

#[derive(Subcommand, Debug)]
pub enum PsiAction {
    /// psi at the points --s.
    Eval {
        #[command(flatten)]
        law: LawArg,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        s: Vec<f64>,
    },
    /// int_a^b psi.
    Integral {
        #[command(flatten)]
        law: LawArg,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
    },
}

pub fn psi(action: PsiAction) -> Result<Output> {
    match action {
        PsiAction::Eval { law, s } => {
            let kernel = PsiKernel::new(&load_law(&law)?)?;
            let mut table = Table::new(&["x", "psi"]);
            for &x in &s {
                table.push(vec![num(x), num(kernel.psi(x)?)]);
            }
            Ok(Output::grid(table))
        }
        PsiAction::Integral { law, a, b } => {
            let kernel = PsiKernel::new(&load_law(&law)?)?;
            let value = kernel.integral(a, b)?;
            Ok(Output::record(
                json!({"a": num(a), "b": num(b), "value": num(value)}),
            ))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Ode,
    Implicit,
    Closed,
    All,
}

fn result_json(r: &tailgf::TransitionResult) -> Value {
    json!({
        "value": num(r.value),
        "method": serde_json::to_value(r.method).unwrap_or(Value::Null),
        "err_estimate": num(r.err_estimate),
    })
}

pub fn transition(
    law: &LawArg,
    ts: &[f64],
    ss: &[f64],
    method: MethodArg,
    tol: f64,
) -> Result<Output> {
    let law = load_law(law)?;
    let kernel = match method {
        MethodArg::Implicit | MethodArg::All => Some(PsiKernel::new(&law)?),
        _ => None,
    };
    let mut results = Vec::new();
    for &t in ts {
        for &s in ss {
            let mut push = |r: tailgf::TransitionResult| results.push((t, s, r));
            match method {
                MethodArg::Ode => push(f_ode_with_tol(&law, t, s, tol)?),
                MethodArg::Implicit => push(f_implicit(kernel.as_ref().unwrap(), t, s)?),
                MethodArg::Closed => push(f_closed(&law, t, s)?.ok_or_else(|| {
                    SpecError(format!(
                        "no closed form for the {} family",
                        law.family_name()
                    ))
                })?),
                MethodArg::All => {
                    push(f_ode_with_tol(&law, t, s, tol)?);
                    push(f_implicit(kernel.as_ref().unwrap(), t, s)?);
                    if let Some(r) = f_closed(&law, t, s)? {
                        push(r);
                    }
                }
            }
        }
    }
    let mut table = Table::new(&["t", "s", "method", "value", "err_estimate"]);
    for (t, s, r) in &results {
        let method = serde_json::to_value(r.method)?;
        table.push(vec![
            num(*t),
            num(*s),
            method,
            num(r.value),
            num(r.err_estimate),
        ]);
    }
    if results.len() == 1 {
        return Ok(Output::both(result_json(&results[0].2), table));
    }
    Ok(Output::grid(table))
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub law: LawArg,
    #[arg(long, default_value_t = 10_000)]
    pub replicates: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Snapshot times.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub times: Vec<f64>,
    /// Run length; defaults to the last snapshot time, or until every run stops.
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Record W = Z_H e^{-(m1 - 1) H}.
    #[arg(long)]
    pub w: bool,
    #[arg(long, default_value_t = 1)]
    pub ancestors: u64,
    #[arg(long, default_value_t = tailgf::sim::DEFAULT_MAX_POPULATION)]
    pub max_population: u64,
    /// Points for the pgf estimates in the summary.
    #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "0,0.5,1")]
    pub s: Vec<f64>,
    /// With --format csv, also write the JSON summary here.
    #[arg(long)]
    pub summary: Option<std::path::PathBuf>,
}

fn state_json(s: State) -> Value {
    match s {
        State::Count(z) => json!(z),
        State::Delta => json!("delta"),
        State::Cap => json!("cap"),
    }
}

pub fn simulate(args: &SimulateArgs) -> Result<Output> {
    let law = load_law(&args.law)?;
    let mut times = args.times.clone();
    times.sort_by(f64::total_cmp);
    let mut config = SimConfig::new(law, args.replicates, args.seed).with_times(&times);
    if let Some(h) = args.horizon {
        config.horizon = h;
    }
    config.record_w = args.w;
    config.ancestors = args.ancestors;
    config.max_population = args.max_population;
    let outcomes = run_sim(&config)?;

    let mut snapshots = Vec::new();
    for (i, &t) in times.iter().enumerate() {
        let count = |pred: fn(&State) -> bool| outcomes.iter().filter(|o| pred(&o.z_at[i])).count();
        let mut pgf = Vec::new();
        for &s in &args.s {
            let e = estimate_pgf(&config, &outcomes, t, s)?;
            pgf.push(
                json!({"s": num(s), "mean": num(e.mean), "std_error": num(e.std_error), "n": e.n}),
            );
        }
        snapshots.push(json!({
            "t": num(t),
            "extinct": count(|s| *s == State::Count(0)),
            "killed": count(|s| *s == State::Delta),
            "capped": count(|s| *s == State::Cap),
            "pgf": pgf,
        }));
    }
    let killed = estimate_killed(&outcomes);
    let mut summary = json!({
        "replicates": config.replicates,
        "seed": config.seed,
        "horizon": num(config.horizon),
        "killed_before_horizon": serde_json::to_value(killed)?,
        "snapshots": snapshots,
    });
    if config.record_w {
        let w = estimate_w(&config, &outcomes)?;
        summary["w"] = json!({
            "mean": serde_json::to_value(w.mean)?,
            "second_moment": serde_json::to_value(w.second_moment)?,
            "zero_fraction": serde_json::to_value(w.zero_fraction)?,
        });
    }

    let mut columns = vec![
        "replicate".to_string(),
        "t0".into(),
        "t1".into(),
        "capped".into(),
        "w".into(),
    ];
    columns.extend(times.iter().map(|t| format!("z@{t}")));
    let mut table = Table {
        columns,
        rows: Vec::with_capacity(outcomes.len()),
    };
    for (i, o) in outcomes.iter().enumerate() {
        let opt = |x: Option<f64>| x.map_or(Value::Null, num);
        let mut row = vec![
            json!(i),
            opt(o.t0),
            opt(o.t1),
            json!(o.capped),
            opt(o.w_sample),
        ];
        row.extend(o.z_at.iter().map(|&s| state_json(s)));
        table.push(row);
    }
    if let Some(path) = &args.summary {
        fs::write(path, serde_json::to_string_pretty(&summary)?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(Output::both(summary, table))
}

pub fn yaglom(law: &LawArg, n: usize) -> Result<Output> {
    let law = load_law(law)?;
    let y = yaglom_law(&PsiKernel::new(&law)?, n)?;
    let mut table = Table::new(&["k", "pi", "tail_approx"]);
    for k in 1..=n {
        let approx = y.tail.map_or(Value::Null, |tail| num(tail.approx(k)));
        table.push(vec![json!(k), num(y.pi(k).unwrap_or(f64::NAN)), approx]);
    }
    Ok(Output::both(serde_json::to_value(&y)?, table))
}

pub fn survival(law: &LawArg, ts: &[f64]) -> Result<Output> {
    let law = load_law(law)?;
    let kernel = PsiKernel::new(&law)?;
    let mut table = Table::new(&["t", "leading", "second", "expansion", "exact"]);
    for &t in ts {
        let e = survival_expansion(&kernel, t)?;
        let exact = f_ode(&law, t, 1.0)?.value - f_ode(&law, t, 0.0)?.value;
        table.push(vec![
            num(t),
            num(e.leading),
            num(e.second),
            num(e.value),
            num(exact),
        ]);
    }
    Ok(Output::grid(table))
}

pub fn critical(law: &LawArg, n: usize, ts: &[f64]) -> Result<Output> {
    let law = load_law(law)?;
    let e = critical_expansion(&PsiKernel::new(&law)?, n)?;
    let mut json = serde_json::to_value(&e)?;
    json["survival_coefficients"] = nums(&e.survival_coefficients());
    json["constant_term"] = num(e.constant_term(0.0)?);
    if ts.is_empty() {
        let mut table = Table::new(&["k", "h"]);
        for (i, &h) in e.h.iter().enumerate() {
            table.push(vec![json!(i + 1), num(h)]);
        }
        return Ok(Output::both(json, table));
    }
    let mut table = Table::new(&["t", "expansion", "exact"]);
    for &t in ts {
        let exact = 1.0 - f_ode(&law, t, 0.0)?.value;
        table.push(vec![num(t), num(e.one_minus_f(t, 0.0)?), num(exact)]);
    }
    json["survival"] = table.to_json();
    Ok(Output::both(json, table))
}

pub fn wlimit(law: &LawArg, rhos: &[f64], classical: bool) -> Result<Output> {
    let law = load_law(law)?;
    let kernel = PsiKernel::new(&law)?;
    let w = w_transform(&kernel)?;
    let (m1, m2) = w.moments()?;
    let mut table = Table::new(&["rho", "eta", "conditional", "eta_classical"]);
    for &rho in rhos {
        let cls = if classical {
            num(w_transform_classical(&law, kernel.profile(), rho)?)
        } else {
            Value::Null
        };
        let cond = if w.degenerate {
            Value::Null
        } else {
            num(w.conditional(rho)?)
        };
        table.push(vec![num(rho), num(w.eta(rho)?), cond, cls]);
    }
    let json = json!({
        "q": num(w.q),
        "gamma": num(w.gamma),
        "degenerate": w.degenerate,
        "mean": num(m1),
        "second_moment": num(m2),
        "large_rho_constant": num(w.large_rho_constant()?),
        "grid": table.to_json(),
    });
    Ok(Output::both(json, table))
}

pub fn termination(family: &Path, eps: f64, us: &[f64]) -> Result<Output> {
    let text = read(family)?;
    let family = NearCriticalFamily::from_json(&text)
        .with_context(|| format!("parsing family {}", family.display()))?;
    let params = near_critical_params(&family, eps)?;
    let lim = termination_limit(&family, eps)?;
    let mut table = Table::new(&["u", "time", "cdf"]);
    for &u in us {
        table.push(vec![num(u), num(lim.time(u)), num(lim.cdf(u)?)]);
    }
    let json = json!({
        "regime": serde_json::to_value(family.regime())?,
        "params": serde_json::to_value(params)?,
        "limit": serde_json::to_value(&lim)?,
        "grid": table.to_json(),
    });
    Ok(Output::both(json, table))
}

pub fn verify(name: &str) -> Result<(Output, bool)> {
    let suites: Vec<Suite> = if name == "all" {
        Suite::ALL.to_vec()
    } else {
        let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
        vec![Suite::from_name(name).ok_or_else(|| {
            SpecError(format!(
                "unknown suite {name:?}; expected all or one of {names:?}"
            ))
        })?]
    };
    let mut table = Table::new(&["criterion", "suite", "passed", "checks", "seconds"]);
    let mut reports = Vec::new();
    let mut ok = true;
    for suite in suites {
        let r = run_suite(suite);
        ok &= r.passed();
        eprintln!(
            "criterion {:>2} {:<26} {}",
            r.id,
            r.name,
            if r.passed() { "pass" } else { "FAIL" }
        );
        table.push(vec![
            json!(r.id),
            json!(r.name),
            json!(r.passed()),
            json!(r.checks.len()),
            num(r.seconds),
        ]);
        let mut value = serde_json::to_value(&r)?;
        value["passed"] = json!(r.passed());
        reports.push(value);
    }
    Ok((Output::both(Value::Array(reports), table), ok))
}
