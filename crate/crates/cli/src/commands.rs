use std::fs;

use grouplab::census::{qc_census, CosetAutomaton, SubgroupConfig};
use grouplab::degenerate::{
    decompose, family_scan, free_product_sigma_limit, lambda_stats, mixing_decay, vc_supnorm_decay, Family,
    LambdaFamily, SplitRule,
};
use grouplab::measure::{simple_random_walk, FinMeasure, MeasureConfig};
use grouplab::report::{ExperimentReport, Table};
use grouplab::series::growth_report;
use grouplab::suite::{run_criterion, CRITERIA};
use grouplab::walk::{
    estimate_drift, estimate_entropy, fundamental_report, tree_harmonic, AsymptoticEstimate, Budgets, WalkConfig,
    TREE_TOLERANCE,
};
use grouplab::{Error, GroupConfig, GroupSpec};
use serde_json::Value;

use crate::output::{write_report, Plot};
use crate::{Cli, Command, Common, DegenerateMode, Failure, FamilyArg, EXIT_ACCEPTANCE, EXIT_CONFIG};

type CliResult<T> = std::result::Result<T, Failure>;

/// Inline JSON, or the contents of the named file.
fn load(arg: &str, what: &str) -> CliResult<Value> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| Failure { code: EXIT_CONFIG, message: format!("{what} file {arg}: {e}") })?
    };
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{what}: {e}")).into())
}

fn from_value<T: serde::de::DeserializeOwned>(v: Value, what: &str) -> CliResult<T> {
    serde_json::from_value(v).map_err(|e| Error::Config(format!("{what}: {e}")).into())
}

fn group(c: &Common) -> CliResult<(GroupSpec, Value)> {
    let arg = c.group.as_deref().ok_or_else(|| Error::Config("--group is required".into()))?;
    let v = load(arg, "group")?;
    let cfg: GroupConfig = from_value(v.clone(), "group")?;
    Ok((cfg.build()?, v))
}

fn measure(c: &Common, g: &GroupSpec) -> CliResult<(FinMeasure, Value)> {
    match c.measure.as_deref() {
        None => {
            let m = simple_random_walk(g);
            Ok((m.clone(), serde_json::to_value(m.to_config()).map_err(Error::from)?))
        }
        Some(arg) => {
            let v = load(arg, "measure")?;
            let cfg: MeasureConfig = from_value(v.clone(), "measure")?;
            Ok((cfg.build(g, c.cap)?, v))
        }
    }
}

fn budgets(c: &Common) -> Budgets {
    let d = Budgets::default();
    Budgets {
        n_max: c.nmax.unwrap_or(d.n_max),
        cap: c.cap,
        horizon: c.horizon,
        replicas: c.replicas,
        seed: c.seed,
        ..d
    }
}

/// Serde tag of a unit enum value.
fn tag(x: impl serde::Serialize) -> String {
    match serde_json::to_value(x) {
        Ok(Value::String(s)) => s,
        Ok(v) => v.to_string(),
        Err(e) => e.to_string(),
    }
}

fn estimate_table(name: &str, e: &AsymptoticEstimate) -> Table {
    let mut t = Table::new(name, &["n", "value", "std_error"]);
    for row in &e.table {
        t.push(vec![row.n.into(), row.value.into(), row.std_error.into()]);
    }
    t
}

fn finish(c: &Common, report: &ExperimentReport, plots: &[Plot]) -> CliResult<()> {
    for p in write_report(report, plots, &c.format, &c.out)? {
        println!("wrote {}", p.display());
    }
    Ok(())
}

pub fn run(cli: &Cli) -> CliResult<()> {
    let c = &cli.common;
    match &cli.command {
        Command::Growth => growth(c),
        Command::Enumerate => enumerate(c),
        Command::Walk { stride } => walk(c, *stride),
        Command::Entropy => entropy(c),
        Command::Ratio => ratio(c),
        Command::Census { window, qc_eps, qc_m } => census(c, *window, qc_eps.zip(*qc_m)),
        Command::Degenerate { mode, family, eps } => degenerate(c, *mode, *family, eps),
        Command::Suite { only } => suite(c, only),
    }
}

fn growth(c: &Common) -> CliResult<()> {
    let (g, gv) = group(c)?;
    let n_max = c.nmax.unwrap_or(12);
    let rep = growth_report(&g, n_max)?;
    let mut r = ExperimentReport::new("growth");
    r.echo("group", gv)?;
    r.echo("nmax", n_max)?;
    let mut rate = Table::new("rate", &["v", "z_star", "bracket_lo", "bracket_hi", "flag"]);
    rate.push(vec![
        rep.rate.v.into(),
        rep.rate.z_star.into(),
        rep.rate.bracket.0.into(),
        rep.rate.bracket.1.into(),
        rep.rate.flag.clone().into(),
    ]);
    let mut spheres = Table::new("spheres", &["n", "sphere", "ball", "log_rate"]);
    for row in &rep.table {
        spheres.push(vec![row.n.into(), (&row.sphere).into(), (&row.ball).into(), row.log_rate.into()]);
    }
    r.tables.extend([rate, spheres]);
    r.notes.push(format!("growth series {}", rep.series));
    println!("series {}", rep.series);
    println!("v = {:.10}  exp(-v) = {:.10}", rep.rate.v, rep.rate.z_star);
    finish(c, &r, &[Plot::new("spheres", "n", &["ball"]).log_y(), Plot::new("spheres", "n", &["log_rate"])])
}

fn enumerate(c: &Common) -> CliResult<()> {
    let (g, gv) = group(c)?;
    let n_max = c.nmax.unwrap_or(4);
    let ball = g.enumerate_ball(n_max, c.cap)?;
    let mut r = ExperimentReport::new("enumerate");
    r.echo("group", gv)?;
    r.echo("nmax", n_max)?;
    let mut counts = vec![0usize; n_max + 1];
    let mut elements = Table::new("ball", &["element", "length"]);
    for x in &ball {
        let len = g.word_length(x);
        counts[len] += 1;
        elements.push(vec![g.format_element(x).into(), len.into()]);
    }
    let mut spheres = Table::new("spheres", &["n", "count"]);
    for (n, k) in counts.iter().enumerate() {
        spheres.push(vec![n.into(), (*k).into()]);
    }
    r.tables.extend([spheres, elements]);
    println!("{} elements of length at most {n_max}", ball.len());
    finish(c, &r, &[Plot::new("spheres", "n", &["count"]).log_y()])
}

fn walk(c: &Common, stride: usize) -> CliResult<()> {
    let (g, gv) = group(c)?;
    let (m, mv) = measure(c, &g)?;
    let cfg = WalkConfig { horizon: c.horizon, replicas: c.replicas, seed: c.seed, stride };
    let drift = estimate_drift(&m, &cfg)?;
    let mut r = ExperimentReport::new("walk");
    r.seed = Some(c.seed);
    r.echo("group", gv)?;
    r.echo("measure", mv)?;
    r.echo("walk", cfg)?;
    let mut summary = Table::new("summary", &["drift", "std_error", "exact_drift", "exact_entropy"]);
    let exact = tree_harmonic(&m, TREE_TOLERANCE).ok();
    summary.push(vec![
        drift.value.into(),
        drift.std_error.into(),
        exact.as_ref().map(|t| t.drift).into(),
        exact.as_ref().map(|t| t.entropy).into(),
    ]);
    r.tables.extend([summary, estimate_table("drift", &drift)]);
    println!("drift = {:.6} +- {:.2e}", drift.value, drift.std_error);
    if let Some(t) = exact {
        println!("exact drift = {:.10}", t.drift);
    }
    finish(c, &r, &[Plot::new("drift", "n", &["value"])])
}

fn entropy(c: &Common) -> CliResult<()> {
    let (g, gv) = group(c)?;
    let (m, mv) = measure(c, &g)?;
    let n_max = c.nmax.unwrap_or(12);
    let e = estimate_entropy(&m, n_max, c.cap)?;
    let mut r = ExperimentReport::new("entropy");
    r.echo("group", gv)?;
    r.echo("measure", mv)?;
    r.echo("nmax", n_max)?;
    r.echo("cap", c.cap)?;
    let mut t = Table::new(
        "entropy",
        &["n", "support", "entropy", "entropy_rate", "entropy_increment", "moment", "moment_increment"],
    );
    for row in &e.rows {
        t.push(vec![
            row.n.into(),
            row.support.into(),
            row.entropy.into(),
            row.entropy_rate.into(),
            row.entropy_increment.into(),
            row.moment.into(),
            row.moment_increment.into(),
        ]);
    }
    let mut s = Table::new("summary", &["increment", "increment_change", "rate"]);
    s.push(vec![e.increment.value.into(), e.increment.std_error.into(), e.upper.value.into()]);
    r.tables.extend([s, t]);
    println!("entropy increment = {:.6}, H_n/n = {:.6}", e.increment.value, e.upper.value);
    finish(c, &r, &[Plot::new("entropy", "n", &["entropy_rate", "entropy_increment"])])
}

fn ratio(c: &Common) -> CliResult<()> {
    let (g, gv) = group(c)?;
    let (m, mv) = measure(c, &g)?;
    let b = budgets(c);
    let rep = fundamental_report(&m, &b)?;
    let mut r = ExperimentReport::new("ratio");
    r.seed = Some(c.seed);
    r.echo("group", gv)?;
    r.echo("measure", mv)?;
    r.echo("budgets", b)?;
    let mut t = Table::new(
        "ratio",
        &[
            "entropy",
            "entropy_se",
            "entropy_method",
            "drift",
            "drift_se",
            "drift_method",
            "v",
            "ratio",
            "ratio_uncertainty",
            "verdict",
        ],
    );
    t.push(vec![
        rep.entropy.value.into(),
        rep.entropy.std_error.into(),
        rep.entropy.method.tag().into(),
        rep.drift.value.into(),
        rep.drift.std_error.into(),
        rep.drift.method.tag().into(),
        rep.v.into(),
        rep.ratio.into(),
        rep.ratio_uncertainty.into(),
        rep.verdict.label().into(),
    ]);
    r.tables.extend([t, estimate_table("drift", &rep.drift), estimate_table("entropy", &rep.entropy)]);
    r.notes.extend(rep.notes.iter().cloned());
    match rep.ratio {
        Some(x) => println!("h/(l v) = {x:.5} ({})", rep.verdict.label()),
        None => println!("h/(l v) undefined ({})", rep.verdict.label()),
    }
    finish(c, &r, &[Plot::new("drift", "n", &["value"]), Plot::new("entropy", "n", &["value"])])
}

fn census(c: &Common, window: Option<usize>, qc: Option<(f64, usize)>) -> CliResult<()> {
    let (g, gv) = group(c)?;
    let arg = c.subgroup.as_deref().ok_or_else(|| Error::Config("--subgroup is required".into()))?;
    let sv = load(arg, "subgroup")?;
    let s = from_value::<SubgroupConfig>(sv.clone(), "subgroup")?.build(&g)?;
    let n_max = c.nmax.unwrap_or(20);
    let window = window.unwrap_or(n_max * s.max_step().max(1) as usize);
    let auto = CosetAutomaton::new(&s, window)?;
    let rows = auto.census(n_max)?;
    let mut r = ExperimentReport::new("census");
    r.echo("group", gv)?;
    r.echo("subgroup", sv)?;
    r.echo("nmax", n_max)?;
    r.echo("window", window)?;
    let mut t = Table::new("census", &["n", "count", "ball_count", "sphere", "ball", "density", "log_density"]);
    for row in &rows {
        t.push(vec![
            row.n.into(),
            (&row.count).into(),
            (&row.ball_count).into(),
            (&row.sphere).into(),
            (&row.ball).into(),
            row.density.into(),
            row.log_density.into(),
        ]);
    }
    r.tables.push(t);
    let perron = auto.perron();
    let mut p = Table::new("perron", &["spectral_radius", "log_spectral_radius", "iterations"]);
    p.push(vec![perron.spectral_radius.into(), perron.spectral_radius.ln().into(), perron.iterations.into()]);
    r.tables.push(p);
    let mut plots = vec![Plot::new("census", "n", &["density"]).log_y()];
    if let Some((eps, m)) = qc {
        r.echo("qc", serde_json::json!({ "eps": eps, "m": m }))?;
        let mut q = Table::new("qc", &["n", "members", "qc", "ball", "density", "log_density"]);
        for n in 0..=n_max {
            let row = qc_census(&s, eps, m, n)?;
            q.push(vec![
                row.n.into(),
                (&row.members).into(),
                (&row.qc).into(),
                (&row.ball).into(),
                row.density.into(),
                row.log_density.into(),
            ]);
        }
        r.tables.push(q);
        plots.push(Plot::new("qc", "n", &["density"]).log_y());
    }
    if let Some(last) = rows.last() {
        println!("n = {}: {} of {} elements in the subgroup (density {:.6e})", last.n, last.ball_count, last.ball, last.density);
    }
    finish(c, &r, &plots)
}

fn family(f: FamilyArg) -> Family {
    match f {
        FamilyArg::FreeAxis => Family::FreeAxis,
        FamilyArg::FreeProductSigma => Family::FreeProductSigma,
        FamilyArg::DirectProduct => Family::DirectProduct,
    }
}

fn degenerate(c: &Common, mode: DegenerateMode, fam: FamilyArg, eps: &[f64]) -> CliResult<()> {
    let b = budgets(c);
    let mut r = ExperimentReport::new(format!("degenerate-{}", mode_name(mode)));
    let mut plots = Vec::new();
    match mode {
        DegenerateMode::Split => {
            let (g, gv) = group(c)?;
            let (m, mv) = measure(c, &g)?;
            r.seed = Some(c.seed);
            r.echo("group", gv)?;
            r.echo("measure", mv)?;
            r.echo("budgets", b)?;
            let d = decompose(&m, &SplitRule::default())?;
            let mut t = Table::new("split", &["eps", "heavy", "lazy_recipe", "gap", "weak_gap", "reconstruction_error"]);
            t.push(vec![
                d.eps.into(),
                tag(d.heavy).into(),
                d.lazy_recipe.into(),
                d.gap.into(),
                d.weak_gap.into(),
                d.reconstruction_error(&m).into(),
            ]);
            r.tables.push(t);
            for (name, part) in [("alpha", &d.alpha), ("beta", &d.beta)] {
                let mut a = Table::new(name, &["element", "mass"]);
                for (x, p) in part.atoms() {
                    a.push(vec![g.format_element(x).into(), (*p).into()]);
                }
                r.tables.push(a);
            }
            println!("eps = {:.6}, heavy side {}", d.eps, tag(d.heavy));
            let stats = lambda_stats(&m, &LambdaFamily::new(d)?, &b)?;
            let mut l = Table::new(
                "lambda",
                &["drift_mu", "drift_lambda", "drift_gap", "drift_gap_se", "entropy_mu", "entropy_lambda", "mean_block", "mean_block_se"],
            );
            l.push(vec![
                stats.drift_mu.value.into(),
                stats.drift_lambda.value.into(),
                stats.drift_gap.into(),
                stats.drift_gap_se.into(),
                stats.entropy_mu.as_ref().map(|e| e.value).into(),
                stats.entropy_lambda.as_ref().map(|e| e.value).into(),
                stats.mean_block.into(),
                stats.mean_block_se.into(),
            ]);
            r.tables.push(l);
            r.notes.extend(stats.notes);
        }
        DegenerateMode::Scan => {
            let f = family(fam);
            r.seed = Some(c.seed);
            r.echo("family", f)?;
            r.echo("eps", eps)?;
            r.echo("budgets", b)?;
            let scan = family_scan(f, eps, &b);
            let mut t = Table::new("scan", &["eps", "entropy", "drift", "ratio", "ratio_over_v", "uncertainty", "error"]);
            for p in &scan.points {
                t.push(vec![
                    p.eps.into(),
                    p.entropy.as_ref().map(|e| e.value).into(),
                    p.drift.as_ref().map(|e| e.value).into(),
                    p.ratio.into(),
                    p.ratio_over_v.into(),
                    p.uncertainty.into(),
                    p.error.clone().into(),
                ]);
                println!("eps = {}: ratio {:?}", p.eps, p.ratio);
            }
            r.tables.push(t);
            r.echo("strictly_decreasing", scan.strictly_decreasing)?;
            plots.push(Plot::new("scan", "eps", &["ratio"]).log_x());
        }
        DegenerateMode::Limit => {
            if fam != FamilyArg::FreeProductSigma {
                return Err(Error::Config("limit mode is defined for --family free-product-sigma".into()).into());
            }
            let e = *eps.first().ok_or_else(|| Error::Config("--eps is empty".into()))?;
            r.seed = Some(c.seed);
            r.echo("eps", e)?;
            r.echo("budgets", b)?;
            let l = free_product_sigma_limit(e, &b)?;
            let mut t = Table::new(
                "limit",
                &["eps", "ratio_mu", "ratio_via_lambda_eps", "ratio_lambda", "relative_gap", "relative_gap_same_estimator"],
            );
            t.push(vec![
                l.eps.into(),
                l.ratio_mu.into(),
                l.ratio_via_lambda_eps.into(),
                l.ratio_lambda.into(),
                l.relative_gap.into(),
                l.relative_gap_same_estimator.into(),
            ]);
            r.tables.push(t);
            r.notes.extend(l.notes.iter().cloned());
            println!("ratio {:.5} vs limit {:.5} (gap {:.1}%)", l.ratio_mu, l.ratio_lambda, 100.0 * l.relative_gap);
        }
        DegenerateMode::Mixing => {
            let (g, gv) = group(c)?;
            let (m, mv) = measure(c, &g)?;
            r.echo("group", gv)?;
            r.echo("measure", mv)?;
            let n_max = c.nmax.unwrap_or(200);
            let d = mixing_decay(&m, n_max)?;
            let mut t = Table::new("mixing", &["n", "distance"]);
            for row in &d.rows {
                t.push(vec![row.n.into(), row.distance.into()]);
            }
            r.tables.push(t);
            if let Some(fit) = d.fit(n_max / 10, n_max) {
                let mut f = Table::new("fit", &["n_lo", "n_hi", "rho", "c"]);
                f.push(vec![fit.n_lo.into(), fit.n_hi.into(), fit.rho.into(), fit.c.into()]);
                r.tables.push(f);
                println!("rho = {:.6}", fit.rho);
            }
            plots.push(Plot::new("mixing", "n", &["distance"]).log_y());
        }
        DegenerateMode::Supnorm => {
            let (g, gv) = group(c)?;
            let (m, mv) = measure(c, &g)?;
            r.echo("group", gv)?;
            r.echo("measure", mv)?;
            let n_max = c.nmax.unwrap_or(1000);
            let n_values: Vec<usize> = (1..=n_max).collect();
            let d = vc_supnorm_decay(&m, &n_values)?;
            let mut t = Table::new("supnorm", &["n", "sup", "sqrt_n_sup"]);
            for row in &d.rows {
                t.push(vec![row.n.into(), row.sup.into(), row.sqrt_n_sup.into()]);
            }
            r.tables.push(t);
            r.notes.extend(d.notes.iter().cloned());
            if let Some(last) = d.rows.last() {
                println!("n = {}: sqrt(n) sup = {:.6}", last.n, last.sqrt_n_sup);
            }
            plots.push(Plot::new("supnorm", "n", &["sqrt_n_sup"]).log_x());
        }
    }
    finish(c, &r, &plots)
}

fn mode_name(mode: DegenerateMode) -> &'static str {
    match mode {
        DegenerateMode::Split => "split",
        DegenerateMode::Scan => "scan",
        DegenerateMode::Limit => "limit",
        DegenerateMode::Mixing => "mixing",
        DegenerateMode::Supnorm => "supnorm",
    }
}

fn suite(c: &Common, only: &[u8]) -> CliResult<()> {
    let ids: Vec<u8> = if !only.is_empty() {
        only.to_vec()
    } else {
        CRITERIA.iter().filter(|s| s.quick || !c.quick).map(|s| s.id).collect()
    };
    let mut summary = ExperimentReport::new("suite");
    summary.echo("criteria", &ids)?;
    let mut t = Table::new("summary", &["id", "title", "passed", "runtime_secs", "budget_secs"]);
    let mut failed = 0;
    for id in ids {
        let spec = grouplab::suite::criterion(id)?;
        let result = run_criterion(id, c.timing)?;
        println!("{}", result.line());
        failed += !result.passed as usize;
        write_report(&result.report, &[], &c.format, &c.out)?;
        t.push(vec![
            (id as i64).into(),
            result.title.clone().into(),
            result.passed.into(),
            c.timing.then_some(result.runtime_secs).into(),
            spec.budget_secs.into(),
        ]);
        summary.verdict(&format!("criterion {id}"), result.passed, &result.title);
    }
    summary.tables.push(t);
    write_report(&summary, &[], &c.format, &c.out)?;
    if failed > 0 {
        println!("{failed} criteria failed");
        return Err(Failure { code: EXIT_ACCEPTANCE, message: format!("{failed} acceptance criteria failed") });
    }
    println!("all criteria passed");
    Ok(())
}
