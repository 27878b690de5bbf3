//! Registry of the acceptance experiments. Each criterion produces an
//! [`ExperimentReport`] whose verdict lines are the individual checks.

use std::collections::HashSet;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::census::{qc_census, semigroup_density, CosetAutomaton, SemigroupSlices, StallingsGraph, SubgroupSpec};
use crate::degenerate::{
    family_scan, free_product_sigma_limit, lambda_stats, mixing_decay, vc_supnorm_decay, decompose, Family,
    LambdaFamily, SplitRule,
};
use crate::error::{Error, Result};
use crate::group::{Element, FiniteGroup, GroupSpec, Letter, Word};
use crate::measure::{
    check_entropy_lower_bound, critical_product, interpolation, lazy_mix, simple_random_walk, slice_elements,
    slice_uniform, FinMeasure, DEFAULT_CAP,
};
use crate::report::{ExperimentReport, Table};
use crate::series::group_series;
use crate::walk::{
    balls_to_v_experiment, convolution_series, estimate_drift, estimate_entropy, fundamental_report, tree_harmonic,
    Budgets, WalkConfig, TREE_TOLERANCE,
};

/// Seed used by every randomized criterion.
pub const SUITE_SEED: u64 = 20_240_917;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriterionSpec {
    pub id: u8,
    pub title: &'static str,
    /// Runtime limit in seconds, if the criterion has one.
    pub budget_secs: Option<f64>,
    /// Part of `suite --quick`.
    pub quick: bool,
}

pub const CRITERIA: [CriterionSpec; 10] = [
    CriterionSpec { id: 1, title: "growth exactness", budget_secs: Some(1.0), quick: true },
    CriterionSpec { id: 2, title: "designed equality h = lv", budget_secs: Some(60.0), quick: true },
    CriterionSpec { id: 3, title: "equality case on trees", budget_secs: Some(300.0), quick: false },
    CriterionSpec { id: 4, title: "uniform balls approach v", budget_secs: Some(600.0), quick: false },
    CriterionSpec { id: 5, title: "subgroup and quasi-convex densities", budget_secs: Some(300.0), quick: true },
    CriterionSpec { id: 6, title: "subsemigroup oscillation", budget_secs: Some(60.0), quick: true },
    CriterionSpec { id: 7, title: "slice measures", budget_secs: Some(60.0), quick: true },
    CriterionSpec { id: 8, title: "mixing and sup-norm decay", budget_secs: Some(60.0), quick: true },
    CriterionSpec { id: 9, title: "degenerating families", budget_secs: Some(900.0), quick: false },
    CriterionSpec { id: 10, title: "property suites", budget_secs: None, quick: true },
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub title: String,
    pub passed: bool,
    pub runtime_secs: f64,
    pub within_budget: bool,
    pub report: ExperimentReport,
}

impl CriterionResult {
    /// One summary line, e.g. `PASS  1 growth exactness (0.01 s)`.
    pub fn line(&self) -> String {
        let mut s = format!(
            "{} {:>2} {} ({:.2} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.runtime_secs
        );
        if !self.within_budget {
            s.push_str(" [over runtime budget]");
        }
        for v in self.report.verdicts.iter().filter(|v| !v.passed) {
            s.push_str(&format!("\n       {}: {}", v.name, v.detail));
        }
        s
    }
}

pub fn criterion(id: u8) -> Result<&'static CriterionSpec> {
    CRITERIA
        .iter()
        .find(|c| c.id == id)
        .ok_or_else(|| Error::Config(format!("no acceptance criterion {id}")))
}

/// Runs one criterion. Errors inside the experiment become a failed verdict.
pub fn run_criterion(id: u8, timing: bool) -> Result<CriterionResult> {
    let spec = criterion(id)?;
    let start = Instant::now();
    let mut report = ExperimentReport::new(format!("acceptance-{id}"));
    let outcome = match id {
        1 => growth_exactness(&mut report),
        2 => designed_equality(&mut report),
        3 => trees(&mut report),
        4 => balls(&mut report),
        5 => densities(&mut report),
        6 => semigroup(&mut report),
        7 => slices(&mut report),
        8 => decays(&mut report),
        9 => degenerating(&mut report),
        10 => properties(&mut report),
        _ => unreachable!("criterion ids are checked"),
    };
    if let Err(e) = outcome {
        report.verdict("run", false, format!("error: {e}"));
    }
    let runtime_secs = start.elapsed().as_secs_f64();
    if timing {
        report.wall_time = Some(runtime_secs);
    }
    let within_budget = spec.budget_secs.is_none_or(|b| runtime_secs <= b);
    Ok(CriterionResult {
        id,
        title: spec.title.to_string(),
        passed: report.passed() && within_budget,
        runtime_secs,
        within_budget,
        report,
    })
}

/// All criteria, or the quick subset.
pub fn run_suite(quick: bool, timing: bool) -> Vec<CriterionResult> {
    CRITERIA
        .iter()
        .filter(|c| c.quick || !quick)
        .map(|c| run_criterion(c.id, timing).expect("registered criterion"))
        .collect()
}

fn close(x: f64, want: f64, tol: f64) -> bool {
    (x - want).abs() <= tol
}

fn z2_star(n: usize) -> Result<GroupSpec> {
    GroupSpec::free_product(vec![GroupSpec::cyclic(2)?, GroupSpec::cyclic(n)?])
}

fn growth_exactness(r: &mut ExperimentReport) -> Result<()> {
    let f2 = GroupSpec::free(2)?;
    let v = group_series(&f2).growth_rate()?.v;
    r.verdict("v(F2) = log 3", close(v, 3f64.ln(), 1e-10), format!("v = {v:.15}"));
    let z = group_series(&z2_star(4)?).growth_rate()?.z_star;
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    r.verdict("exp(-v)(Z/2*Z/4) = (sqrt5-1)/2", close(z, golden, 1e-10), format!("z* = {z:.15}"));

    let mut t = Table::new("spheres", &["group", "n", "series", "enumerated"]);
    let mut all_match = true;
    for (name, g) in [("F2", f2), ("Z/2*Z/4", z2_star(4)?), ("Z/2*Z/3", z2_star(3)?), ("Z/2*Z/2", z2_star(2)?)] {
        let series = group_series(&g).sphere_counts(9)?;
        for (n, c) in series.iter().enumerate() {
            let k = g.enumerate_sphere(n, DEFAULT_CAP)?.len();
            all_match &= *c == BigUint::from(k);
            t.push(vec![name.into(), n.into(), c.into(), k.into()]);
        }
    }
    r.verdict("series = enumeration, n <= 8", all_match, "four groups");
    let first: Vec<BigUint> = group_series(&z2_star(4)?).sphere_counts(5)?;
    let want: Vec<BigUint> = [1u32, 3, 5, 8, 13].iter().map(|&x| BigUint::from(x)).collect();
    r.verdict("Z/2*Z/4 spheres 1,3,5,8,13", first == want, format!("{first:?}"));
    r.tables.push(t);
    Ok(())
}

fn designed_equality(r: &mut ExperimentReport) -> Result<()> {
    let g = z2_star(4)?;
    let v = group_series(&g).growth_rate()?.v;
    let mu = critical_product(&g)?;
    r.echo("group", "Z/2 * Z/4")?;
    let total = mu.total_mass();
    r.verdict("total mass 1", close(total, 1.0, 1e-10), format!("{total:.15}"));
    let mut worst: f64 = 0.0;
    let mut t = Table::new("powers", &["n", "support", "max |-log mu^n(w) - v|w||"]);
    let mut power = mu.clone();
    for n in 1..=6usize {
        if n > 1 {
            power = power.convolve(&mu, DEFAULT_CAP)?;
        }
        let dev = power
            .atoms()
            .iter()
            .map(|(w, m)| (-m.ln() - v * g.word_length(w) as f64).abs())
            .fold(0.0, f64::max);
        worst = worst.max(dev);
        t.push(vec![n.into(), power.len().into(), dev.into()]);
    }
    r.tables.push(t);
    r.verdict("-log mu^n(w) = v|w|, n <= 6", worst <= 1e-8, format!("max deviation {worst:.3e}"));
    let budgets = Budgets { seed: SUITE_SEED, ..Budgets::default() };
    r.seed = Some(SUITE_SEED);
    let rep = fundamental_report(&mu, &budgets)?;
    let ratio = rep.ratio.unwrap_or(f64::NAN);
    r.verdict("ratio in [0.98, 1.02]", (0.98..=1.02).contains(&ratio), format!("ratio = {ratio:.5}"));
    Ok(())
}

fn trees(r: &mut ExperimentReport) -> Result<()> {
    let g = GroupSpec::free(2)?;
    let mu = simple_random_walk(&g);
    let t = tree_harmonic(&mu, TREE_TOLERANCE)?;
    r.verdict("exact drift 1/2", close(t.drift, 0.5, 1e-12), format!("{:.15}", t.drift));
    let green = t.green_distance(&g.parse_word("a")?);
    r.verdict("Green length log 3", close(green, 3f64.ln(), 1e-10), format!("{green:.15}"));
    let cfg = WalkConfig { horizon: 10_000, replicas: 10_000, seed: SUITE_SEED, stride: 0 };
    r.seed = Some(SUITE_SEED);
    let mc = estimate_drift(&mu, &cfg)?;
    r.verdict(
        "Monte Carlo drift 0.5 +- 0.01",
        close(mc.value, 0.5, 0.01),
        format!("{:.5} (se {:.2e})", mc.value, mc.std_error),
    );
    let h = estimate_entropy(&mu, 12, DEFAULT_CAP)?;
    let dh = h.increment.value;
    r.verdict(
        "entropy increment at n = 12 in [0.54, 0.56]",
        (0.54..=0.56).contains(&dh),
        format!("dH_12 = {dh:.7}, target {:.7}", 0.5 * 3f64.ln()),
    );
    let mut tab = Table::new("increments", &["n", "entropy_increment", "entropy_rate"]);
    for row in &h.rows {
        tab.push(vec![row.n.into(), row.entropy_increment.into(), row.entropy_rate.into()]);
    }
    r.tables.push(tab);
    Ok(())
}

fn balls(r: &mut ExperimentReport) -> Result<()> {
    let g = GroupSpec::free(2)?;
    let budgets = Budgets { seed: SUITE_SEED, ..Budgets::default() };
    r.seed = Some(SUITE_SEED);
    r.echo("budgets", budgets)?;
    let rows = balls_to_v_experiment(&g, &[1, 2, 3], &budgets)?;
    let mut t = Table::new("balls", &["i", "ball_size", "drift", "drift_exact", "entropy", "n_used", "ratio_over_v"]);
    for row in &rows {
        t.push(vec![
            row.i.into(),
            row.ball_size.into(),
            row.drift.value.into(),
            row.drift_exact.into(),
            row.entropy.value.into(),
            row.n_used.into(),
            row.ratio_over_v.into(),
        ]);
    }
    r.tables.push(t);
    let ratios: Vec<f64> = rows.iter().map(|x| x.ratio_over_v.unwrap_or(f64::NAN)).collect();
    let increasing = ratios.windows(2).all(|w| w[1] > w[0]);
    r.verdict("ratio strictly increasing in i", increasing, format!("{ratios:.4?}"));
    r.verdict("ratio > 0.9 at i = 3", ratios[2] > 0.9, format!("{:.4}", ratios[2]));
    Ok(())
}

fn brute_counts(s: &SubgroupSpec, n_max: usize) -> Result<Vec<usize>> {
    (0..=n_max)
        .map(|n| Ok(s.ambient().enumerate_sphere(n, DEFAULT_CAP)?.iter().filter(|x| s.contains(x)).count()))
        .collect()
}

fn densities(r: &mut ExperimentReport) -> Result<()> {
    let g = GroupSpec::free(2)?;
    let kernel = SubgroupSpec::integer_kernel(&g, vec![1, -1, 1, -1])?;
    let z3 = SubgroupSpec::finite_kernel(&g, Arc::new(FiniteGroup::cyclic(3)?), vec![1, 2, 0, 0])?;
    let generated = SubgroupSpec::generated(&g, vec![g.parse_word("a^2")?, g.parse_word("b a b^-1")?])?;
    r.echo("integer_kernel", kernel.to_config())?;
    r.echo("finite_kernel", z3.to_config())?;

    let rows = CosetAutomaton::new(&kernel, 60)?.census(60)?;
    let mut t = Table::new("integer_kernel", &["n", "count", "density", "density_sqrt_n"]);
    for row in &rows {
        t.push(vec![row.n.into(), (&row.count).into(), row.density.into(), (row.density * (row.n as f64).sqrt()).into()]);
    }
    r.tables.push(t);
    // The kernel meets only even spheres, so the scaled density alternates with parity.
    let scaled: Vec<f64> = rows[20..=60].iter().step_by(2).map(|x| x.density * (x.n as f64).sqrt()).collect();
    let (lo, hi) = scaled.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    r.verdict(
        "density * sqrt(n) constant within 15% (even n in [20, 60])",
        hi <= 1.15 * lo,
        format!("range [{lo:.5}, {hi:.5}]"),
    );

    let mut qt = Table::new("qc", &["n", "members", "qc", "log_density"]);
    let mut logs = Vec::new();
    for n in (8..=16).step_by(2) {
        let row = qc_census(&kernel, 0.5, 2, n)?;
        logs.push(row.log_density.unwrap_or(f64::NEG_INFINITY));
        qt.push(vec![n.into(), (&row.members).into(), (&row.qc).into(), row.log_density.into()]);
    }
    r.tables.push(qt);
    r.verdict(
        "QC(0.5, 2) log-density strictly decreasing (even n in [8, 16])",
        logs.windows(2).all(|w| w[1] < w[0]),
        format!("{logs:.4?}"),
    );

    let rows = CosetAutomaton::new(&z3, 0)?.census(40)?;
    let far = rows[10..=40].iter().map(|x| (x.density - 1.0 / 3.0).abs()).fold(0.0, f64::max);
    r.verdict("finite kernel density 1/3 +- 0.02 on [10, 40]", far <= 0.02, format!("max deviation {far:.5}"));

    let mut exact = true;
    for s in [&kernel, &z3, &generated] {
        let census = CosetAutomaton::new(s, 8)?.census(8)?;
        let brute = brute_counts(s, 8)?;
        exact &= census.iter().zip(&brute).all(|(c, b)| c.count == BigUint::from(*b));
    }
    r.verdict("transfer counts = brute force, n <= 8", exact, "three subgroups");
    Ok(())
}

/// Membership by trying every split into slice words.
fn splits(w: &[Letter], slices: &[HashSet<Word>], lengths: &[usize], memo: &mut Vec<Option<bool>>) -> bool {
    let k = w.len();
    if k == 0 {
        return true;
    }
    if let Some(b) = memo[k] {
        return b;
    }
    let ok = lengths.iter().zip(slices).any(|(&len, set)| {
        len <= k && set.contains(&Word::from_slice(&w[..len])) && splits(&w[len..], slices, lengths, memo)
    });
    memo[k] = Some(ok);
    ok
}

fn semigroup(r: &mut ExperimentReport) -> Result<()> {
    let s = SemigroupSlices::new(2, Letter::new(0, false), vec![3, 12])?;
    let rows = semigroup_density(&s, 12);
    let count = |n: usize| rows[n].count.clone();
    r.verdict(
        "counts 3, 0, 9 at n = 3, 4, 6",
        count(3) == BigUint::from(3u8) && count(4) == BigUint::from(0u8) && count(6) == BigUint::from(9u8),
        format!("{}, {}, {}", count(3), count(4), count(6)),
    );
    let mut t = Table::new("semigroup", &["n", "count", "density"]);
    for row in &rows {
        t.push(vec![row.n.into(), (&row.count).into(), row.density.into()]);
    }
    r.tables.push(t);
    let sets: Vec<HashSet<Word>> = s.lengths.iter().map(|&n| s.slice_words(n).into_iter().collect()).collect();
    let g = GroupSpec::free(2)?;
    let mut agree = true;
    for row in &rows[1..=12] {
        let mut brute = 0usize;
        for x in g.enumerate_sphere(row.n, DEFAULT_CAP)? {
            let Element::Free(w) = x else { unreachable!("free group") };
            let by_split = splits(&w, &sets, &s.lengths, &mut vec![None; w.len() + 1]);
            agree &= by_split == s.contains(&w);
            brute += by_split as usize;
        }
        agree &= row.count == BigUint::from(brute);
    }
    r.verdict("DP = brute-force splitting, n <= 12", agree, "membership and counts");
    Ok(())
}

fn slices(r: &mut ExperimentReport) -> Result<()> {
    let g = z2_star(4)?;
    let mut t = Table::new("slices", &["p", "card", "n", "entropy", "moment"]);
    let mut worst: f64 = 0.0;
    for p in [2, 4, 5] {
        let card = slice_elements(&g, p, DEFAULT_CAP)?.len();
        let mu = slice_uniform(&g, p, DEFAULT_CAP)?;
        let (stats, err) = mu.power_stats(5, DEFAULT_CAP);
        if let Some(e) = err {
            return Err(e);
        }
        for s in &stats {
            let n = s.n as f64;
            worst = worst
                .max((s.entropy - n * (card as f64).ln()).abs())
                .max((s.moment - n * p as f64).abs());
            t.push(vec![p.into(), card.into(), s.n.into(), s.entropy.into(), s.moment.into()]);
        }
    }
    r.tables.push(t);
    r.verdict("H = n log Card, L = np for n <= 5", worst <= 1e-8, format!("max deviation {worst:.3e}"));
    Ok(())
}

fn decays(r: &mut ExperimentReport) -> Result<()> {
    let z4 = GroupSpec::cyclic(4)?;
    let mut t = Table::new("mixing_fit", &["eta", "rho", "c", "c0", "bound"]);
    let mut ok = true;
    for eta in [0.1, 0.2] {
        let mu = FinMeasure::new(
            z4.clone(),
            vec![
                (Element::Finite(0), 1.0 - eta),
                (Element::Finite(1), eta / 2.0),
                (Element::Finite(3), eta / 2.0),
            ],
        )?;
        let fit = mixing_decay(&mu, 200)?
            .fit(20, 200)
            .ok_or_else(|| Error::Degenerate("no positive distances to fit".into()))?;
        ok &= fit.rho <= 1.0 - 0.5 * eta;
        t.push(vec![eta.into(), fit.rho.into(), fit.c.into(), fit.c0.into(), (1.0 - 0.5 * eta).into()]);
    }
    r.tables.push(t);
    r.verdict("Z/4 mixing rate rho <= 1 - eta/2", ok, "eta in {0.1, 0.2}, n in [20, 200]");

    let z = GroupSpec::free(1)?;
    let lazy = FinMeasure::new(
        z.clone(),
        vec![(z.identity(), 0.5), (z.parse_word("a")?, 0.25), (z.parse_word("a^-1")?, 0.25)],
    )?;
    let n_values: Vec<usize> = (100..=10_000).collect();
    let d = vc_supnorm_decay(&lazy, &n_values)?;
    let (lo, hi) = d.rows.iter().fold((f64::INFINITY, 0.0f64), |(a, b), x| (a.min(x.sqrt_n_sup), b.max(x.sqrt_n_sup)));
    r.verdict(
        "lazy walk on Z: sqrt(n) sup in [0.53, 0.60] for n in [100, 10000]",
        lo >= 0.53 && hi <= 0.60,
        format!("range [{lo:.5}, {hi:.5}]"),
    );
    let mut st = Table::new("supnorm", &["n", "sup", "sqrt_n_sup"]);
    for row in d.rows.iter().filter(|x| x.n % 500 == 0 || x.n == 100) {
        st.push(vec![row.n.into(), row.sup.into(), row.sqrt_n_sup.into()]);
    }
    r.tables.push(st);
    Ok(())
}

fn degenerating(r: &mut ExperimentReport) -> Result<()> {
    let budgets = Budgets { seed: SUITE_SEED, ..Budgets::default() };
    r.seed = Some(SUITE_SEED);
    r.echo("budgets", budgets)?;
    let scan = family_scan(Family::FreeAxis, &[0.4, 0.1, 0.025], &budgets);
    let mut t = Table::new("free_axis", &["eps", "entropy", "drift", "ratio", "ratio_over_v", "uncertainty"]);
    for p in &scan.points {
        t.push(vec![
            p.eps.into(),
            p.entropy.as_ref().map(|e| e.value).into(),
            p.drift.as_ref().map(|e| e.value).into(),
            p.ratio.into(),
            p.ratio_over_v.into(),
            p.uncertainty.into(),
        ]);
    }
    r.tables.push(t);
    let ratios: Vec<f64> = scan.points.iter().map(|p| p.ratio.unwrap_or(f64::NAN)).collect();
    r.verdict(
        "ratio strictly decreasing in eps (with uncertainties)",
        scan.strictly_decreasing == Some(true),
        format!("{ratios:.4?}"),
    );
    r.verdict(
        "ratio(0.025) < 0.5 ratio(0.4)",
        ratios[2] < 0.5 * ratios[0],
        format!("{:.4} vs {:.4}", ratios[2], 0.5 * ratios[0]),
    );

    let c = free_product_sigma_limit(0.05, &budgets)?;
    r.verdict(
        "ratio at eps = 0.05 within 10% of the ratio of lambda",
        c.relative_gap <= 0.10,
        format!(
            "mu_eps {:.5} vs lambda {:.5} +- {:.5} (gap {:.1}%); through lambda_eps with the same estimator {:.5} (gap {:.1}%)",
            c.ratio_mu,
            c.ratio_lambda,
            c.ratio_lambda_uncertainty,
            100.0 * c.relative_gap,
            c.ratio_via_lambda_eps,
            100.0 * c.relative_gap_same_estimator
        ),
    );
    r.echo("limit_comparison", &c)?;
    Ok(())
}

fn random_reduced_word<R: Rng>(rng: &mut R, len: usize) -> Word {
    let mut w = Word::new();
    while w.len() < len {
        let l = Letter::from_code(rng.random_range(0..4));
        if w.last() != Some(&l.inverse()) {
            w.push(l);
        }
    }
    w
}

fn product_of<R: Rng>(rng: &mut R, gens: &[Word], factors: usize) -> Word {
    let mut w = Word::new();
    for _ in 0..factors {
        let g = &gens[rng.random_range(0..gens.len())];
        let piece = if rng.random_bool(0.5) { g.clone() } else { crate::group::invert_word(g) };
        for l in piece {
            crate::group::push_reduced(&mut w, l);
        }
    }
    w
}

/// Runs of equal letters.
fn runs(w: &[Letter]) -> Vec<(Letter, usize)> {
    let mut out: Vec<(Letter, usize)> = Vec::new();
    for &l in w {
        match out.last_mut() {
            Some((x, k)) if *x == l => *k += 1,
            _ => out.push((l, 1)),
        }
    }
    out
}

fn even_a_exponent(w: &[Letter]) -> bool {
    w.iter().filter(|l| l.generator() == 0).count() % 2 == 0
}

fn powers_of_a(w: &[Letter]) -> bool {
    w.iter().all(|l| l.generator() == 0)
}

fn even_runs(w: &[Letter]) -> bool {
    runs(w).iter().all(|(_, k)| k % 2 == 0)
}

fn conjugate_of_b(w: &[Letter]) -> bool {
    w.is_empty()
        || (w.len() >= 3
            && w[0] == Letter::new(0, false)
            && w[w.len() - 1] == Letter::new(0, true)
            && runs(&w[1..w.len() - 1]).len() == 1
            && w[1].generator() == 1)
}

fn powers_of_ab(w: &[Letter]) -> bool {
    let fwd = [Letter::new(0, false), Letter::new(1, false)];
    let back = [Letter::new(1, true), Letter::new(0, true)];
    w.len().is_multiple_of(2) && (w.chunks(2).all(|c| c == fwd) || w.chunks(2).all(|c| c == back))
}

type Oracle = fn(&[Letter]) -> bool;

/// Subgroups of F2 whose membership is decided by reading the word directly.
const ORACLE_SUBGROUPS: [(&[&str], Oracle); 5] = [
    (&["a^2", "b", "a b a^-1"], even_a_exponent),
    (&["a"], powers_of_a),
    (&["a^2", "b^2"], even_runs),
    (&["a b a^-1"], conjugate_of_b),
    (&["a b"], powers_of_ab),
];

fn properties(r: &mut ExperimentReport) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED);
    r.seed = Some(SUITE_SEED);

    let mut violations = 0;
    for _ in 0..10_000 {
        let k = rng.random_range(1..=20);
        let w: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 1e-3).collect();
        let sw: f64 = w.iter().sum();
        let w: Vec<f64> = w.iter().map(|x| x / sw).collect();
        let f: Vec<f64> = (0..k).map(|_| if rng.random_bool(0.1) { 0.0 } else { rng.random::<f64>() * 3.0 }).collect();
        let mean: f64 = w.iter().zip(&f).map(|(w, f)| w * f).sum();
        if mean == 0.0 {
            continue;
        }
        let f: Vec<f64> = f.iter().map(|x| x / mean).collect();
        let a: Vec<usize> = (0..k).filter(|_| rng.random_bool(0.5)).collect();
        if !check_entropy_lower_bound(&w, &f, &a)?.holds {
            violations += 1;
        }
    }
    r.verdict("entropy lower bound on 10^4 instances", violations == 0, format!("{violations} violations"));

    let f2 = GroupSpec::free(2)?;
    let z23 = z2_star(3)?;
    let p = |g: &GroupSpec, w: &str| g.parse_word(w);
    let measures = vec![
        ("F2 srw", simple_random_walk(&f2)),
        ("F2 axis 0.1", Family::FreeAxis.measure(0.1)?),
        ("Z/2*Z/4 critical", critical_product(&z2_star(4)?)?),
        (
            "Z/2*Z/3 drifting",
            FinMeasure::new(z23.clone(), vec![(p(&z23, "a")?, 0.5), (p(&z23, "b")?, 0.3), (p(&z23, "b^-1")?, 0.2)])?,
        ),
        ("Z/2*Z/3 lazy", lazy_mix(&simple_random_walk(&z23), 0.3)?),
        ("Z/2xF2 closing", Family::DirectProduct.measure(0.2)?),
        ("F2 mixture", interpolation(&simple_random_walk(&f2), &Family::FreeAxis.measure(0.4)?, 0.5)?),
    ];
    let mut chains_ok = true;
    let mut t = Table::new("chains", &["measure", "n_max", "max_increment_rise", "max_subadditivity_excess"]);
    for (name, mu) in &measures {
        let series = convolution_series(mu, 8, 1_000_000);
        let h: Vec<f64> = std::iter::once(0.0).chain(series.rows.iter().map(|x| x.entropy)).collect();
        let l: Vec<f64> = std::iter::once(0.0).chain(series.rows.iter().map(|x| x.moment)).collect();
        let rise = series
            .rows
            .windows(2)
            .map(|w| w[1].entropy_increment - w[0].entropy_increment)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut excess = f64::NEG_INFINITY;
        for m in 1..h.len() {
            for n in 1..h.len() - m {
                excess = excess.max(h[m + n] - h[m] - h[n]).max(l[m + n] - l[m] - l[n]);
            }
        }
        chains_ok &= rise <= 1e-9 && excess <= 1e-9;
        t.push(vec![(*name).into(), series.feasible_n().into(), rise.into(), excess.into()]);
    }
    r.tables.push(t);
    r.verdict("increments non-increasing, H and L subadditive", chains_ok, "seven measures, n <= 8");

    let mut mismatches = 0;
    let mut members = 0;
    for (gens, oracle) in ORACLE_SUBGROUPS {
        let words: Vec<Word> = gens
            .iter()
            .map(|s| match f2.parse_word(s) {
                Ok(Element::Free(w)) => w,
                _ => unreachable!("free group words"),
            })
            .collect();
        let graph = StallingsGraph::fold(2, &words);
        for i in 0..10_000 {
            let w = if i % 2 == 0 {
                let len = rng.random_range(0..=14);
                random_reduced_word(&mut rng, len)
            } else {
                let k = rng.random_range(0..=5);
                product_of(&mut rng, &words, k)
            };
            let inside = oracle(&w);
            members += inside as usize;
            if graph.contains(&w) != inside {
                mismatches += 1;
            }
        }
    }
    r.verdict(
        "Stallings membership = rewriting oracle",
        mismatches == 0,
        format!("{mismatches} mismatches on 5 x 10^4 words ({members} members)"),
    );

    let budgets = Budgets { horizon: 500, replicas: 500, seed: SUITE_SEED, ..Budgets::default() };
    let mu = Family::FreeAxis.measure(0.1)?;
    let run = || -> Result<String> {
        let drift = estimate_drift(&mu, &budgets.walk_config())?;
        let fam = LambdaFamily::new(decompose(&mu, &SplitRule::default())?)?;
        let stats = lambda_stats(&mu, &fam, &budgets)?;
        Ok(serde_json::to_string(&(drift, stats))?)
    };
    let first = run()?;
    let second = run()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let serial = pool.install(run)?;
    r.verdict(
        "Monte Carlo artifacts byte-identical under a fixed seed",
        first == second && first == serial,
        format!("{} bytes; repeated and single-threaded runs compared", first.len()),
    );
    Ok(())
}
