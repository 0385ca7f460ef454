use anyhow::{anyhow, bail, Context, Result};
use cocycle_lab::entropy::{
    bowen_hausdorff_estimate, local_entropy, packing_estimate, relation_check, topological_entropy, EntropyEstimate,
    PointFamily,
};
use cocycle_lab::fractal::{
    ball_sweep, build_scheme, choose_parameters, construct_point, distinctness, divergence_checkpoints, edp_lower_bound,
    enumerate_points, packing_lower_bound, support_check, DivergenceReport, FractalScheme, Irregularity, SchemeMode,
    SchemeParams,
};
use cocycle_lab::measures::{bernoulli_grid, MarkovMeasure};
use cocycle_lab::shift_space::{parse_word, word_to_string, Resolution, SymbolPoint};
use cocycle_lab::suite;
use cocycle_lab::Error;
use serde::Serialize;
use serde_json::json;

use crate::config::{ExperimentConfig, FamilySpec, PointSpec, SchemeConfig};
use crate::output::Output;

/// How a command ended, beyond plain success.
#[derive(Debug, PartialEq, Eq)]
pub enum Status {
    Done,
    /// The measures share their top exponent: the first alternative.
    SharedMle,
    /// `verify` found failing criteria.
    Failed,
}

fn sample(cfg: &ExperimentConfig, measure: usize, index: u64, half: usize, field: &str) -> Result<SymbolPoint> {
    Ok(cfg.measure(measure, field)?.sample_point(half, cfg.seed.wrapping_add(index)))
}

fn text_point(cfg: &ExperimentConfig, text: &str, len: usize, field: &str) -> Result<SymbolPoint> {
    let p = SymbolPoint::parse(text).map_err(|e| anyhow!("config field `{field}`: {e}"))?;
    p.check_admissible(&cfg.system, 0, len as i64).map_err(|e| anyhow!("config field `{field}`: {e}"))?;
    Ok(p)
}

#[derive(Serialize)]
struct MleRow {
    point: String,
    n: usize,
    mle: f64,
    /// Spectrum at `n`, semicolon separated, decreasing.
    spectrum: Option<String>,
}

pub fn mle(cfg: &ExperimentConfig, out: &Output) -> Result<Status> {
    let sec = cfg.section(&cfg.mle, "mle")?;
    let a = cfg.cocycle()?;
    let n_max = *sec.checkpoints.iter().max().ok_or_else(|| anyhow!("config field `mle.checkpoints`: empty"))?;
    let mut rows = Vec::new();
    for (i, spec) in sec.points.iter().enumerate() {
        let (id, x) = match spec {
            PointSpec::Text(t) => (t.clone(), text_point(cfg, t, n_max, &format!("mle.points[{i}].text"))?),
            PointSpec::Sample { measure, index } => (
                format!("sample(measures[{measure}], {index})"),
                sample(cfg, *measure, *index, n_max + 1, &format!("mle.points[{i}].sample.measure"))?,
            ),
        };
        let report = a
            .mle_report(&x, &sec.checkpoints, &id)
            .map_err(|e| anyhow!("config field `mle.checkpoints`: {e}"))?;
        for (&n, &v) in report.checkpoints.iter().zip(&report.values) {
            let spectrum = if sec.spectrum {
                let s = a.oseledec_spectrum(&x, n)?;
                Some(s.exponents.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(";"))
            } else {
                None
            };
            rows.push(MleRow { point: id.clone(), n, mle: v, spectrum });
        }
    }
    out.series("mle", &rows)?;
    Ok(Status::Done)
}

#[derive(Serialize)]
struct MeasureMleRow {
    measure: String,
    n: usize,
    integral: f64,
    rate: f64,
    /// `min_{k <= n} a_k / k`.
    bound: f64,
}

pub fn measure_mle(cfg: &ExperimentConfig, out: &Output) -> Result<Status> {
    let sec = cfg.section(&cfg.measure_mle, "measure_mle")?;
    let a = cfg.cocycle()?;
    let mut measures: Vec<(String, MarkovMeasure)> =
        cfg.measures.iter().enumerate().map(|(i, m)| (format!("measures[{i}]"), m.clone())).collect();
    if let Some(k) = sec.bernoulli_grid {
        if cfg.system.alphabet_size() != 2 || !bernoulli_grid(1).iter().all(|m| m.supported_on(&cfg.system)) {
            bail!("config field `measure_mle.bernoulli_grid`: needs the full 2-shift");
        }
        measures.extend(bernoulli_grid(k).into_iter().enumerate().map(|(i, m)| (format!("bernoulli({i}/{k})"), m)));
    }
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for (label, mu) in &measures {
        let r = a.mle_of_measure(mu, sec.n_max, cfg.budget_nodes).with_context(|| label.clone())?;
        let mut bound = f64::INFINITY;
        for (i, (&integral, &rate)) in r.integrals.iter().zip(&r.rates).enumerate() {
            bound = bound.min(rate);
            rows.push(MeasureMleRow { measure: label.clone(), n: i + 1, integral, rate, bound });
        }
        println!("{label}: chi_max <= {:.9} (n = {})", r.value, r.argmin_n);
        summary.push(json!({ "measure": label, "entropy": mu.entropy(), "mle": r }));
    }
    out.series("measure_mle", &rows)?;
    out.json("measure_mle_certificates", &summary)?;
    Ok(Status::Done)
}

fn verdict_text(v: &Irregularity) -> &'static str {
    match v {
        Irregularity::MlIrregular => "ML-irregular",
        Irregularity::NotIrregular => "not irregular",
        Irregularity::Undetermined => "undetermined",
    }
}

/// Parameters for the two configured measures, or the shared-MLE exit.
fn parameters(cfg: &ExperimentConfig, sc: &SchemeConfig, section: &str, out: &Output) -> Result<Option<SchemeParams>> {
    let a = cfg.cocycle()?;
    let mu1 = cfg.measure(0, "measures")?;
    let mu2 = cfg.measure(1, "measures")?;
    let gamma = match sc.gamma {
        Some(g) => g,
        None => {
            let h = mu1.entropy().min(mu2.entropy());
            if h <= 0.0 {
                bail!("config field `{section}.gamma`: required when a measure has zero entropy");
            }
            h / 10.0
        }
    };
    let mut pc = sc.params.clone();
    pc.seed = cfg.seed;
    pc.mle_cap = cfg.budget_nodes;
    match choose_parameters(a, &cfg.system, mu1, mu2, gamma, None, &pc) {
        Ok(p) => Ok(Some(p)),
        Err(Error::NotDistinguished { a, b }) => {
            println!("alternative (1): measures share MLE (a = {a:.9}, b = {b:.9})");
            out.json(section, &json!({ "alternative": 1, "outcome": "measures share MLE", "a": a, "b": b }))?;
            Ok(None)
        }
        Err(e @ Error::Budget { .. }) => Err(anyhow!("{e} (raise --budget-nodes)")),
        Err(e) => Err(anyhow!("config field `{section}`: {e}")),
    }
}

fn build(cfg: &ExperimentConfig, sc: &SchemeConfig, p: &SchemeParams) -> Result<FractalScheme> {
    let mut b = sc.build.clone();
    b.seed = cfg.seed;
    b.enumeration_budget = cfg.budget_nodes;
    Ok(build_scheme(&cfg.system, p, &b)?)
}

fn divergence(cfg: &ExperimentConfig, sc: &SchemeConfig, s: &FractalScheme) -> Result<DivergenceReport> {
    let choices = match &sc.choices {
        Some(c) => c.clone(),
        None => s.levels.iter().map(|l| vec![0; l.repeats]).collect(),
    };
    let z = construct_point(s, &choices)?;
    Ok(divergence_checkpoints(cfg.cocycle()?, &z, s, s.depth())?)
}

#[derive(Serialize)]
struct CheckpointRow {
    k: usize,
    t: usize,
    measure: usize,
    mle: f64,
    bound: &'static str,
    bound_value: f64,
    slack: f64,
    holds: bool,
}

fn checkpoint_rows(s: &FractalScheme, d: &DivergenceReport) -> Vec<CheckpointRow> {
    (0..d.report.values.len())
        .map(|i| {
            let c = &d.checks[i];
            let odd = i % 2 == 0;
            CheckpointRow {
                k: i + 1,
                t: s.t(i + 1),
                measure: s.level(i + 1).measure,
                mle: d.report.values[i],
                bound: if odd { "lower" } else { "upper" },
                bound_value: if odd { c.lhs } else { c.rhs },
                slack: d.slack[i],
                holds: c.holds,
            }
        })
        .collect()
}

pub fn irregular(cfg: &ExperimentConfig, out: &Output) -> Result<Status> {
    let sc = cfg.section(&cfg.irregular, "irregular")?;
    let Some(p) = parameters(cfg, sc, "irregular", out)? else {
        return Ok(Status::SharedMle);
    };
    let s = build(cfg, sc, &p)?;
    let d = divergence(cfg, sc, &s)?;
    out.series("irregular", &checkpoint_rows(&s, &d))?;
    let gap = d.gap();
    out.json(
        "irregular_verdict",
        &json!({
            "verdict": verdict_text(&d.verdict),
            "gap": gap,
            "checkpoints": s.checkpoints,
            "divergence": d,
            "params": p,
        }),
    )?;
    match gap {
        Some(g) => println!("verdict: {} (gap {g:.5} over {} checkpoints)", verdict_text(&d.verdict), s.depth()),
        None => println!("verdict: {}", verdict_text(&d.verdict)),
    }
    Ok(Status::Done)
}

pub fn scheme(cfg: &ExperimentConfig, out: &Output) -> Result<Status> {
    let sc = cfg.section(&cfg.scheme, "scheme")?;
    if sc.build.mode != SchemeMode::Full {
        bail!("config field `scheme.build.mode`: certificates need a full-mode scheme; use `irregular` for light mode");
    }
    let Some(p) = parameters(cfg, sc, "scheme", out)? else {
        return Ok(Status::SharedMle);
    };
    let s = build(cfg, sc, &p)?;
    let eps = sc.ball_radius.unwrap_or(p.ball_radius);
    let m = Resolution::from_eps(eps).map_err(|e| anyhow!("config field `scheme.ball_radius`: {e}"))?.m as usize;
    let k = s.depth();
    let budget = cfg.budget_nodes;
    let gamma = p.gamma;
    let e = enumerate_points(&s, k, m + 1, budget)?;
    let distinct = distinctness(&s, &e, eps)?;
    let support = support_check(&s, &e)?;
    let sweep = ball_sweep(&s, &e, eps, 1)?;
    let edp = edp_lower_bound(&s, gamma, eps, k, 1, budget)?;
    let packing = packing_lower_bound(&s, gamma, eps, k, budget)?;
    let d = divergence(cfg, sc, &s)?;
    let cover = bowen_hausdorff_estimate(&PointFamily::Points(e.points.clone()), edp.s, 1, eps, s.t(k) - 1)?;
    let cover_ok = cover.value >= edp.s;
    out.json(
        "scheme",
        &json!({
            "alternative": 2,
            "verdict": verdict_text(&d.verdict),
            "points": e.len(),
            "distinctness": distinct,
            "support": support,
            "ball_sweep": sweep,
            "edp_lower_bound": edp,
            "packing_lower_bound": packing,
            "cover_upper_bound": cover,
            "cover_above_lower_bound": cover_ok,
            "divergence": d,
            "scheme": s,
        }),
    )?;
    out.series("scheme_checkpoints", &checkpoint_rows(&s, &d))?;
    println!(
        "alternative (2): {} point; h^B lower bound {:.5} ({:?}), cover upper bound {:.5}, packing lower bound {:.5} ({:?})",
        verdict_text(&d.verdict),
        edp.s,
        edp.status,
        cover.value,
        packing.s,
        packing.status
    );
    Ok(Status::Done)
}

#[derive(Serialize)]
struct EntropyRow {
    family: String,
    eps: f64,
    notion: String,
    value: f64,
    slack: f64,
    direction: String,
    fit_from: Option<usize>,
    bracket_lo: Option<f64>,
    bracket_hi: Option<f64>,
    weight: Option<f64>,
    relation_holds: Option<bool>,
}

impl EntropyRow {
    fn new(family: &str, e: &EntropyEstimate, holds: Option<bool>) -> Self {
        let tag = |v: serde_json::Value| v.as_str().unwrap_or_default().to_string();
        EntropyRow {
            family: family.to_string(),
            eps: e.eps,
            notion: tag(serde_json::to_value(e.notion).unwrap()),
            value: e.value,
            slack: e.slack,
            direction: tag(serde_json::to_value(e.direction).unwrap()),
            fit_from: e.fit_from,
            bracket_lo: e.bracket.map(|b| b[0]),
            bracket_hi: e.bracket.map(|b| b[1]),
            weight: e.weight,
            relation_holds: holds,
        }
    }
}

#[derive(Serialize)]
struct CountRow {
    family: String,
    eps: f64,
    n: usize,
    log_count: f64,
    rate: f64,
}

fn family(cfg: &ExperimentConfig, spec: &FamilySpec, horizon: usize, field: &str) -> Result<(String, PointFamily)> {
    Ok(match spec {
        FamilySpec::Whole => ("whole".into(), PointFamily::Whole(cfg.system.clone())),
        FamilySpec::Periodic(text) => {
            let w = parse_word(text).map_err(|e| anyhow!("config field `{field}.periodic`: {e}"))?;
            let mut cyc = w.clone();
            cyc.extend(w.first());
            cfg.system.check_word(&cyc).map_err(|e| anyhow!("config field `{field}.periodic`: {e}"))?;
            (format!("periodic({})", word_to_string(&w)), PointFamily::periodic_orbit(&w)?)
        }
        FamilySpec::Orbit { measure, index, length } => {
            let x = sample(cfg, *measure, *index, horizon + length + 8, &format!("{field}.orbit.measure"))?;
            (format!("orbit(measures[{measure}], {index}, {length})"), PointFamily::orbit(&x, *length))
        }
        FamilySpec::Points(texts) => {
            let pts = texts
                .iter()
                .enumerate()
                .map(|(j, t)| text_point(cfg, t, horizon, &format!("{field}.points[{j}]")))
                .collect::<Result<Vec<_>>>()?;
            (format!("points({})", pts.len()), PointFamily::Points(pts))
        }
    })
}

pub fn entropy(cfg: &ExperimentConfig, out: &Output) -> Result<Status> {
    let sec = cfg.section(&cfg.entropy, "entropy")?;
    let mut rows = Vec::new();
    let mut counts = Vec::new();
    let mut relations = Vec::new();
    for (i, spec) in sec.families.iter().enumerate() {
        let (label, fam) = family(cfg, spec, sec.horizon, &format!("entropy.families[{i}]"))?;
        for &eps in &sec.eps {
            Resolution::from_eps(eps).map_err(|e| anyhow!("config field `entropy.eps`: {e}"))?;
            let top = topological_entropy(&fam, sec.horizon, eps)?;
            let n0 = top.fit_from.unwrap_or(1);
            let bh = bowen_hausdorff_estimate(&fam, top.value, n0, 2.0 * eps, sec.horizon)?;
            let pk = packing_estimate(&fam, top.value, n0, eps, sec.horizon)?;
            let rel = relation_check(fam.is_invariant_compact(), &bh, &pk, &top)?;
            for e in [&top, &bh, &pk] {
                rows.push(EntropyRow::new(&label, e, Some(rel.holds)));
            }
            counts.extend(top.table.iter().map(|r| CountRow {
                family: label.clone(),
                eps,
                n: r.n,
                log_count: r.raw,
                rate: r.estimate,
            }));
            println!("{label} eps {eps}: h_top {:.5}, h^B {:.5}, h^P {:.5}, relations hold: {}", top.value, bh.value, pk.value, rel.holds);
            relations.push(json!({ "family": label, "eps": eps, "relations": rel }));
        }
    }
    for (i, l) in sec.local.iter().enumerate() {
        let field = format!("entropy.local[{i}]");
        let mu = cfg.measure(l.measure, &format!("{field}.measure"))?;
        let x = sample(cfg, l.measure, l.index, l.n_max + 8, &field)?;
        let (lo, hi) = local_entropy(mu, &x, l.eps, l.n_max).map_err(|e| anyhow!("config field `{field}`: {e}"))?;
        let label = format!("local(measures[{}], {})", l.measure, l.index);
        rows.push(EntropyRow::new(&label, &lo, None));
        rows.push(EntropyRow::new(&label, &hi, None));
    }
    out.series("entropy", &rows)?;
    out.series("entropy_counts", &counts)?;
    out.json("entropy_relations", &relations)?;
    Ok(Status::Done)
}

#[derive(Serialize)]
struct VerifyRow {
    id: u32,
    name: String,
    pass: bool,
    detail: String,
    time_limit_s: Option<f64>,
}

/// Wall times go to stdout only, so the report itself is reproducible.
pub fn verify(only: &[u32], out: &Output) -> Result<Status> {
    let ids: Vec<u32> = if only.is_empty() { suite::CRITERIA.collect() } else { only.to_vec() };
    let mut rows = Vec::new();
    for &id in &ids {
        let o = suite::run(id).ok_or_else(|| anyhow!("--only: no criterion {id}"))?;
        println!("{o}");
        rows.push(VerifyRow { id: o.id, name: o.name, pass: o.pass, detail: o.detail, time_limit_s: o.time_limit_s });
    }
    let passed = rows.iter().filter(|r| r.pass).count();
    println!("{passed}/{} criteria pass", rows.len());
    out.json("verify", &rows)?;
    Ok(if passed == rows.len() { Status::Done } else { Status::Failed })
}
