use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;
use serde_json::{json, Value};
use thetapi::decider::{are_homotopic, is_nullhomotopic, Budget, Verdict};
use thetapi::oracle::{
    adversarial_matrices, check_snf, cross_check, decider_agreement, random_cloud, random_matrix, Agreement,
};
use thetapi::paths::{discretize as discretize_poly, verify_grid_homotopy, GridHomotopy, PathFile, Snap};
use thetapi::presentation::{presentation_at_scale, tietze_simplify, Effort, ModelOptions};
use thetapi::scale_maps::{sweep as sweep_scales, Scales};
use thetapi::spaces::{read_polyline_csv, write_points_csv, FiniteMetricSpace};
use thetapi::theta_graph::{critical_scales, ThetaGraph};

use crate::io::{check_resolution, load_space, load_space_at, read_json, run_info, to_value, with_run};
use crate::{status, Ctx, EffortArg, Failure, Format, SpaceArgs};

pub fn graph(ctx: &mut Ctx, args: &SpaceArgs, theta: f64, format: Format, output: Option<PathBuf>) -> Result<u8, Failure> {
    let loaded = load_space(args)?;
    check_resolution(ctx, &loaded, theta);
    let space = &loaded.space;
    let g = ThetaGraph::build(space, theta)?;
    ctx.note(format!("{} edges", g.edge_count()));
    let text = match format {
        Format::Dot => {
            let dot = g.to_dot(space);
            let (head, rest) = dot.split_once('\n').unwrap_or((&dot, ""));
            format!("{head}\n  // space {}\n{rest}", space.content_hash())
        }
        Format::Csv => g.to_edge_csv(space),
        Format::Json => {
            let edges: Vec<Value> = g.edges().map(|(u, v)| json!([u, v, space.dist(u, v)])).collect();
            let run = run_info("graph", Some(space), &[("space", &args.input)], json!({ "theta": theta, "basepoint": space.basepoint() }))?;
            let body = json!({
                "theta": theta,
                "vertices": space.len(),
                "edges": edges,
                "components": g.components().len(),
                "run": run,
            });
            let mut s = serde_json::to_string_pretty(&body).map_err(|e| Failure::internal(e.to_string()))?;
            s.push('\n');
            s
        }
    };
    ctx.outputs.emit(output.as_deref(), &text)?;
    Ok(0)
}

pub fn pi1(
    ctx: &mut Ctx,
    args: &SpaceArgs,
    theta: f64,
    simplify: Option<EffortArg>,
    output: Option<PathBuf>,
) -> Result<u8, Failure> {
    let loaded = load_space(args)?;
    check_resolution(ctx, &loaded, theta);
    let space = &loaded.space;
    let p = presentation_at_scale(space, theta, space.basepoint())?;
    for w in &p.warnings {
        eprintln!("thetapi: warning: {w}");
    }
    let mut body = to_value(&p.to_json())?;
    body["warnings"] = json!(p.warnings);
    let mut summary = format!(
        "theta {theta}: {} generators, {} relators, H1 = {}\n",
        p.generator_count(),
        p.relators.len(),
        p.abelianization()
    );
    if let Some(level) = simplify {
        let effort = match level {
            EffortArg::Minimal => Effort::Minimal,
            EffortArg::Standard => Effort::Standard,
            EffortArg::Thorough => Effort::Thorough,
        };
        let s = tietze_simplify(&p, effort);
        body["simplified"] = json!({
            "effort": format!("{effort:?}").to_lowercase(),
            "kept_generators": s.kept,
            "relators": s.presentation.relators,
            "free": s.is_free(),
        });
        summary.push_str(&format!(
            "simplified: {} generators, {} relators{}\n",
            s.presentation.generator_count(),
            s.presentation.relators.len(),
            if s.is_free() { " (free)" } else { "" }
        ));
    }
    let run = run_info(
        "pi1",
        Some(space),
        &[("space", &args.input)],
        json!({ "theta": theta, "basepoint": space.basepoint(), "simplify": simplify.map(|e| format!("{e:?}").to_lowercase()) }),
    )?;
    let body = with_run(body, run);
    match output {
        Some(p) => {
            ctx.outputs.emit_json(Some(&p), &body)?;
            ctx.outputs.emit(None, &summary)?;
        }
        None => ctx.outputs.emit_json(None, &body)?,
    }
    Ok(0)
}

fn parse_scales(s: &str) -> Result<Scales, Failure> {
    if s.trim() == "critical" {
        return Ok(Scales::Critical);
    }
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| Failure::validation(format!("bad scale `{x}`"))))
        .collect::<Result<Vec<_>, _>>()
        .map(Scales::List)
}

pub fn sweep(
    ctx: &mut Ctx,
    args: &SpaceArgs,
    scales: &str,
    exact: bool,
    output: Option<PathBuf>,
    barcode: Option<PathBuf>,
    report: Option<PathBuf>,
) -> Result<u8, Failure> {
    let loaded = load_space(args)?;
    let space = &loaded.space;
    let grid = parse_scales(scales)?;
    let options = if exact { ModelOptions::default() } else { ModelOptions::fast() };
    let tower = sweep_scales(space, &grid, space.basepoint(), options)?;
    if let Some(&smallest) = tower.scales.last() {
        check_resolution(ctx, &loaded, smallest);
    }
    ctx.note(format!("{} scales", tower.scales.len()));
    let run = run_info(
        "sweep",
        Some(space),
        &[("space", &args.input)],
        json!({ "scales": scales, "exact": exact, "basepoint": space.basepoint() }),
    )?;
    let body = with_run(to_value(&tower.to_json())?, run.clone());
    if let Some(p) = &barcode {
        ctx.outputs.emit(Some(p), &tower.barcode().to_csv())?;
    }
    if let Some(p) = &report {
        let r = tower.inverse_limit_report()?;
        ctx.outputs.emit_json(Some(p), &with_run(to_value(&r)?, run))?;
        ctx.outputs.emit(Some(&p.with_extension("txt")), &r.to_text())?;
    }
    ctx.outputs.emit_json(output.as_deref(), &body)?;
    Ok(0)
}

fn read_path(p: &Path, space: &FiniteMetricSpace, theta: Option<f64>) -> Result<thetapi::paths::ThetaPath, Failure> {
    let file: PathFile = read_json(p)?;
    file.check_space(space)?;
    let path = file.path();
    Ok(match theta {
        Some(t) => path.at_scale(t),
        None => path,
    })
}

#[allow(clippy::too_many_arguments)]
pub fn homotopy(
    ctx: &mut Ctx,
    args: &SpaceArgs,
    path1: &Path,
    path2: Option<&Path>,
    theta: Option<f64>,
    budget: usize,
    max_width: Option<usize>,
    output: Option<PathBuf>,
    certificate: Option<PathBuf>,
) -> Result<u8, Failure> {
    let mut loaded = load_space(args)?;
    let p = read_path(path1, &loaded.space, theta)?;
    if args.basepoint.is_none() && !p.is_empty() && p.start() != loaded.space.basepoint() {
        // no explicit basepoint: take the path's
        loaded = load_space_at(&args.input, args.metric.as_deref(), Some(p.start()))?;
    }
    check_resolution(ctx, &loaded, p.theta);
    let space = &loaded.space;
    let budget = Budget { max_width, max_states: budget };
    let verdict = match path2 {
        Some(q) => {
            let q = read_path(q, space, theta)?;
            are_homotopic(space, &p, &q, budget)?
        }
        None => is_nullhomotopic(space, &p, budget)?,
    };
    let mut inputs: Vec<(&str, &Path)> = vec![("space", &args.input), ("path1", path1)];
    if let Some(q) = path2 {
        inputs.push(("path2", q));
    }
    let run = run_info(
        "homotopy",
        Some(space),
        &inputs,
        json!({ "theta": p.theta, "basepoint": space.basepoint(), "max_states": budget.max_states, "max_width": max_width }),
    )?;
    if let (Some(c), Verdict::Trivial { certificate: h }) = (&certificate, &verdict) {
        ctx.outputs.emit_json(Some(c), &with_run(to_value(h)?, run.clone()))?;
    }
    ctx.outputs.emit_json(output.as_deref(), &with_run(to_value(&verdict)?, run))?;
    Ok(match verdict {
        Verdict::Unknown { .. } => status::BUDGET,
        _ => 0,
    })
}

pub fn discretize(
    ctx: &mut Ctx,
    polyline: &Path,
    theta: f64,
    snap: Option<&Path>,
    snap_radius: Option<f64>,
    output: Option<PathBuf>,
    samples: Option<PathBuf>,
) -> Result<u8, Failure> {
    let text = fs::read(polyline).map_err(|e| Failure::validation(format!("cannot read {}: {e}", polyline.display())))?;
    let poly = read_polyline_csv(text.as_slice())?;
    let cloud = snap.map(|p| load_space_at(p, None, None)).transpose()?;
    let d = discretize_poly(
        &poly,
        theta,
        cloud.as_ref().map(|c| Snap { cloud: &c.space, max_radius: snap_radius.unwrap_or(f64::INFINITY) }),
    )?;
    let path = d.path();
    let target = match &cloud {
        Some(c) => c.space.clone(),
        None => d.sample_space()?,
    };
    ctx.note(format!("{} breakpoints, snap radius {}", d.breakpoints.len(), d.snap_radius));
    if let Some(p) = &samples {
        let mut buf = Vec::new();
        write_points_csv(&target, &mut buf)?;
        ctx.outputs.emit(Some(p), &String::from_utf8_lossy(&buf))?;
    }
    let mut inputs: Vec<(&str, &Path)> = vec![("polyline", polyline)];
    if let Some(p) = snap {
        inputs.push(("snap", p));
    }
    let run = run_info(
        "discretize",
        Some(&target),
        &inputs,
        json!({ "theta": theta, "snap_radius": snap_radius }),
    )?;
    let mut body = to_value(&PathFile::new(&path, Some(&target)))?;
    body["breakpoints"] = json!(d.breakpoints);
    body["snap_radius"] = json!(d.snap_radius);
    ctx.outputs.emit_json(output.as_deref(), &with_run(body, run))?;
    Ok(0)
}

pub fn verify(
    ctx: &mut Ctx,
    certificate: &Path,
    space_path: &Path,
    metric: Option<String>,
    from: Option<&Path>,
    to: Option<&Path>,
) -> Result<u8, Failure> {
    let h: GridHomotopy = read_json(certificate)?;
    let loaded = load_space_at(space_path, metric.as_deref(), None)?;
    let space = &loaded.space;
    let row_path = |k: usize| thetapi::paths::ThetaPath { theta: h.theta, points: h.rows.get(k).cloned().unwrap_or_default() };
    let first = match from {
        Some(p) => read_path(p, space, None)?,
        None => row_path(0),
    };
    let last = match to {
        Some(p) => read_path(p, space, None)?,
        None => row_path(h.rows.len().saturating_sub(1)),
    };
    let result = verify_grid_homotopy(space, &h, &first, &last);
    ctx.note(format!("{} rows of width {}", h.rows.len(), h.rows.first().map_or(0, Vec::len)));
    let body = json!({
        "ok": result.is_ok(),
        "violation": result.as_ref().err().map(|v| v.to_string()),
        "rows": h.rows.len(),
        "width": h.rows.first().map_or(0, Vec::len),
    });
    ctx.outputs.emit_json(None, &body)?;
    match result {
        Ok(()) => Ok(0),
        Err(v) => Err(Failure::validation(format!("certificate rejected: {v}"))),
    }
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    /// Spaces to check; seeded random clouds are used as well.
    inputs: Vec<PathBuf>,
    /// Number of random clouds.
    #[arg(long, default_value_t = 20)]
    random: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 7)]
    max_points: usize,
    /// Also run the decider on all based loops with at most this many steps.
    #[arg(long)]
    loops: Option<usize>,
    /// Search states per decider call.
    #[arg(long, default_value_t = 100_000)]
    budget: usize,
    /// Random integer matrices for the Smith normal form check.
    #[arg(long, default_value_t = 100)]
    snf: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

pub fn oracle(ctx: &mut Ctx, args: OracleArgs) -> Result<u8, Failure> {
    let mut spaces: Vec<(String, FiniteMetricSpace)> = Vec::new();
    for p in &args.inputs {
        spaces.push((p.display().to_string(), load_space_at(p, None, None)?.space));
    }
    for k in 0..args.random {
        let seed = args.seed.wrapping_add(k as u64);
        spaces.push((format!("random:{seed}"), random_cloud(seed, args.max_points)));
    }
    let budget = Budget { max_width: None, max_states: args.budget };
    let results = spaces
        .par_iter()
        .map(|(name, s)| -> Result<Value, Failure> {
            let checks = cross_check(s, s.basepoint())?;
            let mut agreement = Agreement::default();
            if let Some(steps) = args.loops {
                for theta in critical_scales(s) {
                    agreement.merge(decider_agreement(s, theta, s.basepoint(), steps, budget)?);
                }
            }
            let failed: Vec<&thetapi::oracle::ScaleCheck> = checks.iter().filter(|c| !c.agree).collect();
            Ok(json!({
                "space": name,
                "points": s.len(),
                "scales": checks.len(),
                "homology_ok": failed.is_empty(),
                "homology_failures": failed,
                "decider": args.loops.map(|_| agreement),
            }))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let snf_failures: Vec<String> = (0..args.snf as u64)
        .into_par_iter()
        .map(|k| (format!("random:{}", args.seed.wrapping_add(k)), random_matrix(args.seed.wrapping_add(k), 12, 99)))
        .chain(
            adversarial_matrices()
                .into_par_iter()
                .enumerate()
                .map(|(k, m)| (format!("adversarial:{k}"), m)),
        )
        .filter_map(|(name, m)| check_snf(&m).err().map(|e| format!("{name}: {e}")))
        .collect();
    let homology_ok = results.iter().all(|r| r["homology_ok"] == json!(true));
    let decider_ok = results
        .iter()
        .all(|r| r["decider"].is_null() || (r["decider"]["class_mismatches"] == json!(0) && r["decider"]["contradictions"] == json!(0)));
    let ok = homology_ok && decider_ok && snf_failures.is_empty();
    ctx.note(format!("{} spaces, {} matrices", results.len(), args.snf));
    let names: Vec<String> = (0..args.inputs.len()).map(|k| format!("space{k}")).collect();
    let inputs: Vec<(&str, &Path)> = names.iter().map(String::as_str).zip(args.inputs.iter().map(PathBuf::as_path)).collect();
    let run = run_info(
        "oracle",
        None,
        &inputs,
        json!({ "random": args.random, "seed": args.seed, "max_points": args.max_points, "loops": args.loops, "budget": args.budget, "snf": args.snf }),
    )?;
    let body = json!({
        "ok": ok,
        "spaces": results,
        "snf_checked": args.snf + adversarial_matrices().len(),
        "snf_failures": snf_failures,
        "run": run,
    });
    ctx.outputs.emit_json(args.output.as_deref(), &body)?;
    if ok {
        Ok(0)
    } else {
        eprintln!("{}", json!({ "error": { "kind": "internal", "code": status::INTERNAL, "message": "oracle disagreement" } }));
        Ok(status::INTERNAL)
    }
}
