//! Acceptance suite. Runs every criterion, prints one line each and exits
//! nonzero if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use thetapi::decider::{are_homotopic, Budget, Verdict};
use thetapi::oracle::{
    adversarial_matrices, check_snf, cross_check, decider_agreement, naive_h1, random_cloud, random_matrix, Agreement,
};
use thetapi::paths::{discretize, discretize_at, refinement_certificate};
use thetapi::paths::{verify_grid_homotopy, GridHomotopy, ThetaPath, Violation};
use thetapi::presentation::{ModelOptions, ScaleModel};
use thetapi::presentation::presentation_at_scale;
use thetapi::presentation::snf::{rank, IntMatrix};
use thetapi::scale_maps::{compose, sweep, ScaleMap, Scales};
use thetapi::spaces::{
    default_earring_samples, gen_annulus, gen_circle, gen_circle_product, gen_hawaiian_earring, gen_telescope,
};
use thetapi::spaces::{FiniteMetricSpace, Metric, PolylinePath};
use thetapi::theta_graph::critical_scales;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn nonzero(v: &[BigInt]) -> bool {
    v.iter().any(|x| !x.is_zero())
}

fn short_loop_law() -> Outcome {
    for n in 3..=12usize {
        let space = gen_circle(1.0, n, &[0.0, 0.0]).map_err(e)?;
        let chord = |k: usize| 2.0 * (PI * k as f64 / n as f64).sin();
        let theta = if n == 3 { chord(1) * 1.05 } else { 0.5 * (chord(1) + chord(2)) };
        let expected = usize::from(n >= 5);
        let plain = presentation_at_scale(&space, theta, 0).map_err(e)?.abelianization();
        let fast = ScaleModel::build(&space, theta, ModelOptions::fast()).map_err(e)?.invariants();
        for inv in [plain, fast] {
            ensure!(
                inv.rank == expected && inv.torsion.is_empty(),
                "{n}-gon at {theta:.4}: got {inv}, expected rank {expected}"
            );
        }
    }
    Ok("n = 3..12".into())
}

fn oracle_equivalence() -> Outcome {
    let checks: Vec<(u64, usize)> = (0..200u64)
        .into_par_iter()
        .map(|seed| {
            let space = random_cloud(seed, 7);
            let checks = cross_check(&space, 0).map_err(e)?;
            match checks.iter().find(|c| !c.agree) {
                Some(c) => Err(format!(
                    "seed {seed} at {}: naive {} presentation {} folded {}",
                    c.theta, c.naive, c.presentation, c.reduced_model
                )),
                None => Ok((seed, checks.len())),
            }
        })
        .collect::<Result<_, String>>()?;
    let scales: usize = checks.iter().map(|c| c.1).sum();
    Ok(format!("200 clouds, {scales} scales"))
}

fn functoriality() -> Outcome {
    let results: Vec<usize> = (0..50u64)
        .into_par_iter()
        .map(|k| -> Result<usize, String> {
            let mut rng = ChaCha8Rng::seed_from_u64(3000 + k);
            let n = rng.gen_range(10..=40);
            let pts: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()]).collect();
            let space = FiniteMetricSpace::from_points(&pts, Metric::Euclidean, 0).map_err(e)?;
            let nearest = (1..n).map(|j| space.dist(0, j)).fold(f64::INFINITY, f64::min);
            let scales: Vec<f64> = critical_scales(&space).into_iter().filter(|&t| t >= nearest).collect();
            let mut triples = Vec::new();
            if scales.len() >= 3 {
                for _ in 0..20 {
                    let mut idx = rand::seq::index::sample(&mut rng, scales.len(), 3).into_vec();
                    idx.sort_unstable();
                    triples.push(idx);
                }
            }
            let mut models = std::collections::HashMap::new();
            let mut model = |i: usize| -> Result<ScaleModel, String> {
                if let Some(m) = models.get(&i) {
                    return Ok(ScaleModel::clone(m));
                }
                let m = ScaleModel::build(&space, scales[i], ModelOptions::default()).map_err(e)?;
                models.insert(i, m.clone());
                Ok(m)
            };
            for t in &triples {
                let (a, b, c) = (model(t[0])?, model(t[1])?, model(t[2])?);
                let direct = ScaleMap::between(&a, &c).map_err(e)?;
                let first = ScaleMap::between(&a, &b).map_err(e)?;
                let second = ScaleMap::between(&b, &c).map_err(e)?;
                let composed = compose(&first, &second).map_err(e)?;
                ensure!(
                    direct.matrix == composed.matrix,
                    "cloud {k}: scales {:?} give different matrices",
                    [scales[t[0]], scales[t[1]], scales[t[2]]]
                );
            }
            Ok(triples.len())
        })
        .collect::<Result<_, String>>()?;
    Ok(format!("50 clouds, {} triples", results.iter().sum::<usize>()))
}

fn telescope() -> Outcome {
    const STAGES: usize = 3;
    let base = gen_telescope(STAGES, 20, true).map_err(e)?;
    let find = |x: [f64; 3]| -> Result<usize, String> {
        match base.nearest(&x) {
            Some((i, d)) if d < 1e-9 => Ok(i),
            _ => Err(format!("no sample at {x:?}")),
        }
    };
    let deepest = 0.5f64.powi(STAGES as i32 - 1);
    let bp = find([STAGES as f64 - 0.5, deepest, 0.0])?;
    let space = base.clone().with_basepoint(bp).map_err(e)?;
    let octagon = |n: usize| -> Result<Vec<usize>, String> {
        let r = 0.5f64.powi(n as i32);
        let mut w = (0..8)
            .map(|k| {
                let a = k as f64 * PI / 4.0;
                find([n as f64 + 0.5, 0.5 * r * a.cos(), 0.5 * r * a.sin()])
            })
            .collect::<Result<Vec<_>, _>>()?;
        w.push(w[0]);
        Ok(w)
    };
    let chord = |n: usize| 0.5f64.powi(n as i32 + 1) * 2.0 * (PI / 8.0).sin();
    let above = |n: usize| chord(n) * 1.005;
    let diameter = |n: usize| 2.0 * 0.5f64.powi(n as i32) * 1.01;
    let smallest = chord(STAGES - 1) * 0.95;
    let mut grid = vec![smallest];
    grid.extend((0..STAGES).flat_map(|n| [above(n), diameter(n)]));
    let tower = sweep(&space, &Scales::List(grid), bp, ModelOptions::fast()).map_err(e)?;
    let report = tower.inverse_limit_report().map_err(e)?;
    let index = |t: f64| tower.scales.iter().position(|&s| s == t).unwrap();
    let bottom = tower.len() - 1;
    for n in 0..STAGES {
        let walk = octagon(n)?;
        let i = index(above(n));
        let model = &tower.models[i];
        let class = model.class_of_walk(&walk).map_err(e)?;
        let free = model.invariants().rank;
        ensure!(nonzero(&class[..free]), "stage {n}: octagon has no free class at {:.5}", above(n));
        let block = tower.map_between(bottom, i).map_err(e)?.free_block();
        let mut rows = block.to_rows();
        for (row, x) in rows.iter_mut().zip(&class[..free]) {
            row.push(x.clone());
        }
        let cols = block.cols() + 1;
        let augmented = IntMatrix::from_rows(&rows, cols);
        ensure!(
            rank(&augmented) > rank(&block),
            "stage {n}: octagon class lies in the image from {smallest:.5}"
        );
        ensure!(!report.per_scale[i].cokernel.is_empty(), "stage {n}: no cokernel witness");
        let j = index(diameter(n));
        let dead = tower.models[j].class_of_walk(&walk).map_err(e)?;
        ensure!(!nonzero(&dead), "stage {n}: octagon survives at {:.4}", diameter(n));
    }
    Ok(format!("{} points, {} scales", space.len(), tower.len()))
}

fn circle_product() -> Outcome {
    let samples = [14, 7, 5];
    let space = gen_circle_product(3, &samples, 5000).map_err(e)?;
    let factors: Vec<FiniteMetricSpace> = samples
        .iter()
        .enumerate()
        .map(|(k, &m)| gen_circle(0.5f64.powi(k as i32), m, &[0.0, 0.0]))
        .collect::<Result<_, _>>()
        .map_err(e)?;
    let grid = vec![0.2, 0.3, 0.44, 0.46, 0.5, 0.6, 0.75, 0.9, 1.0, 1.2, 1.3, 1.45, 1.6];
    let tower = sweep(&space, &Scales::List(grid), 0, ModelOptions::fast()).map_err(e)?;
    let mut ranks = Vec::new();
    for (t, model) in tower.scales.iter().zip(&tower.models) {
        let mut expected = 0;
        for f in &factors {
            expected += naive_h1(f, *t, 0).map_err(e)?.rank;
        }
        let got = model.invariants().rank;
        ensure!(got <= 3 && got == expected, "at {t}: rank {got}, expected {expected}");
        ranks.push((*t, got));
    }
    ranks.reverse();
    let resolvable = space.info().spacing.unwrap();
    let resolved: Vec<_> = ranks.iter().filter(|(t, _)| *t >= resolvable).collect();
    ensure!(resolved.windows(2).all(|w| w[0].1 >= w[1].1), "rank increases above {resolvable:.3}: {ranks:?}");
    let seq: Vec<String> = ranks.iter().map(|(t, r)| format!("{t}:{r}")).collect();
    Ok(format!("{} points, ranks {}", space.len(), seq.join(" ")))
}

/// Rational rank of the free parts of `classes`.
fn span_rank(classes: &[Vec<BigInt>], free: usize) -> usize {
    let rows: Vec<Vec<BigInt>> = classes.iter().map(|c| c[..free].to_vec()).collect();
    if rows.is_empty() || free == 0 {
        return 0;
    }
    rank(&IntMatrix::from_rows(&rows, free))
}

fn earring() -> Outcome {
    let n = 4;
    let samples = default_earring_samples(n, 0.1);
    let space = gen_hawaiian_earring(n, &samples).map_err(e)?;
    let mut walks = Vec::new();
    let mut first = 1;
    for &m in &samples {
        let mut walk = vec![0];
        walk.extend(first..first + m - 1);
        walk.push(0);
        first += m - 1;
        walks.push(walk);
    }
    let finest = space.info().spacing.unwrap() * 1.001;
    let grid: Vec<f64> = (0..80).map(|i| finest * 1.05f64.powi(i)).take_while(|&t| t < 2.5).collect();
    let tower = sweep(&space, &Scales::List(grid), 0, ModelOptions::fast()).map_err(e)?;
    let ranks: Vec<usize> = tower.models.iter().map(|m| m.invariants().rank).collect();
    ensure!(ranks.windows(2).all(|w| w[0] <= w[1]), "rank drops as the scale shrinks: {ranks:?}");
    ensure!(*ranks.last().unwrap() == n, "rank {} at the finest scale", ranks.last().unwrap());
    // circle k is filled once its class lies in the span of the larger circles
    let mut filled = vec![vec![false; n]; tower.len()];
    for (i, model) in tower.models.iter().enumerate() {
        let classes = walks.iter().map(|w| model.class_of_walk(w)).collect::<Result<Vec<_>, _>>().map_err(e)?;
        let free = ranks[i];
        ensure!(
            span_rank(&classes, free) == free,
            "circle loops do not generate at {:.4}",
            tower.scales[i]
        );
        for k in 0..n {
            filled[i][k] = span_rank(&classes[..=k], free) == span_rank(&classes[..k], free);
        }
        let alive = filled[i].iter().filter(|&&f| !f).count();
        ensure!(alive == free, "at {:.4}: rank {free}, {alive} circles unfilled", tower.scales[i]);
    }
    let mut events = 0;
    for (i, map) in tower.maps.iter().enumerate() {
        let kernel = ranks[i + 1] - map.rational_rank();
        let newly = (0..n).filter(|&k| filled[i][k] && !filled[i + 1][k]).count();
        ensure!(
            kernel == newly,
            "map {:.4} -> {:.4}: kernel rank {kernel}, {newly} circles fill",
            tower.scales[i + 1],
            tower.scales[i]
        );
        events += newly;
    }
    let fill: Vec<String> = (0..n)
        .map(|k| {
            let i = (0..tower.len()).rev().find(|&i| filled[i][k]).unwrap_or(0);
            format!("{:.3}", tower.scales[i])
        })
        .collect();
    Ok(format!("{} points, {} scales, {events} fill events at {}", space.len(), tower.len(), fill.join(" ")))
}

fn annulus() -> Outcome {
    let (r_in, r_out, spacing) = (0.5, 1.0, 0.1);
    let space = gen_annulus(r_in, r_out, spacing).map_err(e)?;
    let grid: Vec<f64> = (0..36).map(|i| 0.05 * 1.1f64.powi(i)).collect();
    let tower = sweep(&space, &Scales::List(grid), 0, ModelOptions::fast()).map_err(e)?;
    let bars = tower.barcode();
    let (band_lo, band_hi) = (2.0 * spacing, r_in * 1.3);
    let spanning: Vec<_> = bars
        .bars
        .iter()
        .filter(|b| b.birth <= band_lo && b.death.is_none_or(|d| d > band_hi))
        .collect();
    ensure!(
        spanning.len() == 1 && spanning[0].multiplicity == 1,
        "{} bars span [{band_lo}, {band_hi}]: {:?}",
        spanning.len(),
        bars.bars
    );
    let bar = spanning[0];
    let death = bar.death.ok_or("the hole never fills")?;
    ensure!(death >= r_in * 2f64.sqrt() * 0.9 && death <= 2.0 * r_out, "bar dies at {death}");
    let inner = (2.0 * PI * r_in / spacing).ceil() as usize;
    let mut witness: Vec<usize> = (0..inner).collect();
    witness.push(0);
    let mut checked = 0;
    for (t, model) in tower.scales.iter().zip(&tower.models) {
        if bar.birth <= *t && *t < death {
            let class = model.class_of_walk(&witness).map_err(e)?;
            ensure!(nonzero(&class), "witness loop is null at {t:.4}");
            checked += 1;
        }
    }
    Ok(format!("bar [{:.3}, {death:.3}), witness nonzero at {checked} scales", bar.birth))
}

fn expected_violation(space: &FiniteMetricSpace, h: &GridHomotopy) -> Violation {
    for (r, row) in h.rows.iter().enumerate() {
        if let Some(&id) = row.iter().find(|&&id| id >= space.len()) {
            return Violation::PointOutOfRange { id };
        }
        for i in 0..row.len() - 1 {
            let d = space.dist(row[i], row[i + 1]);
            if d > h.theta {
                return Violation::Step { row: r, index: i, distance: d };
            }
        }
    }
    for r in 0..h.rows.len() - 1 {
        for i in 0..h.rows[r].len() {
            let d = space.dist(h.rows[r][i], h.rows[r + 1][i]);
            if d > h.theta {
                return Violation::Column { row: r, index: i, distance: d };
            }
        }
    }
    unreachable!("mutation left the grid valid")
}

fn certificate_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut accepted = 0;
    let mut rejected = 0;
    for _ in 0..1000 {
        let mut pts: Vec<Vec<f64>> = (0..4).map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()]).collect();
        pts.push(vec![100.0, 100.0]);
        let space = FiniteMetricSpace::from_points(&pts, Metric::Euclidean, 0).map_err(e)?;
        let walk = [0, 1, 2, 3, 0];
        let theta = walk.windows(2).map(|w| space.dist(w[0], w[1])).fold(0.0, f64::max);
        let loop_path = ThetaPath::new(&space, theta, walk.to_vec()).map_err(e)?;
        let constant = ThetaPath::constant(theta, 0);
        let h = GridHomotopy {
            theta,
            rows: vec![vec![0, 1, 2, 3, 0], vec![0, 1, 1, 0, 0], vec![0, 0, 0, 0, 0]],
            endpoints_fixed: true,
        };
        verify_grid_homotopy(&space, &h, &loop_path, &constant).map_err(|v| format!("contraction rejected: {v}"))?;
        accepted += 1;

        let mut bad = h.clone();
        let (r, c) = (rng.gen_range(0..3), rng.gen_range(0..5));
        let far = rng.gen_bool(0.5);
        bad.rows[r][c] = if far { 4 } else { rng.gen_range(5..100) };
        let got = verify_grid_homotopy(&space, &bad, &loop_path, &constant);
        let want = expected_violation(&space, &bad);
        ensure!(got.as_ref().err() == Some(&want), "cell ({r},{c}): got {got:?}, expected {want:?}");
        let touches = match want {
            Violation::PointOutOfRange { .. } => true,
            Violation::Step { row, index, .. } => row == r && (index == c || index + 1 == c),
            Violation::Column { row, index, .. } => index == c && (row == r || row + 1 == r),
            _ => false,
        };
        ensure!(touches, "violation {want:?} does not involve cell ({r},{c})");
        rejected += 1;
    }
    Ok(format!("{accepted} accepted, {rejected} rejected"))
}

fn random_polyline(rng: &mut ChaCha8Rng) -> Result<PolylinePath, String> {
    let k = rng.gen_range(2..=6);
    let vertices: Vec<Vec<f64>> = (0..k).map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()]).collect();
    if k >= 3 && rng.gen_bool(0.5) {
        PolylinePath::closed_loop(vertices).map_err(e)
    } else {
        PolylinePath::new(vertices, false).map_err(e)
    }
}

fn random_breakpoints(poly: &PolylinePath, theta: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let vertices = poly.vertex_arclengths();
    let mut out = vec![0.0];
    for &v in &vertices[1..] {
        let mut s = *out.last().unwrap();
        while v - s > theta {
            s += rng.gen_range(0.3..0.999) * theta;
            out.push(s);
        }
        out.push(v);
    }
    out
}

fn discretisation_coherence() -> Outcome {
    let outcomes: Vec<bool> = (0..200u64)
        .into_par_iter()
        .map(|k| -> Result<bool, String> {
            let mut rng = ChaCha8Rng::seed_from_u64(9000 + k);
            let poly = random_polyline(&mut rng)?;
            let theta = rng.gen_range(0.05..0.6);
            let d1 = discretize(&poly, theta, None).map_err(e)?;
            d1.path()
                .validate(&d1.sample_space().map_err(e)?)
                .map_err(|v| format!("polyline {k}: {v}"))?;
            let breaks = random_breakpoints(&poly, theta, &mut rng);
            let d2 = discretize_at(&poly, theta, &breaks, None).map_err(|err| format!("polyline {k}: {err}"))?;
            let (space, p, q, h) = refinement_certificate(&poly, &d1, &d2).map_err(e)?;
            verify_grid_homotopy(&space, &h, &p, &q).map_err(|v| format!("polyline {k}: certificate {v}"))?;
            if space.len() > 12 {
                return Ok(false);
            }
            match are_homotopic(&space, &p, &q, Budget::default()).map_err(e)? {
                Verdict::Trivial { .. } => Ok(true),
                v => Err(format!("polyline {k} ({} points): decider says {v:?}", space.len())),
            }
        })
        .collect::<Result<_, String>>()?;
    let small = outcomes.iter().filter(|&&b| b).count();
    Ok(format!("200 polylines, decider confirmed {small} small instances"))
}

fn snf_contract() -> Outcome {
    let mut cases: Vec<Vec<Vec<i64>>> = (0..1000).map(|s| random_matrix(s, 12, 99)).collect();
    let adversarial = adversarial_matrices();
    let extra = adversarial.len();
    cases.extend(adversarial);
    cases
        .par_iter()
        .enumerate()
        .try_for_each(|(i, m)| check_snf(m).map_err(|err| format!("matrix {i}: {err}")))?;
    Ok(format!("1000 random + {extra} adversarial"))
}

fn decider_presentation_agreement() -> Outcome {
    let budget = Budget { max_states: 100_000, ..Budget::default() };
    let parts: Vec<Agreement> = (0..100u64)
        .into_par_iter()
        .map(|k| -> Result<Agreement, String> {
            let space = random_cloud(11_000 + k, 6);
            let mut total = Agreement::default();
            for t in critical_scales(&space) {
                total.merge(decider_agreement(&space, t, 0, 6, budget).map_err(e)?);
            }
            Ok(total)
        })
        .collect::<Result<_, String>>()?;
    let mut all = Agreement::default();
    for p in parts {
        all.merge(p);
    }
    ensure!(
        all.is_consistent(),
        "{} class mismatches, {} contradictions: {:?}",
        all.class_mismatches,
        all.contradictions,
        all.examples
    );
    Ok(format!(
        "{} loops, {} trivial, {} non-trivial, {} unknown, conclusive {:.1}%",
        all.loops,
        all.trivial,
        all.nontrivial,
        all.unknown,
        100.0 * all.conclusive_rate()
    ))
}

struct Criterion {
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { name: "short-loop law on regular polygons", limit: Duration::from_secs(1), run: short_loop_law },
        Criterion { name: "presentation vs naive complex", limit: Duration::from_secs(120), run: oracle_equivalence },
        Criterion { name: "functoriality of induced maps", limit: Duration::from_secs(300), run: functoriality },
        Criterion { name: "telescope octagons outside the image", limit: Duration::from_secs(120), run: telescope },
        Criterion { name: "circle product ranks", limit: Duration::from_secs(180), run: circle_product },
        Criterion { name: "hawaiian earring tower", limit: Duration::from_secs(120), run: earring },
        Criterion { name: "annulus persistence", limit: Duration::from_secs(60), run: annulus },
        Criterion { name: "grid certificate soundness", limit: Duration::from_secs(30), run: certificate_soundness },
        Criterion { name: "discretisation coherence", limit: Duration::from_secs(120), run: discretisation_coherence },
        Criterion { name: "smith normal form contract", limit: Duration::from_secs(60), run: snf_contract },
        Criterion {
            name: "decider vs presentation",
            limit: Duration::from_secs(600),
            run: decider_presentation_agreement,
        },
    ];
    let only: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for (i, c) in criteria.iter().enumerate() {
        let number = i + 1;
        if only.is_some_and(|k| k != number) {
            continue;
        }
        let start = Instant::now();
        let result = std::panic::catch_unwind(c.run).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let result = match result {
            Ok(_) if elapsed > c.limit => Err(format!("took {:.1}s, limit {}s", elapsed.as_secs_f64(), c.limit.as_secs())),
            r => r,
        };
        let (tag, detail) = match &result {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("criterion {number:>2} {tag} {:<40} {:>7.2}s  {detail}", c.name, elapsed.as_secs_f64());
        failed += usize::from(result.is_err());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
