//! One function per subcommand, each returning a [`Report`].

use maxcompact_core::bounds::{
    component_bound_shape, format_graph, format_product, format_xg, n_iso_bound, BigUint,
    PfaffianFormat,
};
use maxcompact_core::elliptic::{compute_periods, CurveInvariants, DEFAULT_PRECISION};
use maxcompact_core::exact::fuzz_lemmas;
use maxcompact_core::extension::{BettiPoint, ExtensionConfig, FactorPoint, LogPoint, UEPoint};
use maxcompact_core::solver::{
    solve_intersection, torsion_order, Executor, IntersectionReport, SolverOptions,
};
use maxcompact_core::variety::parse_variety;
use maxcompact_core::C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::{C64Pair, RunConfig};
use crate::error::CliError;
use crate::report::{complex, point, Report};
use crate::text::format_real;

fn curve_inputs(curves: &[C64Pair]) -> Value {
    curves
        .iter()
        .map(|&(g2, g3)| json!({ "g2": complex(g2), "g3": complex(g3) }))
        .collect()
}

fn extension(curves: &[C64Pair]) -> Result<ExtensionConfig, CliError> {
    if curves.is_empty() {
        return Err(CliError::Validation(
            "at least one curve is required".into(),
        ));
    }
    let inv = curves
        .iter()
        .map(|&(g2, g3)| CurveInvariants::new(g2, g3))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ExtensionConfig::from_curves(&inv)?)
}

fn check_factor_count(cfg: &ExtensionConfig, n: usize) -> Result<(), CliError> {
    if n != cfg.num_factors() {
        return Err(CliError::Validation(format!(
            "{n} point factors given for {} curves",
            cfg.num_factors()
        )));
    }
    Ok(())
}

fn tolerances(cfg: &ExtensionConfig) -> Value {
    json!({ "model": cfg.model_tol(), "compact": cfg.compact_tol() })
}

/// Betti coordinates and residuals of a point already on the model.
fn betti_summary(cfg: &ExtensionConfig, pt: &UEPoint) -> Result<Value, CliError> {
    let (b, r) = cfg.betti_residual(pt)?;
    let worst = r.iter().map(|c| c.norm()).fold(0.0, f64::max);
    Ok(json!({
        "betti": b.flat(),
        "compact_residuals": r.iter().map(|&c| complex(c)).collect::<Vec<_>>(),
        "in_compact": worst <= cfg.compact_tol(),
    }))
}

pub fn periods(curves: &[C64Pair]) -> Result<Report, CliError> {
    if curves.is_empty() {
        return Err(CliError::Validation(
            "at least one curve is required".into(),
        ));
    }
    let mut out = Vec::new();
    for &(g2, g3) in curves {
        let inv = CurveInvariants::new(g2, g3)?;
        let pm = compute_periods(&inv, DEFAULT_PRECISION)?;
        out.push(json!({
            "discriminant": complex(inv.discriminant()),
            "j": complex(inv.j_invariant()),
            "omega1": complex(pm.omega1),
            "omega2": complex(pm.omega2),
            "eta1": complex(pm.eta1),
            "eta2": complex(pm.eta2),
            "tau": complex(pm.tau()),
            "legendre_residual": pm.legendre_residual(),
        }));
    }
    let n = out.len();
    Ok(Report::new(
        "periods",
        json!({ "curves": curve_inputs(curves) }),
        json!({ "curves": out }),
    )
    .note("precision_target", json!(DEFAULT_PRECISION))
    .summary(format!("periods of {n} curve(s)")))
}

/// `(z, w)` per factor.
pub fn exp(curves: &[C64Pair], tangent: &[(C64, C64)]) -> Result<Report, CliError> {
    let cfg = extension(curves)?;
    check_factor_count(&cfg, tangent.len())?;
    let pt = cfg.exp(&LogPoint {
        factors: tangent.to_vec(),
    })?;
    let residual = cfg.model_residual(&pt)?;
    let inputs = json!({
        "curves": curve_inputs(curves),
        "tangent": tangent.iter().map(|&(z, w)| json!({ "z": complex(z), "w": complex(w) })).collect::<Vec<_>>(),
    });
    let mut results = betti_summary(&cfg, &pt)?;
    results["point"] = point(&pt);
    results["model_residual"] = json!(residual);
    Ok(Report::new("exp", inputs, results)
        .note("tolerances", tolerances(&cfg))
        .summary(format!("model residual {residual:e}")))
}

/// Homogeneous (five entries) or affine (four entries) coordinates per
/// factor.
pub fn log(curves: &[C64Pair], coords: &[Vec<C64>]) -> Result<Report, CliError> {
    let cfg = extension(curves)?;
    check_factor_count(&cfg, coords.len())?;
    let factors = coords
        .iter()
        .map(|c| {
            let x: [C64; 5] = match c.len() {
                5 => [c[0], c[1], c[2], c[3], c[4]],
                4 => [C64::new(1.0, 0.0), c[0], c[1], c[2], c[3]],
                n => {
                    return Err(CliError::Validation(format!(
                        "a point factor needs 4 affine or 5 homogeneous coordinates, got {n}"
                    )))
                }
            };
            Ok(FactorPoint::from_homogeneous(x)?)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let pt = UEPoint { factors };
    let tangent = cfg.log(&pt)?;
    let inputs = json!({
        "curves": curve_inputs(curves),
        "point": coords.iter().map(|c| c.iter().map(|&z| complex(z)).collect::<Vec<_>>()).collect::<Vec<_>>(),
    });
    let mut results = betti_summary(&cfg, &pt)?;
    results["tangent"] = tangent
        .factors
        .iter()
        .map(|&(z, w)| json!({ "z": complex(z), "w": complex(w) }))
        .collect();
    results["model_residual"] = json!(cfg.model_residual(&pt)?);
    Ok(Report::new("log", inputs, results)
        .note("tolerances", tolerances(&cfg))
        .note(
            "branch",
            json!("z reduced to the fundamental parallelogram"),
        )
        .summary("logarithm computed"))
}

/// `(p, q)` per factor.
pub fn betti(curves: &[C64Pair], pq: &[(f64, f64)], qmax: u64) -> Result<Report, CliError> {
    let cfg = extension(curves)?;
    check_factor_count(&cfg, pq.len())?;
    let b = BettiPoint::new(pq.to_vec());
    let pt = cfg.betti_to_point(&b)?;
    let tol = SolverOptions::default().torsion_tol;
    let order = torsion_order(&b.flat(), qmax, tol);
    let inputs = json!({
        "curves": curve_inputs(curves),
        "betti": pq.iter().map(|&(p, q)| vec![p, q]).collect::<Vec<_>>(),
        "qmax": qmax,
    });
    let mut results = betti_summary(&cfg, &pt)?;
    results["point"] = point(&pt);
    results["model_residual"] = json!(cfg.model_residual(&pt)?);
    results["torsion_order"] = json!(order);
    Ok(Report::new("betti", inputs, results)
        .note("tolerances", tolerances(&cfg))
        .note("torsion_tol", json!(tol))
        .summary(format!(
            "torsion order: {}",
            order.map_or("none".into(), |n| n.to_string())
        )))
}

pub fn torsion(x: &[f64], qmax: u64, curves: &[C64Pair]) -> Result<Report, CliError> {
    if x.is_empty() || !x.len().is_multiple_of(2) {
        return Err(CliError::Validation(
            "Betti coordinates come in (p, q) pairs".into(),
        ));
    }
    if qmax == 0 {
        return Err(CliError::Validation("qmax must be positive".into()));
    }
    let tol = SolverOptions::default().torsion_tol;
    let order = torsion_order(x, qmax, tol);
    let mut results = json!({ "order": order });
    let mut inputs = json!({ "betti": x, "qmax": qmax });
    if !curves.is_empty() {
        let cfg = extension(curves)?;
        check_factor_count(&cfg, x.len() / 2)?;
        inputs["curves"] = curve_inputs(curves);
        if let Some(n) = order {
            let pt = cfg.betti_to_point(&BettiPoint::from_flat(x))?;
            let m = cfg.scalar_mul(n as i64, &pt)?;
            results["identity_distance"] = json!(m.distance(&cfg.identity()));
        }
    }
    Ok(Report::new("torsion", inputs, results)
        .note("torsion_tol", json!(tol))
        .summary(format!(
            "order: {}",
            order.map_or("none".into(), |n| n.to_string())
        )))
}

fn format_value(f: &PfaffianFormat) -> Value {
    f.entries()
        .iter()
        .map(|e| Value::String(e.to_string()))
        .collect()
}

pub fn bound(g: u32, delta: u32) -> Result<Report, CliError> {
    let n_iso = n_iso_bound(g, delta)?;
    let shape = component_bound_shape(g)?;
    let g64 = u64::from(g);
    let factored = format!(
        "2^{} * {g}^{} * {}^{}",
        42 * g64 * g64 + 126 * g64,
        30 * g64,
        delta.max(3),
        21 * g64
    );
    let results = json!({
        "n_iso": n_iso.to_string(),
        "n_iso_factored": factored,
        "n_iso_bits": n_iso.bits(),
        "components": serde_json::to_value(&shape).expect("shape serialises"),
        "formats": {
            "graph": format_value(&format_graph()),
            "xg": format_value(&format_xg()),
            "product": format_value(&format_product(g)?),
        },
    });
    Ok(Report::new("bound", json!({ "g": g, "delta": delta }), results).summary(n_iso.to_string()))
}

pub fn lemmas(trials: usize, seed: u64) -> Result<Report, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = fuzz_lemmas(&mut rng, trials);
    let results = json!({
        "trials": s.trials,
        "lemma1_violations": s.lemma1_violations,
        "lemma2_violations": s.lemma2_violations,
        "lemma1_min_slack": s.lemma1_min_slack,
        "violations": s.violations(),
    });
    Ok(
        Report::new("lemmas", json!({ "trials": trials, "seed": seed }), results)
            .note("arithmetic", json!("exact"))
            .summary(format!("violations: {}", s.violations())),
    )
}

/// Runs the solver; also returns the raw report for plot output.
pub fn intersect<E: Executor>(
    cfg: &RunConfig,
    exec: &E,
) -> Result<(Report, IntersectionReport), CliError> {
    cfg.validate()?;
    let inv = cfg.invariants()?;
    let ext = ExtensionConfig::from_curves(&inv)?;
    let text = cfg.variety_text()?;
    let spec = parse_variety(&text, inv.len())?;
    let opts = cfg.solver_options();
    let rep = solve_intersection(&ext, &spec, &opts, exec)?;

    let bound = n_iso_bound(inv.len() as u32, spec.delta().max(1))?;
    let solutions: Vec<Value> = rep
        .solutions
        .iter()
        .zip(&rep.torsion)
        .map(|(s, t)| {
            json!({
                "betti": s.betti.flat(),
                "point": point(&s.point),
                "residual": s.residual,
                "compact_residual": s.compact_residual,
                "iterations": s.iterations,
                "torsion_order": t,
            })
        })
        .collect();
    let clusters: Vec<Value> = rep
        .clusters
        .iter()
        .map(|c| {
            json!({
                "members": c.members,
                "dimension": c.dimension,
                "relations": c.relations.iter().map(|r| json!({ "coeffs": r.coeffs, "offset": r.offset })).collect::<Vec<_>>(),
            })
        })
        .collect();
    let n = solutions.len();
    let inputs = json!({
        "curves": curve_inputs(&cfg.curves),
        "variety": spec.to_string(),
        "delta": spec.delta(),
        "resolution": cfg.resolution,
        "tol": cfg.tol,
        "seed": cfg.seed,
        "height": cfg.height,
        "qmax": cfg.qmax,
    });
    let results = json!({
        "solution_count": n,
        "solutions": solutions,
        "clusters": clusters,
        "n_iso_bound": bound.to_string(),
        "within_bound": BigUint::from(n) <= bound,
    });
    let report = Report::new("intersect", inputs, results)
        .note("tolerances", json!({
            "model": ext.model_tol(),
            "compact": ext.compact_tol(),
            "dedup_radius": opts.dedup_radius(),
            "cluster_radius": opts.cluster_radius(),
            "relation": opts.relation_tol,
            "torsion": opts.torsion_tol,
        }))
        .note("resolutions", json!(rep.resolutions_used))
        .note("grid_nodes", json!(u64::try_from(rep.grid_nodes).unwrap_or(u64::MAX)))
        .note("seeds", json!({ "spawned": rep.seeds, "dropped": rep.dropped_seeds, "failed": rep.failed_seeds }))
        .note("min_grid_residual", json!(rep.min_grid_residual))
        .note("completeness", json!("zeros found from the listed grid resolutions only"))
        .summary(format!("solutions: {n}"));
    Ok((report, rep))
}

/// Grid samples as CSV: `p1,q1,…,pg,qg,residual`.
pub fn plot_csv(rep: &IntersectionReport, g: usize) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = (1..=g)
        .flat_map(|k| [format!("p{k}"), format!("q{k}")])
        .collect();
    header.push("residual".into());
    let io = |e: csv::Error| CliError::Validation(format!("plot data: {e}"));
    w.write_record(&header).map_err(io)?;
    for s in &rep.samples {
        let mut row: Vec<String> = s.coords.iter().map(|&x| format_real(x)).collect();
        row.push(format!("{}", s.residual));
        w.write_record(&row).map_err(io)?;
    }
    w.into_inner()
        .map_err(|e| CliError::Validation(format!("plot data: {e}")))
}
